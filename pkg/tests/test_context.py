"""Context computation, brute-force oracle agreement and the census."""

from __future__ import annotations

import numpy as np
import pytest

from vnrf.context import (
    ContextStatus,
    brute_force_context,
    compute_context,
    context_census,
    spanning_minus_cluster,
)
from vnrf.lattice import BoundaryCondition, Configuration, Window, neighbors


def _config(window: Window, m: int) -> Configuration:
    n = window.site_count
    spins = np.array([1 if (m >> j) & 1 else -1 for j in range(n)], dtype=np.int8)
    return Configuration(window, spins.reshape(window.width, window.height))


def test_all_plus_context():
    w = Window.centered(3)
    x = Configuration.filled(w, 1)
    ctx = compute_context(x, (0, 0))
    assert ctx.status is ContextStatus.RESOLVED
    assert ctx.members == frozenset(neighbors((0, 0)))
    assert ctx.size == 4


def test_single_minus_neighbor_context():
    # one -1 at (1,0) next to i=(0,0): the context absorbs the cluster and
    # its +1 boundary ring
    w = Window.centered(3)
    values = {s: 1 for s in w.sites()}
    values[(1, 0)] = -1
    x = Configuration.from_sites(w, values)
    ctx = compute_context(x, (0, 0))
    assert ctx.status is ContextStatus.RESOLVED
    assert ctx.members == frozenset(
        {(1, 0), (-1, 0), (0, 1), (0, -1), (2, 0), (1, 1), (1, -1)}
    )


def test_all_minus_truncated():
    w = Window(5, 5)
    x = Configuration.filled(w, -1)
    ctx = compute_context(x, (2, 2))
    assert ctx.status is ContextStatus.TRUNCATED
    assert ctx.members == frozenset()


def test_context_errors():
    w = Window(3, 3)
    x = Configuration.filled(w, 1)
    with pytest.raises(ValueError):
        compute_context(x, (9, 9))


def test_resolved_context_invariants():
    rng = np.random.default_rng(21)
    w = Window(6, 6)
    for _ in range(300):
        spins = np.where(rng.random((6, 6)) < 0.4, -1, 1).astype(np.int8)
        x = Configuration(w, spins)
        for i in [(2, 2), (3, 3), (2, 3)]:
            ctx = compute_context(x, i)
            if ctx.status is not ContextStatus.RESOLVED:
                continue
            assert i not in ctx.members
            assert ctx.size >= 4
            assert frozenset(neighbors(i)) <= ctx.members
            # boundary of the closure is all +1
            closure = set(ctx.members) | {i}
            for s in closure:
                if any(nb not in closure for nb in neighbors(s)):
                    assert x.spin(s) == 1


def test_context_monotone_in_spin_flips():
    # flipping a -1 to +1 never enlarges a resolved context
    rng = np.random.default_rng(22)
    w = Window(6, 6)
    for _ in range(100):
        spins = np.where(rng.random((6, 6)) < 0.4, -1, 1).astype(np.int8)
        x = Configuration(w, spins)
        ctx = compute_context(x, (2, 2))
        if ctx.status is not ContextStatus.RESOLVED:
            continue
        minus = list(x.minus_sites())
        if not minus:
            continue
        s = minus[rng.integers(len(minus))]
        y = x.copy()
        o1, o2 = w.origin
        y.spins[s[0] - o1, s[1] - o2] = 1
        ctx2 = compute_context(y, (2, 2))
        assert ctx2.status is ContextStatus.RESOLVED
        assert ctx2.members <= ctx.members


def test_locality():
    # configurations agreeing on the closure and its boundary share the context
    rng = np.random.default_rng(23)
    w = Window(7, 7)
    for _ in range(100):
        spins = np.where(rng.random((7, 7)) < 0.35, -1, 1).astype(np.int8)
        x = Configuration(w, spins)
        ctx = compute_context(x, (3, 3))
        if ctx.status is not ContextStatus.RESOLVED:
            continue
        closure = set(ctx.members) | {(3, 3)}
        y = x.copy()
        for s in w.sites():
            if s not in closure:
                o1, o2 = w.origin
                y.spins[s[0] - o1, s[1] - o2] = -y.spins[s[0] - o1, s[1] - o2]
        # restore the boundary ring of the closure (it lies inside closure)
        ctx2 = compute_context(y, (3, 3))
        assert ctx2.status is ContextStatus.RESOLVED
        assert ctx2.members == ctx.members


def test_brute_force_agreement_exhaustive_3x3():
    w = Window(3, 3)
    for m in range(2**9):
        x = _config(w, m)
        a = compute_context(x, (1, 1))
        b = brute_force_context(x, (1, 1))
        assert a.status == b.status
        assert a.members == b.members


def test_truncation_iff_minus_path_to_edge():
    # truncated at center <=> a -1 path joins a neighbor of the center to the edge
    w = Window(3, 3)
    for m in range(2**9):
        x = _config(w, m)
        ctx = compute_context(x, (1, 1))
        # on 3x3 every neighbor of the center is an edge site already
        has_minus_neighbor = any(x.spin(nb) == -1 for nb in neighbors((1, 1)))
        assert (ctx.status is ContextStatus.TRUNCATED) == has_minus_neighbor


def test_brute_force_agreement_random_4x4():
    rng = np.random.default_rng(24)
    w = Window(4, 4)
    sites = [(1, 1), (1, 2), (2, 1), (2, 2)]
    for _ in range(500):
        spins = np.where(rng.random((4, 4)) < rng.random(), -1, 1).astype(np.int8)
        x = Configuration(w, spins)
        i = sites[rng.integers(4)]
        a = compute_context(x, i)
        b = brute_force_context(x, i)
        assert a.status == b.status and a.members == b.members


def test_census_all_plus():
    w = Window(5, 5)
    census = context_census(Configuration.filled(w, 1))
    assert not census.spanning
    assert census.truncated_fraction == 0.0
    assert np.all(census.resolved_sizes() == 4)
    assert census.max_minus_cluster == 0


def test_census_spanning_stripe():
    w = Window(5, 5)
    values = {s: (-1 if s[0] == 2 else 1) for s in w.sites()}
    x = Configuration.from_sites(w, values)
    census = context_census(x)
    assert census.spanning
    assert spanning_minus_cluster(x)
    assert census.max_minus_cluster == 5


def test_census_matches_per_site_contexts():
    rng = np.random.default_rng(25)
    w = Window(8, 8)
    for _ in range(100):
        spins = np.where(rng.random((8, 8)) < 0.35, -1, 1).astype(np.int8)
        x = Configuration(w, spins)
        census = context_census(x)
        for j, i in enumerate(census.interior_sites):
            ctx = compute_context(x, i)
            if ctx.status is ContextStatus.TRUNCATED:
                assert census.truncated[j]
            else:
                assert not census.truncated[j]
                assert census.sizes[j] == ctx.size


def test_spanning_detection():
    w = Window(4, 4)
    assert not spanning_minus_cluster(Configuration.filled(w, 1))
    assert spanning_minus_cluster(Configuration.filled(w, -1))
    # a column of -1 spans top-to-bottom
    values = {s: (-1 if s[1] == 1 else 1) for s in w.sites()}
    assert spanning_minus_cluster(Configuration.from_sites(w, values))
    # an L that touches two adjacent edges only does not span
    values = {s: 1 for s in w.sites()}
    for s in [(0, 0), (0, 1), (1, 0)]:
        values[s] = -1
    assert not spanning_minus_cluster(Configuration.from_sites(w, values))
