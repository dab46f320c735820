"""Geometry, path enumeration and contour extraction."""

from __future__ import annotations

import numpy as np
import pytest

from vnrf.lattice import (
    BoundaryCondition,
    Configuration,
    Window,
    boundary_sites,
    connected_components,
    count_contours_through_origin,
    disagreement_bond_count,
    enumerate_self_avoiding_paths,
    extract_contours,
    interior,
    is_self_avoiding_path,
    neighbors,
    origin_in_interior,
)
from vnrf.theory import contour_count_bound, saw_count_bound


def _config(window: Window, m: int) -> Configuration:
    n = window.site_count
    spins = np.array([1 if (m >> j) & 1 else -1 for j in range(n)], dtype=np.int8)
    return Configuration(window, spins.reshape(window.width, window.height))


def test_neighbors():
    assert set(neighbors((0, 0))) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert set(neighbors((2, 3))) == {(3, 3), (1, 3), (2, 4), (2, 2)}
    assert (1, 1) not in neighbors((0, 0))


def test_window_geometry():
    w = Window(3, 4, origin=(-1, 2))
    assert w.site_count == 12
    assert w.contains((-1, 2)) and w.contains((1, 5))
    assert not w.contains((2, 2)) and not w.contains((0, 6))
    assert w.sites() == sorted(w.sites())
    for j, s in enumerate(w.sites()):
        assert w.index(s) == j
        assert w.site_at(j) == s
    assert Window.centered(2).sites()[0] == (-2, -2)
    assert Window(5, 5).center() == (2, 2)
    with pytest.raises(ValueError):
        Window(0, 3)


def test_edge_sites():
    w = Window(4, 4)
    edges = {s for s in w.sites() if w.is_edge_site(s)}
    assert len(edges) == 12
    assert (1, 1) not in edges and (2, 2) not in edges


def test_configuration_roundtrip():
    w = Window(3, 3, boundary=BoundaryCondition.MINUS)
    x = Configuration.filled(w, 1)
    assert x.spin((1, 1)) == 1
    assert x.spin_or_exterior((3, 0)) == -1
    values = {s: (-1 if s == (0, 2) else 1) for s in w.sites()}
    y = Configuration.from_sites(w, values)
    assert y.minus_sites() == {(0, 2)}
    with pytest.raises(ValueError):
        Configuration(w, np.zeros((3, 3)))
    with pytest.raises(ValueError):
        x.spin((5, 5))


def test_boundary_and_interior():
    block = {(a, b) for a in range(-1, 2) for b in range(-1, 2)}
    assert interior(block) == {(0, 0)}
    assert boundary_sites(block) == block - {(0, 0)}
    assert boundary_sites({(0, 0)}) == {(0, 0)}
    assert interior({(0, 0)}) == set()
    assert boundary_sites({(0, 0), (1, 0)}) == {(0, 0), (1, 0)}


def test_boundary_two_ways_random():
    # definition scan vs. neighbor-of-complement scan
    rng = np.random.default_rng(7)
    for _ in range(200):
        pts = {
            (int(a), int(b))
            for a, b in rng.integers(0, 10, size=(rng.integers(1, 20), 2))
        }
        alt = {s for s in pts if any(nb not in pts for nb in neighbors(s))}
        assert boundary_sites(pts) == alt


def test_connected_components():
    assert connected_components({(0, 0), (1, 0), (5, 5)}) == [
        {(0, 0), (1, 0)},
        {(5, 5)},
    ]
    assert connected_components(set()) == []
    block = {(a, b) for a in range(3) for b in range(3)}
    assert connected_components(block) == [block]
    # partition property on random sets
    rng = np.random.default_rng(11)
    for _ in range(50):
        pts = {
            (int(a), int(b))
            for a, b in rng.integers(0, 8, size=(rng.integers(1, 25), 2))
        }
        comps = connected_components(pts)
        assert set().union(*comps) == pts
        assert sum(len(c) for c in comps) == len(pts)
        for i, a in enumerate(comps):
            for b in comps[i + 1 :]:
                assert min(
                    abs(p[0] - q[0]) + abs(p[1] - q[1]) for p in a for q in b
                ) >= 2


def test_self_avoiding_path_predicate():
    assert is_self_avoiding_path([(0, 0), (0, 1), (1, 1)])
    assert not is_self_avoiding_path([(0, 0), (1, 1)])  # not nearest neighbors
    assert not is_self_avoiding_path([(0, 0), (0, 1), (0, 0)])  # revisit
    # non-consecutive sites at distance 1 break strictness
    assert not is_self_avoiding_path([(0, 0), (0, 1), (1, 1), (1, 0)])


def test_saw_counts_from_origin_neighbors():
    w = Window.centered(10)
    starts = neighbors((0, 0))
    for n in range(1, 6):
        paths = enumerate_self_avoiding_paths(starts, n, w, exclude={(0, 0)})
        assert all(is_self_avoiding_path(p) for p in paths)
        assert len(set(paths)) == len(paths)
        assert len(paths) <= saw_count_bound(n)
    assert len(enumerate_self_avoiding_paths(starts, 1, w, exclude={(0, 0)})) == 4
    assert len(enumerate_self_avoiding_paths(starts, 2, w, exclude={(0, 0)})) == 12
    assert len(enumerate_self_avoiding_paths(starts, 3, w, exclude={(0, 0)})) == 36


def test_saw_enumeration_errors():
    with pytest.raises(ValueError):
        enumerate_self_avoiding_paths([(0, 0)], 0, Window(3, 3))
    with pytest.raises(ValueError):
        enumerate_self_avoiding_paths([(0, 0)], 20, Window(2, 2))


def test_contours_simple():
    w = Window(3, 3, boundary=BoundaryCondition.PLUS)
    assert extract_contours(Configuration.filled(w, 1)) == []
    single = Configuration.from_sites(
        w, {s: (-1 if s == (1, 1) else 1) for s in w.sites()}
    )
    (gamma,) = extract_contours(single)
    assert gamma.length == 4
    domino = Configuration.from_sites(
        w, {s: (-1 if s in {(1, 1), (1, 2)} else 1) for s in w.sites()}
    )
    (gamma,) = extract_contours(domino)
    assert gamma.length == 6


def test_contour_length_invariant_exhaustive():
    w = Window(3, 3, boundary=BoundaryCondition.PLUS)
    for m in range(2**9):
        x = _config(w, m)
        total = sum(c.length for c in extract_contours(x))
        assert total == disagreement_bond_count(x)


def test_origin_in_interior():
    square = ((-1, -1), (-1, 1), (1, 1), (1, -1))
    assert origin_in_interior(square)
    shifted = tuple((a + 4, b) for a, b in square)
    assert not origin_in_interior(shifted)


def test_contour_counts_through_origin():
    assert count_contours_through_origin(4) == 1
    assert count_contours_through_origin(6) == 4
    assert count_contours_through_origin(8) == 22
    for length in (4, 6, 8, 10):
        assert count_contours_through_origin(length) <= contour_count_bound(length)
    with pytest.raises(ValueError):
        count_contours_through_origin(5)
    with pytest.raises(ValueError):
        count_contours_through_origin(2)
