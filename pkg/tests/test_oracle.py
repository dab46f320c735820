"""Exact observed-field measure and the context-formula conditionals."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from vnrf.context import ContextStatus, compute_context
from vnrf.lattice import BoundaryCondition, Configuration, Window
from vnrf.oracle import (
    conditional_from_phi,
    context_sensitivity_witness,
    exact_observed_measure,
    phi,
    verify_context_measurability,
)
from vnrf.sampler import NoiseParams, rng_stream, sample_observed
from vnrf.specification import SpecificationParams, ising_one_point


def test_measure_sums_to_one():
    m = exact_observed_measure(
        SpecificationParams(0.9), NoiseParams(0.3),
        Window(3, 3, boundary=BoundaryCondition.MINUS),
    )
    assert float(m.table.sum()) == pytest.approx(1.0, abs=1e-12)
    assert np.all(m.table >= 0.0)


def test_measure_cap():
    with pytest.raises(ValueError):
        exact_observed_measure(
            SpecificationParams(0.5), NoiseParams(0.1), Window(5, 5)
        )


def test_measure_one_site_closed_form():
    beta, eps = 0.7, 0.25
    m = exact_observed_measure(
        SpecificationParams(beta), NoiseParams(eps),
        Window(1, 1, boundary=BoundaryCondition.PLUS),
    )
    gibbs = math.exp(4 * beta) / (math.exp(4 * beta) + math.exp(-4 * beta))
    assert m.marginal_plus((0, 0)) == pytest.approx((1 - eps) * gibbs, abs=1e-12)


def test_measure_beta0_product_form():
    eps = 0.3
    m = exact_observed_measure(
        SpecificationParams(0.0), NoiseParams(eps), Window(2, 2)
    )
    p_plus = (1 - eps) / 2
    for mask_bits in range(16):
        k = bin(mask_bits).count("1")
        want = p_plus**k * (1 - p_plus) ** (4 - k)
        assert float(m.table[mask_bits]) == pytest.approx(want, abs=1e-12)


def test_measure_small_eps_limit():
    # eps -> 0: observed table approaches the pure Gibbs table
    from vnrf.sampler import window_kernel

    w = Window(2, 2, boundary=BoundaryCondition.PLUS)
    params = SpecificationParams(0.6)
    gibbs = window_kernel(params, w).weights
    eps = 1e-3
    m = exact_observed_measure(params, NoiseParams(eps), w)
    tv = 0.5 * float(np.abs(m.table - gibbs).sum())
    assert tv < 10 * eps


def test_measure_matches_monte_carlo():
    params = SpecificationParams(0.5)
    noise = NoiseParams(0.2)
    w = Window(2, 2, boundary=BoundaryCondition.PLUS)
    m = exact_observed_measure(params, noise, w)
    rng = rng_stream(31)
    n = 20_000
    counts = np.zeros(16)
    for _ in range(n):
        counts[m.config_mask(sample_observed(params, noise, w, rng))] += 1
    for mask_bits in range(16):
        p = float(m.table[mask_bits])
        se = math.sqrt(max(p * (1 - p), 1e-12) / n)
        assert abs(counts[mask_bits] / n - p) < 4 * se + 1e-3


def test_conditional_plus():
    m = exact_observed_measure(
        SpecificationParams(0.4), NoiseParams(0.2),
        Window(3, 3, boundary=BoundaryCondition.PLUS),
    )
    x = m.config_at(2**9 - 1)
    c = m.conditional_plus((1, 1), x)
    assert 0.0 < c < 1.0
    # independent of the center spin in x
    y = m.config_at((2**9 - 1) & ~(1 << m.window.index((1, 1))))
    assert m.conditional_plus((1, 1), y) == pytest.approx(c)


def test_phi_single_site():
    beta, eps = 0.6, 0.3
    params = SpecificationParams(beta)
    noise = NoiseParams(eps)
    ring = {nb: 1 for nb in [(1, 0), (-1, 0), (0, 1), (0, -1)]}
    p_up = ising_one_point(params, 4)
    up = phi(params, noise, [(0, 0)], {**ring, (0, 0): 1})
    down = phi(params, noise, [(0, 0)], {**ring, (0, 0): -1})
    assert up == pytest.approx((1 - eps) * p_up, abs=1e-12)
    assert down == pytest.approx(eps + (1 - eps) * (1 - p_up), abs=1e-12)
    assert up + down == pytest.approx(1.0, abs=1e-12)


def test_phi_validation():
    params = SpecificationParams(0.5)
    noise = NoiseParams(0.2)
    ring = {nb: 1 for nb in [(1, 0), (-1, 0), (0, 1), (0, -1)]}
    with pytest.raises(ValueError):
        phi(params, noise, [], {})
    with pytest.raises(ValueError):
        phi(params, noise, [(0, 0)], {**ring, (1, 0): -1, (0, 0): 1})
    with pytest.raises(ValueError):
        phi(params, noise, [(0, 0)], ring)  # missing interior value


def test_phi_total_probability():
    # summed over all z on the interior, phi is 1 for a fixed region
    params = SpecificationParams(0.8)
    noise = NoiseParams(0.25)
    lam = [(0, 0), (1, 0)]
    ring = {
        nb: 1
        for s in lam
        for nb in [(s[0] + d1, s[1] + d2) for d1, d2 in ((1, 0), (-1, 0), (0, 1), (0, -1))]
        if nb not in lam
    }
    total = 0.0
    for za, zb in itertools.product((-1, 1), repeat=2):
        total += phi(params, noise, lam, {**ring, (0, 0): za, (1, 0): zb})
    assert total == pytest.approx(1.0, abs=1e-12)
    for za, zb in itertools.product((-1, 1), repeat=2):
        v = phi(params, noise, lam, {**ring, (0, 0): za, (1, 0): zb})
        assert 0.0 <= v <= 1.0


def test_conditional_from_phi_four_plus_neighbors():
    # context = the four neighbors; closed form with denominator 1
    beta, eps = 0.9, 0.15
    params = SpecificationParams(beta)
    noise = NoiseParams(eps)
    w = Window.centered(2, boundary=BoundaryCondition.PLUS)
    x = Configuration.filled(w, 1)
    got = conditional_from_phi(params, noise, x, (0, 0))
    gibbs = math.exp(4 * beta) / (math.exp(4 * beta) + math.exp(-4 * beta))
    assert got == pytest.approx((1 - eps) * gibbs, abs=1e-12)
    p0 = SpecificationParams(0.0)
    assert conditional_from_phi(p0, NoiseParams(0.5), x, (0, 0)) == pytest.approx(0.25)


def test_conditional_from_phi_truncated_rejected():
    params = SpecificationParams(0.5)
    noise = NoiseParams(0.2)
    w = Window(3, 3, boundary=BoundaryCondition.PLUS)
    x = Configuration.filled(w, -1)
    with pytest.raises(ValueError):
        conditional_from_phi(params, noise, x, (1, 1))


def test_conditional_matches_measure_3x3():
    params = SpecificationParams(0.8)
    noise = NoiseParams(0.2)
    w = Window(3, 3, boundary=BoundaryCondition.PLUS)
    measure = exact_observed_measure(params, noise, w)
    checked = 0
    for m in range(2**9):
        x = measure.config_at(m)
        if compute_context(x, (1, 1)).status is not ContextStatus.RESOLVED:
            continue
        got = conditional_from_phi(params, noise, x, (1, 1))
        want = measure.conditional_plus((1, 1), x)
        assert got == pytest.approx(want, abs=1e-10)
        checked += 1
    assert checked > 0


def test_measurability_beta0():
    spread = verify_context_measurability(
        SpecificationParams(0.0), NoiseParams(0.3),
        Window(3, 3, boundary=BoundaryCondition.PLUS),
    )
    assert spread <= 1e-12


def test_measurability_and_witness():
    noise = NoiseParams(0.2)
    spread = verify_context_measurability(
        SpecificationParams(0.8), noise, Window(3, 3, boundary=BoundaryCondition.PLUS)
    )
    assert spread <= 1e-10
    # a 3x3 window admits only one resolved context at the center, so the
    # negative-control pair lives on a 4x4 window
    gap = context_sensitivity_witness(
        SpecificationParams(0.5), noise,
        Window(4, 4, boundary=BoundaryCondition.PLUS), (1, 1),
    )
    assert gap > 1e-3
