"""Gibbs specifications for the homogeneous ferromagnetic Ising model.

Finite-volume kernels are computed by exact enumeration in log space, so
partition sums stay finite up to beta ~ 50.  Kernel tables are memoized on
(beta, region, exterior) because samplers and consistency checks reuse the
same regions heavily.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import Site, neighbors, sort_sites

ENUMERATION_CAP = 20

_KERNEL_CACHE: dict = {}


@dataclass(frozen=True)
class SpecificationParams:
    """Inverse temperature and model identity."""

    beta: float
    model: str = "homogeneous_ising"

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if self.model != "homogeneous_ising":
            raise ValueError(f"unknown model {self.model!r}")


@dataclass(frozen=True)
class ExtremalRates:
    """Infima of the one-point conditionals over all exterior configurations."""

    lambda0_plus: float
    lambda0_minus: float


def ising_one_point(params: SpecificationParams, neighbor_spin_sum: int) -> float:
    """P(spin = +1 | sum of the four neighbor spins).

    Equals exp(beta*s) / (exp(beta*s) + exp(-beta*s)).
    """
    if neighbor_spin_sum not in (-4, -2, 0, 2, 4):
        raise ValueError(f"invalid neighbor spin sum {neighbor_spin_sum}")
    return float(1.0 / (1.0 + np.exp(-2.0 * params.beta * neighbor_spin_sum)))


def one_point_probability_table(params: SpecificationParams) -> np.ndarray:
    """P(+1 | s) indexed by s + 4 for s = -4..4 (odd sums arise with free boundaries)."""
    s = np.arange(-4, 5, dtype=float)
    return 1.0 / (1.0 + np.exp(-2.0 * params.beta * s))


@dataclass(frozen=True)
class KernelTable:
    """Exact finite-volume weights p_Lambda(. | exterior).

    ``region`` is row-major sorted; configuration index ``m`` has bit ``j``
    set iff the spin at ``region[j]`` is +1.
    """

    region: tuple[Site, ...]
    exterior: tuple[tuple[Site, int], ...]
    weights: np.ndarray

    def __post_init__(self):
        self.weights.setflags(write=False)
        if abs(float(self.weights.sum()) - 1.0) > 1e-12:
            raise AssertionError("kernel weights do not sum to 1")

    def weight(self, spins: dict[Site, int]) -> float:
        m = 0
        for j, site in enumerate(self.region):
            if spins[site] == 1:
                m |= 1 << j
        return float(self.weights[m])

    def config_at(self, m: int) -> dict[Site, int]:
        return {site: (1 if (m >> j) & 1 else -1) for j, site in enumerate(self.region)}

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.weights)


def _region_spin_matrix(k: int) -> np.ndarray:
    masks = np.arange(2**k, dtype=np.int64)
    return np.where((masks[:, None] >> np.arange(k)) & 1, 1, -1).astype(np.int8)


def finite_volume_kernel(
    params: SpecificationParams,
    region,
    exterior: dict[Site, int],
    cap: int = ENUMERATION_CAP,
) -> KernelTable:
    """Exact kernel by full enumeration of all spin assignments on the region.

    ``exterior`` maps the sites at L1-distance 1 from the region to their
    spins; sites missing from it contribute no coupling (free boundary).
    """
    region = tuple(sort_sites(set(region)))
    k = len(region)
    if k == 0:
        raise ValueError("region must be nonempty")
    if k > cap:
        raise ValueError(
            f"region of {k} sites exceeds the enumeration cap {cap}; use the MCMC sampler"
        )
    region_set = set(region)
    ext_items = tuple(sorted((s, int(v)) for s, v in exterior.items()))
    key = (params.beta, region, ext_items)
    cached = _KERNEL_CACHE.get(key)
    if cached is not None:
        return cached

    index = {site: j for j, site in enumerate(region)}
    pairs = [
        (index[a], index[b])
        for a in region
        for b in neighbors(a)
        if b in region_set and index[b] > index[a]
    ]
    ext_field = np.array(
        [
            sum(exterior.get(nb, 0) for nb in neighbors(site) if nb not in region_set)
            for site in region
        ],
        dtype=float,
    )

    spins = _region_spin_matrix(k).astype(float)
    energy = spins @ ext_field
    for a, b in pairs:
        energy += spins[:, a] * spins[:, b]
    logw = params.beta * energy
    logw -= logw.max()
    w = np.exp(logw)
    w /= w.sum()

    table = KernelTable(region=region, exterior=ext_items, weights=w)
    _KERNEL_CACHE[key] = table
    return table


def _inner_submask_map(outer: tuple[Site, ...], inner: tuple[Site, ...]) -> np.ndarray:
    """Map each outer-config bitmask to the bitmask of its inner restriction."""
    pos = {site: j for j, site in enumerate(outer)}
    out = np.zeros(2 ** len(outer), dtype=np.int64)
    masks = np.arange(2 ** len(outer), dtype=np.int64)
    for j, site in enumerate(inner):
        out |= ((masks >> pos[site]) & 1) << j
    return out


def check_consistency(
    params: SpecificationParams,
    inner,
    outer,
    exterior: dict[Site, int],
) -> float:
    """Max event discrepancy in the kernel composition identity.

    Composes the inner kernel over the outer kernel and compares against the
    outer kernel's inner marginal; returns the total-variation distance,
    which is the maximum over inner-sigma-field events of the difference.
    """
    inner = tuple(sort_sites(set(inner)))
    outer = tuple(sort_sites(set(outer)))
    if not set(inner) <= set(outer):
        raise ValueError("inner region must be contained in the outer region")
    outer_table = finite_volume_kernel(params, outer, exterior)

    inner_set = set(inner)
    outer_set = set(outer)
    ring = sort_sites(
        {nb for site in inner for nb in neighbors(site) if nb not in inner_set}
    )
    ring_in_outer = [s for s in ring if s in outer_set]
    fixed_ext = {}
    for s in ring:
        if s not in outer_set:
            if s not in exterior:
                raise ValueError(f"exterior missing spin at {s}")
            fixed_ext[s] = exterior[s]

    # pattern id of each outer config = spins on ring_in_outer
    pos = {site: j for j, site in enumerate(outer)}
    masks = np.arange(2 ** len(outer), dtype=np.int64)
    pat = np.zeros_like(masks)
    for j, s in enumerate(ring_in_outer):
        pat |= ((masks >> pos[s]) & 1) << j
    pat_weight = np.bincount(pat, weights=outer_table.weights, minlength=2 ** len(ring_in_outer))

    composed = np.zeros(2 ** len(inner))
    for p in range(2 ** len(ring_in_outer)):
        if pat_weight[p] == 0.0:
            continue
        ext = dict(fixed_ext)
        for j, s in enumerate(ring_in_outer):
            ext[s] = 1 if (p >> j) & 1 else -1
        inner_table = finite_volume_kernel(params, inner, ext)
        composed += pat_weight[p] * inner_table.weights

    sub = _inner_submask_map(outer, inner)
    direct = np.bincount(sub, weights=outer_table.weights, minlength=2 ** len(inner))
    return float(0.5 * np.abs(composed - direct).sum())


def extremal_rates(params: SpecificationParams) -> ExtremalRates:
    """lambda0+/- of the Ising one-point specification.

    For the nearest-neighbor Markov case the infimum over all exterior
    configurations reduces to the 2^4 neighbor patterns; by spin-flip
    symmetry both rates equal (1 + exp(8*beta))^(-1).
    """
    rate = float(1.0 / (1.0 + np.exp(8.0 * params.beta)))
    return ExtremalRates(lambda0_plus=rate, lambda0_minus=rate)


def extremal_rates_brute_force(params: SpecificationParams) -> ExtremalRates:
    """Minimize the one-point conditionals over all 16 neighbor patterns."""
    plus = 1.0
    minus = 1.0
    for pattern in range(16):
        s = sum(1 if (pattern >> j) & 1 else -1 for j in range(4))
        p = ising_one_point(params, s)
        plus = min(plus, p)
        minus = min(minus, 1.0 - p)
    return ExtremalRates(lambda0_plus=plus, lambda0_minus=minus)
