"""Exact small-window computations for the observed field.

These routines are the ground truth behind the statistical tests: the full
observed-field table by enumeration, the context-formula conditionals, and
the measurability check that conditionals depend on the context only.

The channel is q(-1|-1) = 1, q(-1|+1) = eps, q(+1|+1) = 1 - eps and
q(+1|-1) = 0: an observed +1 forces a hidden +1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .context import ContextStatus, compute_context
from .lattice import Configuration, Site, Window, interior, neighbors
from .sampler import NoiseParams, window_kernel
from .specification import SpecificationParams, finite_volume_kernel

OBSERVED_ENUMERATION_CAP = 16


@dataclass
class ExactObservedMeasure:
    """Exact table of the observed field on a window.

    ``table[m]`` is the probability of the observed configuration whose
    row-major site j reads +1 iff bit j of m is set.
    """

    window: Window
    params: SpecificationParams
    noise: NoiseParams
    table: np.ndarray

    def __post_init__(self):
        self.table.setflags(write=False)
        if abs(float(self.table.sum()) - 1.0) > 1e-10:
            raise AssertionError("observed-measure table does not sum to 1")

    def config_mask(self, x: Configuration) -> int:
        if x.window != self.window:
            raise ValueError("configuration window mismatch")
        flat = x.spins.reshape(-1)
        m = 0
        for j in range(self.window.site_count):
            if flat[j] == 1:
                m |= 1 << j
        return m

    def config_at(self, m: int) -> Configuration:
        flat = np.array(
            [1 if (m >> j) & 1 else -1 for j in range(self.window.site_count)],
            dtype=np.int8,
        )
        return Configuration(self.window, flat.reshape(self.window.width, self.window.height))

    def probability(self, x: Configuration) -> float:
        return float(self.table[self.config_mask(x)])

    def conditional_plus(self, i: Site, x: Configuration) -> float:
        """P(X_i = +1 | the rest of the window as in x)."""
        bit = 1 << self.window.index(i)
        m = self.config_mask(x)
        up = float(self.table[m | bit])
        down = float(self.table[m & ~bit])
        total = up + down
        if total == 0.0:
            raise ValueError("conditioning event has probability zero")
        return up / total

    def marginal_plus(self, i: Site) -> float:
        bit = 1 << self.window.index(i)
        masks = np.arange(len(self.table))
        return float(self.table[(masks & bit) != 0].sum())


def exact_observed_measure(
    params: SpecificationParams, noise: NoiseParams, window: Window
) -> ExactObservedMeasure:
    """Exact observed-field table: hidden Gibbs enumeration pushed through
    the masking channel site by site."""
    n = window.site_count
    if n > OBSERVED_ENUMERATION_CAP:
        raise ValueError(
            f"{n} sites exceed the observed-measure cap {OBSERVED_ENUMERATION_CAP}"
        )
    hidden = window_kernel(params, window)
    # window_kernel orders sites row-major, matching window.index
    table = hidden.weights.astype(float).copy()
    eps = noise.epsilon
    idx = np.arange(2**n)
    for j in range(n):
        bit = 1 << j
        iw = idx[(idx & bit) != 0]
        with_bit = table[iw].copy()
        without = table[iw - bit].copy()
        table[iw] = (1.0 - eps) * with_bit
        table[iw - bit] = without + eps * with_bit
    return ExactObservedMeasure(window=window, params=params, noise=noise, table=table)


def _channel_factor(z: int, hidden: int, eps: float) -> float:
    if z == 1:
        return 1.0 - eps if hidden == 1 else 0.0
    return eps if hidden == 1 else 1.0


def phi(
    params: SpecificationParams,
    noise: NoiseParams,
    interior_sites,
    z: dict[Site, int],
) -> float:
    """The context-formula weight: sum over hidden assignments on the
    interior of the kernel weight given an all-plus ring, times the
    channel probability of reading z there.

    ``z`` must cover the interior and its exterior ring, with +1 on the ring.
    """
    lam = tuple(sorted(set(interior_sites)))
    if not lam:
        raise ValueError("interior must be nonempty")
    lam_set = set(lam)
    ring = sorted({nb for s in lam for nb in neighbors(s) if nb not in lam_set})
    for s in ring:
        if s not in z:
            raise ValueError(f"z missing ring site {s}")
        if z[s] != 1:
            raise ValueError("phi requires +1 on the exterior ring")
    for s in lam:
        if s not in z:
            raise ValueError(f"z missing interior site {s}")

    kernel = finite_volume_kernel(params, lam, {s: 1 for s in ring})
    eps = noise.epsilon
    total = 0.0
    for m in range(2 ** len(lam)):
        w = float(kernel.weights[m])
        if w == 0.0:
            continue
        factor = 1.0
        for j, site in enumerate(kernel.region):
            hidden = 1 if (m >> j) & 1 else -1
            factor *= _channel_factor(z[site], hidden, eps)
            if factor == 0.0:
                break
        total += w * factor
    return total


def conditional_from_phi(
    params: SpecificationParams,
    noise: NoiseParams,
    x: Configuration,
    i: Site,
) -> float:
    """The context-formula conditional P(X_i = +1 | x restricted to C_i(x))."""
    ctx = compute_context(x, i)
    if ctx.status is not ContextStatus.RESOLVED:
        raise ValueError("context truncated by the window; conditional undefined here")
    closure = set(ctx.members) | {i}
    lam = interior(closure)
    z = {s: x.spin(s) for s in closure}
    z_plus = {**z, i: 1}
    z_minus = {**z, i: -1}
    num = phi(params, noise, lam, z_plus)
    den = num + phi(params, noise, lam, z_minus)
    return num / den


def verify_context_measurability(
    params: SpecificationParams,
    noise: NoiseParams,
    window: Window,
    sites=None,
) -> float:
    """Max spread of exact conditionals among configurations sharing a context.

    Scans every window configuration; for each site with a resolved context
    the exact conditional is grouped by context membership, and the largest
    within-group spread is returned (contract: <= 1e-10).
    """
    measure = exact_observed_measure(params, noise, window)
    if sites is None:
        sites = [s for s in window.sites() if not window.is_edge_site(s)]
    worst = 0.0
    for i in sites:
        bit = 1 << window.index(i)
        groups: dict[frozenset, list[float]] = {}
        for m in range(len(measure.table)):
            if m & bit:
                continue  # conditional ignores the center spin; canonicalize it
            x = measure.config_at(m | bit)
            ctx = compute_context(x, i)
            if ctx.status is not ContextStatus.RESOLVED:
                continue
            cond = measure.conditional_plus(i, x)
            groups.setdefault(ctx.members, []).append(cond)
        for vals in groups.values():
            if len(vals) > 1:
                worst = max(worst, max(vals) - min(vals))
    return worst


def context_sensitivity_witness(
    params: SpecificationParams,
    noise: NoiseParams,
    window: Window,
    i: Site,
) -> float:
    """Largest conditional gap between configurations with different contexts.

    Negative control for the measurability check: for generic parameters
    this gap is macroscopic (> 1e-3).
    """
    measure = exact_observed_measure(params, noise, window)
    bit = 1 << window.index(i)
    per_context: dict[frozenset, float] = {}
    for m in range(len(measure.table)):
        if m & bit:
            continue
        x = measure.config_at(m | bit)
        ctx = compute_context(x, i)
        if ctx.status is not ContextStatus.RESOLVED:
            continue
        per_context.setdefault(ctx.members, measure.conditional_plus(i, x))
    if len(per_context) < 2:
        return 0.0
    vals = list(per_context.values())
    return max(vals) - min(vals)
