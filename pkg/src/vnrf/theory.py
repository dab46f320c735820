"""Closed-form thresholds and bounds; pure arithmetic, no sampling.

The critical constants are not part of the model definition: p_star is the
standard numerical estimate for site percolation on the square lattice and
beta_c is the exact Onsager value.  Both are overridable, and experiment
outputs record the values actually used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

P_STAR_DEFAULT = 0.592746
BETA_C_DEFAULT = math.log(1.0 + math.sqrt(2.0)) / 2.0


@dataclass(frozen=True)
class Thresholds:
    p_star: float = P_STAR_DEFAULT
    beta_c: float = BETA_C_DEFAULT

    def __post_init__(self):
        if not 0.0 < self.p_star < 1.0:
            raise ValueError("p_star must lie in (0, 1)")
        if self.beta_c <= 0.0:
            raise ValueError("beta_c must be positive")


def thm2_finite_condition(
    eps: float, lambda0_plus: float, thresholds: Thresholds = Thresholds()
) -> bool:
    """All contexts finite a.s. when (1 - eps) * lambda0+ > 1 - p_star (strict)."""
    return (1.0 - eps) * lambda0_plus > 1.0 - thresholds.p_star


def thm2_infinite_condition(
    eps: float, lambda0_minus: float, thresholds: Thresholds = Thresholds()
) -> bool:
    """Infinite contexts with positive probability when
    eps + (1 - eps) * lambda0- > p_star (strict)."""
    return eps + (1.0 - eps) * lambda0_minus > thresholds.p_star


def remark_beta_bound(
    eps: float, thresholds: Thresholds = Thresholds()
) -> float | None:
    """Largest Ising beta satisfying the finite-context condition at this eps.

    Equals (1/8) * ln((1 - eps)/(1 - p_star) - 1) when positive, else None.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    arg = (1.0 - eps) / (1.0 - thresholds.p_star) - 1.0
    if arg < 1.0:
        return None
    return math.log(arg) / 8.0


def thm3_epsilon_bound(beta: float) -> float:
    """Noise ceiling 1/3 - exp(-2*beta) for the plus-phase finiteness result.

    Nonpositive values mean no admissible epsilon at this beta.
    """
    if beta < 0.0:
        raise ValueError("beta must be nonnegative")
    return 1.0 / 3.0 - math.exp(-2.0 * beta)


def thm3_beta_admissible(beta: float) -> bool:
    """The quantitative low-temperature condition 2*beta > ln 3 + exp(-beta)."""
    if beta < 0.0:
        raise ValueError("beta must be nonnegative")
    return 2.0 * beta > math.log(3.0) + math.exp(-beta)


def lemma1_bound(beta: float, eps: float, path_length: int) -> float:
    """Upper bound (exp(-2*beta) + eps)^n on an all-minus path event."""
    if path_length < 1:
        raise ValueError("path length must be >= 1")
    return (math.exp(-2.0 * beta) + eps) ** path_length


def contour_count_bound(length: int) -> int:
    """Upper bound 4*l*3^(l-2) on closed contours of length l enclosing the origin."""
    if length < 4 or length % 2 != 0:
        raise ValueError("contour length must be even and >= 4")
    return 4 * length * 3 ** (length - 2)


def saw_count_bound(length: int) -> int:
    """Upper bound 4*3^(n-1) on non-backtracking paths from the four
    neighbors of a site."""
    if length < 1:
        raise ValueError("path length must be >= 1")
    return 4 * 3 ** (length - 1)
