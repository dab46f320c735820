"""Sampling: exact finite-volume draws, Glauber dynamics, noise masking.

All randomness flows through Philox counter-based generators keyed by
(seed, stream), so replicas are reproducible bit-for-bit across platforms
and never share state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .lattice import BoundaryCondition, Configuration, Window
from .specification import (
    ENUMERATION_CAP,
    SpecificationParams,
    finite_volume_kernel,
    one_point_probability_table,
)

_UNIFORM_CHUNK_ELEMENTS = 1 << 22


def rng_stream(seed: int, stream=0) -> np.random.Generator:
    """Philox generator for a (seed, stream) pair; stream may be a tuple."""
    if isinstance(stream, int):
        stream = (stream,)
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(stream))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class NoiseParams:
    """Per-site masking probability: spins read -1 with probability epsilon."""

    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie strictly between 0 and 1")


@dataclass
class ChainState:
    configuration: Configuration
    sweeps: int
    params: SpecificationParams

    def __post_init__(self):
        if self.sweeps < 0:
            raise ValueError("sweep count must be nonnegative")


def _boundary_exterior(window: Window) -> dict:
    ext_spin = window.boundary.exterior_spin
    if ext_spin is None:
        return {}
    from .lattice import neighbors

    ext = {}
    inside = set(window.sites())
    for site in window.sites():
        for nb in neighbors(site):
            if nb not in inside:
                ext[nb] = ext_spin
    return ext


def window_kernel(params: SpecificationParams, window: Window):
    """Exact kernel of the full window with its boundary condition as exterior."""
    return finite_volume_kernel(params, window.sites(), _boundary_exterior(window))


def sample_exact(
    params: SpecificationParams, window: Window, rng: np.random.Generator
) -> Configuration:
    """One exact draw from the finite-volume Gibbs measure on the window."""
    if window.site_count > ENUMERATION_CAP:
        raise ValueError(
            f"{window.site_count} sites exceed the enumeration cap {ENUMERATION_CAP}"
        )
    table = window_kernel(params, window)
    m = int(np.searchsorted(table.cumulative(), rng.random(), side="right"))
    m = min(m, len(table.weights) - 1)
    values = table.config_at(m)
    return Configuration.from_sites(window, values)


@njit(cache=True)
def _glauber_kernel(spins, pplus, u):  # pragma: no cover - exercised via wrapper
    nsweeps = u.shape[0]
    w = spins.shape[0] - 2
    h = spins.shape[1] - 2
    for t in range(nsweeps):
        for a in range(1, w + 1):
            for b in range(1, h + 1):
                s = spins[a - 1, b] + spins[a + 1, b] + spins[a, b - 1] + spins[a, b + 1]
                if u[t, a - 1, b - 1] < pplus[s + 4]:
                    spins[a, b] = 1
                else:
                    spins[a, b] = -1


@njit(cache=True)
def _glauber_kernel_coupled(lo, hi, pplus, u):  # pragma: no cover
    nsweeps = u.shape[0]
    w = lo.shape[0] - 2
    h = lo.shape[1] - 2
    for t in range(nsweeps):
        for a in range(1, w + 1):
            for b in range(1, h + 1):
                s1 = lo[a - 1, b] + lo[a + 1, b] + lo[a, b - 1] + lo[a, b + 1]
                s2 = hi[a - 1, b] + hi[a + 1, b] + hi[a, b - 1] + hi[a, b + 1]
                uu = u[t, a - 1, b - 1]
                lo[a, b] = 1 if uu < pplus[s1 + 4] else -1
                hi[a, b] = 1 if uu < pplus[s2 + 4] else -1


def _padded(config: Configuration) -> np.ndarray:
    ext = config.window.boundary.exterior_spin
    pad = 0 if ext is None else ext
    arr = np.full((config.window.width + 2, config.window.height + 2), pad, dtype=np.int8)
    arr[1:-1, 1:-1] = config.spins
    return arr


def run_sweeps(state: ChainState, nsweeps: int, rng: np.random.Generator) -> ChainState:
    """Advance the chain by systematic row-major heat-bath sweeps."""
    if nsweeps < 0:
        raise ValueError("nsweeps must be nonnegative")
    window = state.configuration.window
    padded = _padded(state.configuration)
    pplus = one_point_probability_table(state.params)
    chunk = max(1, _UNIFORM_CHUNK_ELEMENTS // max(1, window.site_count))
    done = 0
    while done < nsweeps:
        n = min(chunk, nsweeps - done)
        u = rng.random((n, window.width, window.height))
        _glauber_kernel(padded, pplus, u)
        done += n
    config = Configuration(window, padded[1:-1, 1:-1].copy())
    return ChainState(config, state.sweeps + nsweeps, state.params)


def glauber_sweep(state: ChainState, rng: np.random.Generator) -> ChainState:
    """One systematic heat-bath pass over the window."""
    return run_sweeps(state, 1, rng)


def run_sweeps_coupled(
    low: ChainState, high: ChainState, nsweeps: int, rng: np.random.Generator
) -> tuple[ChainState, ChainState]:
    """Advance two chains with shared per-site uniforms (monotone coupling).

    Heat-bath updates with a shared uniform preserve the coordinatewise
    order of the two configurations at every sweep.
    """
    if low.configuration.window != high.configuration.window:
        raise ValueError("coupled chains must share a window")
    if low.params != high.params:
        raise ValueError("coupled chains must share parameters")
    window = low.configuration.window
    plo = _padded(low.configuration)
    phi_arr = _padded(high.configuration)
    pplus = one_point_probability_table(low.params)
    chunk = max(1, _UNIFORM_CHUNK_ELEMENTS // max(1, window.site_count))
    done = 0
    while done < nsweeps:
        n = min(chunk, nsweeps - done)
        u = rng.random((n, window.width, window.height))
        _glauber_kernel_coupled(plo, phi_arr, pplus, u)
        done += n
    return (
        ChainState(Configuration(window, plo[1:-1, 1:-1].copy()), low.sweeps + nsweeps, low.params),
        ChainState(
            Configuration(window, phi_arr[1:-1, 1:-1].copy()), high.sweeps + nsweeps, high.params
        ),
    )


def initial_chain(params: SpecificationParams, window: Window, rng=None) -> ChainState:
    """Fresh chain aligned with the boundary phase (random for free boundaries)."""
    ext = window.boundary.exterior_spin
    if ext is not None:
        config = Configuration.filled(window, ext)
    else:
        if rng is None:
            raise ValueError("free-boundary chains need an rng for the random start")
        spins = np.where(rng.random((window.width, window.height)) < 0.5, -1, 1)
        config = Configuration(window, spins.astype(np.int8))
    return ChainState(config, 0, params)


def default_burn_in(window: Window) -> int:
    return 200 * max(window.width, window.height)


def default_thin(window: Window) -> int:
    return max(window.width, window.height)


def sample_noise_field(
    noise: NoiseParams, window: Window, rng: np.random.Generator
) -> Configuration:
    """I.i.d. field with P(+1) = 1 - epsilon at every site."""
    u = rng.random((window.width, window.height))
    spins = np.where(u < noise.epsilon, -1, 1).astype(np.int8)
    return Configuration(window, spins)


def mask(x1: Configuration, x2: Configuration) -> Configuration:
    """Pointwise minimum of two configurations on the same window."""
    if x1.window != x2.window:
        raise ValueError("mask requires identical windows")
    return Configuration(x1.window, np.minimum(x1.spins, x2.spins))


def sample_hidden(
    params: SpecificationParams,
    window: Window,
    rng: np.random.Generator,
    method: str = "auto",
    burn_in: int | None = None,
) -> Configuration:
    """One draw from the finite-volume Gibbs measure, exact or MCMC."""
    if method == "auto":
        method = "exact" if window.site_count <= ENUMERATION_CAP else "mcmc"
    if method == "exact":
        return sample_exact(params, window, rng)
    if method == "mcmc":
        if burn_in is None:
            burn_in = default_burn_in(window)
        state = initial_chain(params, window, rng)
        state = run_sweeps(state, burn_in, rng)
        return state.configuration
    raise ValueError(f"unknown sampling method {method!r}")


def sample_observed(
    params: SpecificationParams,
    noise: NoiseParams,
    window: Window,
    rng: np.random.Generator,
    method: str = "auto",
    burn_in: int | None = None,
) -> Configuration:
    """One draw from the observed field: hidden Gibbs draw masked by noise."""
    hidden = sample_hidden(params, window, rng, method=method, burn_in=burn_in)
    return mask(hidden, sample_noise_field(noise, window, rng))


def sample_observed_many(
    params: SpecificationParams,
    noise: NoiseParams,
    window: Window,
    rng: np.random.Generator,
    count: int,
    method: str = "auto",
    burn_in: int | None = None,
    thin: int | None = None,
) -> list[Configuration]:
    """Many observed-field draws; MCMC reuses one chain with thinning."""
    if count < 1:
        raise ValueError("count must be positive")
    if method == "auto":
        method = "exact" if window.site_count <= ENUMERATION_CAP else "mcmc"
    out = []
    if method == "exact":
        table = window_kernel(params, window)
        cum = table.cumulative()
        for _ in range(count):
            m = int(np.searchsorted(cum, rng.random(), side="right"))
            m = min(m, len(table.weights) - 1)
            hidden = Configuration.from_sites(window, table.config_at(m))
            out.append(mask(hidden, sample_noise_field(noise, window, rng)))
        return out
    if burn_in is None:
        burn_in = default_burn_in(window)
    if thin is None:
        thin = default_thin(window)
    state = initial_chain(params, window, rng)
    state = run_sweeps(state, burn_in, rng)
    for _ in range(count):
        state = run_sweeps(state, thin, rng)
        out.append(mask(state.configuration, sample_noise_field(noise, window, rng)))
    return out
