"""Experiment orchestration: parameter sweeps, estimators, persistence.

A sweep walks the (beta, epsilon, boundary, window size) grid, draws
replicas of the observed field with private RNG streams, and records
spanning statistics, context-census summaries, path events and the
matching theory flags.  Outputs are deterministic given the base seed:
identical configs produce byte-identical CSV/JSON.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .context import context_census, spanning_minus_cluster
from .lattice import (
    BoundaryCondition,
    Configuration,
    Window,
    enumerate_self_avoiding_paths,
    neighbors,
)
from .sampler import (
    NoiseParams,
    default_burn_in,
    default_thin,
    rng_stream,
    sample_noise_field,
    sample_observed_many,
)
from .specification import SpecificationParams, extremal_rates
from .theory import (
    Thresholds,
    lemma1_bound,
    thm2_finite_condition,
    thm2_infinite_condition,
    thm3_beta_admissible,
    thm3_epsilon_bound,
)

OUTPUT_DIR_ENV = "VNRF_OUTPUT_DIR"

_BOUNDARIES = {b.value: b for b in BoundaryCondition}

_CONFIG_FIELDS = {
    "beta_grid",
    "epsilon_grid",
    "boundaries",
    "window_sizes",
    "replicas",
    "base_seed",
    "burn_in",
    "thin",
    "method",
    "p_star",
    "beta_c",
    "path_lengths",
    "output_dir",
}


@dataclass(frozen=True)
class SweepConfig:
    beta_grid: tuple[float, ...]
    epsilon_grid: tuple[float, ...]
    boundaries: tuple[str, ...]
    window_sizes: tuple[int, ...]
    replicas: int
    base_seed: int
    burn_in: int | None = None
    thin: int | None = None
    method: str = "auto"
    p_star: float | None = None
    beta_c: float | None = None
    path_lengths: tuple[int, ...] = (1, 2, 3, 4)
    output_dir: str = "vnrf-out"

    def __post_init__(self):
        if not self.beta_grid or not self.epsilon_grid:
            raise ValueError("beta and epsilon grids must be nonempty")
        if not self.boundaries or not self.window_sizes:
            raise ValueError("boundaries and window sizes must be nonempty")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        for b in self.boundaries:
            if b not in _BOUNDARIES:
                raise ValueError(f"unknown boundary condition {b!r}")
        if any(s < 3 for s in self.window_sizes):
            raise ValueError("window sizes must be >= 3 (census needs an interior)")
        if self.method not in ("auto", "exact", "mcmc"):
            raise ValueError(f"unknown method {self.method!r}")

    @classmethod
    def from_dict(cls, raw: dict) -> "SweepConfig":
        unknown = set(raw) - _CONFIG_FIELDS
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        missing = {"beta_grid", "epsilon_grid", "boundaries", "window_sizes",
                   "replicas", "base_seed"} - set(raw)
        if missing:
            raise ValueError(f"missing config keys: {sorted(missing)}")
        kwargs = dict(raw)
        for key in ("beta_grid", "epsilon_grid", "boundaries", "window_sizes",
                    "path_lengths"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "SweepConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    @property
    def thresholds(self) -> Thresholds:
        kwargs = {}
        if self.p_star is not None:
            kwargs["p_star"] = self.p_star
        if self.beta_c is not None:
            kwargs["beta_c"] = self.beta_c
        return Thresholds(**kwargs)

    def resolved_output_dir(self) -> Path:
        return Path(os.environ.get(OUTPUT_DIR_ENV, self.output_dir))


@dataclass(frozen=True)
class Cell:
    index: int
    beta: float
    epsilon: float
    boundary: str
    size: int


def _cells(config: SweepConfig) -> list[Cell]:
    out = []
    i = 0
    for size in config.window_sizes:
        for beta in config.beta_grid:
            for eps in config.epsilon_grid:
                for boundary in config.boundaries:
                    out.append(Cell(i, beta, eps, boundary, size))
                    i += 1
    return out


def binomial_stderr(p_hat: float, n: int) -> float:
    return math.sqrt(p_hat * (1.0 - p_hat) / n)


def _canonical_paths(window: Window, lengths) -> dict[int, list[tuple]]:
    center = window.center()
    return {
        n: enumerate_self_avoiding_paths(
            neighbors(center), n, window, exclude={center}
        )
        for n in lengths
    }


CSV_SCHEMA_VERSION = 1

CSV_COLUMNS = [
    "schema_version",
    "code_version",
    "cell_index",
    "beta",
    "epsilon",
    "boundary",
    "size",
    "replicas",
    "base_seed",
    "spanning_prob",
    "spanning_se",
    "truncated_fraction",
    "mean_context_size",
    "median_context_size",
    "context_size_hist",
    "path_freqs",
    "path_ses",
    "path_bounds",
    "lambda0",
    "thm2_finite",
    "thm2_infinite",
    "thm3_epsilon_bound",
    "thm3_beta_admissible",
    "p_star",
    "beta_c",
]


@dataclass
class SweepResult:
    cell: Cell
    replicas: int
    base_seed: int
    spanning_prob: float
    spanning_se: float
    truncated_fraction: float
    mean_context_size: float
    median_context_size: float
    context_size_hist: dict[int, int]
    path_freqs: dict[int, float]
    path_ses: dict[int, float]
    thresholds: Thresholds = field(default_factory=Thresholds)

    def to_row(self) -> dict[str, str]:
        beta, eps = self.cell.beta, self.cell.epsilon
        rates = extremal_rates(SpecificationParams(beta))
        hist = ";".join(f"{k}:{v}" for k, v in sorted(self.context_size_hist.items()))
        freqs = ";".join(
            f"{n}:{_fmt(v)}" for n, v in sorted(self.path_freqs.items())
        )
        ses = ";".join(f"{n}:{_fmt(v)}" for n, v in sorted(self.path_ses.items()))
        bounds = ";".join(
            f"{n}:{_fmt(lemma1_bound(beta, eps, n))}" for n in sorted(self.path_freqs)
        )
        return {
            "schema_version": str(CSV_SCHEMA_VERSION),
            "code_version": __version__,
            "cell_index": str(self.cell.index),
            "beta": _fmt(beta),
            "epsilon": _fmt(eps),
            "boundary": self.cell.boundary,
            "size": str(self.cell.size),
            "replicas": str(self.replicas),
            "base_seed": str(self.base_seed),
            "spanning_prob": _fmt(self.spanning_prob),
            "spanning_se": _fmt(self.spanning_se),
            "truncated_fraction": _fmt(self.truncated_fraction),
            "mean_context_size": _fmt(self.mean_context_size),
            "median_context_size": _fmt(self.median_context_size),
            "context_size_hist": hist,
            "path_freqs": freqs,
            "path_ses": ses,
            "path_bounds": bounds,
            "lambda0": _fmt(rates.lambda0_plus),
            "thm2_finite": str(
                thm2_finite_condition(eps, rates.lambda0_plus, self.thresholds)
            ).lower(),
            "thm2_infinite": str(
                thm2_infinite_condition(eps, rates.lambda0_minus, self.thresholds)
            ).lower(),
            "thm3_epsilon_bound": _fmt(thm3_epsilon_bound(beta)),
            "thm3_beta_admissible": str(thm3_beta_admissible(beta)).lower(),
            "p_star": _fmt(self.thresholds.p_star),
            "beta_c": _fmt(self.thresholds.beta_c),
        }


def _fmt(v: float) -> str:
    if v != v:  # NaN
        return "nan"
    return format(float(v), ".12g")


def _parse_pairs(text: str) -> dict[int, float]:
    if not text:
        return {}
    out = {}
    for item in text.split(";"):
        k, v = item.split(":")
        out[int(k)] = float(v)
    return out


def estimate_spanning_probability(
    params: SpecificationParams,
    noise: NoiseParams,
    window: Window,
    replicas: int,
    rng_factory,
    method: str = "auto",
    burn_in: int | None = None,
) -> tuple[float, float]:
    """Fraction of observed-field replicas with an edge-to-edge -1 cluster.

    ``rng_factory(replica_index)`` supplies the private RNG per replica.
    """
    hits = 0
    for r in range(replicas):
        rng = rng_factory(r)
        (x,) = sample_observed_many(
            params, noise, window, rng, 1, method=method, burn_in=burn_in
        )
        if spanning_minus_cluster(x):
            hits += 1
    p = hits / replicas
    return p, binomial_stderr(p, replicas)


def estimate_path_minus_probability(
    params: SpecificationParams,
    noise: NoiseParams,
    window: Window,
    paths,
    n_samples: int,
    rng: np.random.Generator,
    burn_in: int | None = None,
    thin: int | None = None,
) -> list[tuple[float, float]]:
    """Per-path empirical frequency that every path site reads -1.

    Samples come from one thinned MCMC chain on a plus-boundary window;
    paths must stay off the window edge.
    """
    if window.boundary is not BoundaryCondition.PLUS:
        raise ValueError("the path-event bound is stated for the plus boundary")
    for path in paths:
        for site in path:
            if not window.contains(site):
                raise ValueError(f"path site {site} outside window")
            if window.is_edge_site(site):
                raise ValueError(f"path site {site} touches the window boundary")
    samples = sample_observed_many(
        params, noise, window, rng, n_samples, method="mcmc",
        burn_in=burn_in, thin=thin,
    )
    minus = np.stack([(x.spins.reshape(-1) == -1) for x in samples])
    out = []
    for path in paths:
        idx = [window.index(s) for s in path]
        freq = float(np.all(minus[:, idx], axis=1).mean())
        out.append((freq, binomial_stderr(freq, n_samples)))
    return out


def spanning_probability_bernoulli(
    p_minus: float, size: int, replicas: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Spanning probability of pure i.i.d. -1 fields (percolation calibration)."""
    window = Window(size, size)
    noise = NoiseParams(p_minus)
    hits = 0
    for _ in range(replicas):
        if spanning_minus_cluster(sample_noise_field(noise, window, rng)):
            hits += 1
    p = hits / replicas
    return p, binomial_stderr(p, replicas)


def _run_cell(config: SweepConfig, cell: Cell) -> SweepResult:
    params = SpecificationParams(cell.beta)
    noise = NoiseParams(cell.epsilon)
    window = Window(cell.size, cell.size, boundary=_BOUNDARIES[cell.boundary])
    burn_in = config.burn_in if config.burn_in is not None else default_burn_in(window)
    thin = config.thin if config.thin is not None else default_thin(window)

    paths_by_len = _canonical_paths(window, config.path_lengths)
    span_hits = 0
    truncated_sum = 0.0
    sizes_pool: list[int] = []
    path_hits = {n: 0 for n in config.path_lengths}
    path_trials = {n: 0 for n in config.path_lengths}

    for r in range(config.replicas):
        rng = rng_stream(config.base_seed, (cell.index, r))
        (x,) = sample_observed_many(
            params, noise, window, rng, 1,
            method=config.method, burn_in=burn_in, thin=thin,
        )
        census = context_census(x)
        if census.spanning:
            span_hits += 1
        truncated_sum += census.truncated_fraction
        sizes_pool.extend(int(s) for s in census.resolved_sizes())
        minus = x.spins.reshape(-1) == -1
        for n, paths in paths_by_len.items():
            for path in paths:
                path_trials[n] += 1
                if all(minus[window.index(s)] for s in path):
                    path_hits[n] += 1

    span_p = span_hits / config.replicas
    hist: dict[int, int] = {}
    for s in sizes_pool:
        hist[s] = hist.get(s, 0) + 1
    mean_size = float(np.mean(sizes_pool)) if sizes_pool else float("nan")
    median_size = float(np.median(sizes_pool)) if sizes_pool else float("nan")
    path_freqs = {}
    path_ses = {}
    for n in config.path_lengths:
        f = path_hits[n] / path_trials[n] if path_trials[n] else float("nan")
        path_freqs[n] = f
        path_ses[n] = (
            binomial_stderr(f, path_trials[n]) if path_trials[n] else float("nan")
        )

    return SweepResult(
        cell=cell,
        replicas=config.replicas,
        base_seed=config.base_seed,
        spanning_prob=span_p,
        spanning_se=binomial_stderr(span_p, config.replicas),
        truncated_fraction=truncated_sum / config.replicas,
        mean_context_size=mean_size,
        median_context_size=median_size,
        context_size_hist=hist,
        path_freqs=path_freqs,
        path_ses=path_ses,
        thresholds=config.thresholds,
    )


def _existing_cell_indices(csv_path: Path) -> set[int]:
    if not csv_path.exists():
        return set()
    with open(csv_path, newline="") as fh:
        return {int(row["cell_index"]) for row in csv.DictReader(fh)}


def run_sweep(config: SweepConfig, progress=None) -> list[dict[str, str]]:
    """Run every cell, flushing one CSV row per cell; resumes partial runs.

    Returns the full list of result rows (existing plus freshly computed),
    sorted by cell index, and rewrites summary.json to match.
    """
    out_dir = config.resolved_output_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "results.csv"
    done = _existing_cell_indices(csv_path)

    write_header = not csv_path.exists()
    with open(csv_path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        if write_header:
            writer.writeheader()
            fh.flush()
        for cell in _cells(config):
            if cell.index in done:
                continue
            if progress:
                progress(cell)
            result = _run_cell(config, cell)
            writer.writerow(result.to_row())
            fh.flush()

    rows = read_results(csv_path)
    rows.sort(key=lambda r: int(r["cell_index"]))
    summary = {
        "schema_version": CSV_SCHEMA_VERSION,
        "code_version": __version__,
        "config": {k: v for k, v in asdict(config).items()},
        "cells": rows,
    }
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return rows


def read_results(csv_path) -> list[dict[str, str]]:
    with open(csv_path, newline="") as fh:
        return list(csv.DictReader(fh))


PLOT_KINDS = ("phase_diagram", "context_size_histogram", "lemma1_comparison", "scaling")


def emit_plot_data(rows, kind: str, out_dir, thresholds: Thresholds | None = None) -> Path:
    """Write one tidy long-format CSV for the requested plot kind."""
    if not rows:
        raise ValueError("no results to plot")
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {PLOT_KINDS}")
    if thresholds is None:
        thresholds = Thresholds(
            p_star=float(rows[0]["p_star"]), beta_c=float(rows[0]["beta_c"])
        )
    out_dir = Path(out_dir)
    plots_dir = out_dir / "plots"
    plots_dir.mkdir(parents=True, exist_ok=True)
    path = plots_dir / f"{kind}.csv"

    records: list[dict] = []
    if kind == "phase_diagram":
        for r in rows:
            records.append(
                {
                    "row_type": "cell",
                    "beta": r["beta"],
                    "epsilon": r["epsilon"],
                    "boundary": r["boundary"],
                    "size": r["size"],
                    "spanning_prob": r["spanning_prob"],
                    "spanning_se": r["spanning_se"],
                    "thm2_finite": r["thm2_finite"],
                    "thm2_infinite": r["thm2_infinite"],
                }
            )
        from .theory import remark_beta_bound

        for k in range(101):
            eps = k / 100.0 * thresholds.p_star
            bound = remark_beta_bound(eps, thresholds)
            if bound is None:
                continue
            records.append(
                {
                    "row_type": "remark_curve",
                    "beta": _fmt(bound),
                    "epsilon": _fmt(eps),
                    "boundary": "",
                    "size": "",
                    "spanning_prob": "",
                    "spanning_se": "",
                    "thm2_finite": "",
                    "thm2_infinite": "",
                }
            )
        fieldnames = [
            "row_type", "beta", "epsilon", "boundary", "size",
            "spanning_prob", "spanning_se", "thm2_finite", "thm2_infinite",
        ]
    elif kind == "context_size_histogram":
        for r in rows:
            for size_str in filter(None, r["context_size_hist"].split(";")):
                s, c = size_str.split(":")
                records.append(
                    {
                        "beta": r["beta"],
                        "epsilon": r["epsilon"],
                        "boundary": r["boundary"],
                        "size": r["size"],
                        "context_size": s,
                        "count": c,
                    }
                )
        fieldnames = ["beta", "epsilon", "boundary", "size", "context_size", "count"]
    elif kind == "lemma1_comparison":
        for r in rows:
            freqs = _parse_pairs(r["path_freqs"])
            ses = _parse_pairs(r["path_ses"])
            bounds = _parse_pairs(r["path_bounds"])
            for n in sorted(freqs):
                records.append(
                    {
                        "beta": r["beta"],
                        "epsilon": r["epsilon"],
                        "boundary": r["boundary"],
                        "size": r["size"],
                        "path_length": str(n),
                        "frequency": _fmt(freqs[n]),
                        "stderr": _fmt(ses[n]),
                        "bound": _fmt(bounds[n]),
                    }
                )
        fieldnames = [
            "beta", "epsilon", "boundary", "size", "path_length",
            "frequency", "stderr", "bound",
        ]
    else:  # scaling
        for r in rows:
            records.append(
                {
                    "beta": r["beta"],
                    "epsilon": r["epsilon"],
                    "boundary": r["boundary"],
                    "size": r["size"],
                    "truncated_fraction": r["truncated_fraction"],
                    "spanning_prob": r["spanning_prob"],
                }
            )
        fieldnames = [
            "beta", "epsilon", "boundary", "size", "truncated_fraction", "spanning_prob",
        ]

    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for rec in records:
            writer.writerow(rec)
    return path
