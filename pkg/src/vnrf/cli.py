"""Command-line interface: sweeps, context inspection, verification, plots."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .context import ContextStatus, brute_force_context, compute_context, context_census
from .experiments import (
    OUTPUT_DIR_ENV,
    PLOT_KINDS,
    SweepConfig,
    emit_plot_data,
    read_results,
    run_sweep,
)
from .lattice import (
    BoundaryCondition,
    Configuration,
    Window,
    disagreement_bond_count,
    extract_contours,
    sort_sites,
)
from .oracle import (
    conditional_from_phi,
    context_sensitivity_witness,
    exact_observed_measure,
    verify_context_measurability,
)
from .sampler import NoiseParams, rng_stream, sample_observed
from .specification import SpecificationParams, check_consistency
from .theory import Thresholds


def _cmd_sweep(args) -> int:
    config = SweepConfig.from_file(args.config)
    if args.output_dir:
        os.environ[OUTPUT_DIR_ENV] = args.output_dir

    def progress(cell):
        print(
            f"cell {cell.index}: beta={cell.beta} eps={cell.epsilon} "
            f"{cell.boundary} {cell.size}x{cell.size}",
            file=sys.stderr,
        )

    rows = run_sweep(config, progress=progress if args.verbose else None)
    out = config.resolved_output_dir()
    print(f"{len(rows)} cells -> {out / 'results.csv'} and {out / 'summary.json'}")
    return 0


def _cmd_context(args) -> int:
    config = SweepConfig.from_file(args.config)
    try:
        r, c = (int(v) for v in args.site.split(","))
    except ValueError:
        print("--site expects 'r,c' integer coordinates", file=sys.stderr)
        return 2
    cell_beta = config.beta_grid[0]
    cell_eps = config.epsilon_grid[0]
    size = config.window_sizes[0]
    boundary = BoundaryCondition(config.boundaries[0])
    window = Window(size, size, boundary=boundary)
    params = SpecificationParams(cell_beta)
    noise = NoiseParams(cell_eps)
    rng = rng_stream(config.base_seed, (0, args.replica))
    x = sample_observed(
        params, noise, window, rng, method=config.method, burn_in=config.burn_in
    )
    site = (r, c)
    if not window.contains(site):
        print(f"site {site} outside the {size}x{size} window", file=sys.stderr)
        return 2
    ctx = compute_context(x, site)
    print(f"window {size}x{size}, boundary {boundary.value}, beta={cell_beta}, "
          f"epsilon={cell_eps}, seed={config.base_seed}, replica={args.replica}")
    print(f"context at {site}: {ctx.status.value}")
    if ctx.status is ContextStatus.RESOLVED:
        print(f"size {ctx.size}")
        print("members:", " ".join(str(s) for s in sort_sites(ctx.members)))
    census = context_census(x)
    print(f"window truncated-context fraction: {census.truncated_fraction:.4f}")
    print(f"spanning -1 cluster: {census.spanning}")
    return 0


def _check(name: str, fn) -> bool:
    try:
        fn()
    except AssertionError as exc:
        print(f"FAIL {name}: {exc}")
        return False
    print(f"PASS {name}")
    return True


def _cmd_verify(args) -> int:
    import itertools

    from .theory import contour_count_bound
    from .lattice import count_contours_through_origin

    def kernel_consistency():
        delta = [(a, b) for a in range(3) for b in range(3)]
        exterior_sites = {
            nb for s in delta for nb in
            [(s[0] - 1, s[1]), (s[0], s[1] - 1), (s[0], s[1] + 1), (s[0] + 1, s[1])]
        } - set(delta)
        for beta in (0.0, 1.0):
            params = SpecificationParams(beta)
            for ext_spin in (1, -1):
                exterior = {s: ext_spin for s in exterior_sites}
                for inner in ([(1, 1)], [(0, 0), (0, 1)], [(0, 0), (1, 1), (2, 2)]):
                    disc = check_consistency(params, inner, delta, exterior)
                    assert disc <= 1e-12, f"discrepancy {disc} at beta={beta}"

    def theorem1_exactness():
        window = Window(3, 3, boundary=BoundaryCondition.PLUS)
        params = SpecificationParams(0.8)
        noise = NoiseParams(0.2)
        measure = exact_observed_measure(params, noise, window)
        worst = 0.0
        for m in range(2**9):
            x = measure.config_at(m)
            ctx = compute_context(x, (1, 1))
            if ctx.status is not ContextStatus.RESOLVED:
                continue
            got = conditional_from_phi(params, noise, x, (1, 1))
            want = measure.conditional_plus((1, 1), x)
            worst = max(worst, abs(got - want))
        assert worst <= 1e-10, f"conditional mismatch {worst}"
        spread = verify_context_measurability(params, noise, window)
        assert spread <= 1e-10, f"within-context spread {spread}"
        # Negative control.  A 3x3 window admits only one resolved context
        # at its center (any -1 neighbor's cluster reaches the edge), so the
        # witness pair lives on a 4x4 window.
        gap = context_sensitivity_witness(
            SpecificationParams(0.5), noise,
            Window(4, 4, boundary=BoundaryCondition.PLUS), (1, 1),
        )
        assert gap > 1e-3, f"no negative-control witness, gap {gap}"

    def context_oracle():
        window = Window(3, 3)
        for m in range(2**9):
            spins = np.array(
                [1 if (m >> j) & 1 else -1 for j in range(9)], dtype=np.int8
            ).reshape(3, 3)
            x = Configuration(window, spins)
            a = compute_context(x, (1, 1))
            b = brute_force_context(x, (1, 1))
            assert a.status == b.status and a.members == b.members, f"mismatch at {m}"

    def contour_invariant():
        window = Window(3, 3, boundary=BoundaryCondition.PLUS)
        for m in range(2**9):
            spins = np.array(
                [1 if (m >> j) & 1 else -1 for j in range(9)], dtype=np.int8
            ).reshape(3, 3)
            x = Configuration(window, spins)
            total = sum(c.length for c in extract_contours(x))
            assert total == disagreement_bond_count(x), f"length mismatch at {m}"
        for length in (4, 6):
            assert count_contours_through_origin(length) <= contour_count_bound(length)

    ok = True
    ok &= _check("kernel consistency", kernel_consistency)
    ok &= _check("context formula vs. exact conditionals", theorem1_exactness)
    ok &= _check("context growth vs. brute-force intersection", context_oracle)
    ok &= _check("contour length invariant and count bound", contour_invariant)
    if not ok:
        print("verification FAILED", file=sys.stderr)
        return 1
    print("all verification checks passed")
    return 0


def _cmd_plot_data(args) -> int:
    rows = read_results(args.results)
    out_dir = Path(
        args.output_dir
        or os.environ.get(OUTPUT_DIR_ENV)
        or Path(args.results).parent
    )
    table = emit_plot_data(rows, args.kind, out_dir)
    print(f"wrote {table}")
    if args.render:
        from .plots import render_figure

        figure = render_figure(args.kind, table)
        print(f"wrote {figure}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vnrf",
        description="Noisily observed Ising fields: contexts, bounds, phase diagrams.",
    )
    parser.add_argument("--version", action="version", version=f"vnrf {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep from a JSON config")
    p_sweep.add_argument("config", help="path to the sweep config JSON file")
    p_sweep.add_argument("--output-dir", help=f"override output dir (or ${OUTPUT_DIR_ENV})")
    p_sweep.add_argument("--verbose", action="store_true", help="print per-cell progress")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_ctx = sub.add_parser("context", help="sample one field and print a site's context")
    p_ctx.add_argument("config", help="sweep config JSON (first grid cell is used)")
    p_ctx.add_argument("--site", required=True, help="site coordinates 'r,c'")
    p_ctx.add_argument("--replica", type=int, default=0, help="replica index for the draw")
    p_ctx.set_defaults(func=_cmd_context)

    p_verify = sub.add_parser("verify", help="run the exact-oracle verification suite")
    p_verify.set_defaults(func=_cmd_verify)

    p_plot = sub.add_parser("plot-data", help="emit plot-ready tables from results.csv")
    p_plot.add_argument("results", help="path to results.csv")
    p_plot.add_argument("--kind", required=True, choices=PLOT_KINDS)
    p_plot.add_argument("--output-dir", help="where to place plots/ (default: results dir)")
    p_plot.add_argument("--render", action="store_true", help="also render a PNG figure")
    p_plot.set_defaults(func=_cmd_plot_data)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
