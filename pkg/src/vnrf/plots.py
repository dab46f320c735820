"""Figure rendering for the plot-data tables.

Each plot kind consumes the matching tidy CSV emitted by the experiments
module and writes a PNG next to it.  Rendering is optional; the delimited
tables remain the machine-readable contract.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _read(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def render_figure(kind: str, table_path, figure_path=None) -> Path:
    """Render the PNG for one plot kind from its CSV table."""
    table_path = Path(table_path)
    if figure_path is None:
        figure_path = table_path.with_suffix(".png")
    rows = _read(table_path)
    fig, ax = plt.subplots(figsize=(6.5, 5))

    if kind == "phase_diagram":
        cells = [r for r in rows if r["row_type"] == "cell"]
        curve = [r for r in rows if r["row_type"] == "remark_curve"]
        if cells:
            sc = ax.scatter(
                [float(r["epsilon"]) for r in cells],
                [float(r["beta"]) for r in cells],
                c=[float(r["spanning_prob"]) for r in cells],
                cmap="coolwarm", vmin=0.0, vmax=1.0, s=60,
            )
            fig.colorbar(sc, ax=ax, label="spanning probability")
        if curve:
            eps = [float(r["epsilon"]) for r in curve]
            beta = [float(r["beta"]) for r in curve]
            ax.plot(eps, beta, "k--", label="finite-context boundary")
            ax.legend()
        ax.set_xlabel("epsilon")
        ax.set_ylabel("beta")
        ax.set_title("Observed-field phase diagram")
    elif kind == "context_size_histogram":
        groups: dict[tuple, dict[int, int]] = {}
        for r in rows:
            key = (r["beta"], r["epsilon"], r["boundary"], r["size"])
            groups.setdefault(key, {})[int(r["context_size"])] = int(r["count"])
        for key, hist in sorted(groups.items()):
            sizes = sorted(hist)
            ax.plot(sizes, [hist[s] for s in sizes], marker="o",
                    label=f"b={key[0]} e={key[1]} {key[2]} L={key[3]}")
        ax.set_yscale("log")
        ax.set_xlabel("context size")
        ax.set_ylabel("count")
        ax.set_title("Resolved context sizes")
        if groups:
            ax.legend(fontsize=7)
    elif kind == "lemma1_comparison":
        groups: dict[tuple, list[dict]] = {}
        for r in rows:
            groups.setdefault((r["beta"], r["epsilon"]), []).append(r)
        for (beta, eps), rs in sorted(groups.items()):
            rs.sort(key=lambda r: int(r["path_length"]))
            n = [int(r["path_length"]) for r in rs]
            ax.errorbar(
                n, [float(r["frequency"]) for r in rs],
                yerr=[float(r["stderr"]) for r in rs],
                marker="o", label=f"empirical b={beta} e={eps}",
            )
            ax.plot(n, [float(r["bound"]) for r in rs], "--",
                    label=f"bound b={beta} e={eps}")
        ax.set_yscale("log")
        ax.set_xlabel("path length")
        ax.set_ylabel("all-minus frequency")
        ax.set_title("Path events vs. the exponential bound")
        ax.legend(fontsize=7)
    elif kind == "scaling":
        groups = {}
        for r in rows:
            groups.setdefault((r["beta"], r["epsilon"], r["boundary"]), []).append(r)
        for key, rs in sorted(groups.items()):
            rs.sort(key=lambda r: int(r["size"]))
            ax.plot(
                [int(r["size"]) for r in rs],
                [float(r["truncated_fraction"]) for r in rs],
                marker="o", label=f"b={key[0]} e={key[1]} {key[2]}",
            )
        ax.set_xlabel("window size")
        ax.set_ylabel("truncated-context fraction")
        ax.set_title("Context truncation vs. window size")
        ax.legend(fontsize=7)
    else:
        plt.close(fig)
        raise ValueError(f"unknown plot kind {kind!r}")

    fig.tight_layout()
    fig.savefig(figure_path, dpi=150)
    plt.close(fig)
    return Path(figure_path)
