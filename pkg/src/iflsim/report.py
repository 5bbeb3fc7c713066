"""Rendering of matrix reports to delimited text, JSON, and a figure."""

from __future__ import annotations

import os

from .harness import MatrixReport


def write_matrix_outputs(report: MatrixReport, out_dir: str) -> dict[str, str]:
    """Write matrix.tsv, matrix.json, and matrix.png under `out_dir`.

    Returns the mapping of artifact name to path.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "tsv": os.path.join(out_dir, "matrix.tsv"),
        "json": os.path.join(out_dir, "matrix.json"),
        "png": os.path.join(out_dir, "matrix.png"),
    }
    with open(paths["tsv"], "w") as fh:
        fh.write(report.to_tsv())
    with open(paths["json"], "w") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    render_matrix_figure(report, paths["png"])
    return paths


def render_matrix_figure(report: MatrixReport, path: str) -> None:
    """Heatmap of the matrix: red cells leak, green cells are blocked."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.colors import ListedColormap
    from matplotlib.patches import Patch

    grid = [[1 if report.leaks(row, col) else 0 for col in report.columns]
            for row in report.rows]

    fig, ax = plt.subplots(
        figsize=(1.3 * len(report.columns) + 3, 0.8 * len(report.rows) + 2))
    cmap = ListedColormap(["#2e7d32", "#c62828"])
    ax.imshow(grid, cmap=cmap, vmin=0, vmax=1, aspect="auto")

    ax.set_xticks(range(len(report.columns)))
    ax.set_xticklabels(report.columns, rotation=30, ha="right")
    ax.set_yticks(range(len(report.rows)))
    ax.set_yticklabels(report.rows)
    for i, row in enumerate(report.rows):
        for j, col in enumerate(report.columns):
            label = ("leak" if report.leaks(row, col)
                     else report.cell(row, col).removeprefix("blocked:"))
            ax.text(j, i, label, ha="center", va="center",
                    color="white", fontsize=8)
    ax.legend(handles=[Patch(color="#c62828", label="leak"),
                       Patch(color="#2e7d32", label="blocked")],
              loc="upper left", bbox_to_anchor=(1.02, 1.0))
    ax.set_title("Attack outcomes under each mitigation")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
