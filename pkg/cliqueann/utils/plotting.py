"""Headless matplotlib figures for build traces and benchmark tables."""
from matplotlib.figure import Figure


def plot_coverage_curve(curve, path=None, title="Uncovered nodes per densification round"):
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot(1, 1, 1)
    alphas = [a for a, _ in curve]
    uncovered = [100.0 * u for _, u in curve]
    ax.plot(alphas, uncovered, marker="o")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("alpha")
    ax.set_ylabel("uncovered nodes (%)")
    ax.set_ylim(bottom=0)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if path:
        fig.savefig(path, bbox_inches="tight")
    return fig


def plot_recall_qps(table, path=None, group="epsilon", title="Recall@k vs QPS"):
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot(1, 1, 1)
    for key, rows in table.groupby(group):
        rows = rows.sort_values("l_s")
        ax.plot(rows["recall_at_k"], rows["qps"], marker="o", label=f"{group}={key}")
    ax.set_yscale("log")
    ax.set_xlabel("recall@k")
    ax.set_ylabel("queries per second")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    if path:
        fig.savefig(path, bbox_inches="tight")
    return fig
