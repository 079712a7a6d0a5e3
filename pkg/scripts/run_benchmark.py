"""End-to-end benchmark on a synthetic clustered dataset.

Builds one index, runs the three workload families over an l_s sweep,
compares against the pre- and post-filter baselines and writes CSV tables
plus recall/QPS and coverage plots into --out.

    python scripts/run_benchmark.py --n 20000 --dim 64 --out results/
"""
import argparse
import os
from dataclasses import replace

import pandas as pd

from cliqueann.baselines.base import MCISearcher
from cliqueann.baselines.postfilter import PostFilterSearcher
from cliqueann.baselines.prefilter import PreFilterSearcher
from cliqueann.core.dataset import Dataset
from cliqueann.evaluation.benchmark import bench, compare_strategies, params_grid, write_csv
from cliqueann.evaluation.workloads import gen_fixed_label_workload, gen_range_workload, gen_zipf_label_workload
from cliqueann.index.builder import build
from cliqueann.index.metrics import coverage_curve, index_stats
from cliqueann.knng.exact import build_knng
from cliqueann.search.beam import SearchParams
from cliqueann.settings import load_settings
from cliqueann.utils.data_utils import make_clustered
from cliqueann.utils.logging import configure_logging, get_logger
from cliqueann.utils.plotting import plot_coverage_curve, plot_recall_qps

logger = get_logger("scripts.run_benchmark")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=None)
    parser.add_argument("--n", type=int, default=20000)
    parser.add_argument("--dim", type=int, default=64)
    parser.add_argument("--clusters", type=int, default=50)
    parser.add_argument("--k-prime", dest="k_prime", type=int, default=100)
    parser.add_argument("--tau", type=int, default=14)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", default="results")
    args = parser.parse_args()

    configure_logging("INFO")
    settings = load_settings(args.config)
    os.makedirs(args.out, exist_ok=True)

    dataset = Dataset(make_clustered(args.n, args.dim, num_clusters=args.clusters, seed=args.seed))
    threads = settings.build.threads
    knng = build_knng(dataset, args.k_prime, method=settings.build.knng_method, threads=threads,
                      iterations=settings.build.nn_descent_iterations,
                      sample_rate=settings.build.nn_descent_sample_rate, seed=settings.build.seed)
    params = replace(settings.build_params(), k_prime=args.k_prime, tau=args.tau)
    index = build(dataset, knng, params, threads=threads)
    logger.info("index stats: %s", index_stats(index))
    plot_coverage_curve(coverage_curve(index), os.path.join(args.out, "coverage.png"))

    w = settings.workload
    workloads = {
        "zipf": gen_zipf_label_workload(dataset, w.num_labels, w.zipf_s, w.num_queries, seed=w.seed),
        "range": gen_range_workload(dataset, w.targets, w.per_target, seed=w.seed),
        "label": gen_fixed_label_workload(dataset, w.selectivity, w.num_queries, seed=w.seed),
    }
    grid = params_grid(settings.search.k, settings.bench.l_s_grid, settings.bench.epsilons,
                       rng_seed=settings.search.rng_seed)

    tables = []
    for name, workload in workloads.items():
        table = bench(index, dataset, workload, grid, threads=settings.bench.threads,
                      repeats=settings.bench.repeats, dataset_name=f"clustered-{name}")
        write_csv(table, os.path.join(args.out, f"bench_{name}.csv"))
        plot_recall_qps(table, os.path.join(args.out, f"recall_qps_{name}.png"), title=f"{name} workload")

        bound = workload.bind(dataset)
        top = SearchParams(k=settings.search.k, l_s=max(settings.bench.l_s_grid))
        searchers = {
            "mci": MCISearcher(index, bound, top),
            "prefilter": PreFilterSearcher(bound, k=top.k),
            "postfilter": PostFilterSearcher(index, bound, k=top.k, expansion=4.0),
        }
        strategies = compare_strategies(searchers, dataset, workload)
        strategies.insert(0, "workload", name)
        tables.append(strategies)

    summary = pd.concat(tables, ignore_index=True)
    write_csv(summary, os.path.join(args.out, "strategies.csv"))
    print(summary.to_string(index=False))


if __name__ == "__main__":
    main()
