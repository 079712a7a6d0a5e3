"""Parameter sensitivity of the clique index.

Each sweep varies one build or search knob around the defaults in
config.yaml and records Recall@k, mean distance computations and index size.
Tables are written next to this file as CSV.
"""
import os
from dataclasses import asdict, replace

import pandas as pd
import yaml

from cliqueann.core.dataset import Dataset
from cliqueann.evaluation.benchmark import bench, params_grid
from cliqueann.evaluation.concentration import concentration_probe
from cliqueann.evaluation.metrics import mean_recall
from cliqueann.evaluation.workloads import gen_fixed_label_workload, gen_zipf_label_workload
from cliqueann.index.builder import BuildParams, build
from cliqueann.index.metrics import index_stats
from cliqueann.knng.exact import build_knng
from cliqueann.search.beam import SearchParams, search_many
from cliqueann.utils.data_utils import make_clustered
from cliqueann.utils.logging import configure_logging, get_logger

logger = get_logger("experiments.sensitivity")
HERE = os.path.dirname(os.path.abspath(__file__))


def evaluate(index, dataset, workload, params, threads):
    bound = workload.bind(dataset)
    results = search_many(index, bound, workload.queries, params, masks=workload.masks(bound), threads=threads)
    comps = sum(r.stats.dist_comps for r in results) / max(1, len(results))
    return mean_recall(results, workload.ground_truth, workload.k), comps


def row(sweep, value, index, dataset, workload, params, threads):
    recall, comps = evaluate(index, dataset, workload, params, threads)
    stats = index_stats(index)
    logger.info("%s=%s recall=%.4f comps=%.1f", sweep, value, recall, comps)
    return {"sweep": sweep, "value": value, "recall_at_k": recall, "mean_dist_comps": comps,
            "cliques": stats["clique_count"], "out_degree": stats["effective_out_degree"]}


def main(config_path=os.path.join(HERE, "config.yaml")):
    configure_logging("INFO")
    with open(config_path) as fh:
        cfg = yaml.safe_load(fh)

    d, ix, sw = cfg["dataset"], cfg["index"], cfg["sweeps"]
    dataset = Dataset(make_clustered(d["n"], d["dim"], num_clusters=d["clusters"], seed=d["seed"]))
    threads = ix["threads"]
    base = BuildParams(k_prime=ix["k_prime"], tau=ix["tau"])
    search_params = SearchParams(k=cfg["search"]["k"], l_s=cfg["search"]["l_s"])
    zipf = gen_zipf_label_workload(dataset, num_queries=cfg["workload"]["num_queries"], seed=cfg["workload"]["seed"])

    exact = build_knng(dataset, base.k_prime, method="exact", threads=threads)
    rows = []
    for expansion in sw["alpha_expansion"]:
        index = build(dataset, exact, replace(base, alpha_expansion=expansion), threads=threads)
        rows.append(row("alpha_expansion", expansion, index, dataset, zipf, search_params, threads))
    for tau in sw["tau"]:
        index = build(dataset, exact, replace(base, tau=tau), threads=threads)
        rows.append(row("tau", tau, index, dataset, zipf, search_params, threads))
    for method in sw["knng"]:
        knng = exact if method == "exact" else build_knng(dataset, base.k_prime, method=method)
        index = build(dataset, knng, base, threads=threads)
        rows.append(row("knng", method, index, dataset, zipf, search_params, threads))

    # recall/cost curves over l_s: k' with tau scaled alongside, then the result size k
    curves = []
    l_s_grid = cfg["search"]["l_s_grid"]
    for k_prime, tau in sw["k_prime_tau"]:
        knng = exact if k_prime == base.k_prime else build_knng(dataset, k_prime, method="exact", threads=threads)
        index = build(dataset, knng, replace(base, k_prime=k_prime, tau=tau), threads=threads)
        table = bench(index, dataset, zipf, params_grid(search_params.k, l_s_grid), threads=threads, repeats=1,
                      dataset_name=f"k_prime={k_prime},tau={tau}")
        curves.append(table.assign(sweep="k_prime_tau"))

    index = build(dataset, exact, base, threads=threads)
    for k in sw["result_k"]:
        workload = gen_zipf_label_workload(dataset, num_queries=cfg["workload"]["num_queries"], k=k,
                                           seed=cfg["workload"]["seed"])
        table = bench(index, dataset, workload, params_grid(k, l_s_grid), threads=threads, repeats=1,
                      dataset_name=f"k={k}")
        curves.append(table.assign(sweep="result_k", k=k))
    curves = pd.concat(curves, ignore_index=True)
    curves.to_csv(os.path.join(HERE, "curves.csv"), index=False)
    print(curves.to_string(index=False))

    for selectivity in sw["rare_selectivity"]:
        workload = gen_fixed_label_workload(dataset, selectivity, num_queries=cfg["workload"]["num_queries"],
                                            seed=cfg["workload"]["seed"])
        for epsilon in sw["epsilon"]:
            rows.append(row(f"epsilon@{selectivity}", epsilon, index, dataset, workload,
                            replace(search_params, epsilon=epsilon), threads))

    table = pd.DataFrame(rows)
    table.to_csv(os.path.join(HERE, "sensitivity.csv"), index=False)
    print(table.to_string(index=False))

    c = cfg["concentration"]
    rows = [asdict(concentration_probe(dim, c["n"], c["k"], c["alpha"], c["trials"], rng=c["seed"]))
            for dim in c["dims"]]
    table = pd.DataFrame(rows)
    table.to_csv(os.path.join(HERE, "concentration.csv"), index=False)
    print(table.to_string(index=False))


if __name__ == "__main__":
    main()
