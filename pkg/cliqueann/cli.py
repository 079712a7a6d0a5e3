"""Command-line entry point: ``cliqueann <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""
import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from cliqueann.core.dataset import Query
from cliqueann.core.predicates import parse_predicate
from cliqueann.evaluation.benchmark import bench, params_grid, write_csv
from cliqueann.evaluation.workloads import (
    RANGE_PRESET_TARGETS,
    gen_fixed_label_workload,
    gen_range_workload,
    gen_zipf_label_workload,
)
from cliqueann.exceptions import CliqueANNError
from cliqueann.index.builder import build
from cliqueann.index.metrics import index_stats
from cliqueann.index.updates import IndexUpdater
from cliqueann.io.features import load_features
from cliqueann.io.index_file import load_index, save_index
from cliqueann.io.vecs import load_vecs, read_vecs, save_vecs
from cliqueann.io.workload_file import load_workload, save_workload
from cliqueann.knng.exact import build_knng
from cliqueann.search.beam import SearchParams, query_rng, search
from cliqueann.settings import load_settings
from cliqueann.utils.logging import configure_logging, get_logger, verbosity_to_level

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

# both names select the eight-target range sweep
RANGE_PRESETS = ("range-paper", "range-sweep")


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _pick(value, default):
    return default if value is None else value


def _load_dataset(path, features_path=None):
    dataset = load_vecs(path)
    if features_path:
        dataset = dataset.with_features(load_features(features_path))
    return dataset


def cmd_build(args, settings):
    b = settings.build
    for name in ("k_prime", "tau", "alpha0", "alpha_expansion", "alpha_max", "threads"):
        setattr(b, name, _pick(getattr(args, name), getattr(b, name)))
    b.knng_method = _pick(args.knng, b.knng_method)
    params = settings.build_params(audit=args.audit)
    dataset = load_vecs(args.dataset)
    knng = build_knng(dataset, params.k_prime, method=b.knng_method, threads=b.threads,
                      iterations=b.nn_descent_iterations, sample_rate=b.nn_descent_sample_rate, seed=b.seed)
    index = build(dataset, knng, params, threads=b.threads)
    save_index(args.out, index)
    print(json.dumps(index.build_meta.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_search(args, settings):
    s = settings.search
    params = SearchParams(k=_pick(args.k, s.k), l_s=_pick(args.l_s, s.l_s), epsilon=_pick(args.epsilon, s.epsilon),
                          rng_seed=_pick(args.seed, s.rng_seed), lazy_predicate=args.lazy or s.lazy_predicate)
    index = load_index(args.index)
    dataset = _load_dataset(args.dataset, args.features)
    predicate = parse_predicate(args.predicate)
    vectors = read_vecs(args.queries).astype(np.float32)
    for qi, vq in enumerate(vectors):
        result = search(index, dataset, Query(vq, None, predicate), params, rng=query_rng(params.rng_seed, qi))
        print(f"{qi}\t" + " ".join(f"{u}:{d:.6g}" for u, d in result.pairs()))
    return EXIT_OK


def _workload_for(args, settings, dataset):
    w = settings.workload
    seed = _pick(args.seed, w.seed)
    k = _pick(args.k, w.k)
    kind = args.kind if getattr(args, "kind", None) else w.kind
    preset = getattr(args, "preset", None)
    if preset in RANGE_PRESETS:
        kind = "range"
    elif preset == "zipf":
        kind = "zipf"
    if kind == "zipf":
        return gen_zipf_label_workload(dataset, _pick(args.num_labels, w.num_labels), _pick(args.zipf_s, w.zipf_s),
                                       _pick(args.num_queries, w.num_queries), k=k, seed=seed)
    if kind == "range":
        targets = list(RANGE_PRESET_TARGETS) if preset in RANGE_PRESETS else _pick(args.targets, w.targets)
        return gen_range_workload(dataset, targets, _pick(args.per_target, w.per_target), k=k, seed=seed)
    if kind == "label":
        return gen_fixed_label_workload(dataset, _pick(args.selectivity, w.selectivity),
                                        _pick(args.num_queries, w.num_queries), k=k, seed=seed)
    raise CliqueANNError(f"unknown workload kind {kind!r}")


def cmd_gen_workload(args, settings):
    dataset = load_vecs(args.dataset)
    workload = _workload_for(args, settings, dataset)
    save_workload(args.out, workload, dataset)
    print(json.dumps({"kind": workload.kind, "queries": len(workload), "seed": workload.seed,
                      "min_selectivity": float(workload.selectivities.min()),
                      "max_selectivity": float(workload.selectivities.max())}, sort_keys=True))
    return EXIT_OK


def cmd_bench(args, settings):
    bs = settings.bench
    index = load_index(args.index)
    dataset = load_vecs(args.dataset)
    if args.workload:
        workload = load_workload(args.workload)
    else:
        workload = _workload_for(args, settings, dataset)
    grid = params_grid(workload.k, _pick(args.l_s, bs.l_s_grid), _pick(args.epsilon, bs.epsilons),
                       rng_seed=settings.search.rng_seed)
    table = bench(index, dataset, workload, grid, threads=_pick(args.threads, bs.threads),
                  repeats=_pick(args.repeats, bs.repeats), dataset_name=_pick(args.name, bs.dataset_name))
    write_csv(table, args.csv)
    if args.plot:
        from cliqueann.utils.plotting import plot_recall_qps
        plot_recall_qps(table, args.plot)
    print(table.to_csv(index=False), end="")
    return EXIT_OK


def cmd_stats(args, settings):
    index = load_index(args.index)
    stats = index_stats(index)
    if args.plot:
        from cliqueann.utils.plotting import plot_coverage_curve
        plot_coverage_curve(stats["coverage_curve"], args.plot)
    print(json.dumps(stats, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_update(args, settings):
    index = load_index(args.index)
    dataset = load_vecs(args.dataset)
    if dataset.n != index.n:
        raise CliqueANNError(f"dataset has {dataset.n} vectors, index covers {index.n}")
    # mine with the index's own k' and tau, alpha schedule from settings
    params = replace(settings.build_params(), k_prime=max(index.k_prime, index.tau - 1), tau=index.tau)
    updater = IndexUpdater(index, dataset, params, rng_seed=settings.search.rng_seed)
    inserted = []
    if args.insert:
        for vector in read_vecs(args.insert).astype(np.float32):
            inserted.append(updater.insert(vector))
    for u in args.delete or []:
        updater.delete(u)
    save_index(args.out, index)
    if args.dataset_out:
        save_vecs(args.dataset_out, dataset.vectors, kind="f32")
    print(json.dumps({"inserted": inserted, "deleted": list(args.delete or []),
                      "live": index.live_count}, sort_keys=True))
    return EXIT_OK


def _add_workload_args(p):
    p.add_argument("--kind", choices=["zipf", "range", "label"], default=None)
    p.add_argument("--preset", choices=[*RANGE_PRESETS, "zipf"], default=None)
    p.add_argument("--num-queries", type=int, default=None)
    p.add_argument("--num-labels", type=int, default=None)
    p.add_argument("--zipf-s", type=float, default=None)
    p.add_argument("--targets", type=float, nargs="+", default=None)
    p.add_argument("--per-target", type=int, default=None)
    p.add_argument("--selectivity", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)


def build_parser() -> CliParser:
    parser = CliParser(prog="cliqueann", description="Filtered vector search over a maximal clique index")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--config", default=None, help="YAML settings file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build an index from an fvecs/bvecs dataset")
    p.add_argument("dataset")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--k-prime", dest="k_prime", type=int, default=None)
    p.add_argument("--tau", type=int, default=None)
    p.add_argument("--alpha0", type=float, default=None)
    p.add_argument("--alpha-expansion", dest="alpha_expansion", type=float, default=None)
    p.add_argument("--alpha-max", dest="alpha_max", type=float, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--knng", choices=["auto", "exact", "nn-descent"], default=None)
    p.add_argument("--audit", action="store_true")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("search", help="answer filtered queries")
    p.add_argument("index")
    p.add_argument("dataset")
    p.add_argument("--queries", required=True, help="fvecs file of query vectors")
    p.add_argument("--predicate", default="true", help="'true' | 'range l r' | 'label X'")
    p.add_argument("--features", default=None, help=".npy feature column")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--l-s", dest="l_s", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--lazy", action="store_true", help="evaluate the predicate on demand")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("bench", help="recall / QPS table over a workload")
    p.add_argument("index")
    p.add_argument("dataset")
    p.add_argument("--workload", default=None, help="workload file from gen-workload")
    _add_workload_args(p)
    p.add_argument("--l-s", dest="l_s", type=int, nargs="+", default=None)
    p.add_argument("--epsilon", type=float, nargs="+", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--name", default=None)
    p.add_argument("--csv", default=None)
    p.add_argument("--plot", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="index statistics and coverage curve")
    p.add_argument("index")
    p.add_argument("--plot", default=None)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen-workload", help="generate queries with ground truth")
    p.add_argument("dataset")
    p.add_argument("-o", "--out", required=True)
    _add_workload_args(p)
    p.set_defaults(func=cmd_gen_workload)

    p = sub.add_parser("update", help="insert and delete nodes")
    p.add_argument("index")
    p.add_argument("dataset")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--insert", default=None, help="fvecs file of vectors to insert")
    p.add_argument("--delete", type=int, nargs="+", default=None)
    p.add_argument("--dataset-out", default=None)
    p.set_defaults(func=cmd_update)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(verbosity_to_level(args.verbose))
    try:
        settings = load_settings(args.config)
        return args.func(args, settings)
    except (CliqueANNError, OSError, ValueError, KeyError) as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"cliqueann {args.command}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
