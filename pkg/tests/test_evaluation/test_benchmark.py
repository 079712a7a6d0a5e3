import math
import os
import tempfile
import unittest

import pandas as pd

from cliqueann.baselines import MCISearcher, PostFilterSearcher, PreFilterSearcher
from cliqueann.core.dataset import Dataset
from cliqueann.evaluation.benchmark import BENCH_COLUMNS, bench, compare_strategies, params_grid, write_csv
from cliqueann.evaluation.workloads import gen_zipf_label_workload
from cliqueann.index.builder import BuildParams, build
from cliqueann.knng.exact import exact_knn
from cliqueann.search.beam import SearchParams
from cliqueann.utils.data_utils import make_clustered


class TestBench(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.ds = Dataset(make_clustered(1500, 8, num_clusters=8, cluster_std=0.1, seed=1))
        cls.index = build(cls.ds, exact_knn(cls.ds, 24), BuildParams(k_prime=24, tau=6))
        cls.workload = gen_zipf_label_workload(cls.ds, num_labels=4, num_queries=30, seed=2)

    def test_grid_builder(self):
        grid = params_grid(10, [5, 20], epsilons=[1.0, 0.5])
        self.assertEqual([(p.l_s, p.epsilon) for p in grid], [(10, 1.0), (20, 1.0), (10, 0.5), (20, 0.5)])

    def test_rows_and_columns(self):
        grid = params_grid(10, [10, 20, 40, 80, 160])
        table = bench(self.index, self.ds, self.workload, grid, repeats=1, dataset_name="blobs")
        self.assertEqual(len(table), len(grid))
        self.assertEqual(list(table.columns), BENCH_COLUMNS)
        self.assertTrue((table["dataset"] == "blobs").all())
        comps = table["mean_dist_comps"].tolist()
        self.assertTrue(all(b >= a for a, b in zip(comps, comps[1:])))
        self.assertTrue(((table["recall_at_k"] >= 0) & (table["recall_at_k"] <= 1)).all())
        self.assertTrue((table["qps"] > 0).all())

    def test_exhaustive_params_give_full_recall(self):
        n = self.ds.n
        grid = [SearchParams(k=10, l_s=n, epsilon=math.sqrt(n))]
        table = bench(self.index, self.ds, self.workload, grid, repeats=1, threads=2)
        self.assertEqual(table["recall_at_k"].iloc[0], 1.0)

    def test_csv_round_trip(self):
        table = bench(self.index, self.ds, self.workload, params_grid(10, [20]), repeats=1)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "bench.csv")
            write_csv(table, path)
            back = pd.read_csv(path)
        self.assertEqual(list(back.columns), BENCH_COLUMNS)
        self.assertEqual(len(back), 1)

    def test_compare_strategies(self):
        bound = self.workload.bind(self.ds)
        searchers = {
            "mci": MCISearcher(self.index, bound, SearchParams(k=10, l_s=80)),
            "prefilter": PreFilterSearcher(bound, k=10),
            "postfilter": PostFilterSearcher(self.index, bound, k=10, expansion=4.0),
        }
        table = compare_strategies(searchers, self.ds, self.workload)
        self.assertEqual(table["strategy"].tolist(), ["mci", "prefilter", "postfilter"])
        prefilter = table.set_index("strategy").loc["prefilter"]
        self.assertEqual(prefilter["recall_at_k"], 1.0)


if __name__ == "__main__":
    unittest.main()
