import unittest

import numpy as np

from cliqueann.baselines import MCISearcher, PostFilterSearcher, PreFilterSearcher
from cliqueann.baselines.postfilter import postfilter_search
from cliqueann.baselines.prefilter import prefilter_bruteforce
from cliqueann.core.dataset import Dataset, LabelFeatures, Query
from cliqueann.core.predicates import ExternalMask, LabelMatch, PredicateMask
from cliqueann.evaluation.metrics import mean_recall, recall_at_k
from cliqueann.exceptions import ParameterError
from cliqueann.index.builder import BuildParams, build
from cliqueann.knng.exact import exact_knn
from cliqueann.search.beam import SearchParams, search
from cliqueann.utils.data_utils import make_clustered
from tests.golden import brute_force_filtered

RARE = 2


class TestPrefilter(unittest.TestCase):
    def test_matches_second_implementation(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            # small integers: exact float32 arithmetic and plenty of ties
            X = rng.integers(0, 6, size=(150, 6)).astype(np.float32)
            q = rng.integers(0, 6, size=6).astype(np.float32)
            bits = rng.random(150) < rng.uniform(0.05, 1.0)
            k = int(rng.integers(1, 20))
            result = prefilter_bruteforce(Dataset(X), Query(q, predicate=ExternalMask(bits)), k)
            self.assertEqual(result.ids.tolist(), brute_force_filtered(X, q, bits, k))

    def test_always_true_is_plain_top_k(self):
        X = np.arange(10, dtype=np.float32)[:, None]
        result = prefilter_bruteforce(Dataset(X), Query([3.2]), 3)
        self.assertEqual(result.ids.tolist(), [3, 4, 2])

    def test_k_above_valid_count(self):
        X = np.arange(10, dtype=np.float32)[:, None]
        bits = np.zeros(10, dtype=bool)
        bits[[1, 8]] = True
        result = prefilter_bruteforce(Dataset(X), Query([9.0], predicate=ExternalMask(bits)), 5)
        self.assertEqual(result.ids.tolist(), [8, 1])
        self.assertEqual(result.stats.dist_comps, 2)

    def test_live_mask_excludes_deleted(self):
        X = np.arange(10, dtype=np.float32)[:, None]
        live = np.ones(10, dtype=bool)
        live[0] = False
        result = prefilter_bruteforce(Dataset(X), Query([0.0]), 2, live=live)
        self.assertEqual(result.ids.tolist(), [1, 2])

    def test_self_recall(self):
        X = np.random.default_rng(1).random((300, 5)).astype(np.float32)
        result = prefilter_bruteforce(Dataset(X), Query(X[0]), 10)
        self.assertEqual(recall_at_k(result.ids, result.ids, 10), 1.0)


class TestPostfilter(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        rng = np.random.default_rng(6)
        X = make_clustered(2000, 8, num_clusters=10, cluster_std=0.1, seed=6)
        rows = [[i % 2] + ([RARE] if rng.random() < 0.01 else []) for i in range(2000)]
        cls.ds = Dataset(X, LabelFeatures.from_lists(rows))
        cls.index = build(cls.ds, exact_knn(cls.ds, 24, threads=4), BuildParams(k_prime=24, tau=6))
        cls.vectors = [X[i] + 0.02 for i in rng.choice(2000, 30, replace=False)]

    def recall(self, label, expansion):
        queries = [Query(v, predicate=LabelMatch(label)) for v in self.vectors]
        results = [postfilter_search(self.index, self.ds, q, 10, expansion, rng=np.random.default_rng(qi))
                   for qi, q in enumerate(queries)]
        truths = [prefilter_bruteforce(self.ds, q, 10).ids for q in queries]
        for q, r in zip(queries, results):
            for u in r.ids.tolist():
                self.assertTrue(q.predicate.test_node(self.ds.features, u, q.fq))
        return mean_recall(results, truths, 10)

    def test_unit_expansion_without_filter_equals_search(self):
        q = Query(self.vectors[0])
        post = postfilter_search(self.index, self.ds, q, 10, 1.0, rng=np.random.default_rng(3))
        plain = search(self.index, self.ds, q, SearchParams(k=10, l_s=10), rng=np.random.default_rng(3))
        self.assertEqual(post.ids.tolist(), plain.ids.tolist())

    def test_more_candidates_help_at_half_selectivity(self):
        self.assertGreater(self.recall(1, 4.0), self.recall(1, 1.0))

    def test_recall_collapses_for_rare_label(self):
        self.assertLess(self.recall(RARE, 2.0), 0.3)

    def test_expansion_below_one(self):
        with self.assertRaises(ParameterError):
            postfilter_search(self.index, self.ds, Query(self.vectors[0]), 10, 0.5)

    def test_searchers_share_interface(self):
        q = Query(self.vectors[1], predicate=LabelMatch(0))
        mask = PredicateMask.from_bits(LabelMatch(0).evaluate(self.ds.features, None, self.ds.n))
        searchers = [
            MCISearcher(self.index, self.ds, SearchParams(k=10, l_s=80)),
            PreFilterSearcher(self.ds, k=10),
            PostFilterSearcher(self.index, self.ds, k=10, expansion=4.0),
        ]
        for searcher in searchers:
            result = searcher.query(q, mask=mask, qi=0)
            self.assertLessEqual(len(result), 10)
            self.assertTrue(all(u % 2 == 0 for u in result.ids.tolist()), msg=searcher.name)


if __name__ == "__main__":
    unittest.main()
