import math
import unittest
from unittest import mock

import numpy as np

from cliqueann.baselines.prefilter import prefilter_bruteforce
from cliqueann.core.dataset import Dataset, LabelFeatures, Query
from cliqueann.core.distance import squared_distances
from cliqueann.core.predicates import LabelMatch, evaluate_mask
from cliqueann.evaluation.metrics import mean_recall
from cliqueann.exceptions import DimensionError, ParameterError
from cliqueann.index.builder import BuildParams, build
from cliqueann.index.clique_index import Clique, CliqueIndex
from cliqueann.knng.exact import exact_knn
from cliqueann.search import beam
from cliqueann.search.beam import SearchParams, SearchState, search, search_many
from cliqueann.utils.data_utils import make_clustered, make_gaussian


class TestSearchParams(unittest.TestCase):
    def test_invalid(self):
        for kwargs in ({"k": 0}, {"k": 10, "l_s": 5}, {"epsilon": -0.1}):
            with self.assertRaises(ParameterError):
                SearchParams(**kwargs)


class TestSearchState(unittest.TestCase):
    def test_insert_into_empty(self):
        state = SearchState(10, 0, 3)
        self.assertTrue(state.insert(4, 1.5))
        self.assertEqual(state.R, [(4, 1.5, False)])

    def test_farther_than_worst_is_dropped(self):
        state = SearchState(10, 0, 2)
        state.insert(1, 1.0)
        state.insert(2, 2.0)
        self.assertFalse(state.insert(3, 5.0))
        self.assertEqual([node for node, _, _ in state.R], [1, 2])

    def test_width_one_keeps_minimum(self):
        state = SearchState(10, 0, 1)
        for node, dist in ((7, 3.0), (8, 2.0), (9, 1.0)):
            state.insert(node, dist)
            self.assertEqual(state.R, [(node, dist, False)])

    def test_ties_ordered_by_id(self):
        state = SearchState(10, 0, 4)
        for node in (5, 2, 9):
            state.insert(node, 1.0)
        self.assertEqual([node for node, _, _ in state.R], [2, 5, 9])

    def test_eviction_drops_expanded_entries_too(self):
        state = SearchState(10, 0, 2)
        state.insert(1, 2.0)
        state.insert(2, 3.0)
        state.expanded[1] = True
        state.insert(3, 1.0)
        self.assertEqual(state.R, [(3, 1.0, False), (1, 2.0, False)])
        self.assertEqual(state.next_unexpanded(), 0)


class SearchTestCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        rng = np.random.default_rng(9)
        X = make_clustered(2000, 8, num_clusters=10, cluster_std=0.1, seed=9)
        cls.ds = Dataset(X, LabelFeatures.from_single(rng.integers(0, 2, 2000)))
        cls.index = build(cls.ds, exact_knn(cls.ds, 24, threads=4), BuildParams(k_prime=24, tau=6))
        cls.queries = [Query(X[i] + 0.02, predicate=LabelMatch(int(i % 2)))
                       for i in rng.choice(2000, 30, replace=False)]
        cls.truth = [prefilter_bruteforce(cls.ds, q, 10).ids for q in cls.queries]


class TestSearch(SearchTestCase):
    def test_results_pure_and_sorted(self):
        for q in self.queries:
            result = search(self.index, self.ds, q, SearchParams(k=10, l_s=40))
            self.assertEqual(len(result), 10)
            for u in result.ids.tolist():
                self.assertTrue(q.predicate.test_node(self.ds.features, u, q.fq))
            self.assertTrue(np.all(np.diff(result.dists) >= 0))
            np.testing.assert_allclose(result.dists, squared_distances(self.ds.vectors[result.ids], q.vq), rtol=1e-6)

    def test_each_distance_computed_once(self):
        seen = []

        def recording(vectors, q, accumulate64=False):
            seen.append(np.array(vectors, copy=True))
            return squared_distances(vectors, q, accumulate64)

        with mock.patch.object(beam, "squared_distances", side_effect=recording):
            result = search(self.index, self.ds, self.queries[0], SearchParams(k=10, l_s=80))
        rows = np.concatenate(seen)
        self.assertEqual(len(rows), result.stats.dist_comps)
        self.assertEqual(len(np.unique(rows, axis=0)), len(rows))

    def test_exhaustive_limit_is_exact(self):
        n = self.ds.n
        params = SearchParams(k=10, l_s=n, epsilon=math.sqrt(n))
        for q, truth in zip(self.queries[:5], self.truth[:5]):
            result = search(self.index, self.ds, q, params)
            self.assertEqual(result.ids.tolist(), truth.tolist())
            self.assertEqual(result.stats.dist_comps, evaluate_mask(self.ds, q).true_count)

    def test_recall_grows_with_beam(self):
        narrow = search_many(self.index, self.ds, self.queries, SearchParams(k=10, l_s=10))
        wide = search_many(self.index, self.ds, self.queries, SearchParams(k=10, l_s=160))
        low, high = mean_recall(narrow, self.truth, 10), mean_recall(wide, self.truth, 10)
        self.assertGreaterEqual(high, low)
        self.assertGreaterEqual(high, 0.8)

    def test_threaded_batch_matches_serial(self):
        params = SearchParams(k=10, l_s=40, rng_seed=5)
        serial = search_many(self.index, self.ds, self.queries, params)
        threaded = search_many(self.index, self.ds, self.queries, params, threads=4)
        for a, b in zip(serial, threaded):
            np.testing.assert_array_equal(a.ids, b.ids)

    def test_lazy_predicate_exhaustive_matches_mask(self):
        n = self.ds.n
        params = SearchParams(k=10, l_s=n, epsilon=math.sqrt(n), lazy_predicate=True)
        for q, truth in zip(self.queries[:3], self.truth[:3]):
            self.assertEqual(search(self.index, self.ds, q, params).ids.tolist(), truth.tolist())

    def test_lazy_predicate_results_pure(self):
        params = SearchParams(k=10, l_s=40, lazy_predicate=True)
        for q in self.queries[:10]:
            for u in search(self.index, self.ds, q, params).ids.tolist():
                self.assertTrue(q.predicate.test_node(self.ds.features, u, q.fq))

    def test_no_valid_nodes(self):
        q = Query(self.ds.row(0), predicate=LabelMatch(7))
        result = search(self.index, self.ds, q, SearchParams(k=10, l_s=40))
        self.assertEqual(len(result), 0)

    def test_zero_epsilon_returns_nothing(self):
        result = search(self.index, self.ds, self.queries[0], SearchParams(k=10, l_s=40, epsilon=0.0))
        self.assertEqual(len(result), 0)
        self.assertEqual(result.stats.dist_comps, 0)

    def test_query_dimension_checked(self):
        with self.assertRaises(DimensionError):
            search(self.index, self.ds, Query(np.zeros(3)), SearchParams())


class TestSingleClique(unittest.TestCase):
    def test_one_expansion_visits_everything(self):
        X = make_gaussian(200, 4, seed=2)
        labels = np.arange(200) % 3
        ds = Dataset(X, LabelFeatures.from_single(labels))
        index = CliqueIndex(200, 2, 199, [Clique(range(200))])
        q = Query(np.zeros(4), predicate=LabelMatch(1))
        for seed in range(5):
            result = search(index, ds, q, SearchParams(k=5, l_s=5, rng_seed=seed))
            self.assertEqual(result.ids.tolist(), prefilter_bruteforce(ds, q, 5).ids.tolist())


if __name__ == "__main__":
    unittest.main()
