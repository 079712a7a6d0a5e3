import unittest

import numpy as np

from cliqueann.evaluation.metrics import mean_recall, recall_at_k
from cliqueann.search.beam import SearchResult


class TestRecall(unittest.TestCase):
    def test_identical(self):
        self.assertEqual(recall_at_k(list(range(10)), list(range(10)), 10), 1.0)

    def test_disjoint(self):
        self.assertEqual(recall_at_k(list(range(10)), list(range(10, 20)), 10), 0.0)

    def test_nine_of_ten(self):
        self.assertAlmostEqual(recall_at_k(list(range(9)) + [99], list(range(10)), 10), 0.9)

    def test_short_truth(self):
        self.assertEqual(recall_at_k([4, 7], [7, 4], 10), 1.0)
        self.assertEqual(recall_at_k([4], [7, 4], 10), 0.5)
        self.assertEqual(recall_at_k([], [], 10), 1.0)

    def test_superset_is_full_recall(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            truth = rng.choice(100, size=int(rng.integers(1, 10)), replace=False)
            result = np.concatenate([truth, rng.choice(np.arange(100, 200), size=10 - len(truth))])
            value = recall_at_k(result, truth, 10)
            self.assertEqual(value, 1.0)

    def test_mean_over_results(self):
        results = [SearchResult(np.array([1, 2]), np.zeros(2)), SearchResult(np.array([3, 9]), np.zeros(2))]
        self.assertAlmostEqual(mean_recall(results, [[1, 2], [3, 4]], 2), 0.75)
        with self.assertRaises(ValueError):
            mean_recall(results, [[1, 2]], 2)


if __name__ == "__main__":
    unittest.main()
