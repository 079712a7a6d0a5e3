import math
import unittest

import numpy as np

from cliqueann.core.predicates import PredicateMask
from cliqueann.search.seeds import sample_seeds, sample_seeds_lazy, seed_count


class TestSeedCount(unittest.TestCase):
    def test_ceiling(self):
        self.assertEqual(seed_count(1.0, 100), 10)
        self.assertEqual(seed_count(1.0, 101), 11)
        self.assertEqual(seed_count(0.5, 100), 5)
        self.assertEqual(seed_count(0.0, 100), 0)


class TestSampleSeeds(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(0)

    def test_returns_all_when_few_valid(self):
        bits = np.zeros(100, dtype=bool)
        bits[[3, 17, 40, 41, 99]] = True
        seeds = sample_seeds(PredicateMask.from_bits(bits), 1.0, 100, self.rng)
        self.assertEqual(seeds.tolist(), [3, 17, 40, 41, 99])

    def test_zero_epsilon(self):
        seeds = sample_seeds(np.ones(100, dtype=bool), 0.0, 100, self.rng)
        self.assertEqual(len(seeds), 0)

    def test_distinct_valid_and_sorted(self):
        bits = np.random.default_rng(1).random(1000) < 0.3
        seeds = sample_seeds(bits, 2.0, 1000, self.rng)
        self.assertEqual(len(seeds), math.ceil(2.0 * math.sqrt(1000)))
        self.assertEqual(len(set(seeds.tolist())), len(seeds))
        self.assertTrue(bits[seeds].all())
        self.assertTrue(np.all(np.diff(seeds) > 0))

    def test_uniform_selection(self):
        bits = np.ones(25, dtype=bool)
        bits[::5] = False
        valid = np.flatnonzero(bits)
        trials = 100000
        counts = np.zeros(25, dtype=np.int64)
        for _ in range(trials):
            counts[sample_seeds(bits, 1.0, 25, self.rng)] += 1
        p = 5 / len(valid)
        sigma = math.sqrt(trials * p * (1 - p))
        self.assertEqual(counts[~bits].sum(), 0)
        self.assertLess(np.abs(counts[valid] - trials * p).max(), 4 * sigma)


class TestSampleSeedsLazy(unittest.TestCase):
    def test_tests_only_until_enough_found(self):
        tested = []

        def is_valid(u):
            tested.append(u)
            return u % 2 == 0

        seeds = sample_seeds_lazy(is_valid, np.arange(400), 1.0, 400, np.random.default_rng(3))
        self.assertEqual(len(seeds), 20)
        self.assertTrue(all(u % 2 == 0 for u in seeds.tolist()))
        self.assertLess(len(tested), 400)

    def test_exhausts_when_few_valid(self):
        seeds = sample_seeds_lazy(lambda u: u in (5, 9), np.arange(50), 1.0, 50, np.random.default_rng(4))
        self.assertEqual(seeds.tolist(), [5, 9])


if __name__ == "__main__":
    unittest.main()
