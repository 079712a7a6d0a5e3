import unittest
from unittest import mock

import numpy as np

from cliqueann.core.dataset import Dataset, Query
from cliqueann.exceptions import NodeNotFoundError
from cliqueann.index.builder import BuildParams, build
from cliqueann.index.clique_index import Clique, CliqueIndex, CliqueKind
from cliqueann.index.updates import IndexUpdater, delete_node, insert_node
from cliqueann.knng.exact import exact_knn
from cliqueann.search.beam import SearchParams, search
from cliqueann.utils.data_utils import make_gaussian
from tests.golden import nine_point_dataset, nine_point_vectors, six_point_dataset


class TestInsert(unittest.TestCase):
    def setUp(self):
        self.ds = nine_point_dataset()
        self.params = BuildParams(k_prime=4, tau=3)
        self.index = build(self.ds, exact_knn(self.ds, 4), self.params)

    def test_duplicate_joins_its_twin_clique(self):
        u = insert_node(self.index, self.ds, nine_point_vectors()[0], params=self.params)
        self.assertEqual(u, 9)
        self.assertEqual(self.ds.n, 10)
        self.assertIn(9, self.index.cliques[0])
        self.assertEqual(self.index.build_meta.inserted, 1)
        self.index.check()

    def test_inserted_node_is_searchable(self):
        updater = IndexUpdater(self.index, self.ds, self.params)
        vector = nine_point_vectors()[3] + 0.01
        u = updater.insert(vector)
        result = search(self.index, self.ds, Query(vector), SearchParams(k=1, l_s=10))
        self.assertEqual(result.ids.tolist(), [u])


class TestDelete(unittest.TestCase):
    def test_delete_everything_then_insert(self):
        ds = Dataset(np.eye(4))
        params = BuildParams(k_prime=3, tau=4)
        index = build(ds, exact_knn(ds, 3), params)
        updater = IndexUpdater(index, ds, params)

        updater.delete(0)
        # the only clique fell below tau and was dissolved; survivors re-mined
        self.assertEqual(len(index.cliques[0]), 0)
        for v in (1, 2, 3):
            self.assertTrue(index.cliques_of(v))
        index.check()

        for v in (1, 2, 3):
            updater.delete(v)
        self.assertEqual(index.live_count, 0)
        u = updater.insert([0.5, 0.5, 0.5, 0.5])
        self.assertEqual([index.cliques[c].kind for c in index.cliques_of(u)], [CliqueKind.PSEUDO])
        self.assertEqual(index.cliques[index.cliques_of(u)[0]].members.tolist(), [u])
        index.check()

    def test_dissolved_clique_remines_every_member(self):
        ds = six_point_dataset()
        index = CliqueIndex(6, 4, 3, [Clique([0, 1, 2, 4]), Clique([2, 3, 4, 5])])
        updater = IndexUpdater(index, ds, BuildParams(k_prime=3, tau=4))
        with mock.patch.object(IndexUpdater, "_mine_until_covered", autospec=True,
                               side_effect=IndexUpdater._mine_until_covered) as mine:
            updater.delete(0)
        self.assertEqual([c.args[1] for c in mine.call_args_list], [1, 2, 4])
        self.assertEqual(len(index.cliques[0]), 0)
        # 2 and 4 keep their second clique; 1 is covered again
        self.assertEqual(index.cliques[1].members.tolist(), [2, 3, 4, 5])
        self.assertTrue(index.cliques_of(1))
        self.assertNotIn(0, [v for c in index.cliques for v in c.members.tolist()])
        index.check()

    def test_delete_twice_or_unknown(self):
        ds = nine_point_dataset()
        index = build(ds, exact_knn(ds, 4), BuildParams(k_prime=4, tau=3))
        delete_node(index, ds, 6)
        with self.assertRaises(NodeNotFoundError):
            delete_node(index, ds, 6)
        with self.assertRaises(NodeNotFoundError):
            delete_node(index, ds, 42)


class TestUpdatesOnCloud(unittest.TestCase):
    def setUp(self):
        self.ds = Dataset(make_gaussian(600, 8, seed=5))
        self.params = BuildParams(k_prime=16, tau=4)
        self.index = build(self.ds, exact_knn(self.ds, 16), self.params)
        self.updater = IndexUpdater(self.index, self.ds, self.params, rng_seed=1)

    def test_deleted_nodes_never_returned(self):
        rng = np.random.default_rng(2)
        gone = rng.choice(600, size=60, replace=False)
        for u in gone.tolist():
            self.updater.delete(u)
        self.index.check()
        self.assertEqual(self.index.build_meta.deleted, 60)
        for qi in range(20):
            q = Query(self.ds.row(int(gone[qi])) + 0.01)
            result = search(self.index, self.ds, q, SearchParams(k=10, l_s=40))
            self.assertFalse(set(result.ids.tolist()) & set(gone.tolist()))
            self.assertEqual(len(result), 10)

    def test_inserts_keep_coverage(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            self.updater.insert(rng.standard_normal(8))
        self.assertEqual(self.index.n, 640)
        self.assertLessEqual(self.index.total_members, self.index.size_bound)
        self.index.check()

    def test_compacted_index_still_valid(self):
        for u in range(0, 600, 7):
            self.updater.delete(u)
        compact = self.index.compacted()
        compact.check()
        self.assertTrue(all(len(c) > 0 for c in compact.cliques))


if __name__ == "__main__":
    unittest.main()
