import os
import struct
import tempfile
import unittest

import numpy as np

from cliqueann.core.dataset import LabelFeatures, ScalarFeatures
from cliqueann.exceptions import DimensionError, ParameterError, VecsParseError
from cliqueann.io.features import load_features, save_features
from cliqueann.io.vecs import load_vecs, parse_vecs, read_vecs, save_vecs


class VecsTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write(self, name, data):
        path = self.path(name)
        with open(path, "wb") as fh:
            fh.write(data)
        return path


class TestLoadVecs(VecsTestCase):
    def test_single_record(self):
        path = self.write("one.fvecs", struct.pack("<i2f", 2, 1.0, 2.0))
        ds = load_vecs(path)
        self.assertEqual((ds.n, ds.dim), (1, 2))
        self.assertEqual(ds.vectors.tolist(), [[1.0, 2.0]])

    def test_empty_file_rejected(self):
        path = self.write("empty.fvecs", b"")
        with self.assertRaises(DimensionError):
            load_vecs(path)

    def test_round_trip_bit_exact(self):
        X = np.random.default_rng(0).standard_normal((100, 8)).astype(np.float32)
        path = self.path("data.fvecs")
        save_vecs(path, X)
        back = read_vecs(path)
        self.assertEqual(back.tobytes(), X.tobytes())
        self.assertEqual(os.path.getsize(path), 100 * (4 + 8 * 4))

    def test_bvecs_widened(self):
        B = np.array([[0, 255, 7]], dtype=np.uint8)
        path = self.path("data.bvecs")
        save_vecs(path, B)
        ds = load_vecs(path)
        self.assertEqual(ds.vectors.dtype, np.float32)
        self.assertEqual(ds.vectors.tolist(), [[0.0, 255.0, 7.0]])

    def test_ivecs(self):
        ids = np.array([[1, 2, 3], [4, 5, 6]], dtype=np.int32)
        path = self.path("ids.ivecs")
        save_vecs(path, ids)
        np.testing.assert_array_equal(read_vecs(path), ids)

    def test_unknown_extension(self):
        with self.assertRaises(ParameterError):
            read_vecs(self.write("data.txt", b""))


class TestParseErrors(unittest.TestCase):
    def test_truncated_record(self):
        buf = struct.pack("<i2f", 2, 1.0, 2.0) + struct.pack("<i1f", 2, 3.0)
        with self.assertRaises(VecsParseError) as ctx:
            parse_vecs(buf, "f32")
        self.assertEqual(ctx.exception.offset, 12)
        self.assertIn("byte offset 12", str(ctx.exception))

    def test_inconsistent_dimension(self):
        buf = struct.pack("<i2f", 2, 1.0, 2.0) + struct.pack("<i2f", 3, 3.0, 4.0)
        with self.assertRaises(VecsParseError) as ctx:
            parse_vecs(buf, "f32")
        self.assertEqual(ctx.exception.offset, 12)

    def test_bad_header(self):
        with self.assertRaises(VecsParseError):
            parse_vecs(b"\x01\x00", "f32")
        with self.assertRaises(VecsParseError):
            parse_vecs(struct.pack("<i", 0), "f32")


class TestFeatureFiles(VecsTestCase):
    def test_scalar_column(self):
        path = self.path("values.npy")
        save_features(path, ScalarFeatures([0.25, 0.5]))
        features = load_features(path)
        self.assertIsInstance(features, ScalarFeatures)
        self.assertEqual(features.values.tolist(), [0.25, 0.5])

    def test_label_column(self):
        path = self.path("labels.npy")
        save_features(path, LabelFeatures.from_single([3, 1, 3]))
        features = load_features(path)
        self.assertIsInstance(features, LabelFeatures)
        self.assertEqual(features.posting(3).tolist(), [0, 2])

    def test_multi_label_not_storable(self):
        with self.assertRaises(ParameterError):
            save_features(self.path("x.npy"), LabelFeatures.from_lists([[1, 2], [3]]))


if __name__ == "__main__":
    unittest.main()
