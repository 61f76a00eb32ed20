import json
import os

import numpy as np
from django.test import SimpleTestCase

from octowinding import artifacts, sde
from octowinding.tests.utilities import TempDirMixin, quick_config


class TestFormatting(SimpleTestCase):
    def test_format_value(self):
        self.assertEqual(artifacts.format_value(0.1), '0.1')
        self.assertEqual(artifacts.format_value(np.float64(1) / 3), repr(1 / 3))
        self.assertEqual(artifacts.format_value(float('nan')), 'nan')
        self.assertEqual(artifacts.format_value(-np.inf), '-inf')
        self.assertEqual(artifacts.format_value(np.int64(3)), '3')
        self.assertEqual(artifacts.format_value(True), 'true')
        self.assertEqual(artifacts.format_value(None), '')


class TestFiles(TempDirMixin, SimpleTestCase):
    def test_csv_has_hash_and_header(self):
        path = os.path.join(self.tmpdir, 'sub', 'x.csv')
        artifacts.write_csv(path, ('a', 'b'), [(1, 0.5), (2, float('inf'))], 'abc')
        with open(path) as f:
            self.assertEqual(f.read(), "# config_hash=abc\na,b\n1,0.5\n2,inf\n")
        config_hash, header, rows = artifacts.read_csv(path)
        self.assertEqual((config_hash, header, rows), ('abc', ['a', 'b'], [['1', '0.5'], ['2', 'inf']]))

    def test_read_rejects_foreign_csv(self):
        path = os.path.join(self.tmpdir, 'y.csv')
        with open(path, 'w') as f:
            f.write("a,b\n")
        with self.assertRaises(ValueError):
            artifacts.read_csv(path)

    def test_json(self):
        path = os.path.join(self.tmpdir, 'r.json')
        artifacts.write_json(path, {'b': np.float64(1.5), 'a': np.arange(2)}, 'abc')
        with open(path) as f:
            text = f.read()
        self.assertEqual(json.loads(text), {'a': [0, 1], 'b': 1.5, 'config_hash': 'abc'})
        self.assertLess(text.index('"a"'), text.index('"b"'))

    def test_windings(self):
        batch = sde.simulate_radial_batch(quick_config(), range(3), windings=True).windings
        path = artifacts.write_windings(os.path.join(self.tmpdir, 'w.csv'), batch, 'h')
        _, header, rows = artifacts.read_csv(path)
        self.assertEqual(tuple(header), artifacts.WINDING_COLUMNS)
        self.assertEqual(len(rows), 3)
        self.assertEqual(float(rows[1][1]), batch.zeta[1, 0])
        self.assertEqual(rows[0][-1], '')

    def test_trajectories(self):
        cfg = quick_config(t_end=0.05, dt=1e-3)
        radial = artifacts.write_radial_path(os.path.join(self.tmpdir, 'r.csv'), sde.simulate_radial(cfg), 'h')
        _, header, rows = artifacts.read_csv(radial)
        self.assertEqual(tuple(header), artifacts.RADIAL_PATH_COLUMNS)
        self.assertEqual(len(rows), cfg.n_steps + 1)
        path, _ = sde.simulate_coordinate(cfg)
        coordinate = artifacts.write_coordinate_path(os.path.join(self.tmpdir, 'c.csv'), path, 'h')
        _, header, rows = artifacts.read_csv(coordinate)
        self.assertEqual(len(header), 1 + 8 + 7)
        self.assertEqual(len(rows[0]), len(header))
