import numpy as np
from django.test import SimpleTestCase

from octowinding import streams
from octowinding.exceptions import DomainError


class TestStreams(SimpleTestCase):
    def test_reproducible(self):
        a = streams.path_generator(7, 3).standard_normal(5)
        b = streams.path_generator(7, 3).standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_paths_are_independent_streams(self):
        a = streams.path_generator(7, 3).standard_normal(5)
        b = streams.path_generator(7, 4).standard_normal(5)
        c = streams.path_generator(8, 3).standard_normal(5)
        self.assertFalse(np.array_equal(a, b))
        self.assertFalse(np.array_equal(a, c))

    def test_refinement_stream_is_separate(self):
        path = streams.path_generator(7, 3).standard_normal(5)
        refine = streams.refinement_generator(7, 3).standard_normal(5)
        again = streams.refinement_generators(7, [3])[0].standard_normal(5)
        self.assertFalse(np.array_equal(path, refine))
        np.testing.assert_array_equal(refine, again)

    def test_draws_concatenate(self):
        whole = streams.path_generator(1, 0).standard_normal(10)
        g = streams.path_generator(1, 0)
        parts = np.concatenate([g.standard_normal(4), g.standard_normal(6)])
        np.testing.assert_array_equal(whole, parts)

    def test_seed_range(self):
        self.assertEqual(streams.check_seed(2 ** 64 - 1), 2 ** 64 - 1)
        with self.assertRaises(DomainError):
            streams.check_seed(-1)
        with self.assertRaises(DomainError):
            streams.check_seed(2 ** 64)
