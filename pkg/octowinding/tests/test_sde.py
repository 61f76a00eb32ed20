import numpy as np
from django.test import SimpleTestCase
from mock import patch

from octowinding import octonion, sde, streams
from octowinding.exceptions import DomainError, SimulationError
from octowinding.geometry import FLAT, HYPERBOLIC, PROJECTIVE
from octowinding.tests.utilities import quick_config, zero_noise


class TestSimConfig(SimpleTestCase):
    def test_defaults(self):
        cfg = sde.SimConfig(space='flat', t_end=1.0, r0=1.0)
        self.assertEqual(cfg.dt, 1e-3)
        self.assertIs(cfg.scheme, sde.Scheme.STRATONOVICH_HEUN)
        self.assertEqual(cfg.seed, sde.DEFAULT_SEED)
        self.assertEqual(cfg.n_steps, 1000)
        self.assertEqual(cfg.w0, (1.0, 0, 0, 0, 0, 0, 0, 0))
        self.assertTrue(np.isinf(cfg.r_max))

    def test_w0_sets_r0(self):
        cfg = sde.SimConfig(space=HYPERBOLIC, t_end=1.0, w0=[0, 0.5, 0, 0, 0, 0, 0, 0])
        self.assertAlmostEqual(cfg.r0, np.arctanh(0.5))
        self.assertEqual(cfg.r_max, 6.0)

    def test_invalid(self):
        with self.assertRaises(DomainError):
            sde.SimConfig(space=FLAT, t_end=1.0)
        with self.assertRaises(DomainError):
            sde.SimConfig(space=HYPERBOLIC, t_end=1.0, w0=[0, 1.0, 0, 0, 0, 0, 0, 0])
        with self.assertRaises(DomainError):
            sde.SimConfig(space=PROJECTIVE, t_end=1.0, r0=2.0)
        with self.assertRaises(DomainError):
            sde.SimConfig(space=FLAT, t_end=1.0, r0=1.0, dt=2.0)
        with self.assertRaises(DomainError):
            sde.SimConfig(space=PROJECTIVE, t_end=1.0, r0=1.0, exact_besq=True)
        with self.assertRaises(DomainError):
            sde.SimConfig(space=FLAT, t_end=1.0, r0=1.0, w0=[2, 0, 0, 0, 0, 0, 0, 0])

    def test_log_grid(self):
        cfg = sde.SimConfig(space=FLAT, t_end=100.0, r0=1.0, exact_besq=True, grid_points=5, grid_start=0.01)
        np.testing.assert_allclose(cfg.times(), [0.0, 0.01, 0.1, 1.0, 10.0, 100.0])

    def test_scheme_names(self):
        self.assertIs(sde.Scheme.coerce('eulermaruyama'), sde.Scheme.EULER_MARUYAMA)
        self.assertIs(sde.Scheme.coerce('STRATONOVICH_HEUN'), sde.Scheme.STRATONOVICH_HEUN)
        with self.assertRaises(DomainError):
            sde.Scheme.coerce('Milstein')


class TestTilts(SimpleTestCase):
    def test_tilt_parameter(self):
        self.assertAlmostEqual(sde.tilt_parameter(FLAT, 4.0), 2.0)
        a, b = sde.tilt_parameter(HYPERBOLIC, 4.0)
        self.assertAlmostEqual(a, 2.0)
        self.assertAlmostEqual(b, -8.0)

    def test_tilted_drift(self):
        self.assertAlmostEqual(sde.tilted_radial_drift(FLAT, 1.0, 2.0), 2.25)
        self.assertAlmostEqual(sde.tilted_radial_drift(PROJECTIVE, 0.5, np.pi / 8), 8.0)
        self.assertAlmostEqual(sde.tilted_radial_drift(HYPERBOLIC, (0.0, 0.0), 1.0),
                               7.0 / np.tanh(2.0))

    def test_tilt_must_keep_origin_repelling(self):
        with self.assertRaises(DomainError):
            sde.tilted_radial_drift(FLAT, -4.0, 1.0)

    def test_tilt_shape(self):
        cfg = quick_config(HYPERBOLIC)
        with self.assertRaises(DomainError):
            sde.simulate_tilted_radial(cfg, 1.0)
        with self.assertRaises(DomainError):
            sde.simulate_tilted_radial(quick_config(FLAT), (1.0, 2.0))


class TestRadialEngine(SimpleTestCase):
    def test_deterministic_drift(self):
        # Without noise the flat radius solves r' = 3.5 / r, i.e. r^2 = r0^2 + 7t.
        cfg = sde.SimConfig(space=FLAT, t_end=1.0, dt=1e-3, r0=1.0)
        with patch('octowinding.sde._brownian_chunk', side_effect=zero_noise):
            batch = sde.simulate_radial_batch(cfg, [0, 1])
        np.testing.assert_allclose(batch.r_end, np.sqrt(8.0), rtol=1e-5)
        np.testing.assert_allclose(batch.clock_end, np.log(8.0) / 7.0, rtol=1e-5)

    def test_batching_does_not_change_paths(self):
        cfg = quick_config(PROJECTIVE, r0=np.pi / 4)
        whole = sde.simulate_radial_batch(cfg, range(6), windings=True)
        parts = [sde.simulate_radial_batch(cfg, idx, windings=True) for idx in ([0, 1], [2, 3, 4], [5])]
        np.testing.assert_array_equal(whole.r_end, np.concatenate([p.r_end for p in parts]))
        np.testing.assert_array_equal(whole.windings.zeta, np.concatenate([p.windings.zeta for p in parts]))

    def test_reproducible_and_seeded(self):
        cfg = quick_config(HYPERBOLIC)
        first = sde.simulate_radial_batch(cfg, range(4))
        second = sde.simulate_radial_batch(cfg, range(4))
        other = sde.simulate_radial_batch(cfg.replace(seed=1), range(4))
        np.testing.assert_array_equal(first.r_end, second.r_end)
        self.assertFalse(np.array_equal(first.r_end, other.r_end))

    def test_coarsened_run_shares_brownian_paths(self):
        cfg = quick_config(FLAT, t_end=0.1, dt=1e-3)
        fine = sde.simulate_radial_batch(cfg, range(20))
        coarse = sde.simulate_radial_batch(cfg.replace(dt=2e-3), range(20), coarsen=2)
        unrelated = sde.simulate_radial_batch(cfg.replace(dt=2e-3), range(20))
        gap = np.max(np.abs(fine.r_end - coarse.r_end))
        self.assertLess(gap, 0.03)
        self.assertLess(gap, np.max(np.abs(fine.r_end - unrelated.r_end)))

    def test_clock_matches_trajectory(self):
        path = sde.simulate_radial(quick_config(PROJECTIVE, r0=0.6), path_index=3)
        self.assertEqual(path.path_index, 3)
        self.assertEqual(len(path.times), len(path.r))
        self.assertAlmostEqual(sde.accumulate_clock(path), path.clock_end)
        np.testing.assert_allclose(sde.cumulative_clock(PROJECTIVE, path.times, path.r), path.clock)

    def test_domain_exit(self):
        cfg = sde.SimConfig(space=FLAT, t_end=1.0, dt=1e-2, r0=0.6, r_min=0.5)
        with self.assertRaises(SimulationError) as cm:
            sde.simulate_radial_batch(cfg, range(200))
        self.assertIsNotNone(cm.exception.exit_time)
        self.assertIsNotNone(cm.exception.path_index)

    def test_time_change_winding(self):
        path = sde.simulate_radial(quick_config(FLAT))
        sample = sde.sample_winding_timechange(path, streams.path_generator(0, 0))
        self.assertEqual(sample.zeta.shape, (octonion.IMAG_DIM,))
        self.assertEqual(sample.clock_end, path.clock_end)
        self.assertIs(sample.provenance, sde.Provenance.TIME_CHANGE)

    def test_winding_variance_is_the_clock(self):
        batch = sde.simulate_radial_batch(quick_config(FLAT, t_end=0.5, dt=1e-2), range(4000), windings=True)
        standardized = batch.windings.zeta / np.sqrt(batch.clock_end)[:, np.newaxis]
        self.assertAlmostEqual(standardized.var(), 1.0, delta=0.05)


class TestRadialStatistics(SimpleTestCase):
    def test_heun_squared_radius_mean(self):
        # R^2 is BESQ(8): E R_t^2 = rho^2 + 8t, Var R_t^2 = 4 rho^2 t + 16 t^2.
        cfg = sde.SimConfig(space=FLAT, t_end=1.0, dt=1e-3, r0=1.0, seed=11)
        batch = sde.simulate_radial_batch(cfg, range(4000))
        self.assertAlmostEqual(np.mean(batch.r_end ** 2), 9.0, delta=0.3)

    def test_tilted_squared_radius_mean(self):
        # The mu tilt turns BESQ(8) into BESQ(8 + 2 mu).
        cfg = sde.SimConfig(space=FLAT, t_end=1.0, dt=1e-3, r0=1.0, seed=12)
        batch = sde.simulate_radial_batch(cfg, range(4000), tilt=1.0)
        self.assertAlmostEqual(np.mean(batch.r_end ** 2), 11.0, delta=0.3)

    def test_clock_error_halves_with_dt(self):
        fine_dt = 1.25e-4
        cfg = sde.SimConfig(space=FLAT, t_end=0.5, dt=fine_dt, r0=1.0, seed=13)
        reference = sde.simulate_radial_batch(cfg, range(500)).clock_end
        errors = []
        for dt in (1e-3, 5e-4):
            coarse = sde.simulate_radial_batch(cfg.replace(dt=dt), range(500), coarsen=int(round(dt / fine_dt)))
            errors.append(np.mean(np.abs(coarse.clock_end - reference)))
        ratio = errors[0] / errors[1]
        self.assertGreater(ratio, 1.2)
        self.assertLess(ratio, 3.0)

    def test_hyperbolic_clock_converges(self):
        cfg = sde.SimConfig(space=HYPERBOLIC, t_end=2.0, dt=1e-3, r0=1.0, seed=14)
        batch = sde.simulate_radial_batch(cfg, range(200), keep_paths=True)
        clock = batch.clock.mean(axis=0)
        steps = [int(round(t / cfg.dt)) for t in (0.25, 0.5, 1.0, 2.0)]
        increments = np.diff(clock[steps])
        self.assertTrue(np.all(increments >= 0))
        self.assertTrue(increments[0] > increments[1] > increments[2])
        self.assertLess(increments[-1], 1e-8)
        np.testing.assert_allclose(batch.clock_end, batch.clock[:, -1])


class TestExactBesq(SimpleTestCase):
    def test_squared_radius_mean(self):
        # BESQ(8): E X_t = x0 + 8t.
        cfg = sde.SimConfig(space=FLAT, t_end=10.0, r0=1.0, exact_besq=True, grid_points=50, grid_start=1e-3)
        batch = sde.simulate_radial_batch(cfg, range(2000))
        self.assertAlmostEqual(np.mean(batch.r_end ** 2), 81.0, delta=4.0)
        self.assertTrue(np.all(batch.clock_end > 0))

    def test_keep_paths(self):
        cfg = sde.SimConfig(space=FLAT, t_end=10.0, r0=1.0, exact_besq=True, grid_points=20, grid_start=1e-2)
        path = sde.simulate_radial(cfg)
        self.assertEqual(len(path.r), 21)
        self.assertEqual(path.r[0], 1.0)


class TestCoordinateEngine(SimpleTestCase):
    def test_flat_without_noise_stays_put(self):
        cfg = quick_config(FLAT, w0=[0.5, 0.5, 0, 0, 0, 0, 0, 0], r0=None)
        with patch('octowinding.sde._brownian_chunk', side_effect=zero_noise):
            windings, paths = sde.simulate_coordinate_batch(cfg, [0], keep_paths=True)
        np.testing.assert_array_equal(paths[0].w[-1], cfg.start_point())
        np.testing.assert_array_equal(windings.zeta, np.zeros((1, octonion.IMAG_DIM)))
        self.assertIs(windings.provenance, sde.Provenance.LINE_INTEGRAL)

    def test_switch_to_time_change_past_r_max(self):
        cfg = sde.SimConfig(space=HYPERBOLIC, t_end=1.0, dt=1e-3, r0=1.0)
        with patch('octowinding.sde._brownian_chunk', side_effect=zero_noise):
            path, sample = sde.simulate_coordinate(cfg)
        self.assertTrue(0 < path.switched_at < 1.0)
        self.assertGreater(path.r[-1], cfg.r_max)
        self.assertTrue(np.all(np.isnan(path.w[-1])))
        np.testing.assert_array_equal(sample.zeta, np.zeros(octonion.IMAG_DIM))

    def test_refused_step_is_split_at_a_bridge_midpoint(self):
        # In the flat chart a step is exactly w + dW, so the halves must land on the same endpoint.
        w = np.tile(octonion.basis(0), (2, 1))
        dW = np.zeros((2, octonion.DIM))
        dW[0, 1] = 0.05
        dW[1, 0] = 0.9
        refiners = streams.refinement_generators(0, [0, 1])
        new, dzeta, resolved = sde._refined_step(FLAT, w, dW, 1e-2, sde.Scheme.STRATONOVICH_HEUN, refiners)
        self.assertTrue(np.all(resolved))
        np.testing.assert_allclose(new, w + dW, atol=1e-12)
        np.testing.assert_allclose(dzeta[0], octonion.winding_form(w[0] + 0.5 * dW[0], dW[0]))

    def test_unresolved_step_continues_by_time_change(self):
        cfg = sde.SimConfig(space=FLAT, t_end=1.0, dt=0.1, r0=0.01)
        with patch.object(sde, 'MAX_REFINEMENTS', 0):
            windings, paths = sde.simulate_coordinate_batch(cfg, [0, 1, 2], keep_paths=True)
        np.testing.assert_array_equal(windings.switched_at, 0.0)
        self.assertTrue(np.all(np.isfinite(windings.zeta)))
        self.assertTrue(np.all(windings.r_end > 0))
        self.assertTrue(np.all(np.isnan(paths[0].w[-1])))

    def test_small_start_radius_runs_to_completion(self):
        cfg = sde.SimConfig(space=FLAT, t_end=1.0, dt=0.1, r0=0.01)
        windings, _ = sde.simulate_coordinate_batch(cfg, [0, 1, 2])
        self.assertTrue(np.all(np.isfinite(windings.zeta)))
        self.assertTrue(np.all(np.isfinite(windings.clock)))

    def test_flat_paths_from_the_unit_run_to_completion(self):
        cfg = quick_config(FLAT, t_end=0.2, dt=1e-3, r0=1.0)
        windings, _ = sde.simulate_coordinate_batch(cfg, range(2000))
        self.assertEqual(len(windings), 2000)
        self.assertTrue(np.all(np.isfinite(windings.zeta)))
        self.assertTrue(np.all(np.isnan(windings.switched_at)))
        standardized = windings.zeta / np.sqrt(windings.clock)[:, np.newaxis]
        self.assertAlmostEqual(standardized.var(), 1.0, delta=0.1)

    def test_projective_line_route_runs_to_completion(self):
        cfg = quick_config(PROJECTIVE, t_end=1.0, dt=1e-3, r0=np.pi / 4)
        windings, _ = sde.simulate_coordinate_batch(cfg, range(1000))
        self.assertEqual(len(windings), 1000)
        self.assertTrue(np.all(np.isfinite(windings.zeta)))
        self.assertTrue(np.all(np.isfinite(windings.clock)))
        standardized = windings.zeta / np.sqrt(windings.clock)[:, np.newaxis]
        self.assertAlmostEqual(standardized.var(), 1.0, delta=0.1)

    def test_refinement_does_not_depend_on_batching(self):
        cfg = quick_config(PROJECTIVE, t_end=0.3, dt=1e-2, r0=1.2)
        whole, _ = sde.simulate_coordinate_batch(cfg, range(8))
        parts = [sde.simulate_coordinate_batch(cfg, idx)[0] for idx in ([0, 1, 2], [3, 4, 5, 6, 7])]
        np.testing.assert_allclose(whole.zeta, np.concatenate([p.zeta for p in parts]), rtol=1e-9, atol=1e-12)

    def test_winding_follows_the_clock(self):
        cfg = quick_config(PROJECTIVE, t_end=0.5, dt=1e-3, r0=np.pi / 4)
        windings, _ = sde.simulate_coordinate_batch(cfg, range(1000))
        standardized = windings.zeta / np.sqrt(windings.clock)[:, np.newaxis]
        self.assertAlmostEqual(standardized.var(), 1.0, delta=0.1)


class TestWindingBatch(SimpleTestCase):
    def make(self, start, n):
        return sde.WindingBatch(zeta=np.full((n, 7), float(start)), clock=np.ones(n), t_end=1.0,
                                provenance=sde.Provenance.TIME_CHANGE, path_indices=np.arange(start, start + n))

    def test_concatenate_orders_by_index(self):
        joined = sde.WindingBatch.concatenate([self.make(3, 2), self.make(0, 3)])
        np.testing.assert_array_equal(joined.path_indices, np.arange(5))
        self.assertEqual(joined[4].zeta[0], 3.0)
        self.assertEqual(len(list(joined)), 5)

    def test_concatenate_nothing(self):
        with self.assertRaises(DomainError):
            sde.WindingBatch.concatenate([])
