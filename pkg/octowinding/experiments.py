"""
Experiment pipelines behind the management commands.

``run_experiment`` takes a validated ``ExperimentConfig``, runs the pipeline
named by its ``command`` and writes the artifacts into the run directory
(``output`` or ``WINDING_OUTPUT_DIR/<command>-<hash prefix>``). Identical
configurations produce byte-identical artifacts.
"""
import logging
import os
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings

from . import artifacts, dispatch, sde, special, stats, verification
from .exceptions import WindingError
from .forms import LINE_INTEGRAL
from .geometry import FLAT, PROJECTIVE
from .models import ExperimentRun

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    exit_status: int = 0
    artifacts: list = field(default_factory=list)
    lines: list = field(default_factory=list)

    @property
    def summary(self):
        return "\n".join(self.lines)


def run_directory(cfg):
    if cfg.output:
        return cfg.output
    return os.path.join(settings.WINDING_OUTPUT_DIR, "%s-%s" % (cfg.command, cfg.config_hash[:12]))


def simulate_windings(cfg, n_paths=None, route=None, **changes):
    sim = cfg.sim_config(**changes)
    return dispatch.simulate(sim, n_paths or cfg.paths, route=route or cfg.route, coarsen=cfg.coarsen,
                             batch_size=cfg.batch_size, workers=cfg.workers,
                             use_celery=settings.WINDING_USE_CELERY)


def run_simulate(cfg, out_dir, result):
    batch = simulate_windings(cfg)
    result.artifacts.append(artifacts.write_windings(os.path.join(out_dir, 'windings.csv'), batch,
                                                     cfg.config_hash))
    sim = cfg.sim_config()
    for index in range(min(cfg.keep_paths, cfg.paths)):
        name = os.path.join(out_dir, 'path-%d.csv' % index)
        if cfg.route == LINE_INTEGRAL:
            path, _ = sde.simulate_coordinate(sim, path_index=index)
            result.artifacts.append(artifacts.write_coordinate_path(name, path, cfg.config_hash))
        else:
            path = sde.simulate_radial(sim, path_index=index)
            result.artifacts.append(artifacts.write_radial_path(name, path, cfg.config_hash))
    cov = stats.empirical_cov(batch) if len(batch) > 1 else np.zeros((7, 7))
    result.lines.append("%s: %d paths to t=%g, mean clock %.6g, mean winding variance %.6g" % (
        cfg.space, len(batch), batch.t_end, float(np.mean(batch.clock)), float(np.mean(np.diag(cov)))))


def charfn_row(cfg, batch, lam):
    """MC estimate and closed-form reference for one |lambda|.

    The flat reference is the exact transform at the simulated t; the curved
    spaces compare against their t -> infinity limits, the projective winding
    scaled by 1/sqrt(t).
    """
    space = cfg.model_space
    if space is FLAT:
        return stats.mc_charfn(batch, lam), special.flat_laplace(cfg.r0, batch.t_end, lam)
    scale = 1.0 / np.sqrt(batch.t_end) if space is PROJECTIVE else 1.0
    return stats.mc_charfn(batch, lam, scale=scale), special.limit_charfn(space, lam, cfg.r0)


def run_charfn(cfg, out_dir, result):
    batch = simulate_windings(cfg)
    rows = []
    for lam in cfg.lambda_norms:
        estimate, reference = charfn_row(cfg, batch, lam)
        rows.append((cfg.space, lam, cfg.r0, batch.t_end, len(batch), estimate.value, estimate.std_error,
                     reference))
        result.lines.append("%s |lambda|=%g t=%g: mc %.6f +/- %.6f, closed form %.6f" % (
            cfg.space, lam, batch.t_end, estimate.value, estimate.std_error, reference))
    result.artifacts.append(artifacts.write_csv(os.path.join(out_dir, 'charfn.csv'), artifacts.CHARFN_COLUMNS,
                                                rows, cfg.config_hash))


def table_rows(cfg):
    space = cfg.model_space
    for lam in cfg.lambda_norms:
        limit = special.limit_charfn(space, lam, cfg.r0)
        if space is FLAT:
            for t in cfg.t_grid:
                yield (str(space), lam, cfg.r0, t, special.flat_laplace_scaled(cfg.r0, t, lam), limit)
        else:
            yield (str(space), lam, cfg.r0, float('inf'), limit, limit)


def run_table(cfg, out_dir, result):
    rows = list(table_rows(cfg))
    for row in rows:
        result.lines.append("%s |lambda|=%g t=%s: %.6f (limit %.6f)" % (
            row[0], row[1], artifacts.format_value(row[3]), row[4], row[5]))
    result.artifacts.append(artifacts.write_csv(os.path.join(out_dir, 'table.csv'), artifacts.TABLE_COLUMNS,
                                                rows, cfg.config_hash))


def suite_context(cfg):
    return verification.SuiteContext(
        seed=cfg.seed, n_paths=cfg.n_paths, dt=cfg.dt, workers=cfg.workers, batch_size=cfg.batch_size,
        use_celery=settings.WINDING_USE_CELERY, ks_threshold=settings.WINDING_KS_THRESHOLD,
        cov_rel_tol=settings.WINDING_COV_REL_TOL, offdiag_tol=settings.WINDING_COV_OFFDIAG_TOL)


def run_verify(cfg, out_dir, result):
    for report in verification.run_suite(cfg.suite, suite_context(cfg)):
        path = os.path.join(out_dir, 'verify-%s.json' % report.name)
        result.artifacts.append(artifacts.write_json(path, report.to_dict(), cfg.config_hash))
        result.lines.append(report.to_text())
        if not report.passed:
            result.exit_status = 1


PIPELINES = {
    'simulate': run_simulate,
    'charfn': run_charfn,
    'table': run_table,
    'verify': run_verify,
}


def recorded_paths(cfg):
    if cfg.command in (ExperimentRun.SIMULATE, ExperimentRun.CHARFN):
        return cfg.paths
    return cfg.n_paths or 0


def run_experiment(cfg, record=None):
    """Run ``cfg.command``; returns a RunResult and records the run in the ledger."""
    if record is None:
        record = settings.WINDING_RECORD_RUNS
    out_dir = artifacts.ensure_dir(run_directory(cfg))
    run = None
    if record:
        run = ExperimentRun.objects.create(command=cfg.command, space=cfg.space, seed=str(cfg.seed),
                                           n_paths=recorded_paths(cfg), config_hash=cfg.config_hash,
                                           config=cfg.to_dict())
    logger.info("%s run %s started in %s", cfg.command, cfg.config_hash[:12], out_dir)
    result = RunResult()
    try:
        PIPELINES[cfg.command](cfg, out_dir, result)
    except Exception as e:
        if isinstance(e, WindingError):
            logger.error("%s run %s failed: %s", cfg.command, cfg.config_hash[:12], e)
        else:
            logger.exception("%s run %s failed", cfg.command, cfg.config_hash[:12])
        if run is not None:
            run.mark_failed(e)
        raise
    if run is not None:
        if result.exit_status == 0:
            run.mark_succeeded(result.summary, result.artifacts)
        else:
            run.finish(ExperimentRun.FAILED, summary=result.summary, error="verification failed",
                       artifacts=result.artifacts)
    logger.info("%s run %s finished with status %d", cfg.command, cfg.config_hash[:12], result.exit_status)
    return result
