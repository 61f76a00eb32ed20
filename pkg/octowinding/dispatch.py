"""
Fan-out of path batches to worker processes or Celery workers.

A unit of work is a plain dict (JSON-serializable, so it can travel as a Celery
message) naming the engine configuration and a contiguous range of path
indices. Results come back in batch order whatever order workers finish in.
"""
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import sde
from .geometry import ModelSpace

logger = logging.getLogger(__name__)


TIME_CHANGE = 'timechange'
LINE_INTEGRAL = 'line'
TILTED = 'tilted'

RESULT_KEYS = ('zeta', 'clock', 'r_end', 'switched_at')


def sim_config_dict(cfg):
    return {
        'space': str(cfg.space),
        't_end': cfg.t_end,
        'dt': cfg.dt,
        'r0': cfg.r0,
        'w0': list(cfg.w0),
        'scheme': str(cfg.scheme),
        'seed': cfg.seed,
        'r_min': cfg.r_min,
        'r_max': None if math.isinf(cfg.r_max) else cfg.r_max,
        'exact_besq': cfg.exact_besq,
        'grid_points': cfg.grid_points,
        'grid_start': cfg.grid_start,
    }


def make_payloads(cfg, n_paths, route, batch_size, tilt=None, coarsen=1, first_index=0):
    if route not in (TIME_CHANGE, LINE_INTEGRAL, TILTED):
        raise ValueError("unknown route %r" % (route,))
    sim = sim_config_dict(cfg)
    if tilt is not None:
        tilt = [float(x) for x in tilt] if np.ndim(tilt) else float(tilt)
    payloads = []
    for start in range(first_index, first_index + n_paths, batch_size):
        stop = min(start + batch_size, first_index + n_paths)
        payloads.append({'sim': sim, 'start': start, 'stop': stop, 'route': route, 'tilt': tilt,
                         'coarsen': coarsen})
    return payloads


def run_batch(payload):
    """Simulate one batch; returns a dict of numpy arrays keyed by RESULT_KEYS."""
    cfg = sde.SimConfig(**payload['sim'])
    indices = np.arange(payload['start'], payload['stop'])
    route = payload['route']
    if route == LINE_INTEGRAL:
        windings, _ = sde.simulate_coordinate_batch(cfg, indices, coarsen=payload['coarsen'])
        zeta, clock, r_end, switched_at = windings.zeta, windings.clock, windings.r_end, windings.switched_at
    else:
        batch = sde.simulate_radial_batch(cfg, indices, tilt=payload['tilt'], coarsen=payload['coarsen'],
                                          windings=route == TIME_CHANGE)
        zeta = batch.windings.zeta if batch.windings is not None else None
        clock, r_end, switched_at = batch.clock_end, batch.r_end, None
    return {'start': payload['start'], 'zeta': zeta, 'clock': clock, 'r_end': r_end,
            'switched_at': switched_at}


def worker_count(workers=None):
    return workers or os.cpu_count() or 1


def _run_celery(payloads):
    from celery import group

    from .tasks import simulate_batch

    results = group(simulate_batch.s(p) for p in payloads)().get()
    return [{k: (np.asarray(v, dtype=float) if k in RESULT_KEYS and v is not None else v)
             for k, v in result.items()} for result in results]


def run_payloads(payloads, workers=None, use_celery=False):
    if use_celery:
        logger.info("dispatching %d batches to celery", len(payloads))
        return _run_celery(payloads)
    workers = min(worker_count(workers), len(payloads))
    if workers <= 1:
        return [run_batch(p) for p in payloads]
    logger.info("dispatching %d batches to %d worker processes", len(payloads), workers)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(run_batch, payloads))


def collect(results, cfg, route):
    """Join batch results, in path-index order, into one WindingBatch."""
    provenance = sde.Provenance.LINE_INTEGRAL if route == LINE_INTEGRAL else sde.Provenance.TIME_CHANGE
    t_end = float(cfg.times()[-1])
    dt = None if cfg.exact_besq else cfg.dt

    def array(value):
        return None if value is None else np.asarray(value, dtype=float)

    return sde.WindingBatch.concatenate(
        sde.WindingBatch(zeta=array(r['zeta']), clock=array(r['clock']), t_end=t_end, provenance=provenance,
                         path_indices=np.arange(r['start'], r['start'] + len(r['clock'])), seed=cfg.seed,
                         scheme=cfg.scheme, dt=dt, r_end=array(r['r_end']), switched_at=array(r['switched_at']))
        for r in results)


def simulate(cfg, n_paths, route=TIME_CHANGE, tilt=None, coarsen=1, batch_size=1024, workers=None,
             use_celery=False):
    """Simulate ``n_paths`` paths of ``cfg`` and return them as a WindingBatch.

    The ``tilted`` route simulates radial paths under a Girsanov tilt and
    returns endpoints and clocks without windings.
    """
    ModelSpace.coerce(cfg.space)
    payloads = make_payloads(cfg, n_paths, route, batch_size, tilt=tilt, coarsen=coarsen)
    logger.debug("simulating %d %s paths (%s) in %d batches", n_paths, cfg.space, route, len(payloads))
    return collect(run_payloads(payloads, workers=workers, use_celery=use_celery), cfg, route)
