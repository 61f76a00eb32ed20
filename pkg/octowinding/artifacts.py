"""
Run artifacts: CSV data files and JSON reports.

Every CSV starts with a ``# config_hash=<sha256>`` comment line followed by a
header row. Numbers are written with ``repr`` so identical runs produce
identical bytes.
"""
import csv
import json
import logging
import math
import os

import numpy as np

from . import octonion

logger = logging.getLogger(__name__)


CHARFN_COLUMNS = ('space', 'lambda_norm', 'r0', 't', 'n_paths', 'mc_value', 'mc_se', 'closed_form')
TABLE_COLUMNS = ('space', 'lambda_norm', 'r0', 't', 'closed_form', 'limit')
WINDING_COLUMNS = (('path_index',) + tuple('zeta%d' % i for i in range(1, octonion.IMAG_DIM + 1))
                   + ('clock', 'r_end', 'switched_at'))
RADIAL_PATH_COLUMNS = ('time', 'r', 'clock')
COORDINATE_PATH_COLUMNS = (('time',) + tuple('c%d' % i for i in range(octonion.DIM))
                           + tuple('zeta%d' % i for i in range(1, octonion.IMAG_DIM + 1)))


def format_value(value):
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return repr(value)
    return str(value)


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def write_csv(path, columns, rows, config_hash):
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    with open(path, 'w', newline='') as f:
        f.write("# config_hash=%s\n" % config_hash)
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    logger.debug("wrote %s", path)
    return path


def read_csv(path):
    """Return (config_hash, header, rows) of an artifact written by write_csv."""
    with open(path, newline='') as f:
        first = f.readline().strip()
        if not first.startswith('# config_hash='):
            raise ValueError("%s does not start with a config hash line" % path)
        reader = csv.reader(f)
        header = next(reader)
        return first.split('=', 1)[1], header, list(reader)


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return str(value)


def write_json(path, data, config_hash=None):
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    if config_hash is not None:
        data = dict(data, config_hash=config_hash)
    with open(path, 'w') as f:
        json.dump(data, f, indent=2, sort_keys=True, default=_json_default)
        f.write('\n')
    logger.debug("wrote %s", path)
    return path


def winding_rows(batch):
    switched = batch.switched_at
    for i in range(len(batch)):
        yield ([int(batch.path_indices[i])] + [float(z) for z in batch.zeta[i]]
               + [float(batch.clock[i]), float(batch.r_end[i]) if batch.r_end is not None else None,
                  float(switched[i]) if switched is not None else None])


def write_windings(path, batch, config_hash):
    return write_csv(path, WINDING_COLUMNS, winding_rows(batch), config_hash)


def write_radial_path(path, radial_path, config_hash):
    rows = zip(radial_path.times, radial_path.r, radial_path.clock)
    return write_csv(path, RADIAL_PATH_COLUMNS, rows, config_hash)


def write_coordinate_path(path, coordinate_path, config_hash):
    rows = ([t] + list(w) + list(z)
            for t, w, z in zip(coordinate_path.times, coordinate_path.w, coordinate_path.zeta))
    return write_csv(path, COORDINATE_PATH_COLUMNS, rows, config_hash)
