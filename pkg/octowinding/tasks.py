import logging

import numpy as np
from celery import shared_task

from octowinding.dispatch import run_batch


logger = logging.getLogger(__name__)


@shared_task
def simulate_batch(payload):
    """
    Simulate one batch of paths and return its arrays as JSON-friendly lists.
    """
    logger.debug("simulate_batch: paths %d-%d (%s)", payload['start'], payload['stop'] - 1, payload['route'])
    try:
        result = run_batch(payload)
    except Exception:
        logger.exception("simulate_batch failed for paths %d-%d", payload['start'], payload['stop'] - 1)
        raise
    return {key: value.tolist() if isinstance(value, np.ndarray) else value for key, value in result.items()}
