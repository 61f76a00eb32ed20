# Make sure the Celery app is loaded when Django starts so shared_task binds to it.
from .celeryapp import app as celery_app  # noqa
