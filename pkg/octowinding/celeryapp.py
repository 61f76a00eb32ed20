"""Initialize celery"""
import os

from celery import Celery

if os.path.exists('octowinding/local_settings.py'):
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "octowinding.local_settings")
else:
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "octowinding.settings")

app = Celery('octowinding')

app.config_from_object('django.conf:settings', namespace='CELERY')
app.autodiscover_tasks()
