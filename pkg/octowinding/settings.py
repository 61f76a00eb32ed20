import os
import sys

import dj_database_url

testing = "test" in sys.argv

if os.getenv("DJANGO_ENV") == "prod":
    DEBUG = False
    ALLOWED_HOSTS = os.getenv('ALLOWED_HOSTS', '*').split(',')
elif testing:
    DEBUG = False
    ALLOWED_HOSTS = ['*']
else:
    DEBUG = 'DJANGO_DEBUG' in os.environ
    ALLOWED_HOSTS = ['*']

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# SECRET_KEY is overriden in deploy settings
SECRET_KEY = os.getenv('SECRET_KEY', 'secret-key-for-local-use-only')

INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'octowinding',
    'django.contrib.admin',
]

MIDDLEWARE = [
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'octowinding.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'octowinding.wsgi.application'

DATABASES = {
    'default': dj_database_url.config(env="DATABASE_URL",
                                      default="sqlite:///%s" % os.path.join(BASE_DIR, 'db.sqlite3')),
}
DEFAULT_AUTO_FIELD = 'django.db.models.AutoField'

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

STATIC_URL = '/static/'
STATIC_ROOT = os.path.join(BASE_DIR, 'public', 'static')

# celery settings
CELERY_BROKER_URL = os.getenv('CELERY_BROKER_URL', 'redis://localhost:6379/0')
CELERY_RESULT_BACKEND = os.getenv('CELERY_RESULT_BACKEND', CELERY_BROKER_URL)
CELERY_TASK_ALWAYS_EAGER = DEBUG or testing
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_WORKER_HIJACK_ROOT_LOGGER = False
CELERY_TASK_SERIALIZER = "json"
CELERY_RESULT_SERIALIZER = "json"
CELERY_ACCEPT_CONTENT = ["json"]

# Simulation defaults. Every value can be overridden per run from a config
# file or command line flag.
WINDING_DEFAULT_SEED = int(os.getenv('WINDING_DEFAULT_SEED', 20201019))
WINDING_DEFAULT_DT = float(os.getenv('WINDING_DEFAULT_DT', 1e-3))
WINDING_DEFAULT_SCHEME = os.getenv('WINDING_DEFAULT_SCHEME', 'StratonovichHeun')
WINDING_R_MIN = float(os.getenv('WINDING_R_MIN', 1e-6))
WINDING_PROJECTIVE_R_MAX = float(os.getenv('WINDING_PROJECTIVE_R_MAX', 1.45))
WINDING_HYPERBOLIC_R_MAX = float(os.getenv('WINDING_HYPERBOLIC_R_MAX', 6.0))

# Paths per unit of work handed to a worker process or Celery task.
WINDING_BATCH_SIZE = int(os.getenv('WINDING_BATCH_SIZE', 1024))
# None means one worker per CPU.
WINDING_WORKERS = int(os.environ['WINDING_WORKERS']) if os.getenv('WINDING_WORKERS') else None
WINDING_USE_CELERY = 'WINDING_USE_CELERY' in os.environ

WINDING_KS_THRESHOLD = float(os.getenv('WINDING_KS_THRESHOLD', 0.02))
WINDING_COV_REL_TOL = float(os.getenv('WINDING_COV_REL_TOL', 0.05))
WINDING_COV_OFFDIAG_TOL = float(os.getenv('WINDING_COV_OFFDIAG_TOL', 0.1))

WINDING_OUTPUT_DIR = os.getenv('WINDING_OUTPUT_DIR', os.path.join(BASE_DIR, 'runs'))
WINDING_RECORD_RUNS = not testing and 'WINDING_NO_LEDGER' not in os.environ

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'basic': {
            'format': '%(asctime)s %(name)-20s %(levelname)-8s %(message)s',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG' if DEBUG else 'INFO',
            'class': 'logging.StreamHandler',
            'formatter': 'basic',
        },
    },
    'loggers': {
        'octowinding': {
            'level': os.getenv('WINDING_LOG_LEVEL', 'DEBUG' if DEBUG else 'INFO'),
        },
    },
    'root': {
        'handlers': ['console', ],
        'level': 'WARNING' if testing else 'INFO',
    },
}
