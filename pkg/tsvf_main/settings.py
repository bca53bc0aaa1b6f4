"""
Django settings for tsvf_main project.

The project has no web surface: Django provides configuration, the
management command used as the command-line tool, and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os


# Nothing is signed or served; the key only satisfies Django's startup checks.
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'tsvf-offline-simulator-not-secret')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'rest_framework',
    'quantum',
    'scenarios',
]

MIDDLEWARE = []


# Database
# No models; Django falls back to its dummy backend.

DATABASES = {}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Django REST framework: serializers only, JSON rendering for reports.
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'COERCE_DECIMAL_TO_STRING': False,
}


# Logging: diagnostics go to stderr, reports own stdout.
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'console': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'console',
        },
    },
    'loggers': {
        'quantum': {
            'handlers': ['console'],
            'level': os.environ.get('TSVF_LOG_LEVEL', 'WARNING'),
        },
        'scenarios': {
            'handlers': ['console'],
            'level': os.environ.get('TSVF_LOG_LEVEL', 'WARNING'),
        },
    },
}


# Simulator settings

# Global algebraic tolerance for exactness checks.
TSVF_EPS = float(os.environ.get('TSVF_EPS', '1e-12'))

# Probability threshold separating "certain" from "probable" outcomes.
TSVF_CERTAINTY_TOLERANCE = 1e-9

# Desk scale: total Hilbert-space dimension cap.
TSVF_MAX_DIMENSION = 2 ** 16

TSVF_WEAK_DEFAULTS = {
    'g': 0.05,
    'delta': 1.0,
    'post_samples': 100_000,
    'seed': 42,
    'grid_points': 2 ** 14,
    'shards': 1,
}
