import os
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'cc-degeneracy-local-key')
DEBUG = os.getenv('DJANGO_DEBUG', '0') == '1'
ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'rest_framework',
    'degeneracy',
]

# No models, no URL routes: everything runs through management commands.
DATABASES = {}

# REST Framework (serializers and the JSON renderer only)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'DEFAULT_PARSER_CLASSES': [
        'rest_framework.parsers.JSONParser',
    ],
    'UNAUTHENTICATED_USER': None,
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Numerical tolerances
CC_COLLISION_TOL = float(os.getenv('CC_COLLISION_TOL', '1e-12'))  # relative to the configuration diameter
CC_RESIDUAL_TOL = float(os.getenv('CC_RESIDUAL_TOL', '1e-9'))
CC_DET_TOL = float(os.getenv('CC_DET_TOL', '1e-8'))  # relative to the Hadamard scale of J2
CC_ROOT_TOL = float(os.getenv('CC_ROOT_TOL', '1e-12'))
CC_FD_STEP = float(os.getenv('CC_FD_STEP', '1e-6'))

# Certifier
CC_CERT_MAX_DEPTH = int(os.getenv('CC_CERT_MAX_DEPTH', '42'))
CC_CERT_G_PIECES = int(os.getenv('CC_CERT_G_PIECES', '64'))

# Family scans
CC_USE_CELERY = os.getenv('CC_USE_CELERY', '0') == '1'
CC_FORCE_SEQUENTIAL = os.getenv('CC_FORCE_SEQUENTIAL', '0') == '1'

# Celery Configuration
CELERY_BROKER_URL = os.getenv('CELERY_BROKER_URL', 'redis://localhost:6379/0')
CELERY_RESULT_BACKEND = os.getenv('CELERY_RESULT_BACKEND', 'redis://localhost:6379/0')
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'

# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'file': {
            'level': 'INFO',
            'class': 'logging.FileHandler',
            'filename': os.getenv('CC_LOG_FILE', 'degeneracy.log'),
            'formatter': 'plain',
            'delay': True,
        },
        'console': {
            'level': 'WARNING',
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'degeneracy': {
            'handlers': ['file', 'console'],
            'level': os.getenv('CC_LOG_LEVEL', 'INFO'),
            'propagate': True,
        },
    },
}
