import os

from django.conf import settings


def setting(name, default):
    """Read a CC_* tunable, falling back when Django is not configured."""
    if not settings.configured and not os.environ.get('DJANGO_SETTINGS_MODULE'):
        return default
    return getattr(settings, name, default)
