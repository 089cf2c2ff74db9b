from django.apps import AppConfig
import logging

logger = logging.getLogger('degeneracy')

class DegeneracyConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'degeneracy'
    verbose_name = 'Central configuration degeneracy'

    def ready(self):
        from django.conf import settings
        if settings.CC_USE_CELERY and not settings.CC_FORCE_SEQUENTIAL:
            logger.info(f"Family scans dispatch through Celery at {settings.CELERY_BROKER_URL}")
