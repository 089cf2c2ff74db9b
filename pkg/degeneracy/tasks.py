from celery import shared_task
import logging

from .exceptions import DegeneracyException
from .families import evaluate_family_point

logger = logging.getLogger('degeneracy')

@shared_task
def evaluate_family_point_task(family, form, parameter, det_tol=None):
    """Evaluate detJ2 at one family member; returns a JSON-friendly dict"""
    try:
        return evaluate_family_point(family, form, parameter, det_tol=det_tol).as_dict()
    except (DegeneracyException, ValueError) as e:
        logger.error(f"Family point {family}/{form} at {parameter} failed: {e}")
        return {
            'family': family,
            'form': form,
            'parameter': parameter,
            'configuration': None,
            'masses': None,
            'detJ2': None,
            'verdict': None,
            'error': str(e),
        }
