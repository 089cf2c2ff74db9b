import json

import numpy as np
from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

from .cc_core import Formulation


FORM_CHOICES = [(form.value, f'Form {form.value}') for form in Formulation]


class TolerancesSerializer(serializers.Serializer):
    residual_tol = serializers.FloatField(required=False, min_value=0.0)
    det_tol = serializers.FloatField(required=False, min_value=0.0)

    def _positive(self, value):
        # min_value is inclusive; a zero tolerance is an input error
        if not value > 0:
            raise serializers.ValidationError("Tolerance must be strictly positive")
        return value

    def validate_residual_tol(self, value):
        return self._positive(value)

    def validate_det_tol(self, value):
        return self._positive(value)


class ProblemFileSerializer(serializers.Serializer):
    """Problem file: masses, positions and a form tag; unknown keys are ignored."""
    masses = serializers.ListField(child=serializers.FloatField(), min_length=1)
    positions = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2),
        min_length=1)
    form = serializers.ChoiceField(choices=FORM_CHOICES)
    tolerances = TolerancesSerializer(required=False)

    def validate_masses(self, value):
        bad = [i for i, mass in enumerate(value) if not mass > 0]
        if bad:
            raise serializers.ValidationError(f"Masses must be positive (entries {bad})")
        return value

    def validate(self, attrs):
        if len(attrs['masses']) != len(attrs['positions']):
            raise serializers.ValidationError(
                f"{len(attrs['masses'])} masses but {len(attrs['positions'])} positions")
        return attrs


class ScalarSummarySerializer(serializers.Serializer):
    U = serializers.FloatField()
    I = serializers.FloatField()
    c = serializers.ListField(child=serializers.FloatField())
    lam = serializers.FloatField()

    def get_fields(self):
        # 'lambda' is a keyword, so the field is declared as lam and renamed
        fields = super().get_fields()
        fields['lambda'] = fields.pop('lam')
        return fields


class VerdictReportSerializer(serializers.Serializer):
    masses = serializers.ListField(child=serializers.FloatField())
    positions = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()))
    form = serializers.CharField()
    tolerances = TolerancesSerializer()
    summary = ScalarSummarySerializer()
    residual_norm = serializers.FloatField()
    detJ2 = serializers.FloatField(allow_null=True)
    zero_column_residual = serializers.FloatField(allow_null=True)
    verdict = serializers.CharField()
    pivot_rows = serializers.ListField(child=serializers.IntegerField())


def parse_problem(text: str) -> dict:
    """Parse and validate a JSON problem file; raises ValidationError with field context."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise serializers.ValidationError(f"Invalid JSON at line {e.lineno} column {e.colno}: {e.msg}")
    if not isinstance(data, dict):
        raise serializers.ValidationError("Problem file must be a JSON object")
    serializer = ProblemFileSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data


def problem_arrays(problem: dict):
    """(flat positions, masses) as numpy arrays."""
    return np.asarray(problem['positions'], dtype=float).ravel(), np.asarray(problem['masses'], dtype=float)


def verdict_report(problem: dict, summary, residual_norm: float, report=None, verdict=None) -> dict:
    """Report dict; ``report`` is the ReductionReport, absent when the input is not a CC."""
    tolerances = dict(problem.get('tolerances') or {})
    return VerdictReportSerializer({
        'masses': list(problem['masses']),
        'positions': [list(p) for p in problem['positions']],
        'form': str(problem['form']),
        'tolerances': tolerances,
        'summary': summary.as_dict(),
        'residual_norm': residual_norm,
        'detJ2': None if report is None else report.detJ2,
        'zero_column_residual': None if report is None else report.zero_column_residual,
        'verdict': str(verdict if report is None else report.verdict),
        'pivot_rows': [] if report is None else list(report.pivot_rows),
    }).data


def render(data) -> str:
    return JSONRenderer().render(data, renderer_context={'indent': 2}).decode('utf-8')
