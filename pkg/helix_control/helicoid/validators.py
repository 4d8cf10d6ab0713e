import math

from rest_framework import serializers

from .conf import run_defaults


class GeometryValidators:
    """Field validators shared by the serializers"""

    @staticmethod
    def validate_finite(value):
        if not math.isfinite(value):
            raise serializers.ValidationError(f"Expected a finite number, got {value}")
        return value

    @staticmethod
    def validate_kappa(value):
        if value not in (-1, 0, 1):
            raise serializers.ValidationError(f"kappa must be -1, 0 or 1, got {value}")
        return value

    @staticmethod
    def validate_tolerance(value):
        if not (math.isfinite(value) and value > 0):
            raise serializers.ValidationError(f"Tolerance must be a positive number, got {value}")
        return value

    @staticmethod
    def validate_vector(values):
        bad = [v for v in values if not math.isfinite(v)]
        if bad:
            raise serializers.ValidationError(f"Vector has non-finite entries: {bad}")
        return values

    @staticmethod
    def validate_grid(value):
        """'SxT' with both counts at least 2"""
        parts = str(value).lower().split('x')
        try:
            counts = tuple(int(p) for p in parts)
        except ValueError:
            raise serializers.ValidationError(f"Grid must look like 64x64, got {value!r}")
        if len(counts) != 2:
            raise serializers.ValidationError(f"Grid must look like 64x64, got {value!r}")
        if min(counts) < 2:
            raise serializers.ValidationError(f"Grid counts must be at least 2, got {value!r}")
        return value


def parse_grid(value=None):
    value = run_defaults()['grid'] if value is None else value
    GeometryValidators.validate_grid(value)
    s_count, t_count = (int(p) for p in str(value).lower().split('x'))
    return s_count, t_count
