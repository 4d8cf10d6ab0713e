"""Errors raised by the geometry kernel and the planners."""


class GeometryError(Exception):
    """Base error, shaped like rest_framework's APIException"""

    default_detail = 'Geometry error.'
    default_code = 'geometry_error'

    def __init__(self, detail=None, code=None):
        self.detail = detail if detail is not None else self.default_detail
        self.code = code if code is not None else self.default_code
        super().__init__(self.detail)

    def __str__(self):
        return str(self.detail)


class InvalidInput(GeometryError):
    default_detail = 'Invalid input.'
    default_code = 'invalid_input'


class NonStandardRuling(InvalidInput):
    default_detail = (
        'Ruled data is not standard at t=0: beta\' must be orthogonal to V\'. '
        'Run standardize_ruled on the surface first.'
    )
    default_code = 'non_standard_ruling'


class CylindricalRuling(InvalidInput):
    default_detail = 'V\' vanishes at the requested parameter; the surface is cylindrical there.'
    default_code = 'cylindrical_ruling'


class SingularCotangent(InvalidInput):
    default_detail = 'eta is 0 or pi while rho*theta is nonzero; cot(eta) is undefined.'
    default_code = 'singular_cotangent'


class UncontrollableAlpha(InvalidInput):
    default_detail = 'For alpha = 0 only parallel lines with the same direction are reachable.'
    default_code = 'uncontrollable_alpha'


class Unsupported(GeometryError):
    default_detail = 'Operation is not supported for this curvature.'
    default_code = 'unsupported'


class PlannerFailure(GeometryError):
    default_detail = 'Planner failed to find a solution.'
    default_code = 'planner_failure'

    def __init__(self, detail=None, code=None, diagnostics=None):
        super().__init__(detail, code)
        self.diagnostics = diagnostics or {}


class BrokenPlan(GeometryError):
    default_detail = 'Consecutive plan pieces do not chain.'
    default_code = 'broken_plan'
