from ...admissible import circular_helicoid_check, jacobi_residuals, ruled_residuals, screw_residuals
from ...serializers import AdmissibilityCheckSerializer
from ..base import CommandResult, GeometryCommand


def evaluate(check, tol):
    if check.kind == 'circular':
        report = circular_helicoid_check(check.data, check.alpha)
        return {
            'kind': check.kind,
            'alpha': check.alpha,
            'admissible': report.admissible,
            'speed': report.speed,
            'required_speed': abs(check.alpha),
        }
    if check.kind == 'ruled':
        residuals = ruled_residuals(*check.data, check.alpha)
    elif check.kind == 'jacobi':
        residuals = jacobi_residuals(check.data, check.alpha)
    else:
        residuals = screw_residuals(check.data, check.alpha)
    return {
        'kind': check.kind,
        'alpha': check.alpha,
        'admissible': max(residuals) <= tol,
        'residuals': list(residuals),
    }


class Command(GeometryCommand):
    help = 'Test ruled, Jacobi, screw or circular-helicoid data for alpha-admissibility'

    command_name = 'check-admissible'

    def add_command_arguments(self, parser):
        parser.add_argument('input', nargs='?', default='-', help='Check JSON (or a list of them); - reads stdin')

    def run(self, config, options):
        document = self.read_json(options['input'])
        batch = isinstance(document, list)
        checks = self.load(AdmissibilityCheckSerializer, document, many=batch)
        if not batch:
            return CommandResult(evaluate(checks, config.tol))
        return CommandResult([evaluate(check, config.tol) for check in checks])
