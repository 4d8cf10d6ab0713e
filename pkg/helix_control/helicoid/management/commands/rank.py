import math

from ...admissible import substantial_rank
from ..base import CommandResult, GeometryCommand, float_list, map_ordered

DEFAULT_ALPHAS = (-3.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0, 3.0)


def alpha_grid(kappa, alphas=None):
    """The requested alphas plus the critical values +-sqrt(kappa) when real"""
    values = set(DEFAULT_ALPHAS if alphas is None else alphas)
    if kappa >= 0:
        values.update({math.sqrt(kappa), -math.sqrt(kappa)})
    return sorted(values)


class Command(GeometryCommand):
    help = 'Rank of the fiber vectors over an alpha grid; rank 4 means controllable'

    command_name = 'rank'

    def add_command_arguments(self, parser):
        parser.add_argument('--alphas', type=float_list, help='Comma-separated alphas (critical values are added)')

    def config_overrides(self, options):
        return {'alphas': options.get('alphas')}

    def run(self, config, options):
        grid = alpha_grid(config.kappa, config.alphas)

        def row(alpha):
            rank = substantial_rank(config.kappa, alpha, config.samples, config.seed)
            return {
                'alpha': alpha,
                'rank': rank,
                'controllable': rank == 4,
                'critical': alpha * alpha == config.kappa,
            }

        rows = map_ordered(row, grid, config.parallel)
        return CommandResult({
            'kappa': config.kappa,
            'samples': config.samples,
            'seed': config.seed,
            'ranks': rows,
            'uncontrollable': [r['alpha'] for r in rows if not r['controllable']],
        })
