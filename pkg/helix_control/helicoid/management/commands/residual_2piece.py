from ...lines import euclidean_line
from ...planner import ResidualGrid, two_piece_residual
from ...serializers import OrientedGeodesicSerializer
from ..base import CommandResult, GeometryCommand, float_list, map_ordered


class Command(GeometryCommand):
    help = 'Grid lower bound on how close two helicoidal pieces get from a line to its reverse'

    command_name = 'residual-2piece'

    def add_command_arguments(self, parser):
        parser.add_argument('input', nargs='?', help='Line JSON (default: the x-axis); - reads stdin')
        parser.add_argument('--alphas', type=float_list, help='Comma-separated alphas instead of --alpha')
        parser.add_argument('--per-axis', dest='per_axis', type=int, default=10, help='Samples per search axis')
        parser.add_argument('--refine', type=int, default=1, help='Multiply the samples per axis by this factor')

    def config_overrides(self, options):
        return {'alphas': options.get('alphas')}

    def run(self, config, options):
        if options['input']:
            line = self.load(OrientedGeodesicSerializer, self.read_json(options['input']))
        else:
            line = euclidean_line([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])
        count = max(options['per_axis'], 2) * max(options['refine'], 1)
        grid = ResidualGrid(count, count, count, count)
        alphas = config.alphas or (config.alpha,)

        def row(alpha):
            return {'alpha': alpha, 'residual': two_piece_residual(line, alpha, grid)}

        return CommandResult({
            'line': OrientedGeodesicSerializer(line).data,
            'grid': list(grid),
            'results': map_ordered(row, alphas, config.parallel),
        })
