import io

from ...mesh import sweep_mesh, write_obj
from ...serializers import HelicoidalPieceSerializer
from ..base import CommandResult, GeometryCommand


class Command(GeometryCommand):
    help = 'Sample the helicoid swept by a piece and write it as a Wavefront mesh'

    command_name = 'sweep'

    def add_command_arguments(self, parser):
        parser.add_argument('input', nargs='?', default='-', help='HelicoidalPiece JSON; - reads stdin')
        parser.add_argument('--s-extent', dest='s_extent', type=float, help='Rays are sampled on [-S, S]')

    def config_overrides(self, options):
        return {'s_extent': options.get('s_extent')}

    def run(self, config, options):
        piece = self.load(HelicoidalPieceSerializer, self.read_json(options['input']))
        mesh = sweep_mesh(piece, config.grid, config.s_extent)
        text = io.StringIO()
        s_count, t_count = config.grid
        write_obj(mesh, text, comment=f"helicoid alpha={piece.alpha!r} duration={piece.duration!r} grid={s_count}x{t_count}")
        return CommandResult(text.getvalue())
