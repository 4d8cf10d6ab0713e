from ...quatsphere import hopf_classify, phi_inverse, phi_map
from ...serializers import HopfClassificationSerializer, OrientedGeodesicSerializer, SphereCirclePointSerializer
from ..base import CommandResult, GeometryCommand


class Command(GeometryCommand):
    help = 'Decide whether a family of great circles of S^3 lies in one Hopf fibration'

    command_name = 'classify-sphere'

    def add_command_arguments(self, parser):
        parser.add_argument('input', nargs='?', default='-', help='JSON list of kappa=1 geodesics; - reads stdin')
        parser.add_argument('--threshold', type=float, help='Largest spread of a constant factor (default 1e-6)')
        parser.add_argument('--images', action='store_true',
                            help='Input is a list of Phi images {"x": [...], "y": [...]} instead of geodesics')

    def run(self, config, options):
        data = self.read_json(options['input'])
        if options.get('images'):
            points = self.load(SphereCirclePointSerializer, data, many=True)
            circles = [phi_inverse(point.x, point.y) for point in points]
        else:
            circles = self.load(OrientedGeodesicSerializer, data, many=True)
        classification = hopf_classify(circles, options.get('threshold'))
        payload = dict(HopfClassificationSerializer(classification).data)
        payload['count'] = len(circles)
        payload['images'] = SphereCirclePointSerializer([phi_map(c) for c in circles], many=True).data
        return CommandResult(payload)
