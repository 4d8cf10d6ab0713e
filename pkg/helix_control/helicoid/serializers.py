"""JSON input and output for the kernel objects.

Input serializers build the kernel object in to_internal_value, so after
is_valid() the serializer's validated_data *is* the OrientedGeodesic, Plan,
... and any GeometryError raised while building it comes back as a
ValidationError keyed by its error code.
"""
import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple, Union

from rest_framework import serializers
from rest_framework.utils.encoders import JSONEncoder

from .admissible import JacobiData, ScrewParams, StandardRuling
from .conf import run_defaults, tolerance
from .exceptions import GeometryError
from .lines import HelicoidalFrame, OrientedGeodesic
from .planner import PLAN_SCHEMA_VERSION, HelicoidalPiece, Plan, ScrewPiece
from .quatsphere import SphereCirclePoint
from .spaceform import Curvature, Isometry, SpacePoint, TangentVector
from .validators import GeometryValidators, parse_grid

COMMANDS = ('plan', 'plan-screw', 'check-admissible', 'classify-sphere', 'rank', 'sweep', 'residual-2piece')


def render_json(data):
    """Sorted keys and shortest round-trip floats, so equal inputs give equal bytes"""
    return json.dumps(data, cls=JSONEncoder, sort_keys=True, indent=2, allow_nan=False) + '\n'


def _floats(values):
    return [float(v) for v in values]


def vector_field(size, **kwargs):
    return serializers.ListField(
        child=serializers.FloatField(),
        min_length=size,
        max_length=size,
        validators=[GeometryValidators.validate_vector],
        **kwargs,
    )


def finite_field(**kwargs):
    return serializers.FloatField(validators=[GeometryValidators.validate_finite], **kwargs)


class KernelSerializer(serializers.Serializer):
    """Base for serializers whose internal value is a kernel object"""

    def build(self, attrs):
        raise NotImplementedError

    def to_internal_value(self, data):
        attrs = super().to_internal_value(data)
        try:
            return self.build(attrs)
        except GeometryError as exc:
            raise serializers.ValidationError({exc.code: [str(exc.detail)]})


class OrientedGeodesicSerializer(KernelSerializer):
    kappa = serializers.IntegerField(
        validators=[GeometryValidators.validate_kappa],
        help_text="Curvature of the space form: -1, 0 or 1",
    )
    base = vector_field(4, help_text="Base point in embedded coordinates (x0, x1, x2, x3)")
    dir = vector_field(4, help_text="Unit tangent at the base point, embedded coordinates")

    def build(self, attrs):
        base = SpacePoint(attrs['kappa'], attrs['base'])
        return OrientedGeodesic(base, TangentVector(base, attrs['dir']))

    def to_representation(self, instance):
        return {
            'kappa': int(instance.kappa),
            'base': _floats(instance.base.coords),
            'dir': _floats(instance.direction.vec),
        }


class GeodesicPairSerializer(KernelSerializer):
    source = OrientedGeodesicSerializer(help_text="Initial line")
    target = OrientedGeodesicSerializer(help_text="Final line")

    def build(self, attrs):
        source, target = attrs['source'], attrs['target']
        if source.kappa != target.kappa:
            raise serializers.ValidationError({'target': ["target lives in a different space form than source"]})
        return source, target

    def to_representation(self, instance):
        source, target = instance
        geodesic = OrientedGeodesicSerializer()
        return {'source': geodesic.to_representation(source), 'target': geodesic.to_representation(target)}


class SphereCirclePointSerializer(KernelSerializer):
    x = vector_field(3, help_text="Left factor, a unit imaginary quaternion (i, j, k parts)")
    y = vector_field(3, help_text="Right factor, a unit imaginary quaternion (i, j, k parts)")

    def build(self, attrs):
        return SphereCirclePoint(attrs['x'], attrs['y'])

    def to_representation(self, instance):
        return {'x': _floats(instance.x), 'y': _floats(instance.y)}


class HelicoidalFrameSerializer(KernelSerializer):
    line = OrientedGeodesicSerializer(help_text="Initial ray of the helicoid")
    point = vector_field(4, help_text="Point of the ray where the axis starts")
    axis = vector_field(4, help_text="Unit axis direction at point, orthogonal to the ray")
    alpha = finite_field(help_text="Angular speed of the rays along the axis")

    def build(self, attrs):
        line = attrs['line']
        point = SpacePoint(line.kappa, attrs['point'])
        return HelicoidalFrame(line, point, TangentVector(point, attrs['axis']), attrs['alpha'])

    def to_representation(self, instance):
        return {
            'line': OrientedGeodesicSerializer().to_representation(instance.line),
            'point': _floats(instance.point.coords),
            'axis': _floats(instance.axis.vec),
            'alpha': instance.alpha,
        }


class HelicoidalPieceSerializer(KernelSerializer):
    type = serializers.ChoiceField(choices=['helicoidal'], default='helicoidal')
    frame = HelicoidalFrameSerializer(help_text="Frame of the helicoidal motion")
    duration = finite_field(help_text="Time the piece runs for (negative runs backwards)")

    def build(self, attrs):
        return HelicoidalPiece(attrs['frame'], attrs['duration'])

    def to_representation(self, instance):
        geodesic = OrientedGeodesicSerializer()
        return {
            'type': instance.kind,
            'frame': HelicoidalFrameSerializer().to_representation(instance.frame),
            'duration': instance.duration,
            'end': geodesic.to_representation(instance.end()),
        }


class ScrewParamsSerializer(KernelSerializer):
    theta = finite_field(help_text="Angular speed of the screw")
    lam = finite_field(help_text="Translation speed along the screw axis")
    rho = finite_field(help_text="Distance from the line to the screw axis")
    eta = finite_field(help_text="Angle between the line and the axis, in [0, pi]")
    frame = serializers.ListField(
        child=vector_field(4),
        min_length=4,
        max_length=4,
        help_text="4x4 Euclidean motion placing the z-axis screw in space (rows)",
    )

    def build(self, attrs):
        return ScrewParams(
            theta=attrs['theta'],
            lam=attrs['lam'],
            rho=attrs['rho'],
            eta=attrs['eta'],
            frame=Isometry(Curvature.FLAT, attrs['frame']),
        )

    def to_representation(self, instance):
        return {
            'theta': instance.theta,
            'lam': instance.lam,
            'rho': instance.rho,
            'eta': instance.eta,
            'frame': [_floats(row) for row in instance.frame.mat],
        }


class ScrewPieceSerializer(KernelSerializer):
    type = serializers.ChoiceField(choices=['screw'])
    params = ScrewParamsSerializer()
    start = OrientedGeodesicSerializer(help_text="Line the screw starts from")
    duration = finite_field()
    alpha = finite_field()

    def build(self, attrs):
        return ScrewPiece(attrs['params'], attrs['start'], attrs['duration'], attrs['alpha'])

    def to_representation(self, instance):
        geodesic = OrientedGeodesicSerializer()
        return {
            'type': instance.kind,
            'params': ScrewParamsSerializer().to_representation(instance.params),
            'start': geodesic.to_representation(instance.start),
            'duration': instance.duration,
            'alpha': instance.alpha,
            'end': geodesic.to_representation(instance.end()),
        }


PIECE_SERIALIZERS = {
    'helicoidal': HelicoidalPieceSerializer,
    'screw': ScrewPieceSerializer,
}


class PieceField(serializers.Field):
    """A helicoidal or screw piece, told apart by its "type" key"""

    default_error_messages = {
        'not_a_dict': 'Expected a piece object, got {input_type}.',
        'unknown_type': 'Unknown piece type {kind!r}; expected one of {choices}.',
    }

    def to_internal_value(self, data):
        if not isinstance(data, dict):
            self.fail('not_a_dict', input_type=type(data).__name__)
        kind = data.get('type', 'helicoidal')
        if kind not in PIECE_SERIALIZERS:
            self.fail('unknown_type', kind=kind, choices=sorted(PIECE_SERIALIZERS))
        return PIECE_SERIALIZERS[kind]().run_validation(data)

    def to_representation(self, value):
        return PIECE_SERIALIZERS[value.kind]().to_representation(value)


class PlanSerializer(KernelSerializer):
    schema_version = serializers.IntegerField(default=PLAN_SCHEMA_VERSION)
    alpha = finite_field()
    source = OrientedGeodesicSerializer()
    target = OrientedGeodesicSerializer()
    pieces = serializers.ListField(child=PieceField(), help_text="Pieces in execution order")
    endpoint_residual = serializers.FloatField(required=False, allow_null=True)

    def validate_schema_version(self, value):
        if value != PLAN_SCHEMA_VERSION:
            raise serializers.ValidationError(f"Unsupported plan schema version {value}")
        return value

    def build(self, attrs):
        alpha = attrs['alpha']
        for index, piece in enumerate(attrs['pieces']):
            if abs(piece.alpha - alpha) > tolerance('exact'):
                raise serializers.ValidationError(
                    {'pieces': [f"piece {index} has alpha {piece.alpha}, plan has {alpha}"]})
        residual = attrs.get('endpoint_residual')
        return Plan(
            alpha=alpha,
            pieces=tuple(attrs['pieces']),
            source=attrs['source'],
            target=attrs['target'],
            endpoint_residual=math.nan if residual is None else residual,
        )

    def to_representation(self, instance):
        geodesic = OrientedGeodesicSerializer()
        piece = PieceField()
        residual = instance.endpoint_residual
        return {
            'schema_version': PLAN_SCHEMA_VERSION,
            'alpha': instance.alpha,
            'source': geodesic.to_representation(instance.source),
            'target': geodesic.to_representation(instance.target),
            'pieces': [piece.to_representation(p) for p in instance.pieces],
            'endpoint_residual': None if math.isnan(residual) else residual,
        }


@dataclass(frozen=True)
class RunConfig:
    command: str
    alpha: float
    kappa: int
    tol: float
    seed: int
    samples: int
    grid: Tuple[int, int]
    out: Optional[str] = None
    s_extent: float = 1.0
    parallel: bool = False
    alphas: Optional[Tuple[float, ...]] = None


class RunConfigSerializer(KernelSerializer):
    command = serializers.ChoiceField(choices=COMMANDS)
    alpha = finite_field(required=False)
    kappa = serializers.IntegerField(required=False, validators=[GeometryValidators.validate_kappa])
    tol = serializers.FloatField(required=False, validators=[GeometryValidators.validate_tolerance])
    seed = serializers.IntegerField(required=False, min_value=0)
    samples = serializers.IntegerField(required=False, min_value=1)
    grid = serializers.CharField(required=False, validators=[GeometryValidators.validate_grid])
    out = serializers.CharField(required=False, allow_null=True, allow_blank=False)
    s_extent = serializers.FloatField(required=False, min_value=0.0)
    parallel = serializers.BooleanField(required=False, default=False)
    alphas = serializers.ListField(
        child=finite_field(), required=False, allow_null=True, allow_empty=False)

    def validate_s_extent(self, value):
        if not (math.isfinite(value) and value > 0):
            raise serializers.ValidationError("s-extent must be a positive number")
        return value

    def build(self, attrs):
        values = run_defaults()
        values.update({k: v for k, v in attrs.items() if v is not None})
        alphas = attrs.get('alphas')
        return RunConfig(
            command=values['command'],
            alpha=float(values['alpha']),
            kappa=int(values['kappa']),
            tol=float(values['tol']),
            seed=int(values['seed']),
            samples=int(values['samples']),
            grid=parse_grid(values['grid']),
            out=values.get('out'),
            s_extent=float(values['s_extent']),
            parallel=bool(values.get('parallel', False)),
            alphas=None if alphas is None else tuple(alphas),
        )

    def to_representation(self, instance):
        return {
            'command': instance.command,
            'alpha': instance.alpha,
            'kappa': instance.kappa,
            'tol': instance.tol,
            'seed': instance.seed,
            'samples': instance.samples,
            'grid': '{}x{}'.format(*instance.grid),
            'out': instance.out,
            's_extent': instance.s_extent,
            'parallel': instance.parallel,
            'alphas': None if instance.alphas is None else list(instance.alphas),
        }


class AdmissibilityCheck(NamedTuple):
    kind: str
    alpha: float
    data: Union[StandardRuling, JacobiData, ScrewParams, float]


class AdmissibilityCheckSerializer(KernelSerializer):
    """One admissibility question: which test, the alpha, and that test's data"""

    REQUIRED = {
        'ruled': ('beta_dot', 'ruling', 'ruling_dot'),
        'jacobi': ('kappa', 'point', 'direction', 'u', 'v'),
        'screw': ('params',),
        'circular': ('r',),
    }

    kind = serializers.ChoiceField(choices=list(REQUIRED))
    alpha = finite_field()
    beta_dot = vector_field(3, required=False, help_text="beta'(0) of a standard ruled surface")
    ruling = vector_field(3, required=False, help_text="Unit ruling direction V(0)")
    ruling_dot = vector_field(3, required=False, help_text="V'(0)")
    kappa = serializers.IntegerField(required=False, validators=[GeometryValidators.validate_kappa])
    point = vector_field(4, required=False, help_text="sigma(0) of the reference geodesic")
    direction = vector_field(4, required=False, help_text="sigma'(0), unit")
    u = vector_field(4, required=False, help_text="J(0) component orthogonal to sigma'(0)")
    v = vector_field(4, required=False, help_text="J'(0) component orthogonal to sigma'(0)")
    a = finite_field(required=False, default=0.0)
    b = finite_field(required=False, default=0.0)
    params = ScrewParamsSerializer(required=False)
    r = finite_field(required=False, help_text="Radius of the circular helicoid's striction circle")

    def build(self, attrs):
        kind = attrs['kind']
        missing = [name for name in self.REQUIRED[kind] if name not in attrs]
        if missing:
            raise serializers.ValidationError(
                {name: [f"This field is required when kind is {kind!r}."] for name in missing})
        if kind == 'ruled':
            data = StandardRuling(attrs['beta_dot'], attrs['ruling'], attrs['ruling_dot'])
        elif kind == 'jacobi':
            point = SpacePoint(attrs['kappa'], attrs['point'])
            data = JacobiData(
                point=point,
                direction=TangentVector(point, attrs['direction']),
                u=TangentVector(point, attrs['u']),
                v=TangentVector(point, attrs['v']),
                a=attrs['a'],
                b=attrs['b'],
            )
        elif kind == 'screw':
            data = attrs['params']
        else:
            data = attrs['r']
        return AdmissibilityCheck(kind, attrs['alpha'], data)


class HopfClassificationSerializer(serializers.Serializer):
    kind = serializers.SerializerMethodField()
    left = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    right = serializers.ListField(child=serializers.FloatField(), allow_null=True)

    def get_kind(self, obj):
        return obj.kind.value
