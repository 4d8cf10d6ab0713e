"""Shared plumbing for the helicoid management commands.

Every command resolves a RunConfig from settings defaults, an optional
``--config`` JSON file and explicit flags (in that order), runs, and writes
sorted-key JSON to stdout or ``--out``. Errors map to exit codes:

    1  invalid input (bad JSON, failed validation, unsupported curvature)
    2  planner or solver failure, or a residual above tolerance
"""
import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Any, NamedTuple

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from ..exceptions import BrokenPlan, GeometryError, PlannerFailure
from ..serializers import GeodesicPairSerializer, PlanSerializer, RunConfigSerializer, render_json

logger = logging.getLogger(__name__)

INVALID_INPUT = 1
SOLVER_FAILURE = 2


class CommandResult(NamedTuple):
    payload: Any
    ok: bool = True
    message: str = ''


def float_list(value):
    """'0.5,1,2' -> [0.5, 1.0, 2.0]"""
    try:
        return [float(part) for part in value.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}")


def flatten_errors(detail, prefix=''):
    """ValidationError detail -> 'field.sub: message' lines"""
    if isinstance(detail, dict):
        lines = []
        for key, value in detail.items():
            name = key if key != 'non_field_errors' else ''
            lines += flatten_errors(value, f"{prefix}.{name}".strip('.') if name else prefix)
        return lines
    if isinstance(detail, list):
        lines = []
        for index, value in enumerate(detail):
            if isinstance(value, (dict, list)):
                lines += flatten_errors(value, f"{prefix}[{index}]")
            else:
                lines.append(f"{prefix}: {value}" if prefix else str(value))
        return lines
    return [f"{prefix}: {detail}" if prefix else str(detail)]


def map_ordered(func, items, parallel):
    """map() that may use a thread pool; the result order never changes"""
    items = list(items)
    if not parallel or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor() as pool:
        return list(pool.map(func, items))


class GeometryCommand(BaseCommand):
    """Base class: config resolution, JSON input, error mapping, JSON output"""

    command_name = None
    stealth_options = ('stdin',)

    def add_arguments(self, parser):
        parser.add_argument('--config', help='JSON file with RunConfig fields; flags override it')
        parser.add_argument('--alpha', type=float, help='Angular speed of the helicoidal family')
        parser.add_argument('--kappa', type=int, help='Curvature: -1, 0 or 1')
        parser.add_argument('--tol', type=float, help='Tolerance for success (default 1e-7)')
        parser.add_argument('--seed', type=int, help='Seed for sampling (default 0)')
        parser.add_argument('--samples', type=int, help='Number of random samples (default 128)')
        parser.add_argument('--grid', help='Grid as SxT (default 64x64)')
        parser.add_argument('--out', help='Write the result here instead of stdout')
        parser.add_argument(
            '--parallel', action='store_true', default=None,
            help='Spread independent samples over a thread pool (same output as serial)',
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def config_overrides(self, options):
        return {}

    def run(self, config, options):
        raise NotImplementedError

    def handle(self, *args, **options):
        self.stdin = options.get('stdin') or sys.stdin
        try:
            config = self.load_config(options)
            logger.info('%s config: %s', self.command_name, RunConfigSerializer(config).data)
            result = self.run(config, options)
        except serializers.ValidationError as exc:
            raise CommandError('\n'.join(flatten_errors(exc.detail)), returncode=INVALID_INPUT)
        except json.JSONDecodeError as exc:
            raise CommandError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}",
                               returncode=INVALID_INPUT)
        except (PlannerFailure, BrokenPlan) as exc:
            logger.warning('%s failed: %s %s', self.command_name, exc, getattr(exc, 'diagnostics', ''))
            raise CommandError(str(exc), returncode=SOLVER_FAILURE)
        except GeometryError as exc:
            raise CommandError(f"{exc.code}: {exc}", returncode=INVALID_INPUT)
        except OSError as exc:
            raise CommandError(str(exc), returncode=INVALID_INPUT)

        self.emit(result.payload, config)
        if not result.ok:
            raise CommandError(result.message, returncode=SOLVER_FAILURE)

    def load_config(self, options):
        values = {}
        if options.get('config'):
            with open(options['config']) as handle:
                values = json.load(handle)
            if not isinstance(values, dict):
                raise serializers.ValidationError({'config': ['Config file must hold a JSON object.']})
        flags = {
            name: options.get(name)
            for name in ('alpha', 'kappa', 'tol', 'seed', 'samples', 'grid', 'out', 'parallel')
        }
        flags.update(self.config_overrides(options))
        values.update({name: value for name, value in flags.items() if value is not None})
        values['command'] = self.command_name
        serializer = RunConfigSerializer(data=values)
        serializer.is_valid(raise_exception=True)
        return serializer.validated_data

    def read_json(self, path):
        if path == '-':
            return json.loads(self.stdin.read())
        with open(path) as handle:
            return json.load(handle)

    def load(self, serializer_class, data, many=False):
        serializer = serializer_class(data=data, many=many)
        serializer.is_valid(raise_exception=True)
        return serializer.validated_data

    def emit(self, payload, config):
        text = payload if isinstance(payload, str) else render_json(payload)
        if config.out:
            with open(config.out, 'w') as handle:
                handle.write(text)
            logger.info('wrote %s', config.out)
        else:
            self.stdout.write(text, ending='')


class PlanningCommand(GeometryCommand):
    """Plan one pair, or a JSON list of pairs, with the class's planner"""

    planner = None

    def add_command_arguments(self, parser):
        parser.add_argument(
            'input', nargs='?', default='-',
            help='JSON {"source": ..., "target": ...} or a list of them; - reads stdin',
        )

    def run(self, config, options):
        document = self.read_json(options['input'])
        batch = isinstance(document, list)
        pairs = self.load(GeodesicPairSerializer, document, many=batch)
        if not batch:
            plan = type(self).planner(*pairs, config.alpha, config.tol)
            return CommandResult(PlanSerializer(plan).data)

        def attempt(pair):
            try:
                return PlanSerializer(type(self).planner(*pair, config.alpha, config.tol)).data
            except (PlannerFailure, BrokenPlan) as exc:
                logger.warning('pair failed: %s %s', exc, getattr(exc, 'diagnostics', ''))
                return {'error': exc.code, 'detail': str(exc)}

        results = map_ordered(attempt, pairs, config.parallel)
        failures = sum('error' in result for result in results)
        return CommandResult(
            results,
            ok=failures == 0,
            message=f"{failures} of {len(results)} pairs could not be planned",
        )
