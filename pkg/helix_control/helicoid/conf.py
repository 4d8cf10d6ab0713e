"""Settings lookups with built-in fallbacks."""
from django.conf import settings

DEFAULT_TOLERANCES = {
    'validate': 1e-9,
    'exact': 1e-12,
    'equality': 1e-7,
    'rank': 1e-8,
    'hopf': 1e-6,
}

DEFAULT_SOLVER = {
    'bracket_samples': 256,
    'bisect_xtol': 1e-12,
    'max_iterations': 200,
    'seeds': 8,
}

DEFAULT_RUN = {
    'alpha': 1.0,
    'kappa': 0,
    'tol': 1e-7,
    'seed': 0,
    'samples': 128,
    'grid': '64x64',
    's_extent': 1.0,
}


def setting(name, default):
    """getattr on django settings that also works before settings are configured"""
    if not settings.configured:
        return default
    return getattr(settings, name, default)


def tolerance(name):
    tolerances = setting('HELIX_TOLERANCES', DEFAULT_TOLERANCES)
    return tolerances.get(name, DEFAULT_TOLERANCES[name])


def solver_option(name):
    options = setting('HELIX_SOLVER', DEFAULT_SOLVER)
    return options.get(name, DEFAULT_SOLVER[name])


def run_defaults():
    defaults = dict(DEFAULT_RUN)
    defaults.update(setting('HELIX_RUN_DEFAULTS', {}))
    return defaults


def hyperbolic_limit():
    return setting('HELIX_HYPERBOLIC_LIMIT', 700.0)


def hopf_right_reversed():
    return setting('HELIX_HOPF_RIGHT_REVERSED', False)
