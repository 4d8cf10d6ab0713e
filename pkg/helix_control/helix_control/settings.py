from decouple import config
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config('SECRET_KEY', default='helix-control-local-key-not-for-deployment')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # Third-party apps
    'rest_framework',

    # Local apps
    'helicoid',
]

# No persistence: everything is computed in-process and written to files.
DATABASES = {}

USE_TZ = True


# Logging
HELIX_LOG_LEVEL = config('HELIX_LOG_LEVEL', default='WARNING').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        # stderr only, stdout is reserved for JSON results
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'helicoid': {
            'handlers': ['console'],
            'level': HELIX_LOG_LEVEL,
            'propagate': False,
        },
    },
}


# Numerical tolerances (configurable)
HELIX_TOLERANCES = {
    'validate': 1e-9,   # invariant checks on points, vectors, isometries
    'exact': 1e-12,     # closed-form identities
    'equality': 1e-7,   # canonical-coordinate comparison of geodesics
    'rank': 1e-8,       # singular value threshold for substantiality
    'hopf': 1e-6,       # constancy of a Phi factor
}

# cosh/sinh are rejected beyond this arclength in hyperbolic space
HELIX_HYPERBOLIC_LIMIT = 700.0

# Defaults for management commands, overridden by --config and flags
HELIX_RUN_DEFAULTS = {
    'alpha': 1.0,
    'kappa': 0,
    'tol': 1e-7,
    'seed': 0,
    'samples': 128,
    'grid': '64x64',
    's_extent': 1.0,
}

# Planner solver budgets
HELIX_SOLVER = {
    'bracket_samples': 256,
    'bisect_xtol': 1e-12,
    'max_iterations': 200,
    'seeds': 8,
}

# Report right-hopf families with the constant factor negated
HELIX_HOPF_RIGHT_REVERSED = config('HELIX_HOPF_RIGHT_REVERSED', default=False, cast=bool)
