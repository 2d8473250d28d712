"""
Settings for the nonrecip project.

Values are read from the environment (or a ``.env`` file next to the
working directory) through python-decouple, so every tolerance used by the
numerical apps can be tuned without touching code.
"""

import os
from pathlib import Path

from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Parallelism

THREADS = config('NONRECIP_THREADS', default=os.cpu_count() or 1, cast=int)


# Numerical tolerances
# Relative tolerances are scaled by max(1, spectral radius) where noted.

EP_THRESHOLD = config('NONRECIP_EP_THRESHOLD', default=1e-8, cast=float)

CONJUGATE_TOL = config('NONRECIP_CONJUGATE_TOL', default=1e-9, cast=float)

CYCLE_TOL = config('NONRECIP_CYCLE_TOL', default=1e-9, cast=float)

CIRCULAR_TOL = config('NONRECIP_CIRCULAR_TOL', default=1e-6, cast=float)

PAIRING_TOL = config('NONRECIP_PAIRING_TOL', default=1e-8, cast=float)

SYMMETRY_TOL = config('NONRECIP_SYMMETRY_TOL', default=1e-10, cast=float)

# Discrete levels: multiple of the bulk scatter of a band, and an absolute floor
GAP_FACTOR = config('NONRECIP_GAP_FACTOR', default=5.0, cast=float)

GAP_FLOOR = config('NONRECIP_GAP_FLOOR', default=1e-6, cast=float)


# Band tracking on the generalized Brillouin zone

ZAK_SAMPLES = config('NONRECIP_ZAK_SAMPLES', default=512, cast=int)

ZAK_MAX_SAMPLES = config('NONRECIP_ZAK_MAX_SAMPLES', default=4096, cast=int)

# Largest phase increment accepted between neighbouring samples
MAX_PHASE_STEP = config('NONRECIP_MAX_PHASE_STEP', default=1.5707963267948966, cast=float)

# Minimum normalised overlap between neighbouring samples of one band
MIN_OVERLAP = config('NONRECIP_MIN_OVERLAP', default=0.5, cast=float)


# Output files

SIGNIFICANT_DIGITS = config('NONRECIP_SIGNIFICANT_DIGITS', default=12, cast=int)


# Logging
# Applied by core.logs.configure_logging(); library modules only create loggers.

LOG_LEVEL = config('NONRECIP_LOG_LEVEL', default='WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'rich': {
            'format': '%(name)s: %(message)s',
            'datefmt': '[%X]',
        },
    },
    'handlers': {
        'console': {
            'class': 'rich.logging.RichHandler',
            'formatter': 'rich',
            'rich_tracebacks': True,
            'show_path': False,
        },
    },
    'root': {
        'handlers': ['console'],
        'level': LOG_LEVEL,
    },
}
