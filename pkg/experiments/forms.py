from core.exceptions import ValidationError

ENERGY_SOURCES = ('obc', 'band')

OVERRIDE_TYPES = {
    'K': int,
    'N': int,
    't3': float,
    'x_min': float,
    'x_max': float,
    'y_min': float,
    'y_max': float,
    'resolution': int,
    'conjugate_tol': float,
    'ep_threshold': float,
    'cycle_tol': float,
    'circular_tol': float,
    'gap_threshold': float,
    'sublattice': int,
    'energies': str,
}

POSITIVE_KEYS = ('K', 'N', 'resolution', 'sublattice')


def clean_override(key, value):
    '''
    Convert a single --set value to its declared type.

    Raises:
        ValidationError: For unknown keys or values of the wrong type
    '''
    if key not in OVERRIDE_TYPES:
        known = ', '.join(sorted(OVERRIDE_TYPES))
        raise ValidationError(f'unknown key {key!r} (known: {known})', field='--set')
    try:
        cleaned = OVERRIDE_TYPES[key](value)
    except ValueError:
        raise ValidationError(
            f'{key} expects {OVERRIDE_TYPES[key].__name__}, got {value!r}', field='--set'
        ) from None
    if key in POSITIVE_KEYS and cleaned < 1:
        raise ValidationError(f'{key} must be positive', field='--set')
    if key == 'energies' and cleaned not in ENERGY_SOURCES:
        raise ValidationError(f'energies must be one of {ENERGY_SOURCES}', field='--set')
    return cleaned


def parse_overrides(pairs):
    '''
    Parse repeated key=value options into a typed mapping.

    Example:
        >>> parse_overrides(['K=1024', 't3=0.75'])
        {'K': 1024, 't3': 0.75}
    '''
    overrides = {}
    for pair in pairs:
        key, separator, value = pair.partition('=')
        if not separator or not key.strip():
            raise ValidationError(f'expected key=value, got {pair!r}', field='--set')
        overrides[key.strip()] = clean_override(key.strip(), value.strip())
    return overrides
