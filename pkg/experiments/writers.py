'''
Deterministic CSV and JSON output.

Floats are rounded to settings.SIGNIFICANT_DIGITS and written in their
shortest round-trip form so repeated runs give byte-identical files.
'''

import csv
import json
import logging
import math

import numpy as np

from core import settings

logger = logging.getLogger(__name__)


def round_significant(value, digits=None):
    '''
    Round a float to the given number of significant digits.

    Example:
        >>> round_significant(0.1 + 0.2)
        0.3
        >>> round_significant(-0.0)
        0.0
    '''
    digits = settings.SIGNIFICANT_DIGITS if digits is None else digits
    value = float(value)
    if not math.isfinite(value):
        return value
    rounded = float(f'{value:.{digits}g}')
    return rounded + 0.0


def format_value(value):
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(round_significant(value))
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = round_significant(value)
        return value if math.isfinite(value) else None
    return value


def write_csv(path, header, rows):
    '''Write rows under a header, formatting every cell with format_value.'''
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])
    logger.info('Wrote %s', path)
    return path


def write_json(path, payload):
    '''Write payload with sorted keys; NaN and infinities become null.'''
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2)
    path.write_text(text + '\n', encoding='utf-8')
    logger.info('Wrote %s', path)
    return path
