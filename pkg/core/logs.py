import logging
import logging.config
from copy import deepcopy

from core import settings


def configure_logging(level=None):
    '''
    Install the project LOGGING configuration.

    Args:
        level: Optional level name overriding settings.LOG_LEVEL

    Note:
        Only entry points call this; library modules just create
        module-level loggers.
    '''
    config = deepcopy(settings.LOGGING)
    if level:
        config['root']['level'] = level.upper()
    logging.config.dictConfig(config)
