'''Backports of standard-library names missing on older interpreters.'''
import sys

if sys.version_info >= (3, 11):
    from enum import StrEnum
else:
    from enum import Enum

    class StrEnum(str, Enum):
        '''Python 3.10 stand-in matching ``enum.StrEnum`` from 3.11.'''

        __str__ = str.__str__
        __format__ = str.__format__

        @staticmethod
        def _generate_next_value_(name, start, count, last_values):
            return name.lower()

__all__ = ['StrEnum']
