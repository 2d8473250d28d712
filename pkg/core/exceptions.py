'''
Error hierarchy shared by every app.

Each exception class carries the process exit code the command line maps it
to, so callers never need a separate lookup table.
'''


class NonrecipError(Exception):
    '''Base class for all errors raised by the project.'''

    exit_code = 1


class GaugeViolationError(NonrecipError):
    '''
    Path-independence of hopping ratios fails.

    Attributes:
        report: The GaugeReport that detected the violation, when available
    '''

    exit_code = 2

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DegenerateError(NonrecipError):
    '''A hop amplitude is zero or the input sits on an exceptional point.'''

    exit_code = 3


class PTBrokenError(NonrecipError):
    '''Some t_L·t_R product is not positive, so no Hermitian counterpart exists.'''

    exit_code = 3


class SymmetryAbsentError(NonrecipError):
    exit_code = 3


class NotSeparableError(NonrecipError):
    exit_code = 3


class UnsupportedModelError(NonrecipError):
    '''The operation is defined only for a narrower class of models.'''

    exit_code = 3


class ValidationError(NonrecipError):
    '''
    Invalid input: schema errors, out-of-range parameters, bad overrides.

    Mirrors form validation: errors are collected per field and can be
    inspected after the fact.

    Attributes:
        error_dict: Mapping field name -> list of messages

    Example:
        >>> error = ValidationError({'tR': ['expected 3 entries, got 2']})
        >>> error.messages
        ['tR: expected 3 entries, got 2']
    '''

    exit_code = 4

    def __init__(self, errors, field=None):
        if isinstance(errors, dict):
            self.error_dict = {key: list(value) for key, value in errors.items()}
        else:
            self.error_dict = {field or '__all__': [str(errors)]}
        super().__init__('; '.join(self.messages))

    @property
    def messages(self):
        messages = []
        for field, field_messages in self.error_dict.items():
            for message in field_messages:
                if field == '__all__':
                    messages.append(message)
                else:
                    messages.append(f'{field}: {message}')
        return messages


class NumericalError(NonrecipError):
    '''Base class for failures of a numerical procedure.'''

    exit_code = 5


class NearExceptionalPointError(NumericalError):
    '''
    Eigenvectors are close to coalescing.

    Attributes:
        condition_estimate: Reciprocal condition number that tripped the check
    '''

    def __init__(self, message, condition_estimate=None):
        super().__init__(message)
        self.condition_estimate = condition_estimate


class NotPseudoHermitianError(NumericalError):
    pass


class GaugeSingularError(NumericalError):
    pass


class TrackingError(NumericalError):
    pass


class SolverError(NumericalError):
    pass
