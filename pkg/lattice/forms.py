import json
import re
from pathlib import Path

from core.exceptions import ValidationError

from .models import LatticeModel1D, LatticeModel2D, LongRangeHop


def parse_complex(value):
    '''
    Read a JSON amplitude: a real number or a two-element [re, im] array.

    Raises:
        ValueError: If the value has any other shape
    '''
    if isinstance(value, bool):
        raise ValueError('expected a number or [re, im]')
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(part, (int, float)) and not isinstance(part, bool) for part in value)
    ):
        return complex(value[0], value[1])
    raise ValueError('expected a number or [re, im]')


class BaseModelForm:
    '''
    Validate a parsed model document and build the immutable model.

    Each declared field is checked by its clean_<field>() method; clean()
    then performs cross-field validation. Errors are collected with
    add_error() and anchored to the source line holding the field's key.

    Attributes:
        data: Parsed JSON document
        text: Raw document text, used to locate line numbers
        cleaned_data: Field values after successful cleaning
        errors: Mapping field -> list of line-anchored messages

    Example:
        form = LatticeModelForm(data, text)
        if form.is_valid():
            model = form.save()
    '''

    fields = ()
    required = ()

    def __init__(self, data, text=''):
        self.data = data
        self.text = text
        self.cleaned_data = {}
        self.errors = {}

    def line_of(self, field):
        key = field.split('[', 1)[0]
        match = re.search(rf'"{re.escape(key)}"\s*:', self.text)
        if match is None:
            return 1
        return self.text.count('\n', 0, match.start()) + 1

    def add_error(self, field, message):
        self.errors.setdefault(field, []).append(
            f'line {self.line_of(field)}: {message}'
        )

    def is_valid(self):
        self.errors = {}
        self.cleaned_data = {}
        if not isinstance(self.data, dict):
            self.add_error('__all__', 'top-level JSON value must be an object')
            return False
        for name in self.data:
            if name not in self.fields:
                self.add_error(name, 'unknown field')
        for name in self.fields:
            if name not in self.data:
                if name in self.required:
                    self.add_error(name, 'this field is required')
                continue
            try:
                self.cleaned_data[name] = getattr(self, f'clean_{name}')(self.data[name])
            except ValueError as exc:
                self.add_error(name, str(exc))
        if not self.errors:
            self.clean()
        return not self.errors

    def clean(self):
        return self.cleaned_data

    def save(self):
        raise NotImplementedError

    def validation_error(self):
        return ValidationError(self.errors)

    @staticmethod
    def _positive_int(value, minimum=1):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError('expected an integer')
        if value < minimum:
            raise ValueError(f'must be >= {minimum}')
        return value


class LatticeModelForm(BaseModelForm):
    '''
    Schema of a 1D model document.

    Fields:
        M, N: positive integers
        tR, tL: lists of M amplitudes
        long_range: optional list of {"i", "j", "m", "tR", "tL"}
        boundary: optional "obc" (default) or "pbc"
    '''

    fields = ('M', 'N', 'tR', 'tL', 'long_range', 'boundary')
    required = ('M', 'N', 'tR', 'tL')

    def clean_M(self, value):
        return self._positive_int(value)

    def clean_N(self, value):
        return self._positive_int(value)

    def clean_tR(self, value):
        return self._clean_amplitudes(value)

    def clean_tL(self, value):
        return self._clean_amplitudes(value)

    def clean_long_range(self, value):
        if not isinstance(value, list):
            raise ValueError('expected a list of hops')
        hops = []
        for index, entry in enumerate(value):
            if not isinstance(entry, dict):
                raise ValueError(f'entry {index} must be an object')
            missing = [key for key in ('i', 'j', 'm', 'tR', 'tL') if key not in entry]
            if missing:
                raise ValueError(f'entry {index} is missing {", ".join(missing)}')
            for key in ('i', 'j', 'm'):
                if isinstance(entry[key], bool) or not isinstance(entry[key], int):
                    raise ValueError(f'entry {index}: {key} must be an integer')
            hops.append(
                LongRangeHop(
                    i=entry['i'],
                    j=entry['j'],
                    m=entry['m'],
                    t_right=parse_complex(entry['tR']),
                    t_left=parse_complex(entry['tL']),
                )
            )
        return tuple(hops)

    def clean_boundary(self, value):
        try:
            return LatticeModel1D.Boundary(str(value).lower())
        except ValueError:
            raise ValueError('must be "obc" or "pbc"') from None

    def clean(self):
        '''
        Cross-field checks against the sublattice count.

        Validations:
        1. tR and tL carry exactly M amplitudes
        2. Long-range hops stay inside [1, M] and connect distinct sites
        '''
        cleaned_data = self.cleaned_data
        n_sub = cleaned_data['M']
        for name in ('tR', 'tL'):
            if len(cleaned_data[name]) != n_sub:
                self.add_error(
                    name,
                    f'expected {n_sub} entries (M), got {len(cleaned_data[name])}',
                )
        for index, hop in enumerate(cleaned_data.get('long_range', ())):
            if not (1 <= hop.i <= n_sub and 1 <= hop.j <= n_sub):
                self.add_error(
                    f'long_range[{index}]',
                    f'sublattice indices must lie in [1, {n_sub}]',
                )
            if hop.m < 1:
                if hop.m == 0 and hop.i == hop.j:
                    self.add_error(f'long_range[{index}]', 'self-hop (m = 0, i = j)')
                else:
                    self.add_error(f'long_range[{index}]', 'cell offset m must be >= 1')
        return cleaned_data

    def save(self):
        data = self.cleaned_data
        return LatticeModel1D(
            n_sub=data['M'],
            n_cells=data['N'],
            t_right=data['tR'],
            t_left=data['tL'],
            long_range=data.get('long_range', ()),
            boundary=data.get('boundary', LatticeModel1D.Boundary.OBC),
        )

    @staticmethod
    def _clean_amplitudes(value):
        if not isinstance(value, list) or not value:
            raise ValueError('expected a non-empty list of amplitudes')
        amplitudes = []
        for index, entry in enumerate(value):
            try:
                amplitudes.append(parse_complex(entry))
            except ValueError as exc:
                raise ValueError(f'entry {index}: {exc}') from None
        return tuple(amplitudes)


class LatticeModel2DForm(BaseModelForm):
    '''Schema of a 2D square-lattice document; t1 and t2 default to zero.'''

    fields = ('Mx', 'Ny', 'tR', 'tL', 'tU', 'tD', 't1', 't2')
    required = ('Mx', 'Ny', 'tR', 'tL', 'tU', 'tD')

    def clean_Mx(self, value):
        return self._positive_int(value, minimum=2)

    def clean_Ny(self, value):
        return self._positive_int(value, minimum=2)

    def clean_tR(self, value):
        return parse_complex(value)

    def clean_tL(self, value):
        return parse_complex(value)

    def clean_tU(self, value):
        return parse_complex(value)

    def clean_tD(self, value):
        return parse_complex(value)

    def clean_t1(self, value):
        return parse_complex(value)

    def clean_t2(self, value):
        return parse_complex(value)

    def save(self):
        data = self.cleaned_data
        return LatticeModel2D(
            n_cols=data['Mx'],
            n_rows=data['Ny'],
            t_right=data['tR'],
            t_left=data['tL'],
            t_up=data['tU'],
            t_down=data['tD'],
            t1=data.get('t1', 0j),
            t2=data.get('t2', 0j),
        )


def validate_model(path):
    '''
    Parse and validate a model file.

    Documents with an "Mx" key are read as 2D models, all others as 1D.

    Args:
        path: Path to the JSON document

    Returns:
        LatticeModel1D or LatticeModel2D

    Raises:
        ValidationError: With line-anchored messages for every problem found
    '''
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ValidationError(f'cannot read {path}: {exc.strerror}', field='model') from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f'line {exc.lineno}: invalid JSON ({exc.msg})', field='model') from exc

    form_class = LatticeModel2DForm if isinstance(data, dict) and 'Mx' in data else LatticeModelForm
    form = form_class(data, text)
    if not form.is_valid():
        raise form.validation_error()
    return form.save()
