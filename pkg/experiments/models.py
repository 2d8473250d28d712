from dataclasses import dataclass, field
from core.compat import StrEnum
from pathlib import Path

from core import settings
from core.exceptions import ValidationError


@dataclass(frozen=True)
class ExperimentConfig:
    '''
    One command-line experiment.

    Attributes:
        command: Experiment to run
        model_path: Model JSON file (not needed for phase-diagram)
        output_dir: Directory receiving the data files, created if missing
        overrides: Parsed --set values, see experiments.forms.OVERRIDE_TYPES

    Example:
        config = ExperimentConfig(
            command=ExperimentConfig.Command.ZAK,
            model_path=Path('ssh3.json'),
            overrides={'K': 1024},
        )
    '''

    class Command(StrEnum):
        SPECTRUM = 'spectrum'
        GBZ = 'gbz'
        ENVELOPE = 'envelope'
        ZAK = 'zak'
        PHASE_DIAGRAM = 'phase-diagram'
        CHECK_GAUGE = 'check-gauge'
        HN2D = 'hn2d'

    command: Command
    model_path: Path = None
    output_dir: Path = settings.BASE_DIR / 'results'
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'command', self.Command(self.command))
        object.__setattr__(self, 'output_dir', Path(self.output_dir))
        if self.model_path is not None:
            object.__setattr__(self, 'model_path', Path(self.model_path))
        self.clean()

    @property
    def needs_model(self):
        return self.command != self.Command.PHASE_DIAGRAM

    def clean(self):
        '''
        Raises:
            ValidationError: If a model-based command has no model path
        '''
        if self.needs_model and self.model_path is None:
            raise ValidationError(f'required by {self.command}', field='--model')

    def get(self, key, default=None):
        return self.overrides.get(key, default)
