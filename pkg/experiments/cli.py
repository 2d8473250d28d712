'''
Command-line surface: one subcommand per experiment.

Example:
    nonrecip spectrum --model ssh3.json --out results/ --set t3=1.0
    nonrecip phase-diagram --set t3=1.0 --set resolution=41
'''

from pathlib import Path

import click

from core.exceptions import ValidationError
from core.logs import configure_logging

from .commands import run
from .forms import parse_overrides
from .models import ExperimentConfig


EXPERIMENT_OPTIONS = (
    click.option('--model', 'model_path', type=click.Path(path_type=Path), help='Model JSON file.'),
    click.option(
        '--out',
        'output_dir',
        type=click.Path(file_okay=False, path_type=Path),
        default=Path('results'),
        show_default=True,
        help='Directory for the data files.',
    ),
    click.option('--set', 'overrides', multiple=True, metavar='KEY=VALUE', help='Parameter override.'),
    click.option('-v', '--verbose', count=True, help='Log INFO (-v) or DEBUG (-vv).'),
)


def experiment_options(function):
    '''Options shared by every subcommand.'''
    for option in reversed(EXPERIMENT_OPTIONS):
        function = option(function)
    return function


def _execute(ctx, command, model_path, output_dir, overrides, verbose):
    level = {0: None, 1: 'INFO'}.get(verbose, 'DEBUG')
    configure_logging(level)
    try:
        config = ExperimentConfig(
            command=command,
            model_path=model_path,
            output_dir=output_dir,
            overrides=parse_overrides(overrides),
        )
    except ValidationError as error:
        for message in error.messages:
            click.echo(f'error: {message}', err=True)
        ctx.exit(error.exit_code)
    ctx.exit(run(config))


@click.group()
def cli():
    '''Nonreciprocal tight-binding experiments.'''


def _register(command):
    @cli.command(name=str(command), help=HELP[command])
    @experiment_options
    @click.pass_context
    def subcommand(ctx, model_path, output_dir, overrides, verbose):
        _execute(ctx, command, model_path, output_dir, overrides, verbose)

    return subcommand


HELP = {
    ExperimentConfig.Command.SPECTRUM: 'Eigenvalues, PT phase and eigenstates of a 1D chain.',
    ExperimentConfig.Command.GBZ: 'Generalized Brillouin zone from the middle beta roots.',
    ExperimentConfig.Command.ENVELOPE: 'Skin-mode localization rates of the continuum states.',
    ExperimentConfig.Command.ZAK: 'Non-Hermitian Zak windings on the circular GBZ.',
    ExperimentConfig.Command.PHASE_DIAGRAM: 'SSH3 edge-state counts over the hopping products.',
    ExperimentConfig.Command.CHECK_GAUGE: 'Path independence of hopping ratios.',
    ExperimentConfig.Command.HN2D: 'Density map and decay rates of a 2D Hatano-Nelson lattice.',
}

for _command in ExperimentConfig.Command:
    _register(_command)
