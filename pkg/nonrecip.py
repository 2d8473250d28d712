#!/usr/bin/env python
'''Command-line utility for the nonreciprocal lattice experiments.'''
import sys

import click

from core.exceptions import ValidationError


def main(argv=None):
    '''Run one experiment; usage errors exit with the validation code.'''
    from experiments.cli import cli

    try:
        code = cli.main(args=argv, prog_name='nonrecip', standalone_mode=False)
    except click.exceptions.Exit as exit_:
        code = exit_.exit_code
    except click.ClickException as exc:
        exc.show()
        code = ValidationError.exit_code
    except click.Abort:
        click.echo('Aborted!', err=True)
        code = 1
    sys.exit(code or 0)


if __name__ == '__main__':
    main()
