"""
Command-line entry: ``run(argv)`` returns the exit code.

    0  success
    1  usage error (unknown subcommand, flag or scenario)
    2  scenario or observable validation failure
    3  physically unreachable post-selection
"""
import os
import sys

import django
from django.apps import apps
from django.core.management import call_command
from django.core.management.base import CommandError


def run(argv=None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    if not apps.ready:
        os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tsvf_main.settings')
        django.setup()

    from scenarios.management.commands.tsvf import Command

    # call_command parses without exiting, so argparse errors surface as CommandError (exit 1).
    try:
        call_command(Command(), *argv, stdout=stdout, stderr=stderr)
    except CommandError as exc:
        message = str(exc)
        if not message.startswith('Error: '):
            message = f"Error: {message}"
        stderr.write(message + '\n')
        return exc.returncode
    return 0


if __name__ == '__main__':
    sys.exit(run())
