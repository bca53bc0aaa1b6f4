import logging

from django.core.management.base import BaseCommand, CommandError

from quantum.conf import weak_defaults
from quantum.exceptions import (
    DimensionError,
    ImpossibleOutcomeError,
    IncompatibleObservablesError,
    InvalidObservableError,
    InvalidOrderingError,
    NormalizationError,
    QuantumError,
    ScenarioValidationError,
    SizeError,
    UndefinedWeakValueError,
    UnreachablePostSelectionError,
)
from quantum.frames import Ordering
from scenarios import reports
from scenarios.builtin import BUILTINS, DESCRIPTIONS
from scenarios.loader import get_scenario

logger = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_UNREACHABLE = 3

VALIDATION_ERRORS = (
    ScenarioValidationError,
    InvalidObservableError,
    NormalizationError,
    DimensionError,
    SizeError,
    InvalidOrderingError,
    IncompatibleObservablesError,
)
UNREACHABLE_ERRORS = (UnreachablePostSelectionError, ImpossibleOutcomeError, UndefinedWeakValueError)


def exit_code_for(exc: Exception) -> int:
    if isinstance(exc, UNREACHABLE_ERRORS):
        return EXIT_UNREACHABLE
    if isinstance(exc, VALIDATION_ERRORS):
        return EXIT_VALIDATION
    return EXIT_USAGE


class Command(BaseCommand):
    help = 'Simulate pre- and post-selected quantum systems: orderings, ABL rule, rule checks, weak values.'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='action', required=True, metavar='subcommand')

        def subcommand(name, help_text, scenario=True):
            sub = subparsers.add_parser(name, help=help_text)
            if scenario:
                sub.add_argument('--scenario', default='hardy', help='built-in name or path to a scenario JSON file')
            sub.add_argument('--format', choices=['json', 'text'], default='json')
            return sub

        subcommand('list', 'list built-in scenarios', scenario=False)

        run = subcommand('run', 'run one ordering, or every analysis the scenario declares')
        run.add_argument('--ordering', help='comma-separated event ids, e.g. A,C')
        run.add_argument('--workers', type=int, default=None, help='evaluate orderings concurrently')

        abl = subcommand('abl', 'ABL distribution of an intermediate measurement')
        abl.add_argument('--observable', required=True, help='e.g. z1, x2, z1z2, z1&z2 or an event id')

        eor = subcommand('eor', 'elements of reality')
        eor.add_argument('--observable', help='defaults to the scenario\'s eor requests, else every event')

        rules = subcommand('check-rules', 'and-rule and product-rule checks')
        rules.add_argument('--a', required=True)
        rules.add_argument('--b', required=True)

        weak = subcommand('weak', 'exact weak value')
        weak.add_argument('--operator', required=True)
        weak.add_argument('--exact', action='store_true', help='also report the exact pointer-model figures')
        weak.add_argument('--g', type=float, default=None)
        weak.add_argument('--delta', type=float, default=None)

        mc = subcommand('weak-mc', 'Monte Carlo weak measurement on the post-selected ensemble')
        mc.add_argument('--operator', help='defaults to the scenario\'s weak_mc request')
        mc.add_argument('--g', type=float, required=True)
        mc.add_argument('--delta', type=float, required=True)
        mc.add_argument('--post-samples', type=int, required=True)
        mc.add_argument('--seed', type=int, required=True)
        mc.add_argument('--grid', type=int, default=None)
        mc.add_argument('--shards', type=int, default=None)

    def run_from_argv(self, argv):
        # Route through cli.run so argument errors keep the documented exit codes.
        from scenarios.cli import run
        raise SystemExit(run(argv[2:]))

    def handle(self, *args, **options):
        action = options['action']
        try:
            if action == 'list':
                document = {'tool': 'tsvf', 'scenarios': [
                    {'name': name, 'description': DESCRIPTIONS[name]} for name in BUILTINS]}
            else:
                document = self._analyse(action, options)
        except QuantumError as exc:
            code = exit_code_for(exc)
            logger.error(f"{action} failed: {exc}")
            raise CommandError(str(exc), returncode=code) from exc
        except ValueError as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE) from exc

        if options['format'] == 'text':
            self.stdout.write(reports.render_text(document))
        else:
            self.stdout.write(reports.render_json(document))

    def _scenario(self, name):
        try:
            return get_scenario(name)
        except KeyError:
            raise CommandError(
                f"unknown scenario {name!r}; built-ins are {sorted(BUILTINS)} or give a file path",
                returncode=EXIT_USAGE)

    def _analyse(self, action, options):
        scenario = self._scenario(options['scenario'])
        config = {}
        if action == 'run':
            if options['ordering']:
                results = [reports.ordering_record(scenario, Ordering.parse(options['ordering']))]
            else:
                results = [reports.execute(scenario, request, options['workers']) for request in scenario.analyses]
                config['weak_mc'] = [dict(request.parameters) for request in scenario.requests('weak_mc')]
        elif action == 'abl':
            results = [reports.abl_record(scenario, options['observable'])]
        elif action == 'eor':
            results = [reports.eor_record(scenario, spec) for spec in self._eor_specs(scenario, options)]
        elif action == 'check-rules':
            results = [reports.rules_record(scenario, options['a'], options['b'])]
        elif action == 'weak':
            exact = None
            if options['exact']:
                defaults = weak_defaults()
                exact = {
                    'g': options['g'] if options['g'] is not None else defaults['g'],
                    'delta': options['delta'] if options['delta'] is not None else defaults['delta'],
                }
                config.update(exact)
            results = [reports.weak_value_record(scenario, options['operator'], exact)]
        else:
            parameters = self._weak_mc_parameters(scenario, options)
            config.update({key: value for key, value in parameters.items() if key != 'operator'})
            results = [reports.weak_mc_record(scenario, parameters['operator'], reports.weak_config(parameters))]
        return reports.build_report(scenario, results, config)

    def _eor_specs(self, scenario, options):
        if options['observable']:
            return [options['observable']]
        declared = [request.parameters['observable'] for request in scenario.requests('eor')]
        return declared or scenario.event_ids()

    def _weak_mc_parameters(self, scenario, options):
        defaults = weak_defaults()
        declared = scenario.requests('weak_mc')
        operator = options['operator'] or (declared[0].parameters['operator'] if declared else None)
        if operator is None:
            raise CommandError('weak-mc needs --operator for this scenario', returncode=EXIT_USAGE)
        return {
            'operator': operator,
            'g': options['g'],
            'delta': options['delta'],
            'post_samples': options['post_samples'],
            'seed': options['seed'],
            'grid_points': options['grid'] if options['grid'] is not None else defaults['grid_points'],
            'shards': options['shards'] if options['shards'] is not None else defaults['shards'],
        }
