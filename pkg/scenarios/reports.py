"""Run analysis requests and turn the results into report documents (JSON or text)."""
from __future__ import annotations

import logging
from typing import Any, Dict, List, Optional

from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

from quantum import __version__
from quantum.conf import resolve_certainty, resolve_eps
from quantum.frames import Ordering, compare_orderings, run_ordering
from quantum.tsvf import abl_distribution, check_rules, element_of_reality
from quantum.weak import (
    WeakMeasurementConfig,
    disturbance_fidelity,
    exact_pointer_mean,
    post_selection_probability,
    sample_pointer,
    strong_limit_mean,
    weak_value,
)

from .scenario import AnalysisRequest, Scenario
from .serializers import ComplexField
from .specs import resolve_observable

logger = logging.getLogger(__name__)


# -------------------------
# Output serializers
# -------------------------
class KetField(serializers.Field):
    def to_representation(self, ket):
        return [ComplexField().to_representation(value) for value in ket.amplitudes]


class CertaintySerializer(serializers.Serializer):
    label = serializers.CharField()
    eigenvalue = serializers.FloatField()


class AblDistributionSerializer(serializers.Serializer):
    entries = serializers.DictField(child=serializers.FloatField())
    amplitudes = serializers.DictField(child=ComplexField())
    eigenvalues = serializers.DictField(child=serializers.FloatField())
    coarse_grained = serializers.BooleanField()


class RuleCheckReportSerializer(serializers.Serializer):
    observable_a = serializers.CharField()
    observable_b = serializers.CharField()
    eor_a = CertaintySerializer(allow_null=True)
    eor_b = CertaintySerializer(allow_null=True)
    joint_distribution = AblDistributionSerializer()
    product_distribution = AblDistributionSerializer()
    product_observable_distribution = AblDistributionSerializer(allow_null=True)
    product_eor = CertaintySerializer(allow_null=True)
    joint_probability_of_eors = serializers.FloatField(allow_null=True)
    and_rule_holds = serializers.BooleanField()
    product_rule_holds = serializers.BooleanField()


class OrderingRunSerializer(serializers.Serializer):
    ordering = serializers.SerializerMethodField()
    outcomes = serializers.DictField(child=serializers.CharField())
    trajectory = serializers.SerializerMethodField()
    joint_probability = serializers.FloatField()
    step_probabilities = serializers.ListField(child=serializers.FloatField())

    def get_ordering(self, run):
        return list(run.ordering.sequence)

    def get_trajectory(self, run):
        return [{'after': event_id, 'amplitudes': KetField().to_representation(state)}
                for event_id, state in run.trajectory]


class CutOverlapSerializer(serializers.Serializer):
    depth = serializers.IntegerField()
    orderings = serializers.ListField(child=serializers.IntegerField())
    completed = serializers.ListField(child=serializers.ListField(child=serializers.CharField()))
    same_events = serializers.BooleanField()
    overlap = serializers.FloatField()


class BranchComparisonSerializer(serializers.Serializer):
    outcomes = serializers.DictField(child=serializers.CharField())
    joint_probabilities = serializers.ListField(child=serializers.FloatField())
    final_overlaps = serializers.ListField(child=serializers.FloatField(allow_null=True))
    intermediate_overlaps = CutOverlapSerializer(many=True)
    runs = serializers.SerializerMethodField()

    def get_runs(self, branch):
        return [OrderingRunSerializer(run).data if run is not None else None for run in branch.runs]


class OrderingComparisonSerializer(serializers.Serializer):
    orderings = serializers.SerializerMethodField()
    ordering_invariant = serializers.BooleanField()
    commuting = serializers.BooleanField()
    warnings = serializers.ListField(child=serializers.CharField())
    joint_probabilities = serializers.ListField(child=serializers.FloatField())
    final_overlap = serializers.FloatField(allow_null=True)
    branches = BranchComparisonSerializer(many=True)

    def get_orderings(self, comparison):
        return [list(ordering.sequence) for ordering in comparison.orderings]


class WeakRunReportSerializer(serializers.Serializer):
    estimate = serializers.FloatField()
    exact_mean_over_g = serializers.FloatField()
    target_weak_value = ComplexField()
    standard_error = serializers.FloatField()
    post_selection_rate = serializers.FloatField()
    disturbance_fidelity = serializers.FloatField()
    g = serializers.FloatField()
    delta = serializers.FloatField()
    post_samples = serializers.IntegerField()
    seed = serializers.IntegerField()
    grid_points = serializers.IntegerField()
    shards = serializers.IntegerField()
    shard_sizes = serializers.ListField(child=serializers.IntegerField())


# -------------------------
# Analyses
# -------------------------
def ordering_record(scenario: Scenario, ordering: Ordering) -> Dict[str, Any]:
    run = run_ordering(scenario.initial, scenario.events, ordering)
    return dict({'kind': 'ordering'}, **OrderingRunSerializer(run).data)


def comparison_record(scenario: Scenario, orderings: List[Ordering], workers: Optional[int] = None) -> Dict[str, Any]:
    comparison = compare_orderings(scenario.initial, scenario.events, orderings, workers=workers)
    return dict({'kind': 'compare_orderings'}, **OrderingComparisonSerializer(comparison).data)


def abl_record(scenario: Scenario, spec: str) -> Dict[str, Any]:
    distribution = abl_distribution(scenario.two_state_vector(), resolve_observable(scenario, spec))
    return {'kind': 'abl', 'observable': spec, 'distribution': AblDistributionSerializer(distribution).data}


def eor_record(scenario: Scenario, spec: str) -> Dict[str, Any]:
    tsv = scenario.two_state_vector()
    observable = resolve_observable(scenario, spec)
    certainty = element_of_reality(tsv, observable)
    return {
        'kind': 'eor',
        'observable': spec,
        'element_of_reality': CertaintySerializer(certainty).data if certainty is not None else None,
        'distribution': AblDistributionSerializer(abl_distribution(tsv, observable)).data,
    }


def rules_record(scenario: Scenario, a: str, b: str) -> Dict[str, Any]:
    report = check_rules(scenario.two_state_vector(), resolve_observable(scenario, a), resolve_observable(scenario, b))
    return dict({'kind': 'check_rules', 'a': a, 'b': b}, **RuleCheckReportSerializer(report).data)


def weak_value_record(scenario: Scenario, spec: str, exact: Optional[Dict[str, float]] = None) -> Dict[str, Any]:
    tsv = scenario.two_state_vector()
    observable = resolve_observable(scenario, spec)
    value = weak_value(tsv, observable)
    record = {
        'kind': 'weak_value',
        'operator': spec,
        'value': ComplexField().to_representation(value.value),
        'numerator': ComplexField().to_representation(value.numerator),
        'denominator': ComplexField().to_representation(value.denominator),
    }
    if exact is not None:
        g, delta = exact['g'], exact['delta']
        record['exact'] = {
            'g': g,
            'delta': delta,
            'pointer_mean_over_g': exact_pointer_mean(tsv, observable, g, delta) / g,
            'strong_limit_mean': strong_limit_mean(tsv, observable),
            'post_selection_probability': post_selection_probability(tsv, observable, g, delta),
            'disturbance_fidelity': disturbance_fidelity(tsv.pre, observable, g, delta),
        }
    return record


def weak_mc_record(scenario: Scenario, spec: str, config: WeakMeasurementConfig) -> Dict[str, Any]:
    report = sample_pointer(scenario.two_state_vector(), resolve_observable(scenario, spec), config)
    return dict({'kind': 'weak_mc', 'operator': spec}, **WeakRunReportSerializer(report).data)


def weak_config(parameters: Dict[str, Any]) -> WeakMeasurementConfig:
    return WeakMeasurementConfig(**{key: parameters[key] for key in
                                    ('g', 'delta', 'post_samples', 'seed', 'grid_points', 'shards')
                                    if key in parameters})


def execute(scenario: Scenario, request: AnalysisRequest, workers: Optional[int] = None) -> Dict[str, Any]:
    parameters = request.parameters
    logger.info(f"Running {request.kind} on scenario {scenario.name!r}")
    if request.kind == 'compare_orderings':
        orderings = [Ordering(tuple(sequence)) for sequence in parameters['orderings']]
        return comparison_record(scenario, orderings, workers)
    if request.kind == 'abl':
        return abl_record(scenario, parameters['observable'])
    if request.kind == 'eor':
        return eor_record(scenario, parameters['observable'])
    if request.kind == 'check_rules':
        return rules_record(scenario, parameters['a'], parameters['b'])
    if request.kind == 'weak_value':
        return weak_value_record(scenario, parameters['operator'])
    return weak_mc_record(scenario, parameters['operator'], weak_config(parameters))


# -------------------------
# Documents
# -------------------------
def base_config() -> Dict[str, Any]:
    return {'eps': resolve_eps(), 'certainty_tolerance': resolve_certainty()}


def build_report(scenario: Scenario, results: List[Dict[str, Any]],
                 config: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return {
        'tool': 'tsvf',
        'version': __version__,
        'scenario': scenario.name,
        'config': dict(base_config(), **(config or {})),
        'results': results,
    }


def render_json(document: Dict[str, Any]) -> str:
    return JSONRenderer().render(document, renderer_context={'indent': 2}).decode('utf-8')


def _scalar(value: Any) -> str:
    if value is None:
        return '-'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return f"{value + 0.0:.6g}"
    return str(value)


def _inline(value: Any) -> bool:
    return not isinstance(value, (dict, list)) or (
        isinstance(value, list) and all(not isinstance(item, dict) and _inline(item) for item in value))


def _flat(value: Any) -> str:
    if isinstance(value, list):
        return '[' + ', '.join(_flat(item) for item in value) + ']'
    return _scalar(value)


def _render(key: str, value: Any, depth: int, lines: List[str]) -> None:
    pad = '  ' * depth
    if _inline(value):
        lines.append(f"{pad}{key}: {_flat(value)}")
        return
    lines.append(f"{pad}{key}:")
    items = value.items() if isinstance(value, dict) else ((f"[{i}]", item) for i, item in enumerate(value))
    for child_key, child in items:
        _render(str(child_key), child, depth + 1, lines)


def render_text(document: Dict[str, Any]) -> str:
    """Same content as the JSON report, numbers to 6 significant digits."""
    lines: List[str] = []
    for key, value in document.items():
        _render(key, value, 0, lines)
    return '\n'.join(lines)
