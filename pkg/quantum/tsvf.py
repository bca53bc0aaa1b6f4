"""
Two-state-vector analysis of pre- and post-selected ensembles.

For an intermediate projective measurement with branches P_a between the
pre-selected |psi> and the post-selected |phi>, the conditional probability
of outcome a is

    P(a) = |<phi|P_a|psi>|^2 / sum_b |<phi|P_b|psi>|^2

An outcome with conditional probability 1 is an element of reality. The
and-rule and product-rule checks combine two such statements about
commuting observables and report whether the combination is still certain.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

from .conf import resolve_certainty, resolve_eps
from .exceptions import DimensionError, IncompatibleObservablesError, UnreachablePostSelectionError
from .hilbert import Ket, SubsystemLayout, inner_product, matrix_element
from .measurement import (
    EIGENVALUE_DECIMALS,
    Observable,
    format_eigenvalue,
    joint_observable,
    product_observable,
    require_valid,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TwoStateVector:
    pre: Ket
    post: Ket

    def __post_init__(self):
        if self.pre.layout.dims != self.post.layout.dims:
            raise DimensionError(
                f"pre-selection lives in {list(self.pre.layout.dims)}, "
                f"post-selection in {list(self.post.layout.dims)}")
        self.pre.require_normalized(what='pre-selected state')
        self.post.require_normalized(what='post-selected state')
        if abs(self.overlap()) <= resolve_eps():
            logger.warning('pre- and post-selected states are orthogonal; the ensemble is empty '
                           'unless an intermediate measurement intervenes')

    @property
    def layout(self) -> SubsystemLayout:
        return self.pre.layout

    def overlap(self) -> complex:
        """<phi|psi>."""
        return inner_product(self.post, self.pre)

    def reversed(self) -> 'TwoStateVector':
        return TwoStateVector(pre=self.post, post=self.pre)


@dataclass(frozen=True)
class AblDistribution:
    entries: Mapping[str, float]
    amplitudes: Mapping[str, complex] = field(default_factory=dict)
    eigenvalues: Mapping[str, float] = field(default_factory=dict)
    # True when obtained by summing probabilities of a finer measurement.
    coarse_grained: bool = False

    def __getitem__(self, label: str) -> float:
        return self.entries[label]

    def total(self) -> float:
        return float(sum(self.entries.values()))


@dataclass(frozen=True)
class Certainty:
    label: str
    eigenvalue: float


@dataclass(frozen=True)
class RuleCheckReport:
    observable_a: str
    observable_b: str
    eor_a: Optional[Certainty]
    eor_b: Optional[Certainty]
    joint_distribution: AblDistribution
    # Product of locally measured values: the joint distribution grouped by a*b.
    product_distribution: AblDistribution
    # A*B measured as one degenerate observable; None if that measurement cannot reach the post-selection.
    product_observable_distribution: Optional[AblDistribution]
    product_eor: Optional[Certainty]
    joint_probability_of_eors: Optional[float]
    and_rule_holds: bool
    product_rule_holds: bool


def _require_layout(tsv: TwoStateVector, obs: Observable) -> None:
    if tsv.layout.dims != obs.layout.dims:
        raise DimensionError(
            f"observable layout {list(obs.layout.dims)} does not match the two-state vector "
            f"{list(tsv.layout.dims)}")


def abl_distribution(tsv: TwoStateVector, obs: Observable, eps: Optional[float] = None) -> AblDistribution:
    eps = resolve_eps(eps)
    _require_layout(tsv, obs)
    require_valid(obs, eps)
    amplitudes = {b.label: matrix_element(tsv.post, b.projector, tsv.pre) for b in obs.branches}
    weights = {label: abs(amplitude) ** 2 for label, amplitude in amplitudes.items()}
    denominator = sum(weights.values())
    if denominator <= eps:
        raise UnreachablePostSelectionError(
            f"post-selection is unreachable through a measurement of {obs.name or 'the observable'} "
            f"(sum of squared amplitudes {denominator:.3g})")
    return AblDistribution({label: weight / denominator for label, weight in weights.items()}, amplitudes,
                           {b.label: b.eigenvalue for b in obs.branches})


def certain_outcome(distribution: AblDistribution, obs: Optional[Observable] = None,
                    tolerance: Optional[float] = None) -> Optional[Certainty]:
    tolerance = resolve_certainty(tolerance)
    certain = [label for label, p in distribution.entries.items() if p >= 1.0 - tolerance]
    if len(certain) != 1:
        return None
    label = certain[0]
    eigenvalue = obs.eigenvalue_of(label) if obs is not None else distribution.eigenvalues[label]
    return Certainty(label, eigenvalue)


def element_of_reality(tsv: TwoStateVector, obs: Observable, tolerance: Optional[float] = None,
                       eps: Optional[float] = None) -> Optional[Certainty]:
    """The outcome certain to be found by an intermediate measurement, if any."""
    return certain_outcome(abl_distribution(tsv, obs, eps), obs, tolerance)


def _coarse_grain_by_product(joint: AblDistribution, joint_obs: Observable) -> AblDistribution:
    grouped: Dict[float, float] = defaultdict(float)
    for branch in joint_obs.branches:
        grouped[round(branch.eigenvalue, EIGENVALUE_DECIMALS) + 0.0] += joint[branch.label]
    ordered = sorted(grouped.items(), key=lambda item: -item[0])
    return AblDistribution({format_eigenvalue(value): p for value, p in ordered}, {},
                           {format_eigenvalue(value): value for value, _ in ordered}, coarse_grained=True)


def check_rules(tsv: TwoStateVector, a: Observable, b: Observable, tolerance: Optional[float] = None,
                eps: Optional[float] = None) -> RuleCheckReport:
    """Individual elements of reality for A and B and whether their conjunction and product are certain."""
    eps = resolve_eps(eps)
    tolerance = resolve_certainty(tolerance)
    if a.targets is not None and b.targets is not None and set(a.targets) & set(b.targets):
        raise IncompatibleObservablesError(
            f"{a.name or 'A'} and {b.name or 'B'} act on the same subsystem(s) "
            f"{sorted(set(a.targets) & set(b.targets))}")
    eor_a = element_of_reality(tsv, a, tolerance, eps)
    eor_b = element_of_reality(tsv, b, tolerance, eps)

    joint_obs = joint_observable(a, b, eps)
    joint = abl_distribution(tsv, joint_obs, eps)
    product = _coarse_grain_by_product(joint, joint_obs)
    product_eor = certain_outcome(product, None, tolerance)

    try:
        product_observable_distribution = abl_distribution(tsv, product_observable(a, b, eps), eps)
    except UnreachablePostSelectionError:
        product_observable_distribution = None

    joint_probability = None
    and_holds = True
    product_holds = True
    if eor_a is not None and eor_b is not None:
        joint_probability = joint[f"{eor_a.label},{eor_b.label}"]
        and_holds = joint_probability >= 1.0 - tolerance
        expected = round(eor_a.eigenvalue * eor_b.eigenvalue, EIGENVALUE_DECIMALS)
        product_holds = product_eor is not None and round(product_eor.eigenvalue, EIGENVALUE_DECIMALS) == expected

    logger.info(f"Rule check {a.name} / {b.name}: and rule {'holds' if and_holds else 'fails'}, "
                f"product rule {'holds' if product_holds else 'fails'}")
    return RuleCheckReport(
        observable_a=a.name,
        observable_b=b.name,
        eor_a=eor_a,
        eor_b=eor_b,
        joint_distribution=joint,
        product_distribution=product,
        product_observable_distribution=product_observable_distribution,
        product_eor=product_eor,
        joint_probability_of_eors=joint_probability,
        and_rule_holds=and_holds,
        product_rule_holds=product_holds,
    )


def and_rule_check(tsv: TwoStateVector, a: Observable, b: Observable, tolerance: Optional[float] = None,
                   eps: Optional[float] = None) -> RuleCheckReport:
    return check_rules(tsv, a, b, tolerance, eps)


def product_rule_check(tsv: TwoStateVector, a: Observable, b: Observable, tolerance: Optional[float] = None,
                       eps: Optional[float] = None) -> RuleCheckReport:
    return check_rules(tsv, a, b, tolerance, eps)
