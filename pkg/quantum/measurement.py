"""
Projective (von Neumann) measurement.

An observable is a complete set of orthogonal projectors, each tagged with a
label and an eigenvalue. Branches are identified by label; eigenvalues may
repeat (a degenerate eigenvalue may also be split across several branches).
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .conf import resolve_eps
from .exceptions import (
    DimensionError,
    ImpossibleOutcomeError,
    IncompatibleObservablesError,
    InvalidObservableError,
)
from .hilbert import (
    PAULI,
    Ket,
    Operator,
    SubsystemLayout,
    apply,
    basis_ket,
    commutator_norm,
    is_projector,
    lift_to_subsystem,
    projector_onto,
)


EIGENVALUE_DECIMALS = 12


def format_eigenvalue(value: float) -> str:
    """Label used for eigenvalue-named branches: '+1', '-1', '+0.5', '+1.1234567'.

    Distinct eigenvalues after rounding to EIGENVALUE_DECIMALS always get distinct labels.
    """
    text = repr(round(float(value), EIGENVALUE_DECIMALS) + 0.0)
    if text.endswith('.0'):
        text = text[:-2]
    return text if text.startswith('-') else f"+{text}"


@dataclass(frozen=True, eq=False)
class Branch:
    label: str
    eigenvalue: float
    projector: Operator


@dataclass(frozen=True, eq=False)
class Observable:
    layout: SubsystemLayout
    branches: Tuple[Branch, ...]
    name: str = ''
    # Subsystems the observable acts on; None when built from raw matrices.
    targets: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'branches', tuple(self.branches))
        if self.targets is not None:
            object.__setattr__(self, 'targets', tuple(sorted(set(self.targets))))

    @property
    def labels(self) -> List[str]:
        return [b.label for b in self.branches]

    def branch(self, label: str) -> Branch:
        for candidate in self.branches:
            if candidate.label == label:
                return candidate
        raise InvalidObservableError(
            f"observable {self.name or '<unnamed>'} has no outcome {label!r}; known: {self.labels}")

    def eigenvalue_of(self, label: str) -> float:
        return self.branch(label).eigenvalue

    def operator(self) -> Operator:
        """The Hermitian operator sum_a a P_a."""
        entries = sum((b.eigenvalue * b.projector.entries for b in self.branches),
                      np.zeros((self.layout.total, self.layout.total), dtype=complex))
        return Operator(self.layout, entries)

    def __repr__(self):
        return f"Observable({self.name or '<unnamed>'}, labels={self.labels})"


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    norm: float = 0.0


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = ()
    warnings: Tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def messages(self) -> List[str]:
        return [f"{v.kind}: {v.detail}" for v in self.violations]


@dataclass(frozen=True)
class OutcomeDistribution:
    entries: Mapping[str, float]

    def __getitem__(self, label: str) -> float:
        return self.entries[label]

    def total(self) -> float:
        return float(sum(self.entries.values()))


@dataclass(frozen=True, eq=False)
class SequenceResult:
    trajectory: Tuple[Ket, ...]
    joint_probability: float
    step_probabilities: Tuple[float, ...] = field(default=())

    @property
    def final(self) -> Ket:
        return self.trajectory[-1]


def validate_observable(obs: Observable, eps: Optional[float] = None) -> ValidationReport:
    eps = resolve_eps(eps)
    violations = []
    labels = obs.labels
    duplicates = sorted({label for label in labels if labels.count(label) > 1})
    if duplicates:
        violations.append(Violation('labels', f"duplicate labels {duplicates}"))
    if not obs.branches:
        violations.append(Violation('completeness', 'observable has no branches', 1.0))
        return ValidationReport(tuple(violations))

    total = obs.layout.total
    for branch in obs.branches:
        if branch.projector.layout.dims != obs.layout.dims:
            violations.append(Violation(
                'layout', f"branch {branch.label!r} acts on {list(branch.projector.layout.dims)}"))
            return ValidationReport(tuple(violations))
        matrix = branch.projector.entries
        if not is_projector(matrix, eps):
            residual = float(np.max(np.abs(matrix @ matrix - matrix)))
            violations.append(Violation('projector', f"branch {branch.label!r} is not a projector", residual))

    for first, second in itertools.combinations(obs.branches, 2):
        overlap = float(np.max(np.abs(first.projector.entries @ second.projector.entries)))
        if overlap > eps:
            violations.append(Violation(
                'orthogonality', f"branches {first.label!r} and {second.label!r} overlap", overlap))

    summed = sum(b.projector.entries for b in obs.branches)
    residual = float(np.max(np.abs(summed - np.eye(total))))
    if residual > eps:
        violations.append(Violation('completeness', 'projectors do not sum to the identity', residual))
    return ValidationReport(tuple(violations))


def require_valid(obs: Observable, eps: Optional[float] = None) -> None:
    report = validate_observable(obs, eps)
    if not report.valid:
        raise InvalidObservableError(
            f"invalid observable {obs.name or '<unnamed>'}: " + '; '.join(report.messages()),
            report.messages())


def _require_layout(state: Ket, obs: Observable) -> None:
    if state.layout.dims != obs.layout.dims:
        raise DimensionError(
            f"state layout {list(state.layout.dims)} does not match observable layout {list(obs.layout.dims)}")


def born_distribution(state: Ket, obs: Observable, eps: Optional[float] = None) -> OutcomeDistribution:
    _require_layout(state, obs)
    state.require_normalized(eps, 'state')
    require_valid(obs, eps)
    entries = {b.label: float(np.linalg.norm(b.projector.entries @ state.amplitudes) ** 2)
               for b in obs.branches}
    return OutcomeDistribution(entries)


def collapse(state: Ket, obs: Observable, outcome: str, eps: Optional[float] = None) -> Ket:
    """Project onto the outcome's eigenspace and renormalize."""
    eps = resolve_eps(eps)
    _require_layout(state, obs)
    state.require_normalized(eps, 'state')
    projected = apply(obs.branch(outcome).projector, state)
    probability = projected.norm() ** 2
    if probability <= eps:
        raise ImpossibleOutcomeError(
            f"outcome {outcome!r} of {obs.name or 'observable'} has probability {probability:.3g}")
    return projected.scaled(1.0 / math.sqrt(probability))


def measure_sequence(state: Ket, steps: Sequence[Tuple[Observable, str]],
                     eps: Optional[float] = None) -> SequenceResult:
    """Apply forced outcomes in order, keeping every intermediate state."""
    eps = resolve_eps(eps)
    state.require_normalized(eps, 'initial state')
    trajectory = [state]
    probabilities = []
    current = state
    for step, (obs, outcome) in enumerate(steps):
        _require_layout(current, obs)
        projected = apply(obs.branch(outcome).projector, current)
        probability = projected.norm() ** 2
        if probability <= eps:
            raise ImpossibleOutcomeError(
                f"step {step}: outcome {outcome!r} of {obs.name or 'observable'} "
                f"has probability {probability:.3g}", step=step)
        current = projected.scaled(1.0 / math.sqrt(probability))
        trajectory.append(current)
        probabilities.append(probability)
    return SequenceResult(tuple(trajectory), float(math.prod(probabilities)), tuple(probabilities))


def enumerate_sequences(state: Ket, observables: Sequence[Observable],
                        eps: Optional[float] = None) -> Dict[Tuple[str, ...], float]:
    """Probability of every outcome chain; impossible chains map to 0."""
    chains = {}
    for labels in itertools.product(*(obs.labels for obs in observables)):
        try:
            chains[labels] = measure_sequence(state, list(zip(observables, labels)), eps).joint_probability
        except ImpossibleOutcomeError:
            chains[labels] = 0.0
    return chains


# Constructors

def spin_observable(axis: str, target: int, layout: SubsystemLayout) -> Observable:
    """Pauli observable sigma_axis on a qubit subsystem, outcomes '+1' and '-1'."""
    if axis not in PAULI:
        raise InvalidObservableError(f"unknown spin axis {axis!r}; use x, y or z")
    layout.check_target(target)
    if layout.dims[target] != 2:
        raise DimensionError(f"sigma_{axis} needs a qubit, subsystem {target} has dimension {layout.dims[target]}")
    values, vectors = np.linalg.eigh(PAULI[axis])
    branches = []
    for value, vector in sorted(zip(values, vectors.T), key=lambda item: -item[0]):
        local = projector_onto(Ket(SubsystemLayout((2,)), vector))
        eigenvalue = float(round(value))
        branches.append(Branch(format_eigenvalue(eigenvalue), eigenvalue,
                               lift_to_subsystem(local, target, layout)))
    return Observable(layout, tuple(branches), name=f"sigma_{axis}{target + 1}", targets=(target,))


def box_observable(index: int, layout: SubsystemLayout, target: int = 0, name: str = '',
                   found_label: str = 'found', not_found_label: str = 'not-found') -> Observable:
    """Open one box: is the particle in basis state ``index`` of ``target`` or not."""
    layout.check_target(target)
    local_layout = SubsystemLayout((layout.dims[target],))
    found = lift_to_subsystem(projector_onto(basis_ket(local_layout, [index])), target, layout)
    not_found = Operator(layout, np.eye(layout.total) - found.entries, is_projector=True)
    return Observable(layout,
                      (Branch(found_label, 1.0, found), Branch(not_found_label, 0.0, not_found)),
                      name=name or f"box{index}", targets=(target,))


def observable_from_kets(layout: SubsystemLayout, items: Iterable[Tuple[str, float, Ket]],
                         name: str = '', targets: Optional[Sequence[int]] = None) -> Observable:
    branches = tuple(Branch(label, float(value), projector_onto(ket)) for label, value, ket in items)
    return Observable(layout, branches, name=name, targets=tuple(targets) if targets is not None else None)


def observable_from_projectors(layout: SubsystemLayout, items: Iterable[Tuple[str, float, np.ndarray]],
                               name: str = '', targets: Optional[Sequence[int]] = None) -> Observable:
    branches = tuple(Branch(label, float(value), Operator(layout, matrix)) for label, value, matrix in items)
    return Observable(layout, branches, name=name, targets=tuple(targets) if targets is not None else None)


def _require_compatible(a: Observable, b: Observable, eps: float) -> None:
    if a.layout.dims != b.layout.dims:
        raise DimensionError(f"layout mismatch: {list(a.layout.dims)} vs {list(b.layout.dims)}")
    for first in a.branches:
        for second in b.branches:
            if commutator_norm(first.projector, second.projector) > eps:
                raise IncompatibleObservablesError(
                    f"{a.name or 'A'} and {b.name or 'B'} do not commute; no joint measurement exists")


def _merged_targets(a: Observable, b: Observable) -> Optional[Tuple[int, ...]]:
    if a.targets is None or b.targets is None:
        return None
    return tuple(a.targets) + tuple(b.targets)


def joint_observable(a: Observable, b: Observable, eps: Optional[float] = None) -> Observable:
    """Fine-grained joint measurement of two commuting observables, labels 'a,b'."""
    eps = resolve_eps(eps)
    _require_compatible(a, b, eps)
    branches = tuple(
        Branch(f"{first.label},{second.label}", first.eigenvalue * second.eigenvalue,
               Operator(a.layout, first.projector.entries @ second.projector.entries))
        for first in a.branches for second in b.branches)
    return Observable(a.layout, branches, name=f"{a.name}&{b.name}", targets=_merged_targets(a, b))


def product_observable(a: Observable, b: Observable, eps: Optional[float] = None) -> Observable:
    """Observable A·B: joint branches grouped by eigenvalue product."""
    joint = joint_observable(a, b, eps)
    grouped = defaultdict(list)
    for branch in joint.branches:
        grouped[round(branch.eigenvalue, EIGENVALUE_DECIMALS)].append(branch.projector.entries)
    branches = tuple(
        Branch(format_eigenvalue(value), float(value), Operator(a.layout, sum(matrices), is_projector=True))
        for value, matrices in sorted(grouped.items(), key=lambda item: -item[0]))
    return Observable(a.layout, branches, name=f"{a.name}{b.name}", targets=joint.targets)


def group_by_eigenvalue(obs: Observable) -> Dict[float, np.ndarray]:
    """Spectral projectors keyed by rounded eigenvalue (degenerate branches merged)."""
    grouped: Dict[float, np.ndarray] = {}
    for branch in obs.branches:
        key = round(branch.eigenvalue, EIGENVALUE_DECIMALS)
        grouped[key] = grouped.get(key, 0) + branch.projector.entries
    return grouped
