"""
Dense complex linear algebra over finite tensor-product spaces.

Basis states are indexed lexicographically: for a layout with dims
(d_0, ..., d_{n-1}) the basis state (i_0, ..., i_{n-1}) sits at
index = sum_k i_k * prod_{j>k} d_j. For qubits index 0 is spin up.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .conf import max_dimension, resolve_eps
from .exceptions import DimensionError, InvalidObservableError, NormalizationError, SizeError


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

PAULI = {'x': SIGMA_X, 'y': SIGMA_Y, 'z': SIGMA_Z}


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SubsystemLayout:
    """Dimensions of each subsystem; the empty layout is the scalar space."""

    dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, 'dims', dims)
        for position, dim in enumerate(dims):
            if dim < 2:
                raise DimensionError(f"subsystem {position} has dimension {dim}; every subsystem needs at least 2")
        total = math.prod(dims)
        if total > max_dimension():
            raise SizeError(f"total dimension {total} exceeds the cap of {max_dimension()}")

    @classmethod
    def qubits(cls, count: int) -> 'SubsystemLayout':
        return cls((2,) * count)

    @property
    def total(self) -> int:
        return math.prod(self.dims)

    @property
    def size(self) -> int:
        return len(self.dims)

    def concat(self, other: 'SubsystemLayout') -> 'SubsystemLayout':
        return SubsystemLayout(self.dims + other.dims)

    def index_of(self, indices: Sequence[int]) -> int:
        if len(indices) != len(self.dims):
            raise DimensionError(f"expected {len(self.dims)} subsystem indices, got {len(indices)}")
        index = 0
        for position, (value, dim) in enumerate(zip(indices, self.dims)):
            if not 0 <= value < dim:
                raise DimensionError(f"index {value} out of range for subsystem {position} of dimension {dim}")
            index = index * dim + value
        return index

    def check_target(self, target: int) -> None:
        if not 0 <= target < len(self.dims):
            raise DimensionError(f"subsystem index {target} out of range for layout {list(self.dims)}")


SCALAR_LAYOUT = SubsystemLayout(())


def _require_same_layout(a: SubsystemLayout, b: SubsystemLayout) -> None:
    if a.dims != b.dims:
        raise DimensionError(f"layout mismatch: {list(a.dims)} vs {list(b.dims)}")


@dataclass(frozen=True, eq=False)
class Ket:
    layout: SubsystemLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _frozen(np.ravel(self.amplitudes))
        if amplitudes.shape[0] != self.layout.total:
            raise DimensionError(
                f"{amplitudes.shape[0]} amplitudes given for a space of dimension {self.layout.total}")
        object.__setattr__(self, 'amplitudes', amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, eps: Optional[float] = None) -> bool:
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0) <= resolve_eps(eps)

    def require_normalized(self, eps: Optional[float] = None, what: str = 'ket') -> None:
        if not self.is_normalized(eps):
            raise NormalizationError(f"{what} is not normalized (norm {self.norm():.15g})", norm=self.norm())

    def normalized(self) -> 'Ket':
        norm = self.norm()
        if norm == 0.0:
            raise NormalizationError("cannot normalize the zero vector", norm=0.0)
        return Ket(self.layout, self.amplitudes / norm)

    def scaled(self, factor: complex) -> 'Ket':
        return Ket(self.layout, self.amplitudes * factor)

    def subsystem_probabilities(self, target: int) -> np.ndarray:
        """Marginal z-basis (computational) probabilities of one subsystem."""
        self.layout.check_target(target)
        weights = np.abs(self.amplitudes.reshape(self.layout.dims)) ** 2
        axes = tuple(k for k in range(self.layout.size) if k != target)
        return weights.sum(axis=axes)

    def __repr__(self):
        return f"Ket(dims={list(self.layout.dims)}, amplitudes={np.round(self.amplitudes, 6).tolist()})"


@dataclass(frozen=True, eq=False)
class Operator:
    layout: SubsystemLayout
    entries: np.ndarray
    is_projector: bool = False

    def __post_init__(self):
        entries = _frozen(self.entries)
        total = self.layout.total
        if entries.shape != (total, total):
            raise DimensionError(f"operator of shape {entries.shape} does not fit a space of dimension {total}")
        object.__setattr__(self, 'entries', entries)
        if self.is_projector and not is_projector(entries):
            raise InvalidObservableError("matrix flagged as projector is not idempotent and Hermitian")

    @classmethod
    def from_matrix(cls, matrix, layout: Optional[SubsystemLayout] = None,
                    is_projector: bool = False) -> 'Operator':
        matrix = np.asarray(matrix, dtype=complex)
        if layout is None:
            layout = SubsystemLayout((matrix.shape[0],))
        return cls(layout, matrix, is_projector)

    @classmethod
    def identity(cls, layout: SubsystemLayout) -> 'Operator':
        return cls(layout, np.eye(layout.total, dtype=complex), is_projector=True)

    def adjoint(self) -> 'Operator':
        return Operator(self.layout, self.entries.conj().T, self.is_projector)

    def is_hermitian(self, eps: Optional[float] = None) -> bool:
        return is_hermitian(self.entries, eps)

    def __matmul__(self, other: 'Operator') -> 'Operator':
        _require_same_layout(self.layout, other.layout)
        return Operator(self.layout, self.entries @ other.entries)

    def __add__(self, other: 'Operator') -> 'Operator':
        _require_same_layout(self.layout, other.layout)
        return Operator(self.layout, self.entries + other.entries)

    def __sub__(self, other: 'Operator') -> 'Operator':
        _require_same_layout(self.layout, other.layout)
        return Operator(self.layout, self.entries - other.entries)

    def __mul__(self, factor: complex) -> 'Operator':
        return Operator(self.layout, self.entries * factor)

    __rmul__ = __mul__

    def __repr__(self):
        kind = 'projector' if self.is_projector else 'operator'
        return f"Operator({kind}, dims={list(self.layout.dims)})"


def is_hermitian(matrix: np.ndarray, eps: Optional[float] = None) -> bool:
    return float(np.max(np.abs(matrix - matrix.conj().T), initial=0.0)) <= resolve_eps(eps)


def is_projector(matrix: np.ndarray, eps: Optional[float] = None) -> bool:
    eps = resolve_eps(eps)
    idempotent = float(np.max(np.abs(matrix @ matrix - matrix), initial=0.0)) <= eps
    return idempotent and is_hermitian(matrix, eps)


def basis_ket(layout: SubsystemLayout, indices: Sequence[int]) -> Ket:
    amplitudes = np.zeros(layout.total, dtype=complex)
    amplitudes[layout.index_of(indices)] = 1.0
    return Ket(layout, amplitudes)


def ket_from_amplitudes(layout: SubsystemLayout, amplitudes: Iterable[complex],
                        normalize: bool = False, eps: Optional[float] = None) -> Ket:
    """Build a ket; unnormalized input is rejected unless ``normalize`` opts in."""
    ket = Ket(layout, np.asarray(list(amplitudes), dtype=complex))
    if normalize:
        return ket.normalized()
    ket.require_normalized(eps)
    return ket


def qubit_ket(up: complex, down: complex) -> Ket:
    return Ket(SubsystemLayout((2,)), np.array([up, down], dtype=complex))


def inner_product(bra: Ket, ket: Ket) -> complex:
    _require_same_layout(bra.layout, ket.layout)
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


def fidelity(a: Ket, b: Ket) -> float:
    """|<a|b>|^2, the phase-insensitive comparison used everywhere."""
    return abs(inner_product(a, b)) ** 2


def same_ray(a: Ket, b: Ket, eps: Optional[float] = None) -> bool:
    return abs(fidelity(a.normalized(), b.normalized()) - 1.0) <= resolve_eps(eps)


def tensor_kets(a: Ket, b: Ket, *more: Ket) -> Ket:
    kets = (a, b) + more
    layout = reduce(lambda acc, k: acc.concat(k.layout), kets[1:], kets[0].layout)
    amplitudes = reduce(np.kron, (k.amplitudes for k in kets))
    return Ket(layout, amplitudes)


def tensor_operators(a: Operator, b: Operator, *more: Operator) -> Operator:
    ops = (a, b) + more
    layout = reduce(lambda acc, o: acc.concat(o.layout), ops[1:], ops[0].layout)
    entries = reduce(np.kron, (o.entries for o in ops))
    return Operator(layout, entries, all(o.is_projector for o in ops))


def projector_onto(k: Ket, eps: Optional[float] = None) -> Operator:
    k.require_normalized(eps)
    return Operator(k.layout, np.outer(k.amplitudes, k.amplitudes.conj()), is_projector=True)


def lift_to_subsystem(op: Union[Operator, np.ndarray], target: int, layout: SubsystemLayout) -> Operator:
    """Embed a single-subsystem operator as I ⊗ ... ⊗ op ⊗ ... ⊗ I."""
    layout.check_target(target)
    if not isinstance(op, Operator):
        op = Operator.from_matrix(op)
    if op.layout.total != layout.dims[target]:
        raise DimensionError(
            f"operator of dimension {op.layout.total} cannot act on subsystem {target} "
            f"of dimension {layout.dims[target]}")
    before = math.prod(layout.dims[:target])
    after = math.prod(layout.dims[target + 1:])
    entries = np.kron(np.kron(np.eye(before, dtype=complex), op.entries), np.eye(after, dtype=complex))
    return Operator(layout, entries, op.is_projector)


def pauli(axis: str, target: int, layout: SubsystemLayout) -> Operator:
    return lift_to_subsystem(PAULI[axis], target, layout)


def apply(op: Operator, k: Ket) -> Ket:
    _require_same_layout(op.layout, k.layout)
    return Ket(k.layout, op.entries @ k.amplitudes)


def expectation(op: Operator, k: Ket) -> complex:
    _require_same_layout(op.layout, k.layout)
    return complex(np.vdot(k.amplitudes, op.entries @ k.amplitudes))


def matrix_element(bra: Ket, op: Operator, ket: Ket) -> complex:
    _require_same_layout(bra.layout, op.layout)
    _require_same_layout(op.layout, ket.layout)
    return complex(np.vdot(bra.amplitudes, op.entries @ ket.amplitudes))


def commutator_norm(a: Operator, b: Operator) -> float:
    _require_same_layout(a.layout, b.layout)
    commutator = a.entries @ b.entries - b.entries @ a.entries
    return float(np.max(np.abs(commutator), initial=0.0))
