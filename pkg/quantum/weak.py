"""
Weak measurements on pre- and post-selected ensembles.

Pointer model: impulsive von Neumann coupling g*A*p between the system and a
pointer whose position wavefunction is G(q) = (2 pi D^2)^(-1/4) exp(-q^2 / 4D^2),
so the unconditioned reading has standard deviation D. After post-selection
on |phi> the pointer is left in sum_a <phi|P_a|psi> G(q - g a), where P_a runs
over the spectral projectors of A.

Every quantity below that has a closed form is computed in closed form; the
grid density is used for sampling only.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .conf import resolve_eps
from .exceptions import InvalidObservableError, UndefinedWeakValueError, UnreachablePostSelectionError
from .hilbert import Ket, Operator, matrix_element
from .measurement import Observable, group_by_eigenvalue
from .tsvf import TwoStateVector

logger = logging.getLogger(__name__)

# Grid half-margin beyond the outermost pointer peaks, in units of D.
GRID_MARGIN = 8.0


@dataclass(frozen=True)
class WeakValue:
    value: complex
    numerator: complex
    denominator: complex

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag


@dataclass(frozen=True)
class WeakMeasurementConfig:
    g: float
    delta: float
    post_samples: int = 100_000
    seed: int = 0
    grid_points: int = 2 ** 14
    shards: int = 1

    def __post_init__(self):
        for name in ('g', 'delta'):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be finite and positive, got {value}")
        if self.post_samples < 1:
            raise ValueError(f"post_samples must be positive, got {self.post_samples}")
        if self.grid_points < 2:
            raise ValueError(f"grid_points must be at least 2, got {self.grid_points}")
        if self.shards < 1:
            raise ValueError(f"shards must be positive, got {self.shards}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")

    def grid(self, a_min: float, a_max: float) -> np.ndarray:
        return np.linspace(self.g * a_min - GRID_MARGIN * self.delta,
                           self.g * a_max + GRID_MARGIN * self.delta,
                           self.grid_points)


@dataclass(frozen=True, eq=False)
class PointerDensity:
    grid: np.ndarray
    density: np.ndarray
    # Trapezoid integral of the unnormalized density: the post-selection probability.
    normalization: float

    def integral(self) -> float:
        return float(np.trapezoid(self.density, self.grid))

    def mean(self) -> float:
        return float(np.trapezoid(self.grid * self.density, self.grid))

    def std(self) -> float:
        mean = self.mean()
        return math.sqrt(max(float(np.trapezoid((self.grid - mean) ** 2 * self.density, self.grid)), 0.0))

    def cdf(self) -> np.ndarray:
        steps = 0.5 * (self.density[1:] + self.density[:-1]) * np.diff(self.grid)
        cdf = np.concatenate(([0.0], np.cumsum(steps)))
        return cdf / cdf[-1]


@dataclass(frozen=True)
class WeakRunReport:
    estimate: float
    exact_mean_over_g: float
    target_weak_value: complex
    standard_error: float
    post_selection_rate: float
    disturbance_fidelity: float
    g: float
    delta: float
    post_samples: int
    seed: int
    grid_points: int
    shards: int
    shard_sizes: Tuple[int, ...]


OperatorLike = Union[Operator, Observable]


def _as_operator(a: OperatorLike) -> Operator:
    return a.operator() if isinstance(a, Observable) else a


def weak_value(tsv: TwoStateVector, a: OperatorLike, eps: Optional[float] = None) -> WeakValue:
    """A_w = <phi|A|psi> / <phi|psi>."""
    eps = resolve_eps(eps)
    operator = _as_operator(a)
    if not operator.is_hermitian(eps):
        raise InvalidObservableError('weak values are defined here for Hermitian operators only')
    denominator = tsv.overlap()
    if abs(denominator) <= eps:
        raise UndefinedWeakValueError('pre- and post-selected states are orthogonal; the weak value is undefined')
    numerator = matrix_element(tsv.post, operator, tsv.pre)
    return WeakValue(numerator / denominator, numerator, denominator)


def _spectral_amplitudes(tsv: TwoStateVector, obs: Observable, eps: float) -> Tuple[np.ndarray, np.ndarray]:
    grouped = group_by_eigenvalue(obs)
    values = np.array(sorted(grouped), dtype=float)
    amplitudes = np.array([np.vdot(tsv.post.amplitudes, grouped[v] @ tsv.pre.amplitudes) for v in values])
    if float(np.sum(np.abs(amplitudes) ** 2)) <= eps:
        raise UnreachablePostSelectionError(
            f"every branch amplitude <phi|P_a|psi> of {obs.name or 'the observable'} vanishes")
    return values, amplitudes


def _overlap_kernel(values: np.ndarray, g: float, delta: float) -> np.ndarray:
    """kappa_ab = <G(q - g b)|G(q - g a)> = exp(-g^2 (a - b)^2 / 8 D^2)."""
    difference = values[:, None] - values[None, :]
    return np.exp(-(g * difference) ** 2 / (8.0 * delta ** 2))


def post_selection_probability(tsv: TwoStateVector, obs: Observable, g: float, delta: float,
                               eps: Optional[float] = None) -> float:
    values, c = _spectral_amplitudes(tsv, obs, resolve_eps(eps))
    weights = np.outer(c, c.conj()) * _overlap_kernel(values, g, delta)
    return float(weights.sum().real)


def _pointer_moments(tsv: TwoStateVector, obs: Observable, g: float, delta: float,
                     eps: Optional[float]) -> Tuple[float, float]:
    values, c = _spectral_amplitudes(tsv, obs, resolve_eps(eps))
    weights = np.outer(c, c.conj()) * _overlap_kernel(values, g, delta)
    centers = 0.5 * g * (values[:, None] + values[None, :])
    norm = weights.sum().real
    mean = (weights * centers).sum().real / norm
    second = (weights * (centers ** 2 + delta ** 2)).sum().real / norm
    return float(mean), float(second)


def exact_pointer_mean(tsv: TwoStateVector, obs: Observable, g: float, delta: float,
                       eps: Optional[float] = None) -> float:
    """Mean post-selected pointer position, in pointer units (divide by g for A units)."""
    return _pointer_moments(tsv, obs, g, delta, eps)[0]


def exact_pointer_std(tsv: TwoStateVector, obs: Observable, g: float, delta: float,
                      eps: Optional[float] = None) -> float:
    mean, second = _pointer_moments(tsv, obs, g, delta, eps)
    return math.sqrt(max(second - mean ** 2, 0.0))


def strong_limit_mean(tsv: TwoStateVector, obs: Observable, eps: Optional[float] = None) -> float:
    """sum_a ABL(a) * a over the spectral decomposition: the g/D -> infinity pointer mean / g."""
    values, c = _spectral_amplitudes(tsv, obs, resolve_eps(eps))
    weights = np.abs(c) ** 2
    return float(np.dot(weights, values) / weights.sum())


def pointer_density(tsv: TwoStateVector, obs: Observable, config: WeakMeasurementConfig,
                    eps: Optional[float] = None) -> PointerDensity:
    values, c = _spectral_amplitudes(tsv, obs, resolve_eps(eps))
    grid = config.grid(values.min(), values.max())
    prefactor = (2.0 * math.pi * config.delta ** 2) ** -0.25
    shifted = grid[None, :] - config.g * values[:, None]
    wavefunction = (c[:, None] * prefactor * np.exp(-shifted ** 2 / (4.0 * config.delta ** 2))).sum(axis=0)
    raw = np.abs(wavefunction) ** 2
    normalization = float(np.trapezoid(raw, grid))
    if normalization <= 0.0:
        raise UnreachablePostSelectionError('post-selected pointer density vanishes on the grid')
    return PointerDensity(grid, raw / normalization, normalization)


def inverse_cdf_sample(grid: np.ndarray, cdf: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Invert a piecewise-linear CDF; flat stretches of the CDF are never landed in."""
    upper = np.clip(np.searchsorted(cdf, uniforms, side='right'), 1, len(cdf) - 1)
    lower = upper - 1
    span = cdf[upper] - cdf[lower]
    fraction = np.divide(uniforms - cdf[lower], span, out=np.zeros_like(uniforms), where=span > 0)
    return grid[lower] + fraction * (grid[upper] - grid[lower])


def shard_sizes(total: int, shards: int) -> Tuple[int, ...]:
    base, extra = divmod(total, shards)
    return tuple(base + (1 if index < extra else 0) for index in range(shards))


def _draw(grid: np.ndarray, cdf: np.ndarray, seeds: Sequence[np.random.SeedSequence],
          sizes: Sequence[int]) -> np.ndarray:
    def shard(job):
        seed_sequence, size = job
        rng = np.random.default_rng(seed_sequence)
        return inverse_cdf_sample(grid, cdf, rng.random(size))

    jobs = list(zip(seeds, sizes))
    if len(jobs) == 1:
        return shard(jobs[0])
    with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
        return np.concatenate(list(pool.map(shard, jobs)))


def disturbance_fidelity(pre: Ket, obs: Observable, g: float, delta: float,
                         eps: Optional[float] = None) -> float:
    """<psi|rho'|psi> after coupling to the pointer and tracing it out."""
    pre.require_normalized(eps, 'pre-selected state')
    grouped = group_by_eigenvalue(obs)
    values = np.array(sorted(grouped), dtype=float)
    weights = np.array([np.vdot(pre.amplitudes, grouped[v] @ pre.amplitudes).real for v in values])
    return float(weights @ _overlap_kernel(values, g, delta) @ weights)


def sample_pointer(tsv: TwoStateVector, obs: Observable, config: WeakMeasurementConfig,
                   eps: Optional[float] = None) -> WeakRunReport:
    """
    Draw post-selected pointer readings and estimate the weak value.

    Readings come from inverse-CDF sampling of the grid density. With one
    shard the generator is seeded from ``config.seed`` directly; with k shards
    the seed is spawned into k child sequences and the shards are concatenated
    in order, so a fixed (seed, grid, N, k) always gives the same report.
    """
    target = weak_value(tsv, obs, eps)
    density = pointer_density(tsv, obs, config, eps)
    sizes = shard_sizes(config.post_samples, config.shards)
    root = np.random.SeedSequence(config.seed)
    seeds = [root] if config.shards == 1 else root.spawn(config.shards)
    readings = _draw(density.grid, density.cdf(), seeds, sizes)

    if config.post_samples >= 2:
        spread = float(np.std(readings, ddof=1))
    else:
        # One reading carries no spread of its own; fall back to the exact pointer width.
        spread = exact_pointer_std(tsv, obs, config.g, config.delta, eps)
    report = WeakRunReport(
        estimate=float(np.mean(readings)) / config.g,
        exact_mean_over_g=exact_pointer_mean(tsv, obs, config.g, config.delta, eps) / config.g,
        target_weak_value=target.value,
        standard_error=spread / config.g / math.sqrt(config.post_samples),
        post_selection_rate=density.normalization,
        disturbance_fidelity=disturbance_fidelity(tsv.pre, obs, config.g, config.delta, eps),
        g=config.g,
        delta=config.delta,
        post_samples=config.post_samples,
        seed=config.seed,
        grid_points=config.grid_points,
        shards=config.shards,
        shard_sizes=sizes,
    )
    logger.info(f"Drew {config.post_samples} post-selected readings in {config.shards} shard(s): "
                f"estimate {report.estimate:.6g} +/- {report.standard_error:.3g}")
    return report


@dataclass(frozen=True)
class LimitStep:
    g: float
    mean_over_g: float
    error: float


def weak_limit_study(tsv: TwoStateVector, obs: Observable, g: float, delta: float, halvings: int = 3,
                     eps: Optional[float] = None) -> Tuple[List[LimitStep], List[float]]:
    """Exact pointer mean / g against Re(A_w) while g is halved; returns steps and successive error ratios."""
    target = weak_value(tsv, obs, eps).real
    steps = []
    for k in range(halvings + 1):
        coupling = g / 2 ** k
        mean_over_g = exact_pointer_mean(tsv, obs, coupling, delta, eps) / coupling
        steps.append(LimitStep(coupling, mean_over_g, abs(mean_over_g - target)))
    ratios = [previous.error / current.error for previous, current in zip(steps, steps[1:]) if current.error > 0]
    return steps, ratios
