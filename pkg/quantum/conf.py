"""Read simulator settings from Django, falling back to built-in defaults."""
from __future__ import annotations

from typing import Any, Optional

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

DEFAULTS = {
    'TSVF_EPS': 1e-12,
    'TSVF_CERTAINTY_TOLERANCE': 1e-9,
    'TSVF_MAX_DIMENSION': 2 ** 16,
    'TSVF_WEAK_DEFAULTS': {
        'g': 0.05,
        'delta': 1.0,
        'post_samples': 100_000,
        'seed': 42,
        'grid_points': 2 ** 14,
        'shards': 1,
    },
}


def get_setting(name: str) -> Any:
    # The numeric modules also work as a plain library without a settings module.
    try:
        return getattr(settings, name, DEFAULTS[name])
    except ImproperlyConfigured:
        return DEFAULTS[name]


def resolve_eps(eps: Optional[float] = None) -> float:
    return float(get_setting('TSVF_EPS') if eps is None else eps)


def resolve_certainty(tolerance: Optional[float] = None) -> float:
    return float(get_setting('TSVF_CERTAINTY_TOLERANCE') if tolerance is None else tolerance)


def max_dimension() -> int:
    return int(get_setting('TSVF_MAX_DIMENSION'))


def weak_defaults() -> dict:
    return dict(get_setting('TSVF_WEAK_DEFAULTS'))
