"""Parameter records and figure presets.

Every frequency and rate is dimensionless, in units of the spontaneous
emission rate gamma (gamma = 1).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

FIELDS = ("g_p", "g_c", "delta_c", "Delta", "alpha", "beta")


class ParameterError(ValueError):
    """Raised when a parameter record violates its invariants.

    ``violations`` holds one message per offending field.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class TripodParams:
    """Four-level tripod: excited |1>, ground sublevels |2>, |3>, |4>.

    g_p, g_c   probe and coupling Rabi frequencies
    delta_c    probe-coupling frequency difference (omega_p - omega_c)
    Delta      Zeeman splitting between adjacent ground sublevels
    alpha      ground-state (non-radiative) relaxation rate, per channel
    beta       radiative decay rate of |1> into each ground sublevel
    """

    g_p: float = 0.001
    g_c: float = 5.0
    delta_c: float = 0.0
    Delta: float = 5.0
    alpha: float = 0.001
    beta: float = 0.666

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in FIELDS}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]):
        keys = set(data)
        missing = [k for k in FIELDS if k not in keys]
        extra = sorted(keys - set(FIELDS))
        problems = [f"missing field {k}" for k in missing]
        problems += [f"unknown field {k}" for k in extra]
        for k in FIELDS:
            if k in data and (isinstance(data[k], bool) or not isinstance(data[k], (int, float))):
                problems.append(f"{k} must be a number")
        if problems:
            raise ParameterError(problems)
        return validate_params(cls(**{k: float(data[k]) for k in FIELDS}))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class LambdaParams(TripodParams):
    """Three-level Lambda: excited |e>, probe ground |g1>, coupling ground |g3>.

    Same fields as the tripod record. ``Delta`` is the g1-g3 splitting that
    detunes the probe arm, and ``beta`` sets the excited linewidth exactly as
    in the tripod (total radiative width 3*beta, shared by the two decay paths).
    """


def validate_params(p):
    """Return ``p`` unchanged if every invariant holds, else raise ParameterError."""
    problems = []
    for name in FIELDS:
        value = getattr(p, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            problems.append(f"{name} must be finite")
    if problems:
        raise ParameterError(problems)
    for name in ("g_p", "g_c", "alpha"):
        if getattr(p, name) < 0:
            problems.append(f"{name} must be nonnegative")
    if p.beta <= 0:
        problems.append("beta must be positive")
    if problems:
        raise ParameterError(problems)
    return p


# -- figure presets ---------------------------------------------------------

EVALUATOR_TAGS = (
    "analytic-full",
    "analytic-two-lambda",
    "numeric-tripod",
    "analytic-lambda-exact",
    "numeric-lambda",
)

#: probe strength used by every preset; the figures are linear-response spectra
PRESET_PROBE = 0.001


@dataclass(frozen=True)
class Sweep:
    variable: str
    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ParameterError([f"sweep over {self.variable} needs count >= 2"])
        if not self.min < self.max:
            raise ParameterError([f"sweep over {self.variable} needs min < max"])

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class FigurePreset:
    """Recipe for one figure.

    1D figures list their curves in ``panels`` as (label, field overrides);
    2D maps carry the scanned parameter in ``axis``.
    """

    name: str
    params: TripodParams
    sweep: Sweep
    evaluator: str
    axis: Sweep | None = None
    panels: tuple[tuple[str, tuple[tuple[str, float], ...]], ...] = ()
    note: str = ""

    def panel_params(self) -> list[tuple[str, TripodParams]]:
        return [(label, self.params.replace(**dict(over))) for label, over in self.panels]


_DELTA_C = Sweep("delta_c", -15.0, 15.0, 601)
_BASE = TripodParams(g_p=PRESET_PROBE, g_c=5.0, delta_c=0.0, Delta=5.0, alpha=0.001, beta=0.666)


def _panels(var, values):
    labels = "abcdefgh"
    return tuple((labels[i], ((var, float(v)),)) for i, v in enumerate(values))


PRESETS: dict[str, FigurePreset] = {
    "fig2": FigurePreset(
        "fig2",
        _BASE,
        _DELTA_C,
        "numeric-tripod",
        panels=_panels("g_c", (1.0, 2.5, 5.0, 7.5)),
        note="panel g_c values chosen to span the separated, eia and merged regimes",
    ),
    "fig5": FigurePreset(
        "fig5",
        _BASE,
        _DELTA_C,
        "numeric-tripod",
        axis=Sweep("g_c", 0.0, 10.0, 101),
    ),
    "fig6": FigurePreset(
        "fig6",
        _BASE,
        _DELTA_C,
        "numeric-tripod",
        axis=Sweep("Delta", 0.0, 10.0, 101),
    ),
    "fig7": FigurePreset(
        "fig7",
        _BASE,
        _DELTA_C,
        "numeric-tripod",
        panels=_panels("Delta", (0.0, 2.5, 5.0, 7.5)),
    ),
    "fig8": FigurePreset(
        "fig8",
        _BASE.replace(Delta=2.5),
        _DELTA_C,
        "numeric-tripod",
        panels=_panels("alpha", (0.001, 0.1)),
        note="g_c = 5 with a weak probe; the closed-form response carries no g_p dependence",
    ),
}


def preset_for(figure: str) -> FigurePreset:
    try:
        return PRESETS[figure]
    except KeyError:
        raise KeyError(f"unknown figure {figure!r}; expected one of {', '.join(PRESETS)}") from None
