"""Detuning sweeps, 2D absorption maps and transparency-window extraction."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import analytic, liouville
from .model import EVALUATOR_TAGS, LambdaParams, ParameterError, TripodParams, validate_params

TWO_ARM = ("analytic-full", "analytic-two-lambda", "numeric-tripod")

# evaluator(params, delta_c array) -> complex array
Evaluator = Callable[[TripodParams, np.ndarray], np.ndarray]


class EvaluationError(RuntimeError):
    """An evaluator failed at a specific detuning."""


def get_evaluator(tag: str, model: str = liouville.DEFAULT_MODEL) -> Evaluator:
    if tag == "analytic-full":
        return lambda p, dc: analytic.h_full_values(dc, p.Delta, p.g_c, p.alpha, p.beta)[0]
    if tag == "analytic-two-lambda":
        return lambda p, dc: analytic.h_two_lambda(dc, p.Delta, p.g_c)
    if tag == "analytic-lambda-exact":
        return lambda p, dc: analytic.lambda_exact_values(dc, p.Delta, p.g_c, p.g_p)
    if tag == "numeric-tripod":
        return lambda p, dc: liouville.probe_spectrum(p, dc, model)
    if tag == "numeric-lambda":
        return lambda p, dc: liouville.lambda_probe_spectrum(
            LambdaParams(**p.to_dict()), dc, model
        )
    raise ValueError(f"unknown evaluator {tag!r}; expected one of {', '.join(EVALUATOR_TAGS)}")


@dataclass(frozen=True)
class Spectrum:
    params: TripodParams
    evaluator: str
    delta_c: np.ndarray
    h: np.ndarray
    model: str | None = None

    def __post_init__(self):
        if self.delta_c.size < 2 or np.any(np.diff(self.delta_c) <= 0):
            raise ValueError("spectrum needs >= 2 strictly increasing delta_c values")
        if self.delta_c.shape != self.h.shape:
            raise ValueError("delta_c and h differ in length")

    @property
    def absorption(self) -> np.ndarray:
        return self.h.imag

    @property
    def dispersion(self) -> np.ndarray:
        return self.h.real


def _model_tag(tag, model):
    return model if tag.startswith("numeric") else None


def _evaluate(evaluator, tag, params, delta_c):
    try:
        h = np.asarray(evaluator(params, delta_c), dtype=complex)
    except (ArithmeticError, liouville.NumericalError) as exc:
        raise EvaluationError(f"{tag} failed for {params}: {exc}") from exc
    bad = np.flatnonzero(~np.isfinite(h))
    if bad.size:
        raise EvaluationError(f"{tag} returned a non-finite value at delta_c={delta_c[bad[0]]:g}")
    return h


def sweep_delta_c(tag: str, params, range_=(-15.0, 15.0), n: int = 601, model: str = liouville.DEFAULT_MODEL) -> Spectrum:
    """Evaluate ``tag`` on ``n`` equally spaced detunings, endpoints included."""
    lo, hi = range_
    if n < 2 or not lo < hi:
        raise ParameterError([f"sweep needs n >= 2 and min < max (got n={n}, range={range_})"])
    validate_params(params)
    dc = np.linspace(lo, hi, n)
    h = _evaluate(get_evaluator(tag, model), tag, params, dc)
    return Spectrum(params, tag, dc, h, _model_tag(tag, model))


@dataclass(frozen=True)
class ScanGrid2D:
    axis: str
    axis_values: np.ndarray
    delta_c: np.ndarray
    absorption: np.ndarray  # (len(axis_values), len(delta_c))
    params: TripodParams
    evaluator: str
    model: str | None = None

    def __post_init__(self):
        if self.absorption.shape != (self.axis_values.size, self.delta_c.size):
            raise ValueError("absorption grid does not match its axes")
        if not np.all(np.isfinite(self.absorption)):
            raise ValueError("absorption grid has non-finite entries")

    def row(self, value: float) -> np.ndarray:
        k = int(np.argmin(np.abs(self.axis_values - value)))
        return self.absorption[k]


def scan_2d(
    tag: str,
    base,
    axis: str,
    axis_range,
    axis_n: int,
    delta_c_range=(-15.0, 15.0),
    delta_c_n: int = 601,
    model: str = liouville.DEFAULT_MODEL,
    workers: int = 1,
) -> ScanGrid2D:
    """Absorption map: one :func:`sweep_delta_c` row per value of ``axis``.

    Rows are independent; with ``workers > 1`` they run on a thread pool and
    are reassembled in axis order.
    """
    if axis not in ("g_c", "Delta", "alpha"):
        raise ParameterError([f"scan axis must be g_c, Delta or alpha, got {axis!r}"])
    if axis_n < 2 or not axis_range[0] < axis_range[1]:
        raise ParameterError(["scan axis needs count >= 2 and min < max"])
    values = np.linspace(axis_range[0], axis_range[1], axis_n)

    def row(v):
        return sweep_delta_c(tag, base.replace(**{axis: float(v)}), delta_c_range, delta_c_n, model).h.imag

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, values))
    else:
        rows = [row(v) for v in values]
    dc = np.linspace(delta_c_range[0], delta_c_range[1], delta_c_n)
    return ScanGrid2D(axis, values, dc, np.vstack(rows), base, tag, _model_tag(tag, model))


# -- window analysis --------------------------------------------------------------


def overlap_regime(g_c: float, Delta: float, tol: float = 0.02) -> str:
    if g_c <= 0 or Delta < 0:
        raise ValueError("overlap_regime needs g_c > 0 and Delta >= 0")
    if abs(g_c - Delta) <= tol * max(g_c, Delta):
        return "eia"
    return "separated" if g_c < Delta else "merged"


@dataclass(frozen=True)
class Window:
    center: float  # midpoint of the flanking peaks
    width: float  # peak separation
    floor: float  # lowest absorption inside
    floor_at: float  # where that minimum sits
    left_peak: float
    right_peak: float


@dataclass
class WindowReport:
    windows: list[Window]
    peaks: list[tuple[float, float]]
    regime: str | None
    eia_value: float | None = None
    central: Window | None = None
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        def w(x):
            return None if x is None else dict(vars(x))

        return {
            "windows": [w(x) for x in self.windows],
            "peaks": [list(p) for p in self.peaks],
            "regime": self.regime,
            "eia_value": self.eia_value,
            "central": w(self.central),
            "diagnostics": list(self.diagnostics),
        }


def find_peaks(y: np.ndarray, threshold: float) -> np.ndarray:
    """Indices of strict interior local maxima above ``threshold``."""
    inner = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:]) & (y[1:-1] > threshold)
    return np.flatnonzero(inner) + 1


def analyze_windows(
    s: Spectrum,
    peak_threshold: float = 0.1,
    floor_ratio: float = 0.5,
    regime_tol: float = 0.02,
) -> WindowReport:
    """Transparency windows of an absorption spectrum.

    Peaks are strict local maxima of Im h above ``peak_threshold``. Each pair
    of adjacent peaks whose interior minimum falls below ``floor_ratio`` times
    the lower peak bounds a dip. Its center is the midpoint of the two peaks
    and its width their separation; the interior argmin is kept as
    ``floor_at`` (the far arm's tail pulls it slightly off center).

    In two-arm (tripod) spectra the dip whose flanking peaks straddle
    delta_c = 0 lies between the two arms or in their overlap, so it is
    reported as ``central`` rather than as a window.
    """
    x, y = s.delta_c, s.h.imag
    idx = find_peaks(y, peak_threshold)
    peaks = [(float(x[k]), float(y[k])) for k in idx]
    regime = overlap_regime(s.params.g_c, s.params.Delta, regime_tol) if s.params.g_c > 0 else None
    report = WindowReport([], peaks, regime)
    if len(idx) < 2:
        report.diagnostics.append(f"found {len(idx)} peak(s) above {peak_threshold}; need 2 to bound a window")
    two_arm = s.evaluator in TWO_ARM
    for a, b in zip(idx[:-1], idx[1:]):
        k = a + int(np.argmin(y[a : b + 1]))
        floor = float(y[k])
        if floor >= floor_ratio * min(y[a], y[b]):
            continue
        win = Window(0.5 * float(x[a] + x[b]), float(x[b] - x[a]), floor, float(x[k]), float(x[a]), float(x[b]))
        if two_arm and x[a] < 0 < x[b]:
            report.central = win
        else:
            report.windows.append(win)
    if regime == "eia":
        report.eia_value = float(y[int(np.argmin(np.abs(x)))])
    return report
