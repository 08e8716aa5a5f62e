"""Closed-form weak-probe responses of the tripod and Lambda schemes.

All functions accept numpy arrays for the detuning arguments and broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import validate_params


@dataclass(frozen=True)
class ComplexResponse:
    value: complex | np.ndarray
    components: tuple | None = None  # (h_l, h_r)


def h0(x, g_c):
    """Single-window kernel x / (g_c^2 - x (i + x)).

    At g_c = 0 and x = 0 the expression is 0/0; the value there is taken as 0.
    """
    if np.any(np.asarray(g_c) < 0):
        raise ValueError("g_c must be nonnegative")
    x = np.asarray(x, dtype=float)
    den = g_c**2 - x * (1j + x)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den == 0, 0j, x / np.where(den == 0, 1, den))
    return out[()] if out.ndim == 0 else out


def im_h0(x, g_c):
    """Absorption of the single-window kernel, x^2 / ((g_c^2 - x^2)^2 + x^2)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(x == 0, 0.0, x**2 / np.where(x == 0, 1, (g_c**2 - x**2) ** 2 + x**2))
    return out[()] if out.ndim == 0 else out


def h_two_lambda(delta_c, Delta, g_c):
    """Two independent Lambda windows: (h0(dc - Delta) + h0(dc + Delta)) / 2."""
    delta_c = np.asarray(delta_c, dtype=float)
    return 0.5 * (h0(delta_c - Delta, g_c) + h0(delta_c + Delta, g_c))


def _h_arms(delta_c, Delta, g_c, alpha):
    i = 1j
    a, D, dc, g2 = alpha, Delta, delta_c, g_c**2
    h_l = (3 * a * (2 * a + i * D - i * dc) + g2 * (a + 2 * i * D - 2 * i * dc)) / (
        g2 - (i - D + dc) * (2 * i * a - D + dc)
    )
    h_r = (3 * a * (2 * a - i * D - i * dc) + g2 * (a - 2 * i * D - 2 * i * dc)) / (
        g2 - (i + D + dc) * (2 * i * a + D + dc)
    )
    return h_l, h_r


def h_full_values(delta_c, Delta, g_c, alpha, beta):
    """Array form of :func:`h_full`; returns (h, h_l, h_r)."""
    pref_den = 9 * alpha * beta + 4 * (2 * alpha + beta) * g_c**2
    if pref_den == 0:
        raise ZeroDivisionError("prefactor 9*alpha*beta + 4*(2*alpha + beta)*g_c^2 vanishes")
    h_l, h_r = _h_arms(np.asarray(delta_c, dtype=float), Delta, g_c, alpha)
    return 1j * beta / pref_den * (h_l + h_r), h_l, h_r


def h_full(p) -> ComplexResponse:
    """Weak-probe tripod response with ground relaxation alpha.

    h = i beta / (9 alpha beta + 4 (2 alpha + beta) g_c^2) * (h_l + h_r).
    """
    validate_params(p)
    h, h_l, h_r = h_full_values(p.delta_c, p.Delta, p.g_c, p.alpha, p.beta)
    return ComplexResponse(complex(h), (complex(h_l), complex(h_r)))


def lambda_exact_values(delta_c, Delta, g_c, g_p):
    """-A/B for the Lambda scheme at arbitrary probe strength."""
    dc = np.asarray(delta_c, dtype=float)
    D = Delta
    gc2, gp2 = g_c**2, g_p**2
    x = D - dc
    a = gc2 * (gc2 + gp2 - x * (1j + x)) * x
    b = (
        gc2 * (3 * gp2**2 + x**2 * (1 + D**2 - 2 * D * dc + dc**2 + 4 * gp2))
        + g_c**4 * (3 * gp2 - 2 * x**2)
        + g_c**6
        + gp2 * (gp2**2 + x**2)
    )
    if np.any(b == 0):
        bad = np.atleast_1d(dc)[np.atleast_1d(b == 0)]
        raise ZeroDivisionError(f"-A/B is singular at delta_c = {bad[0]:g}")
    out = -a / b
    return out[()] if np.ndim(out) == 0 else out


def lambda_exact(p) -> complex:
    validate_params(p)
    return complex(lambda_exact_values(p.delta_c, p.Delta, p.g_c, p.g_p))


def lambda_weak_probe(delta_c, Delta, g_c):
    """(dc - Delta) / (g_c^2 - (dc - Delta)(i + dc - Delta)), i.e. h0(dc - Delta)."""
    return h0(np.asarray(delta_c, dtype=float) - Delta, g_c)
