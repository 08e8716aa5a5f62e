"""Rotating-frame Hamiltonians, eigensystems and dark states.

Basis order is (|1>, |2>, |3>, |4>) for the tripod with |1> excited, and
(|e>, |g1>, |g3>) for the Lambda scheme. Field couplings enter as -Omega/2
with real Rabi frequencies; hbar = gamma = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import validate_params

EXCITED = 0
COUPLED_GROUND = 2  # |3>, driven by the coupling field


class NumericalError(RuntimeError):
    """A numerical routine failed to produce a trustworthy result."""


def build_tripod_h(p) -> np.ndarray:
    validate_params(p)
    h = np.zeros((4, 4), dtype=complex)
    h[1, 1] = p.delta_c - p.Delta
    h[3, 3] = p.delta_c + p.Delta
    h[0, 1] = h[1, 0] = -p.g_p / 2
    h[0, 2] = h[2, 0] = -p.g_c / 2
    h[0, 3] = h[3, 0] = -p.g_p / 2
    return h


def build_lambda_h(p) -> np.ndarray:
    validate_params(p)
    h = np.zeros((3, 3), dtype=complex)
    h[1, 1] = p.delta_c - p.Delta
    h[0, 1] = h[1, 0] = -p.g_p / 2
    h[0, 2] = h[2, 0] = -p.g_c / 2
    return h


def format_matrix(m: np.ndarray, digits: int = 6) -> str:
    """Plain-text layout: one row per line, entries as ``re+imj`` in fixed width."""
    m = np.asarray(m)
    width = digits + 7
    lines = [f"# {m.shape[0]}x{m.shape[1]} complex, row-major"]
    for row in m:
        cells = [f"{z.real:+.{digits}f}{z.imag:+.{digits}f}j".rjust(2 * width) for z in np.asarray(row, complex)]
        lines.append(" ".join(cells))
    return "\n".join(lines)


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray
    vectors: np.ndarray  # columns, matching ``values``

    def pairs(self):
        for k in range(len(self.values)):
            yield self.values[k], self.vectors[:, k]


def _fix_phase(v: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    v = v / np.linalg.norm(v)
    idx = np.flatnonzero(np.abs(v) > atol)
    if idx.size:
        first = v[idx[0]]
        v = v * (abs(first) / first)
    return v


def eigensystem(h: np.ndarray, hermitian: bool = True) -> EigenSystem:
    """Eigenpairs sorted by real part (to 1e-10 relative), then imaginary part.

    Vectors have unit norm with their first nonzero component real and
    positive. For Hermitian input the eigenvalues are returned as exactly real.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    try:
        if hermitian:
            vals, vecs = np.linalg.eigh(h)
            vals = vals.astype(complex)
        else:
            vals, vecs = np.linalg.eig(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(vecs))):
        raise NumericalError("eigensolver returned non-finite output")
    # real parts equal up to rounding count as ties, broken by imaginary part
    scale = max(1.0, float(np.max(np.abs(vals))))
    order = np.lexsort((vals.imag, np.round(vals.real / scale, 10)))
    vals = vals[order]
    vecs = np.column_stack([_fix_phase(vecs[:, k]) for k in order])
    return EigenSystem(vals, vecs)


@dataclass(frozen=True)
class DarkState:
    value: complex
    vector: np.ndarray
    excited_amplitude: float
    coupled_amplitude: float

    def is_ideal(self, tol: float) -> bool:
        """No weight on the excited state nor on the coupling-field ground state."""
        return self.excited_amplitude <= tol and self.coupled_amplitude <= tol


def _clusters(values, tol):
    groups, current = [], [0]
    for k in range(1, len(values)):
        if abs(values[k] - values[current[-1]]) <= tol:
            current.append(k)
        else:
            groups.append(current)
            current = [k]
    groups.append(current)
    return groups


def _split_subspace(basis: np.ndarray, row: np.ndarray, tol: float):
    """Rotate ``basis`` (columns) so that leading columns are orthogonal to ``row``.

    Returns (vectors with zero overlap, remaining vectors).
    """
    amps = row.conj() @ basis
    if np.linalg.norm(amps) <= tol:
        return basis, basis[:, :0]
    # unitary whose first column is along amps^*, the rest span its complement
    q, _ = np.linalg.qr(np.column_stack([amps.conj(), np.eye(basis.shape[1])]))
    rotated = basis @ q[:, : basis.shape[1]]
    return rotated[:, 1:], rotated[:, :1]


def find_dark_states(es: EigenSystem, tol: float = 1e-8) -> list[DarkState]:
    """Eigenpairs with no excited-state amplitude (|<1|v>| <= tol).

    Degenerate eigenspaces are rotated first so that dark combinations are
    isolated, and within the dark part the vectors also free of |3> come first.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    vals = es.values
    scale = max(1.0, float(np.max(np.abs(vals))))
    n = es.vectors.shape[0]
    e1 = np.zeros(n, complex)
    e1[EXCITED] = 1
    e3 = np.zeros(n, complex)
    e3[COUPLED_GROUND] = 1
    found = []
    for group in _clusters(vals, 1e-9 * scale):
        basis = es.vectors[:, group]
        dark, _ = _split_subspace(basis, e1, tol)
        if dark.shape[1] == 0:
            continue
        if dark.shape[1] > 1:
            ideal, rest = _split_subspace(dark, e3, tol)
            dark = np.column_stack([ideal, rest])
        value = complex(np.mean(vals[group]))
        for k in range(dark.shape[1]):
            v = _fix_phase(dark[:, k])
            a1, a3 = abs(v[EXCITED]), abs(v[COUPLED_GROUND])
            if a1 <= tol:
                found.append(DarkState(value, v, float(a1), float(a3)))
    return found


# -- closed-form eigenvalue cubic and eigenvectors -------------------------


def cubic_coefficients(p) -> np.ndarray:
    """Coefficients of 4 l^3 - 8 dc l^2 - (g_c^2 + 2 g_p^2) l + 4 dc g_p^2, highest first."""
    dc = p.delta_c
    return np.array([4.0, -8.0 * dc, -(p.g_c**2 + 2.0 * p.g_p**2), 4.0 * dc * p.g_p**2])


def _polish(coeffs, r, steps=3):
    dp = np.polyder(coeffs)
    for _ in range(steps):
        d = np.polyval(dp, r)
        if d == 0:
            break
        step = np.polyval(coeffs, r) / d
        if not np.isfinite(step):
            break
        r = r - step
    return r


def cubic_roots(p) -> np.ndarray:
    """Roots of the closed-form eigenvalue cubic, sorted by real then imaginary part."""
    coeffs = cubic_coefficients(p)
    roots = np.roots(coeffs).astype(complex)
    roots = np.array([_polish(coeffs, r) for r in roots])
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def symmetric_frame_h(p) -> np.ndarray:
    """Hamiltonian in which the closed-form cubic and eigenvectors are exact.

    Substituting the closed-form eigenvectors row by row forces |1>, |2>, |4>
    to zero energy and puts |3> at 2*delta_c. This frame differs from
    :func:`build_tripod_h`, whose diagonal is (0, dc - Delta, 0, dc + Delta).
    """
    h = np.zeros((4, 4), dtype=complex)
    h[2, 2] = 2.0 * p.delta_c
    h[0, 1] = h[1, 0] = -p.g_p / 2
    h[0, 2] = h[2, 0] = -p.g_c / 2
    h[0, 3] = h[3, 0] = -p.g_p / 2
    return h


def closed_form_eigenvector(lam, p) -> tuple[np.ndarray, float]:
    """Unnormalised closed-form eigenvector (-2l/g_p, 1, -2(g_p^2 - 2l^2)/(g_c g_p), 1).

    Also returns the residual ||H v - lam v|| against :func:`symmetric_frame_h`,
    as a diagnostic.
    """
    if p.g_p == 0 or p.g_c == 0:
        raise ValueError("closed-form eigenvector needs g_p > 0 and g_c > 0")
    gp, gc = p.g_p, p.g_c
    v = np.array([-2 * lam / gp, 1.0, -2 * (gp**2 - 2 * lam**2) / (gc * gp), 1.0], dtype=complex)
    residual = float(np.linalg.norm(symmetric_frame_h(p) @ v - lam * v))
    return v, residual
