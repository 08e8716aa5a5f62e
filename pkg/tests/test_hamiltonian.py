import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tripod_eit.hamiltonian import (
    NumericalError,
    build_lambda_h,
    build_tripod_h,
    closed_form_eigenvector,
    cubic_roots,
    eigensystem,
    find_dark_states,
    format_matrix,
    symmetric_frame_h,
)
from tripod_eit.model import LambdaParams, TripodParams

small = st.floats(-10, 10, allow_nan=False)
pos = st.floats(0, 10, allow_nan=False)
params = st.builds(TripodParams, g_p=pos, g_c=pos, delta_c=small, Delta=small)


def char_poly(h):
    """Faddeev-LeVerrier: coefficients of det(l I - H), highest first."""
    n = h.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(h)
    for k in range(1, n + 1):
        m = h @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(h @ m) / k)
    return np.array(coeffs)


def random_hermitian(rng, n=4):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


# -- builders ------------------------------------------------------------------------


def test_zero_fields_give_zero_matrix():
    assert not np.any(build_tripod_h(TripodParams(g_p=0, g_c=0, delta_c=0, Delta=0)))
    assert not np.any(build_lambda_h(LambdaParams(g_p=0, g_c=0, delta_c=3, Delta=3)))


def test_tripod_entries_at_two_photon_resonance():
    h = build_tripod_h(TripodParams(delta_c=5, Delta=5, g_p=0.01, g_c=5))
    assert np.allclose(np.diag(h), [0, 0, 0, 10])
    assert h[0, 1] == -0.005 and h[0, 2] == -2.5 and h[0, 3] == -0.005
    assert h[1, 2] == h[1, 3] == h[2, 3] == 0


def test_lambda_entries():
    h = build_lambda_h(LambdaParams(delta_c=7, Delta=5, g_c=4))
    assert np.allclose(np.diag(h), [0, 2, 0])
    assert h[0, 2] == -2


@given(params)
def test_builders_are_exactly_hermitian(p):
    for h in (build_tripod_h(p), build_lambda_h(LambdaParams(**p.to_dict()))):
        assert np.array_equal(h, h.conj().T)


def test_format_matrix_layout():
    text = format_matrix(np.eye(2), 3)
    lines = text.splitlines()
    assert lines[0].startswith("# 2x2") and len(lines) == 3
    assert "+1.000+0.000j" in lines[1]


# -- eigensystem ----------------------------------------------------------------------


def test_diagonal_matrix():
    es = eigensystem(np.diag([4.0, 2.0, 3.0, 1.0]))
    assert np.allclose(es.values, [1, 2, 3, 4])
    assert np.allclose(np.abs(es.vectors), np.eye(4)[:, [3, 1, 2, 0]])


def test_coupling_block_splits_by_half_rabi():
    es = eigensystem(build_tripod_h(TripodParams(g_p=0, delta_c=0, Delta=0, g_c=3)))
    assert np.allclose(es.values, [-1.5, 0, 0, 1.5], atol=1e-14)


@pytest.mark.parametrize("seed", range(20))
def test_random_hermitian_contract(seed):
    h = random_hermitian(np.random.default_rng(seed))
    es = eigensystem(h)
    for lam, v in es.pairs():
        assert np.linalg.norm(h @ v - lam * v) <= 1e-10 * np.linalg.norm(h, 2)
    assert np.allclose(es.vectors.conj().T @ es.vectors, np.eye(4), atol=1e-10)
    assert np.all(np.diff(es.values.real) >= 0)
    for k in range(4):
        first = es.vectors[np.flatnonzero(np.abs(es.vectors[:, k]) > 1e-12)[0], k]
        assert first.imag == 0 and first.real > 0
    # independent oracle: characteristic polynomial roots via the companion matrix
    roots = np.sort(np.roots(char_poly(h)).real)
    assert np.allclose(roots, es.values.real, atol=1e-8)


@given(params)
def test_tripod_spectrum_matches_companion_oracle(p):
    h = build_tripod_h(p)
    es = eigensystem(h)
    roots = np.sort(np.roots(char_poly(h)).real)
    scale = max(1.0, np.abs(h).max())
    assert np.allclose(roots, es.values.real, atol=1e-6 * scale)


def test_non_hermitian_path():
    h = np.array([[0, 1], [-1, 0]], dtype=complex)
    es = eigensystem(h, hermitian=False)
    assert np.allclose(es.values, [-1j, 1j])


def test_eigensystem_rejects_bad_input():
    with pytest.raises(ValueError):
        eigensystem(np.zeros((2, 3)))
    with pytest.raises(NumericalError):
        eigensystem(np.array([[np.nan, 0], [0, 1]]), hermitian=False)


# -- dark states -------------------------------------------------------------------------


def test_ideal_dark_state_at_zero_splitting():
    es = eigensystem(build_tripod_h(TripodParams(Delta=0, delta_c=0, g_p=1, g_c=1)))
    dark = find_dark_states(es)
    target = np.array([0, 1, 0, -1]) / np.sqrt(2)  # (0, -1, 0, 1)/sqrt2 up to phase
    assert any(abs(d.value) < 1e-12 and abs(abs(np.vdot(target, d.vector)) - 1) < 1e-12 for d in dark)
    assert any(d.is_ideal(1e-8) for d in dark)


def test_arm_dark_state_at_two_photon_resonance():
    es = eigensystem(build_tripod_h(TripodParams(delta_c=5, Delta=5, g_p=1, g_c=2)))
    dark = find_dark_states(es)
    target = np.array([0, 2, -1, 0]) / np.sqrt(5)
    match = [d for d in dark if abs(abs(np.vdot(target, d.vector)) - 1) < 1e-10]
    assert match and abs(match[0].value) < 1e-12
    assert match[0].coupled_amplitude > 0.4 and not match[0].is_ideal(1e-8)


def test_generic_point_has_no_dark_state():
    es = eigensystem(build_tripod_h(TripodParams(delta_c=1, Delta=3, g_p=1, g_c=2)))
    assert find_dark_states(es, tol=1e-8) == []


@given(st.floats(0.01, 5), st.floats(0.01, 5), small)
def test_antisymmetric_ground_state_is_dark_at_zero_splitting(gp, gc, dc):
    h = build_tripod_h(TripodParams(g_p=gp, g_c=gc, delta_c=dc, Delta=0))
    v = np.array([0, -1, 0, 1]) / np.sqrt(2)
    assert np.linalg.norm(h @ v - dc * v) <= 1e-12


@given(st.floats(0.01, 5), st.floats(0.01, 5), st.floats(-10, 10))
def test_arm_dark_states_both_signs(gp, gc, D):
    norm = np.hypot(gc, gp)
    h = build_tripod_h(TripodParams(g_p=gp, g_c=gc, delta_c=D, Delta=D))
    v = np.array([0, gc, -gp, 0]) / norm
    assert np.linalg.norm(h @ v) <= 1e-12
    h = build_tripod_h(TripodParams(g_p=gp, g_c=gc, delta_c=-D, Delta=D))
    v = np.array([0, 0, -gp, gc]) / norm
    assert np.linalg.norm(h @ v) <= 1e-12


def test_degenerate_eigenspace_is_rotated():
    # g_p = 0, Delta = 0: |2>, |4> and the zero mode share eigenvalue 0
    es = eigensystem(build_tripod_h(TripodParams(g_p=0, g_c=2, delta_c=0, Delta=0)))
    dark = find_dark_states(es)
    assert len(dark) == 2 and all(d.is_ideal(1e-10) for d in dark)


# -- closed-form cubic -------------------------------------------------------------------


@pytest.mark.parametrize(
    "p, expected",
    [
        (TripodParams(delta_c=0, g_p=0, g_c=2), [-1, 0, 1]),
        (TripodParams(delta_c=1.5, g_p=0, g_c=0), [0, 0, 3]),
        (TripodParams(delta_c=1, g_p=0, g_c=2), [1 - np.sqrt(2), 0, 1 + np.sqrt(2)]),
    ],
)
def test_cubic_root_sets(p, expected):
    assert np.allclose(cubic_roots(p), expected, atol=1e-12, rtol=0)


@given(st.floats(0, 5), st.floats(0, 5), st.floats(-5, 5))
def test_cubic_vieta(gp, gc, dc):
    r = cubic_roots(TripodParams(g_p=gp, g_c=gc, delta_c=dc))
    scale = 1 + gp**2 + gc**2 + dc**2
    assert abs(r.sum() - 2 * dc) <= 1e-9 * scale
    assert abs(np.prod(r) + dc * gp**2) <= 1e-9 * scale**1.5


@given(st.floats(0.05, 5), st.floats(0.05, 5), st.floats(-5, 5))
def test_cubic_plus_zero_is_symmetric_frame_spectrum(gp, gc, dc):
    p = TripodParams(g_p=gp, g_c=gc, delta_c=dc)
    ev = np.sort(np.linalg.eigvalsh(symmetric_frame_h(p)))
    both = np.sort(np.append(cubic_roots(p).real, 0.0))
    assert np.allclose(ev, both, atol=1e-8)


def test_closed_form_eigenvector_examples():
    p = TripodParams(g_p=0.5, g_c=2)
    v, _ = closed_form_eigenvector(0.0, p)
    assert np.allclose(v, [0, 1, -0.5, 1])
    v, _ = closed_form_eigenvector(1.0, TripodParams(g_p=2, g_c=2))
    assert np.allclose(v, [-1, 1, -1, 1])
    with pytest.raises(ValueError):
        closed_form_eigenvector(1.0, TripodParams(g_p=0))


@given(st.floats(0.05, 5), st.floats(0.05, 5), st.floats(-5, 5))
def test_closed_form_eigenvectors_exact_in_symmetric_frame(gp, gc, dc):
    p = TripodParams(g_p=gp, g_c=gc, delta_c=dc)
    for lam in cubic_roots(p):
        v, residual = closed_form_eigenvector(lam, p)
        assert residual <= 1e-9 * np.linalg.norm(v) * (1 + abs(lam))


def test_closed_form_frame_differs_from_rotating_frame():
    # the cubic is not the characteristic polynomial of the rotating-frame H
    p = TripodParams(g_p=1, g_c=2, delta_c=1, Delta=3)
    ev = np.linalg.eigvalsh(build_tripod_h(p))
    assert min(np.min(np.abs(ev - r)) for r in cubic_roots(p).real) > 1e-3
