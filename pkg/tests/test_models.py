import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kreinlab.cmatrix import adjoint, frobenius_norm
from kreinlab.models import (COMBOS, GridError, GridSpec, ModelParams, build_full_model, c01_flip_rep,
                             classify_spectrum, full_model, pauli_ops, pauli_rep, restriction_matrix,
                             two_level_matrix)


def roots(ma, mb, gabs):
    # Oracle: numpy polynomial roots of l^2 - (ma+mb) l + ma mb + |g|^2.
    r = np.roots([1, -(ma + mb), ma * mb + gabs**2])
    return sorted(r, key=lambda z: (-z.real, -z.imag))


def test_two_level_examples():
    assert np.array_equal(two_level_matrix(ModelParams(2, 1, 0.25)), [[2, -0.25], [0.25, 1]])
    assert np.array_equal(two_level_matrix(ModelParams(2, 1, 0)), np.diag([2, 1]))
    assert np.array_equal(two_level_matrix(ModelParams(2, 1, 1j)), [[2, -1j], [-1j, 1]])


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(0, 1, 0.1)
    with pytest.raises(ValueError):
        ModelParams(1, 1, 0.1, combo="xx")
    with pytest.raises(ValueError):
        ModelParams(1, 1, 0.1, combo="bb", cutoff=1)


def test_trichotomy_values():
    s = classify_spectrum(ModelParams(2, 1, 0.25))
    assert s.classification == "two_real"
    assert s.eigenvalues[0] == pytest.approx(1.9330127018922193, abs=1e-14)
    assert s.eigenvalues[1] == pytest.approx(1.0669872981077807, abs=1e-14)
    assert s.krein_norms == ("positive", "negative")

    s = classify_spectrum(ModelParams(2, 1, 0.5))
    assert s.classification == "one_real_neutral" and s.defective
    assert s.eigenvalues == (1.5, 1.5)
    assert s.krein_norms == ("neutral",)
    assert np.allclose(s.eigenvectors[0] / s.eigenvectors[0][0], [1, 1])

    s = classify_spectrum(ModelParams(2, 1, 1.0))
    assert s.classification == "complex_pair"
    assert s.eigenvalues[0] == pytest.approx(1.5 + 0.8660254037844386j, abs=1e-14)
    assert s.eigenvalues[1] == s.eigenvalues[0].conjugate()
    assert s.norm_columns() == ("n/a", "n/a")
    assert s.eigenvector_norms == ("neutral", "neutral")


def test_scalar_tie_is_not_defective():
    s = classify_spectrum(ModelParams(1, 1, 0))
    assert s.classification == "one_real_neutral" and not s.defective
    assert s.krein_norms == ("positive", "negative")


def test_sweep_grid_matches_discriminant_sign():
    for j in range(21):  # m_A - m_B = j / 10
        for k in range(21):  # |g| = k / 10
            s = classify_spectrum(ModelParams(1 + j / 10, 1, k / 10))
            sign = j * j - 4 * k * k
            want = "two_real" if sign > 0 else "one_real_neutral" if sign == 0 else "complex_pair"
            assert s.classification == want, (j, k)
            if want == "two_real":
                assert sorted(s.krein_norms) == ["negative", "positive"]
            if want == "complex_pair":
                assert s.eigenvalues[1] == s.eigenvalues[0].conjugate()


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0, 3), st.floats(0, 2 * np.pi))
def test_eigenvalues_match_oracle_and_phase(ma, mb, gabs, theta):
    s = classify_spectrum(ModelParams(ma, mb, gabs * np.exp(1j * theta)))
    if s.classification == "one_real_neutral":
        return
    ref = roots(ma, mb, gabs)
    assert np.allclose(s.eigenvalues, ref, atol=1e-9)


def test_phase_invariance_eight_phases():
    base = classify_spectrum(ModelParams(2, 1, 0.7)).eigenvalues
    for k in range(8):
        got = classify_spectrum(ModelParams(2, 1, 0.7 * np.exp(2j * np.pi * k / 8))).eigenvalues
        assert np.allclose(got, base, atol=1e-14)


@pytest.mark.parametrize("combo", sorted(COMBOS))
def test_full_model_checks(combo):
    H, eta, r = full_model(ModelParams(2, 1, 0.5, combo, 4))
    assert r.passed, [(c.name, c.residual) for c in r.failed()]
    assert np.allclose(restriction_matrix(ModelParams(2, 1, 0.5, combo, 4)), [[2, -0.5], [0.5, 1]], atol=1e-12)


def test_full_model_dimensions():
    assert build_full_model(ModelParams(2, 1, 0.5, "ff")).H.shape == (4, 4)
    assert build_full_model(ModelParams(2, 1, 0.5, "bb", 4)).H.shape == (25, 25)


def test_star_gap_ff_value():
    # H* - H = 2 (conj(g) a_B* a_A - g a_A* a_B): Frobenius norm 2 sqrt(2) |g| on two fermions.
    m = build_full_model(ModelParams(2, 1, 0.5, "ff"))
    assert frobenius_norm(adjoint(m.H) - m.H) == pytest.approx(np.sqrt(2), abs=1e-14)
    assert frobenius_norm(m.eta @ adjoint(m.H) @ m.eta - m.H) == 0


def test_decoupled_model_has_no_star_witness():
    _, _, r = full_model(ModelParams(2, 1, 0))
    assert "model_H_not_star_self_adjoint" not in r and r.passed


@pytest.mark.parametrize("n", [5, 7, 21, 101])
def test_pauli_exact_block(n):
    _, r = pauli_rep(GridSpec(n, 3.0), defect_tol=np.inf)
    assert all(c.residual == 0 for c in r.checks if c.name != "pauli_gaussian_commutator_defect")


def test_pauli_second_order():
    d1 = pauli_rep(GridSpec(201, 10))[1]["pauli_gaussian_commutator_defect"].residual
    d2 = pauli_rep(GridSpec(401, 10))[1]["pauli_gaussian_commutator_defect"].residual
    assert 3.5 < d1 / d2 < 4.5


def test_pauli_defect_formula():
    # ([a,a^dag] + 1) phi = phi - (phi(q+h) + phi(q-h))/2 for the central difference.
    g = GridSpec(11, 2.0)
    ops = pauli_ops(g)
    phi = np.exp(-g.q**2 / 2)
    comm = ops.a @ ops.a_dagger - ops.a_dagger @ ops.a
    lhs = comm @ phi + phi
    pad = np.concatenate([[0], phi, [0]])
    assert np.allclose(lhs, phi - (pad[2:] + pad[:-2]) / 2, atol=1e-13)


def test_grid_errors():
    with pytest.raises(GridError):
        GridSpec(10, 1.0)
    with pytest.raises(GridError):
        c01_flip_rep(4)


def test_c01_flip():
    eta, mult, r = c01_flip_rep(21)
    assert r.passed
    assert np.array_equal(mult(lambda x: np.ones_like(x)), np.eye(21))
    assert np.array_equal(eta @ eta, np.eye(21))
