import itertools

import numpy as np
import pytest

from kreinlab.cmatrix import adjoint, frobenius_norm
from kreinlab.cuntz import (PCSpec, UnsupportedCycleError, basis_vector, build_cuntz_generators,
                            build_representation, canonical_words, canonicalize, chi,
                            cuntz_relation_residuals, relation_residuals, rho_apply,
                            rho_multiplicativity_residual, transform_generators)
from kreinlab.krein import ContractError


def brute_canonical(spec, L):
    """All words up to length L not ending in the cycle word."""
    c = spec.cycle
    out = []
    for n in range(L + 1):
        for w in itertools.product(range(1, spec.N + 1), repeat=n):
            if not (len(w) >= len(c) and w[len(w) - len(c):] == c):
                out.append(w)
    return sorted(out, key=lambda w: (len(w), w))


@pytest.mark.parametrize("spec", [PCSpec(1, 1, 4), PCSpec(2, 0, 4, (1, 2)), PCSpec(2, 1, 3), PCSpec(0, 2, 4, (1, 2))])
def test_canonical_words_match_brute_force(spec):
    assert canonical_words(spec, spec.depth) == brute_canonical(spec, spec.depth)


def test_c11_small_labels_and_signs():
    rep = build_representation(PCSpec(1, 1, 2))
    assert rep.labels == [(), (2,), (1, 2), (2, 2)]
    assert np.array_equal(np.diag(rep.eta).real, [1, -1, -1, 1])


def test_chi_and_canonicalize():
    spec = PCSpec(1, 1, 4)
    assert chi((2, 1, 2), spec) == 1
    assert chi((2,), spec) == -1
    assert canonicalize((2, 1, 1), spec) == (2,)
    assert canonicalize((1, 2, 1, 2), PCSpec(2, 0, 4, (1, 2))) == ()
    with pytest.raises(ValueError):
        chi((3,), spec)


def test_spec_validation():
    with pytest.raises(ValueError):
        PCSpec(1, 0, 4)
    with pytest.raises(UnsupportedCycleError):
        PCSpec(2, 0, 4, (1, 2, 1))


def test_negative_cycle_rejected():
    # s1 Omega = Omega with s1 of negative signature cannot be covariant.
    with pytest.raises(ContractError):
        build_representation(PCSpec(0, 2, 4))


@pytest.mark.parametrize("spec", [PCSpec(1, 1, 6), PCSpec(2, 0, 6), PCSpec(0, 2, 6, (1, 2)),
                                  PCSpec(2, 0, 6, (1, 2)), PCSpec(2, 1, 5), PCSpec(1, 2, 5)])
def test_relations_exact(spec):
    r = relation_residuals(build_representation(spec))
    assert r.passed
    assert max(c.residual for c in r.checks) == 0.0


def test_cuntz_generators_are_isometries_for_positive_signs():
    _, gens = build_cuntz_generators(2, 5)
    rep = build_representation(PCSpec(2, 0, 5))
    p = rep.projection()
    for i, s in enumerate(gens):
        for j, t in enumerate(gens):
            assert frobenius_norm(p @ (adjoint(s) @ t - (i == j) * np.eye(len(s))) @ p) == 0


def test_basis_vectors_are_unit_vectors():
    rep = build_representation(PCSpec(1, 1, 4))
    for J in rep.labels:
        v = basis_vector(rep, J)
        assert v[rep.index[J]] == 1 and np.abs(v).sum() == 1


def test_truncation_drops_long_words():
    rep = build_representation(PCSpec(1, 1, 3))
    v = basis_vector(rep, (2, 2, 2))
    assert frobenius_norm(rep.generators[1] @ v) == 0


def test_rho_multiplicative():
    rep = build_representation(PCSpec(1, 1, 5))
    rng = np.random.default_rng(0)
    x = rng.normal(size=(rep.dim,) * 2) + 1j * rng.normal(size=(rep.dim,) * 2)
    y = rng.normal(size=(rep.dim,) * 2)
    assert rho_multiplicativity_residual(rep, x, y) < 1e-11
    assert frobenius_norm(rep.compress(rho_apply(rep, np.eye(rep.dim))) - rep.projection()) == 0


def test_hadamard_transform_on_o2():
    rep = build_representation(PCSpec(2, 0, 6))
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    for mode in ("lambda_unitary", "u_dd_action"):
        res = transform_generators(rep, h, mode)
        assert res.membership
        out = cuntz_relation_residuals(res.generators, rep.eta, res.eta_target, rep.projection(), "t")
        assert max(out.values()) < 1e-12


def test_signed_transform_targets():
    rep = build_representation(PCSpec(1, 1, 6))
    rng = np.random.default_rng(5)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    lam, _ = np.linalg.qr(z)
    res = transform_generators(rep, lam, "lambda_unitary")
    assert res.membership
    eta = np.diag([1, -1])
    assert np.allclose(res.eta_target, lam @ eta @ adjoint(lam))
    out = cuntz_relation_residuals(res.generators, rep.eta, res.eta_target, rep.projection(), "t")
    assert max(out.values()) < 1e-12
    # A hyperbolic rotation preserves diag(1, -1).
    t = 0.4
    g = np.array([[np.cosh(t), np.sinh(t)], [np.sinh(t), np.cosh(t)]])
    res = transform_generators(rep, g, "u_dd_action")
    assert res.membership and np.allclose(res.eta_target, eta)
    out = cuntz_relation_residuals(res.generators, rep.eta, eta, rep.projection(), "t")
    assert max(out.values()) < 1e-12
    assert not transform_generators(rep, lam, "u_dd_action").membership or np.allclose(lam @ eta @ adjoint(lam), eta)


def test_transform_errors():
    rep = build_representation(PCSpec(1, 1, 3))
    with pytest.raises(ValueError):
        transform_generators(rep, np.zeros((2, 2)))
    with pytest.raises(ValueError):
        transform_generators(rep, np.eye(2), "other")
