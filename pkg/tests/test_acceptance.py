"""Acceptance gate: one test per criterion, each at its stated tolerance.

Each test records a single PASS/FAIL line; the lines are printed in the
terminal summary (see conftest.py) and also on stdout with ``-s``.
"""

import cmath
import itertools
import json
import io

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from kreinlab import cli, cuntz, fock, involutions, models, words
from kreinlab.cmatrix import adjoint, frobenius_norm
from kreinlab.krein import KreinTriplet, dagger_adjoint, krein_form


class Gate:
    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.failures: list[str] = []
        self.worst = 0.0

    def check(self, ok: bool, what: str, residual: float = 0.0):
        self.worst = max(self.worst, float(residual))
        if not ok:
            self.failures.append(what)

    def finish(self):
        status = "PASS" if not self.failures else "FAIL"
        line = f"AC{self.number:02d} {status} {self.title} (worst residual {self.worst:.3g})"
        if self.failures:
            line += " :: " + "; ".join(self.failures)
        ACCEPTANCE_LINES[self.number] = line
        print(line)
        assert not self.failures, line


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(argv, stdout=out, stderr=err)
    return code, json.loads(out.getvalue())


def quad(ma, mb, g):
    s = cmath.sqrt((ma - mb) ** 2 - 4 * abs(g) ** 2)
    return [(ma + mb + s) / 2, (ma + mb - s) / 2]


def test_ac01_trichotomy():
    gate = Gate(1, "two-level trichotomy at (2, 1), g in {0.25, 0.5, 1.0}")
    expect = {0.25: ("two_real", "positive,negative"), 0.5: ("one_real_neutral", "neutral,n/a"),
              1.0: ("complex_pair", "n/a,n/a")}
    for g, (cls, norms) in expect.items():
        code, rep = run_cli(["model", "--ma", "2", "--mb", "1", "--g", str(g)])
        gate.check(code == 0, f"exit code {code} at g={g}")
        gate.check(rep["classification"] == cls, f"classification {rep['classification']} at g={g}")
        got = [complex(e["re"], e["im"]) for e in rep["eigenvalues"]]
        err = max(abs(a - b) for a, b in zip(got, quad(2, 1, g)))
        gate.check(err <= 1e-12, f"eigenvalue error {err:g} at g={g}", err)
        gate.check(f"krein_norms: {norms}" in rep["notes"], f"norm classes at g={g}")
    gate.finish()


def test_ac02_combos_share_restriction():
    gate = Gate(2, "four statistics combos share the restriction matrix; (a_B^dag Omega|a_B^dag Omega) = -1")
    p0 = models.ModelParams(2, 1, 0.25 + 0.1j)
    target = np.array([[2, -p0.g], [np.conj(p0.g), 1]])
    for combo in ("bb", "bf", "fb", "ff"):
        p = models.ModelParams(2, 1, p0.g, combo, 4)
        err = frobenius_norm(models.restriction_matrix(p) - target)
        gate.check(err <= 1e-12, f"{combo} restriction {err:g}", err)
        m = models.build_full_model(p)
        t = KreinTriplet(m.eta)
        u = dagger_adjoint(m.a_B, t) @ m.omega
        gate.check(krein_form(u, u, t) == -1, f"{combo} negative norm {krein_form(u, u, t)}")
    gate.finish()


def test_ac03_dagger_vs_star():
    gate = Gate(3, "H is dagger-self-adjoint, not *-self-adjoint; rewritten form")
    p = models.ModelParams(2, 1, 0.5, "ff")
    m = models.build_full_model(p)
    H = m.H
    r1 = frobenius_norm(m.eta @ adjoint(H) @ m.eta - H)
    gap = frobenius_norm(adjoint(H) - H)
    sA, sB = adjoint(m.a_A), adjoint(m.a_B)
    rw = p.m_A * sA @ m.a_A + p.m_B * sB @ m.a_B + p.g * sA @ m.a_B - np.conj(p.g) * sB @ m.a_A
    r2 = frobenius_norm(rw - H)
    gate.check(r1 <= 1e-12, f"||eta H* eta - H|| = {r1:g}", r1)
    gate.check(gap >= 0.1, f"||H* - H|| = {gap:g}")
    gate.check(r2 <= 1e-12, f"rewritten form {r2:g}", r2)
    gate.finish()


def test_ac04_pseudo_cuntz():
    gate = Gate(4, "pseudo-Cuntz relations at depth 6 for C_{1,1}, O_2, C_{0,2}")
    names = ("cuntz_isometry_relation", "cuntz_completeness_relation", "cuntz_metric_chi", "cuntz_covariance")
    for spec in (cuntz.PCSpec(1, 1, 6), cuntz.PCSpec(2, 0, 6), cuntz.PCSpec(0, 2, 6, (1, 2))):
        rep = cuntz.relation_residuals(cuntz.build_representation(spec))
        for n in names:
            r = rep[n].residual
            gate.check(r <= 1e-12, f"{n} for ({spec.d},{spec.d_prime}) = {r:g}", r)
    gate.finish()


def test_ac05_ghosts():
    gate = Gate(5, "ghost relations with 2 pairs (dim 16)")
    rep = fock.fp_ghost_report(2)
    gate.check(rep.parameters["dim"] == 16, "dimension")
    for c in rep.checks:
        gate.check(c.residual <= 1e-12, f"{c.name} = {c.residual:g}", c.residual)
    gate.finish()


def test_ac06_eta_car():
    gate = Gate(6, "eta-CAR for every diagonal sign pattern, modes <= 3, and the unitary transform")
    rng = np.random.default_rng(2024)
    for d in (1, 2, 3):
        for signs in itertools.product((1, -1), repeat=d):
            b = fock.FockBasis(fock.FockSpec.from_signs(fock.FERMI, list(signs)))
            samples = list(np.eye(d)) + [rng.normal(size=d) + 1j * rng.normal(size=d) for _ in range(2)]
            z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            u, _ = np.linalg.qr(z)
            for rep in (fock.relation_report(b, samples), fock.relation_report(b, samples, transform=u)):
                for c in rep.checks:
                    gate.check(c.residual <= 1e-12, f"{c.name} {signs} = {c.residual:g}", c.residual)
    gate.finish()


def test_ac07_weyl_vacuum():
    gate = Gate(7, "Weyl vacuum law, one mode, cutoff 48")
    b = fock.FockBasis(fock.FockSpec(fock.BOSE, 1, cutoff=48))
    for r in (0.25, 0.5, 1.0):
        err = abs(fock.weyl_vacuum_expectation(b, [r]) - np.exp(-r * r / 4))
        gate.check(err <= 1e-6, f"|f| = {r}: {err:g}", err)
    gate.finish()


def test_ac08_doubling():
    gate = Gate(8, "doubling of the P(12) representation of O_2 at depth 6")
    gens, alpha = cli.builtin_o2_p12(6)
    rep = cli.double_report(gens, alpha)
    n = rep.parameters["dim"]
    cov = rep["double_covariance"].residual
    gate.check(cov == 0.0, f"covariance {cov:g}", cov)
    gate.check(rep.classification == f"krein_signature_{n}_{n}", f"signature {rep.classification}")
    gr = rep["double_grading"].residual
    gate.check(gr <= 1e-12, f"grading {gr:g}", gr)
    gate.finish()


def test_ac09_pauli_grid():
    gate = Gate(9, "Schrödinger pair on n = 401, L = 10; second-order defect")
    _, rep = models.pauli_rep(models.GridSpec(401, 10.0))
    for n in ("pauli_parity_anticommutes_D", "pauli_a_dagger_is_minus_a_star", "pauli_p_dagger_is_minus_p",
              "pauli_q_dagger_is_minus_q"):
        r = rep[n].residual
        gate.check(r <= 1e-13, f"{n} = {r:g}", r)
    d1 = rep["pauli_gaussian_commutator_defect"].residual
    gate.check(d1 <= 1e-2, f"defect {d1:g}")
    _, rep2 = models.pauli_rep(models.GridSpec(801, 10.0))
    d2 = rep2["pauli_gaussian_commutator_defect"].residual
    gate.check(d1 / d2 >= 3, f"halving h reduced the defect only {d1 / d2:.3g}x")
    gate.finish()


def test_ac10_symbolic_oracle():
    gate = Gate(10, "100 seeded symbolic products vs numerics in C_{1,1} at depth 8; symbolic rho")
    signs = (1, -1)
    rep = cuntz.build_representation(cuntz.PCSpec(1, 1, 8))
    rng = np.random.default_rng(20240601)
    for _ in range(100):
        a = words.random_monomial(rng, signs)
        b = words.random_monomial(rng, signs)
        r = words.oracle_residual(a, b, rep)
        gate.check(r <= 1e-10, f"oracle residual {r:g} for {a} * {b}", r)
        gate.check(words.rho(a) * words.rho(b) == words.rho(a * b), f"rho not multiplicative on {a}, {b}")
    gate.finish()


def test_ac11_involutions():
    gate = Gate(11, "Pauli-twisted involutions: witnesses, Lie algebras, dimension 4")
    s3 = involutions.SIGMA[3]
    gate.check(np.array_equal(involutions.pauli_dagger(1, s3) @ s3, -np.eye(2)), "I_{1,1} identity not exact")
    rng = np.random.default_rng(7)
    for i in (1, 2, 3):
        w = involutions.indefiniteness_witness(i)
        e1 = max(abs(z - 1) for z in w.sp_x)
        e2 = max(abs(z + 1) for z in w.sp_y)
        gate.check(e1 <= 1e-13 and e2 <= 1e-13, f"witness spectra for {i}", max(e1, e2))
        for _ in range(100):
            a = complex(*rng.normal(size=2))
            b, c = rng.normal(size=2)
            gate.check(involutions.lie_membership(i, involutions.lie_parametrization(i, a, b, c)),
                       f"member rejected for {i}")
            x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            gate.check(not involutions.lie_membership(i, x), f"non-member accepted for {i}")
        gate.check(involutions.solution_space_dimension(i) == 4, f"dimension for {i}")
    gate.finish()
