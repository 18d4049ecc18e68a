"""``kreinlab`` command line.

Every subcommand prints one JSON report (or CSV rows for a model sweep).
Exit codes: 0 all checks pass, 1 some check fails, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional, Sequence

import numpy as np

from kreinlab import cuntz, fock, involutions, models, words
from kreinlab.cmatrix import frobenius_norm
from kreinlab.krein import (ContractError, Representation, covariance_residual, double_representation,
                            grading_residual, signature)
from kreinlab.report import CheckReport, dumps, format_float

SWEEP_HEADER = ["m_a", "m_b", "g_abs", "discriminant", "classification", "lambda1_re", "lambda1_im",
                "lambda2_re", "lambda2_im", "norm_class_1", "norm_class_2"]


class UsageError(ValueError):
    pass


def _sign_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if part not in ("1", "+1", "-1"):
            raise argparse.ArgumentTypeError(f"signs must be +1 or -1, got {part!r}")
        out.append(int(part))
    return out


def _flatten(groups) -> Optional[list[int]]:
    if groups is None:
        return None
    return [s for g in groups for s in g]


def _complex(text: str) -> complex:
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _norm_label(x: float) -> str:
    return "%g" % x


# -- subcommands -------------------------------------------------------------

def cmd_involutions(args) -> CheckReport:
    return involutions.involution_report(args.pauli)


def _random_vectors(rng, n: int, k: int) -> list[np.ndarray]:
    return [rng.normal(size=n) + 1j * rng.normal(size=n) for _ in range(k)]


def _random_unitary(rng, n: int) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def cmd_fock(args) -> CheckReport:
    signs = _flatten(args.eta) or [1] * args.modes
    if len(signs) != args.modes:
        raise UsageError(f"--eta has {len(signs)} signs but --modes is {args.modes}")
    cutoff = args.cutoff if args.statistics == fock.BOSE else 1
    basis = fock.FockBasis(fock.FockSpec.from_signs(args.statistics, signs, cutoff))
    rng = np.random.default_rng(args.seed)
    samples = list(np.eye(args.modes)) + _random_vectors(rng, args.modes, 2)
    report = fock.relation_report(basis, samples)
    report.parameters.update({"eta": ",".join(str(s) for s in signs), "seed": args.seed})
    if args.transform:
        u = _random_unitary(rng, args.modes)
        tr = fock.relation_report(basis, samples, transform=u)
        report.extend(tr)
    if args.weyl:
        if args.statistics != fock.BOSE or args.modes != 1:
            raise UsageError("--weyl needs a single bosonic mode")
        for r in args.weyl:
            val = fock.weyl_vacuum_expectation(basis, [r])
            report.add(f"fock_weyl_vacuum_norm_{_norm_label(r)}", abs(val - np.exp(-r * r / 4)), 1e-6)
    return report


def cmd_ghosts(args) -> CheckReport:
    return fock.fp_ghost_report(args.pairs)


def _cycle(args) -> tuple[int, ...]:
    if args.cycle is None:
        return (1,) if args.d >= 1 else (1, 2)
    return tuple(int(c) for c in args.cycle)


def cmd_cuntz(args) -> CheckReport:
    spec = cuntz.PCSpec(args.d, args.dprime, args.depth, _cycle(args))
    rep = cuntz.build_representation(spec)
    report = cuntz.relation_residuals(rep)
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(3):
        x = rng.normal(size=(rep.dim, rep.dim)) + 1j * rng.normal(size=(rep.dim, rep.dim))
        y = rng.normal(size=(rep.dim, rep.dim)) + 1j * rng.normal(size=(rep.dim, rep.dim))
        scale = frobenius_norm(x) * frobenius_norm(y)
        worst = max(worst, cuntz.rho_multiplicativity_residual(rep, x, y) / scale)
    report.add("cuntz_rho_multiplicative", worst, 1e-12)
    report.parameters["seed"] = args.seed
    return report


def cmd_words(args) -> CheckReport:
    signs = _flatten(args.eta) or [1] * args.n
    if len(signs) != args.n:
        raise UsageError(f"--eta has {len(signs)} signs but --n is {args.n}")
    report = CheckReport("words", {"n": args.n, "eta": ",".join(str(s) for s in signs)})
    el = None
    if args.expr is not None:
        el = words.parse_expr(args.expr, signs)
        report.parameters["expr"] = args.expr
        report.extra["normal_form"] = words.to_text(el)
        again = words.parse_expr(words.to_text(el), signs)
        report.add("words_print_parse_roundtrip", 0.0 if again == el else 1.0, 0.0)
        dd = words.dagger(words.dagger(el))
        report.add("words_dagger_involutive", 0.0 if dd == el else 1.0, 0.0)
    if args.eval_depth is not None or args.random:
        d = sum(1 for s in signs if s > 0)
        if list(signs) != [1] * d + [-1] * (args.n - d):
            raise UsageError("evaluation needs the +1 signs first (eta = diag(I_d, -I_d'))")
        depth = args.eval_depth or 8
        rep = cuntz.build_representation(cuntz.PCSpec(d, args.n - d, depth, (1,) if d else (1, 2)))
        report.parameters["eval_depth"] = depth
        if el is not None:
            raw = words.parse_factors(args.expr, signs)
            creations = max((sum(1 for _, dag in f if not dag) for _, f in raw), default=0)
            keep = depth - creations
            if keep < 0:
                raise UsageError("--eval-depth too small for this expression")
            p = rep.projection(keep)
            diff = words.evaluate(el, rep) - words.evaluate_factors(raw, rep)
            report.add("words_normal_form_evaluates_consistently", frobenius_norm(p @ diff @ p), 1e-10)
        defect = words.completeness_defect(signs)
        report.add("words_completeness_not_rewritten", 0.0 if defect.terms else 1.0, 0.0)
        report.add("words_completeness_vanishes_compressed",
                   frobenius_norm(rep.compress(words.evaluate(defect, rep))), 1e-12)
        if args.random:
            rng = np.random.default_rng(args.seed)
            worst = 0.0
            mismatches = 0
            for _ in range(args.random):
                a = words.random_monomial(rng, signs)
                b = words.random_monomial(rng, signs)
                worst = max(worst, words.oracle_residual(a, b, rep))
                if words.rho(a) * words.rho(b) != words.rho(a * b):
                    mismatches += 1
            report.parameters.update({"random": args.random, "seed": args.seed})
            report.add("words_oracle_products", worst, 1e-10)
            report.add("words_rho_multiplicative_exact", float(mismatches), 0.0)
    return report


def cmd_pauli(args) -> CheckReport:
    _, report = models.pauli_rep(models.GridSpec(args.points, args.half_width))
    return report


def cmd_c01(args) -> CheckReport:
    _, _, report = models.c01_flip_rep(args.points)
    return report


def _parse_sweep(text: str) -> tuple[str, np.ndarray]:
    try:
        name, rng = text.split("=", 1)
        lo, hi, steps = rng.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise UsageError(f"malformed sweep {text!r}; expected name=min:max:steps")
    name = name.strip()
    if name not in ("g", "ma", "mb"):
        raise UsageError(f"sweep parameter must be g, ma or mb, got {name!r}")
    if steps < 1:
        raise UsageError("sweep needs at least one step")
    return name, (np.array([lo]) if steps == 1 else np.linspace(lo, hi, steps))


def _sweep_rows(args) -> list[dict]:
    name, values = _parse_sweep(args.sweep)
    rows = []
    for v in values:
        ma, mb, g = args.ma, args.mb, args.g
        if name == "g":
            g = complex(v)
        elif name == "ma":
            ma = float(v)
        else:
            mb = float(v)
        s = models.classify_spectrum(models.ModelParams(ma, mb, g, args.combo, args.cutoff))
        l1, l2 = s.eigenvalues
        n1, n2 = s.norm_columns()
        rows.append({"m_a": ma, "m_b": mb, "g_abs": abs(g), "discriminant": s.discriminant,
                     "classification": s.classification, "lambda1_re": l1.real, "lambda1_im": l1.imag,
                     "lambda2_re": l2.real, "lambda2_im": l2.imag, "norm_class_1": n1, "norm_class_2": n2})
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow([format_float(r[k]) if isinstance(r[k], float) else r[k] for k in SWEEP_HEADER])
    return buf.getvalue()


def cmd_model(args):
    if args.sweep is not None:
        rows = _sweep_rows(args)
        if args.format == "csv":
            return rows_to_csv(rows)
        report = CheckReport("model", {"m_a": args.ma, "m_b": args.mb, "g_re": args.g.real,
                                       "g_im": args.g.imag, "combo": args.combo, "sweep": args.sweep})
        report.extra["rows"] = rows
        return report
    if args.format == "csv":
        raise UsageError("--format csv needs --sweep")
    p = models.ModelParams(args.ma, args.mb, args.g, args.combo, args.cutoff)
    _, _, report = models.full_model(p)
    s = models.classify_spectrum(p)
    oracle = models.quadratic_roots(p.m_A, p.m_B, abs(p.g))
    report.add("model_eigenvalues_match_quadratic",
               max(abs(a - b) for a, b in zip(s.eigenvalues, oracle)), 1e-12)
    target = models.two_level_matrix(p)
    worst = max(frobenius_norm(models.restriction_matrix(models.ModelParams(p.m_A, p.m_B, p.g, c, p.cutoff))
                               - target) for c in models.COMBOS)
    report.add("model_all_combos_same_restriction", worst, 1e-12)
    return report


# -- doubling ----------------------------------------------------------------

def _matrix_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _matrix_from_json(rows, dim: int, label: str) -> np.ndarray:
    m = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)
    if m.shape != (dim, dim):
        raise UsageError(f"matrix {label!r} has shape {m.shape}, expected {(dim, dim)}")
    return m


def rep_to_json(generators: dict, alpha_images: dict) -> str:
    dim = next(iter(generators.values())).shape[0]
    obj = {"dim": dim,
           "generators": {k: _matrix_to_json(v) for k, v in generators.items()},
           "alpha_images": {k: _matrix_to_json(v) for k, v in alpha_images.items()}}
    return dumps(obj) + "\n"


def rep_from_json(text: str) -> tuple[dict, dict]:
    try:
        obj = json.loads(text)
        dim = int(obj["dim"])
        gens = {k: _matrix_from_json(v, dim, k) for k, v in obj["generators"].items()}
        alpha = {k: _matrix_from_json(v, dim, k) for k, v in obj["alpha_images"].items()}
    except (KeyError, TypeError, json.JSONDecodeError) as e:
        raise UsageError(f"malformed representation file: {e}")
    return gens, alpha


def builtin_o2_p12(depth: int) -> tuple[dict, dict]:
    """P(12) representation of O_2 with alpha(s1) = s1, alpha(s2) = -s2."""
    _, (s1, s2) = cuntz.build_cuntz_generators(2, depth, (1, 2))
    return {"s1": s1, "s2": s2}, {"s1": s1, "s2": -s2}


def double_report(gens: dict, alpha: dict, tol: float = 1e-12) -> CheckReport:
    r = double_representation(gens, alpha)
    n = next(iter(gens.values())).shape[0]
    report = CheckReport("double", {"dim": n, "doubled_dim": r.dim, "labels": ",".join(sorted(gens))})
    report.add("double_covariance", covariance_residual(r), 0.0)
    plus, minus = signature(r.space.eta)
    report.add("double_signature_balanced", float(abs(plus - n) + abs(minus - n)), 0.0)
    # Split each generator into alpha-even and alpha-odd parts.
    parts_gens, parity = {}, {}
    for k in r.generators:
        parts_gens[k + "+"] = (r.generators[k] + r.alpha_images[k]) / 2
        parts_gens[k + "-"] = (r.generators[k] - r.alpha_images[k]) / 2
        parity[k + "+"], parity[k + "-"] = "even", "odd"
    graded = Representation(r.space, parts_gens)
    report.add("double_grading", grading_residual(graded, parity), tol)
    report.eigenvalues = None
    report.classification = "krein_signature_%d_%d" % (plus, minus)
    return report


def cmd_double(args) -> CheckReport:
    if (args.input is None) == (args.builtin is None):
        raise UsageError("give exactly one of --input or --builtin")
    if args.input is not None:
        with open(args.input, encoding="utf-8") as fh:
            gens, alpha = rep_from_json(fh.read())
    else:
        gens, alpha = builtin_o2_p12(args.depth)
    if args.write_rep:
        with open(args.write_rep, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(rep_to_json(gens, alpha))
    report = double_report(gens, alpha)
    if args.builtin:
        report.parameters.update({"builtin": args.builtin, "depth": args.depth})
    return report


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kreinlab", description="Checks for indefinite-metric operator models.")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--out", help="write the report to FILE")
        return p

    p = add("involutions", cmd_involutions, "Pauli-twisted involutions on 2x2 matrices")
    p.add_argument("--pauli", type=int, choices=(0, 1, 2, 3), required=True)

    p = add("fock", cmd_fock, "eta-CCR / eta-CAR on a truncated Fock space")
    p.add_argument("--statistics", choices=(fock.BOSE, fock.FERMI), required=True)
    p.add_argument("--modes", type=int, required=True)
    p.add_argument("--cutoff", type=int, default=4)
    p.add_argument("--eta", type=_sign_list, nargs="+", help="one-particle signs, e.g. 1 -1 or 1,-1")
    p.add_argument("--transform", action="store_true", help="also test t(f) = a(U^* f) for a random unitary U")
    p.add_argument("--weyl", type=float, nargs="+", help="vacuum Weyl law at these norms (one boson mode)")
    p.add_argument("--seed", type=int, default=0)

    p = add("ghosts", cmd_ghosts, "ghost/antighost anticommutation relations")
    p.add_argument("--pairs", type=int, default=2)

    p = add("cuntz", cmd_cuntz, "truncated pseudo-Cuntz representations")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--dprime", type=int, required=True)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--cycle", choices=("1", "12"), default=None,
                   help="word fixed on the vacuum (default 1, or 12 when d = 0)")
    p.add_argument("--seed", type=int, default=0)

    p = add("words", cmd_words, "symbolic words in eta-Cuntz generators")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eta", type=_sign_list, nargs="+")
    p.add_argument("--expr")
    p.add_argument("--eval-depth", type=int)
    p.add_argument("--random", type=int, default=0, help="size of a random product corpus")
    p.add_argument("--seed", type=int, default=0)

    p = add("pauli", cmd_pauli, "parity-twisted Schrödinger pair on a grid")
    p.add_argument("--points", type=int, default=401)
    p.add_argument("--half-width", type=float, default=10.0)

    p = add("c01", cmd_c01, "flip involution on sampled functions on [0, 1]")
    p.add_argument("--points", type=int, default=101)

    p = add("model", cmd_model, "two-level model and its eigenvalue trichotomy")
    p.add_argument("--ma", type=float, required=True)
    p.add_argument("--mb", type=float, required=True)
    p.add_argument("--g", type=_complex, required=True)
    p.add_argument("--combo", choices=sorted(models.COMBOS), default="ff")
    p.add_argument("--cutoff", type=int, default=4)
    p.add_argument("--sweep", help="name=min:max:steps, name in g, ma, mb")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = add("double", cmd_double, "Z2 doubling of a representation")
    p.add_argument("--input", help="representation interchange file (JSON)")
    p.add_argument("--builtin", choices=("o2-p12",))
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--write-rep", help="write the input representation to FILE")
    return ap


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        result = args.func(args)
    except (UsageError, ContractError, words.ParseError, ValueError, OSError) as e:
        print(f"kreinlab {args.command}: error: {e}", file=stderr)
        return 2
    if isinstance(result, str):
        text, code = result, 0
    else:
        text, code = result.to_json() + "\n", (0 if result.passed else 1)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
