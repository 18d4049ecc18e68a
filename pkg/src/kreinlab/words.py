"""Symbolic words in eta-Cuntz generators.

An element is a finite sum of terms ``c * s_J s_K^dag`` with
``s_J = s_{j1}...s_{jk}`` and ``s_K^dag = (s_K)^dag``. Products are reduced
with the single rule ``s_i^dag s_j -> eta_ij`` (diagonal ``eta``), which is
terminating and confluent, so every element has a unique normal form.

The completeness relation ``sum_i eta_ii s_i s_i^dag = 1`` is deliberately
NOT part of the rewrite system: it would make normal forms non-unique. It
holds only after evaluation in a representation.

Expression grammar (version 1)::

    expr   := term (('+' | '-') term)*
    term   := coeff ['*' factor+] | factor+
    factor := 's' INDEX ['~']            ('~' marks the dagger)
    coeff  := REAL | REAL 'i' | REAL ('+'|'-') REAL 'i' | '(' coeff ')'

Factors may be separated by whitespace. The canonical printed form sorts
terms by ``(J, K)`` and writes every coefficient as ``(a+bi)`` with 17
significant digits, e.g. ``(2+0i)*s1 s2 + (1+0i)*s2``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from kreinlab.cuntz import PCRep, chi
from kreinlab.krein import ContractError

Word = tuple[int, ...]
Key = tuple[Word, Word]
GRAMMAR_VERSION = 1


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class NCElement:
    """Immutable element ``sum c_(J,K) s_J s_K^dag`` in normal form."""

    terms: Mapping[Key, complex]
    eta_diag: tuple[int, ...]

    def __post_init__(self):
        clean = {}
        for (J, K), c in self.terms.items():
            c = complex(c)
            if c != 0:
                clean[(tuple(J), tuple(K))] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))
        object.__setattr__(self, "eta_diag", tuple(int(s) for s in self.eta_diag))

    @property
    def N(self) -> int:
        return len(self.eta_diag)

    @classmethod
    def one(cls, eta_diag: Sequence[int], c: complex = 1.0) -> "NCElement":
        return cls({((), ()): c}, tuple(eta_diag))

    @classmethod
    def zero(cls, eta_diag: Sequence[int]) -> "NCElement":
        return cls({}, tuple(eta_diag))

    @classmethod
    def generator(cls, i: int, eta_diag: Sequence[int], dagger: bool = False) -> "NCElement":
        if not 1 <= i <= len(eta_diag):
            raise ValueError(f"generator index {i} out of range 1..{len(eta_diag)}")
        key = ((), (i,)) if dagger else ((i,), ())
        return cls({key: 1.0}, tuple(eta_diag))

    @classmethod
    def monomial(cls, J: Sequence[int], K: Sequence[int], eta_diag: Sequence[int], c: complex = 1.0) -> "NCElement":
        return cls({(tuple(J), tuple(K)): c}, tuple(eta_diag))

    def _same(self, other: "NCElement") -> None:
        if self.eta_diag != other.eta_diag:
            raise ContractError("elements live in algebras with different signs")

    def __add__(self, other: "NCElement") -> "NCElement":
        self._same(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return NCElement(out, self.eta_diag)

    def __neg__(self) -> "NCElement":
        return self.scale(-1)

    def __sub__(self, other: "NCElement") -> "NCElement":
        return self + (-other)

    def scale(self, c: complex) -> "NCElement":
        return NCElement({k: c * v for k, v in self.terms.items()}, self.eta_diag)

    def __mul__(self, other):
        if isinstance(other, NCElement):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __str__(self) -> str:
        return to_text(self)


def _term_product(k1: Key, k2: Key, signs: Sequence[int]) -> tuple[int, Key] | None:
    J1, K1 = k1
    J2, K2 = k2
    m = min(len(K1), len(J2))
    factor = 1
    for a, b in zip(K1[:m], J2[:m]):
        if a != b:
            return None
        factor *= signs[a - 1]
    if len(K1) <= len(J2):
        return factor, (J1 + J2[m:], K2)
    return factor, (J1, K2 + K1[m:])


def multiply(a: NCElement, b: NCElement, eta_diag: Sequence[int] | None = None) -> NCElement:
    """Normal-form product."""
    a._same(b)
    signs = a.eta_diag if eta_diag is None else tuple(eta_diag)
    out: dict[Key, complex] = {}
    for k1, c1 in a.terms.items():
        for k2, c2 in b.terms.items():
            r = _term_product(k1, k2, signs)
            if r is None:
                continue
            f, key = r
            out[key] = out.get(key, 0) + f * c1 * c2
    return NCElement(out, a.eta_diag)


def dagger(a: NCElement) -> NCElement:
    return NCElement({(K, J): np.conj(c) for (J, K), c in a.terms.items()}, a.eta_diag)


def alpha_eta(a: NCElement, eta_diag: Sequence[int] | None = None) -> NCElement:
    """``s_i -> eta_ii s_i``: each term scaled by ``chi(J) chi(K)``."""
    signs = a.eta_diag if eta_diag is None else tuple(eta_diag)
    return NCElement({(J, K): chi(J, signs) * chi(K, signs) * c for (J, K), c in a.terms.items()}, a.eta_diag)


def star(a: NCElement) -> NCElement:
    """The positive-definite involution ``x^* = alpha_eta(x^dag)`` under which
    the generators satisfy the ordinary Cuntz relations."""
    return alpha_eta(dagger(a))


def rho(a: NCElement) -> NCElement:
    """Canonical endomorphism ``sum_i eta_ii s_i a s_i^dag``."""
    out = NCElement.zero(a.eta_diag)
    for i, sign in enumerate(a.eta_diag, start=1):
        s = NCElement.generator(i, a.eta_diag)
        sd = NCElement.generator(i, a.eta_diag, dagger=True)
        out = out + (s * a * sd).scale(sign)
    return out


def completeness_defect(eta_diag: Sequence[int]) -> NCElement:
    """``sum_i eta_ii s_i s_i^dag - 1``; nonzero in normal form."""
    out = NCElement.one(eta_diag, -1.0)
    for i, sign in enumerate(eta_diag, start=1):
        out = out + NCElement.monomial((i,), (i,), eta_diag, sign)
    return out


def max_word_length(a: NCElement) -> int:
    return max((len(J) + len(K) for J, K in a.terms), default=0)


def evaluate(a: NCElement, rep: PCRep) -> np.ndarray:
    """Matrix of ``a`` in ``rep``; daggers via the Krein adjoint."""
    if tuple(rep.eta_diag) != a.eta_diag:
        raise ContractError(f"element signs {a.eta_diag} do not match representation signs {rep.eta_diag}")
    n = rep.dim
    out = np.zeros((n, n), dtype=np.complex128)
    eye = np.eye(n, dtype=np.complex128)
    for (J, K), c in a.terms.items():
        m = eye
        for j in J:
            m = m @ rep.generators[j - 1]
        for k in reversed(K):
            m = m @ rep.daggers[k - 1]
        out += c * m
    return out


# -- text form ---------------------------------------------------------------

def _fmt(x: float) -> str:
    return "%.17g" % (x + 0.0)


def format_coefficient(c: complex) -> str:
    im = c.imag + 0.0
    sign = "-" if np.signbit(im) else "+"
    return f"({_fmt(c.real)}{sign}{_fmt(abs(im))}i)"


def to_text(a: NCElement) -> str:
    if not a.terms:
        return "0"
    parts = []
    for (J, K), c in a.terms.items():
        factors = [f"s{j}" for j in J] + [f"s{k}~" for k in reversed(K)]
        coeff = format_coefficient(c)
        parts.append(coeff + ("*" + " ".join(factors) if factors else ""))
    return " + ".join(parts)


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(
    rf"\(?\s*(?P<re>[+-]?{_NUM})?\s*(?:(?P<isign>[+-])?\s*(?P<im>{_NUM})?\s*(?P<i>i))?\s*\)?"
)


class _Parser:
    def __init__(self, text: str, N: int):
        self.text = text
        self.pos = 0
        self.N = N
        self.raw: list[tuple[complex, list[tuple[int, bool]]]] = []

    def error(self, msg: str):
        # Offsets are byte offsets into the UTF-8 encoding.
        raise ParseError(msg, len(self.text[: self.pos].encode("utf-8")))

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse_coeff(self):
        """A coefficient: number, optional imaginary part, optional parens."""
        start = self.pos
        paren = self.peek() == "("
        if paren:
            self.pos += 1
        self.skip_ws()
        m = re.compile(rf"[+-]?\s*{_NUM}").match(self.text, self.pos)
        if m is None:
            if paren:
                self.error("expected a number")
            self.pos = start
            return None
        value = complex(float(m.group(0).replace(" ", "")))
        self.pos = m.end()
        if self.pos < len(self.text) and self.text[self.pos] == "i":
            value = complex(0, value.real)
            self.pos += 1
        else:
            save = self.pos
            self.skip_ws()
            m2 = re.compile(rf"([+-])\s*({_NUM})?i").match(self.text, self.pos)
            if m2 is not None and (paren or self._looks_complex(m2.end())):
                im = float(m2.group(2)) if m2.group(2) else 1.0
                value += complex(0, im if m2.group(1) == "+" else -im)
                self.pos = m2.end()
            else:
                self.pos = save
        if paren:
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
        return value

    def _looks_complex(self, end: int) -> bool:
        # An unparenthesised a+bi must be followed by '*' or the end of a term.
        rest = self.text[end:].lstrip()
        return rest == "" or rest[0] in "*+-"

    def parse_factor(self):
        self.skip_ws()
        if self.peek() != "s":
            self.error("expected a generator 's<index>'")
        self.pos += 1
        m = re.compile(r"\d+").match(self.text, self.pos)
        if m is None:
            self.error("expected a generator index")
        idx = int(m.group(0))
        if not 1 <= idx <= self.N:
            self.error(f"generator index {idx} out of range 1..{self.N}")
        self.pos = m.end()
        dag = False
        if self.pos < len(self.text) and self.text[self.pos] == "~":
            dag = True
            self.pos += 1
        return idx, dag

    def parse_term(self, eta_diag):
        coeff = 1.0 + 0j
        ch = self.peek()
        if ch == "":
            self.error("expected a term")
        if ch != "s":
            c = self.parse_coeff()
            if c is None:
                self.error("expected a coefficient or generator")
            coeff = c
            if self.peek() != "*":
                self.raw.append((coeff, []))
                return NCElement.one(eta_diag, coeff)
            self.pos += 1
            if self.peek() != "s":
                self.error("expected a generator after '*'")
        out = NCElement.one(eta_diag, coeff)
        factors = []
        while self.peek() == "s":
            idx, dag = self.parse_factor()
            factors.append((idx, dag))
            out = out * NCElement.generator(idx, eta_diag, dagger=dag)
        self.raw.append((coeff, factors))
        return out

    def parse(self, eta_diag) -> NCElement:
        total = NCElement.zero(eta_diag)
        sign = 1
        if self.peek() in "+-" and self.peek() != "":
            sign = -1 if self.peek() == "-" else 1
            self.pos += 1
        while True:
            total = total + self.parse_term(eta_diag).scale(sign)
            c, f = self.raw[-1]
            self.raw[-1] = (sign * c, f)
            ch = self.peek()
            if ch == "":
                return total
            if ch not in "+-":
                self.error(f"unexpected character {ch!r}")
            sign = -1 if ch == "-" else 1
            self.pos += 1


def parse_expr(text: str, eta_diag: Sequence[int]) -> NCElement:
    """Parse ``text`` into a normal-form element of the algebra with the
    given generator signs (``N = len(eta_diag)``)."""
    eta_diag = tuple(int(s) for s in eta_diag)
    if text.strip() == "0":
        return NCElement.zero(eta_diag)
    return _Parser(text, len(eta_diag)).parse(eta_diag)


def parse_factors(text: str, eta_diag: Sequence[int]) -> list[tuple[complex, list[tuple[int, bool]]]]:
    """The terms of ``text`` before normalization: ``(coeff, [(index, dagger), ...])``."""
    eta_diag = tuple(int(s) for s in eta_diag)
    if text.strip() == "0":
        return []
    p = _Parser(text, len(eta_diag))
    p.parse(eta_diag)
    return p.raw


def evaluate_factors(terms, rep: PCRep) -> np.ndarray:
    """Evaluate unnormalized terms by multiplying generator matrices in order."""
    n = rep.dim
    out = np.zeros((n, n), dtype=np.complex128)
    for c, factors in terms:
        m = np.eye(n, dtype=np.complex128)
        for idx, dag in factors:
            m = m @ (rep.daggers[idx - 1] if dag else rep.generators[idx - 1])
        out += c * m
    return out


def random_monomial(rng: np.random.Generator, eta_diag: Sequence[int], max_letters: int = 3,
                    gaussian_integer: bool = True) -> NCElement:
    """Random ``c s_J s_K^dag`` with ``|J| + |K| <= max_letters``."""
    N = len(eta_diag)
    total = int(rng.integers(0, max_letters + 1))
    lj = int(rng.integers(0, total + 1))
    J = tuple(int(x) for x in rng.integers(1, N + 1, size=lj))
    K = tuple(int(x) for x in rng.integers(1, N + 1, size=total - lj))
    if gaussian_integer:
        c = complex(int(rng.integers(-3, 4)), int(rng.integers(-3, 4))) or 1.0
    else:
        c = complex(rng.normal(), rng.normal())
    return NCElement.monomial(J, K, eta_diag, c)


def random_element(rng: np.random.Generator, eta_diag: Sequence[int], terms: int = 3,
                   max_letters: int = 3) -> NCElement:
    out = NCElement.zero(eta_diag)
    for _ in range(terms):
        out = out + random_monomial(rng, eta_diag, max_letters)
    return out


def product(factors: Iterable[NCElement]) -> NCElement:
    factors = list(factors)
    out = NCElement.one(factors[0].eta_diag)
    for f in factors:
        out = out * f
    return out


def max_creation_length(a: NCElement) -> int:
    return max((len(J) for J, _ in a.terms), default=0)


def oracle_residual(a: NCElement, b: NCElement, rep: PCRep) -> float:
    """``||P (ev(ab) - ev(a) ev(b)) P||_F``.

    ``P`` keeps labels of length ``<= depth - |J|max(b)``: there the
    creations in ``b`` never overflow the truncation, so the single
    contraction between ``a`` and ``b`` sees the true word.
    """
    keep = rep.spec.depth - max_creation_length(b)
    if keep < 0:
        raise ContractError("representation too shallow for this product")
    p = rep.projection(keep)
    diff = evaluate(multiply(a, b), rep) - evaluate(a, rep) @ evaluate(b, rep)
    return float(np.linalg.norm(p @ diff @ p))
