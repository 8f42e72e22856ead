"""Exact symbolic calculus for the iterated hyperbolic derivative operators.

The operators

    D_full = -(1/sinh x)   d/dx
    D_half = -(1/sinh(x/2)) d/dx

applied to Gaussian-type seeds stay inside one algebra of terms

    coeff * x^a * t^-q * sinh(x/2)^b * cosh(x/2)^c * exp(-x^2/(2t))

with exact rational coefficients: the full-angle factor 1/sinh x is
rewritten as (1/2) sinh(x/2)^-1 cosh(x/2)^-1.  A TermSum is the
canonicalized multiset of such terms; applying an operator any number of
times is exact, so the closed forms it produces can be evaluated at any
precision with no differentiation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf, workprec

from .precision import PrecisionPolicy, SingularEvaluationError, to_mpf

Key = tuple[int, int, int, int]  # (a, q, b, c)


@dataclass(frozen=True)
class HypTerm:
    """One monomial coeff * x^a * t^-q * sh(x/2)^b * ch(x/2)^c * G(x,t)."""

    coeff: Fraction
    a: int
    q: int
    b: int
    c: int

    @property
    def key(self) -> Key:
        return (self.a, self.q, self.b, self.c)


class TermSum:
    """Canonicalized finite sum of HypTerms (unique (a, q, b, c) keys)."""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[Key, Fraction] | None = None):
        clean = {}
        if terms:
            for key, coeff in terms.items():
                if coeff != 0:
                    clean[key] = coeff
        self._terms = dict(sorted(clean.items()))

    @property
    def terms(self) -> tuple[HypTerm, ...]:
        return tuple(HypTerm(c, *k) for k, c in self._terms.items())

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        return isinstance(other, TermSum) and self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __add__(self, other: "TermSum") -> "TermSum":
        merged = dict(self._terms)
        for key, coeff in other._terms.items():
            merged[key] = merged.get(key, Fraction(0)) + coeff
        return TermSum(merged)

    def scaled(self, factor: Fraction) -> "TermSum":
        return TermSum({k: c * factor for k, c in self._terms.items()})

    def shifted(self, da=0, dq=0, db=0, dc=0) -> "TermSum":
        return TermSum(
            {(a + da, q + dq, b + db, c + dc): coeff
             for (a, q, b, c), coeff in self._terms.items()}
        )

    def __repr__(self):
        return f"TermSum({pretty(self)})"


def seed_gaussian() -> TermSum:
    """The seed exp(-x^2/(2t))."""
    return TermSum({(0, 0, 0, 0): Fraction(1)})


def seed_even_dim() -> TermSum:
    """The seed x exp(-x^2/(2t)) / sinh x, in the half-angle basis."""
    return TermSum({(1, 0, -1, -1): Fraction(1, 2)})


def _derivative(ts: TermSum) -> TermSum:
    """d/dx of a TermSum, staying in the algebra."""
    out: dict[Key, Fraction] = {}

    def add(key: Key, coeff: Fraction):
        out[key] = out.get(key, Fraction(0)) + coeff

    for (a, q, b, c), coeff in ts.items():
        if a:
            add((a - 1, q, b, c), coeff * a)
        if b:
            add((a, q, b - 1, c + 1), coeff * Fraction(b, 2))
        if c:
            add((a, q, b + 1, c - 1), coeff * Fraction(c, 2))
        # Gaussian factor: d/dx e^{-x^2/2t} = -(x/t) e^{-x^2/2t}
        add((a + 1, q + 1, b, c), -coeff)
    return TermSum(out)


def apply_d_full(ts: TermSum, times: int = 1) -> TermSum:
    """Apply D_full = -(1/sinh x) d/dx = -(1/2) sh^-1 ch^-1 d/dx, ``times`` times."""
    if times < 0:
        raise ValueError("times must be nonnegative")
    for _ in range(times):
        ts = _derivative(ts).scaled(Fraction(-1, 2)).shifted(db=-1, dc=-1)
    return ts


def apply_d_half(ts: TermSum, times: int = 1) -> TermSum:
    """Apply D_half = -(1/sinh(x/2)) d/dx, ``times`` times."""
    if times < 0:
        raise ValueError("times must be nonnegative")
    for _ in range(times):
        ts = _derivative(ts).scaled(Fraction(-1)).shifted(db=-1)
    return ts


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def eval_termsum(ts: TermSum, x, t, prec: PrecisionPolicy = None) -> mpf:
    """Evaluate a TermSum at (x, t), x > 0 wherever negative powers occur.

    Near x = 0 the individual terms of an operator output blow up while the
    sum stays finite; the evaluation therefore tracks the cancellation and
    silently re-runs at escalated precision until the requested accuracy
    survives.  x = 0 exactly is dispatched to the exact limit.
    """
    from .precision import DEFAULT_POLICY

    prec = prec or DEFAULT_POLICY
    if x == 0:
        if any(b < 0 or c < 0 for (_, _, b, c), _ in ts.items()):
            return eval_termsum_at_zero(ts, t, prec)
        x = to_mpf(0)
    if x < 0:
        raise SingularEvaluationError("x must be nonnegative")
    bits = prec.working_bits()
    for _ in range(6):
        with workprec(bits + 24):
            xm, tm = to_mpf(x), to_mpf(t)
            sh = mpmath.sinh(xm / 2)
            ch = mpmath.cosh(xm / 2)
            gauss = mpmath.exp(-xm * xm / (2 * tm))
            total = mpf(0)
            abs_total = mpf(0)
            for (a, q, b, c), coeff in ts.items():
                term = (mpf(coeff.numerator) / coeff.denominator)
                if a:
                    term *= xm ** a
                if q:
                    term *= tm ** (-q)
                if b:
                    term *= sh ** b
                if c:
                    term *= ch ** c
                term *= gauss
                total += term
                abs_total += abs(term)
            lost = 0.0
            if total != 0 and abs_total > abs(total):
                lost = float(mpmath.log(abs_total / abs(total), 2))
        if total == 0 or bits >= prec.working_bits() + int(lost):
            with workprec(prec.working_bits()):
                return +total
        bits = prec.working_bits() + int(lost) + 16
    raise SingularEvaluationError(
        f"eval_termsum cancellation did not settle at x = {float(x):g}"
    )


def eval_termsum_at_zero(ts: TermSum, t, prec: PrecisionPolicy = None) -> mpf:
    """Exact x -> 0 limit of a TermSum via rational Laurent expansion.

    Each factor is expanded as a power series in x with exact rational
    coefficients (t is taken exactly as the binary rational it is); the
    negative powers must cancel across terms, otherwise the sum genuinely
    diverges and a SingularEvaluationError is raised.
    """
    from .precision import DEFAULT_POLICY

    prec = prec or DEFAULT_POLICY
    t_frac = Fraction(float(t)) if not isinstance(t, Fraction) else t
    depth = max(0, -min((a + b for (a, q, b, c), _ in ts.items()), default=0))
    order = depth + 1  # series coefficients x^{lowest} .. x^0
    laurent: dict[int, Fraction] = {}
    for (a, q, b, c), coeff in ts.items():
        lowest = a + b
        n_coeffs = -lowest + 1
        if n_coeffs <= 0:
            continue  # net power positive: the term vanishes at x = 0
        series = _unit_series(n_coeffs)
        series = _series_mul(series, _sinh_ratio_series(n_coeffs, b), n_coeffs)
        series = _series_mul(series, _cosh_half_series(n_coeffs, c), n_coeffs)
        series = _series_mul(series, _gauss_series(n_coeffs, t_frac), n_coeffs)
        scale = coeff * Fraction(2) ** (-b) / t_frac ** q
        for i, s in enumerate(series):
            power = lowest + i
            if power > 0:
                break
            laurent[power] = laurent.get(power, Fraction(0)) + scale * s
    for power, value in laurent.items():
        if power < 0 and value != 0:
            raise SingularEvaluationError(
                f"TermSum diverges like x^{power} at x = 0"
            )
    result = laurent.get(0, Fraction(0))
    with workprec(prec.working_bits()):
        return mpf(result.numerator) / result.denominator


def _unit_series(n):
    return [Fraction(1)] + [Fraction(0)] * (n - 1)


def _series_mul(u, v, n):
    out = [Fraction(0)] * n
    for i, ui in enumerate(u):
        if ui == 0:
            continue
        for j, vj in enumerate(v):
            if i + j >= n:
                break
            out[i + j] += ui * vj
    return out


def _series_pow_int(base, k, n):
    result = _unit_series(n)
    power = list(base)
    e = k
    while e:
        if e & 1:
            result = _series_mul(result, power, n)
        e >>= 1
        if e:
            power = _series_mul(power, power, n)
    return result


def _series_reciprocal(u, n):
    if u[0] == 0:
        raise ZeroDivisionError("series has no reciprocal")
    out = [Fraction(0)] * n
    out[0] = 1 / u[0]
    for i in range(1, n):
        acc = Fraction(0)
        for j in range(1, i + 1):
            acc += u[j] * out[i - j] if j < len(u) else 0
        out[i] = -acc / u[0]
    return out


def _sinh_ratio_series(n, b):
    """(sinh(x/2)/(x/2))^b as a series in x, exact rationals."""
    base = [Fraction(0)] * n
    for i in range(0, n, 2):
        base[i] = Fraction(1, 4 ** (i // 2) * math.factorial(i + 1))
    if b >= 0:
        return _series_pow_int(base, b, n)
    return _series_pow_int(_series_reciprocal(base, n), -b, n)


def _cosh_half_series(n, c):
    base = [Fraction(0)] * n
    for i in range(0, n, 2):
        base[i] = Fraction(1, 4 ** (i // 2) * math.factorial(i))
    if c >= 0:
        return _series_pow_int(base, c, n)
    return _series_pow_int(_series_reciprocal(base, n), -c, n)


def _gauss_series(n, t_frac):
    out = [Fraction(0)] * n
    sign = Fraction(1)
    for j in range(0, (n + 1) // 2):
        if 2 * j >= n:
            break
        out[2 * j] = sign / (math.factorial(j) * (2 * t_frac) ** j)
        sign = -sign
    return out


# ---------------------------------------------------------------------------
# bounds and debug output
# ---------------------------------------------------------------------------

def abs_eval(ts: TermSum, x, t) -> mpf:
    """Sum of |term| values: a pointwise majorant of |eval_termsum|."""
    xm, tm = to_mpf(x), to_mpf(t)
    sh = mpmath.sinh(xm / 2)
    ch = mpmath.cosh(xm / 2)
    gauss = mpmath.exp(-xm * xm / (2 * tm))
    total = mpf(0)
    for (a, q, b, c), coeff in ts.items():
        term = abs(mpf(coeff.numerator) / coeff.denominator)
        term *= xm ** a * tm ** (-q) * sh ** b * ch ** c * gauss
        total += term
    return total


def monotone_tail_start(ts: TermSum, t) -> float:
    """A point beyond which every |term| (and abs_eval) decreases in x."""
    a_max = max((a for (a, q, b, c), _ in ts.items()), default=0)
    growth = max((max(b, 0) + max(c, 0) for (a, q, b, c), _ in ts.items()), default=0)
    t = float(t)
    return max(2.0, math.sqrt(2.0 * a_max * t) + 1.0, t * (growth / 2.0 + 1.0))


def pretty(ts: TermSum) -> str:
    """Stable textual form ``coeff * x^a * t^-q * sh^b * ch^c * G``."""
    if len(ts) == 0:
        return "0"
    parts = []
    for (a, q, b, c), coeff in ts.items():
        parts.append(f"{coeff} * x^{a} * t^-{q} * sh^{b} * ch^{c} * G")
    return " + ".join(parts)
