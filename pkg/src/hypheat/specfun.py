"""Special functions used by the kernel representations.

Gamma and the complex-Gamma spectral weight are computed from the Stirling
asymptotic series after an upward recurrence shift; modified Bessel K uses
the half-integer closed form where available and the cosh-integral
representation otherwise; Bessel I, Gauss 2F1 and the Jacobi function are
direct series at the policy's working precision.  The terminating
hypergeometrics (generalised Bessel polynomial, Chebyshev) are exact
rational sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpc, mpf, workprec

from . import quad
from .precision import (
    AccuracyLossError,
    BITS_PER_DIGIT,
    DomainError,
    PrecisionPolicy,
    to_mpf,
)

# ---------------------------------------------------------------------------
# log-Gamma via Stirling + upward recurrence
# ---------------------------------------------------------------------------

_BERNOULLI: list[Fraction] = []


def _bernoulli_frac(n2: int) -> Fraction:
    """Exact Bernoulli number B_{2m} for n2 = 2m."""
    while len(_BERNOULLI) <= n2 // 2:
        p, q = mpmath.bernfrac(2 * len(_BERNOULLI))
        _BERNOULLI.append(Fraction(int(p), int(q)))
    return _BERNOULLI[n2 // 2]


def _stirling_threshold(bits: int) -> float:
    # the Stirling series at |z| = R bottoms out near exp(-2 pi R); keep the
    # optimum comfortably below the rounding floor
    return max(10.0, bits / BITS_PER_DIGIT / 2.5)


def _stirling_lngamma(z, bits):
    """Stirling series for ln Gamma, valid for |z| >= _stirling_threshold."""
    result = (z - mpf(1) / 2) * mpmath.log(z) - z + mpmath.log(2 * mpmath.pi) / 2
    zsq = z * z
    power = z
    prev = None
    tol = mpf(2) ** (-bits - 8)
    for m in range(1, 500):
        bf = _bernoulli_frac(2 * m)
        term = (mpf(bf.numerator) / bf.denominator) / ((2 * m) * (2 * m - 1) * power)
        result += term
        mag = abs(term)
        if mag < tol * max(mpf(1), abs(result)):
            return result
        if prev is not None and mag > prev:
            raise AccuracyLossError("Stirling series diverging; shift insufficient")
        prev = mag
        power *= zsq
    raise AccuracyLossError("Stirling series did not reach tolerance")


def _lngamma_real(x: mpf, bits: int) -> mpf:
    shift = mpf(0)
    threshold = _stirling_threshold(bits)
    while x < threshold:
        shift += mpmath.log(x)
        x += 1
    return _stirling_lngamma(x, bits) - shift


def _re_lngamma_complex(z: mpc, bits: int) -> mpf:
    """Re ln Gamma(z) for Re z > 0 (branch-free; only |Gamma| is needed)."""
    shift = mpf(0)
    threshold = _stirling_threshold(bits)
    while abs(z) < threshold:
        shift += mpmath.log(abs(z))
        z += 1
    return _stirling_lngamma(z, bits).real - shift


def gamma(x, prec: PrecisionPolicy = None) -> mpf:
    """Gamma(x) for real x > 0, relative error <= 2^(-bits+8)."""
    prec = prec or _default()
    if not x > 0:
        raise DomainError(f"gamma requires x > 0, got {x}")
    bits = prec.working_bits()
    with workprec(bits + 24):
        value = mpmath.exp(_lngamma_real(to_mpf(x), bits + 16))
    with workprec(bits):
        return +value


def gamma_ratio_sq(p, nu, prec: PrecisionPolicy = None) -> mpf:
    """|Gamma(ip + nu + 1/2) / Gamma(ip)|^2, the spectral weight.

    Uses |Gamma(ip)|^2 = pi / (p sinh(pi p)) and the Stirling evaluation of
    the numerator.  p = 0 is the boundary limit and returns 0.
    """
    prec = prec or _default()
    if p < 0:
        raise DomainError("p must be nonnegative")
    if not nu > -0.5:
        raise DomainError("nu must exceed -1/2")
    if p == 0:
        return mpf(0)
    bits = prec.working_bits()
    with workprec(bits + 24):
        p = to_mpf(p)
        nu = to_mpf(nu)
        z = mpc(nu + mpf(1) / 2, p)
        num = mpmath.exp(2 * _re_lngamma_complex(z, bits + 16))
        value = num * p * mpmath.sinh(mpmath.pi * p) / mpmath.pi
    with workprec(bits):
        return +value


@dataclass(frozen=True)
class SpectralWeight:
    """Spectral density point of the hyperbolic Jacobi transform."""

    p: float
    nu: float
    weight: mpf


def spectral_weight(p, nu, prec: PrecisionPolicy = None) -> SpectralWeight:
    return SpectralWeight(float(p), float(nu), gamma_ratio_sq(p, nu, prec))


# ---------------------------------------------------------------------------
# modified Bessel functions
# ---------------------------------------------------------------------------

_HALF_K_COEFFS: dict[int, dict[int, int]] = {}


def _half_integer_k_coeffs(n: int) -> dict[int, int]:
    """Coefficients c_j with (-1/v d/dv)^n [e^-v / v] = e^-v sum_j c_j v^-j."""
    coeffs = _HALF_K_COEFFS.get(n)
    if coeffs is not None:
        return coeffs
    coeffs = {1: 1}
    for _ in range(n):
        nxt: dict[int, int] = {}
        for j, c in coeffs.items():
            nxt[j + 1] = nxt.get(j + 1, 0) + c
            nxt[j + 2] = nxt.get(j + 2, 0) + j * c
        coeffs = nxt
    _HALF_K_COEFFS[n] = coeffs
    return coeffs


def _is_half_integer(nu: float) -> bool:
    two = 2 * float(nu)
    return abs(two - round(two)) < 1e-12 and round(two) % 2 == 1


def bessel_k(nu, x, prec: PrecisionPolicy = None) -> mpf:
    """Modified Bessel K_nu(x) for nu >= 0, x > 0.

    Half-integer orders use the closed form K_{n+1/2}(v) =
    sqrt(pi/2) v^{n+1/2} (-1/v d/dv)^n [e^-v / v]; other orders evaluate
    int_0^inf exp(-x cosh u) cosh(nu u) du by semi-infinite quadrature.
    """
    prec = prec or _default()
    if not x > 0:
        raise DomainError(f"bessel_k requires x > 0, got {x}")
    if nu < 0:
        raise DomainError("bessel_k requires nu >= 0 (use K_-nu = K_nu)")
    bits = prec.working_bits()
    with workprec(bits + 24):
        x = to_mpf(x)
        if _is_half_integer(nu):
            n = int(round(float(nu) - 0.5))
            total = mpf(0)
            for j, c in sorted(_half_integer_k_coeffs(n).items()):
                total += c * x ** (-j)
            value = mpmath.sqrt(mpmath.pi / 2) * x ** (n + mpf(1) / 2) * mpmath.exp(-x) * total
        else:
            nu = to_mpf(nu)

            def f(u):
                return mpmath.exp(-x * mpmath.cosh(u)) * mpmath.cosh(nu * u)

            def tail(U):
                slope = x * mpmath.sinh(U) - nu
                if slope <= 1:
                    return mpf("inf")
                return mpmath.exp(-x * mpmath.cosh(U) + nu * U) / slope

            scale = mpmath.exp(-x) / mpmath.sqrt(x + 1)
            tol = scale * mpf(2) ** (-(bits // 2))
            r = quad.integrate_semi_infinite(f, 0, tol, prec, tail, bits=bits + 16)
            value = r.value
    with workprec(bits):
        return +value


def bessel_i(nu, x, prec: PrecisionPolicy = None) -> mpf:
    """Modified Bessel I_nu(x) by power series, nu >= 0, x >= 0."""
    prec = prec or _default()
    if nu < 0:
        raise DomainError("bessel_i requires nu >= 0")
    if x < 0:
        raise DomainError("bessel_i requires x >= 0")
    bits = prec.working_bits()
    with workprec(bits + 24):
        if x == 0:
            return mpf(1) if nu == 0 else mpf(0)
        x = to_mpf(x)
        nu = to_mpf(nu)
        half = x / 2
        term = mpmath.exp(nu * mpmath.log(half) - _lngamma_real(nu + 1, bits + 16))
        total = term
        hsq = half * half
        j = 0
        tol = mpf(2) ** (-bits - 8)
        while True:
            j += 1
            term *= hsq / (j * (j + nu))
            total += term
            if term < tol * total:
                break
            if j > 100000:
                raise AccuracyLossError("bessel_i series did not converge")
        value = total
    with workprec(bits):
        return +value


# ---------------------------------------------------------------------------
# Gauss hypergeometric and friends
# ---------------------------------------------------------------------------

def _nonpositive_int(v) -> int | None:
    fv = float(v)
    if fv <= 0 and abs(fv - round(fv)) < 1e-12:
        return int(round(fv))
    return None


def gauss_2f1(a, b, c, z, prec: PrecisionPolicy = None, *, max_terms: int = 500000) -> mpf:
    """Gauss 2F1(a, b; c; z) for real parameters and z < 1.

    Negative arguments are always routed through the Pfaff transformation
    2F1(a,b;c;z) = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1)), which maps z < 0 into
    [0, 1); terminating parameter pairs are summed exactly as finite sums.
    """
    prec = prec or _default()
    if _nonpositive_int(c) is not None:
        raise DomainError(f"c = {c} is a nonpositive integer")
    if not z < 1:
        raise DomainError(f"gauss_2f1 requires z < 1, got z = {z}")
    bits = prec.working_bits()
    with workprec(bits + 24):
        a, b, c, z = (to_mpf(v) for v in (a, b, c, z))
        ka, kb = _nonpositive_int(a), _nonpositive_int(b)
        if ka is not None or kb is not None:
            kterm = min(v for v in (ka, kb) if v is not None)
            value = _series_2f1(a, b, c, z, bits, n_terms=-kterm)
        elif z < 0:
            value = (1 - z) ** (-a) * _series_2f1(a, c - b, c, z / (z - 1), bits,
                                                  max_terms=max_terms)
        else:
            value = _series_2f1(a, b, c, z, bits, max_terms=max_terms)
    with workprec(bits):
        return +value


def _series_2f1(a, b, c, z, bits, n_terms=None, max_terms=500000):
    term = mpf(1)
    total = mpf(1)
    tol = mpf(2) ** (-bits - 8)
    j = 0
    while True:
        term = term * (a + j) * (b + j) / ((c + j) * (1 + j)) * z
        total += term
        j += 1
        if n_terms is not None:
            if j >= n_terms:
                return total
            continue
        if term == 0 or (j > 4 and abs(term) < tol * abs(total)):
            return total
        if j >= max_terms:
            raise AccuracyLossError(
                f"2F1 series needs more than {max_terms} terms at z = {float(z):.6g}"
            )


_2F0_COEFFS: dict[int, list[Fraction]] = {}


def _bessel_poly_coeffs(k: int) -> list[Fraction]:
    coeffs = _2F0_COEFFS.get(k)
    if coeffs is None:
        coeffs = [Fraction(1)]
        for j in range(k):
            coeffs.append(coeffs[-1] * (-k + j) * (k + j) / (j + 1))
        _2F0_COEFFS[k] = coeffs
    return coeffs


def bessel_poly_2f0(k: int, z):
    """Generalised Bessel polynomial 2F0(-k, k; z) = sum_j (-k)_j (k)_j / j! z^j.

    Exact rational coefficients; evaluated in the arithmetic of ``z``.
    """
    if k < 0 or k != int(k):
        raise DomainError("k must be a nonnegative integer")
    coeffs = _bessel_poly_coeffs(int(k))
    if isinstance(z, mpf):
        acc = mpf(0)
        for c in reversed(coeffs):
            acc = acc * z + mpf(c.numerator) / c.denominator
        return acc
    zf = float(z)
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * zf + c.numerator / c.denominator
    return acc


def chebyshev_T(n: int, x):
    """Chebyshev polynomial T_n(x) by the three-term recurrence."""
    if n < 0 or n != int(n):
        raise DomainError("n must be a nonnegative integer")
    if n == 0:
        return x * 0 + 1
    t0, t1 = x * 0 + 1, x
    for _ in range(int(n) - 1):
        t0, t1 = t1, 2 * x * t1 - t0
    return t1


# ---------------------------------------------------------------------------
# Jacobi function
# ---------------------------------------------------------------------------

def jacobi_phi(nu, p, r, prec: PrecisionPolicy = None, *, max_terms: int = 400000) -> mpf:
    """Jacobi function phi_p(r) of the hyperbolic Jacobi operator.

    phi_p(r) = 2F1((nu+1/2-ip)/2, (nu+1/2+ip)/2; nu+1; -sinh^2 r), evaluated
    through the Pfaff transformation at argument tanh^2 r in [0, 1).  The
    parameter pair is complex conjugate, so the result is real; it is
    symmetric under p -> -p.
    """
    prec = prec or _default()
    if not nu > -0.5:
        raise DomainError("nu must exceed -1/2")
    if r < 0:
        raise DomainError("r must be nonnegative")
    if r == 0:
        return mpf(1)
    p = abs(p)
    bits = prec.working_bits()
    for _ in range(4):
        with workprec(bits + 24):
            value, max_term = _jacobi_phi_series(
                to_mpf(nu), to_mpf(p), to_mpf(r), bits, max_terms
            )
            lost_bits = 0.0
            if value != 0 and max_term > abs(value):
                lost_bits = float(mpmath.log(max_term / abs(value), 2))
        needed = prec.working_bits() + int(lost_bits)
        if bits >= needed:
            with workprec(prec.working_bits()):
                return +value
        if prec.mode == "fixed":
            raise AccuracyLossError(
                f"jacobi_phi loses {lost_bits / BITS_PER_DIGIT:.0f} digits at "
                f"(p, r) = ({float(p):g}, {float(r):g}); need {needed} bits"
            )
        bits = needed + 16
    raise AccuracyLossError("jacobi_phi precision escalation did not settle")


def _jacobi_phi_series(nu, p, r, bits, max_terms):
    half = mpf(1) / 2
    a = mpc(nu + half, -p) / 2
    c = nu + 1
    cb = mpc(nu + 3 * half, -p) / 2  # c - b
    z = mpmath.tanh(r) ** 2
    est_terms = (bits / BITS_PER_DIGIT) * LN10_LOCAL / max(1e-30, -math.log(float(z)))
    if est_terms > max_terms:
        z_cap = math.exp(-(bits / BITS_PER_DIGIT) * LN10_LOCAL / max_terms)
        r_cap = math.atanh(math.sqrt(z_cap))
        raise AccuracyLossError(
            f"jacobi_phi series would need ~{est_terms:.2g} terms at r = "
            f"{float(r):g}; keep r below {r_cap:.3g} at this precision"
        )
    term = mpc(1)
    total = mpc(1)
    max_term = mpf(1)
    tol = mpf(2) ** (-bits - 8)
    j = 0
    while True:
        term = term * (a + j) * (cb + j) / ((c + j) * (1 + j)) * z
        total += term
        mag = abs(term)
        max_term = max(max_term, mag)
        j += 1
        if j > 4 and mag < tol * abs(total):
            break
        if j >= max_terms:
            raise AccuracyLossError("jacobi_phi series did not converge")
    pref = mpmath.exp(-2 * a * mpmath.log(mpmath.cosh(r)))
    value = pref * total
    max_term *= abs(pref)
    if abs(value.imag) > max(abs(value.real), max_term * tol) * mpf(2) ** (-bits // 4):
        raise AccuracyLossError("jacobi_phi lost conjugate symmetry; imaginary residue")
    return value.real, max_term


LN10_LOCAL = math.log(10.0)


def _default() -> PrecisionPolicy:
    from .precision import DEFAULT_POLICY

    return DEFAULT_POLICY
