"""Quadrature engines.

Four entry points:

* ``integrate_adaptive``      -- finite interval, globally adaptive bisection
  with a nested Gauss-Legendre rule pair (tanh-sinh available behind a flag);
* ``integrate_semi_infinite`` -- decay-aware truncation of ``[a, inf)``;
* ``integrate_sqrt_singular`` -- integrals ``int_0^inf u^{-1/2} g(u) du``
  with the singularity removed by ``u = s^2``;
* ``gruet_oscillatory``       -- the oscillatory integral
  ``int_0^inf exp((pi^2-rho^2)/(2 tau)) sinh(rho) sin(pi rho/tau) phi(rho) drho``
  split at the sine zeros ``rho_j = j tau``, with cancellation-aware
  precision escalation.

Everything runs on mpmath reals at a precision chosen by the caller's
PrecisionPolicy; all summation orders are fixed, so identical inputs give
bitwise-identical results.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import mpmath
from mpmath import mpf, workprec

from .precision import (
    BITS_PER_DIGIT,
    LN10,
    ConvergenceError,
    DomainError,
    PrecisionPolicy,
    to_mpf,
)


@dataclass
class QuadResult:
    """Integral value plus error estimate and diagnostics."""

    value: mpf
    err_est: float
    evals: int
    converged: bool
    cancellation_digits: float = 0.0
    lobes: tuple = field(default_factory=tuple, repr=False)

    def __float__(self):
        return float(self.value)


# ---------------------------------------------------------------------------
# Gauss-Legendre nodes at arbitrary precision (Newton on the recurrence)
# ---------------------------------------------------------------------------

_GL_CACHE: dict[tuple[int, int], list] = {}


def gauss_legendre(n: int, bits: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    key = (n, bits)
    rule = _GL_CACHE.get(key)
    if rule is not None:
        return rule
    with workprec(bits + 24):
        half = []
        for i in range(1, n // 2 + n % 2 + 1):
            x = mpf(math.cos(math.pi * (i - 0.25) / (n + 0.5)))
            dp = mpf(1)
            for _ in range(100):
                p0, p1 = mpf(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpf(2) ** (-bits - 8):
                    break
            half.append((x, 2 / ((1 - x * x) * dp * dp)))
        rule = [(-x, w) for x, w in half]
        if n % 2 == 1:
            rule = rule[:-1] + [(mpf(0), half[-1][1])]
        rule += [(x, w) for x, w in reversed(half[: n // 2])]
    _GL_CACHE[key] = rule
    return rule


def _panel_pair(f, a, b, n_lo, n_hi, bits):
    """Low/high order estimates of int_a^b f; returns (hi, |hi-lo|, evals)."""
    mid = (a + b) / 2
    halfw = (b - a) / 2
    lo = mpf(0)
    for x, w in gauss_legendre(n_lo, bits):
        lo += w * f(mid + halfw * x)
    hi = mpf(0)
    for x, w in gauss_legendre(n_hi, bits):
        hi += w * f(mid + halfw * x)
    return hi * halfw, abs(hi - lo) * halfw, n_lo + n_hi


# ---------------------------------------------------------------------------
# tanh-sinh (double-exponential) rule, the alternative panel rule
# ---------------------------------------------------------------------------

_TS_CACHE: dict[tuple[int, int], list] = {}


def _tanh_sinh_nodes(level: int, bits: int):
    """Symmetric tanh-sinh abscissae/weights on (-1, 1) with h = 2^-level."""
    key = (level, bits)
    nodes = _TS_CACHE.get(key)
    if nodes is not None:
        return nodes
    with workprec(bits + 24):
        h = mpf(2) ** (-level)
        piover2 = mpmath.pi / 2
        nodes = []
        k = 0
        while True:
            t = k * h
            sh = mpmath.sinh(t)
            u = mpmath.tanh(piover2 * sh)
            w = h * piover2 * mpmath.cosh(t) / mpmath.cosh(piover2 * sh) ** 2
            if 1 - abs(u) < mpf(2) ** (-bits - 16) or w < mpf(2) ** (-bits - 16):
                break
            nodes.append((u, w))
            k += 1
    _TS_CACHE[key] = nodes
    return nodes


def _tanh_sinh_integrate(f, a, b, tol_abs, bits, max_level=11):
    mid = (a + b) / 2
    halfw = (b - a) / 2
    prev = None
    evals = 0
    for level in range(4, max_level + 1):
        total = mpf(0)
        for u, w in _tanh_sinh_nodes(level, bits):
            total += w * f(mid + halfw * u)
            evals += 1
            if u != 0:
                total += w * f(mid - halfw * u)
                evals += 1
        total *= halfw
        if prev is not None:
            err = abs(total - prev)
            if err <= tol_abs:
                return total, err, evals, True
        prev = total
    return prev, abs(total - prev) if prev is not None else mpf("inf"), evals, False


# ---------------------------------------------------------------------------
# adaptive finite-interval integration
# ---------------------------------------------------------------------------

def integrate_adaptive(
    f,
    a,
    b,
    tol,
    prec: PrecisionPolicy,
    *,
    rel_tol: float | None = None,
    max_panels: int = 4000,
    rule: str = "pair",
    n_lo: int = 8,
    n_hi: int = 16,
    bits: int | None = None,
) -> QuadResult:
    """Adaptive integration of f over [a, b] to absolute tolerance ``tol``.

    With ``rel_tol`` set, the absolute target is additionally floored at
    ``rel_tol`` times the first whole-interval estimate.  On subdivision
    exhaustion the best estimate is returned with ``converged=False``.
    """
    if not b > a:
        raise DomainError("integrate_adaptive needs a < b")
    bits = bits if bits is not None else prec.working_bits()
    with workprec(bits + 32):
        a = to_mpf(a)
        b = to_mpf(b)
        if rule == "tanh-sinh":
            tol_abs = to_mpf(tol)
            value, err, evals, ok = _tanh_sinh_integrate(f, a, b, tol_abs, bits)
            return QuadResult(value, _to_float(err), evals, ok, 0.0)
        hi, err, evals = _panel_pair(f, a, b, n_lo, n_hi, bits)
        tol_abs = to_mpf(tol)
        if rel_tol is not None:
            tol_abs = max(tol_abs, mpf(rel_tol) * abs(hi))
        tol_abs = max(tol_abs, abs(hi) * mpf(2) ** (-bits + 4))
        counter = 0
        heap = [(-_to_float(err), counter, a, b, hi, err)]
        total_err = err
        while total_err > tol_abs and len(heap) < max_panels:
            _, _, pa, pb, phi_, perr = heapq.heappop(heap)
            total_err -= perr
            pm = (pa + pb) / 2
            if pm <= pa or pm >= pb:
                # interval exhausted at this precision
                counter += 1
                heapq.heappush(heap, (0.0, counter, pa, pb, phi_, mpf(0)))
                continue
            for qa, qb in ((pa, pm), (pm, pb)):
                qhi, qerr, qev = _panel_pair(f, qa, qb, n_lo, n_hi, bits)
                evals += qev
                counter += 1
                total_err += qerr
                heapq.heappush(heap, (-_to_float(qerr), counter, qa, qb, qhi, qerr))
        panels = sorted(heap, key=lambda p: p[2])
        value = mpf(0)
        abs_sum = mpf(0)
        for p in panels:
            value += p[4]
            abs_sum += abs(p[4])
        cancel = 0.0
        if value != 0 and abs_sum > abs(value):
            cancel = float(mpmath.log(abs_sum / abs(value), 10))
        return QuadResult(value, _to_float(total_err), evals, total_err <= tol_abs, cancel)


def _to_float(x) -> float:
    try:
        v = float(x)
    except (OverflowError, ValueError):
        return math.inf
    return v


# ---------------------------------------------------------------------------
# semi-infinite integration with decay-aware truncation
# ---------------------------------------------------------------------------

def integrate_semi_infinite(
    f,
    a,
    tol,
    prec: PrecisionPolicy,
    tail_bound=None,
    *,
    initial_span: float = 2.0,
    max_span: float = 1e9,
    **adaptive_kw,
) -> QuadResult:
    """Integrate f over [a, inf) to absolute tolerance ``tol``.

    ``tail_bound(B)`` must bound ``|int_B^inf f|`` and decrease to zero.
    Without one, the truncation point is found by sampling the decay of f
    and extrapolating geometrically -- adequate for the exponentially
    decaying integrands used here, but only a heuristic.
    """
    bits = adaptive_kw.get("bits") or prec.working_bits()
    with workprec(bits + 32):
        a = to_mpf(a)
        tol = to_mpf(tol)
        span = to_mpf(initial_span)
        tail = None
        while True:
            B = a + span
            if tail_bound is not None:
                tail = to_mpf(tail_bound(B))
            else:
                tail = _sampled_tail(f, B, span)
            if tail <= tol / 2:
                break
            span *= 2
            if span > max_span:
                raise ConvergenceError(
                    f"tail bound never reaches {float(tol):.3g} within span {max_span:g}"
                )
        inner = integrate_adaptive(f, a, B, tol / 2, prec, **adaptive_kw)
        return QuadResult(
            inner.value,
            inner.err_est + _to_float(tail),
            inner.evals,
            inner.converged,
            inner.cancellation_digits,
        )


def _sampled_tail(f, B, span):
    """Heuristic bound for |int_B^inf f| from sampled geometric decay."""
    step = max(span / 8, mpf(1) / 4)
    m0 = abs(f(B))
    m1 = abs(f(B + step))
    m2 = abs(f(B + 2 * step))
    peak = max(m0, m1, m2)
    if peak == 0:
        return mpf(0)
    if 0 < m2 < m0:
        rate = mpmath.log(m0 / m2) / (2 * step)
        return 4 * peak / rate
    return peak * span * 100


def integrate_sqrt_singular(
    g,
    tol,
    prec: PrecisionPolicy,
    tail_bound=None,
    **kw,
) -> QuadResult:
    """Evaluate ``int_0^inf u^{-1/2} g(u) du`` via the substitution u = s^2.

    ``tail_bound(B)``, when given, bounds ``|int_B^inf u^{-1/2} g(u) du|``.
    """
    def h(s):
        return 2 * g(s * s)

    tail_s = None
    if tail_bound is not None:
        tail_s = lambda S: tail_bound(S * S)
    return integrate_semi_infinite(h, 0, tol, prec, tail_s, **kw)


# ---------------------------------------------------------------------------
# Gruet-type oscillatory integral
# ---------------------------------------------------------------------------

def _envelope_argmax(tau: float) -> float:
    """Maximizer of exp(-rho^2/(2 tau)) sinh(rho) on (0, inf)."""
    lo, hi = 1e-9, max(2.0, 2.0 * tau)
    while math.cosh(hi) / math.sinh(hi) - hi / tau > 0:
        hi *= 2
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if math.cosh(mid) / math.sinh(mid) - mid / tau > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gruet_oscillatory(
    tau,
    phi,
    tol,
    prec: PrecisionPolicy,
    *,
    phi_bound=None,
    extra_cancellation_nats: float = 0.0,
    rule: str = "pair",
    max_lobes: int = 20000,
    max_escalations: int = 4,
) -> QuadResult:
    """Evaluate ``int_0^inf exp((pi^2-rho^2)/(2 tau)) sinh(rho) sin(pi rho/tau) phi(rho) drho``.

    The axis is split at the sine zeros ``rho_j = j tau``; each lobe is
    integrated adaptively at a precision sized for the cancellation budget
    ``pi^2/(2 tau)`` nats (plus ``extra_cancellation_nats`` when the caller
    knows the result is further suppressed), and the lobes are summed in
    index order with an extended-precision accumulator.  ``tol`` is the
    relative tolerance on the summed result.

    ``phi_bound(rho)``, when given, must bound ``|phi|`` on ``[rho, inf)``;
    otherwise ``|phi|`` at each lobe start is used, which is valid for the
    nonincreasing ``phi`` arising from the kernel representations here.

    If the observed cancellation exceeds the budget the evaluation is
    retried at escalated precision (auto mode) or raises
    ``PrecisionEscalationError`` naming the required bits (fixed mode).
    """
    tau_f = float(tau)
    if tau_f <= 0:
        raise DomainError("tau must be positive")
    tol_f = float(tol)
    tol_digits = max(1, math.ceil(-math.log10(tol_f)))
    cancel_nats = math.pi ** 2 / (2 * tau_f) + max(0.0, extra_cancellation_nats)
    rho_star = _envelope_argmax(tau_f)

    for _ in range(max_escalations):
        needed_bits = math.ceil(
            (16 + cancel_nats / LN10 + tol_digits) * BITS_PER_DIGIT
        )
        bits = prec.require_bits(needed_bits, "gruet_oscillatory")
        digits = bits / BITS_PER_DIGIT
        result = _gruet_pass(
            tau, phi, tol_f, prec, bits, digits, cancel_nats, rho_star,
            phi_bound, rule, max_lobes,
        )
        if result is not None:
            value, err, evals, converged, cancel_digits, lobes = result
            # posterior check: did the cancellation stay within budget?
            if cancel_digits * LN10 <= cancel_nats + 2 * LN10 or value == 0:
                return QuadResult(value, err, evals, converged, cancel_digits, lobes)
            cancel_nats = cancel_digits * LN10 + 2 * LN10
        else:
            cancel_nats += 10 * LN10
    raise ConvergenceError(
        f"gruet_oscillatory did not stabilise at tau={tau_f:g} "
        f"(cancellation {cancel_nats / LN10:.1f} digits)"
    )


def _gruet_pass(
    tau, phi, tol, prec, bits, digits, cancel_nats, rho_star, phi_bound, rule, max_lobes
):
    acc_bits = bits + 64
    with workprec(acc_bits):
        tau_mp = to_mpf(tau)
        pisq = mpmath.pi ** 2
        two_tau = 2 * tau_mp

        def integrand(rho):
            return (
                mpmath.exp((pisq - rho * rho) / two_tau)
                * mpmath.sinh(rho)
                * mpmath.sin(mpmath.pi * rho / tau_mp)
                * phi(rho)
            )

        def env(rho):
            if rho == 0:
                return mpf(0)
            return mpmath.exp((pisq - rho * rho) / two_tau) * mpmath.sinh(rho)

        def lobe_env_bound(j):
            a, b = j * tau_mp, (j + 1) * tau_mp
            m = max(env(a), env(b))
            if a < rho_star < b:
                m = max(m, env(to_mpf(rho_star)))
            pb = abs(phi_bound(a)) if phi_bound is not None else abs(phi(max(a, tau_mp / 2)))
            return m * pb * tau_mp

        # absolute rounding floor of the summation, per the truncation rule
        floor = mpmath.exp(pisq / two_tau) * mpf(10) ** (-int(digits))
        lobe_rel = tol * math.exp(-cancel_nats) / 32

        total = mpf(0)
        abs_max = mpf(0)
        err_sum = mpf(0)
        evals = 0
        lobes = []
        converged = True
        tail = mpf(0)
        j = 0
        prev_bound = None
        while True:
            if j >= max_lobes:
                converged = False
                break
            a, b = j * tau_mp, (j + 1) * tau_mp
            r = integrate_adaptive(
                integrand, a, b, 0, prec,
                rel_tol=lobe_rel, bits=bits, rule=rule, max_panels=400,
            )
            converged &= r.converged
            evals += r.evals
            total += r.value
            err_sum += to_mpf(r.err_est) if math.isfinite(r.err_est) else abs(r.value)
            abs_max = max(abs_max, abs(r.value))
            lobes.append(r.value)
            if b > rho_star and j >= 2:
                bound = lobe_env_bound(j + 1)
                threshold = tol * max(abs(total), floor)
                if bound <= threshold:
                    ratio = bound / prev_bound if prev_bound and prev_bound > 0 else mpf("0.5")
                    ratio = min(ratio, mpf("0.9"))
                    tail = bound / (1 - ratio)
                    if tail <= threshold:
                        break
                prev_bound = bound
            j += 1

        if total == 0:
            cancel_digits = float(digits)
        elif abs_max > abs(total):
            cancel_digits = float(mpmath.log(abs_max / abs(total), 10))
        else:
            cancel_digits = 0.0
        err = _to_float(err_sum + tail)
    with workprec(bits):
        value = +total
    return value, err, evals, converged, cancel_digits, tuple(lobes)


# ---------------------------------------------------------------------------
# fixed composite panels (deterministic, cache-friendly batch integration)
# ---------------------------------------------------------------------------

def integrate_fixed_panels(f, edges, n, prec: PrecisionPolicy, *, bits=None, tol=None) -> QuadResult:
    """Composite Gauss-Legendre pair (n, 2n) over the given panel edges.

    Used where an integrand must be sampled at a reproducible node set (the
    Hartman-Watson batch evaluations); the error estimate is the summed
    pairwise rule difference per panel.
    """
    bits = bits if bits is not None else prec.working_bits()
    with workprec(bits + 32):
        edges = [to_mpf(e) for e in edges]
        value = mpf(0)
        err = mpf(0)
        evals = 0
        abs_sum = mpf(0)
        for a, b in zip(edges[:-1], edges[1:]):
            hi, perr, pev = _panel_pair(f, a, b, n, 2 * n, bits)
            value += hi
            abs_sum += abs(hi)
            err += perr
            evals += pev
        cancel = 0.0
        if value != 0 and abs_sum > abs(value):
            cancel = float(mpmath.log(abs_sum / abs(value), 10))
        ok = True if tol is None else err <= to_mpf(tol)
        return QuadResult(+value, _to_float(err), evals, ok, cancel)


def panel_nodes(edges, n, bits):
    """The evaluation nodes integrate_fixed_panels(f, edges, n) will use."""
    with workprec(bits + 32):
        out = []
        for a, b in zip(edges[:-1], edges[1:]):
            a, b = to_mpf(a), to_mpf(b)
            mid, halfw = (a + b) / 2, (b - a) / 2
            for order in (n, 2 * n):
                for x, _ in gauss_legendre(order, bits):
                    out.append(mid + halfw * x)
        return out


def geometric_edges(lo: float, hi: float, per_decade: int = 2):
    """Geometrically spaced panel edges from lo to hi (both positive)."""
    if not 0 < lo < hi:
        raise DomainError("need 0 < lo < hi")
    n = max(1, math.ceil(per_decade * math.log10(hi / lo)))
    ratio = (hi / lo) ** (1.0 / n)
    edges = [lo * ratio ** k for k in range(n)]
    edges.append(hi)
    return edges
