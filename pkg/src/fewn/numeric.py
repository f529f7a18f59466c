"""Special functions and root finding used by every other module.

Everything here is a pure function of its arguments.  The Student t
distribution is evaluated through the regularized incomplete beta function,
quantiles are found by bisection, and binomial tails are summed exactly.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

from .errors import BracketError, DomainError

__all__ = [
    "RootBracket",
    "betainc",
    "binom_tail",
    "bisect",
    "check_probability",
    "t_cdf",
    "t_quantile",
]

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 20000

QUANTILE_BRACKET = 1e6
QUANTILE_TOL = 1e-10


class RootBracket(NamedTuple):
    lo: float
    hi: float
    tol: float = 1e-12


def check_probability(name: str, value: float, *, open_interval: bool = False) -> float:
    """Validate that ``value`` is a probability and return it as a float."""
    value = float(value)
    if math.isnan(value):
        raise DomainError(f"{name} must not be NaN")
    if open_interval:
        if not 0.0 < value < 1.0:
            raise DomainError(f"{name} must lie in (0, 1), got {value!r}")
    elif not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def _clamp01(p: float) -> float:
    return min(1.0, max(0.0, p))


def _betacf(a: float, b: float, x: float) -> float:
    # Modified Lentz evaluation of the continued fraction for I_x(a, b).
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float, y: float | None = None) -> float:
    """Regularized incomplete beta function I_x(a, b).

    ``y`` is ``1 - x``; pass it explicitly when it is known more accurately
    than the subtraction would give (e.g. ``x**2 / (df + x**2)``).
    """
    if a <= 0 or b <= 0:
        raise DomainError("betainc requires a > 0 and b > 0")
    if y is None:
        y = 1.0 - x
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise DomainError(f"betainc argument out of range: x={x}, y={y}")
    if x == 0.0:
        return 0.0
    if y == 0.0:
        return 1.0
    log_front = (
        a * math.log(x) + b * math.log(y)
        + math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return _clamp01(front * _betacf(a, b, x) / a)
    return _clamp01(1.0 - front * _betacf(b, a, y) / b)


def _check_df(df: float) -> float:
    df = float(df)
    if not math.isfinite(df) or df < 1.0:
        raise DomainError(f"degrees of freedom must be a finite number >= 1, got {df!r}")
    return df


def t_cdf(x: float, df: float) -> float:
    """P(T <= x) for a Student t variable with ``df`` degrees of freedom."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"t_cdf requires a finite x, got {x!r}")
    df = _check_df(df)
    if x == 0.0:
        return 0.5
    x2 = x * x
    denom = df + x2
    # Lower tail mass beyond |x|.
    tail = 0.5 * betainc(0.5 * df, 0.5, df / denom, x2 / denom)
    return _clamp01(tail if x < 0 else 1.0 - tail)


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    *,
    ftol: float = 0.0,
    max_iter: int = 500,
) -> float:
    """Find a root of ``f`` on ``[lo, hi]`` by bisection.

    Stops when the bracket is narrower than ``tol`` or ``|f(mid)| <= ftol``.
    Raises :class:`BracketError` if ``f(lo)`` and ``f(hi)`` share a sign.
    """
    if not lo < hi:
        raise BracketError(f"bracket requires lo < hi, got [{lo}, {hi}]")
    if tol <= 0:
        raise DomainError("tol must be positive")
    flo = f(lo)
    if flo == 0.0:
        return lo
    fhi = f(hi)
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            return mid
        fmid = f(mid)
        if fmid == 0.0 or abs(fmid) <= ftol:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def t_quantile(p: float, df: float) -> float:
    """Inverse of :func:`t_cdf` in its first argument."""
    p = check_probability("p", p, open_interval=True)
    df = _check_df(df)
    if p == 0.5:
        return 0.0
    lo, hi = -QUANTILE_BRACKET, QUANTILE_BRACKET
    # Extreme quantiles at df=1 fall outside the default bracket.
    while t_cdf(lo, df) > p:
        lo *= 2.0
    while t_cdf(hi, df) < p:
        hi *= 2.0
    return bisect(lambda t: t_cdf(t, df) - p, lo, hi, QUANTILE_TOL)


def binom_tail(k: int, n: int, q: float) -> float:
    """P(X >= k) for X ~ Binomial(n, q), summed from the smallest term up."""
    if int(k) != k or int(n) != n:
        raise DomainError("k and n must be integers")
    k, n = int(k), int(n)
    if n < 0 or k < 0:
        raise DomainError("k and n must be non-negative")
    if k > n:
        raise DomainError(f"k={k} exceeds n={n}")
    q = check_probability("q", q)
    if k == 0:
        return 1.0
    terms = sorted(math.comb(n, j) * q**j * (1.0 - q) ** (n - j) for j in range(k, n + 1))
    return _clamp01(math.fsum(terms))
