"""Bessel routines used by the hydrodynamic pressure formulas.

Local implementations (ascending series, Hankel asymptotics, continued
fractions) keep the numerical core dependency-free; switch points chosen
so double precision holds ~1e-11 absolute accuracy everywhere we evaluate.
"""

from __future__ import annotations

import math

_SERIES_CUT = 12.0   # ascending series below, asymptotics above
_I_SERIES_CUT = 30.0


def _j_series(nu: int, x: float) -> float:
    # sum_k (-1)^k (x/2)^(2k+nu) / (k! (k+nu)!)
    half = 0.5 * x
    term = half ** nu / math.factorial(nu)
    total = term
    k = 0
    while True:
        k += 1
        term *= -(half * half) / (k * (k + nu))
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)):
            return total


def _hankel_pq(nu: int, x: float) -> tuple[float, float]:
    # P, Q of the large-argument expansion
    # J_nu(x) = sqrt(2/(pi x)) [P cos(chi) - Q sin(chi)], chi = x - nu pi/2 - pi/4
    mu = 4.0 * nu * nu
    p, q = 1.0, 0.0
    term = 1.0
    k = 0
    prev = math.inf
    while k < 30:
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(term) >= prev:  # asymptotic series started diverging
            break
        prev = abs(term)
        if k % 2 == 1:
            q += term if (k // 2) % 2 == 0 else -term
        else:
            p += term if (k // 2) % 2 == 0 else -term
        if abs(term) < 1e-18:
            break
    return p, q


def _j_asym(nu: int, x: float) -> float:
    p, q = _hankel_pq(nu, x)
    chi = x - nu * math.pi / 2.0 - math.pi / 4.0
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def j0(x: float) -> float:
    x = abs(x)
    return _j_series(0, x) if x <= _SERIES_CUT else _j_asym(0, x)


def j1(x: float) -> float:
    s = 1.0 if x >= 0 else -1.0
    x = abs(x)
    return s * (_j_series(1, x) if x <= _SERIES_CUT else _j_asym(1, x))


def j1prime(x: float) -> float:
    """d/dx J1(x) = J0(x) - J1(x)/x."""
    if x == 0.0:
        return 0.5
    return j0(x) - j1(x) / x


_j1p_roots: list[float] = []


def j1prime_roots(count: int) -> list[float]:
    """First `count` positive roots of J1'(x) = 0, ascending, ~1e-11 accurate."""
    if count < 1:
        raise ValueError("count must be >= 1")
    x = _j1p_roots[-1] + 0.5 if _j1p_roots else 0.5
    f_lo = j1prime(x)
    step = 0.05
    while len(_j1p_roots) < count:
        x_next = x + step
        f_hi = j1prime(x_next)
        if f_lo == 0.0:
            _j1p_roots.append(x)
        elif f_lo * f_hi < 0.0:
            a, b, fa = x, x_next, f_lo
            for _ in range(100):
                m = 0.5 * (a + b)
                fm = j1prime(m)
                if fa * fm <= 0.0:
                    b = m
                else:
                    a, fa = m, fm
                if b - a < 1e-13:
                    break
            _j1p_roots.append(0.5 * (a + b))
        x, f_lo = x_next, f_hi
    return _j1p_roots[:count]


def _i_series(nu: int, x: float) -> float:
    half = 0.5 * x
    term = half ** nu / math.factorial(nu)
    total = term
    k = 0
    while True:
        k += 1
        term *= (half * half) / (k * (k + nu))
        total += term
        if term < 1e-17 * total:
            return total


def _i_asym_factor(nu: int, x: float, terms: int = 8) -> float:
    # bracketed series of I_nu(x) ~ e^x/sqrt(2 pi x) * factor
    mu = 4.0 * nu * nu
    total, term = 1.0, 1.0
    for k in range(1, terms + 1):
        term *= -(mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        total += term
    return total


def i1_over_i0(x: float) -> float:
    """I1(x) / I0(x) for x > 0, overflow-safe for any argument."""
    if x <= _I_SERIES_CUT:
        return _i_series(1, x) / _i_series(0, x)
    return _i_asym_factor(1, x) / _i_asym_factor(0, x)


def i1(x: float) -> float:
    """I1(x); overflows (as inf) past x ~ 713 like exp does."""
    if x < 0:
        return -i1(-x)
    if x <= _I_SERIES_CUT:
        return _i_series(1, x)
    return math.exp(x) / math.sqrt(2.0 * math.pi * x) * _i_asym_factor(1, x)


def i1_over_i1prime(x: float) -> float:
    """I1(x) / I1'(x) with I1'(x) = I0(x) - I1(x)/x; safe for large x."""
    if x <= 0.0:
        raise ValueError("argument must be positive")
    r = i1_over_i0(x)
    return r / (1.0 - r / x)
