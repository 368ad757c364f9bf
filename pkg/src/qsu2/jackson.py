"""Deformed integration on (-1, 1) and the inner product on angular functions.

The monomial rule is the closed form (1 + (-1)**n)/[n+1].  For q < 1 it is
also reproduced by the discrete geometric-grid sum, which is exposed both
as an alternative integration mode and as a convergence probe.  For q > 1
the grid leaves (0, 1), so the closed form is taken as the definition;
this keeps the q -> 1/q symmetry of [n+1] and is validated downstream by
the orthonormality suite passing on both sides of q = 1.

The inner product reduces the winding-factor content of f~ g to a weight
polynomial using the same rewrite rules as angular.mul_position (literally
by calling it), then integrates monomial by monomial.  The angle integral
over the winding phase is exact: windings must match or the product is
zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from .angular import AngularFunction, _pconj, _pmul, _pscale, angular_function, mul_position
from .qcore import QParam, qnum

CLOSED_FORM = "closed_form"
SERIES = "series"


@dataclass(frozen=True)
class QMeasure:
    """Integration mode for the deformed measure on (-1, 1).

    Series mode only exists for 0 < q < 1, where the geometric grid q**k
    lies inside (0, 1).
    """

    p: QParam
    mode: str = CLOSED_FORM
    series_depth: int = 200

    def __post_init__(self):
        if self.mode not in (CLOSED_FORM, SERIES):
            raise ValueError(f"unknown measure mode {self.mode!r}")
        if self.mode == SERIES:
            if not self.p.q < 1:
                raise ValueError("series mode requires 0 < q < 1")
            if self.series_depth < 1:
                raise ValueError("series depth must be positive")


def _halfline_series(n: int, p: QParam, depth: int):
    """Partial sum of the discrete integral of x0**n over (0, 1)."""
    q = p.q
    total = 0 * p.one
    for k in range(depth):
        x_mid = q ** (2 * k + 1)
        total += x_mid ** n * (q ** (2 * k) - q ** (2 * k + 2))
    return total


def integrate_monomial(n: int, mu: QMeasure):
    """Integral of x0**n over (-1, 1): (1 + (-1)**n)/[n+1].

    Odd n vanishes by the parity phase of the negative half-line; even n
    doubles the half-line value.
    """
    if n != int(n) or n < 0:
        raise ValueError(f"monomial degree must be a nonnegative integer, got {n!r}")
    n = int(n)
    p = mu.p
    if n % 2 == 1:
        return 0 * p.one
    if mu.mode == SERIES:
        return 2 * _halfline_series(n, p, mu.series_depth)
    return 2 / qnum(n + 1, p)


def integrate_polynomial(coeffs: dict, mu: QMeasure):
    """Linear extension of the monomial rule to a finite coefficient map."""
    total = 0 * mu.p.one
    for k in sorted(coeffs):
        v = coeffs[k]
        if v != 0:
            total = total + v * integrate_monomial(k, mu)
    return total


def winding_weight(p: QParam, m: int) -> dict:
    """Weight polynomial carrying the winding-factor content of f~ f.

    Built by repeatedly applying mul_position to the bare winding function,
    so this module and the position algebra cannot drift apart, then scaled
    by the hermitian-conjugation prefactor of the winding factor.
    """
    f = angular_function(p, m, {0: p.one})
    step = -1 if m >= 0 else 1
    for _ in range(abs(m)):
        f = mul_position(step, f)
    pref = (-1 / p.q) ** m if m >= 0 else (-p.q) ** (-m)
    return _pscale(f.coeffs, pref)


def winding_weight_factors(p: QParam, m: int):
    """The same weight in factored form: prefactor and the alpha_i of
    prod_i (1 - alpha_i x0**2), with alpha_i = q**e_i returned as the
    integer exponents e_i.

    Expanding the factors reproduces winding_weight exactly; the factored
    form exists because for q < 1 the expanded coefficients grow like
    q**(-4|m|) and pointwise evaluation through the factors is the
    numerically stable route.  Keeping the exponents integral lets the
    grid evaluation produce the exact zeros of the weight (the first |m|
    grid points), instead of epsilon-sized phantoms multiplied by the
    remaining, possibly huge, factors.
    """
    two = qnum(2, p)
    if m >= 0:
        pref = (1 / (p.q * two)) ** m
        exponents = tuple(-(4 * i + 2) for i in range(m))
    else:
        pref = (p.q / two) ** (-m)
        exponents = tuple(4 * i + 2 for i in range(-m))
    return pref, exponents


def _poly_eval(coeffs: dict, x):
    """Horner evaluation of a sparse coefficient map."""
    if not coeffs:
        return 0 * x
    deg = max(coeffs)
    acc = coeffs.get(deg, 0)
    for k in range(deg - 1, -1, -1):
        acc = acc * x + coeffs.get(k, 0)
    return acc


def _series_depth_for(p: QParam) -> int:
    import math as _math

    b = min(float(p.q), 1 / float(p.q))
    return min(5000, int(_math.ceil(42.0 / (-2.0 * _math.log(b)))) + 10)


def _integrate_weighted_series(poly: dict, pref, exponents, p: QParam, depth: int):
    """Pointwise grid sum of poly(x) * pref * prod(1 - q**e x**2) over (-1, 1).

    The grid lives at x = b**(2k+1) with b = min(q, 1/q): the monomial
    functional is invariant under q -> 1/q, so the reciprocal grid
    evaluates the same integral when q > 1.  Each weight factor is then an
    integer power of q, so the weight's exact zeros come out as exact
    zeros and the surviving factors lie in [0, 1): no cancellation occurs
    even when the expanded weight carries huge coefficients.
    """
    q = p.q
    s = 1 if q < 1 else -1
    b = q if q < 1 else 1 / q
    total = 0 * p.one
    for k in range(depth):
        x = b ** (2 * k + 1)
        w = b ** (2 * k) - b ** (2 * k + 2)
        wgt = pref
        for e in exponents:
            ee = s * (4 * k + 2) + e
            if ee == 0:
                wgt = 0 * wgt
                break
            wgt = wgt * (1 - q ** ee)
        if wgt != 0:
            total += (_poly_eval(poly, x) + _poly_eval(poly, -x)) * wgt * w
    return total


def inner_product(f: AngularFunction, g: AngularFunction, mu: QMeasure):
    """Hermitian inner product; conjugate-linear in f.

    Zero for unequal windings (exact angle integral); otherwise 2*pi times
    the integral of conj(P_f) P_g against the winding weight.

    Away from q = 1 in double precision the integral is evaluated
    pointwise on the geometric grid (the reciprocal grid for q > 1, which
    carries the same monomial functional) through the factored weight.
    That is exactly the same number as the closed form, monomial by
    monomial, but avoids the cancellations of the expanded weight and of
    large-coefficient integrands.
    """
    p = mu.p
    if f.p is not p and f.p != p:
        raise ValueError("function and measure must share the deformation parameter")
    if f.m != g.m:
        return 0 * p.one
    poly = _pmul(_pconj(f.coeffs), g.coeffs)
    use_series = mu.mode == SERIES or (
        not p.is_high and min(float(p.q), 1 / float(p.q)) < 0.97
    )
    if use_series:
        depth = mu.series_depth if mu.mode == SERIES else _series_depth_for(p)
        pref, exponents = winding_weight_factors(p, f.m)
        value = _integrate_weighted_series(poly, pref, exponents, p, depth)
    else:
        value = integrate_polynomial(_pmul(poly, winding_weight(p, f.m)), mu)
    return 2 * p.pi * value


@dataclass(frozen=True)
class ConvergenceProbe:
    n: int
    q: float
    limit: float
    rows: tuple
    depth_for_1e12: int | None


def series_convergence_probe(n: int, p: QParam, depths=(10, 25, 50, 100, 200, 400)) -> ConvergenceProbe:
    """Partial sums of the discrete half-line integral versus 1/[n+1].

    Only defined for 0 < q < 1.  Also reports the first depth at which the
    partial sum is within 1e-12 of the closed form.
    """
    if not p.q < 1:
        raise ValueError("convergence probe requires 0 < q < 1")
    limit = 1 / qnum(n + 1, p)
    rows = []
    for d in sorted(depths):
        s = _halfline_series(n, p, d)
        rows.append((d, float(s), float(abs(s - limit))))
    hit = None
    partial = 0 * p.one
    q = p.q
    for k in range(100000):
        x_mid = q ** (2 * k + 1)
        partial += x_mid ** n * (q ** (2 * k) - q ** (2 * k + 2))
        if abs(partial - limit) < 1e-12:
            hit = k + 1
            break
    return ConvergenceProbe(n=n, q=float(p.q), limit=float(limit), rows=tuple(rows), depth_for_1e12=hit)
