"""Fixed-winding angular functions and the deformed ladder operators.

An angular function is stored in normal-ordered form: a winding factor to
the left (the m-th power of the raising unit-sphere component for m >= 0,
of the lowering one for m < 0, phases implicit) and a polynomial in x0 to
the right.  Every operation here is closed on this family:

* products of opposite winding factors are polynomials in x0, so left and
  right multiplication by unit-sphere components stay polynomial;
* the 1/x0 inside the ladder kernels always follows an operator that
  annihilates the constant term, so it acts by exact monomial division;
* raising a negative winding (and lowering a positive one) produces a
  polynomial that is exactly divisible by the winding-product polynomial
  one order down; the division is performed factor by factor and the
  remainder is checked against the coefficient tolerance.

Coefficients are plain floats/complex in double mode and mpmath numbers in
high precision mode; all scalar arithmetic is routed through QParam.
"""

from __future__ import annotations

from dataclasses import dataclass

from .qcore import QParam, qdouble_factorial, qnum, qnum_base2


@dataclass(frozen=True)
class HarmonicLabel:
    """An (l, m) label with |m| <= l."""

    l: int
    m: int

    def __post_init__(self):
        if self.l < 0 or abs(self.m) > self.l:
            raise ValueError(f"invalid harmonic label (l={self.l}, m={self.m})")


@dataclass(frozen=True, eq=False)
class AngularFunction:
    """Winding index m plus a finite coefficient map k -> a_k for x0**k."""

    p: QParam
    m: int
    coeffs: dict

    def __post_init__(self):
        pruned = {int(k): v for k, v in self.coeffs.items() if v != 0}
        if any(k < 0 for k in pruned):
            raise ValueError("coefficients must sit at nonnegative powers of x0")
        object.__setattr__(self, "coeffs", pruned)

    @property
    def degree(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def scaled(self, s) -> "AngularFunction":
        return AngularFunction(self.p, self.m, _pscale(self.coeffs, s))

    def __add__(self, other: "AngularFunction") -> "AngularFunction":
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if self.m != other.m:
            raise ValueError("cannot add functions of different winding")
        return AngularFunction(self.p, self.m, _padd(self.coeffs, other.coeffs))

    def __sub__(self, other: "AngularFunction") -> "AngularFunction":
        return self + other.scaled(-1)

    def __rmul__(self, s) -> "AngularFunction":
        return self.scaled(s)

    def distance(self, other: "AngularFunction") -> float:
        """Max absolute coefficient difference; infinite for unequal windings
        unless one side is zero."""
        if self.m != other.m and not (self.is_zero or other.is_zero):
            return float("inf")
        keys = set(self.coeffs) | set(other.coeffs)
        if not keys:
            return 0.0
        return max(abs(self.coeffs.get(k, 0) - other.coeffs.get(k, 0)) for k in keys)

    def isclose(self, other: "AngularFunction", tol: float | None = None) -> bool:
        tol = self.p.coeff_tol if tol is None else tol
        return self.distance(other) <= tol

    def max_abs(self) -> float:
        return max((abs(v) for v in self.coeffs.values()), default=0.0)

    def to_payload(self) -> dict:
        """JSON-serializable form: winding plus (k, re, im) coefficient rows."""
        rows = []
        for k in sorted(self.coeffs):
            z = complex(self.coeffs[k])
            rows.append([k, z.real, z.imag])
        return {"winding": self.m, "coefficients": rows}


def angular_function(p: QParam, m: int, coeffs: dict) -> AngularFunction:
    return AngularFunction(p, m, dict(coeffs))


def from_payload(p: QParam, payload: dict) -> AngularFunction:
    coeffs = {}
    for k, re, im in payload["coefficients"]:
        coeffs[int(k)] = complex(re, im) if im else re
    return AngularFunction(p, int(payload["winding"]), coeffs)


# ----------------------------- polynomial helpers -----------------------------

def _padd(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, 0) + v
        if w == 0:
            out.pop(k, None)
        else:
            out[k] = w
    return out


def _pscale(a: dict, s) -> dict:
    if s == 0:
        return {}
    return {k: s * v for k, v in a.items()}


def _pshift(a: dict, j: int = 1) -> dict:
    return {k + j: v for k, v in a.items()}


def _pdilate(a: dict, s) -> dict:
    """Coefficients of P(s*x0)."""
    return {k: v * s ** k for k, v in a.items()}


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = ka + kb
            w = out.get(k, 0) + va * vb
            if w == 0:
                out.pop(k, None)
            else:
                out[k] = w
    return out


def _pconj(a: dict) -> dict:
    return {k: v.conjugate() if hasattr(v, "conjugate") else v for k, v in a.items()}


def _qderiv(a: dict, p: QParam, sign: int) -> dict:
    """The ladder kernel (1/x0)(1 - q**(sign*2*N0))/(1 - q**(sign*2)).

    Acts on x0**k as q**(sign*(k-1)) [k] x0**(k-1); the constant term is
    annihilated before the 1/x0 factor applies, so the result is a
    polynomial.  sign = -1 is the raising kernel, sign = +1 the lowering
    one.
    """
    out: dict = {}
    for k, v in a.items():
        if k == 0:
            continue
        out[k - 1] = v * p.q ** (sign * (k - 1)) * qnum(k, p)
    return out


def _pdiv_factor(a: dict, alpha, p: QParam) -> dict:
    """Exact division of a by (1 - alpha*x0**2), remainder checked.

    Solved bottom-up for |alpha| <= 1 and top-down otherwise so that the
    triangular recurrence never amplifies rounding.
    """
    if not a:
        return {}
    deg = max(a)
    scale = max(abs(v) for v in a.values())
    tol = p.coeff_tol * max(1.0, float(scale))
    r: dict = {}
    if abs(alpha) <= 1:
        for k in range(0, deg + 1):
            val = a.get(k, 0) + alpha * r.get(k - 2, 0)
            if k <= deg - 2:
                if val != 0:
                    r[k] = val
            else:
                if abs(val) > tol:
                    raise ArithmeticError(
                        f"winding-product division left remainder {abs(val):.3e} at degree {k}"
                    )
    else:
        for k in range(deg, 1, -1):
            val = (r.get(k, 0) - a.get(k, 0)) / alpha
            if val != 0:
                r[k - 2] = val
        for k in (0, 1):
            rem = a.get(k, 0) - r.get(k, 0)
            if abs(rem) > tol:
                raise ArithmeticError(
                    f"winding-product division left remainder {abs(rem):.3e} at degree {k}"
                )
        r = {k: v for k, v in r.items() if k <= deg - 2 and v != 0}
    return r


# ----------------------------- position multiplication -----------------------------

def _mixed_product(coeffs: dict, alpha, p: QParam) -> dict:
    """-(1/[2]) (1 - alpha x0**2) P, the polynomial replacing a mixed
    winding pair commuted through the remaining winding factor."""
    two = qnum(2, p)
    out = _pscale(coeffs, -1 / two)
    return _padd(out, _pscale(_pshift(coeffs, 2), alpha / two))


def mul_position(k: int, f: AngularFunction) -> AngularFunction:
    """Left-multiply f by the unit-sphere component with spherical index k.

    k = 0 commutes through the winding factor picking up q**(-2m); k = +/-1
    either extends the winding factor or contracts one mixed pair into its
    polynomial product.
    """
    p, m = f.p, f.m
    if k == 0:
        return AngularFunction(p, m, _pscale(_pshift(f.coeffs), p.q ** (-2 * m)))
    if k == 1:
        if m >= 0:
            return AngularFunction(p, m + 1, f.coeffs)
        alpha = p.q ** (-4 * m - 2)
        return AngularFunction(p, m + 1, _mixed_product(f.coeffs, alpha, p))
    if k == -1:
        if m <= 0:
            return AngularFunction(p, m - 1, f.coeffs)
        alpha = p.q ** (-4 * m + 2)
        return AngularFunction(p, m - 1, _mixed_product(f.coeffs, alpha, p))
    raise ValueError(f"position index must be one of +1, 0, -1, got {k!r}")


def mul_position_right(k: int, f: AngularFunction) -> AngularFunction:
    """Right-multiply f by the unit-sphere component with index k.

    Needed by the noncommutativity checks: the polynomial part is commuted
    through the new factor (dilating its argument) before any mixed pair is
    contracted.
    """
    p, m = f.p, f.m
    if k == 0:
        return AngularFunction(p, m, _pshift(f.coeffs))
    if k == 1:
        tail = _pdilate(f.coeffs, p.q ** (-2))
        if m >= 0:
            return AngularFunction(p, m + 1, tail)
        return AngularFunction(p, m + 1, _mixed_product(tail, p.q ** (-2), p))
    if k == -1:
        tail = _pdilate(f.coeffs, p.q ** 2)
        if m <= 0:
            return AngularFunction(p, m - 1, tail)
        return AngularFunction(p, m - 1, _mixed_product(tail, p.q ** 2, p))
    raise ValueError(f"position index must be one of +1, 0, -1, got {k!r}")


# ----------------------------- ladder operators -----------------------------

def apply_l0(f: AngularFunction) -> AngularFunction:
    return f.scaled(f.m)


def _divide_winding_product(num: dict, j: int, sign: int, p: QParam) -> dict:
    """Divide by the order-j winding-product polynomial.

    The product is (-1/[2])**j prod_{i<j} (1 - q**(sign*(4i+2)) x0**2); the
    division runs factor by factor and rescales by (-[2])**j at the end.
    """
    out = num
    for i in range(j):
        out = _pdiv_factor(out, p.q ** (sign * (4 * i + 2)), p)
    return _pscale(out, (-qnum(2, p)) ** j)


def apply_lplus(f: AngularFunction) -> AngularFunction:
    """Raising operator: strip the winding factor, apply the raising kernel
    to the polynomial part, recreate the winding one step up.

    On negative windings the strip contracts all mixed pairs first and the
    recreated factor is recovered by exact division.
    """
    p, m = f.p, f.m
    pref = p.sqrt(qnum(2, p)) * p.q ** m
    if m >= 0:
        poly = _qderiv(f.coeffs, p, -1)
        return AngularFunction(p, m + 1, _pscale(poly, pref))
    j = -m
    g = f
    for _ in range(j):
        g = mul_position(1, g)
    num = _qderiv(g.coeffs, p, -1)
    poly = _divide_winding_product(num, j - 1, +1, p)
    return AngularFunction(p, m + 1, _pscale(poly, pref))


def apply_lminus(f: AngularFunction) -> AngularFunction:
    """Lowering operator, mirror image of apply_lplus."""
    p, m = f.p, f.m
    pref = p.sqrt(qnum(2, p)) * p.q ** m
    if m <= 0:
        poly = _qderiv(f.coeffs, p, +1)
        return AngularFunction(p, m - 1, _pscale(poly, pref))
    j = m
    g = f
    for _ in range(j):
        g = mul_position(-1, g)
    num = _qderiv(g.coeffs, p, +1)
    poly = _divide_winding_product(num, j - 1, -1, p)
    return AngularFunction(p, m - 1, _pscale(poly, pref))


def apply_lambda(k: int, f: AngularFunction) -> AngularFunction:
    """Components of the vector rebuilt from the generators."""
    p = f.p
    if k == 1:
        g = apply_lplus(f)
        return g.scaled(-p.sqrt(1 / qnum(2, p)) * p.q ** (-g.m))
    if k == -1:
        g = apply_lminus(f)
        return g.scaled(p.sqrt(1 / qnum(2, p)) * p.q ** (-g.m))
    if k == 0:
        two = qnum(2, p)
        a = apply_lplus(apply_lminus(f)).scaled(p.q / two)
        b = apply_lminus(apply_lplus(f)).scaled(-1 / (p.q * two))
        return a + b
    raise ValueError(f"vector index must be one of +1, 0, -1, got {k!r}")


def apply_c_invariant(f: AngularFunction) -> AngularFunction:
    """The third invariant q**(-2 L0) + lambda Lambda_0 acting on f."""
    p = f.p
    return f.scaled(p.q ** (-2 * f.m)) + apply_lambda(0, f).scaled(p.lam)


def apply_casimir(f: AngularFunction) -> AngularFunction:
    """L- L+ + [L0][L0 + 1] acting on f; eigenvalue [l][l+1] on harmonics."""
    p = f.p
    return apply_lminus(apply_lplus(f)) + f.scaled(qnum(f.m, p) * qnum(f.m + 1, p))


# ----------------------------- harmonic construction -----------------------------

def _check_nonneg_label(l: int, m: int):
    if l < 0 or m < 0 or m > l:
        raise ValueError(f"label requires 0 <= m <= l, got (l={l}, m={m})")


def build_phi(l: int, m: int, p: QParam) -> AngularFunction:
    """Unnormalized harmonic polynomial from the two-step recursion.

    a_{k+2} = -q**(-2m) [l-m-k][l+m+k+1] / ([k+1][k+2]) a_k starting from
    a_0 = 1 for even l-m, a_1 = 1 for odd l-m; terminates at k = l-m.
    """
    _check_nonneg_label(l, m)
    k0 = (l - m) % 2
    coeffs = {k0: p.one}
    k = k0
    while k + 2 <= l - m:
        num = qnum(l - m - k, p) * qnum(l + m + k + 1, p)
        den = qnum(k + 1, p) * qnum(k + 2, p)
        coeffs[k + 2] = -p.q ** (-2 * m) * num / den * coeffs[k]
        k += 2
    return AngularFunction(p, m, coeffs)


def hypergeom_phi(l: int, m: int, p: QParam) -> AngularFunction:
    """The same polynomial from the terminating hypergeometric series in
    base q**2, argument (q**-m x0)**2.

    Must reproduce build_phi coefficient by coefficient; that equivalence
    is the closed-form-versus-recursion oracle.  The odd-parity series is
    normalized so its linear coefficient is 1, matching build_phi.
    """
    _check_nonneg_label(l, m)
    odd = (l - m) % 2
    if odd:
        a2, b2, c2 = l + m + 2, m - l + 1, 3
        nterms = (l - m - 1) // 2
    else:
        a2, b2, c2 = l + m + 1, m - l, 1
        nterms = (l - m) // 2
    z = p.q ** (-2 * m)
    term = p.one
    coeffs = {odd: term}
    for n in range(nterms):
        ratio = (
            qnum_base2(a2 + 2 * n, p)
            * qnum_base2(b2 + 2 * n, p)
            / (qnum_base2(c2 + 2 * n, p) * qnum_base2(2 + 2 * n, p))
        )
        term = term * ratio * z
        coeffs[2 * (n + 1) + odd] = term
    return AngularFunction(p, m, coeffs)


def _phi_series_convention(l: int, m: int, p: QParam) -> AngularFunction:
    """build_phi rescaled to the closed-form series convention.

    The series form carries leading coefficient q**-m in the odd-parity
    case (1 in the even one); the printed normalization constants and the
    one-step ladder relations are exact in this convention.
    """
    phi = build_phi(l, m, p)
    if (l - m) % 2:
        return phi.scaled(p.q ** (-m))
    return phi


def normalization_constant(l: int, m: int, p: QParam):
    """Parity-dependent normalization for the series-convention polynomial."""
    _check_nonneg_label(l, m)
    two = qnum(2, p)
    front = p.sqrt(qnum(2 * l + 1, p) / (4 * p.pi)) * p.sqrt(two ** m)
    if (l - m) % 2:
        phase = (-1) ** ((l - m - 1) // 2)
        ratio = (
            qdouble_factorial(l - m, p)
            * qdouble_factorial(l + m, p)
            / (qdouble_factorial(l - m - 1, p) * qdouble_factorial(l + m - 1, p))
        )
    else:
        phase = (-1) ** ((l - m) // 2)
        ratio = (
            qdouble_factorial(l - m - 1, p)
            * qdouble_factorial(l + m - 1, p)
            / (qdouble_factorial(l - m, p) * qdouble_factorial(l + m, p))
        )
    return phase * front * p.sqrt(ratio)


def normalize_y(l: int, m: int, p: QParam) -> AngularFunction:
    """Unit-norm harmonic for 0 <= m <= l under the deformed inner product."""
    return _phi_series_convention(l, m, p).scaled(normalization_constant(l, m, p))


def ladder_factor(l: int, m: int, p: QParam):
    """sqrt([l+m][l-m+1]): norm of the lowering step out of (l, m)."""
    return p.sqrt(qnum(l + m, p) * qnum(l - m + 1, p))


def build_negative_m(l: int, m: int, p: QParam) -> AngularFunction:
    """Harmonic with -l <= m < 0, obtained by lowering from m = 0.

    Each step divides by the ladder factor, which keeps the norm at one
    whenever the lowering operator is the adjoint of the raising one.
    """
    if m >= 0 or m < -l:
        raise ValueError(f"negative-m construction requires -l <= m < 0, got (l={l}, m={m})")
    y = normalize_y(l, 0, p)
    for mu in range(0, m, -1):
        y = apply_lminus(y).scaled(1 / ladder_factor(l, mu, p))
    return y


def build_y(l: int, m: int, p: QParam) -> AngularFunction:
    """Normalized harmonic for any |m| <= l."""
    if abs(m) > l:
        raise ValueError(f"invalid label (l={l}, m={m})")
    if m >= 0:
        return normalize_y(l, m, p)
    return build_negative_m(l, m, p)


@dataclass(frozen=True)
class LadderCheckResult:
    ok: bool
    residual: float
    scaled_residual: float


def ladder_identity_check(l: int, m: int, p: QParam, tol: float | None = None) -> LadderCheckResult:
    """One-step raising relation between neighbouring series-convention
    polynomials.

    The raising step carries the dilatation weight q**m of the winding it
    acts on (the same factor the full raising operator carries); with that
    weight included the relation is exact:  the raised polynomial equals
    -[l-m][l+m+1] times the next one for even l-m and exactly the next one
    for odd l-m.  scaled_residual divides by the coefficient magnitude,
    which reaches ~1e5 at q = 0.5.
    """
    if not (0 <= m < l):
        raise ValueError(f"ladder check requires 0 <= m < l, got (l={l}, m={m})")
    two = qnum(2, p)
    lhs = apply_lplus(_phi_series_convention(l, m, p)).scaled(1 / p.sqrt(two))
    rhs = _phi_series_convention(l, m + 1, p)
    if (l - m) % 2 == 0:
        rhs = rhs.scaled(-qnum(l - m, p) * qnum(l + m + 1, p))
    residual = float(lhs.distance(rhs))
    scale = max(1.0, float(rhs.max_abs()))
    limit = (p.coeff_tol if tol is None else tol) * scale
    return LadderCheckResult(ok=bool(residual <= limit), residual=residual,
                             scaled_residual=residual / scale)
