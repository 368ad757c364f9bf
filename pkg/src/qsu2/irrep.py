"""Block-sparse operator matrices on the truncated harmonic basis and the
identity-verification engine.

Matrices act on the basis {|l, m> : l <= lmax, |m| <= l} and are stored as
dense blocks keyed by (l_out, l_in); all operators here have bandwidth at
most one in l.  Identities are asserted only on interior blocks
(l <= lmax - 2), which are unreachable from truncation artifacts because
no tested identity composes more than two bandwidth-one operators.

The ladder matrix elements use the positive-real convention
sqrt([l -+ m][l +- m + 1]); only the product of raising and lowering steps
is fixed by the algebra, and this gauge matches the phases of the
constructed harmonics, so function-level and matrix-level coefficients can
be compared directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qcore import QParam, invariants, qnum


def _zeros(p: QParam, shape):
    if p.is_high:
        block = np.empty(shape, dtype=object)
        block[:] = 0 * p.one
        return block
    return np.zeros(shape, dtype=complex)


@dataclass
class OperatorMatrix:
    """Operator on the truncated basis, stored as dense (l_out, l_in) blocks.

    delta_m records the m-shift the operator carries (None for mixed).
    Instances are immutable by convention once built.
    """

    p: QParam
    lmax: int
    blocks: dict = field(default_factory=dict)
    delta_m: int | None = None

    def _set(self, lo: int, li: int, mo: int, mi: int, value):
        key = (lo, li)
        if key not in self.blocks:
            self.blocks[key] = _zeros(self.p, (2 * lo + 1, 2 * li + 1))
        self.blocks[key][mo + lo, mi + li] = value

    def block(self, lo: int, li: int):
        blk = self.blocks.get((lo, li))
        if blk is None:
            return _zeros(self.p, (2 * lo + 1, 2 * li + 1))
        return blk

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        dm = None
        if self.delta_m is not None and other.delta_m is not None:
            dm = self.delta_m + other.delta_m
        out = OperatorMatrix(self.p, self.lmax, {}, dm)
        for (lo, k1), a in self.blocks.items():
            for (k2, li), b in other.blocks.items():
                if k1 != k2:
                    continue
                prod = np.dot(a, b)
                key = (lo, li)
                if key in out.blocks:
                    out.blocks[key] = out.blocks[key] + prod
                else:
                    out.blocks[key] = prod
        return out

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        dm = self.delta_m if self.delta_m == other.delta_m else None
        out = OperatorMatrix(self.p, self.lmax, {}, dm)
        for key in set(self.blocks) | set(other.blocks):
            lo, li = key
            out.blocks[key] = self.block(lo, li) + other.block(lo, li)
        return out

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return self + other.scaled(-1)

    def scaled(self, s) -> "OperatorMatrix":
        out = OperatorMatrix(self.p, self.lmax, {}, self.delta_m)
        for key, blk in self.blocks.items():
            out.blocks[key] = blk * s
        return out

    def __rmul__(self, s) -> "OperatorMatrix":
        return self.scaled(s)

    def __neg__(self) -> "OperatorMatrix":
        return self.scaled(-1)

    def dagger(self) -> "OperatorMatrix":
        dm = -self.delta_m if self.delta_m is not None else None
        out = OperatorMatrix(self.p, self.lmax, {}, dm)
        for (lo, li), blk in self.blocks.items():
            out.blocks[(li, lo)] = np.conjugate(blk.T)
        return out

    def restrict(self, l_top: int) -> "OperatorMatrix":
        """Keep only blocks with both labels at most l_top."""
        out = OperatorMatrix(self.p, self.lmax, {}, self.delta_m)
        for (lo, li), blk in self.blocks.items():
            if lo <= l_top and li <= l_top:
                out.blocks[(lo, li)] = blk
        return out

    def max_abs(self, l_top: int | None = None) -> float:
        worst = 0.0
        for (lo, li), blk in self.blocks.items():
            if l_top is not None and (lo > l_top or li > l_top):
                continue
            if blk.size:
                worst = max(worst, float(np.max(np.abs(blk))))
        return worst

    def diagonal(self, l: int):
        """Diagonal of the (l, l) block as a list over m = -l..l."""
        blk = self.block(l, l)
        return [blk[i, i] for i in range(2 * l + 1)]


def zero_operator(p: QParam, lmax: int, delta_m: int | None = None) -> OperatorMatrix:
    return OperatorMatrix(p, lmax, {}, delta_m)


def diag_operator(p: QParam, lmax: int, fn) -> OperatorMatrix:
    """Diagonal operator with entry fn(l, m)."""
    out = OperatorMatrix(p, lmax, {}, 0)
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            out._set(l, l, m, m, fn(l, m))
    return out


def identity_operator(p: QParam, lmax: int) -> OperatorMatrix:
    return diag_operator(p, lmax, lambda l, m: p.one)


def build_generators(p: QParam, lmax: int) -> dict:
    """L0 diagonal and the ladder matrices in the positive-real gauge."""
    if lmax < 0:
        raise ValueError("lmax must be nonnegative")
    l0 = diag_operator(p, lmax, lambda l, m: m * p.one)
    lp = zero_operator(p, lmax, +1)
    lm = zero_operator(p, lmax, -1)
    for l in range(lmax + 1):
        for m in range(-l, l):
            val = p.sqrt(qnum(l - m, p) * qnum(l + m + 1, p))
            lp._set(l, l, m + 1, m, val)
            lm._set(l, l, m, m + 1, val)
    return {"L0": l0, "Lplus": lp, "Lminus": lm}


def build_lambda(p: QParam, lmax: int, gen: dict | None = None) -> dict:
    """The vector rebuilt from the generators: components for k = +1, 0, -1."""
    gen = gen or build_generators(p, lmax)
    lp, lm = gen["Lplus"], gen["Lminus"]
    s = p.sqrt(1 / qnum(2, p))
    qml0 = diag_operator(p, lmax, lambda l, m: p.q ** (-m))
    lam_p = (qml0 @ lp).scaled(-s)
    lam_m = (qml0 @ lm).scaled(s)
    two = qnum(2, p)
    lam_0 = (lp @ lm).scaled(p.q / two) + (lm @ lp).scaled(-1 / (p.q * two))
    return {1: lam_p, 0: lam_0, -1: lam_m}


def build_invariant_c(p: QParam, lmax: int, lam: dict | None = None) -> OperatorMatrix:
    """Third invariant in operator form q**(-2 L0) + lambda * Lambda_0.

    Built from the operator expression rather than its eigenvalues, so that
    comparing its diagonal against the closed form is itself a check.
    """
    lam = lam or build_lambda(p, lmax)
    qm2l0 = diag_operator(p, lmax, lambda l, m: p.q ** (-2 * m))
    return qm2l0 + lam[0].scaled(p.lam)


def position_coeff_upper(p: QParam, l: int, m: int, k: int):
    """Coefficient of |l+1, m+k> in the position component k applied to |l, m>.

    The k = -1 prefactor is q**(-l-m), the value forced by the conjugation
    pair with the k = +1 component; it is also the value the integral
    cross-check reproduces.
    """
    two = qnum(2, p)
    d = qnum(2 * l + 1, p) * qnum(2 * l + 3, p)
    if k == 1:
        return p.q ** (l - m) * p.sqrt(qnum(l + m + 1, p) * qnum(l + m + 2, p) / (two * d))
    if k == 0:
        return p.q ** (-m) * p.sqrt(qnum(l - m + 1, p) * qnum(l + m + 1, p) / d)
    if k == -1:
        return p.q ** (-l - m) * p.sqrt(qnum(l - m + 1, p) * qnum(l - m + 2, p) / (two * d))
    raise ValueError(f"position index must be one of +1, 0, -1, got {k!r}")


def position_coeff_lower(p: QParam, l: int, m: int, k: int):
    """Coefficient of |l-1, m+k> in the position component k applied to |l, m>.

    The k = 0 coefficient is positive: the k = 0 component is self-adjoint,
    so its lower coefficient must equal the upper one a row down.
    """
    two = qnum(2, p)
    d = qnum(2 * l + 1, p) * qnum(2 * l - 1, p)
    if k == 1:
        return -p.q ** (-l - m - 1) * p.sqrt(qnum(l - m, p) * qnum(l - m - 1, p) / (two * d))
    if k == 0:
        return p.q ** (-m) * p.sqrt(qnum(l - m, p) * qnum(l + m, p) / d)
    if k == -1:
        return -p.q ** (l - m + 1) * p.sqrt(qnum(l + m, p) * qnum(l + m - 1, p) / (two * d))
    raise ValueError(f"position index must be one of +1, 0, -1, got {k!r}")


def build_position(p: QParam, lmax: int) -> dict:
    """Unit-sphere position components; bandwidth one in l, zero diagonal."""
    if lmax < 1:
        raise ValueError("position matrices need lmax >= 1")
    out = {k: zero_operator(p, lmax, k) for k in (1, 0, -1)}
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            for k in (1, 0, -1):
                if l + 1 <= lmax and abs(m + k) <= l + 1:
                    val = position_coeff_upper(p, l, m, k)
                    if val != 0:
                        out[k]._set(l + 1, l, m + k, m, val)
                if l - 1 >= 0 and abs(m + k) <= l - 1:
                    val = position_coeff_lower(p, l, m, k)
                    if val != 0:
                        out[k]._set(l - 1, l, m + k, m, val)
    return out


COMPOSED = "composed"
MATRIX_ELEMENTS = "matrixElements"


def build_partial(p: QParam, lmax: int, method: str = COMPOSED, parts: dict | None = None) -> dict:
    """Transverse derivative components by either construction route.

    COMPOSED assembles the cross-product-plus-invariant combination from
    the position, angular and invariant matrices; MATRIX_ELEMENTS scales
    the position blocks by +[2l+2]/[2] (raising l) and -[2l]/[2] (lowering
    l) with zero diagonal.  The two routes must agree on interior blocks.
    """
    if lmax < 1:
        raise ValueError("transverse derivative matrices need lmax >= 1")
    parts = parts or {}
    x = parts.get("x") or build_position(p, lmax)
    if method == MATRIX_ELEMENTS:
        two = qnum(2, p)
        out = {}
        for k in (1, 0, -1):
            d = zero_operator(p, lmax, k)
            for (lo, li), blk in x[k].blocks.items():
                if lo == li + 1:
                    d.blocks[(lo, li)] = blk * (qnum(2 * li + 2, p) / two)
                elif lo == li - 1:
                    d.blocks[(lo, li)] = blk * (-qnum(2 * li, p) / two)
            out[k] = d
        return out
    if method != COMPOSED:
        raise ValueError(f"unknown construction method {method!r}")
    lam = parts.get("lam") or build_lambda(p, lmax)
    c = parts.get("c") if parts.get("c") is not None else build_invariant_c(p, lmax, lam)
    q = p.q
    d1 = (x[1] @ lam[0]).scaled(1 / q) + (x[0] @ lam[1]).scaled(-q) + x[1] @ c
    d0 = x[1] @ lam[-1] + (x[0] @ lam[0]).scaled(-p.lam) - x[-1] @ lam[1] + x[0] @ c
    dm1 = (x[-1] @ lam[0]).scaled(-q) + (x[0] @ lam[-1]).scaled(1 / q) + x[-1] @ c
    return {1: d1, 0: d0, -1: dm1}


def scalar_product(u: dict, v: dict) -> OperatorMatrix:
    """Rank-zero contraction of two vector triples:
    -(1/q) u_1 v_-1 + u_0 v_0 - q u_-1 v_1."""
    p = u[0].p
    return (u[1] @ v[-1]).scaled(-1 / p.q) + u[0] @ v[0] + (u[-1] @ v[1]).scaled(-p.q)


# ----------------------------- verification engine -----------------------------

@dataclass(frozen=True)
class IdentityCheck:
    name: str
    group: str
    residual: float | None
    passed: bool | None
    note: str = ""

    def to_payload(self) -> dict:
        return {
            "name": self.name,
            "group": self.group,
            "residual": self.residual,
            "passed": self.passed,
            "note": self.note,
        }


@dataclass
class VerifyReport:
    meta: dict
    checks: list
    finding: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.passed is not None)

    @property
    def max_residual(self) -> float:
        vals = [c.residual for c in self.checks if c.residual is not None]
        return max(vals) if vals else 0.0

    def to_payload(self) -> dict:
        return {
            "meta": self.meta,
            "identities": [c.to_payload() for c in self.checks],
            "finding": self.finding,
        }


def _vector_condition_residual(p: QParam, lmax: int, gen: dict, triple: dict, interior: int) -> float:
    """Worst residual of the two defining vector relations over all
    components and both ladder directions."""
    l0, lp, lm = gen["L0"], gen["Lplus"], gen["Lminus"]
    two = p.sqrt(qnum(2, p))
    ql0 = diag_operator(p, lmax, lambda l, m: p.q ** m)
    worst = 0.0
    for k in (1, 0, -1):
        vk = triple[k]
        res = (l0 @ vk - vk @ l0) - vk.scaled(k)
        worst = max(worst, res.max_abs(interior))
        for sign, ladder in ((1, lp), (-1, lm)):
            target = triple.get(k + sign)
            lhs = (ladder @ vk - (vk @ ladder).scaled(p.q ** k)) @ ql0
            rhs = target.scaled(two) if target is not None else zero_operator(p, lmax)
            worst = max(worst, (lhs - rhs).max_abs(interior))
    return worst


def transverse_square_candidates(l: int, p: QParam) -> dict:
    """Candidate closed forms for the diagonal of the contracted transverse
    derivative, keyed by formula."""
    inv = invariants(l, p)
    two = qnum(2, p)
    printed = -(qnum(2 * l, p) * qnum(2 * l + 1, p) / (two * two) + inv.c ** 2)
    with_cross = -(inv.Cprime + inv.c ** 2 - inv.c)
    consistent = -(inv.Cprime + inv.c ** 2)
    return {
        "-([2l][2l+1]/[2]^2 + c_l^2)": printed,
        "-([2l][2l+2]/[2]^2 + c_l^2 - c_l)": with_cross,
        "-([2l][2l+2]/[2]^2 + c_l^2)": consistent,
    }


def verify_algebra(p: QParam, lmax: int, tol: float = 1e-10, interior_lmax: int | None = None) -> VerifyReport:
    """Run the full operator-identity catalogue at one deformation value.

    Residuals are max absolute entries over interior blocks.  The report
    also resolves which closed form the contracted transverse-derivative
    diagonal actually matches (the three candidates differ in the
    literature-facing bookkeeping of the cross term; exactly one is
    consistent for every l).
    """
    if lmax < 3:
        raise ValueError("verification needs lmax >= 3")
    interior = lmax - 2 if interior_lmax is None else interior_lmax
    q = p.q
    gen = build_generators(p, lmax)
    l0, lp, lm = gen["L0"], gen["Lplus"], gen["Lminus"]
    lam = build_lambda(p, lmax, gen)
    c_op = build_invariant_c(p, lmax, lam)
    x = build_position(p, lmax)
    d_comp = build_partial(p, lmax, COMPOSED, {"x": x, "lam": lam, "c": c_op})
    d_elem = build_partial(p, lmax, MATRIX_ELEMENTS, {"x": x})
    ident = identity_operator(p, lmax)

    checks: list[IdentityCheck] = []

    def add(name, residual, note=""):
        r = float(residual)
        checks.append(IdentityCheck(name, "operator", r, bool(r < tol), note))

    add("generator-commutator-raise", ((l0 @ lp - lp @ l0) - lp).max_abs(interior))
    add("generator-commutator-lower", ((l0 @ lm - lm @ l0) + lm).max_abs(interior))
    two_l0 = diag_operator(p, lmax, lambda l, m: qnum(2 * m, p))
    add("generator-commutator-ladder", ((lp @ lm - lm @ lp) - two_l0).max_abs(interior))
    cas = lm @ lp + diag_operator(p, lmax, lambda l, m: qnum(m, p) * qnum(m + 1, p))
    cas_diag = diag_operator(p, lmax, lambda l, m: invariants(l, p).C)
    add("casimir-diagonal", (cas - cas_diag).max_abs(interior))

    add("vector-condition-position", _vector_condition_residual(p, lmax, gen, x, interior))
    add("vector-condition-angular", _vector_condition_residual(p, lmax, gen, lam, interior))
    add("vector-condition-transverse", _vector_condition_residual(p, lmax, gen, d_comp, interior))

    r = max(
        (x[0] @ x[1] - (x[1] @ x[0]).scaled(q ** (-2))).max_abs(interior),
        (x[0] @ x[-1] - (x[-1] @ x[0]).scaled(q ** 2)).max_abs(interior),
    )
    add("position-exchange-dilation", r)
    add("position-exchange-mixed", (x[1] @ x[-1] - x[-1] @ x[1] - (x[0] @ x[0]).scaled(p.lam)).max_abs(interior))

    # Exchange relations for the transverse derivative.  The position-shaped
    # forms hold only on the l-changing blocks; on the l-preserving blocks
    # the exact identities carry curvature counterterms proportional to the
    # invariant times the angular vector.  Both residuals are reported: the
    # corrected identities gate the suite, the bare forms are informational.
    bare_dil = max(
        (d_comp[0] @ d_comp[1] - (d_comp[1] @ d_comp[0]).scaled(q ** (-2))).max_abs(interior),
        (d_comp[0] @ d_comp[-1] - (d_comp[-1] @ d_comp[0]).scaled(q ** 2)).max_abs(interior),
    )
    r = max(
        (
            d_comp[0] @ d_comp[1]
            - (d_comp[1] @ d_comp[0]).scaled(q ** (-2))
            - (c_op @ lam[1]).scaled(1 / q)
        ).max_abs(interior),
        (
            d_comp[0] @ d_comp[-1]
            - (d_comp[-1] @ d_comp[0]).scaled(q ** 2)
            + (c_op @ lam[-1]).scaled(q)
        ).max_abs(interior),
    )
    add("transverse-exchange-dilation", r, note="with the c*Lambda counterterm")
    checks.append(
        IdentityCheck(
            "transverse-exchange-dilation-bare", "operator", float(bare_dil), None,
            "position-shaped form without the counterterm; exact only on l-changing blocks",
        )
    )
    bare_mixed = (
        d_comp[1] @ d_comp[-1] - d_comp[-1] @ d_comp[1] - (d_comp[0] @ d_comp[0]).scaled(p.lam)
    ).max_abs(interior)
    r = (
        d_comp[1] @ d_comp[-1]
        - d_comp[-1] @ d_comp[1]
        - (d_comp[0] @ d_comp[0]).scaled(p.lam)
        + c_op @ lam[0]
    ).max_abs(interior)
    add("transverse-exchange-mixed", r, note="with the c*Lambda counterterm")
    checks.append(
        IdentityCheck(
            "transverse-exchange-mixed-bare", "operator", float(bare_mixed), None,
            "position-shaped form without the counterterm; exact only on l-changing blocks",
        )
    )

    add("unit-sphere-norm", (scalar_product(x, x) - ident).max_abs(interior))
    add("cross-contraction-xd", (scalar_product(x, d_comp) - c_op).max_abs(interior))
    add("cross-contraction-dx", (scalar_product(d_comp, x) + c_op).max_abs(interior))

    lam_sq = scalar_product(lam, lam)
    cprime_diag = diag_operator(p, lmax, lambda l, m: invariants(l, p).Cprime)
    add("angular-square-diagonal", (lam_sq - cprime_diag).max_abs(interior))
    c_diag = diag_operator(p, lmax, lambda l, m: invariants(l, p).c)
    add("third-invariant-diagonal", (c_op - c_diag).max_abs(interior))

    if p.is_one:
        checks.append(
            IdentityCheck(
                "transverse-from-invariant", "operator", None, None,
                "skipped at q = 1: the commutator route divides by lambda**2",
            )
        )
    else:
        r = 0.0
        for k in (1, 0, -1):
            comm = (c_op @ x[k] - x[k] @ c_op).scaled(1 / (p.lam * p.lam))
            r = max(r, (comm - d_comp[k]).max_abs(interior))
        add("transverse-from-invariant", r)

    r = max((d_comp[k] - d_elem[k]).max_abs(interior) for k in (1, 0, -1))
    add("transverse-dual-construction", r)

    r = 0.0
    for k in (1, 0, -1):
        r = max(r, (d_comp[k].dagger() + d_comp[-k].scaled((-1 / q) ** k)).max_abs(interior))
    add("transverse-hermiticity", r)
    r = max(
        (x[1].dagger() + x[-1].scaled(1 / q)).max_abs(interior),
        (x[-1].dagger() + x[1].scaled(q)).max_abs(interior),
        (x[0].dagger() - x[0]).max_abs(interior),
    )
    add("position-hermiticity", r)

    d_sq = scalar_product(d_comp, d_comp)
    cand_resid = {}
    for l in range(interior + 1):
        diag = d_sq.diagonal(l)
        for formula, value in transverse_square_candidates(l, p).items():
            worst = max(abs(v - value) for v in diag)
            cand_resid[formula] = max(cand_resid.get(formula, 0.0), float(worst))
    matched = sorted(name for name, r in cand_resid.items() if r < tol)
    consistent = "-([2l][2l+2]/[2]^2 + c_l^2)"
    finding = {
        "transverse_square_diagonal": {
            "candidates": cand_resid,
            "matched": matched,
            "resolution": consistent if consistent in matched else (matched[0] if matched else None),
            "note": (
                "the contracted transverse derivative equals -([2l][2l+2]/[2]^2 + c_l^2) on the diagonal; "
                "the variant with the extra -c_l term belongs to the full kinetic operator, where the "
                "cross contractions contribute it, and the [2l+1] variant only coincides at l = 0"
            ),
        },
        "transverse_exchange": {
            "bare_residual_dilation": float(bare_dil),
            "bare_residual_mixed": float(bare_mixed),
            "note": (
                "the transverse components satisfy d0 d1 = q^-2 d1 d0 + (1/q) c Lambda_1, "
                "d0 d-1 = q^2 d-1 d0 - q c Lambda_-1 and d1 d-1 = d-1 d1 + lambda d0^2 - c Lambda_0; "
                "the counterterms live purely in the l-preserving blocks and survive at q = 1"
            ),
        },
    }
    add("transverse-square-diagonal", cand_resid[consistent], note=f"matched: {', '.join(matched)}")

    meta = {
        "q": float(p.q),
        "lmax": lmax,
        "interior_lmax": interior,
        "precision": p.precision,
        "tolerance": tol,
    }
    return VerifyReport(meta=meta, checks=checks, finding=finding)
