import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsu2 import (
    QMeasure,
    QParam,
    angular_function,
    build_y,
    inner_product,
    integrate_monomial,
    integrate_polynomial,
    qnum,
    series_convergence_probe,
    winding_weight,
    winding_weight_factors,
)
from qsu2.angular import _pmul

qvals = st.one_of(
    st.just(1.0),
    st.floats(min_value=0.3, max_value=3.0).filter(lambda q: abs(q - 1) > 1e-3),
)


def test_monomial_values():
    p = QParam(0.5)
    mu = QMeasure(p)
    assert integrate_monomial(0, mu) == 2.0
    assert integrate_monomial(1, mu) == 0.0
    three = (0.5 ** 3 - 2.0 ** 3) / (0.5 - 2.0)
    assert three == 5.25
    assert integrate_monomial(2, mu) == pytest.approx(2 / three, rel=1e-15)


def test_monomial_rejects_negative_degree():
    with pytest.raises(ValueError):
        integrate_monomial(-2, QMeasure(QParam(1.2)))


@given(n=st.integers(0, 10), q=qvals)
def test_monomial_q_inverse_symmetry(n, q):
    p = QParam(q)
    a = integrate_monomial(n, QMeasure(p))
    b = integrate_monomial(n, QMeasure(p.reciprocal()))
    assert abs(a - b) < 1e-13 * max(1.0, abs(a))


@given(n=st.integers(0, 8), q=qvals)
def test_even_monomials_positive(n, q):
    assert integrate_monomial(2 * n, QMeasure(QParam(q))) > 0


def test_polynomial_orthogonality_row():
    # the quadrupole polynomial integrates to zero against the constant
    for q in (0.5, 1.0, 1.7):
        p = QParam(q)
        three = qnum(3, p)
        val = integrate_polynomial({0: 1.0, 2: -three}, QMeasure(p))
        assert abs(val) < 1e-13


def test_polynomial_classical():
    assert integrate_polynomial({2: 1.0}, QMeasure(QParam(1.0))) == pytest.approx(2 / 3, rel=1e-15)


@given(coeffs=st.dictionaries(st.integers(0, 6), st.floats(-3, 3), max_size=5))
@settings(max_examples=40)
def test_series_matches_closed_form(coeffs):
    p = QParam(0.5)
    closed = integrate_polynomial(coeffs, QMeasure(p))
    series = integrate_polynomial(coeffs, QMeasure(p, "series", 200))
    assert abs(closed - series) < 1e-12 * max(1.0, abs(closed))


def test_series_mode_requires_small_q():
    with pytest.raises(ValueError):
        QMeasure(QParam(1.5), "series", 100)
    with pytest.raises(ValueError):
        QMeasure(QParam(1.0), "series", 100)
    with pytest.raises(ValueError):
        QMeasure(QParam(0.5), "series", 0)
    with pytest.raises(ValueError):
        QMeasure(QParam(0.5), "fourier")


def test_convergence_probe():
    probe = series_convergence_probe(0, QParam(0.5))
    assert probe.depth_for_1e12 is not None and probe.depth_for_1e12 <= 50
    errs = [row[2] for row in probe.rows]
    assert errs == sorted(errs, reverse=True)

    p9 = QParam(0.9)
    probe9 = series_convergence_probe(2, p9)
    assert probe9.limit == pytest.approx(float(1 / qnum(3, p9)), rel=1e-14)
    # closer to one needs more grid points
    assert probe9.depth_for_1e12 > probe.depth_for_1e12


def test_convergence_probe_requires_small_q():
    with pytest.raises(ValueError):
        series_convergence_probe(0, QParam(1.2))


def test_inner_product_winding_orthogonality():
    p = QParam(1.5)
    mu = QMeasure(p)
    assert inner_product(build_y(1, 0, p), build_y(0, 0, p), mu) == 0
    f = angular_function(p, 2, {0: 1.0})
    g = angular_function(p, -1, {0: 1.0, 1: 2.0})
    assert inner_product(f, g, mu) == 0


def test_inner_product_parameter_mismatch():
    p, other = QParam(1.5), QParam(1.4)
    f = angular_function(p, 0, {0: 1.0})
    with pytest.raises(ValueError):
        inner_product(f, f, QMeasure(other))


def test_gram_matrix_identity():
    for q in (0.5, 0.9, 1.5):
        p = QParam(q)
        mu = QMeasure(p)
        ys = [(l, m, build_y(l, m, p)) for l in range(5) for m in range(-l, l + 1)]
        for i, (l1, m1, y1) in enumerate(ys):
            for l2, m2, y2 in ys[i:]:
                got = inner_product(y1, y2, mu)
                want = 1.0 if (l1, m1) == (l2, m2) else 0.0
                assert abs(got - want) < 1e-9, (q, (l1, m1), (l2, m2))


def test_gram_matrix_wide_deformation():
    # exercises the two stability routes: the geometric grid with exact
    # weight zeros at q < 1 and the reciprocal grid at q > 1
    for q in (0.45, 2.2):
        p = QParam(q)
        mu = QMeasure(p)
        ys = [(l, m, build_y(l, m, p)) for l in range(6) for m in range(-l, l + 1)]
        for i, (l1, m1, y1) in enumerate(ys):
            for l2, m2, y2 in ys[i:]:
                want = 1.0 if (l1, m1) == (l2, m2) else 0.0
                assert abs(inner_product(y1, y2, mu) - want) < 1e-8, (q, (l1, m1), (l2, m2))


def test_uniform_state_second_moment():
    for q in (0.5, 1.0, 1.5):
        p = QParam(q)
        mu = QMeasure(p)
        val = integrate_monomial(2, mu) / integrate_monomial(0, mu)
        assert abs(val - 1 / qnum(3, p)) < 1e-14


def test_weight_factored_matches_expanded():
    for q in (0.6, 1.4):
        p = QParam(q)
        for m in range(-5, 6):
            w = winding_weight(p, m)
            pref, exponents = winding_weight_factors(p, m)
            expanded = {0: pref}
            for e in exponents:
                expanded = _pmul(expanded, {0: 1.0, 2: -p.q ** e})
            scale = max(abs(v) for v in w.values())
            keys = set(w) | set(expanded)
            d = max(abs(w.get(k, 0) - expanded.get(k, 0)) for k in keys)
            assert d < 1e-12 * max(1.0, scale), (q, m, d)


def test_inner_product_series_measure_route():
    # an explicit series measure gives the same inner products as the
    # closed form
    p = QParam(0.5)
    f = angular_function(p, 2, {0: 0.7, 1: -0.2, 3: 1.1})
    g = angular_function(p, 2, {0: 1.3, 2: 0.5})
    closed = inner_product(f, g, QMeasure(p))
    series = inner_product(f, g, QMeasure(p, "series", 300))
    assert abs(closed - series) < 1e-12 * max(1.0, abs(closed))


def test_inner_product_conjugate_linearity():
    p = QParam(1.3)
    mu = QMeasure(p)
    f = angular_function(p, 1, {0: 1 + 2j, 2: -0.5j})
    g = angular_function(p, 1, {1: 0.7, 2: 1.5})
    lhs = inner_product(f.scaled(2j), g, mu)
    rhs = -2j * inner_product(f, g, mu)
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))


def test_high_precision_integration():
    p = QParam(0.5, "high")
    mu = QMeasure(p)
    val = integrate_monomial(2, mu)
    assert abs(val - 2 / qnum(3, p)) < 1e-50
