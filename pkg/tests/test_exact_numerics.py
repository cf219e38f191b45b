import random
from fractions import Fraction as F

import pytest

from conftest import random_distribution

from stochastic_bne.errors import DimensionMismatch, SingularMatrix
from stochastic_bne.exact_numerics import (
    BETA,
    RATIONAL_FUNCTIONS,
    RATIONALS,
    DenseMatrix,
    FloatField,
    Ordering,
    Polynomial,
    RationalFunction,
    certified_sign,
    compare_near_limit,
    descartes_sign_changes,
    infer_field,
    invert,
    limit_at_one,
    resolvent_inverse,
    root_free_threshold,
    series_at_limit,
    solve_linear,
)


def test_polynomial_product_and_division():
    x = Polynomial.variable()
    prod = (x + 1) * (x - 1)
    assert prod == Polynomial((-1, 0, 1))
    q, r = divmod(prod, x - 1)
    assert q == x + 1
    assert r.is_zero()
    assert prod(F(3)) == 8


def test_rational_function_normal_form():
    f = (BETA * BETA - 1) / (BETA - 1)
    assert f == BETA + 1
    assert f.den == Polynomial((1,))
    assert (2 * BETA) / (4 * BETA + 2) == BETA / (2 * BETA + 1)
    assert (BETA / BETA).is_constant()


def test_rational_function_mixes_with_fractions():
    f = F(1, 2) + BETA
    assert f(F(1, 2)) == 1
    assert (F(3) - BETA)(F(1)) == 2
    assert (1 / (1 - BETA))(F(1, 2)) == 2


def test_rational_function_pole_raises():
    f = 1 / (1 - BETA)
    with pytest.raises(ZeroDivisionError):
        f(F(1))


def test_infer_field_prefers_wider_field():
    assert infer_field([F(1), 2]) == RATIONALS
    assert isinstance(infer_field([F(1), 0.5]), FloatField)
    assert infer_field([F(1), 0.5, BETA]) == RATIONAL_FUNCTIONS


def test_solve_linear_exact():
    A = DenseMatrix.from_rows([[1, F(-3, 5)], [0, F(2, 5)]])
    assert solve_linear(A, [4, 3]) == (F(17, 2), F(15, 2))


def test_solve_linear_float_uses_numpy_path():
    A = DenseMatrix.from_rows([[2.0, 1.0], [1.0, 3.0]])
    x = solve_linear(A, [3.0, 5.0])
    assert x == pytest.approx((0.8, 1.4))


def test_solve_linear_singular_and_shape():
    with pytest.raises(SingularMatrix):
        solve_linear(DenseMatrix.from_rows([[1, 2], [2, 4]]), [1, 2])
    with pytest.raises(DimensionMismatch):
        solve_linear(DenseMatrix.from_rows([[1, 2]]), [1])


def test_invert_exact():
    inv = invert(DenseMatrix.from_rows([[2, 1], [1, 1]]))
    assert inv.to_rows() == [[1, -1], [-1, 2]]


def test_resolvent_inverse_absorbing_chain():
    R = resolvent_inverse(DenseMatrix.from_rows([[1, 0], [1, 0]]))
    assert R[0, 0] == 1 / (1 - BETA)
    assert R[0, 1] == 0
    assert R[1, 0] == BETA / (1 - BETA)
    assert R[1, 1] == 1


def test_series_at_limit_of_simple_pole():
    series = series_at_limit(BETA / (1 - BETA), 2)
    assert series.order == -1
    assert series.coefficients == (F(1), F(-1))


@pytest.mark.parametrize(
    "f, g, expected",
    [
        (BETA, F(1, 2), Ordering.GREATER),
        (1 / (1 - BETA), 1000, Ordering.GREATER),
        ((1 + BETA) / (1 - BETA * BETA), 1 / (1 - BETA), Ordering.EQUAL),
        (F(3), 2 / (1 - BETA), Ordering.LESS),
        (1 - BETA, (1 - BETA) * 2, Ordering.LESS),
    ],
)
def test_compare_near_limit(f, g, expected):
    assert compare_near_limit(f, g) is expected


def test_limit_at_one():
    assert limit_at_one((1 - BETA) / (1 - BETA * BETA)) == F(1, 2)
    assert limit_at_one((1 - BETA) * (1 - BETA)) == 0
    assert limit_at_one(F(7)) == 7
    with pytest.raises(ValueError):
        limit_at_one(1 / (1 - BETA))


def test_descartes_counts():
    assert descartes_sign_changes(Polynomial((F(-1, 2), 1)), 0, 1) == 1
    assert descartes_sign_changes(Polynomial((1, 1)), 0, 1) == 0
    # корень 1/3 лежит на левой границе интервала
    assert descartes_sign_changes(Polynomial((-1, 3)), F(1, 3), 1) == 0


def test_root_free_threshold():
    assert root_free_threshold(Polynomial((-1, 3))) == F(1, 3)
    assert root_free_threshold(Polynomial((7, -11))) == F(7, 11)
    assert root_free_threshold(Polynomial((1, 1))) == 0
    assert root_free_threshold(Polynomial((5,))) == 0
    # корень снаружи [0, 1) не мешает
    assert root_free_threshold(Polynomial((-2, 1))) == 0


def test_dense_matrix_ops():
    A = DenseMatrix.from_rows([[1, 2], [3, 4]])
    I = DenseMatrix.identity(2)
    assert (A @ I).equals(A)
    assert (A - A).equals(DenseMatrix.zeros(2, 2))
    assert A.transpose().to_rows() == [[1, 3], [2, 4]]
    assert A.apply([1, 1]) == (3, 7)
    assert A.scaled(F(1, 2))[1, 1] == 2
    with pytest.raises(DimensionMismatch):
        A @ DenseMatrix.from_rows([[1, 2, 3]])


def test_rational_function_format():
    f = RationalFunction(Polynomial((1, 3)), Polynomial((7, 5)))
    text = f.format("α")
    assert "α" in text
    assert "β" in str(f)


def test_compose_substitutes_variable():
    alpha = RationalFunction.variable()
    beta_of_alpha = 1 / (1 + alpha)
    assert (1 / (1 - BETA)).compose(beta_of_alpha) == (1 + alpha) / alpha
    assert RationalFunction.constant(F(3)).compose(beta_of_alpha) == 3
    assert Polynomial((F(1), F(2))).compose(Polynomial((F(0), F(0), F(1)))) == Polynomial((F(1), F(0), F(2)))


def _random_polynomial(rng, max_degree=2):
    return Polynomial(F(rng.randint(-3, 3)) for _ in range(rng.randint(1, max_degree + 1)))


def _random_rational_function(rng):
    den = _random_polynomial(rng)
    while den.is_zero():
        den = _random_polynomial(rng)
    return RationalFunction(_random_polynomial(rng), den)


def _assert_normal_form(f):
    assert f.den.leading == 1
    assert Polynomial.gcd(f.num, f.den) == Polynomial((1,))
    if f.is_zero():
        assert f.den == Polynomial((1,))


def test_gcd_and_cancel():
    x = Polynomial.variable()
    a = (x - 1) * (x + 2) * (2 * x + 1)
    b = (x - 1) * (3 * x + 6)
    assert Polynomial.gcd(a, b) == (x - 1) * (x + 2)
    assert Polynomial.gcd(a, Polynomial()) == a.monic()
    num, den = Polynomial.cancel(a, b)
    assert num * 3 == den * (2 * x + 1)
    assert den.degree == 0


def test_normal_form_survives_arithmetic():
    rng = random.Random(11)
    point = F(1, 7)
    checked = 0
    while checked < 200:
        f, g = _random_rational_function(rng), _random_rational_function(rng)
        if f.den(point) == 0 or g.den(point) == 0:
            continue
        results = [(f + g, f(point) + g(point)), (f - g, f(point) - g(point)), (f * g, f(point) * g(point))]
        if not g.is_zero() and g(point) != 0:
            results.append((f / g, f(point) / g(point)))
        for h, expected in results:
            _assert_normal_form(h)
            if h.den(point) != 0:
                assert h(point) == expected
        checked += 1


def test_compare_near_limit_agrees_with_evaluation_close_to_one():
    rng = random.Random(5)
    near_one = 1 - F(1, 2**20)
    for _ in range(200):
        f, g = _random_rational_function(rng), _random_rational_function(rng)
        if f.den(near_one) == 0 or g.den(near_one) == 0:
            continue
        diff = f(near_one) - g(near_one)
        order = compare_near_limit(f, g)
        if order is Ordering.EQUAL:
            assert diff == 0
        elif order is Ordering.GREATER:
            assert diff > 0
        else:
            assert diff < 0


def test_resolvent_inverse_on_random_chains():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 3)
        P = DenseMatrix.from_rows([random_distribution(rng, n) for _ in range(n)])
        R = resolvent_inverse(P)
        A = DenseMatrix.identity(n, RATIONAL_FUNCTIONS) - P.convert(RATIONAL_FUNCTIONS).scaled(BETA)
        product = R @ A
        assert product.to_rows() == [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def test_descartes_on_ray_and_certified_sign():
    # (x − 2)(x − 3): два корня на луче, ни одного на (0, 1)
    poly = Polynomial((6, -5, 1))
    assert descartes_sign_changes(poly, 0) == 2
    assert descartes_sign_changes(poly, 4) == 0
    assert certified_sign((3 * BETA + 1) / (7 + 5 * BETA), 0, 1) == 1
    assert certified_sign(-2 * BETA - 1, 0, 1) == -1
    assert certified_sign(BETA - F(1, 2), 0, 1) is None
    assert certified_sign(BETA - F(1, 2), 1) == 1
    assert certified_sign(RationalFunction.constant(0), 0, 1) == 0
