"""
Точная арифметика для дисконтированных значений.

- Polynomial / RationalFunction — многочлены и рациональные функции
  от переменной дисконтирования (β или α) с коэффициентами Fraction;
- ScalarField — абстракция поля скаляров (Fraction, float с допуском,
  рациональные функции);
- DenseMatrix и solve_linear / invert / resolvent_inverse;
- разложение в ряд Лорана по (1 − β) при β → 1⁻ и сравнение «около единицы».
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from .errors import DimensionMismatch, SingularMatrix
from .models import get_float_tolerance

logger = logging.getLogger(__name__)

VARIABLE_SYMBOL = "β"


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


_X = sympy.Symbol("x")


def _to_sympy(coefficients: Sequence[Fraction]) -> sympy.Poly:
    """Плотный список (младший коэффициент первым) в sympy.Poly над QQ."""
    terms = [sympy.Rational(c.numerator, c.denominator) for c in reversed(coefficients)] or [0]
    return sympy.Poly(terms, _X, domain=sympy.QQ)


def _from_sympy(poly: sympy.Poly) -> Tuple[Fraction, ...]:
    return tuple(Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs()))


class Polynomial:
    """
    Плотный многочлен: coefficients[k] — коэффициент при x^k.
    Нулевой многочлен — пустой кортеж, старший коэффициент всегда ненулевой.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable = ()):
        coeffs = [_as_fraction(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coefficients: Tuple[Fraction, ...] = tuple(coeffs)

    @classmethod
    def constant(cls, value) -> "Polynomial":
        return cls((value,))

    @classmethod
    def variable(cls) -> "Polynomial":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> Fraction:
        return self.coefficients[-1] if self.coefficients else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coefficients

    def lowest_order(self) -> int:
        """Индекс первого ненулевого коэффициента (для нулевого многочлена — 0)."""
        for k, c in enumerate(self.coefficients):
            if c != 0:
                return k
        return 0

    def scale(self, factor) -> "Polynomial":
        factor = _as_fraction(factor)
        return Polynomial(c * factor for c in self.coefficients)

    def shift_down(self, k: int) -> "Polynomial":
        return Polynomial(self.coefficients[k:])

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        return self.scale(1 / self.leading)

    def __add__(self, other) -> "Polynomial":
        other = _as_polynomial(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (Fraction(0),) * (n - len(self.coefficients))
        b = other.coefficients + (Fraction(0),) * (n - len(other.coefficients))
        return Polynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self.coefficients)

    def __sub__(self, other) -> "Polynomial":
        other = _as_polynomial(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        other = _as_polynomial(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, x in enumerate(self.coefficients):
            if x == 0:
                continue
            for j, y in enumerate(other.coefficients):
                out[i + j] += x * y
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        result = Polynomial((1,))
        for _ in range(exponent):
            result = result * self
        return result

    def __divmod__(self, other: "Polynomial") -> Tuple["Polynomial", "Polynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        quotient, remainder = _to_sympy(self.coefficients).div(_to_sympy(other.coefficients))
        return Polynomial(_from_sympy(quotient)), Polynomial(_from_sympy(remainder))

    def __floordiv__(self, other: "Polynomial") -> "Polynomial":
        return divmod(self, other)[0]

    def __mod__(self, other: "Polynomial") -> "Polynomial":
        return divmod(self, other)[1]

    @staticmethod
    def gcd(a: "Polynomial", b: "Polynomial") -> "Polynomial":
        """Нормированный НОД над Q."""
        if a.is_zero():
            return b.monic()
        if b.is_zero():
            return a.monic()
        g = _to_sympy(a.coefficients).gcd(_to_sympy(b.coefficients))
        return Polynomial(_from_sympy(g)).monic()

    @staticmethod
    def cancel(a: "Polynomial", b: "Polynomial") -> Tuple["Polynomial", "Polynomial"]:
        """(a/g, b/g) для g = gcd(a, b); точное деление в sympy."""
        sa, sb = _to_sympy(a.coefficients), _to_sympy(b.coefficients)
        g = sa.gcd(sb)
        if g.degree() <= 0:
            return a, b
        return Polynomial(_from_sympy(sa.exquo(g))), Polynomial(_from_sympy(sb.exquo(g)))

    def __call__(self, x):
        # Схема Горнера; x может быть Fraction, float или RationalFunction.
        result = 0
        for c in reversed(self.coefficients):
            result = result * x + c
        return result if self.coefficients else Fraction(0)

    def compose(self, inner: "Polynomial") -> "Polynomial":
        result = Polynomial()
        for c in reversed(self.coefficients):
            result = result * inner + c
        return result

    def __eq__(self, other) -> bool:
        other = _as_polynomial(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __repr__(self) -> str:
        return f"Polynomial({[str(c) for c in self.coefficients]})"

    def format(self, symbol: str = VARIABLE_SYMBOL) -> str:
        if self.is_zero():
            return "0"
        parts: List[str] = []
        for k in range(self.degree, -1, -1):
            c = self.coefficients[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                coef = "" if mag == 1 else (f"{mag}" if mag.denominator == 1 else f"({mag})")
                power = symbol if k == 1 else f"{symbol}^{k}"
                body = f"{coef}{power}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self) -> str:
        return self.format()


def _as_polynomial(value):
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, (int, Fraction, float)):
        return Polynomial((value,))
    return NotImplemented


ONE_POLY = Polynomial((1,))


class RationalFunction:
    """
    num/den в нормальной форме: gcd(num, den) = 1, старший коэффициент den = 1.
    Объекты неизменяемы; каждая операция возвращает нормализованный результат.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _as_polynomial(num)
        den = ONE_POLY if den is None else _as_polynomial(den)
        if num is NotImplemented or den is NotImplemented:
            raise TypeError("RationalFunction expects polynomials or numbers")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            den = ONE_POLY
        else:
            if num.degree > 0 and den.degree > 0:
                num, den = Polynomial.cancel(num, den)
            lead = den.leading
            if lead != 1:
                num = num.scale(1 / lead)
                den = den.scale(1 / lead)
        self.num: Polynomial = num
        self.den: Polynomial = den

    @classmethod
    def constant(cls, value) -> "RationalFunction":
        return cls(Polynomial((value,)))

    @classmethod
    def variable(cls) -> "RationalFunction":
        return cls(Polynomial.variable())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.coefficients[0] if self.num.coefficients else Fraction(0)

    def __add__(self, other) -> "RationalFunction":
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other) -> "RationalFunction":
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RationalFunction":
        return (-self) + other

    def __mul__(self, other) -> "RationalFunction":
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RationalFunction":
        return _lift(other) / self

    def __pow__(self, exponent: int) -> "RationalFunction":
        if exponent < 0:
            return RationalFunction(1) / (self ** (-exponent))
        return RationalFunction(self.num ** exponent, self.den ** exponent)

    def __call__(self, x):
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"pole of {self} at {x}")
        return self.num(x) / d

    def compose(self, inner: "RationalFunction") -> "RationalFunction":
        """Подстановка переменной: f(inner(t))."""
        inner = _lift(inner)
        return _horner(self.num, inner) / _horner(self.den, inner)

    def __eq__(self, other) -> bool:
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RationalFunction({self})"

    def format(self, symbol: str = VARIABLE_SYMBOL) -> str:
        num = self.num.format(symbol)
        if self.den == ONE_POLY:
            return num
        num = num if len(self.num.coefficients) <= 1 else f"({num})"
        return f"{num}/({self.den.format(symbol)})"

    def __str__(self) -> str:
        return self.format()


def _lift(value):
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, Polynomial):
        return RationalFunction(value)
    if isinstance(value, (int, Fraction, float)):
        return RationalFunction.constant(value)
    return NotImplemented


def _horner(poly: Polynomial, x: RationalFunction) -> RationalFunction:
    result = RationalFunction.constant(0)
    for c in reversed(poly.coefficients):
        result = result * x + c
    return result


BETA = RationalFunction.variable()


# ---------------------------------------------------------------------------
# Поля скаляров
# ---------------------------------------------------------------------------


class ScalarField(ABC):
    name: str = ""
    exact: bool = True

    @abstractmethod
    def coerce(self, value):
        ...

    @abstractmethod
    def is_zero(self, value) -> bool:
        ...

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def equal(self, a, b) -> bool:
        return self.is_zero(a - b)

    def __repr__(self) -> str:
        return self.name


class RationalField(ScalarField):
    name = "rationals"

    def coerce(self, value) -> Fraction:
        return _as_fraction(value)

    def is_zero(self, value) -> bool:
        return value == 0

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash(self.name)


class FloatField(ScalarField):
    name = "floats"
    exact = False

    def __init__(self, tolerance: Optional[float] = None):
        self.tolerance = get_float_tolerance() if tolerance is None else tolerance

    def coerce(self, value) -> float:
        return float(value)

    def is_zero(self, value) -> bool:
        return abs(value) <= self.tolerance

    def __eq__(self, other) -> bool:
        return isinstance(other, FloatField) and other.tolerance == self.tolerance

    def __hash__(self) -> int:
        return hash((self.name, self.tolerance))

    def __repr__(self) -> str:
        return f"floats(tol={self.tolerance})"


class RationalFunctionField(ScalarField):
    name = "rational functions"

    def coerce(self, value) -> RationalFunction:
        lifted = _lift(value)
        if lifted is NotImplemented:
            raise TypeError(f"cannot coerce {value!r} to a rational function")
        return lifted

    def is_zero(self, value) -> bool:
        return _lift(value).is_zero()

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalFunctionField)

    def __hash__(self) -> int:
        return hash(self.name)


RATIONALS = RationalField()
RATIONAL_FUNCTIONS = RationalFunctionField()


def float_field(tolerance: Optional[float] = None) -> FloatField:
    return FloatField(tolerance)


def infer_field(values: Iterable) -> ScalarField:
    """Поле по набору значений: RF > float > Fraction."""
    has_float = False
    for v in values:
        if isinstance(v, (RationalFunction, Polynomial)):
            return RATIONAL_FUNCTIONS
        if isinstance(v, float):
            has_float = True
    return float_field() if has_float else RATIONALS


# ---------------------------------------------------------------------------
# Плотные матрицы
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DenseMatrix:
    rows: int
    cols: int
    entries: tuple
    field: ScalarField = RATIONALS

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise DimensionMismatch(f"matrix shape must be positive, got {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], field: Optional[ScalarField] = None) -> "DenseMatrix":
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise DimensionMismatch("ragged or empty matrix rows")
        if field is None:
            field = infer_field(x for r in rows for x in r)
        entries = tuple(field.coerce(x) for r in rows for x in r)
        return cls(len(rows), len(rows[0]), entries, field)

    @classmethod
    def identity(cls, n: int, field: ScalarField = RATIONALS) -> "DenseMatrix":
        one, zero = field.one(), field.zero()
        return cls(n, n, tuple(one if i == j else zero for i in range(n) for j in range(n)), field)

    @classmethod
    def zeros(cls, n: int, m: int, field: ScalarField = RATIONALS) -> "DenseMatrix":
        return cls(n, m, (field.zero(),) * (n * m), field)

    def __getitem__(self, index: Tuple[int, int]):
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> List[list]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def map(self, fn: Callable, field: Optional[ScalarField] = None) -> "DenseMatrix":
        field = field or self.field
        return DenseMatrix(self.rows, self.cols, tuple(field.coerce(fn(x)) for x in self.entries), field)

    def convert(self, field: ScalarField) -> "DenseMatrix":
        return self.map(lambda x: x, field)

    def transpose(self) -> "DenseMatrix":
        return DenseMatrix.from_rows(
            [[self[i, j] for i in range(self.rows)] for j in range(self.cols)], self.field
        )

    def __add__(self, other: "DenseMatrix") -> "DenseMatrix":
        self._check_same_shape(other)
        return DenseMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)), self.field)

    def __sub__(self, other: "DenseMatrix") -> "DenseMatrix":
        self._check_same_shape(other)
        return DenseMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)), self.field)

    def scaled(self, factor) -> "DenseMatrix":
        return DenseMatrix(self.rows, self.cols, tuple(factor * x for x in self.entries), self.field)

    def __matmul__(self, other: "DenseMatrix") -> "DenseMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            for j in range(other.cols):
                acc = self.field.zero()
                for k in range(self.cols):
                    acc = acc + self[i, k] * other[k, j]
                out.append(acc)
        return DenseMatrix(self.rows, other.cols, tuple(out), self.field)

    def apply(self, vector: Sequence) -> tuple:
        """Произведение матрицы на вектор."""
        if len(vector) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vector)} for a {self.rows}x{self.cols} matrix")
        out = []
        for i in range(self.rows):
            acc = self.field.zero()
            for j in range(self.cols):
                acc = acc + self[i, j] * vector[j]
            out.append(acc)
        return tuple(out)

    def equals(self, other: "DenseMatrix") -> bool:
        """Поэлементное равенство в смысле поля (с допуском для float)."""
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(self.field.equal(a, b) for a, b in zip(self.entries, other.entries))

    def _check_same_shape(self, other: "DenseMatrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch(f"shape {self.rows}x{self.cols} vs {other.rows}x{other.cols}")


def solve_linear(A: DenseMatrix, b: Sequence) -> tuple:
    """
    Решает A·x = b.

    float-поле — numpy.linalg.solve (LAPACK, частичный выбор ведущего);
    точные поля — Гаусс с первым ненулевым ведущим элементом.
    """
    if not A.is_square:
        raise DimensionMismatch(f"solve_linear needs a square matrix, got {A.rows}x{A.cols}")
    if len(b) != A.rows:
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {A.rows} equations")
    n = A.rows
    field = A.field

    if not field.exact:
        a = np.array([[float(A[i, j]) for j in range(n)] for i in range(n)], dtype=float)
        rhs = np.array([float(x) for x in b], dtype=float)
        try:
            x = np.linalg.solve(a, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrix(f"singular {n}x{n} matrix: {exc}") from exc
        return tuple(float(v) for v in x)

    m = [list(A.row(i)) + [field.coerce(b[i])] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not field.is_zero(m[r][col])), None)
        if pivot is None:
            raise SingularMatrix(f"no nonzero pivot in column {col}", {"column": col})
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
        p = m[col][col]
        for r in range(col + 1, n):
            if field.is_zero(m[r][col]):
                continue
            factor = m[r][col] / p
            row_r, row_c = m[r], m[col]
            for k in range(col, n + 1):
                row_r[k] = row_r[k] - factor * row_c[k]

    x = [field.zero()] * n
    for i in range(n - 1, -1, -1):
        acc = m[i][n]
        for k in range(i + 1, n):
            acc = acc - m[i][k] * x[k]
        x[i] = acc / m[i][i]
    return tuple(x)


def invert(A: DenseMatrix) -> DenseMatrix:
    """Обратная матрица методом Гаусса–Жордана над полем A."""
    if not A.is_square:
        raise DimensionMismatch(f"invert needs a square matrix, got {A.rows}x{A.cols}")
    n = A.rows
    field = A.field
    one, zero = field.one(), field.zero()
    m = [list(A.row(i)) + [one if i == j else zero for j in range(n)] for i in range(n)]
    for col in range(n):
        if field.exact:
            pivot = next((r for r in range(col, n) if not field.is_zero(m[r][col])), None)
        else:
            pivot = max(range(col, n), key=lambda r: abs(m[r][col]))
            if field.is_zero(m[pivot][col]):
                pivot = None
        if pivot is None:
            raise SingularMatrix(f"no nonzero pivot in column {col}", {"column": col})
        m[col], m[pivot] = m[pivot], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r == col or field.is_zero(m[r][col]):
                continue
            factor = m[r][col]
            m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return DenseMatrix.from_rows([row[n:] for row in m], field)


def resolvent_inverse(P: DenseMatrix) -> DenseMatrix:
    """(I − βP)⁻¹ как матрица рациональных функций от β."""
    if not P.is_square:
        raise DimensionMismatch(f"transition matrix must be square, got {P.rows}x{P.cols}")
    n = P.rows
    lifted = P.convert(RATIONAL_FUNCTIONS)
    A = DenseMatrix.identity(n, RATIONAL_FUNCTIONS) - lifted.scaled(BETA)
    return invert(A)


# ---------------------------------------------------------------------------
# Поведение при β → 1⁻
# ---------------------------------------------------------------------------


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1

    @property
    def label(self) -> str:
        return self.name.capitalize()


@dataclass(frozen=True)
class LaurentSeries:
    """f(β) = Σ_k coefficients[k] · (1 − β)^(order + k)."""

    order: int
    coefficients: Tuple[Fraction, ...]

    def leading(self) -> Fraction:
        return self.coefficients[0] if self.coefficients else Fraction(0)


REFLECT = Polynomial((1, -1))  # x -> 1 − x


def series_at_limit(f: RationalFunction, k: int) -> LaurentSeries:
    """Первые k коэффициентов Лорана f в переменной (1 − β)."""
    f = _lift(f)
    if f.is_zero():
        return LaurentSeries(0, tuple(Fraction(0) for _ in range(k)))
    a = f.num.compose(REFLECT)
    b = f.den.compose(REFLECT)
    m, n = a.lowest_order(), b.lowest_order()
    a, b = a.shift_down(m), b.shift_down(n)
    ac = list(a.coefficients) + [Fraction(0)] * k
    bc = list(b.coefficients) + [Fraction(0)] * k
    out: List[Fraction] = []
    for i in range(k):
        acc = ac[i]
        for j in range(1, i + 1):
            acc -= bc[j] * out[i - j]
        out.append(acc / bc[0])
    return LaurentSeries(m - n, tuple(out))


def compare_near_limit(f, g) -> Ordering:
    """Знак f − g на некотором интервале (β', 1)."""
    diff = _lift(f) - _lift(g)
    if diff.is_zero():
        return Ordering.EQUAL
    lead = series_at_limit(diff, 1).leading()
    return Ordering.GREATER if lead > 0 else Ordering.LESS


def limit_at_one(f) -> Fraction:
    """Предел f при β → 1⁻; ValueError, если у f полюс в единице."""
    series = series_at_limit(_lift(f), 1)
    if series.order < 0 and series.leading() != 0:
        raise ValueError(f"{f} has a pole at 1")
    if series.order > 0:
        return Fraction(0)
    return series.leading()


# ---------------------------------------------------------------------------
# Сертификаты отсутствия корней
# ---------------------------------------------------------------------------


def descartes_sign_changes(poly: Polynomial, lo, hi=None) -> int:
    """
    Число перемен знака у Q(t) = Σ c_k (lo + hi·t)^k (1 + t)^(d−k).
    Это верхняя оценка числа корней poly на (lo, hi); ноль гарантирует их отсутствие.
    hi = None означает луч (lo, ∞): тогда Q(t) = poly(lo + t).
    """
    if poly.degree <= 0:
        return 0
    lo = _as_fraction(lo)
    if hi is None:
        q = poly.compose(Polynomial((lo, 1)))
    else:
        hi = _as_fraction(hi)
        d = poly.degree
        x_num = Polynomial((lo, hi))
        x_den = Polynomial((1, 1))
        q = Polynomial()
        for k, c in enumerate(poly.coefficients):
            if c != 0:
                q = q + (x_num ** k) * (x_den ** (d - k)) * c
    signs = [1 if c > 0 else -1 for c in q.coefficients if c != 0]
    return sum(1 for s1, s2 in zip(signs, signs[1:]) if s1 != s2)


def certified_sign(f, lo, hi=None) -> Optional[int]:
    """
    Знак f на (lo, hi) (hi = None: на луче): 1, −1, 0 для тождественного нуля
    или None, если у num·den не исключены корни на интервале.
    """
    f = _lift(f)
    if f.is_zero():
        return 0
    if descartes_sign_changes(f.num * f.den, lo, hi) != 0:
        return None
    lo = _as_fraction(lo)
    sample = lo + 1 if hi is None else (lo + _as_fraction(hi)) / 2
    return 1 if f(sample) > 0 else -1


def tail_root_bound(poly: Polynomial) -> Fraction:
    """
    Точная оценка вида 1 − |c_m|/(|c_m| + max_{k>m}|c_k|) по разложению
    poly(1 − x) = Σ c_k x^k: на (оценка, 1) у poly нет корней.
    """
    expanded = poly.compose(REFLECT)
    if expanded.is_zero():
        return Fraction(0)
    m = expanded.lowest_order()
    lead = abs(expanded.coefficients[m])
    tail = max((abs(c) for c in expanded.coefficients[m + 1:]), default=Fraction(0))
    rho = lead / (lead + tail)
    return max(Fraction(0), 1 - rho)


def root_free_threshold(poly: Polynomial) -> Fraction:
    """
    Наименьшее найденное β₀ ∈ [0, 1), такое что у poly нет корней на (β₀, 1).

    Кандидат берётся из numpy.roots и проверяется точно правилом Декарта;
    если проверка не проходит — возвращается tail_root_bound.
    """
    if poly.degree <= 0:
        return Fraction(0)
    if descartes_sign_changes(poly, 0, 1) == 0:
        return Fraction(0)

    roots = np.roots([float(c) for c in reversed(poly.coefficients)])
    real = sorted(
        (float(r.real) for r in roots if abs(r.imag) <= 1e-9 and 0.0 < r.real < 1.0),
        reverse=True,
    )
    if real:
        approx = Fraction(real[0]).limit_denominator(10 ** 6)
        for slack in (Fraction(0), Fraction(1, 10 ** 9), Fraction(1, 10 ** 6), Fraction(1, 10 ** 3)):
            candidate = max(Fraction(0), approx - slack)
            if descartes_sign_changes(poly, candidate, 1) == 0:
                return candidate
    bound = tail_root_bound(poly)
    logger.debug("[INFO] root candidate not certified, tail bound %s used", bound)
    return bound
