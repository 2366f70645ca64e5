"""Exact scalar helpers built on sympy.

Every spectral value handled by the package is a sympy expression. Equality is
decided symbolically whenever sympy can decide it and falls back to a numeric
comparison at ``LIMIT_TOLERANCE`` otherwise.
"""

import numbers
from collections.abc import Iterable
from typing import Any

import sympy as sp

LIMIT_TOLERANCE = 1e-12
ZERO = sp.Integer(0)
ONE = sp.Integer(1)


def to_expr(value: Any) -> sp.Expr:
    """Convert a number or numeric text into an exact sympy expression.

    Floats are read as the decimal they print as, so ``0.1`` becomes ``1/10``.

    Raises:
        TypeError: If the value is not numeric.
        ValueError: If the value is not a finite numeric constant.
    """
    if isinstance(value, sp.Basic):
        expr = value
    elif isinstance(value, bool):
        raise TypeError("Booleans are not numeric values")
    elif isinstance(value, numbers.Integral):
        expr = sp.Integer(int(value))
    elif isinstance(value, numbers.Real):
        expr = sp.Rational(repr(float(value)))
    elif isinstance(value, numbers.Complex):
        expr = to_expr(value.real) + sp.I * to_expr(value.imag)
    elif isinstance(value, str):
        try:
            expr = sp.sympify(value.strip(), rational=True)
        except (sp.SympifyError, SyntaxError, TypeError) as e:
            raise ValueError(f"Cannot parse numeric value {value!r}: {e}") from e
    else:
        raise TypeError(f"Unsupported numeric value of type {type(value).__name__}")

    if not isinstance(expr, sp.Expr) or expr.free_symbols:
        raise ValueError(f"{value!r} is not a numeric constant")
    if expr.has(sp.zoo, sp.oo, -sp.oo, sp.nan):
        raise ValueError(f"{value!r} is not finite")
    return expr


def format_expr(value: sp.Expr) -> str:
    """Serialize an expression so that ``to_expr`` reads it back unchanged."""
    return str(value)


def is_zero(value: sp.Expr) -> bool:
    """Decide ``value == 0``."""
    if value == 0:
        return True
    decided = value.is_zero
    if decided is not None:
        return bool(decided)
    simplified = sp.simplify(value)
    if simplified == 0:
        return True
    decided = simplified.is_zero
    if decided is not None:
        return bool(decided)
    return abs(complex(sp.N(value, 30))) <= LIMIT_TOLERANCE


def exact_equal(left: sp.Expr, right: sp.Expr) -> bool:
    """Decide ``left == right`` exactly where possible."""
    if left is right or left == right:
        return True
    return is_zero(left - right)


def compare(left: sp.Expr, right: sp.Expr) -> int:
    """Three-way comparison of two real expressions."""
    if exact_equal(left, right):
        return 0
    difference = left - right
    if difference.is_positive:
        return 1
    if difference.is_negative:
        return -1
    numeric = float(sp.re(sp.N(difference, 30)))
    return 1 if numeric > 0 else -1


def exact_min(values: Iterable[sp.Expr]) -> sp.Expr:
    """Smallest of a non-empty collection of real expressions."""
    iterator = iter(values)
    try:
        best = next(iterator)
    except StopIteration:
        raise ValueError("min of an empty collection") from None
    for value in iterator:
        if compare(value, best) < 0:
            best = value
    return best


def exact_max(values: Iterable[sp.Expr]) -> sp.Expr:
    """Largest of a non-empty collection of real expressions."""
    iterator = iter(values)
    try:
        best = next(iterator)
    except StopIteration:
        raise ValueError("max of an empty collection") from None
    for value in iterator:
        if compare(value, best) > 0:
            best = value
    return best


def is_real(value: sp.Expr) -> bool:
    """True when the imaginary part vanishes."""
    if value.is_real:
        return True
    return is_zero(sp.im(value))


def is_nonnegative_real(value: sp.Expr) -> bool:
    """True for real values ``>= 0``."""
    return is_real(value) and compare(sp.re(value), ZERO) >= 0


def is_positive_real(value: sp.Expr) -> bool:
    """True for real values ``> 0``."""
    return is_real(value) and compare(sp.re(value), ZERO) > 0


def modulus(value: sp.Expr) -> sp.Expr:
    """Absolute value."""
    return sp.Abs(value)


def phase_of(value: sp.Expr) -> sp.Expr:
    """Unit scalar ``value / |value|``, with 1 for zero."""
    if is_zero(value):
        return ONE
    return value / modulus(value)


def is_unit(value: sp.Expr) -> bool:
    """True when ``|value| == 1``."""
    return exact_equal(modulus(value), ONE)


def conjugate(value: sp.Expr) -> sp.Expr:
    """Complex conjugate."""
    return sp.conjugate(value)


def dagger(value: sp.Expr) -> sp.Expr:
    """The pseudo-reciprocal: ``1/value`` for nonzero values, 0 for zero."""
    if is_zero(value):
        return ZERO
    return ONE / value


def to_complex(value: sp.Expr) -> complex:
    """Floating-point approximation."""
    return complex(sp.N(value, 20))


def to_float(value: sp.Expr) -> float:
    """Floating-point approximation of a real value."""
    return float(sp.re(sp.N(value, 20)))


def sort_key(value: sp.Expr) -> tuple[float, float, str]:
    """Deterministic ordering key: real part, imaginary part, text."""
    approx = to_complex(value)
    return (approx.real, approx.imag, format_expr(value))


def unique(values: Iterable[sp.Expr]) -> list[sp.Expr]:
    """Drop exact duplicates, keeping first occurrences."""
    kept: list[sp.Expr] = []
    for value in values:
        if not any(exact_equal(value, seen) for seen in kept):
            kept.append(value)
    return kept


def contains(values: Iterable[sp.Expr], target: sp.Expr) -> bool:
    """Exact membership test."""
    return any(exact_equal(value, target) for value in values)
