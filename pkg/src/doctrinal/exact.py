"""Helpers for exact rational input, grids and display rounding."""

from __future__ import annotations

import numbers
from fractions import Fraction

from .errors import DomainError


def to_fraction(value) -> Fraction:
    """Convert ``value`` to a :class:`~fractions.Fraction` without binary drift.

    Strings are parsed as decimals (``"0.55"``) or ratios (``"11/20"``).
    Floats go through their shortest ``repr`` so that ``0.6`` means 3/5 and not
    the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"expected a number, got {value!r}")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise DomainError(f"expected a finite number, got {value!r}")
        return Fraction(repr(value))
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"cannot parse {value!r} as an exact number") from None
    raise DomainError(f"expected a number, got {type(value).__name__}")


def parse_grid(text: str) -> list[Fraction]:
    """Parse ``"start:stop:step"`` (inclusive stop) or a comma list into rationals.

    >>> [str(v) for v in parse_grid("0.55:0.65:0.05")]
    ['11/20', '3/5', '13/20']
    """
    text = text.strip()
    if not text:
        raise DomainError("empty grid")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise DomainError(f"grid {text!r} must look like start:stop:step")
        start, stop, step = (to_fraction(p) for p in parts)
        if step <= 0:
            raise DomainError(f"grid step must be positive, got {step}")
        if stop < start:
            raise DomainError(f"grid stop {stop} is below start {start}")
        count = int((stop - start) / step)
        return [start + i * step for i in range(count + 1)]
    return [to_fraction(p) for p in text.split(",") if p.strip()]


def round_half_even(value, places: int = 4) -> Fraction:
    """Round exactly to ``places`` decimals, ties to even."""
    scale = 10**places
    return Fraction(round(to_fraction(value) * scale), scale)


def format_fixed(value, places: int = 4) -> str:
    """Half-to-even rounding rendered with exactly ``places`` decimals."""
    rounded = round_half_even(value, places)
    sign = "-" if rounded < 0 else ""
    scaled = abs(rounded.numerator * 10**places // rounded.denominator)
    whole, frac = divmod(scaled, 10**places)
    return f"{sign}{whole}.{frac:0{places}d}" if places else f"{sign}{whole}"


def format_exact(value: Fraction) -> str:
    """Render a rational as ``p/q`` (or ``p`` when integral)."""
    value = to_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value) -> str:
    """Shortest exact decimal for ``value`` (``"0.55"``), falling back to ``p/q``."""
    value = to_fraction(value)
    for places in range(13):
        if (value * 10**places).denominator == 1:
            return format_fixed(value, places)
    return format_exact(value)
