"""Lossless text encoding of scalars, subsets and verdicts for JSON output.

Exact values are written as ``"num/den"`` (or a plain integer string); float
values carry their precision, e.g. ``"f128:0.0123..."`` with enough digits to
round-trip at that precision.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from typing import Any

import mpmath

from .core import MPF, InvalidInputError, to_fraction


def format_scalar(x) -> str:
    if isinstance(x, bool):
        raise InvalidInputError("booleans are not scalars")
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, MPF):
        bits = getattr(getattr(x, "context", None), "prec", 53)
        digits = int(math.ceil(bits * math.log10(2))) + 2
        return f"f{bits}:{mpmath.libmp.to_str(x._mpf_, digits)}"
    if isinstance(x, float):
        return f"f53:{x!r}"
    raise InvalidInputError(f"cannot serialize {type(x).__name__}")


def parse_scalar(text):
    """Inverse of :func:`format_scalar`; bare decimals parse as exact rationals."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise InvalidInputError(f"expected a number string, got {text!r}")
    if text.startswith("f") and ":" in text:
        tag, value = text.split(":", 1)
        try:
            bits = int(tag[1:])
        except ValueError:
            raise InvalidInputError(f"bad precision tag in {text!r}") from None
        ctx = mpmath.MPContext()
        ctx.prec = bits
        return ctx.mpf(value)
    return to_fraction(text)


def to_jsonable(obj) -> Any:
    """Recursively convert library values into JSON-ready structures."""
    from .audit.verdict import AuditVerdict

    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (int, float)):
        return obj
    if isinstance(obj, (Fraction, MPF)):
        return format_scalar(obj)
    if isinstance(obj, AuditVerdict):
        out = {"axiom": obj.axiom, "outcome": obj.outcome.value,
               "instance": to_jsonable(obj.instance), "witness": to_jsonable(obj.witness)}
        if obj.reason:
            out["reason"] = obj.reason
        return out
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise InvalidInputError(f"cannot serialize {type(obj).__name__}")


def _key(k) -> str:
    if isinstance(k, tuple):
        return "{" + ",".join(str(i) for i in k) + "}"
    return str(k)


def parse_subset_key(key: str) -> tuple:
    inner = key.strip().strip("{}").strip()
    return tuple(int(t) for t in inner.split(",")) if inner else ()
