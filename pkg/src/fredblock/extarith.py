"""Arithmetic on the extended naturals and the extended index domain.

Nullity and deficiency take values in ``{0, 1, 2, ...} U {inf}``.  We use
``math.inf`` for the infinite element so that ordinary ``+`` and ``<=`` already
behave as required (``n + inf == inf``, ``inf`` is the maximum).  Differences
``alpha - beta`` live in ``Z U {-inf, +inf}`` plus the distinguished
:data:`UNDEFINED` for ``inf - inf``.
"""

from __future__ import annotations

import enum
import math
from typing import Union

INF = math.inf


class _Undefined(enum.Enum):
    UNDEFINED = "undef"

    def __repr__(self) -> str:
        return "UNDEFINED"


UNDEFINED = _Undefined.UNDEFINED

ExtNat = Union[int, float]
ExtInt = Union[int, float, _Undefined]


def is_finite(a: ExtNat) -> bool:
    return a != INF


def check_extnat(a) -> ExtNat:
    """Validate and normalise a value of the extended naturals."""
    if isinstance(a, bool):
        raise TypeError("booleans are not extended naturals")
    if a == INF:
        return INF
    if isinstance(a, int) and a >= 0:
        return a
    raise ValueError(f"not an extended natural: {a!r}")


def extnat_add(a: ExtNat, b: ExtNat) -> ExtNat:
    if a == INF or b == INF:
        return INF
    return a + b


def extnat_sum(values) -> ExtNat:
    total: ExtNat = 0
    for v in values:
        total = extnat_add(total, v)
    return total


def ext_index(alpha: ExtNat, beta: ExtNat) -> ExtInt:
    """``alpha - beta``; ``UNDEFINED`` exactly when both are infinite."""
    if alpha == INF and beta == INF:
        return UNDEFINED
    if alpha == INF:
        return INF
    if beta == INF:
        return -INF
    return alpha - beta


def negate(x: ExtInt) -> ExtInt:
    if x is UNDEFINED:
        return UNDEFINED
    return -x


def render(x: ExtInt) -> str:
    """Text form used in every JSON/CSV output: ``"3"``, ``"inf"``, ``"-inf"``, ``"undef"``."""
    if x is UNDEFINED:
        return "undef"
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return str(int(x))


def parse(text: str) -> ExtInt:
    text = text.strip()
    if text == "undef":
        return UNDEFINED
    if text in ("inf", "+inf"):
        return INF
    if text == "-inf":
        return -INF
    return int(text)
