"""Input checking shared by the CLI and the estimator classes."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

from .exceptions import SchemaError
from .opmodel import Operator, RationalComplex, op_from_json


def check_lambda(value) -> RationalComplex:
    """Accept ``"p/q"``, ``"p/q,p/q"``, ``[re, im]``, ints, Fractions, complex and floats."""
    try:
        return RationalComplex.coerce(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"cannot read {value!r} as a rational complex number") from exc


def check_lambdas(values) -> List[RationalComplex]:
    if isinstance(values, (str, RationalComplex, complex, int, Fraction)):
        values = [values]
    out = []
    for v in values:
        if hasattr(v, "tolist") and not isinstance(v, (list, tuple)):
            v = v.tolist()
        out.append(check_lambda(v))
    if not out:
        raise SchemaError("no lambda values given")
    return out


def check_operator(op) -> Operator:
    if isinstance(op, Operator):
        return op
    if isinstance(op, dict):
        return op_from_json(op)
    raise SchemaError(f"not an operator: {op!r}")


def check_diag(diag) -> Tuple[Operator, ...]:
    """A diagonal tuple of at least two operators (objects or JSON dicts)."""
    if isinstance(diag, dict):
        if "diag" not in diag:
            raise SchemaError("tuple document needs a 'diag' list")
        diag = diag["diag"]
    if isinstance(diag, (str, bytes)) or not isinstance(diag, Iterable):
        raise SchemaError("diagonal must be a sequence of operators")
    ops = tuple(check_operator(d) for d in diag)
    if len(ops) < 2:
        raise SchemaError("a diagonal tuple needs at least two operators")
    return ops


def check_schedule(schedule) -> Tuple[int, ...]:
    if isinstance(schedule, str):
        try:
            schedule = [int(x) for x in schedule.split(",") if x.strip()]
        except ValueError as exc:
            raise SchemaError(f"schedule must be comma separated integers: {schedule!r}") from exc
    sched = tuple(int(n) for n in schedule)
    if len(sched) < 3 or sched[0] < 1 or any(a >= b for a, b in zip(sched, sched[1:])):
        raise SchemaError("schedule needs at least three strictly increasing positive sizes")
    return sched
