"""Closed catalog of bounded operators on l2 with exact Fredholm data.

Every operator acts on a copy of l2 with the standard basis ``e_1, e_2, ...``
(coordinates are 1-based throughout the package).  A direct sum interleaves its
summands: odd coordinates belong to the left summand, even coordinates to the
right one, so ``DirectSum(x, y)`` is again an operator on l2.

For ``T = D - lambda`` the evaluator tracks three quantities:

* ``alpha``: dimension of the kernel,
* ``gamma``: dimension of the orthogonal complement of the range
  (``alpha`` of the adjoint),
* whether the range is closed.

The deficiency is ``beta = gamma`` when the range is closed and ``inf``
otherwise, since a range of finite codimension is automatically closed.

Spread(k)
    The isometry ``e_m -> e_{km}`` splits l2 into the orbits
    ``{m, km, k^2 m, ...}`` with ``k`` not dividing ``m``; on each orbit it is
    the unilateral shift.  So Spread(k) is a pure isometry with
    infinite-dimensional cokernel (the Wold decomposition gives a shift of
    infinite multiplicity), and ``Spread(k) - lambda`` has the Fredholm data
    of ``S - lambda`` with every dimension multiplied by infinity:
    ``(0, inf, closed)`` inside the unit disc, ``(0, 0, closed)`` outside and
    a dense, non-closed range on the unit circle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, NamedTuple, Optional, Tuple, Union

from .exceptions import SchemaError, Unsupported
from .extarith import INF, ExtNat, extnat_add, render


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        # decimal repr, so 0.1 means 1/10 rather than its binary expansion
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"not a rational: {x!r}") from exc
    raise TypeError(f"cannot interpret {x!r} as a rational")


@dataclass(frozen=True)
class RationalComplex:
    """A complex number with exact rational real and imaginary parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _frac(self.re))
        object.__setattr__(self, "im", _frac(self.im))

    @classmethod
    def coerce(cls, value) -> "RationalComplex":
        if isinstance(value, RationalComplex):
            return value
        if isinstance(value, complex):
            return cls(_frac(value.real), _frac(value.imag))
        if isinstance(value, (tuple, list)):
            if len(value) != 2:
                raise SchemaError(f"expected a [re, im] pair, got {value!r}")
            return cls(_frac(value[0]), _frac(value[1]))
        if isinstance(value, str) and "," in value:
            re, im = value.split(",", 1)
            return cls(_frac(re), _frac(im))
        return cls(_frac(value))

    def __add__(self, other):
        other = RationalComplex.coerce(other)
        return RationalComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = RationalComplex.coerce(other)
        return RationalComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return RationalComplex.coerce(other) - self

    def __mul__(self, other):
        other = RationalComplex.coerce(other)
        return RationalComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RationalComplex.coerce(other)
        d = other.abs2()
        if d == 0:
            raise ZeroDivisionError("division by zero")
        num = self * other.conjugate()
        return RationalComplex(num.re / d, num.im / d)

    def __neg__(self):
        return RationalComplex(-self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> "RationalComplex":
        return RationalComplex(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def to_pair(self) -> List[str]:
        return [str(self.re), str(self.im)]

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return f"{self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i"


ZERO = RationalComplex(0)
ONE = RationalComplex(1)

Scalar = Union[RationalComplex, int, Fraction, str, tuple, complex]
Column = Dict[int, RationalComplex]


def _unit_disc(lam: RationalComplex) -> int:
    """-1 inside the unit circle, 0 on it, 1 outside (exact comparison)."""
    r = lam.abs2()
    return (r > 1) - (r < 1)


# ---------------------------------------------------------------------------
# coordinate sets


class CoordSet:
    """A set of basis coordinates given by a membership test.

    ``size`` is the cardinality (``inf`` allowed).  For finite sets ``bound``
    is an upper bound on the members, so enumeration terminates.
    """

    def __init__(self, contains: Callable[[int], bool], size: ExtNat, bound: Optional[int]):
        self.contains = contains
        self.size = size
        self.bound = bound

    @classmethod
    def empty(cls) -> "CoordSet":
        return cls(lambda m: False, 0, 0)

    @classmethod
    def everything(cls) -> "CoordSet":
        return cls(lambda m: True, INF, None)

    @classmethod
    def finite(cls, members) -> "CoordSet":
        members = frozenset(members)
        return cls(members.__contains__, len(members), max(members, default=0))

    def __iter__(self) -> Iterator[int]:
        m = 1
        while self.bound is None or m <= self.bound:
            if self.contains(m):
                yield m
            m += 1

    def members(self, limit: int) -> List[int]:
        top = limit if self.bound is None else min(limit, self.bound)
        return [m for m in range(1, top + 1) if self.contains(m)]

    def first(self, count: int) -> List[int]:
        out = []
        if count <= 0:
            return out
        for m in self:
            out.append(m)
            if len(out) == count:
                break
        return out

    def interleave(self, other: "CoordSet") -> "CoordSet":
        left, right = self, other

        def contains(m):
            return left.contains((m + 1) // 2) if m % 2 else right.contains(m // 2)

        if left.bound is None or right.bound is None:
            bound = None
        else:
            bound = max(2 * left.bound - 1 if left.bound else 0, 2 * right.bound)
        return CoordSet(contains, extnat_add(left.size, right.size), bound)


# ---------------------------------------------------------------------------
# sequences for diagonal operators


@dataclass(frozen=True)
class ConstantTail:
    value: RationalComplex

    def __post_init__(self):
        object.__setattr__(self, "value", RationalComplex.coerce(self.value))


@dataclass(frozen=True)
class ConvergentTail:
    """Tail values ``limit + rate/(m+1)`` for ``m = 1, 2, ...``."""

    limit: RationalComplex
    rate: Fraction

    def __post_init__(self):
        object.__setattr__(self, "limit", RationalComplex.coerce(self.limit))
        object.__setattr__(self, "rate", _frac(self.rate))
        if self.rate == 0:
            raise ValueError("ConvergentTail rate must be nonzero")

    def value(self, m: int) -> RationalComplex:
        return self.limit + RationalComplex(self.rate / (m + 1))

    def solve(self, lam: RationalComplex) -> Optional[int]:
        """Tail index ``m >= 1`` with ``value(m) == lam``, if any."""
        d = lam - self.limit
        if d.im != 0 or d.re == 0:
            return None
        q = self.rate / d.re
        if q.denominator != 1 or q < 2:
            return None
        return int(q) - 1


Tail = Union[ConstantTail, ConvergentTail]


@dataclass(frozen=True)
class SequenceSpec:
    prefix: Tuple[RationalComplex, ...]
    tail: Tail

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(RationalComplex.coerce(v) for v in self.prefix))

    def entry(self, m: int) -> RationalComplex:
        p = len(self.prefix)
        if m <= p:
            return self.prefix[m - 1]
        if isinstance(self.tail, ConstantTail):
            return self.tail.value
        return self.tail.value(m - p)

    def matches(self, lam: RationalComplex) -> CoordSet:
        p = len(self.prefix)
        hits = [i + 1 for i, v in enumerate(self.prefix) if v == lam]
        if isinstance(self.tail, ConstantTail):
            if self.tail.value == lam:
                head = frozenset(hits)
                return CoordSet(lambda m: m > p or m in head, INF, None)
            return CoordSet.finite(hits)
        m = self.tail.solve(lam)
        if m is not None:
            hits.append(p + m)
        return CoordSet.finite(hits)

    def accumulates_at(self, lam: RationalComplex) -> bool:
        """Whether ``lam`` is a limit of entries different from ``lam``."""
        return isinstance(self.tail, ConvergentTail) and self.tail.limit == lam


# ---------------------------------------------------------------------------
# the catalog


class _Raw(NamedTuple):
    alpha: ExtNat
    gamma: ExtNat
    closed: bool


class Operator:
    """Base class of catalog expressions; subclasses are frozen dataclasses."""

    def _raw(self, lam: RationalComplex) -> _Raw:
        raise NotImplementedError

    def _kernel(self, lam: RationalComplex) -> CoordSet:
        raise NotImplementedError

    def _coker(self, lam: RationalComplex) -> CoordSet:
        raise NotImplementedError

    def column(self, m: int) -> Column:
        """Entries of ``D e_m`` (no shift applied)."""
        raise NotImplementedError

    def row(self, m: int) -> Column:
        """Entries of ``D^* e_m``, i.e. the conjugated m-th row of ``D``."""
        raise NotImplementedError


def _positive(k, name):
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise ValueError(f"{name} needs a positive integer, got {k!r}")


@dataclass(frozen=True)
class ForwardShift(Operator):
    k: int = 1

    def __post_init__(self):
        _positive(self.k, "ForwardShift")

    def _raw(self, lam):
        where = _unit_disc(lam)
        if where < 0:
            return _Raw(0, self.k, True)
        if where > 0:
            return _Raw(0, 0, True)
        return _Raw(0, 0, False)

    def _kernel(self, lam):
        return CoordSet.empty()

    def _coker(self, lam):
        if not lam:
            return CoordSet.finite(range(1, self.k + 1))
        if _unit_disc(lam) >= 0:
            return CoordSet.empty()
        raise Unsupported("cokernel of a shifted forward shift is not coordinate-aligned")

    def column(self, m):
        return {m + self.k: ONE}

    def row(self, m):
        return {m - self.k: ONE} if m > self.k else {}


@dataclass(frozen=True)
class BackwardShift(Operator):
    k: int = 1

    def __post_init__(self):
        _positive(self.k, "BackwardShift")

    def _raw(self, lam):
        fwd = ForwardShift(self.k)._raw(lam.conjugate())
        return _Raw(fwd.gamma, fwd.alpha, fwd.closed)

    def _kernel(self, lam):
        try:
            return ForwardShift(self.k)._coker(lam.conjugate())
        except Unsupported:
            raise Unsupported("kernel of a shifted backward shift is not coordinate-aligned") from None

    def _coker(self, lam):
        return CoordSet.empty()

    def column(self, m):
        return {m - self.k: ONE} if m > self.k else {}

    def row(self, m):
        return {m + self.k: ONE}


@dataclass(frozen=True)
class Spread(Operator):
    k: int = 2

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 2:
            raise ValueError(f"Spread needs k >= 2, got {self.k!r}")

    def _raw(self, lam):
        where = _unit_disc(lam)
        if where < 0:
            return _Raw(0, INF, True)
        if where > 0:
            return _Raw(0, 0, True)
        return _Raw(0, 0, False)

    def _kernel(self, lam):
        return CoordSet.empty()

    def _coker(self, lam):
        if not lam:
            k = self.k
            return CoordSet(lambda m: m % k != 0, INF, None)
        if _unit_disc(lam) >= 0:
            return CoordSet.empty()
        raise Unsupported("cokernel of a shifted spread is not coordinate-aligned")

    def column(self, m):
        return {self.k * m: ONE}

    def row(self, m):
        return {m // self.k: ONE} if m % self.k == 0 else {}


@dataclass(frozen=True)
class Diagonal(Operator):
    spec: SequenceSpec

    def _raw(self, lam):
        hits = self.spec.matches(lam)
        return _Raw(hits.size, hits.size, not self.spec.accumulates_at(lam))

    def _kernel(self, lam):
        return self.spec.matches(lam)

    def _coker(self, lam):
        return self.spec.matches(lam)

    def column(self, m):
        d = self.spec.entry(m)
        return {m: d} if d else {}

    def row(self, m):
        d = self.spec.entry(m).conjugate()
        return {m: d} if d else {}


@dataclass(frozen=True)
class ZeroOp(Operator):
    def _raw(self, lam):
        return _Raw(INF, INF, True) if not lam else _Raw(0, 0, True)

    def _kernel(self, lam):
        return CoordSet.everything() if not lam else CoordSet.empty()

    _coker = _kernel

    def column(self, m):
        return {}

    row = column


@dataclass(frozen=True)
class IdentityOp(Operator):
    def _raw(self, lam):
        return _Raw(INF, INF, True) if lam == ONE else _Raw(0, 0, True)

    def _kernel(self, lam):
        return CoordSet.everything() if lam == ONE else CoordSet.empty()

    _coker = _kernel

    def column(self, m):
        return {m: ONE}

    row = column


def _spread_pairs(col: Column, odd: bool) -> Column:
    if odd:
        return {2 * r - 1: v for r, v in col.items()}
    return {2 * r: v for r, v in col.items()}


@dataclass(frozen=True)
class DirectSum(Operator):
    left: Operator
    right: Operator

    def _raw(self, lam):
        a, b = self.left._raw(lam), self.right._raw(lam)
        return _Raw(extnat_add(a.alpha, b.alpha), extnat_add(a.gamma, b.gamma), a.closed and b.closed)

    def _kernel(self, lam):
        return self.left._kernel(lam).interleave(self.right._kernel(lam))

    def _coker(self, lam):
        return self.left._coker(lam).interleave(self.right._coker(lam))

    def column(self, m):
        if m % 2:
            return _spread_pairs(self.left.column((m + 1) // 2), True)
        return _spread_pairs(self.right.column(m // 2), False)

    def row(self, m):
        if m % 2:
            return _spread_pairs(self.left.row((m + 1) // 2), True)
        return _spread_pairs(self.right.row(m // 2), False)


@dataclass(frozen=True)
class Adjoint(Operator):
    inner: Operator

    def _raw(self, lam):
        r = self.inner._raw(lam.conjugate())
        return _Raw(r.gamma, r.alpha, r.closed)

    def _kernel(self, lam):
        return self.inner._coker(lam.conjugate())

    def _coker(self, lam):
        return self.inner._kernel(lam.conjugate())

    def column(self, m):
        # inner.row is already conjugated
        return dict(self.inner.row(m))

    def row(self, m):
        return dict(self.inner.column(m))


def adjoint_op(op: Operator) -> Operator:
    """Adjoint with the obvious simplifications, so ``adjoint_op`` is an involution."""
    if isinstance(op, Adjoint):
        return op.inner
    if isinstance(op, ForwardShift):
        return BackwardShift(op.k)
    if isinstance(op, BackwardShift):
        return ForwardShift(op.k)
    if isinstance(op, (ZeroOp, IdentityOp)):
        return op
    if isinstance(op, Diagonal):
        spec = op.spec
        if isinstance(spec.tail, ConstantTail):
            tail = ConstantTail(spec.tail.value.conjugate())
        else:
            tail = ConvergentTail(spec.tail.limit.conjugate(), spec.tail.rate)
        return Diagonal(SequenceSpec(tuple(v.conjugate() for v in spec.prefix), tail))
    if isinstance(op, DirectSum):
        return DirectSum(adjoint_op(op.left), adjoint_op(op.right))
    return Adjoint(op)


# ---------------------------------------------------------------------------
# public evaluators


@dataclass(frozen=True)
class FredholmData:
    """``(alpha, beta, range_closed)`` of ``D - lambda``."""

    alpha: ExtNat
    beta: ExtNat
    range_closed: bool

    def is_consistent(self) -> bool:
        """Kato: a range of finite codimension is closed."""
        return self.range_closed or self.beta == INF

    def swapped(self) -> "FredholmData":
        return FredholmData(self.beta, self.alpha, self.range_closed)

    def to_json(self) -> dict:
        return {"alpha": render(self.alpha), "beta": render(self.beta), "range_closed": self.range_closed}


@lru_cache(maxsize=65536)
def _raw_cached(op: Operator, lam: RationalComplex) -> _Raw:
    return op._raw(lam)


def closure_codimension(op: Operator, lam: Scalar) -> ExtNat:
    """``dim R(D - lambda)^perp``, which equals ``alpha`` of the adjoint."""
    return _raw_cached(op, RationalComplex.coerce(lam)).gamma


def fredholm_data(op: Operator, lam: Scalar) -> FredholmData:
    raw = _raw_cached(op, RationalComplex.coerce(lam))
    return FredholmData(raw.alpha, raw.gamma if raw.closed else INF, raw.closed)


def kernel_coords(op: Operator, lam: Scalar) -> CoordSet:
    return op._kernel(RationalComplex.coerce(lam))


def cokernel_coords(op: Operator, lam: Scalar) -> CoordSet:
    lam = RationalComplex.coerce(lam)
    if not _raw_cached(op, lam).closed:
        raise Unsupported("range is not closed, so it has no orthogonal cokernel basis")
    return op._coker(lam)


def kernel_basis_window(op: Operator, lam: Scalar, N: int) -> List[int]:
    return kernel_coords(op, lam).members(N)


def cokernel_basis_window(op: Operator, lam: Scalar, N: int) -> List[int]:
    return cokernel_coords(op, lam).members(N)


def reach(op: Operator, N: int) -> int:
    """Smallest codomain window containing the image of the first N coordinates."""
    top = N
    for m in range(1, N + 1):
        col = op.column(m)
        if col:
            top = max(top, max(col))
    return top


# ---------------------------------------------------------------------------
# JSON


def _parse_scalar(value) -> RationalComplex:
    try:
        return RationalComplex.coerce(value)
    except (TypeError, ValueError) as exc:
        raise SchemaError(str(exc)) from exc


def _int_field(obj, name, default=None):
    value = obj.get(name, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"field {name!r} must be an integer")
    return value


def op_from_json(obj) -> Operator:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError(f"operator objects need a 'kind': {obj!r}")
    kind = obj["kind"]
    try:
        if kind == "forward_shift":
            return ForwardShift(_int_field(obj, "k", 1))
        if kind == "backward_shift":
            return BackwardShift(_int_field(obj, "k", 1))
        if kind == "spread":
            return Spread(_int_field(obj, "k", 2))
        if kind == "zero":
            return ZeroOp()
        if kind == "identity":
            return IdentityOp()
        if kind == "direct_sum":
            return DirectSum(op_from_json(obj["left"]), op_from_json(obj["right"]))
        if kind == "adjoint":
            return Adjoint(op_from_json(obj["inner"]))
        if kind == "diagonal":
            prefix = tuple(_parse_scalar(v) for v in obj.get("prefix", []))
            tail = obj["tail"]
            if tail.get("kind") == "constant":
                t = ConstantTail(_parse_scalar(tail["value"]))
            elif tail.get("kind") == "convergent":
                t = ConvergentTail(_parse_scalar(tail["limit"]), _frac(tail["rate"]))
            else:
                raise SchemaError(f"unknown tail kind {tail.get('kind')!r}")
            return Diagonal(SequenceSpec(prefix, t))
    except KeyError as exc:
        raise SchemaError(f"operator {kind!r} is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise SchemaError(str(exc)) from exc
    raise SchemaError(f"unknown operator kind {kind!r}")


def op_to_json(op: Operator) -> dict:
    if isinstance(op, ForwardShift):
        return {"kind": "forward_shift", "k": op.k}
    if isinstance(op, BackwardShift):
        return {"kind": "backward_shift", "k": op.k}
    if isinstance(op, Spread):
        return {"kind": "spread", "k": op.k}
    if isinstance(op, ZeroOp):
        return {"kind": "zero"}
    if isinstance(op, IdentityOp):
        return {"kind": "identity"}
    if isinstance(op, DirectSum):
        return {"kind": "direct_sum", "left": op_to_json(op.left), "right": op_to_json(op.right)}
    if isinstance(op, Adjoint):
        return {"kind": "adjoint", "inner": op_to_json(op.inner)}
    if isinstance(op, Diagonal):
        tail = op.spec.tail
        if isinstance(tail, ConstantTail):
            t = {"kind": "constant", "value": tail.value.to_pair()}
        else:
            t = {"kind": "convergent", "limit": tail.limit.to_pair(), "rate": str(tail.rate)}
        return {"kind": "diagonal", "prefix": [v.to_pair() for v in op.spec.prefix], "tail": t}
    raise TypeError(f"not a catalog operator: {op!r}")


def harmonic(limit: Scalar = 0, rate: Scalar = 1, prefix=()) -> Diagonal:
    """Diagonal operator whose entries converge to ``limit`` (range not closed there)."""
    return Diagonal(SequenceSpec(tuple(prefix), ConvergentTail(RationalComplex.coerce(limit), _frac(rate))))


def constant_diagonal(value: Scalar, prefix=()) -> Diagonal:
    return Diagonal(SequenceSpec(tuple(prefix), ConstantTail(RationalComplex.coerce(value))))
