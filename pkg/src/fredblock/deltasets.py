"""Pointwise membership in the perturbation-set bounds.

For every target spectrum ``sigma_*`` the intersection of ``sigma_*(T)`` over
all upper tuples is bracketed between two explicit sets built from the
Fredholm data of the diagonal entries; this module decides, at one rational
``lambda``, whether ``lambda`` lies in the lower set and in the upper set.

Field names follow what a family means rather than how it is primed:

``delta_k``
    the "infinite nullity / deficiency with finite partial sum" sets,
``delta_np1``
    the sum-inequality set (index ``n+1``),
``delta_prime_k``
    the strict chain inequalities ``alpha(D_k) > beta(D_{k-1})`` (or their
    duals) used when separability is not assumed,
``delta_prime``
    infinite total nullity (deficiency) with finite deficiency of ``D_n``
    (nullity of ``D_1``),
``delta_doubleprime_k``
    ``R(D_k - lambda)`` not closed: the correction families.

The legacy variant drops every non-closed-range family; its lower and upper
sets then coincide, as in the formulas before correction.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .exceptions import ResourceCap, SchemaError
from .extarith import INF, extnat_sum
from .opmodel import FredholmData, Operator, RationalComplex, Scalar, fredholm_data

NA = "N/A"
DEFAULT_GRID_CAP = 10**6


class Target(enum.Enum):
    AW_sep = "AW_sep"
    SW_sep = "SW_sep"
    SFplus_sep = "SFplus_sep"
    SFminus_sep = "SFminus_sep"
    E_sep = "E_sep"
    AW_gen = "AW_gen"
    SW_gen = "SW_gen"
    SFplus_gen = "SFplus_gen"
    SFminus_gen = "SFminus_gen"
    E_gen = "E_gen"


class Target2(enum.Enum):
    AW2 = "AW2"
    SW2 = "SW2"
    SFplus2 = "SFplus2"
    SFminus2 = "SFminus2"
    E2 = "E2"


@dataclass(frozen=True)
class DeltaMembership:
    target: str
    n: int
    sf_plus_d1: Optional[bool]
    sf_minus_dn: Optional[bool]
    delta_k: Dict[int, bool]
    delta_prime_k: Dict[int, bool]
    delta_doubleprime_k: Dict[int, bool]
    delta_prime: Optional[bool]
    delta_np1: Optional[bool]
    lower_bound_member: bool
    upper_bound_member: Union[bool, str]
    legacy_member: bool

    def columns(self) -> List[Tuple[str, Union[bool, str]]]:
        cols: List[Tuple[str, Union[bool, str]]] = []
        if self.sf_plus_d1 is not None:
            cols.append(("sigma_sf_plus_D1", self.sf_plus_d1))
        if self.sf_minus_dn is not None:
            cols.append(("sigma_sf_minus_Dn", self.sf_minus_dn))
        cols += [(f"delta_{k}", v) for k, v in sorted(self.delta_k.items())]
        if self.delta_np1 is not None:
            cols.append(("delta_np1", self.delta_np1))
        cols += [(f"delta_prime_{k}", v) for k, v in sorted(self.delta_prime_k.items())]
        if self.delta_prime is not None:
            cols.append(("delta_prime", self.delta_prime))
        cols += [(f"delta_doubleprime_{k}", v) for k, v in sorted(self.delta_doubleprime_k.items())]
        cols += [("lower", self.lower_bound_member), ("upper", self.upper_bound_member),
                 ("legacy", self.legacy_member)]
        return cols

    def to_json(self) -> dict:
        return {name: value for name, value in self.columns()} | {"target": self.target}


class _P:
    """Profile accessors with 1-based indices."""

    def __init__(self, profile: Sequence[FredholmData]):
        self.p = tuple(profile)
        self.n = len(self.p)

    def a(self, s):
        return self.p[s - 1].alpha

    def b(self, s):
        return self.p[s - 1].beta

    def nc(self, s) -> bool:
        return not self.p[s - 1].range_closed

    def sum_a(self, lo, hi):
        return extnat_sum(self.a(s) for s in range(lo, hi + 1))

    def sum_b(self, lo, hi):
        return extnat_sum(self.b(s) for s in range(lo, hi + 1))

    def sfp(self, s) -> bool:
        return self.a(s) == INF or self.nc(s)

    def sfm(self, s) -> bool:
        return self.b(s) == INF


def _left_deltas(p: _P) -> Dict[int, bool]:
    return {k: p.a(k) == INF and p.sum_b(1, k - 1) < INF for k in range(2, p.n + 1)}


def _right_deltas(p: _P) -> Dict[int, bool]:
    return {k: p.b(k) == INF and p.sum_a(k + 1, p.n) < INF for k in range(1, p.n)}


def memberships_from_profile(profile: Sequence[FredholmData], target) -> DeltaMembership:
    t = Target(target) if not isinstance(target, Target) else target
    p = _P(profile)
    n = p.n
    if n < 2:
        raise ValueError("a diagonal tuple needs n >= 2")
    left = t.value.startswith(("AW", "SFplus"))
    right = t.value.startswith(("SW", "SFminus"))
    gen = t.value.endswith("_gen")
    weyl = t.value.startswith(("AW", "SW"))
    sfp1 = sfmn = None
    dk: Dict[int, bool] = {}
    dpk: Dict[int, bool] = {}
    ddk: Dict[int, bool] = {}
    dprime = dnp1 = None
    if left:
        sfp1 = p.sfp(1)
        dk = _left_deltas(p)
        if weyl:
            dnp1 = p.sum_b(1, n) < p.sum_a(1, n)
        ddk = {k: p.nc(k) for k in range(2, n + 1)}
        core = sfp1 or any(dk.values()) or bool(dnp1)
        lower = core or ddk[n]
        legacy = core
        if gen:
            dpk = {k: p.a(k) > p.b(k - 1) for k in range(2, n + 1)}
            dprime = p.b(n) < INF and p.sum_a(1, n) == INF
            upper = sfp1 or any(dpk.values()) or bool(dnp1) or dprime or any(ddk.values())
        else:
            upper = core or any(ddk.values())
    elif right:
        sfmn = p.sfm(n)
        dk = _right_deltas(p)
        if weyl:
            dnp1 = p.sum_a(1, n) < p.sum_b(1, n)
        ddk = {k: p.nc(k) for k in range(1, n)}
        core = sfmn or any(dk.values()) or bool(dnp1)
        lower = core or ddk[1]
        legacy = core
        if gen:
            dpk = {k: p.b(k) > p.a(k + 1) for k in range(1, n)}
            dprime = p.a(1) < INF and p.sum_b(1, n) == INF
            upper = sfmn or any(dpk.values()) or bool(dnp1) or dprime or any(ddk.values())
        else:
            upper = core or any(ddk.values())
    else:
        sfp1, sfmn = p.sfp(1), p.sfm(n)
        for k in range(2, n):
            dk[k] = (p.a(k) == INF and p.sum_b(1, k - 1) < INF) or (
                p.b(k) == INF and p.sum_a(k + 1, n) < INF
            )
        dk[n] = (p.a(n) == INF and p.sum_b(1, n - 1) < INF) or (p.b(1) == INF and p.sum_a(2, n) < INF)
        lower = sfp1 or sfmn or any(dk.values())
        legacy = lower
        if gen:
            upper = NA
        else:
            ddk = {k: p.nc(k) for k in range(2, n)}
            upper = lower or any(ddk.values())
    return DeltaMembership(t.value, n, sfp1, sfmn, dk, dpk, ddk, dprime, dnp1,
                           bool(lower), upper if upper == NA else bool(upper), bool(legacy))


def delta_memberships(diag: Sequence[Operator], lam: Scalar, target) -> DeltaMembership:
    return memberships_from_profile([fredholm_data(d, lam) for d in diag], target)


def n2_exact_from_profile(profile: Sequence[FredholmData], target) -> bool:
    t = Target2(target) if not isinstance(target, Target2) else target
    if len(profile) != 2:
        raise ValueError("n = 2 formulas need exactly two entries")
    p = _P(profile)
    a1, b1, a2, b2 = p.a(1), p.b(1), p.a(2), p.b(2)
    if t is Target2.AW2:
        return p.sfp(1) or (a2 == INF and b1 < INF) or (b1 + b2 < a1 + a2) or p.nc(2)
    if t is Target2.SW2:
        return p.sfm(2) or (b1 == INF and a2 < INF) or (a1 + a2 < b1 + b2) or p.nc(1)
    if t is Target2.SFplus2:
        return p.sfp(1) or (a2 == INF and b1 < INF) or p.nc(2)
    if t is Target2.SFminus2:
        return p.sfm(2) or (b1 == INF and a2 < INF) or p.nc(1)
    return p.sfp(1) or p.sfm(2) or (a2 == INF and b1 < INF) or (b1 == INF and a2 < INF)


def n2_exact_membership(diag: Sequence[Operator], lam: Scalar, target) -> bool:
    return n2_exact_from_profile([fredholm_data(d, lam) for d in diag], target)


# ---------------------------------------------------------------------------
# grids


def _parse_range(text: str) -> Tuple[Fraction, Fraction, Fraction]:
    try:
        span, step = text.split(":")
        lo, hi = span.split("..")
        lo, hi, step = Fraction(lo.strip()), Fraction(hi.strip()), Fraction(step.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"grid must look like A..B:S, got {text!r}") from exc
    if step <= 0 or hi < lo:
        raise SchemaError(f"grid needs A <= B and a positive step: {text!r}")
    return lo, hi, step


@dataclass(frozen=True)
class Grid:
    """Rational rectangle ``[re_lo, re_hi] x [im_lo, im_hi]`` sampled with fixed steps."""

    re_lo: Fraction
    re_hi: Fraction
    re_step: Fraction
    im_lo: Fraction
    im_hi: Fraction
    im_step: Fraction

    @classmethod
    def parse(cls, re_text: str, im_text: Optional[str] = None) -> "Grid":
        r = _parse_range(re_text)
        i = _parse_range(im_text) if im_text else r
        return cls(*r, *i)

    @classmethod
    def square(cls, lo, hi, step) -> "Grid":
        lo, hi, step = Fraction(lo), Fraction(hi), Fraction(step)
        return cls(lo, hi, step, lo, hi, step)

    @staticmethod
    def _axis(lo, hi, step) -> List[Fraction]:
        count = int((hi - lo) // step) + 1
        return [lo + step * i for i in range(count)]

    def size(self) -> int:
        return (int((self.re_hi - self.re_lo) // self.re_step) + 1) * (
            int((self.im_hi - self.im_lo) // self.im_step) + 1
        )

    def points(self) -> Iterator[RationalComplex]:
        """Row-major: imaginary part in the outer loop, real part inner."""
        res = self._axis(self.re_lo, self.re_hi, self.re_step)
        for im in self._axis(self.im_lo, self.im_hi, self.im_step):
            for re in res:
                yield RationalComplex(re, im)


@dataclass
class RegionScan:
    target: str
    header: List[str]
    rows: List[Tuple[RationalComplex, DeltaMembership]] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for lam, m in self.rows:
            vals = [v if v == NA else int(bool(v)) for _, v in m.columns()]
            w.writerow([str(lam.re), str(lam.im), *vals])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "header": self.header,
            "rows": [{"re": str(l.re), "im": str(l.im), **m.to_json()} for l, m in self.rows],
        }


def _scan_chunk(diag, points, target):
    return [(lam, delta_memberships(diag, lam, target)) for lam in points]


def region_scan(diag: Sequence[Operator], grid: Grid, target, cap: int = DEFAULT_GRID_CAP,
                n_jobs: Optional[int] = None) -> RegionScan:
    t = Target(target) if not isinstance(target, Target) else target
    if grid.size() > cap:
        raise ResourceCap(f"grid of {grid.size()} points exceeds cap {cap}")
    pts = list(grid.points())
    if n_jobs in (None, 1) or len(pts) < 256:
        rows = _scan_chunk(tuple(diag), pts, t)
    else:
        from joblib import Parallel, delayed

        size = max(64, len(pts) // (8 * abs(n_jobs)))
        chunks = [pts[i:i + size] for i in range(0, len(pts), size)]
        parts = Parallel(n_jobs=n_jobs)(delayed(_scan_chunk)(tuple(diag), c, t) for c in chunks)
        rows = [r for part in parts for r in part]
    header = ["re", "im"] + [name for name, _ in rows[0][1].columns()] if rows else ["re", "im"]
    return RegionScan(t.value, header, rows)


def sandwich_violations(diag: Sequence[Operator], grid: Grid, targets=tuple(Target), cap: int = DEFAULT_GRID_CAP) -> List[dict]:
    """Points where a lower-bound member is not an upper-bound member (expected: none)."""
    out = []
    for t in targets:
        scan = region_scan(diag, grid, t, cap)
        for lam, m in scan.rows:
            if m.upper_bound_member == NA:
                continue
            if m.lower_bound_member and not m.upper_bound_member:
                out.append({"target": scan.target, "re": str(lam.re), "im": str(lam.im)})
    return out


def legacy_diff(diag: Sequence[Operator], grid: Grid, target=Target.AW_sep, cap: int = DEFAULT_GRID_CAP) -> List[dict]:
    """Points where the corrected bounds and the uncorrected formula disagree."""
    out = []
    for lam, m in region_scan(diag, grid, target, cap).rows:
        flag = None
        if m.lower_bound_member and not m.legacy_member:
            flag = "corrected-only"
        elif m.upper_bound_member is True and not m.lower_bound_member and not m.legacy_member:
            flag = "upper-only"
        if flag:
            out.append({"re": str(lam.re), "im": str(lam.im), "flag": flag,
                        "corrected_lower": m.lower_bound_member,
                        "corrected_upper": m.upper_bound_member, "legacy": m.legacy_member})
    return out
