"""Exact linear algebra on truncations: the independent check of symbolic claims.

Two counts are available for a rectangular truncation ``A`` (``M x N``):

``exact_rank``
    rank by exact elimination over the rationals.  Its nullity is the
    dimension of the true kernel inside the domain window, because the
    codomain window is never clipped.

``near_nullity``
    the number of singular values of ``A`` below ``delta``, counted exactly
    as the number of negative eigenvalues of ``A^H A - delta^2`` (Sylvester
    inertia of an exact symmetric elimination).  Kernels that are not spanned
    by basis vectors (the geometric kernel of ``S^* - 1/2``, say) give no
    exact null vector in any finite window but do give a singular value that
    decays geometrically, so they are seen by this count and missed by the
    exact one.

Complex matrices are handled through the real form ``a + bi -> [[a, -b], [b, a]]``
with interleaved coordinates, which keeps band structure; real rank and real
inertia counts are twice the complex ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from joblib import Parallel, delayed

from .blockmodel import BlockModel, TruncatedMatrix, adjoint_model, assemble_truncation
from .exceptions import ResourceCap
from .extarith import INF, ExtNat

DEFAULT_CAP = 4096
STABLE = "STABLE"
DIVERGING = "DIVERGING"
UNSETTLED = "UNSETTLED"


@dataclass(frozen=True)
class RankReport:
    N: int
    rows: int
    cols: int
    rank: int
    nullity: int
    adjoint_nullity: int

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "rows": self.rows,
            "cols": self.cols,
            "rank": self.rank,
            "nullity": self.nullity,
            "adjoint_nullity": self.adjoint_nullity,
        }


def _real_columns(m: TruncatedMatrix) -> Tuple[List[Dict[int, Fraction]], int]:
    """Columns over Q, realified when needed; returns (columns, scale)."""
    if m.is_real():
        return [{r: v.re for r, v in col.items()} for col in m.columns], 1
    out: List[Dict[int, Fraction]] = []
    for col in m.columns:
        re_col: Dict[int, Fraction] = {}
        im_col: Dict[int, Fraction] = {}
        for r, v in col.items():
            # complex row r becomes real rows 2r-1 (real part) and 2r (imag part)
            if v.re:
                re_col[2 * r - 1] = v.re
                im_col[2 * r] = v.re
            if v.im:
                re_col[2 * r] = v.im
                im_col[2 * r - 1] = -v.im
        out.append(re_col)
        out.append(im_col)
    return out, 2


def _rank_of_vectors(vectors: List[Dict[int, Fraction]]) -> int:
    """Rank of sparse rational vectors by incremental echelon reduction."""
    pivots: Dict[int, Dict[int, Fraction]] = {}
    for vec in vectors:
        v = {k: x for k, x in vec.items() if x}
        while v:
            lead = min(v)
            piv = pivots.get(lead)
            if piv is None:
                inv = 1 / v[lead]
                pivots[lead] = {k: x * inv for k, x in v.items()}
                break
            f = v[lead]
            for k, x in piv.items():
                y = v.get(k, 0) - f * x
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
    return len(pivots)


def exact_rank(matrix: TruncatedMatrix, N: Optional[int] = None, cap: int = DEFAULT_CAP) -> RankReport:
    if matrix.rows > cap or matrix.cols > cap:
        raise ResourceCap(f"matrix {matrix.rows}x{matrix.cols} exceeds elimination cap {cap}")
    cols, scale = _real_columns(matrix)
    rank = _rank_of_vectors(cols) // scale
    n = N if N is not None else (matrix.col_sizes[0] if matrix.col_sizes else 0)
    return RankReport(n, matrix.rows, matrix.cols, rank, matrix.cols - rank, matrix.rows - rank)


# ---------------------------------------------------------------------------
# inertia and small singular values


def _gram(cols: List[Dict[int, Fraction]]) -> List[Dict[int, Fraction]]:
    """Sparse rows of ``A^T A`` for real sparse columns."""
    by_row: Dict[int, List[Tuple[int, Fraction]]] = {}
    for c, col in enumerate(cols):
        for r, v in col.items():
            by_row.setdefault(r, []).append((c, v))
    g: List[Dict[int, Fraction]] = [dict() for _ in cols]
    for entries in by_row.values():
        for a, va in entries:
            ga = g[a]
            for b, vb in entries:
                ga[b] = ga.get(b, 0) + va * vb
    return [{k: v for k, v in row.items() if v} for row in g]


def negative_inertia(sym: List[Dict[int, Fraction]]) -> int:
    """Number of negative eigenvalues of a real symmetric matrix given by sparse rows.

    Symmetric elimination with 1x1 pivots where a diagonal entry is nonzero
    and a 2x2 pivot ``[[0, b], [b, 0]]`` (one eigenvalue of each sign) when
    every remaining diagonal entry vanishes.
    """
    rows = {i: dict(r) for i, r in enumerate(sym)}
    negatives = 0
    while rows:
        pick = None
        for i in sorted(rows):
            d = rows[i].get(i)
            if d:
                pick = i
                break
        if pick is not None:
            d = rows[pick][pick]
            if d < 0:
                negatives += 1
            prow = rows.pop(pick)
            coupled = [(k, v) for k, v in prow.items() if k != pick and k in rows]
            for a, va in coupled:
                ra = rows[a]
                ra.pop(pick, None)
                f = va / d
                for b, vb in coupled:
                    y = ra.get(b, 0) - f * vb
                    if y:
                        ra[b] = y
                    else:
                        ra.pop(b, None)
            continue
        pair = None
        for i in sorted(rows):
            for k, v in rows[i].items():
                if k != i and v:
                    pair = (i, k)
                    break
            if pair:
                break
        if pair is None:
            break  # remaining block is zero
        i, k = pair
        negatives += 1
        b = rows[i][k]
        ri, rk = rows.pop(i), rows.pop(k)
        others = set(x for x in ri if x in rows) | set(x for x in rk if x in rows)
        # Schur complement S -= C P^{-1} C^T with P = [[0, b], [b, 0]], P^{-1} = [[0, 1/b], [1/b, 0]]
        inv = 1 / b
        for a in others:
            ca_i, ca_k = ri.get(a, 0), rk.get(a, 0)
            ra = rows[a]
            ra.pop(i, None)
            ra.pop(k, None)
            for c in others:
                cc_i, cc_k = ri.get(c, 0), rk.get(c, 0)
                delta = inv * (ca_i * cc_k + ca_k * cc_i)
                if delta:
                    y = ra.get(c, 0) - delta
                    if y:
                        ra[c] = y
                    else:
                        ra.pop(c, None)
    return negatives


def count_singular_below(matrix: TruncatedMatrix, threshold_sq: Fraction, cap: int = DEFAULT_CAP) -> int:
    """Number of singular values ``s`` of ``matrix`` with ``s^2 < threshold_sq``."""
    if matrix.cols > cap:
        raise ResourceCap(f"{matrix.cols} columns exceed cap {cap}")
    cols, scale = _real_columns(matrix)
    g = _gram(cols)
    t = Fraction(threshold_sq)
    for i, row in enumerate(g):
        y = row.get(i, 0) - t
        if y:
            row[i] = y
        else:
            row.pop(i, None)
    return negative_inertia(g) // scale


def near_nullity(matrix: TruncatedMatrix, delta: Fraction = Fraction(1, 8), cap: int = DEFAULT_CAP) -> int:
    """Number of singular values strictly below ``delta``."""
    delta = Fraction(delta)
    return count_singular_below(matrix, delta * delta, cap)


def smallest_singular_bracket(matrix: TruncatedMatrix, steps: int = 12, cap: int = DEFAULT_CAP) -> Tuple[Fraction, Fraction]:
    """Exact rational bracket ``[lo, hi]`` for the square of the smallest singular value."""
    lo, hi = Fraction(0), Fraction(1)
    while count_singular_below(matrix, hi, cap) == 0:
        lo, hi = hi, hi * 4
    for _ in range(steps):
        mid = (lo + hi) / 2
        if count_singular_below(matrix, mid, cap) > 0:
            hi = mid
        else:
            lo = mid
    return lo, hi


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class Stabilization:
    schedule: Tuple[int, ...]
    values: Tuple[int, ...]
    estimate: ExtNat
    flag: str

    def to_json(self) -> dict:
        return {
            "schedule": list(self.schedule),
            "values": list(self.values),
            "estimate": "inf" if self.estimate == INF else str(self.estimate),
            "flag": self.flag,
        }


def judge(schedule: Sequence[int], values: Sequence[int], threshold: int = 10) -> Stabilization:
    """STABLE if the last three agree; DIVERGING if strictly increasing past ``threshold``."""
    values = tuple(values)
    if len(values) >= 3 and values[-1] == values[-2] == values[-3]:
        flag, est = STABLE, values[-1]
    elif all(a < b for a, b in zip(values, values[1:])) and values[-1] > threshold:
        flag, est = DIVERGING, INF
    else:
        flag, est = UNSETTLED, values[-1]
    return Stabilization(tuple(schedule), values, est, flag)


def _check_schedule(schedule: Sequence[int]) -> Tuple[int, ...]:
    schedule = tuple(int(n) for n in schedule)
    if len(schedule) < 3:
        raise ValueError("a schedule needs at least three window sizes")
    if any(a >= b for a, b in zip(schedule, schedule[1:])) or schedule[0] < 1:
        raise ValueError("schedule must be strictly increasing positive integers")
    return schedule


def _count(model: BlockModel, N: int, method: str, delta: Fraction) -> int:
    m = assemble_truncation(model, N)
    if method == "exact":
        return exact_rank(m, N).nullity
    if method == "near":
        return near_nullity(m, delta)
    raise ValueError(f"unknown method {method!r}")


def nullity_sequence(model: BlockModel, schedule: Sequence[int], method: str = "exact",
                     delta: Fraction = Fraction(1, 8), n_jobs: Optional[int] = None) -> Tuple[int, ...]:
    schedule = _check_schedule(schedule)
    if n_jobs in (None, 1):
        return tuple(_count(model, N, method, delta) for N in schedule)
    return tuple(Parallel(n_jobs=n_jobs)(delayed(_count)(model, N, method, delta) for N in schedule))


def stabilized_alpha(model: BlockModel, schedule: Sequence[int], method: str = "exact",
                     delta: Fraction = Fraction(1, 8), threshold: int = 10,
                     n_jobs: Optional[int] = None) -> Stabilization:
    """Nullity of the truncations over ``schedule`` with a stabilisation verdict."""
    schedule = _check_schedule(schedule)
    return judge(schedule, nullity_sequence(model, schedule, method, delta, n_jobs), threshold)


def stabilized_beta(model: BlockModel, schedule: Sequence[int], method: str = "exact",
                    delta: Fraction = Fraction(1, 8), threshold: int = 10,
                    n_jobs: Optional[int] = None) -> Stabilization:
    """Same as :func:`stabilized_alpha` on the adjoint model (deficiency evidence)."""
    return stabilized_alpha(adjoint_model(model), schedule, method, delta, threshold, n_jobs)


@dataclass(frozen=True)
class WindowReport:
    """Direct truncation and adjoint-model truncation at one window size."""

    N: int
    direct: RankReport
    adjoint: RankReport

    def to_json(self) -> dict:
        return {"N": self.N, "direct": self.direct.to_json(), "adjoint_model": self.adjoint.to_json()}


def _window(model: BlockModel, adj: BlockModel, N: int) -> WindowReport:
    return WindowReport(N, exact_rank(assemble_truncation(model, N), N),
                        exact_rank(assemble_truncation(adj, N), N))


def rank_reports(model: BlockModel, schedule: Sequence[int], n_jobs: Optional[int] = None) -> List[WindowReport]:
    """Exact reports for the model and its adjoint over ``schedule``."""
    schedule = _check_schedule(schedule)
    adj = adjoint_model(model)
    if n_jobs in (None, 1):
        return [_window(model, adj, N) for N in schedule]
    return list(Parallel(n_jobs=n_jobs)(delayed(_window)(model, adj, N) for N in schedule))
