"""Witness upper tuples for the completion theorems.

Every construction only ever maps basis vectors onto basis vectors, so the
result is a :class:`~fredblock.blockmodel.BlockModel` whose truncations can be
checked exactly.  Strategies:

``TrivialZero``
    no upper entries; used when the diagonal alone is already in the class.
``RowInterleave(k)``
    all upper entries sit in row ``k``, where ``k`` is the smallest index with
    ``beta(D_k) = inf``.  Block ``H_{k+1+t}`` is sent onto the cokernel
    vectors ``f_{ns+t}`` of ``D_k`` (stride ``n``, offsets ``t = 0, 1, ...``),
    which leaves infinitely many cokernel vectors unused.
``SuperdiagonalJ``
    entry ``(i, i+1)`` maps the kernel vectors of ``D_{i+1}`` one to one onto
    the lowest cokernel vectors of ``D_i``.
``FredholmPairing``
    every infinite cokernel of some ``D_p`` is paired with infinite kernels
    of later blocks and vice versa, splitting enumerations into residue
    classes, so that both are used up completely.

Why the predictions hold: when each upper entry maps kernel vectors of
``D_q`` into ``R(D_p)^perp``, ``T`` splits as an invertible part (each ``D_s``
from ``N(D_s)^perp`` onto ``R(D_s)``) plus the block operator formed by the
maps between ``N(D_1) + ... + N(D_n)`` and ``R(D_1)^perp + ... + R(D_n)^perp``.
RowInterleave also maps non-kernel vectors, but isometrically into a space
orthogonal to ``R(D_k)``, which only removes those columns from the kernel.

Right-sided targets are obtained by running the left construction on the
adjoint tuple in reverse order at ``conj(lambda)`` and transforming back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .blockmodel import BasisMap, BlockModel, Enum, Rule, adjoint_model, reverse_model
from .characterization import Theorem, check, profile_of
from .exceptions import PreconditionFailed
from .extarith import INF, ExtNat, extnat_sum, render
from .opmodel import Operator, RationalComplex, Scalar, adjoint_op, cokernel_coords, kernel_coords

TRIVIAL = "TrivialZero"
ROW = "RowInterleave"
SUPER = "SuperdiagonalJ"
PAIRING = "FredholmPairing"

TARGETS = ("left-weyl", "left-fredholm", "right-weyl", "right-fredholm", "fredholm")


@dataclass(frozen=True)
class Prediction:
    alpha: ExtNat
    beta: ExtNat
    range_closed: bool

    def swapped(self) -> "Prediction":
        return Prediction(self.beta, self.alpha, self.range_closed)

    def to_json(self) -> dict:
        return {"alpha": render(self.alpha), "beta": render(self.beta), "range_closed": self.range_closed}


@dataclass(frozen=True)
class CompletionPlan:
    strategy: str
    theorem: str
    model: BlockModel
    predicted: Prediction
    row: Optional[int] = None

    @property
    def produced(self):
        return self.model.maps

    def to_json(self) -> dict:
        out = {"strategy": self.strategy, "theorem": self.theorem, "predicted": self.predicted.to_json()}
        if self.row is not None:
            out["row"] = self.row
        return out


def _require(diag: Sequence[Operator], lam: RationalComplex, theorem: Theorem):
    verdict = check(profile_of(diag, lam), theorem)
    if not verdict.condition_i:
        raise PreconditionFailed(verdict.witness_clause)
    return verdict


def _trivial(diag, lam, theorem) -> CompletionPlan:
    prof = profile_of(diag, lam)
    pred = Prediction(
        extnat_sum(d.alpha for d in prof),
        extnat_sum(d.beta for d in prof),
        all(d.range_closed for d in prof),
    )
    return CompletionPlan(TRIVIAL, theorem.value, BlockModel(tuple(diag), (), lam), pred)


def _row_interleave(diag, lam, theorem, k: int) -> CompletionPlan:
    n = len(diag)
    cokernel_coords(diag[k - 1], lam)  # raises Unsupported early
    maps = []
    for t in range(n - k):
        rule = Rule(target=Enum("cokernel", k), mult=n, offset=t)
        maps.append(((k, k + 1 + t), BasisMap(rule=rule)))
    prof = profile_of(diag, lam)
    pred = Prediction(extnat_sum(d.alpha for d in prof[:k]), INF, True)
    return CompletionPlan(f"{ROW}({k})", theorem.value, BlockModel(tuple(diag), tuple(maps), lam), pred, row=k)


def _superdiagonal(diag, lam, theorem) -> CompletionPlan:
    n = len(diag)
    prof = profile_of(diag, lam)
    maps = []
    spare: ExtNat = prof[-1].beta
    for i in range(1, n):
        a_next, b_here = prof[i].alpha, prof[i - 1].beta
        if a_next == INF:
            left = 0  # both infinite: the lowest-first matching is a bijection
        else:
            left = b_here - a_next
        spare = spare + left
        if a_next == 0:
            continue
        kernel_coords(diag[i], lam)
        cokernel_coords(diag[i - 1], lam)
        rule = Rule(source=Enum("kernel", i + 1), target=Enum("cokernel", i))
        maps.append(((i, i + 1), BasisMap(rule=rule)))
    pred = Prediction(prof[0].alpha, spare, True)
    return CompletionPlan(SUPER, theorem.value, BlockModel(tuple(diag), tuple(maps), lam), pred)


def _pairing_edges(prof) -> Optional[List[Tuple[int, int]]]:
    n = len(prof)
    rows = [p for p in range(1, n + 1) if prof[p - 1].beta == INF]
    cols = [q for q in range(1, n + 1) if prof[q - 1].alpha == INF]
    edges = set()
    for p in rows:
        later = [q for q in cols if q > p]
        if not later:
            return None
        edges.add((p, later[0]))
    for q in cols:
        earlier = [p for p in rows if p < q]
        if not earlier:
            return None
        edges.add((earlier[-1], q))
    return sorted(edges)


def _pairing(diag, lam, theorem) -> CompletionPlan:
    prof = profile_of(diag, lam)
    if not all(d.range_closed for d in prof):
        raise PreconditionFailed("pairing needs every diagonal range closed")
    edges = _pairing_edges(prof)
    if edges is None:
        raise PreconditionFailed("an infinite cokernel has no later infinite kernel (or the reverse)")
    by_row: Dict[int, List[int]] = {}
    by_col: Dict[int, List[int]] = {}
    for p, q in edges:
        by_row.setdefault(p, []).append(q)
        by_col.setdefault(q, []).append(p)
    maps = []
    for p, q in edges:
        kernel_coords(diag[q - 1], lam)
        cokernel_coords(diag[p - 1], lam)
        dp, rp = len(by_row[p]), sorted(by_row[p]).index(q)
        dq, rq = len(by_col[q]), sorted(by_col[q]).index(p)
        rule = Rule(Enum("kernel", q), dq, rq + 1 - dq, Enum("cokernel", p), dp, rp + 1 - dp)
        maps.append(((p, q), BasisMap(rule=rule)))
    pred = Prediction(
        extnat_sum(d.alpha for d in prof if d.alpha != INF),
        extnat_sum(d.beta for d in prof if d.beta != INF),
        True,
    )
    return CompletionPlan(PAIRING, theorem.value, BlockModel(tuple(diag), tuple(maps), lam), pred)


def _check_diag(diag) -> Tuple[Operator, ...]:
    diag = tuple(diag)
    if len(diag) < 2:
        raise ValueError("a diagonal tuple needs n >= 2")
    return diag


def _left_separable(diag, lam, weyl: bool) -> CompletionPlan:
    diag = _check_diag(diag)
    lam = RationalComplex.coerce(lam)
    theorem = Theorem.LeftWeylSep if weyl else Theorem.LeftFredSep
    _require(diag, lam, theorem)
    prof = profile_of(diag, lam)
    n = len(diag)
    interior = all(prof[s - 1].range_closed for s in range(2, n))
    for k in range(1, n):
        if prof[k - 1].beta == INF and all(prof[s - 1].alpha != INF for s in range(2, k + 1)):
            if interior:
                return _row_interleave(diag, lam, theorem, k)
            break
    return _trivial(diag, lam, theorem)


def complete_left_weyl_separable(diag: Sequence[Operator], lam: Scalar) -> CompletionPlan:
    return _left_separable(diag, lam, weyl=True)


def complete_left_fredholm_separable(diag: Sequence[Operator], lam: Scalar) -> CompletionPlan:
    return _left_separable(diag, lam, weyl=False)


def _left_chain(diag, lam, weyl: bool) -> CompletionPlan:
    diag = _check_diag(diag)
    lam = RationalComplex.coerce(lam)
    theorem = Theorem.LeftWeylChain if weyl else Theorem.LeftFredChain
    verdict = _require(diag, lam, theorem)
    if "chain" in verdict.witness_clause:
        return _superdiagonal(diag, lam, theorem)
    return _trivial(diag, lam, theorem)


def complete_left_weyl_chain(diag: Sequence[Operator], lam: Scalar) -> CompletionPlan:
    return _left_chain(diag, lam, weyl=True)


def complete_left_fredholm_chain(diag: Sequence[Operator], lam: Scalar) -> CompletionPlan:
    return _left_chain(diag, lam, weyl=False)


def complete_fredholm(diag: Sequence[Operator], lam: Scalar) -> CompletionPlan:
    """Fredholm completion: trivial when every entry qualifies, otherwise pairing."""
    diag = _check_diag(diag)
    lam = RationalComplex.coerce(lam)
    verdict = _require(diag, lam, Theorem.FredSep)
    if "all diagonal entries Fredholm" in verdict.witness_clause:
        return _trivial(diag, lam, Theorem.FredSep)
    return _pairing(diag, lam, Theorem.FredSep)


def dual_diag(diag: Sequence[Operator]) -> Tuple[Operator, ...]:
    """Adjoint tuple in reverse order."""
    return tuple(adjoint_op(d) for d in reversed(tuple(diag)))


def _transport(plan: CompletionPlan, theorem: Theorem) -> CompletionPlan:
    model = reverse_model(adjoint_model(plan.model))
    row = None if plan.row is None else plan.model.n + 1 - plan.row
    return CompletionPlan(plan.strategy if row is None else plan.strategy.split("(")[0] + f"({row})",
                          theorem.value, model, plan.predicted.swapped(), row)


_RIGHT = {
    ("right-weyl", False): (Theorem.RightWeylSep, complete_left_weyl_separable),
    ("right-fredholm", False): (Theorem.RightFredSep, complete_left_fredholm_separable),
    ("right-weyl", True): (Theorem.RightWeylChain, complete_left_weyl_chain),
    ("right-fredholm", True): (Theorem.RightFredChain, complete_left_fredholm_chain),
}


def complete_right_dual(diag: Sequence[Operator], lam: Scalar, which: str, chain: bool = False) -> CompletionPlan:
    """Right-sided and two-sided targets.

    ``which`` is one of ``left-fredholm``, ``right-fredholm``, ``right-weyl``
    or ``fredholm``.  Right targets run the left construction on the dual
    tuple and transform the resulting model back.
    """
    diag = _check_diag(diag)
    lam = RationalComplex.coerce(lam)
    which = which.lower()
    if which == "fredholm":
        return complete_fredholm(diag, lam)
    if which == "left-fredholm":
        return complete_left_fredholm_chain(diag, lam) if chain else complete_left_fredholm_separable(diag, lam)
    if (which, chain) not in _RIGHT:
        raise ValueError(f"unknown target {which!r}")
    theorem, left = _RIGHT[(which, chain)]
    try:
        plan = left(dual_diag(diag), lam.conjugate())
    except PreconditionFailed:
        verdict = check(profile_of(diag, lam), theorem)
        raise PreconditionFailed(verdict.witness_clause) from None
    return _transport(plan, theorem)


def complete(diag: Sequence[Operator], lam: Scalar, target: str, chain: bool = False) -> CompletionPlan:
    """Single entry point over the five targets."""
    target = target.lower()
    if target not in TARGETS:
        raise ValueError(f"target must be one of {TARGETS}")
    if target == "left-weyl":
        return complete_left_weyl_chain(diag, lam) if chain else complete_left_weyl_separable(diag, lam)
    return complete_right_dual(diag, lam, target, chain)


DEFAULT_SCHEDULE = (16, 32, 64, 128)


def _agrees(predicted: ExtNat, st, settle: int) -> bool:
    if predicted == INF:
        return st.flag == "DIVERGING"
    tail = [v for N, v in zip(st.schedule, st.values) if N >= settle]
    return st.flag == "STABLE" and bool(tail) and all(v == predicted for v in tail)


def certify(model: BlockModel, predicted: Prediction, schedule: Sequence[int] = DEFAULT_SCHEDULE,
            settle: int = 32, n_jobs: Optional[int] = None) -> dict:
    """Compare a prediction with exact truncation nullities of the model and its adjoint.

    A finite prediction must be reached by window ``settle`` and stay put; an
    infinite one needs strictly growing counts past the divergence threshold.
    """
    from .oracle import stabilized_alpha, stabilized_beta

    a = stabilized_alpha(model, schedule, n_jobs=n_jobs)
    b = stabilized_beta(model, schedule, n_jobs=n_jobs)
    ok_a = _agrees(predicted.alpha, a, settle)
    ok_b = _agrees(predicted.beta, b, settle)
    return {
        "alpha": a.to_json(),
        "beta": b.to_json(),
        "predicted": predicted.to_json(),
        "alpha_agrees": ok_a,
        "beta_agrees": ok_b,
        "agrees": ok_a and ok_b,
    }


def prediction_from_json(doc) -> Prediction:
    from .extarith import parse

    try:
        return Prediction(parse(doc["alpha"]), parse(doc["beta"]), bool(doc["range_closed"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"bad prediction record: {doc!r}") from exc
