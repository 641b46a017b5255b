"""Sufficient and necessary conditions for completing a diagonal tuple.

Each theorem comes with two conditions on the profile (the Fredholm data of
``D_1 - lambda, ..., D_n - lambda``):

* ``condition_i`` is sufficient: some upper tuple of basis maps puts ``T`` in
  the target class (module :mod:`fredblock.completion` builds it);
* ``condition_iii`` is necessary: if it fails, no bounded upper tuple works.

Clauses quantified over an empty index range are vacuously true; this covers
every boundary convention (``j = 1``, ``j = n``, ``n = 2``) in one rule.

Right-hand theorems are the left-hand ones read on the adjoint tuple in
reverse order (``alpha`` and ``beta`` swap, range closedness is kept), which
is how they are implemented here.  Tags always name the original indices.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from .extarith import INF, extnat_sum
from .opmodel import FredholmData, Operator, Scalar, fredholm_data

EXISTS = "EXISTS"
NONE = "NONE"
UNDECIDED = "UNDECIDED BY THEOREM"


class Theorem(enum.Enum):
    LeftWeylSep = "LeftWeylSep"
    RightWeylSep = "RightWeylSep"
    LeftFredSep = "LeftFredSep"
    RightFredSep = "RightFredSep"
    FredSep = "FredSep"
    LeftWeylChain = "LeftWeylChain"
    RightWeylChain = "RightWeylChain"
    LeftFredChain = "LeftFredChain"
    RightFredChain = "RightFredChain"
    FredNecessary = "FredNecessary"


class Theorem2(enum.Enum):
    LeftWeyl2 = "LeftWeyl2"
    RightWeyl2 = "RightWeyl2"
    LeftFred2 = "LeftFred2"
    RightFred2 = "RightFred2"
    Fred2 = "Fred2"


Profile = Tuple[FredholmData, ...]


@dataclass(frozen=True)
class Verdict:
    theorem: str
    condition_i: bool
    condition_iii: bool
    witness_clause: str

    @property
    def status(self) -> str:
        if self.condition_i:
            return EXISTS
        if not self.condition_iii:
            return NONE
        return UNDECIDED

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "condition_i": self.condition_i,
            "condition_iii": self.condition_iii,
            "status": self.status,
            "witness_clause": self.witness_clause,
        }


def profile_of(diag: Sequence[Operator], lam: Scalar) -> Profile:
    return tuple(fredholm_data(d, lam) for d in diag)


def dual_profile(profile: Sequence[FredholmData]) -> Profile:
    """Profile of the adjoint tuple in reverse order."""
    return tuple(d.swapped() for d in reversed(profile))


class _View:
    """Reads a profile directly, or as its dual with original labels kept."""

    def __init__(self, profile: Sequence[FredholmData], dual: bool):
        self.n = len(profile)
        self.dual = dual
        self.data = dual_profile(profile) if dual else tuple(profile)

    def _orig(self, s: int) -> int:
        return self.n + 1 - s if self.dual else s

    def a(self, s: int):
        return self.data[s - 1].alpha

    def b(self, s: int):
        return self.data[s - 1].beta

    def closed(self, s: int) -> bool:
        return self.data[s - 1].range_closed

    def phi_plus(self, s: int) -> bool:
        return self.a(s) != INF and self.closed(s)

    def D(self, s: int) -> str:
        o = self._orig(s)
        return "D_n" if o == self.n else f"D_{o}"

    def A(self, s: int) -> str:
        return f"{'beta' if self.dual else 'alpha'}({self.D(s)})"

    def B(self, s: int) -> str:
        return f"{'alpha' if self.dual else 'beta'}({self.D(s)})"

    def phi(self) -> str:
        return "Phi-" if self.dual else "Phi+"

    def index(self, s: int) -> int:
        return self._orig(s)


def _all(rng, pred) -> bool:
    return all(pred(s) for s in rng)


def _first_fail(rng, pred) -> Optional[int]:
    for s in rng:
        if not pred(s):
            return s
    return None


# ---------------------------------------------------------------------------
# left-hand building blocks (read through a view)


def _beta_witness(v: _View, closed_interior: bool) -> Optional[int]:
    """Smallest j <= n-1 with b(j) = inf and a(s) < inf for 2 <= s <= j."""
    if closed_interior and not _all(range(2, v.n), v.closed):
        return None
    for j in range(1, v.n):
        if v.b(j) == INF and _all(range(2, j + 1), lambda s: v.a(s) != INF):
            return j
    return None


def _plus_tail(v: _View) -> bool:
    return _all(range(2, v.n + 1), v.phi_plus)


def _sum_ok(v: _View) -> bool:
    sa = extnat_sum(v.a(s) for s in range(1, v.n + 1))
    sb = extnat_sum(v.b(s) for s in range(1, v.n + 1))
    return sa <= sb


def _chain(v: _View) -> bool:
    return _all(range(2, v.n + 1), lambda s: v.a(s) <= v.b(s - 1))


def _chain_slack(v: _View) -> Optional[int]:
    for t in range(2, v.n + 1):
        if v.b(t - 1) == INF and v.a(t) < INF:
            return t
    return None


def _necessary(v: _View, weyl: bool) -> Tuple[bool, str]:
    """Condition (iii) of the left theorems (shared by the separable and chain forms)."""
    if not v.phi_plus(1):
        return False, f"(iii)(a) failed: {v.D(1)} in {v.phi()}"
    if not v.closed(v.n):
        return False, f"(iii)(b) failed: R({v.D(v.n)}) is closed"
    j = _beta_witness(v, closed_interior=False)
    if j is not None:
        return True, f"(iii)(c) {v.B(j)} = inf at j={v.index(j)}"
    if _plus_tail(v) and (not weyl or _sum_ok(v)):
        return True, "(iii)(c) " + ("semi-Fredholm tail with sum inequality" if weyl else "semi-Fredholm tail")
    return False, "(iii)(c) failed: no infinite-deficiency witness and " + (
        "semi-Fredholm tail or sum inequality fails" if weyl else "tail not semi-Fredholm"
    )


def _sufficient_sep(v: _View, weyl: bool) -> Tuple[bool, str]:
    if not v.phi_plus(1):
        return False, f"(i)(a) failed: {v.D(1)} in {v.phi()}"
    if not v.closed(v.n):
        return False, f"(i)(b) failed: R({v.D(v.n)}) is closed"
    j = _beta_witness(v, closed_interior=True)
    if j is not None:
        return True, f"(i)(c) {v.B(j)} = inf at j={v.index(j)}"
    if _plus_tail(v) and (not weyl or _sum_ok(v)):
        return True, "(i)(c) " + ("semi-Fredholm tail with sum inequality" if weyl else "semi-Fredholm tail")
    bad = _first_fail(range(2, v.n), v.closed)
    if bad is not None:
        return False, f"(i)(c) failed: R({v.D(bad)}) is closed"
    return False, "(i)(c) failed"


def _sufficient_chain(v: _View, weyl: bool) -> Tuple[bool, str]:
    if not v.phi_plus(1):
        return False, f"(i)(a) failed: {v.D(1)} in {v.phi()}"
    if not v.closed(v.n):
        return False, f"(i)(b) failed: R({v.D(v.n)}) is closed"
    interior = _all(range(2, v.n), v.closed)
    if interior and _chain(v):
        if not weyl:
            return True, "(i)(c) chain condition"
        if v.b(v.n) == INF:
            return True, f"(i)(c) chain condition with {v.B(v.n)} = inf"
        t = _chain_slack(v)
        if t is not None:
            return True, f"(i)(c) chain condition with strict slack at t={v.index(t)}"
    if _plus_tail(v) and (not weyl or _sum_ok(v)):
        return True, "(i)(c) " + ("semi-Fredholm tail with sum inequality" if weyl else "semi-Fredholm tail")
    if not interior:
        bad = _first_fail(range(2, v.n), v.closed)
        return False, f"(i)(c) failed: R({v.D(bad)}) is closed"
    if not _chain(v):
        s = _first_fail(range(2, v.n + 1), lambda s: v.a(s) <= v.b(s - 1))
        return False, f"(i)(c) failed: {v.A(s)} <= {v.B(s - 1)}"
    return False, f"(i)(c) failed: {v.B(v.n)} = inf"


# ---------------------------------------------------------------------------
# two-sided


def _fred_witness(v: _View, strict: bool) -> Optional[Tuple[int, int]]:
    n = v.n
    for j in range(1, n):
        for k in range(j + 1, n + 1):
            if v.b(j) != INF or v.a(k) != INF:
                continue
            if strict:
                ok = (
                    v.a(j) != INF
                    and v.b(k) != INF
                    and _all(range(1, j), lambda s: v.a(s) != INF and v.b(s) != INF)
                    and _all(range(k + 1, n + 1), lambda s: v.a(s) != INF and v.b(s) != INF)
                    and _all(range(2, n), v.closed)
                )
            else:
                ok = _all(range(2, j + 1), lambda s: v.a(s) != INF) and _all(
                    range(k, n), lambda s: v.b(s) != INF
                )
            if ok:
                return j, k
    return None


def _fred(profile: Profile, sufficient: bool) -> Tuple[bool, str]:
    v = _View(profile, False)
    n = v.n
    tag = "(i)" if sufficient else "(iii)"
    if not v.phi_plus(1):
        return False, f"{tag}(a) failed: D_1 in Phi+"
    if v.b(n) == INF:
        return False, f"{tag}(a) failed: {v.D(n)} in Phi-"
    w = _fred_witness(v, strict=sufficient)
    if w is not None:
        return True, f"{tag}(b) beta({v.D(w[0])}) = inf paired with alpha({v.D(w[1])}) = inf"
    if _all(range(2, n + 1), v.phi_plus) and _all(range(1, n), lambda s: v.b(s) != INF):
        return True, f"{tag}(b) all diagonal entries Fredholm"
    return False, f"{tag}(b) failed"


# ---------------------------------------------------------------------------
# public


def check(profile: Sequence[FredholmData], theorem) -> Verdict:
    profile = tuple(profile)
    if len(profile) < 2:
        raise ValueError("profiles need n >= 2")
    th = Theorem(theorem) if not isinstance(theorem, Theorem) else theorem
    name = th.value
    if th is Theorem.FredSep:
        ci, ti = _fred(profile, True)
        ciii, tiii = _fred(profile, False)
    elif th is Theorem.FredNecessary:
        ci, ti = False, "(i) no sufficient condition is available without separability"
        ciii, tiii = _fred(profile, False)
    else:
        dual = name.startswith("Right")
        weyl = "Weyl" in name
        v = _View(profile, dual)
        if name.endswith("Sep"):
            ci, ti = _sufficient_sep(v, weyl)
        else:
            ci, ti = _sufficient_chain(v, weyl)
        ciii, tiii = _necessary(v, weyl)
    if ci:
        tag = ti
    elif not ciii:
        tag = tiii
    else:
        tag = f"{ti}; {tiii}"
    return Verdict(name, ci, ciii, tag)


def check_n2_equiv(profile: Sequence[FredholmData], theorem) -> bool:
    """Exact existence criterion for two diagonal entries."""
    profile = tuple(profile)
    if len(profile) != 2:
        raise ValueError("n = 2 characterisations need exactly two entries")
    th = Theorem2(theorem) if not isinstance(theorem, Theorem2) else theorem
    d1, d2 = profile
    a1, b1, a2, b2 = d1.alpha, d1.beta, d2.alpha, d2.beta
    phip1 = a1 != INF and d1.range_closed
    phip2 = a2 != INF and d2.range_closed
    phim1, phim2 = b1 != INF, b2 != INF
    if th is Theorem2.LeftWeyl2:
        return phip1 and d2.range_closed and (b1 == INF or (phip2 and a1 + a2 <= b1 + b2))
    if th is Theorem2.RightWeyl2:
        return phim2 and d1.range_closed and (a2 == INF or (phim1 and a1 + a2 >= b1 + b2))
    if th is Theorem2.LeftFred2:
        return phip1 and d2.range_closed and (b1 == INF or phip2)
    if th is Theorem2.RightFred2:
        return phim2 and d1.range_closed and (a2 == INF or phim1)
    return phip1 and phim2 and ((b1 == INF and a2 == INF) or (phip2 and phim1))


def check_tuple(diag: Sequence[Operator], lam: Scalar, theorem) -> Verdict:
    return check(profile_of(diag, lam), theorem)
