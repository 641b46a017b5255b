"""Triangular block operator models and their exact rectangular truncations.

A model stores the diagonal operators ``D_1, ..., D_n`` (each on its own copy
of l2), a shift ``lambda`` and a sparse set of off-diagonal basis maps.  The
operator represented is ``T - lambda`` where ``T`` has the ``D_i`` on the
diagonal and the basis maps in the off-diagonal positions (all strictly above
the diagonal, or all strictly below it for adjoint models).

A basis map is a partial isometry that sends chosen standard basis vectors of
the source block onto distinct standard basis vectors of the target block.  It
is given either by explicit ``(source, target)`` coordinate pairs or by an
affine rule over two coordinate enumerations: pair ``s = 1, 2, ...`` is

    (src_enum[source_mult * s + source_offset], tgt_enum[mult * s + offset])

where an enumeration is either every coordinate, the kernel coordinates of
some ``D_b - lambda`` or the coordinates spanning ``R(D_b - lambda)^perp``,
always listed in increasing order and indexed from 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .exceptions import ResourceCap, SchemaError
from .opmodel import (
    CoordSet,
    Operator,
    RationalComplex,
    Scalar,
    adjoint_op,
    cokernel_coords,
    kernel_coords,
    op_from_json,
    op_to_json,
)

SCHEMA = "fredblock/1"
DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class Enum:
    """A coordinate enumeration: ``kind`` is ``"all"``, ``"kernel"`` or ``"cokernel"``."""

    kind: str = "all"
    block: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("all", "kernel", "cokernel"):
            raise ValueError(f"unknown enumeration kind {self.kind!r}")
        if (self.kind == "all") != (self.block is None):
            raise ValueError("kernel/cokernel enumerations need a block, 'all' takes none")

    def dual(self) -> "Enum":
        swap = {"all": "all", "kernel": "cokernel", "cokernel": "kernel"}
        return Enum(swap[self.kind], self.block)

    def renumber(self, n: int) -> "Enum":
        return self if self.block is None else Enum(self.kind, n + 1 - self.block)

    def to_json(self):
        if self.kind == "all":
            return "all"
        return {f"{self.kind}_of": self.block}

    @classmethod
    def from_json(cls, obj) -> "Enum":
        if obj == "all":
            return cls()
        if isinstance(obj, dict) and len(obj) == 1:
            (key, block), = obj.items()
            if key in ("kernel_of", "cokernel_of") and isinstance(block, int) and not isinstance(block, bool):
                return cls(key[: -len("_of")], block)
        raise SchemaError(f"bad coordinate enumeration {obj!r}")


@dataclass(frozen=True)
class Rule:
    source: Enum = Enum()
    source_mult: int = 1
    source_offset: int = 0
    target: Enum = Enum()
    mult: int = 1
    offset: int = 0
    count: Optional[int] = None

    def __post_init__(self):
        for name in ("source_mult", "mult"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.count is not None and self.count < 0:
            raise ValueError("count must be nonnegative")

    def adjoint(self) -> "Rule":
        return Rule(self.target.dual(), self.mult, self.offset, self.source.dual(),
                    self.source_mult, self.source_offset, self.count)

    def renumber(self, n: int) -> "Rule":
        return replace(self, source=self.source.renumber(n), target=self.target.renumber(n))

    def to_json(self) -> dict:
        out = {"mult": self.mult, "offset": self.offset}
        if self.source != Enum() or self.target != Enum():
            out["source"] = self.source.to_json()
            out["target"] = self.target.to_json()
        if self.source_mult != 1 or self.source_offset != 0:
            out["source_mult"] = self.source_mult
            out["source_offset"] = self.source_offset
        if self.count is not None:
            out["count"] = self.count
        return out

    @classmethod
    def from_json(cls, obj) -> "Rule":
        if not isinstance(obj, dict):
            raise SchemaError("rule must be an object")
        allowed = {"mult", "offset", "source", "target", "source_mult", "source_offset", "count"}
        extra = set(obj) - allowed
        if extra:
            raise SchemaError(f"unknown rule fields {sorted(extra)}")
        try:
            return cls(
                Enum.from_json(obj.get("source", "all")),
                obj.get("source_mult", 1),
                obj.get("source_offset", 0),
                Enum.from_json(obj.get("target", "all")),
                obj.get("mult", 1),
                obj.get("offset", 0),
                obj.get("count"),
            )
        except (TypeError, ValueError) as exc:
            raise SchemaError(str(exc)) from exc


@dataclass(frozen=True)
class BasisMap:
    """Partial isometry between basis vectors; exactly one of ``pairs``/``rule`` is set."""

    pairs: Optional[Tuple[Tuple[int, int], ...]] = None
    rule: Optional[Rule] = None

    def __post_init__(self):
        if (self.pairs is None) == (self.rule is None):
            raise ValueError("a BasisMap needs exactly one of pairs or rule")
        if self.pairs is not None:
            pairs = tuple((int(s), int(t)) for s, t in self.pairs)
            srcs = [s for s, _ in pairs]
            tgts = [t for _, t in pairs]
            if min(srcs + tgts, default=1) < 1:
                raise ValueError("coordinates are 1-based")
            if len(set(srcs)) != len(srcs) or len(set(tgts)) != len(tgts):
                raise ValueError("basis map must be injective on sources and targets")
            object.__setattr__(self, "pairs", tuple(sorted(pairs)))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, int]]) -> "BasisMap":
        return cls(pairs=tuple(pairs))

    def adjoint(self) -> "BasisMap":
        if self.pairs is not None:
            return BasisMap(pairs=tuple((t, s) for s, t in self.pairs))
        return BasisMap(rule=self.rule.adjoint())

    def renumber(self, n: int) -> "BasisMap":
        return self if self.rule is None else BasisMap(rule=self.rule.renumber(n))

    def to_json(self) -> dict:
        if self.pairs is not None:
            return {"pairs": [list(p) for p in self.pairs]}
        return {"rule": self.rule.to_json()}


Key = Tuple[int, int]


@dataclass(frozen=True)
class BlockModel:
    diag: Tuple[Operator, ...]
    maps: Tuple[Tuple[Key, BasisMap], ...] = ()
    shift: RationalComplex = RationalComplex(0)
    lower: bool = False

    def __post_init__(self):
        object.__setattr__(self, "diag", tuple(self.diag))
        object.__setattr__(self, "shift", RationalComplex.coerce(self.shift))
        n = len(self.diag)
        if n < 2:
            raise ValueError("a block model needs at least two diagonal entries")
        if isinstance(self.maps, dict):
            object.__setattr__(self, "maps", tuple(self.maps.items()))
        maps = tuple(sorted(((int(i), int(j)), m) for (i, j), m in self.maps))
        keys = [k for k, _ in maps]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate block position")
        for i, j in keys:
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError(f"block position {(i, j)} outside 1..{n}")
            if (i >= j) if not self.lower else (i <= j):
                side = "below" if self.lower else "above"
                raise ValueError(f"position {(i, j)} is not strictly {side} the diagonal")
        object.__setattr__(self, "maps", maps)

    @property
    def n(self) -> int:
        return len(self.diag)

    def map_at(self, i: int, j: int) -> Optional[BasisMap]:
        return dict(self.maps).get((i, j))

    def enumeration(self, e: Enum) -> CoordSet:
        if e.kind == "all":
            return CoordSet.everything()
        if not 1 <= e.block <= self.n:
            raise ValueError(f"enumeration refers to block {e.block} of {self.n}")
        op = self.diag[e.block - 1]
        if e.kind == "kernel":
            return kernel_coords(op, self.shift)
        return cokernel_coords(op, self.shift)

    def pairs_from(self, bmap: BasisMap, N: int) -> List[Tuple[int, int]]:
        """Pairs of ``bmap`` whose source coordinate is at most ``N``."""
        if bmap.pairs is not None:
            return [p for p in bmap.pairs if p[0] <= N]
        r = bmap.rule
        sources = self.enumeration(r.source).members(N)
        out: List[Tuple[int, int]] = []
        todo = []
        s = 1
        while r.count is None or s <= r.count:
            pos = r.source_mult * s + r.source_offset
            if pos > len(sources):
                break
            tpos = r.mult * s + r.offset
            if pos >= 1 and tpos >= 1:
                todo.append((sources[pos - 1], tpos))
            s += 1
        if not todo:
            return out
        targets = self.enumeration(r.target)
        need = max(t for _, t in todo)
        if r.target.kind == "all":
            listed = None
        else:
            listed = targets.first(need)
        for src, tpos in todo:
            if listed is None:
                out.append((src, tpos))
            elif tpos <= len(listed):
                out.append((src, listed[tpos - 1]))
        return out

    def to_json(self, prediction: Optional[dict] = None) -> dict:
        doc = {
            "schema": SCHEMA,
            "convention": "T - lambda (classifies identically to lambda - T)",
            "diag": [op_to_json(d) for d in self.diag],
            "lower" if self.lower else "upper": [
                {"i": i, "j": j, **m.to_json()} for (i, j), m in self.maps
            ],
            "lambda": self.shift.to_pair(),
        }
        if prediction is not None:
            doc["prediction"] = prediction
        return doc

    def dumps(self, prediction: Optional[dict] = None) -> str:
        return json.dumps(self.to_json(prediction), indent=2, sort_keys=True)


def model_from_json(doc) -> BlockModel:
    if not isinstance(doc, dict):
        raise SchemaError("model document must be a JSON object")
    if doc.get("schema", SCHEMA) != SCHEMA:
        raise SchemaError(f"unsupported schema {doc.get('schema')!r}")
    if "diag" not in doc:
        raise SchemaError("model needs a 'diag' list")
    diag = [op_from_json(d) for d in doc["diag"]]
    lower = "lower" in doc
    entries = doc.get("lower" if lower else "upper", [])
    maps = []
    for e in entries:
        try:
            key = (e["i"], e["j"])
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"map entry needs 'i' and 'j': {e!r}") from exc
        try:
            if "pairs" in e:
                maps.append((key, BasisMap.from_pairs(e["pairs"])))
            elif "rule" in e:
                maps.append((key, BasisMap(rule=Rule.from_json(e["rule"]))))
            else:
                raise SchemaError(f"map entry needs 'pairs' or 'rule': {e!r}")
        except (TypeError, ValueError) as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(str(exc)) from exc
    try:
        lam = RationalComplex.coerce(doc.get("lambda", ["0", "0"]))
        return BlockModel(tuple(diag), tuple(maps), lam, lower)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc)) from exc


def adjoint_model(model: BlockModel) -> BlockModel:
    """Adjoint: conjugate-transposed layout, adjoint diagonal, reversed maps, shift conjugated."""
    maps = tuple(((j, i), m.adjoint()) for (i, j), m in model.maps)
    return BlockModel(
        tuple(adjoint_op(d) for d in model.diag), maps, model.shift.conjugate(), not model.lower
    )


def reverse_model(model: BlockModel) -> BlockModel:
    """Relabel blocks ``k -> n+1-k``; swaps upper and lower triangular layouts."""
    n = model.n
    maps = tuple(((n + 1 - i, n + 1 - j), m.renumber(n)) for (i, j), m in model.maps)
    return BlockModel(tuple(reversed(model.diag)), maps, model.shift, not model.lower)


# ---------------------------------------------------------------------------
# truncation


@dataclass
class TruncatedMatrix:
    """Sparse exact matrix stored by columns (``columns[c]`` maps row -> value).

    Rows and columns are 1-based and global; ``row_sizes``/``col_sizes`` give
    the window of each block in order.
    """

    row_sizes: List[int]
    col_sizes: List[int]
    columns: List[Dict[int, RationalComplex]] = field(default_factory=list)

    @property
    def rows(self) -> int:
        return sum(self.row_sizes)

    @property
    def cols(self) -> int:
        return sum(self.col_sizes)

    def entry(self, r: int, c: int) -> RationalComplex:
        return self.columns[c - 1].get(r, RationalComplex(0))

    def is_real(self) -> bool:
        return all(v.im == 0 for col in self.columns for v in col.values())

    def dense(self) -> List[List[RationalComplex]]:
        zero = RationalComplex(0)
        out = [[zero] * self.cols for _ in range(self.rows)]
        for c, col in enumerate(self.columns):
            for r, v in col.items():
                out[r - 1][c] = v
        return out

    def conjugate_transpose(self) -> "TruncatedMatrix":
        cols: List[Dict[int, RationalComplex]] = [dict() for _ in range(self.rows)]
        for c, col in enumerate(self.columns, start=1):
            for r, v in col.items():
                cols[r - 1][c] = v.conjugate()
        return TruncatedMatrix(list(self.col_sizes), list(self.row_sizes), cols)


def _offsets(sizes: List[int]) -> List[int]:
    out, acc = [], 0
    for s in sizes:
        out.append(acc)
        acc += s
    return out


def assemble_truncation(model: BlockModel, N: int, cap: int = DEFAULT_CAP) -> TruncatedMatrix:
    """Matrix of ``T - lambda`` from the first N coordinates of each block.

    Each codomain window is as large as the image of the domain windows, so
    no image vector is clipped and the nullity of the result is exactly the
    dimension of ``ker(T - lambda)`` intersected with the domain window.
    """
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        raise ValueError("window size must be a positive integer")
    n = model.n
    if n * N > cap:
        raise ResourceCap(f"domain of {n * N} columns exceeds cap {cap}")
    lam = model.shift
    # block columns: for each block j, list of per-row-block dicts
    pieces: Dict[Tuple[int, int], List[Tuple[int, int, RationalComplex]]] = {}
    reach = [N] * n
    for b, op in enumerate(model.diag, start=1):
        entries = []
        for c in range(1, N + 1):
            col = dict(op.column(c))
            col[c] = col.get(c, RationalComplex(0)) - lam
            for r, v in col.items():
                if v:
                    entries.append((r, c, v))
                    reach[b - 1] = max(reach[b - 1], r)
        pieces[(b, b)] = entries
        if sum(reach) > cap:
            raise ResourceCap(f"truncation rows exceed cap {cap}")
    one = RationalComplex(1)
    for (i, j), bmap in model.maps:
        entries = [(t, s, one) for s, t in model.pairs_from(bmap, N)]
        for t, _, _ in entries:
            reach[i - 1] = max(reach[i - 1], t)
        pieces[(i, j)] = entries
    if sum(reach) > cap:
        raise ResourceCap(f"truncation rows {sum(reach)} exceed cap {cap}")
    row_off = _offsets(reach)
    col_sizes = [N] * n
    col_off = _offsets(col_sizes)
    columns: List[Dict[int, RationalComplex]] = [dict() for _ in range(n * N)]
    for (i, j), entries in pieces.items():
        for r, c, v in entries:
            columns[col_off[j - 1] + c - 1][row_off[i - 1] + r] = v
    return TruncatedMatrix(reach, col_sizes, columns)


def single_block_truncation(op: Operator, lam: Scalar, N: int) -> TruncatedMatrix:
    """Rectangular truncation of one operator ``D - lambda``."""
    lam = RationalComplex.coerce(lam)
    cols = []
    rows = N
    for c in range(1, N + 1):
        col = dict(op.column(c))
        col[c] = col.get(c, RationalComplex(0)) - lam
        col = {r: v for r, v in col.items() if v}
        if col:
            rows = max(rows, max(col))
        cols.append(col)
    return TruncatedMatrix([rows], [N], cols)
