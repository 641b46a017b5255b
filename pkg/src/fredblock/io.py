"""Reading the JSON documents accepted by the command line."""

from __future__ import annotations

import json
from typing import Tuple

from ._validation import check_diag, check_operator
from .blockmodel import SCHEMA, BlockModel, model_from_json
from .exceptions import SchemaError
from .opmodel import Operator, op_to_json


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _schema_ok(doc) -> None:
    if isinstance(doc, dict) and doc.get("schema", SCHEMA) != SCHEMA:
        raise SchemaError(f"unsupported schema {doc.get('schema')!r}")


def load_operator(path: str) -> Operator:
    """A bare operator object, or ``{"schema": ..., "op": {...}}``."""
    doc = load_json(path)
    _schema_ok(doc)
    if isinstance(doc, dict) and "op" in doc:
        doc = doc["op"]
    return check_operator(doc)


def load_tuple(path: str) -> Tuple[Operator, ...]:
    """``{"diag": [...]}`` (a model file also works) or a bare list of operators."""
    doc = load_json(path)
    _schema_ok(doc)
    return check_diag(doc)


def load_model(path: str) -> BlockModel:
    return model_from_json(load_json(path))


def tuple_document(diag) -> dict:
    return {"schema": SCHEMA, "diag": [op_to_json(d) for d in diag]}


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
