"""Exact Fredholm and Weyl analysis of upper triangular block operator matrices."""

__version__ = "0.1.0"

from .blockmodel import BasisMap, BlockModel, Enum, Rule, adjoint_model, assemble_truncation, model_from_json
from .characterization import EXISTS, NONE, UNDECIDED, Theorem, Theorem2, Verdict, check, check_n2_equiv, check_tuple, profile_of
from .classify import FredholmClass, SpectraMembership, classify, spectra_membership, spectra_of
from .completion import CompletionPlan, Prediction, certify, complete
from .deltasets import Grid, Target, Target2, delta_memberships, legacy_diff, n2_exact_membership, region_scan, sandwich_violations
from .exceptions import FredblockError, KatoViolation, PreconditionFailed, ResourceCap, SchemaError, Unsupported
from .extarith import INF, UNDEFINED
from .opmodel import (Adjoint, BackwardShift, ConstantTail, ConvergentTail, Diagonal, DirectSum, FredholmData,
                      ForwardShift, IdentityOp, RationalComplex, SequenceSpec, Spread, ZeroOp, adjoint_op,
                      fredholm_data, op_from_json, op_to_json)
from .oracle import exact_rank, near_nullity, rank_reports, stabilized_alpha, stabilized_beta

import types as _types

__all__ = sorted(name for name, obj in globals().items()
                 if not name.startswith("_") and not isinstance(obj, _types.ModuleType))
