"""Membership in the semi-Fredholm and Weyl classes, and in the five spectra.

Convention: the operator examined at ``lambda`` is ``D - lambda``.  The usual
definitions use ``lambda - D``; both have the same nullity, deficiency and
range, so every verdict here is identical under either convention.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exceptions import KatoViolation
from .extarith import INF, UNDEFINED, ExtInt, ext_index, render
from .opmodel import FredholmData, Operator, Scalar, fredholm_data


@dataclass(frozen=True)
class FredholmClass:
    in_phi_plus: bool
    in_phi_minus: bool
    in_phi: bool
    in_left_weyl: bool
    in_right_weyl: bool
    index: ExtInt

    def to_json(self) -> dict:
        return {
            "in_phi_plus": self.in_phi_plus,
            "in_phi_minus": self.in_phi_minus,
            "in_phi": self.in_phi,
            "in_left_weyl": self.in_left_weyl,
            "in_right_weyl": self.in_right_weyl,
            "index": render(self.index),
        }


@dataclass(frozen=True)
class SpectraMembership:
    """``True`` means ``lambda`` belongs to that spectrum."""

    sf_plus: bool
    sf_minus: bool
    essential: bool
    left_weyl: bool
    right_weyl: bool

    def to_json(self) -> dict:
        return {
            "sigma_sf_plus": self.sf_plus,
            "sigma_sf_minus": self.sf_minus,
            "sigma_e": self.essential,
            "sigma_aw": self.left_weyl,
            "sigma_sw": self.right_weyl,
        }


def classify(data: FredholmData) -> FredholmClass:
    if not data.is_consistent():
        raise KatoViolation(f"finite deficiency with non-closed range: {data}")
    alpha, beta = data.alpha, data.beta
    plus = alpha != INF and data.range_closed
    minus = beta != INF
    index = ext_index(alpha, beta)
    # index is UNDEFINED only when both are infinite, and then neither class applies
    left = plus and (beta == INF or index <= 0)
    right = minus and (alpha == INF or index >= 0)
    return FredholmClass(plus, minus, plus and minus, left, right, index)


def spectra_of(data: FredholmData) -> SpectraMembership:
    c = classify(data)
    return SpectraMembership(
        not c.in_phi_plus, not c.in_phi_minus, not c.in_phi, not c.in_left_weyl, not c.in_right_weyl
    )


def spectra_membership(op: Operator, lam: Scalar) -> SpectraMembership:
    return spectra_of(fredholm_data(op, lam))


__all__ = ["FredholmClass", "SpectraMembership", "classify", "spectra_of", "spectra_membership", "UNDEFINED"]
