import random

import pytest
from hypothesis import given, settings, strategies as st

import battery as B
from fredblock.classify import classify, spectra_membership, spectra_of
from fredblock.exceptions import KatoViolation
from fredblock.extarith import INF, UNDEFINED
from fredblock.opmodel import Adjoint, FredholmData, ForwardShift, IdentityOp


def test_forward_shift_class():
    c = classify(FredholmData(0, 1, True))
    assert (c.in_phi_plus, c.in_phi_minus, c.in_phi, c.in_left_weyl, c.in_right_weyl, c.index) == (
        True, True, True, True, False, -1)


def test_zero_class():
    c = classify(FredholmData(INF, INF, True))
    assert not any((c.in_phi_plus, c.in_phi_minus, c.in_phi, c.in_left_weyl, c.in_right_weyl))
    assert c.index is UNDEFINED


def test_mirror_class():
    c = classify(FredholmData(1, 0, True))
    assert (c.in_phi_plus, c.in_phi_minus, c.in_left_weyl, c.in_right_weyl) == (True, True, False, True)


def test_kato_violation():
    with pytest.raises(KatoViolation):
        classify(FredholmData(0, 3, False))


@pytest.mark.parametrize("op,lam,expected", [
    (ForwardShift(1), 0, dict(sigma_sf_plus=False, sigma_sf_minus=False, sigma_e=False, sigma_aw=False, sigma_sw=True)),
    (IdentityOp(), 1, dict(sigma_sf_plus=True, sigma_sf_minus=True, sigma_e=True, sigma_aw=True, sigma_sw=True)),
    (B.HARMONIC, 0, dict(sigma_sf_plus=True, sigma_sf_minus=True, sigma_e=True, sigma_aw=True, sigma_sw=True)),
])
def test_spectra_examples(op, lam, expected):
    assert spectra_membership(op, lam).to_json() == expected


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_inclusions_and_duality(seed):
    rng = random.Random(seed)
    op = B.random_expression(rng)
    lam = B.random_lambda(rng, op)
    s = spectra_membership(op, lam)
    assert s.essential >= s.sf_plus and s.essential >= s.sf_minus
    assert s.left_weyl >= s.sf_plus and s.right_weyl >= s.sf_minus
    d = spectra_membership(Adjoint(op), lam.conjugate())
    assert s.sf_plus == d.sf_minus and s.left_weyl == d.right_weyl
    assert s.essential == d.essential
