import random

import pytest
from hypothesis import given, settings, strategies as st

import battery as B
from fredblock.characterization import (
    EXISTS, NONE, UNDECIDED, Theorem, Theorem2, check, check_n2_equiv, check_tuple, dual_profile, profile_of,
)
from fredblock.deltasets import NA, Target, memberships_from_profile
from fredblock.extarith import INF
from fredblock.opmodel import Adjoint, FredholmData as FD, ForwardShift, Spread

profiles = st.integers(0, 2**32 - 1).map(lambda s: B.random_profile(random.Random(s)))

PAIRED = {
    Target.AW_sep: Theorem.LeftWeylSep, Target.SFplus_sep: Theorem.LeftFredSep,
    Target.SW_sep: Theorem.RightWeylSep, Target.SFminus_sep: Theorem.RightFredSep, Target.E_sep: Theorem.FredSep,
    Target.AW_gen: Theorem.LeftWeylChain, Target.SFplus_gen: Theorem.LeftFredChain,
    Target.SW_gen: Theorem.RightWeylChain, Target.SFminus_gen: Theorem.RightFredChain,
    Target.E_gen: Theorem.FredNecessary,
}


def test_shift_spread_left_weyl():
    v = check((FD(0, 1, True), FD(0, INF, True)), Theorem.LeftWeylSep)
    assert v.condition_i and v.condition_iii and v.status == EXISTS


def test_harmonic_pair_fails_closedness():
    v = check_tuple((ForwardShift(1), B.HARMONIC), 0, Theorem.LeftWeylSep)
    assert (v.condition_i, v.condition_iii, v.status) == (False, False, NONE)
    assert v.witness_clause == "(iii)(b) failed: R(D_n) is closed"


def test_three_block_undecided():
    v = check((FD(0, INF, True), FD(INF, INF, True), FD(0, 0, True)), Theorem.LeftWeylSep)
    assert v.condition_iii
    assert v.condition_i  # R(D_2) is closed here, so beta(D_1) = inf suffices
    v2 = check((FD(0, INF, True), FD(INF, INF, False), FD(0, 0, True)), Theorem.LeftWeylSep)
    assert v2.condition_iii and not v2.condition_i and v2.status == UNDECIDED


def test_fred_necessary_never_sufficient():
    v = check((FD(0, 0, True), FD(0, 0, True)), Theorem.FredNecessary)
    assert not v.condition_i and v.condition_iii and v.status == UNDECIDED


@pytest.mark.parametrize("profile,theorem,expected", [
    ((FD(0, INF, True), FD(INF, 0, True)), Theorem2.Fred2, True),
    ((FD(0, 1, True), FD(0, INF, False)), Theorem2.LeftWeyl2, False),
] + [((FD(0, 0, True), FD(0, 0, True)), t, True) for t in Theorem2])
def test_n2_examples(profile, theorem, expected):
    assert check_n2_equiv(profile, theorem) is expected


def test_n2_spread_pair_from_operators():
    assert check_n2_equiv(profile_of((Spread(2), Adjoint(Spread(2))), 0), Theorem2.Fred2)


def test_n2_needs_two():
    with pytest.raises(ValueError):
        check_n2_equiv((FD(0, 0, True),) * 3, Theorem2.Fred2)


@settings(max_examples=400, deadline=None)
@given(profiles)
def test_sufficient_implies_necessary(profile):
    for th in Theorem:
        v = check(profile, th)
        assert not v.condition_i or v.condition_iii


@settings(max_examples=400, deadline=None)
@given(profiles)
def test_right_is_left_of_dual(profile):
    for right, left in [(Theorem.RightWeylSep, Theorem.LeftWeylSep), (Theorem.RightFredSep, Theorem.LeftFredSep),
                        (Theorem.RightWeylChain, Theorem.LeftWeylChain),
                        (Theorem.RightFredChain, Theorem.LeftFredChain)]:
        a, b = check(profile, right), check(dual_profile(profile), left)
        assert (a.condition_i, a.condition_iii) == (b.condition_i, b.condition_iii)


@settings(max_examples=400, deadline=None)
@given(profiles)
def test_bounds_match_conditions(profile):
    # lower bound = "no completion can exist"; outside the upper bound a completion is certain
    for target, th in PAIRED.items():
        m = memberships_from_profile(profile, target)
        v = check(profile, th)
        assert m.lower_bound_member == (not v.condition_iii)
        if m.upper_bound_member is not NA:
            assert m.upper_bound_member or v.condition_i


@settings(max_examples=400, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_n2_sep_equivalence(seed):
    profile = B.random_profile(random.Random(seed), 2, 2)
    for th2, th in [(Theorem2.LeftWeyl2, Theorem.LeftWeylSep), (Theorem2.RightWeyl2, Theorem.RightWeylSep),
                    (Theorem2.LeftFred2, Theorem.LeftFredSep), (Theorem2.RightFred2, Theorem.RightFredSep),
                    (Theorem2.Fred2, Theorem.FredSep)]:
        v = check(profile, th)
        assert v.condition_i == v.condition_iii == check_n2_equiv(profile, th2)
