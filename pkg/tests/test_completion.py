import itertools

import pytest

import battery as B
from fredblock.blockmodel import adjoint_model, reverse_model
from fredblock.characterization import Theorem, check, profile_of
from fredblock.completion import (
    DEFAULT_SCHEDULE, TARGETS, certify, complete, complete_fredholm, complete_left_weyl_chain,
    complete_left_weyl_separable, complete_right_dual, dual_diag, prediction_from_json,
)
from fredblock.exceptions import PreconditionFailed, Unsupported
from fredblock.extarith import INF
from fredblock.opmodel import Adjoint, BackwardShift, DirectSum, ForwardShift, Spread, ZeroOp

S2 = Spread(2)


def pairs(plan, N=8):
    return {key: plan.model.pairs_from(bmap, N) for key, bmap in plan.model.maps}


def test_case1_row_interleave():
    plan = complete_left_weyl_separable((S2, BackwardShift(1)), 0)
    assert plan.strategy == "RowInterleave(1)"
    # A_12 e_s = f_{2s}, f enumerating the odd coordinates
    assert pairs(plan, 4) == {(1, 2): [(1, 3), (2, 7), (3, 11), (4, 15)]}
    assert (plan.predicted.alpha, plan.predicted.beta) == (0, INF)


def test_trivial_zero():
    plan = complete_left_weyl_separable((ForwardShift(1), ForwardShift(1)), 0)
    assert plan.strategy == "TrivialZero" and plan.model.maps == ()
    assert (plan.predicted.alpha, plan.predicted.beta) == (0, 2)


def test_case2_row_interleave():
    plan = complete_left_weyl_separable((ForwardShift(1), S2, BackwardShift(1)), 0)
    assert plan.strategy == "RowInterleave(2)"
    assert list(pairs(plan)) == [(2, 3)]
    assert pairs(plan, 3)[(2, 3)] == [(1, 5), (2, 11), (3, 17)]


def test_chain_examples():
    plan = complete_left_weyl_chain((ForwardShift(1), S2), 0)
    assert plan.model.maps == ()
    plan = complete_left_weyl_chain((ForwardShift(2), DirectSum(BackwardShift(1), S2)), 0)
    assert pairs(plan) == {(1, 2): [(1, 1)]}
    plan = complete_left_weyl_chain((ForwardShift(1), BackwardShift(1), S2), 0)
    assert pairs(plan) == {(1, 2): [(1, 1)]}
    assert plan.predicted.alpha == 0


def test_fredholm_examples():
    plan = complete_fredholm((S2, Adjoint(S2)), 0)
    assert plan.strategy == "FredholmPairing"
    assert pairs(plan, 8)[(1, 2)] == [(1, 1), (3, 3), (5, 5), (7, 7)]
    with pytest.raises(PreconditionFailed) as exc:
        complete_fredholm((ForwardShift(1), ZeroOp()), 0)
    assert exc.value.clause == "(iii)(a) failed: D_n in Phi-"


def test_precondition_clause():
    with pytest.raises(PreconditionFailed) as exc:
        complete((ForwardShift(1), B.HARMONIC), 0, "left-weyl")
    assert exc.value.clause == "(iii)(b) failed: R(D_n) is closed"


def test_unsupported_alignment():
    with pytest.raises(Unsupported):
        complete((S2, BackwardShift(1)), B.Q("1/2"), "left-weyl")


def test_unknown_target():
    with pytest.raises(ValueError):
        complete((S2, S2), 0, "sideways")


@pytest.mark.parametrize("idx", range(len(B.WITNESSES)))
def test_witness_certifies(idx):
    label, diag, lam, target, chain, expected = B.WITNESSES[idx]
    plan = complete(diag, lam, target, chain=chain)
    assert plan.strategy.startswith(expected), label
    res = certify(plan.model, plan.predicted, DEFAULT_SCHEDULE)
    assert res["agrees"], res
    # a successful construction never contradicts the necessary condition
    assert check(profile_of(diag, lam), plan.theorem).condition_iii
    assert prediction_from_json(plan.predicted.to_json()) == plan.predicted


def test_right_dual_round_trip():
    diag = (S2, BackwardShift(1))
    left = complete(diag, 0, "left-weyl")
    right = complete_right_dual(dual_diag(diag), 0, "right-weyl")
    back = reverse_model(adjoint_model(right.model))
    assert back.diag == left.model.diag
    assert {k: back.pairs_from(b, 10) for k, b in back.maps} == pairs(left, 10)


def test_predictions_swap_on_dual():
    diag = (S2, BackwardShift(1))
    left = complete(diag, 0, "left-fredholm")
    right = complete(dual_diag(diag), 0, "right-fredholm")
    assert right.predicted == left.predicted.swapped()


def test_success_implies_condition_iii_on_battery():
    seen = 0
    for (pair, lam), target, chain in itertools.product(B.n2_battery(), TARGETS, (False, True)):
        try:
            plan = complete(pair, lam, target, chain=chain)
        except (PreconditionFailed, Unsupported):
            continue
        seen += 1
        assert check(profile_of(pair, lam), plan.theorem).condition_iii
    assert seen > 100
