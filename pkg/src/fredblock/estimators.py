"""scikit-learn style wrappers.

``fit`` takes the diagonal tuple; the spectral parameter plays the role of the
samples.  Nothing is learned in the statistical sense, the wrappers only give
the usual ``get_params``/``set_params``/``fit``/``transform`` shape so the
tools drop into existing pipelines and grid searches.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from ._validation import check_diag, check_lambda, check_lambdas, check_schedule
from .characterization import Theorem, check, profile_of
from .completion import DEFAULT_SCHEDULE, TARGETS, certify, complete
from .deltasets import NA, Target, delta_memberships


class _Fitted:
    def _require_fit(self):
        if not hasattr(self, "diag_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet; call fit first")


class DeltaSetScanner(_Fitted, TransformerMixin, BaseEstimator):
    """Delta-set memberships of ``lambda`` values for a fixed diagonal tuple.

    ``transform`` returns an integer array with one row per ``lambda`` and the
    columns ``lower, upper, legacy``; ``upper`` is -1 where it is not defined.
    ``predict`` returns the lower-bound membership as booleans.
    """

    def __init__(self, target="AW_sep"):
        self.target = target

    def fit(self, X, y=None):
        self.diag_ = check_diag(X)
        self.target_ = Target(self.target)
        self.n_ = len(self.diag_)
        return self

    def memberships(self, lambdas):
        self._require_fit()
        return [delta_memberships(self.diag_, lam, self.target_) for lam in check_lambdas(lambdas)]

    def transform(self, X):
        rows = []
        for m in self.memberships(X):
            upper = -1 if m.upper_bound_member == NA else int(m.upper_bound_member)
            rows.append((int(m.lower_bound_member), upper, int(m.legacy_member)))
        return np.asarray(rows, dtype=np.int8).reshape(-1, 3)

    def predict(self, X):
        return self.transform(X)[:, 0].astype(bool)


class TheoremChecker(_Fitted, BaseEstimator):
    """Theorem statuses (EXISTS / NONE / UNDECIDED BY THEOREM) over lambda values."""

    def __init__(self, theorem="LeftWeylSep"):
        self.theorem = theorem

    def fit(self, X, y=None):
        self.diag_ = check_diag(X)
        self.theorem_ = Theorem(self.theorem)
        return self

    def verdicts(self, lambdas):
        self._require_fit()
        return [check(profile_of(self.diag_, lam), self.theorem_) for lam in check_lambdas(lambdas)]

    def predict(self, X):
        return np.asarray([v.status for v in self.verdicts(X)], dtype=object)


class CompletionSolver(_Fitted, BaseEstimator):
    """Build a witness completion for one ``lambda`` and optionally certify it."""

    def __init__(self, target="left-weyl", chain=False, schedule=DEFAULT_SCHEDULE, n_jobs=None):
        self.target = target
        self.chain = chain
        self.schedule = schedule
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        """``X`` is the diagonal tuple, ``y`` the spectral parameter (default 0)."""
        if self.target not in TARGETS:
            raise ValueError(f"target must be one of {TARGETS}")
        self.diag_ = check_diag(X)
        self.lambda_ = check_lambda(0 if y is None else y)
        self.plan_ = complete(self.diag_, self.lambda_, self.target, chain=self.chain)
        self.model_ = self.plan_.model
        self.strategy_ = self.plan_.strategy
        return self

    def certify(self):
        self._require_fit()
        return certify(self.model_, self.plan_.predicted, check_schedule(self.schedule), n_jobs=self.n_jobs)

    def score(self, X=None, y=None):
        """1.0 when the exact truncations agree with the prediction, else 0.0."""
        return float(self.certify()["agrees"])
