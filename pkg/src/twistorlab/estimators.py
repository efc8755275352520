"""Sampled linear-algebra solvers with a scikit-learn estimator interface.

Both estimators turn a functional linear condition on a finite-dimensional
parameter space into a stacked matrix evaluated at sample points and read
off its null space from the SVD.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_random_state

__all__ = ["InvariantSubspace", "TwistorRankProbe", "numerical_nullspace"]


def numerical_nullspace(A: np.ndarray, rtol: float = 1e-8, reference: float = 0.0):
    """``(rank, null basis, singular values)``.

    ``s <= rtol * max(s_max, reference)`` counts as zero; ``reference`` keeps
    rounding noise from being promoted to rank when ``A`` vanishes exactly.
    """
    P = A.shape[1]
    if A.size == 0:
        return 0, np.eye(P, dtype=complex), np.zeros(0)
    # only Vh is needed; it is square without full_matrices once rows >= P
    _, s, Vh = np.linalg.svd(A, full_matrices=A.shape[0] < P)
    cut = rtol * max(float(s[0]) if s.size else 0.0, reference)
    rank = int(np.sum(s > cut)) if cut > 0 else 0
    return rank, Vh[rank:].conj().T, s


class _NullspaceEstimator(TransformerMixin, BaseEstimator):
    def _parameter_dim(self) -> int:
        raise NotImplementedError

    def _space(self):
        raise NotImplementedError

    def _rows(self, y) -> np.ndarray:
        raise NotImplementedError

    def _reference(self, pts) -> float:
        return 0.0

    def _points(self, X):
        if X is not None:
            return check_array(X, ensure_min_samples=1)
        rng = check_random_state(self.random_state)
        count = max(2 * self._parameter_dim(), 1) + self.n_extra
        return self._space().sample_points(rng, count, self.scale)

    def fit(self, X=None, y=None):
        """Fit on sample points ``X`` (rows); sampled from the space when omitted.

        The last ``n_extra`` points only confirm that the rank is stable.
        """
        pts = self._points(X)
        if len(pts) <= self.n_extra:
            raise ValueError(f"need more than n_extra={self.n_extra} points, got {len(pts)}")
        blocks = [self._rows(p) for p in pts]
        P = self._parameter_dim()
        head = np.vstack(blocks[: len(pts) - self.n_extra]) if blocks else np.zeros((0, P))
        full = np.vstack(blocks) if blocks else np.zeros((0, P))
        ref = self._reference(pts)
        rank_head, _, _ = numerical_nullspace(head, self.rtol, ref)
        rank, basis, s = numerical_nullspace(full, self.rtol, ref)
        self.points_ = pts
        self.singular_values_ = s
        self.rank_ = rank
        self.rank_stable_ = rank == rank_head
        self.basis_ = basis
        self.dimension_ = P - rank
        self.n_features_in_ = pts.shape[1]
        return self

    def transform(self, X):
        """Coordinates of parameter vectors (rows) in the fitted null-space basis."""
        check_is_fitted(self, "basis_")
        X = np.atleast_2d(np.asarray(X, dtype=complex))
        if X.shape[1] != self.basis_.shape[0]:
            raise ValueError(f"expected parameter vectors of length {self.basis_.shape[0]}")
        return X @ self.basis_.conj()

    def inverse_transform(self, Z):
        check_is_fitted(self, "basis_")
        return np.atleast_2d(np.asarray(Z, dtype=complex)) @ self.basis_.T


class InvariantSubspace(_NullspaceEstimator):
    """Parameters ``c`` with ``M(gamma y) c = L_gamma M(y) c`` for every generator.

    Parameters
    ----------
    family : SolutionFamily
    generators : sequence of GroupGenerator (signed lifts)
    rtol : relative singular-value threshold
    n_extra : extra points used for the rank-stability check
    random_state : seed for point sampling
    scale : spread of sampled points
    """

    def __init__(self, family=None, generators=(), rtol=1e-8, n_extra=5, random_state=0, scale=1.0):
        self.family = family
        self.generators = generators
        self.rtol = rtol
        self.n_extra = n_extra
        self.random_state = random_state
        self.scale = scale

    def _parameter_dim(self):
        return self.family.dimension

    def _space(self):
        return self.family.space

    def _rows(self, y):
        M = self.family.evaluate(y)
        rows = [self.family.evaluate(g(y)) - g.lift @ M for g in self.generators]
        if not rows:
            return np.zeros((0, self.family.dimension), dtype=complex)
        return np.vstack(rows)

    def _reference(self, pts):
        # spectral norm of the sampled family: the natural scale of the condition
        return float(np.linalg.norm(np.vstack([self.family.evaluate(p) for p in pts]), 2))

    def fit(self, X=None, y=None):
        if self.family is None:
            raise ValueError("family is required")
        return super().fit(X, y)


class TwistorRankProbe(_NullspaceEstimator):
    """Twistor solutions inside a linear ansatz, found from sampled residuals.

    The default ansatz is ``w_0 + sum_a y^a w_a`` with every ``w`` free.
    """

    def __init__(self, space=None, ansatz=None, rtol=1e-8, n_extra=5, random_state=0, scale=1.0):
        self.space = space
        self.ansatz = ansatz
        self.rtol = rtol
        self.n_extra = n_extra
        self.random_state = random_state
        self.scale = scale

    def _family(self):
        from .solutions import affine_ansatz

        if self.ansatz is None:
            self.ansatz_ = affine_ansatz(self.space)
        else:
            self.ansatz_ = self.ansatz
        return self.ansatz_

    def _parameter_dim(self):
        return self.ansatz_.dimension

    def _space(self):
        return self.space

    def _rows(self, y):
        from .spinops import twistor_residual

        res = twistor_residual(self.space, self.ansatz_.as_field(), y).residuals
        return res.reshape(-1, self.ansatz_.dimension)

    def fit(self, X=None, y=None):
        if self.space is None:
            raise ValueError("space is required")
        self._family()
        return super().fit(X, y)
