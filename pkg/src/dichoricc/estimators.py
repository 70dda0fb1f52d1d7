"""scikit-learn style wrappers around the functional core.

``fit`` takes a :class:`HamiltonianSystem` or an ``(A, B, C)`` triple (the
projector takes any square matrix). Fitted attributes end in ``_``.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .certify import dichotomy_gap
from .dichotomy import compute_projections, verify_decomposition
from .operator_model import HamiltonianSystem
from .riccati import riccati_residual, solve
from .validation import DEFAULT_TOLERANCES, check_square


def as_system(X, tol_herm=DEFAULT_TOLERANCES["tol_herm"]):
    if isinstance(X, HamiltonianSystem):
        return X
    try:
        A, B, C = X
    except (TypeError, ValueError) as exc:
        raise TypeError("expected a HamiltonianSystem or an (A, B, C) triple") from exc
    return HamiltonianSystem(A, B, C, tol_herm=tol_herm)


class RiccatiSolver(BaseEstimator):
    """Nonnegative and nonpositive solutions of ``A*X + XA + XBX - C = 0``.

    Parameters
    ----------
    method : {"quadrature", "sign_newton", "eigen_order"}
    tol_herm, tol_psd, tol_graph : float
        Tolerances for Hermiticity, sign and the graph rank decision.
    quad_tol : float
        Quadrature tolerance for the projection integral.

    Attributes
    ----------
    X_plus_, X_minus_ : ndarray or None
        ``None`` when the corresponding subspace is not a graph.
    result_ : SolveResult
    failures_ : dict
        ``{"plus"|"minus": error}`` for sides that could not be extracted.
    """

    def __init__(self, method="quadrature", tol_herm=1e-10, tol_psd=1e-10, tol_graph=1e-8,
                 quad_tol=1e-10):
        self.method = method
        self.tol_herm = tol_herm
        self.tol_psd = tol_psd
        self.tol_graph = tol_graph
        self.quad_tol = quad_tol

    def _tolerances(self):
        return {"tol_herm": self.tol_herm, "tol_psd": self.tol_psd, "tol_graph": self.tol_graph,
                "quad_tol": self.quad_tol / 100}

    def fit(self, X, y=None):
        sys = as_system(X, self.tol_herm)
        res = solve(sys, self.method, self._tolerances())
        self.system_ = sys
        self.result_ = res
        self.certificate_ = res.cert
        self.failures_ = dict(res.failures)
        self.X_plus_ = None if res.X_plus is None else res.X_plus.X
        self.X_minus_ = None if res.X_minus is None else res.X_minus.X
        return self

    def predict(self, U):
        """Apply ``X_plus_`` to the rows of ``U``."""
        check_is_fitted(self, "result_")
        if self.X_plus_ is None:
            raise ValueError("X_plus is not available for this system")
        U = np.atleast_2d(np.asarray(U, dtype=complex))
        return U @ self.X_plus_.T

    def score(self, X=None, y=None):
        """Negative relative residual of ``X_plus_`` (on ``X`` if given)."""
        check_is_fitted(self, "result_")
        sys = self.system_ if X is None else as_system(X, self.tol_herm)
        if self.X_plus_ is None:
            return -np.inf
        return -riccati_residual(sys, self.X_plus_)["rel"]


class SpectralProjector(TransformerMixin, BaseEstimator):
    """Spectral projection onto the invariant subspace of ``Re lambda > 0``.

    ``transform`` maps row vectors ``u`` to ``P_plus u``.
    """

    def __init__(self, method="quadrature", tol=1e-10):
        self.method = method
        self.tol = tol

    def fit(self, X, y=None):
        T = X.T if isinstance(X, HamiltonianSystem) else check_square(X, "T")
        cert = dichotomy_gap(T)
        self.projections_ = compute_projections(T, self.method, cert, self.tol)
        self.certificate_ = cert
        self.P_plus_ = self.projections_.P_plus
        self.P_minus_ = self.projections_.P_minus
        self.decomposition_ = verify_decomposition(T, self.projections_)
        self.n_features_in_ = T.shape[0]
        return self

    def transform(self, U):
        check_is_fitted(self, "projections_")
        U = np.atleast_2d(np.asarray(U, dtype=complex))
        if U.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {U.shape[1]}")
        return U @ self.P_plus_.T
