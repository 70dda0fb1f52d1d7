import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from dichoricc.estimators import RiccatiSolver, SpectralProjector
from dichoricc.operator_model import HamiltonianSystem


def test_solver_scalar():
    est = RiccatiSolver().fit(([[1.0]], [[1.0]], [[3.0]]))
    assert est.X_plus_[0, 0] == pytest.approx(1.0)
    assert est.X_minus_[0, 0] == pytest.approx(-3.0)
    assert est.score() >= -1e-12
    np.testing.assert_allclose(est.predict([[2.0]]), [[2.0]])


def test_solver_failures_and_params():
    est = RiccatiSolver(method="eigen_order").fit(HamiltonianSystem([[1.0]], [[0.0]], [[3.0]]))
    assert est.X_minus_ is None and "minus" in est.failures_
    assert clone(est).get_params()["method"] == "eigen_order"
    with pytest.raises(NotFittedError):
        RiccatiSolver().predict([[1.0]])


def test_projector(T_pm2):
    pr = SpectralProjector(method="sign_newton").fit(T_pm2)
    np.testing.assert_allclose(pr.P_plus_, [[0.75, 0.25], [0.75, 0.25]], atol=1e-12)
    np.testing.assert_allclose(pr.transform([[1.0, 1.0]]), [[1.0, 1.0]], atol=1e-12)
    # fit_transform maps the rows of T through P+
    np.testing.assert_allclose(pr.fit_transform(T_pm2), T_pm2 @ pr.P_plus_.T, atol=1e-12)
    with pytest.raises(ValueError):
        pr.transform([[1.0, 2.0, 3.0]])
