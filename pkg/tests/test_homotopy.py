import csv

import numpy as np
import pytest

from dichoricc._errors import GapCollapse
from dichoricc.examples import gen_laplace_singular
from dichoricc.operator_model import HamiltonianSystem
from dichoricc.riccati import bound_L, solve
from dichoricc.homotopy import trace_homotopy, write_trace_csv


def x_of_r(r):
    return 3 * r / (1 + np.sqrt(1 + 3 * r * r))


def test_scalar_trace(scalar113):
    tr = trace_homotopy(scalar113, steps=4)
    assert set([0.0, 0.25, 0.5, 0.75, 1.0]) <= set(tr.r_grid)
    assert tr.max_step_defect <= 0.2
    np.testing.assert_allclose(tr.X_norms, x_of_r(np.array(tr.r_grid)), atol=1e-10)
    assert tr.X_norms[0] == pytest.approx(0.0, abs=1e-14) and tr.X_norms[-1] == pytest.approx(1.0)
    assert np.all(np.diff(tr.X_norms) > 0)
    assert tr.L == pytest.approx(bound_L([[1.0]], 0.0, 3.0).L)
    assert all(x <= tr.L for x in tr.X_norms)
    assert all(g > 0 for g in tr.gap_h)


def test_zero_offdiag():
    sys = HamiltonianSystem(np.diag([1.0, 2.0]), np.zeros((2, 2)), np.zeros((2, 2)))
    tr = trace_homotopy(sys, steps=4)
    assert tr.step_defects == [0.0] * 4
    assert tr.rounds == 0


def test_gap_collapse():
    # T_r = [[1, r], [-4r, -1]] has eigenvalues +-sqrt(1 - 4 r^2), on the axis for r >= 1/2
    sys = HamiltonianSystem([[1.0]], [[1.0]], [[-4.0]])
    with pytest.raises(GapCollapse):
        trace_homotopy(sys, steps=4)


def test_refinement_engages():
    sys, _ = gen_laplace_singular(16)
    coarse = trace_homotopy(sys, steps=1, refine_threshold=0.05)
    assert coarse.rounds >= 1 and coarse.max_step_defect <= 0.05
    assert all(np.diff(coarse.r_grid) > 0)


def test_laplace_trace_properties():
    sys, sp = gen_laplace_singular(32)
    tr = trace_homotopy(sys, steps=32, p=sp.expected_p)
    assert tr.max_step_defect < 0.2
    assert max(tr.X_norms) <= tr.L * (1 + 1e-6)
    assert tr.X_norms[0] == pytest.approx(0.0, abs=1e-12)
    assert np.linalg.norm(tr.X_final - solve(sys).X_plus.X, 2) <= 1e-8
    assert all(g > 0 for g in tr.gap_h)


def test_half_step_continuity():
    sys, _ = gen_laplace_singular(16)
    full = trace_homotopy(sys, steps=8, refine_threshold=10.0)
    half = trace_homotopy(sys, steps=16, refine_threshold=10.0)
    for k, d in enumerate(full.step_defects):
        assert half.step_defects[2 * k] <= d * 1.1
        assert half.step_defects[2 * k + 1] <= d * 1.1


def test_csv(tmp_path, scalar113):
    tr = trace_homotopy(scalar113, steps=2)
    path = tmp_path / "t.csv"
    write_trace_csv(tr, path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["r", "X_norm", "step_defect", "gap_h", "L_r"]
    assert len(rows) == len(tr.r_grid) + 1 and rows[1][2] == ""
    assert float(rows[-1][1]) == pytest.approx(1.0)
    assert float(rows[-1][4]) == pytest.approx(tr.L)


def test_thread_cap_does_not_change_results(monkeypatch, scalar113):
    monkeypatch.setenv("DICHORICC_THREADS", "1")
    a = trace_homotopy(scalar113, steps=4)
    monkeypatch.setenv("DICHORICC_THREADS", "4")
    b = trace_homotopy(scalar113, steps=4)
    assert a.X_norms == b.X_norms and a.step_defects == b.step_defects
