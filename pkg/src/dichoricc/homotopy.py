"""The family ``T_r = S + r R``, ``r in [0, 1]``, joining the block diagonal
part to the full Hamiltonian, with projections and solution norms along it."""

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._errors import GapCollapse, NotAGraph, RefinementLimit, SignMismatch, SpectrumOnAxis, WrongDimension
from .certify import dichotomy_gap
from .dichotomy import compute_projections
from .riccati import bound_L, extract_graph
from .subordination import jensen_upper_bound
from .validation import max_threads, norm2

MAX_POINTS = 2 ** 12


@dataclass
class HomotopyTrace:
    r_grid: list
    projections: list = field(repr=False)
    X_norms: list
    step_defects: list
    gap_h: list
    L: float
    L_r: list
    p: float
    c_C: float
    rounds: int
    failures: dict = field(default_factory=dict)
    X_final: np.ndarray = field(default=None, repr=False)

    @property
    def max_step_defect(self):
        return max(self.step_defects) if self.step_defects else 0.0


def _point(sys, r, method, t_max, tol):
    sr = sys.scaled(r)
    try:
        cert = dichotomy_gap(sr.T, t_max=t_max)
    except SpectrumOnAxis as exc:
        raise GapCollapse(f"T_r has spectrum on the imaginary axis at r = {r:.17g}", r=r) from exc
    proj = compute_projections(sr.T, method, cert, tol)
    try:
        g = extract_graph(proj.V_plus, "plus", sr)
        X, norm, fail = g.X, g.norm, None
    except (NotAGraph, WrongDimension, SignMismatch) as exc:
        X, norm, fail = None, float("nan"), exc.code
    return proj, cert.gap_h, X, norm, fail


def trace_homotopy(sys, steps=8, refine_threshold=0.2, p=0.0, method="quadrature", c_C=None,
                   tol=1e-10, max_points=MAX_POINTS):
    """Track ``P_r``, ``||X_r||`` and the gap on a uniform grid of ``steps``
    intervals, bisecting every interval whose projection jump exceeds
    ``refine_threshold`` until none does.

    ``L`` is ``bound_L(A, p, c_C)`` with ``c_C`` defaulting to the Jensen
    bound of ``C`` relative to ``A``; ``L_r = r L`` since ``c_{rC} = r c_C``.

    Raises
    ------
    GapCollapse
        Some ``T_r`` has an eigenvalue on the imaginary axis.
    RefinementLimit
        More than ``max_points`` grid points would be needed.
    """
    steps = int(steps)
    if steps < 1:
        raise ValueError("steps must be positive")
    try:
        t_max = dichotomy_gap(sys.T).t_max
    except SpectrumOnAxis as exc:
        raise GapCollapse("T has spectrum on the imaginary axis at r = 1", r=1.0) from exc
    cache = {}

    def evaluate(rs):
        todo = [r for r in rs if r not in cache]
        workers = max(1, min(len(todo), max_threads()))
        with ThreadPoolExecutor(max_workers=workers) as ex:
            for r, res in zip(todo, ex.map(lambda r: _point(sys, r, method, t_max, tol), todo)):
                cache[r] = res

    grid = list(np.linspace(0.0, 1.0, steps + 1))
    evaluate(grid)
    rounds = 0
    while True:
        defects = [norm2(cache[b][0].P_plus - cache[a][0].P_plus) for a, b in zip(grid[:-1], grid[1:])]
        bad = [k for k, d in enumerate(defects) if d > refine_threshold]
        if not bad:
            break
        if len(grid) + len(bad) > max_points:
            raise RefinementLimit(f"refinement needs more than {max_points} grid points",
                                  points=len(grid) + len(bad))
        mids = [(grid[k] + grid[k + 1]) / 2 for k in bad]
        evaluate(mids)
        grid = sorted(grid + mids)
        rounds += 1

    if c_C is None:
        c_C = jensen_upper_bound(sys.C, sys.A, p)[0] if norm2(sys.C) > 0 else 0.0
    L = bound_L(sys.A, p, c_C).L
    failures = {r: cache[r][4] for r in grid if cache[r][4] is not None}
    return HomotopyTrace(
        r_grid=[float(r) for r in grid],
        projections=[cache[r][0] for r in grid],
        X_norms=[cache[r][3] for r in grid],
        step_defects=defects,
        gap_h=[cache[r][1] for r in grid],
        L=float(L),
        L_r=[float(r) * L for r in grid],
        p=float(p),
        c_C=float(c_C),
        rounds=rounds,
        failures=failures,
        X_final=cache[grid[-1]][2],
    )


def write_trace_csv(trace, path):
    """Columns ``r, X_norm, step_defect, gap_h, L_r``; ``step_defect`` is the
    jump from the previous grid point (empty in the first row)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "X_norm", "step_defect", "gap_h", "L_r"])
        for k, r in enumerate(trace.r_grid):
            d = "" if k == 0 else "%.17g" % trace.step_defects[k - 1]
            w.writerow(["%.17g" % r, "%.17g" % trace.X_norms[k], d, "%.17g" % trace.gap_h[k],
                        "%.17g" % trace.L_r[k]])
