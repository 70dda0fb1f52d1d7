"""Acceptance suite: one function per criterion, each returning a
:class:`CriterionResult`. Shared by ``dichoricc selftest`` and the tests."""

import functools
import time
from dataclasses import dataclass

import numpy as np

from ._errors import DichoRiccError
from .certify import certify_bisectorial, dichotomy_gap, enclosure_region
from .dichotomy import METHODS, compute_projections, verify_decomposition
from .examples import (
    gen_block_antidiag,
    gen_laplace_singular,
    gen_nonnormal,
    random_dominant_system,
    random_kernel_instance,
)
from .homotopy import trace_homotopy
from .operator_model import HamiltonianSystem, split_diag_offdiag
from .riccati import bound_L, kernel_condition, solve, uniqueness_check, verify_krein
from .subordination import jensen_upper_bound
from .validation import norm2


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:02d} {self.name}: {self.detail} ({self.seconds:.2f} s)"


def _timed(number, name):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper():
            t0 = time.perf_counter()
            try:
                passed, detail = fn()
            except DichoRiccError as exc:
                passed, detail = False, f"{exc.code}: {exc}"
            return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - t0)
        wrapper.number = number
        return wrapper
    return deco


def scalar_system(a=1.0, b=1.0, c=3.0):
    return HamiltonianSystem([[a]], [[b]], [[c]])


@functools.lru_cache(maxsize=None)
def random_suite():
    """The 20 seeded random systems, sizes cycling through 4, 8, 16, 32."""
    return tuple(random_dominant_system((4, 8, 16, 32)[k % 4], seed=k) for k in range(20))


@functools.lru_cache(maxsize=None)
def example_suite():
    """Named test systems with their generator metadata (``None`` for the
    hand-written scalar ones)."""
    out = [("scalar(1,1,3)", scalar_system(), None), ("scalar(1,0,3)", scalar_system(b=0.0), None)]
    for n in (16, 32, 64):
        s, sp = gen_laplace_singular(n)
        out.append((f"E1 n={n}", s, sp))
    for n in (16, 32):
        s, sp = gen_nonnormal(n)
        out.append((f"E2 n={n}", s, sp))
    s, sp = gen_block_antidiag(8)
    out.append(("E3 n=8", s, sp))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def solved_suite():
    """``(label, system, method, SolveResult)`` for every test system and method."""
    systems = list(example_suite()) + [(f"random#{k}", s, None) for k, s in enumerate(random_suite())]
    out = []
    for label, sys, _ in systems:
        cert = dichotomy_gap(sys.T)
        for m in METHODS:
            out.append((label, sys, m, solve(sys, m, cert=cert)))
    return tuple(out)


def _l_bound(sys, p):
    c_C = jensen_upper_bound(sys.C, sys.A, p)[0]
    return bound_L(sys.A, p, c_C).L


def _probe_max(X, n_probe=1000, seed=0):
    rng = np.random.default_rng(seed)
    n = X.shape[0]
    V = rng.standard_normal((n, n_probe)) + 1j * rng.standard_normal((n, n_probe))
    V /= np.linalg.norm(V, axis=0)
    return float(np.max(np.real(np.einsum("ij,ij->j", V.conj(), X @ V))))


@_timed(1, "scalar closed form")
def criterion_01():
    sys = scalar_system()
    t0 = time.perf_counter()
    errs = []
    for m in METHODS:
        r = solve(sys, m)
        errs.append(max(abs(r.X_plus.X[0, 0] - 1.0), abs(r.X_minus.X[0, 0] + 3.0)))
    dt = time.perf_counter() - t0
    err = max(errs)
    return err <= 1e-10 and dt < 0.1, f"max |X - X_exact| = {err:.2e}, runtime {dt:.3f} s"


@_timed(2, "sign/quadrature/eigen agreement")
def criterion_02():
    t0 = time.perf_counter()
    worst = 0.0
    gaps_ok = True
    for sys in random_suite():
        cert = dichotomy_gap(sys.T)
        gaps_ok &= cert.gap_h >= 1e-3 * norm2(sys.T)
        Ps = [compute_projections(sys.T, m, cert).P_plus for m in METHODS]
        for i in range(3):
            for j in range(i):
                worst = max(worst, norm2(Ps[i] - Ps[j]))
    dt = time.perf_counter() - t0
    return (worst <= 1e-6 and gaps_ok and dt < 60,
            f"20 systems, max ||P_i - P_j|| = {worst:.2e}, gaps ok = {gaps_ok}, runtime {dt:.1f} s")


def _accepted():
    for label, sys, m, r in solved_suite():
        for g in (r.X_plus, r.X_minus):
            if g is not None:
                yield label, m, g


@_timed(3, "Riccati residual")
def criterion_03():
    worst, where, count = 0.0, "", 0
    for label, m, g in _accepted():
        count += 1
        if g.residual_rel > worst:
            worst, where = g.residual_rel, f"{label}/{m}/{g.which}"
    return worst <= 1e-8, f"{count} solutions, max residual_rel = {worst:.2e} ({where})"


@_timed(4, "structural invariants")
def criterion_04():
    herm = sign = 0.0
    for _, _, g in _accepted():
        scale = 1.0 + g.norm
        herm = max(herm, g.hermiticity_defect / scale)
        sign = max(sign, -g.min_eig_signed / scale)
    return (herm <= 1e-10 and sign <= 1e-10,
            f"max hermiticity defect / (1+||X||) = {herm:.2e}, max sign violation = {max(sign, 0):.2e}")


@_timed(5, "Krein certificates")
def criterion_05():
    neut, lo, ok_dim = 0.0, np.inf, True
    for label, sys, m, r in solved_suite():
        k = verify_krein(r.proj, n_probe=1000, seed=0)
        neut = max(neut, k.j1_neutrality_plus, k.j1_neutrality_minus)
        lo = min(lo, k.j2_min_plus, -k.j2_max_minus)
        ok_dim &= r.proj.V_plus.shape[1] == sys.n
    return (neut <= 1e-8 and ok_dim and lo >= -1e-8,
            f"max ||V*J1V|| = {neut:.2e}, dim V+ = n: {ok_dim}, min signed J2 probe = {lo:.2e}")


@_timed(6, "L-bound tightness and validity")
def criterion_06():
    L0 = bound_L([[1.0]], 0.0, 3.0).L
    X0 = solve(scalar_system(b=0.0)).X_plus.X[0, 0].real
    tight = abs(L0 - 1.5) <= 1e-8 and abs(X0 - 1.5) <= 1e-8
    ratios = []
    for gen in (gen_laplace_singular, gen_nonnormal):
        for n in (16, 32):
            sys, sp = gen(n)
            L = _l_bound(sys, sp.expected_p)
            X = solve(sys).X_plus.X
            ratios.append(_probe_max(X) / L)
    worst = max(ratios)
    return (tight and worst <= 1 + 1e-6,
            f"L = {L0:.12g}, X_plus(B=0) = {X0:.12g}, max probe/L on E1,E2 = {worst:.4f}")


@_timed(7, "uniqueness across methods")
def criterion_07():
    divs = []
    for gen in (gen_laplace_singular, gen_nonnormal):
        rep = uniqueness_check(gen(16)[0])
        divs.append(rep.max_solution_divergence if not rep.failures else np.inf)
    return max(divs) <= 1e-8, "divergence E1 = %.2e, E2 = %.2e" % tuple(divs)


@_timed(8, "homotopy")
def criterion_08():
    t0 = time.perf_counter()
    sys, sp = gen_laplace_singular(32)
    tr = trace_homotopy(sys, steps=32, refine_threshold=0.2, p=sp.expected_p)
    dt = time.perf_counter() - t0
    norms = np.array(tr.X_norms)
    bounded = bool(np.all(np.isfinite(norms)) and np.all(norms <= tr.L * (1 + 1e-6)))
    end = norm2(tr.X_final - solve(sys).X_plus.X)
    ok = bounded and tr.max_step_defect <= 0.2 and tr.rounds <= 2 and end <= 1e-8 and dt < 120
    return ok, (f"{len(tr.r_grid)} points, max ||X_r|| = {norms.max():.4g} <= L = {tr.L:.4g}: "
                f"{bounded}, max step defect {tr.max_step_defect:.3f}, rounds {tr.rounds}, "
                f"endpoint error {end:.1e}, runtime {dt:.1f} s")


@_timed(9, "spectral enclosure")
def criterion_09():
    parts = []
    ok = True
    for gen in (gen_laplace_singular, gen_nonnormal):
        sys, sp = gen(64)
        S = split_diag_offdiag(sys).S
        rep = enclosure_region(sys.T, dichotomy_gap(sys.T), certify_bisectorial(S), sp.expected_p, S)
        ok &= rep.ok
        parts.append(f"{sp.name}: ok={rep.ok} r'={rep.r_prime:.3g}")
    return ok, ", ".join(parts)


@_timed(10, "kernel-condition implications")
def criterion_10():
    bad = {"posdef": 0, "hautus": 0, "generic": 0}
    qualified = 0
    for kind in bad:
        for k in range(100):
            sys = random_kernel_instance(kind, 2 + k % 4, seed=k)
            rep = kernel_condition(sys)
            sv = np.linalg.svd(sys.B, compute_uv=False)
            # sigma_min(B) > 0 decided at the same relative rank threshold as K
            if sv[-1] > 1e-10 * sv[0] and not rep.holds:
                bad[kind] += 1
            if rep.hautus_witness is not None and rep.holds:
                bad[kind] += 1
            w, V = np.linalg.eig(sys.A)
            gaps = np.where(np.eye(w.size, dtype=bool), np.inf, np.abs(w[:, None] - w[None, :]))
            if gaps.min() > 1e-8 and np.linalg.cond(V) < 1e8:
                qualified += 1
                if rep.hautus_witness is None and not rep.holds:
                    bad[kind] += 1
    total = sum(bad.values())
    return total == 0, f"counterexamples {bad}, Hautus-pass checks on {qualified} diagonalizable A"


@_timed(11, "adjoint duality")
def criterion_11():
    worst = 0.0
    for _, sys, _, r in solved_suite():
        worst = max(worst, verify_decomposition(sys.T, r.proj).adjoint_duality_defect)
    return worst <= 1e-8, f"max ||P+(T*) - P+(T)*|| = {worst:.2e}"


@_timed(12, "refinement stability")
def criterion_12():
    ratios = []
    for n in (16, 32, 64):
        sys, sp = gen_laplace_singular(n)
        ratios.append(norm2(solve(sys).X_plus.X) / _l_bound(sys, sp.expected_p))
    return max(ratios) <= 1.05, "||X+|| / L for n = 16, 32, 64: " + ", ".join(f"{r:.4f}" for r in ratios)


CRITERIA = (criterion_01, criterion_02, criterion_03, criterion_04, criterion_05, criterion_06,
            criterion_07, criterion_08, criterion_09, criterion_10, criterion_11, criterion_12)


def run_all(only=None, echo=None):
    """Run the criteria (all, or the numbers in ``only``); ``echo`` receives
    each result line as soon as it is available."""
    results = []
    for fn in CRITERIA:
        if only and fn.number not in only:
            continue
        res = fn()
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results
