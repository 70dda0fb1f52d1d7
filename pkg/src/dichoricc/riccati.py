"""Riccati solutions as graph representations of the spectral subspaces.

For a nonnegative Hamiltonian ``T = [[A, B], [C, -A*]]`` the invariant subspaces
``V+`` and ``V-`` are graphs ``{(u, X u)}`` of the nonnegative and nonpositive
solutions of ``A*X + XA + XBX - C = 0``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from ._errors import (
    AxisSpectrum,
    DichoRiccError,
    DivergentIntegral,
    NotAGraph,
    NotSectorial,
    SignMismatch,
    WrongDimension,
)
from .certify import dichotomy_gap
from .dichotomy import METHODS, compute_projections
from .operator_model import KreinSymmetry
from .validation import (
    DEFAULT_TOLERANCES,
    check_matrix,
    check_square,
    hermitian_part,
    max_threads,
    norm2,
)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class GraphSolution:
    """``X`` with ``V = G(X)`` (or ``V = G_inv(X)`` when ``inverse``).

    ``hermiticity_defect`` is measured before symmetrization; ``min_eig_signed``
    is ``lambda_min(X)`` for the nonnegative and ``-lambda_max(X)`` for the
    nonpositive solution, so both must be ``>= -tol``.
    """

    X: np.ndarray = field(repr=False)
    sign: str
    residual_abs: float
    residual_rel: float
    graph_condition: float
    hermiticity_defect: float
    min_eig_signed: float
    which: str = "plus"
    inverse: bool = False
    symmetrized: bool = True

    @property
    def norm(self):
        return norm2(self.X)


def riccati_residual(sys, X):
    """``abs = ||A*X + XA + XBX - C||`` and ``abs`` relative to the term sizes."""
    X = check_square(X, "X")
    A, B, C = sys.A, sys.B, sys.C
    if X.shape != A.shape:
        raise WrongDimension(f"X has shape {X.shape}, expected {A.shape}")
    terms = (A.conj().T @ X, X @ A, X @ B @ X, -C)
    res = sum(terms)
    ab = norm2(res)
    return {"abs": ab, "rel": ab / (sum(norm2(t) for t in terms) + _EPS)}


def dual_residual(sys, Y):
    """Residual of ``AY + YA* - YCY + B = 0``."""
    Y = check_square(Y, "Y")
    A, B, C = sys.A, sys.B, sys.C
    terms = (A @ Y, Y @ A.conj().T, -(Y @ C @ Y), B)
    res = sum(terms)
    ab = norm2(res)
    return {"abs": ab, "rel": ab / (sum(norm2(t) for t in terms) + _EPS)}


def graph_invariance_defect(sys, X):
    """``||T [I; X] - [I; X] (A + B X)||``, zero iff ``G(X)`` is T-invariant."""
    G = np.vstack([np.eye(sys.n), X])
    return norm2(sys.T @ G - G @ (sys.A + sys.B @ X))


def extract_graph(V, which="plus", system=None, tol_graph=DEFAULT_TOLERANCES["tol_graph"],
                  tol_herm=DEFAULT_TOLERANCES["tol_herm"], inverse=False):
    """Read off ``X`` from a basis ``V = [V1; V2]`` of an n-dimensional subspace.

    ``X = V2 V1^{-1}`` (``inverse=False``) or ``X = V1 V2^{-1}`` (``inverse=True``),
    computed through a QR factorization of the transposed block. Residuals
    are evaluated against ``system`` when given.

    Raises
    ------
    WrongDimension
        ``V`` does not have ``N/2`` columns.
    NotAGraph
        The orthonormalized block to invert has ``sigma_min <= tol_graph``.
    """
    V = check_matrix(V, "V")
    N, k = V.shape
    if N % 2 or k != N // 2:
        raise WrongDimension(f"subspace has dimension {k}, expected {N // 2}", dim=k, expected=N // 2)
    n = N // 2
    Q = np.linalg.qr(V)[0]
    top, bottom = Q[:n], Q[n:]
    if inverse:
        top, bottom = bottom, top
    cond = float(np.linalg.svd(top, compute_uv=False)[-1])
    if cond <= tol_graph:
        raise NotAGraph(f"{which} subspace is not a graph (sigma_min = {cond:.3e})",
                        which=which, graph_condition=cond)
    # X top = bottom  <=>  top^T X^T = bottom^T
    Qt, Rt = np.linalg.qr(top.T)
    X = sla.solve_triangular(Rt, Qt.conj().T @ bottom.T).T
    defect = norm2(X - X.conj().T)
    symmetrized = defect <= tol_herm * (1.0 + norm2(X))
    if symmetrized:
        X = hermitian_part(X)
    sign = "nonnegative" if which == "plus" else "nonpositive"
    lam = np.linalg.eigvalsh(hermitian_part(X))
    signed = float(lam[0]) if which == "plus" else float(-lam[-1])
    ra = rr = float("nan")
    if system is not None:
        res = dual_residual(system, X) if inverse else riccati_residual(system, X)
        ra, rr = res["abs"], res["rel"]
    return GraphSolution(X, sign, ra, rr, cond, defect, signed, which, inverse, symmetrized)


def _extract_pair(sys, proj, tol, inverse):
    out, failures = {}, {}
    for which, V in (("plus", proj.V_plus), ("minus", proj.V_minus)):
        try:
            g = extract_graph(V, which, sys, tol["tol_graph"], tol["tol_herm"], inverse)
            if g.min_eig_signed < -tol["tol_psd"] * (1.0 + g.norm):
                raise SignMismatch(f"X_{which} violates its sign (eigenvalue {g.min_eig_signed:.3e})",
                                   which=which, min_eig_signed=g.min_eig_signed)
            out[which] = g
        except (NotAGraph, WrongDimension, SignMismatch) as exc:
            out[which] = None
            failures[which] = exc
    return out, failures


@dataclass(frozen=True)
class SolveResult:
    X_plus: GraphSolution
    X_minus: GraphSolution
    proj: object = field(repr=False)
    cert: object
    method: str
    failures: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.failures


def _tolerances(tol):
    merged = dict(DEFAULT_TOLERANCES)
    merged.update(tol or {})
    return merged


def solve(sys, method="quadrature", tolerances=None, cert=None, proj=None):
    """Certify the gap, compute ``P+-`` by ``method`` and extract ``X+-``.

    Per-side hypothesis failures (``NotAGraph``, ``WrongDimension``,
    ``SignMismatch``) are collected in ``failures`` instead of raised, so that
    the other side is still reported.
    """
    tol = _tolerances(tolerances)
    if cert is None:
        cert = dichotomy_gap(sys.T)
    if proj is None:
        proj = compute_projections(sys.T, method, cert, tol=max(tol["quad_tol"], 1e-13) * 100)
    out, failures = _extract_pair(sys, proj, tol, inverse=False)
    return SolveResult(out["plus"], out["minus"], proj, cert, proj.method, failures)


@dataclass(frozen=True)
class DualResult:
    Y_plus: GraphSolution
    Y_minus: GraphSolution
    kernel: object
    failures: dict = field(default_factory=dict)


def dual_solve(sys, method="quadrature", tolerances=None, proj=None):
    """Inverse-graph solutions ``V+- = {(Y w, w)}`` of ``AY + YA* - YCY + B = 0``."""
    tol = _tolerances(tolerances)
    if proj is None:
        cert = dichotomy_gap(sys.T)
        proj = compute_projections(sys.T, method, cert, tol=max(tol["quad_tol"], 1e-13) * 100)
    try:
        kernel = kernel_condition(sys.dual())
    except AxisSpectrum:
        kernel = None
    out, failures = _extract_pair(sys, proj, tol, inverse=True)
    return DualResult(out["plus"], out["minus"], kernel, failures)


@dataclass(frozen=True)
class KernelConditionReport:
    holds: bool
    min_sv: float
    rel_min_sv: float
    hautus_witness: np.ndarray = None
    hautus_eigenvalue: complex = None
    t_samples: int = 16
    status: str = "sampled"


def kernel_condition(sys, t_samples=16, tol_rank=1e-10):
    """Sampled test of ``intersection_t ker B (A* + it)^{-1} = {0}``.

    ``holds`` iff ``sigma_min(K) > tol_rank ||K||`` for the stacked
    ``K = [B (A* + i t_k)^{-1}]_k``. The Hautus test looks for an eigenvector of
    ``A*`` inside ``ker B``; such a witness is returned when found.
    """
    A, B = sys.A, sys.B
    n = sys.n
    Ah = A.conj().T
    eigs = np.linalg.eigvals(A)
    scale = max(1.0, norm2(A))
    gap = float(np.min(np.abs(eigs.real)))
    if gap <= 1e-12 * scale:
        raise AxisSpectrum(f"A has spectrum on the imaginary axis (gap {gap:.3e})", gap=gap)
    m = int(t_samples)
    k = np.arange(1, m + 1)
    ts = gap * np.tan(np.pi * (k / (m + 1) - 0.5))
    blocks = [np.linalg.solve((Ah + 1j * t * np.eye(n)).T, B.T).T for t in ts]
    K = np.vstack(blocks)
    s = np.linalg.svd(K, compute_uv=False)
    min_sv = float(s[-1])
    rel = min_sv / s[0] if s[0] > 0 else 0.0
    witness, lam_w = None, None
    hscale = norm2(B) + scale
    for lam in np.linalg.eigvals(Ah):
        M = np.vstack([B, Ah - lam * np.eye(n)])
        _, sv, Vh = np.linalg.svd(M)
        if sv[-1] <= tol_rank * hscale:
            witness, lam_w = Vh[-1].conj(), complex(lam)
            break
    return KernelConditionReport(bool(rel > tol_rank), min_sv, float(rel), witness, lam_w, m)


@dataclass(frozen=True)
class BoundCertificate:
    L: float
    integral_term: float
    sup_term: float
    c_C: float
    p: float


def _resolvent_norm_fn(A):
    n = A.shape[0]
    eye = np.eye(n)

    def f(t):
        return 1.0 / np.linalg.svd(A - 1j * t * eye, compute_uv=False)[-1]

    return f


def _half_line_integral(f, p, scale, quad_tol):
    """``int_0^inf f(t)^{2-p} dt``: quadrature in ``log t`` over ``[t_lo, t_hi]``,
    Gauss-Legendre on ``[0, t_lo]`` and the asymptotic ``t^{p-2}`` tail."""
    g = lambda t: f(t) ** (2.0 - p)
    lo, hi = scale[0] * 1e-6, scale[1] * 1e12
    kw = dict(epsabs=0.0, epsrel=quad_tol, limit=400)
    # f is constant to O(t_lo ||A^{-1}||) on [0, t_lo]: fixed Gauss suffices
    x, w = np.polynomial.legendre.leggauss(8)
    total = lo / 2 * sum(wk * g(lo / 2 * (xk + 1)) for xk, wk in zip(x, w))
    edges = np.linspace(np.log(lo), np.log(hi), 2 + int(np.ceil(np.log(hi / lo) / 2.0)))
    for a, b in zip(edges[:-1], edges[1:]):
        total += quad(lambda u: g(np.exp(u)) * np.exp(u), a, b, **kw)[0]
    return total + hi ** (p - 1.0) / (1.0 - p)


def bound_L(A, p, c_C, quad_tol=DEFAULT_TOLERANCES["quad_tol"]):
    """``L = (c_C / 2 pi) int ||(A - it)^{-1}||^{2-p} dt * sup_t ||A (A - it)^{-1}||^p``.

    Raises
    ------
    DivergentIntegral
        ``p >= 1``.
    NotSectorial
        ``A`` has spectrum outside the open right half-plane.
    """
    A = check_square(A, "A")
    p = float(p)
    if p >= 1.0:
        raise DivergentIntegral(f"the resolvent integral diverges for p = {p} >= 1", p=p)
    if p < 0:
        raise ValueError("p must be nonnegative")
    eigs = np.linalg.eigvals(A)
    if np.min(eigs.real) <= 1e-12 * max(1.0, norm2(A)):
        raise NotSectorial("A must have its spectrum in the open right half-plane",
                           min_real=float(np.min(eigs.real)))
    f = _resolvent_norm_fn(A)
    scale = (float(np.min(np.abs(eigs))), max(norm2(A), float(np.max(np.abs(eigs)))))
    integral = _half_line_integral(f, p, scale, quad_tol)
    if np.any(A.imag):
        integral += _half_line_integral(lambda t: f(-t), p, scale, quad_tol)
    else:
        integral *= 2.0
    sup = 1.0
    if p > 0:
        n = A.shape[0]

        def h(t):
            return norm2(A @ np.linalg.inv(A - 1j * t * np.eye(n)))

        ts = np.concatenate([[0.0], np.logspace(np.log10(scale[0]) - 3, np.log10(scale[1]) + 3, 241)])
        if np.any(A.imag):
            ts = np.concatenate([-ts[:0:-1], ts])
        vals = np.array([h(t) for t in ts])
        best = float(vals.max())
        j = int(np.argmax(vals))
        if 0 < j < ts.size - 1:
            r = minimize_scalar(lambda t: -h(t), bounds=(ts[j - 1], ts[j + 1]), method="bounded",
                                options={"xatol": 1e-10 * max(1.0, abs(ts[j]))})
            best = max(best, -float(r.fun))
        sup = best ** p
    L = float(c_C) / (2 * np.pi) * integral * sup
    return BoundCertificate(L, float(integral), float(sup), float(c_C), p)


@dataclass(frozen=True)
class KreinReport:
    j1_neutrality_plus: float
    j1_neutrality_minus: float
    hypermax_ok: bool
    j2_sign_ok: bool
    j2_min_plus: float
    j2_max_minus: float
    n_probe: int
    seed: int


def _orth(V):
    return np.linalg.qr(V)[0] if V.shape[1] else V


def verify_krein(proj, J=None, n_probe=1000, seed=0, tol=1e-8):
    """J1-neutrality of ``V+-``, hypermaximality, and the J2 sign of random probes."""
    Vp, Vm = _orth(proj.V_plus), _orth(proj.V_minus)
    N = Vp.shape[0]
    n = N // 2
    if J is None:
        J = KreinSymmetry.for_dim(n)
    jp = norm2(Vp.conj().T @ J.J1 @ Vp)
    jm = norm2(Vm.conj().T @ J.J1 @ Vm)
    rng = np.random.default_rng(seed)

    def probe(Q):
        if Q.shape[1] == 0:
            return np.array([0.0])
        c = rng.standard_normal((Q.shape[1], n_probe)) + 1j * rng.standard_normal((Q.shape[1], n_probe))
        X = Q @ c
        quad_ = np.real(np.einsum("ij,ij->j", X.conj(), J.J2 @ X))
        return quad_ / np.einsum("ij,ij->j", X.conj(), X).real

    lo = float(probe(Vp).min())
    hi = float(probe(Vm).max())
    hyper = Vp.shape[1] == n and Vm.shape[1] == n and jp <= tol and jm <= tol
    return KreinReport(jp, jm, bool(hyper), bool(lo >= -tol and hi <= tol), lo, hi, n_probe, seed)


@dataclass(frozen=True)
class UniquenessReport:
    max_solution_divergence: float
    norms: dict
    failures: dict


def uniqueness_check(sys, methods=METHODS, tolerances=None):
    """Solve with every projection method (concurrently, capped by
    ``DICHORICC_THREADS``) and compare the nonnegative solutions."""
    cert = dichotomy_gap(sys.T)

    def run(m):
        try:
            return m, solve(sys, m, tolerances, cert=cert)
        except DichoRiccError as exc:
            return m, exc

    with ThreadPoolExecutor(max_workers=max(1, min(len(methods), max_threads()))) as ex:
        results = dict(ex.map(run, methods))
    sols, failures = {}, {}
    for m in methods:
        res = results[m]
        if isinstance(res, DichoRiccError):
            failures[m] = res
        elif res.X_plus is None:
            failures[m] = res.failures.get("plus")
        else:
            sols[m] = res.X_plus.X
    div = 0.0
    keys = list(sols)
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            Xi, Xj = sols[keys[i]], sols[keys[j]]
            div = max(div, norm2(Xi - Xj) / (1.0 + max(norm2(Xi), norm2(Xj))))
    if len(keys) < 2:
        div = float("nan")
    return UniquenessReport(div, {k: norm2(v) for k, v in sols.items()}, failures)
