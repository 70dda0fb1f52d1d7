"""Spectral projections onto the right/left half-plane invariant subspaces.

Three independent routes compute the same ``P+``, ``P-``:

* ``quadrature`` -- the principal-value resolvent integral along the imaginary
  axis, ``(1/pi) PV int (T - it)^{-1} dt = P+ - P-``;
* ``sign_newton`` -- the scaled Newton iteration for the matrix sign function;
* ``eigen_order`` -- eigenvectors sorted by the sign of ``Re lambda``.
"""

import heapq
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from ._errors import DefectiveMatrix, GapTooSmall, NoConvergence, SingularIterate
from .certify import dichotomy_gap
from .validation import check_square, norm2

METHODS = ("quadrature", "sign_newton", "eigen_order")
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
MAX_NODES = 2 ** 14


@dataclass(frozen=True)
class ProjectionPair:
    P_plus: np.ndarray = field(repr=False)
    P_minus: np.ndarray = field(repr=False)
    V_plus: np.ndarray = field(repr=False)
    V_minus: np.ndarray = field(repr=False)
    method: str
    quad_error_estimate: float = 0.0
    info: dict = field(default_factory=dict)

    @property
    def sign(self):
        return self.P_plus - self.P_minus


def range_basis(P, threshold=0.5):
    """Orthonormal basis of ``range(P)`` from the singular values of ``P``
    above ``threshold``; projector singular values are 0 or at least 1."""
    U, s, _ = np.linalg.svd(P)
    return U[:, s > threshold]


def _cleanup(P):
    P2 = P @ P
    return 3 * P2 - 2 * P2 @ P


def _pair(P_plus, method, err=0.0, info=None, V_plus=None, V_minus=None):
    N = P_plus.shape[0]
    P_minus = np.eye(N) - P_plus
    if V_plus is None:
        V_plus = range_basis(P_plus)
    if V_minus is None:
        V_minus = range_basis(P_minus)
    return ProjectionPair(P_plus, P_minus, V_plus, V_minus, method, float(err), info or {})


class _Integrand:
    """``f(phi) = 2h T (cT - ihs)^{-1} (cT + ihs)^{-1}``, ``c = cos phi``,
    ``s = sin phi``: the symmetric pair ``t, -t`` of the substituted resolvent
    ``h sec^2(phi) (T - it)^{-1}`` with ``t = h tan phi`` added in closed form,
    so the principal value needs no cancellation and the integrand is smooth on
    ``[0, pi/2]``."""

    def __init__(self, T, h):
        self.T = T
        self.h = h
        self.real = not np.any(T.imag)
        self.eye = np.eye(T.shape[0])
        self.count = 0

    def __call__(self, phi):
        c, s = np.cos(phi), np.sin(phi)
        M = c * self.T - 1j * self.h * s * self.eye
        lu, piv = sla.lu_factor(M, check_finite=False)
        Y = sla.lu_solve((lu, piv), self.T, check_finite=False)
        if self.real:
            Z = sla.lu_solve((lu.conj(), piv), Y, check_finite=False)
        else:
            Z = sla.solve(c * self.T + 1j * self.h * s * self.eye, Y, check_finite=False)
        self.count += 1
        return 2 * self.h * Z


def _panel(f, a, b):
    mid, half = (a + b) / 2, (b - a) / 2
    acc = 0.0
    for x, w in zip(_GL_X, _GL_W):
        acc = acc + w * f(mid + half * x)
    return acc * half


def _initial_edges(h, scale, panels=16, per_decade=2):
    """Uniform ``phi`` panels merged with the images ``arctan(t/h)`` of
    log-spaced ``t`` up to ``10 scale``; spectra spread over many decades
    otherwise crowd into a sliver next to ``pi/2``."""
    uniform = np.linspace(0.0, np.pi / 2, panels + 1)
    decades = np.log10(10 * max(scale, h) / h)
    if decades <= 1:
        return uniform
    t = np.logspace(0.0, decades, int(np.ceil(decades * per_decade)) + 1)
    merged = np.union1d(uniform, np.arctan(t))
    # drop slivers created by the merge
    keep = np.concatenate([[True], np.diff(merged) > 1e-3 * np.diff(merged).max()])
    keep[-1] = True
    return merged[keep]


def sign_by_quadrature(T, h, tol=1e-10, initial_panels=16, max_nodes=MAX_NODES):
    """``D = (1/pi) PV int_R (T - it)^{-1} dt`` by adaptive composite 8-point
    Gauss-Legendre on the tangent-substituted half range.

    Each panel carries the split-panel difference as its error estimate; the
    panel with the largest estimate is bisected until the sum is below
    ``tol * max(1, ||D||_F)``. Returns ``(D, error_estimate, nodes)``.
    """
    f = _Integrand(T, h)
    edges = _initial_edges(h, norm2(T), initial_panels)

    def entry(a, b, coarse):
        m = (a + b) / 2
        left, right = _panel(f, a, m), _panel(f, m, b)
        fine = left + right
        # ties broken by position so the refinement order is deterministic
        return (-np.linalg.norm(fine - coarse) / np.pi, a, b, fine, left, right)

    heap = [entry(a, b, _panel(f, a, b)) for a, b in zip(edges[:-1], edges[1:])]
    heapq.heapify(heap)
    scale = max(1.0, np.linalg.norm(sum(e[3] for e in heap)) / np.pi)
    err = -sum(e[0] for e in heap)
    while err > tol * scale:
        if f.count > max_nodes:
            raise NoConvergence(
                f"quadrature did not reach tol={tol:g} within {max_nodes} nodes",
                nodes=f.count, error_estimate=err)
        neg, a, b, _, left, right = heapq.heappop(heap)
        if b - a < 1e-14:
            raise NoConvergence("quadrature panel underflow", nodes=f.count, error_estimate=err)
        m = (a + b) / 2
        e1, e2 = entry(a, m, left), entry(m, b, right)
        heapq.heappush(heap, e1)
        heapq.heappush(heap, e2)
        err += neg - e1[0] - e2[0]
    total = 0.0
    for e in sorted(heap, key=lambda e: e[1]):
        total = total + e[3]
    return total / np.pi, -sum(e[0] for e in heap), f.count


def projections_quadrature(T, cert=None, tol=1e-10):
    """Projections from the principal-value resolvent integral.

    ``P+ = (I + D)/2`` is followed by one cleanup step ``P <- 3P^2 - 2P^3``.
    """
    T = check_square(T, "T")
    if cert is None:
        cert = dichotomy_gap(T)
    nrm = norm2(T)
    if cert.gap_h < 1e-8 * nrm:
        raise GapTooSmall(f"gap {cert.gap_h:.3e} too small relative to ||T|| = {nrm:.3e}",
                          gap=cert.gap_h)
    D, err, nodes = sign_by_quadrature(T, cert.gap_h, tol)
    P = _cleanup((np.eye(T.shape[0]) + D) / 2)
    return _pair(P, "quadrature", err, {"nodes": nodes, "tol": tol})


def matrix_sign_newton(T, max_iter=100, tol=1e-13, scaling="determinant"):
    """Newton iteration ``S <- (mu S + (mu S)^{-1})/2`` with determinantal
    scaling ``mu = |det S|^{-1/N}``; scaling is dropped once the relative step
    falls below 1e-2. Returns ``(sign, iterations)``."""
    S = np.array(T, dtype=complex)
    N = S.shape[0]
    prev = np.inf
    scale = scaling == "determinant"
    if np.linalg.norm(S @ S - np.eye(N)) <= tol * N:
        return S, 0
    for k in range(1, max_iter + 1):
        mu = 1.0
        if scale:
            _, logdet = np.linalg.slogdet(S)
            if not np.isfinite(logdet):
                raise SingularIterate("iterate became singular", iteration=k)
            mu = float(np.exp(-logdet / N))
        X = mu * S
        try:
            Xinv = np.linalg.inv(X)
        except np.linalg.LinAlgError as exc:
            raise SingularIterate("iterate became singular", iteration=k) from exc
        new = (X + Xinv) / 2
        if not np.all(np.isfinite(new)):
            raise SingularIterate("iterate overflowed", iteration=k)
        change = np.linalg.norm(new - S) / np.linalg.norm(new)
        S = new
        if change <= tol:
            return S, k
        if change < 1e-2:
            scale = False
        # rounding floor: quadratic convergence has stalled
        if change < 1e-8 and change >= prev:
            return S, k
        prev = change
    raise NoConvergence(f"sign iteration did not converge in {max_iter} steps", iterations=max_iter)


def projections_sign_newton(T, max_iter=100, tol=1e-13, scaling="determinant"):
    T = check_square(T, "T")
    sign, iters = matrix_sign_newton(T, max_iter, tol, scaling)
    P = (np.eye(T.shape[0]) + sign) / 2
    return _pair(P, "sign_newton", 0.0, {"iterations": iters, "scaling": scaling})


def projections_eigen_order(T, cond_limit=1e12):
    """Spectral projector ``V+ (W+* V+)^{-1} W+*`` from right/left eigenvectors."""
    T = check_square(T, "T")
    w, vl, vr = sla.eig(T, left=True, right=True)
    cond = np.linalg.cond(vr)
    if not np.isfinite(cond) or cond > cond_limit:
        raise DefectiveMatrix(f"eigenvector matrix condition {cond:.3e} exceeds {cond_limit:g}",
                              condition=float(cond))
    plus = w.real > 0
    Vp, Wp = vr[:, plus], vl[:, plus]
    P = Vp @ np.linalg.solve(Wp.conj().T @ Vp, Wp.conj().T)
    Qp = np.linalg.qr(Vp)[0] if Vp.shape[1] else Vp
    Vm = vr[:, ~plus]
    Qm = np.linalg.qr(Vm)[0] if Vm.shape[1] else Vm
    return _pair(P, "eigen_order", 0.0, {"eigvec_condition": float(cond)}, Qp, Qm)


def compute_projections(T, method="quadrature", cert=None, tol=1e-10):
    if method == "quadrature":
        return projections_quadrature(T, cert, tol)
    if method in ("sign", "sign_newton"):
        return projections_sign_newton(T)
    if method in ("eigen", "eigen_order"):
        return projections_eigen_order(T)
    raise ValueError(f"unknown projection method {method!r}")


@dataclass(frozen=True)
class DecompositionReport:
    idempotency_defect: float
    complement_defect: float
    commutation_defect: float
    spectral_split_ok: bool
    adjoint_duality_defect: float


def verify_decomposition(T, proj):
    """Defects of ``P^2 = P``, ``P+ + P- = I``, ``TP = PT`` (relative to
    ``1 + ||T||``), the sign of the spectra of the compressions of ``T`` to
    ``V+``/``V-`` and ``||P+(T*) - P+(T)*||``."""
    T = check_square(T, "T")
    N = T.shape[0]
    Pp, Pm = proj.P_plus, proj.P_minus
    idem = max(norm2(Pp @ Pp - Pp), norm2(Pm @ Pm - Pm))
    comp = norm2(Pp + Pm - np.eye(N))
    comm = norm2(T @ Pp - Pp @ T) / (1.0 + norm2(T))
    ok = True
    for V, sgn in ((proj.V_plus, 1), (proj.V_minus, -1)):
        if V.shape[1]:
            Q = np.linalg.qr(V)[0]
            ev = np.linalg.eigvals(Q.conj().T @ T @ Q)
            ok = ok and bool(np.all(sgn * ev.real > 0))
    try:
        adj = projections_eigen_order(T.conj().T)
    except DefectiveMatrix:
        adj = projections_sign_newton(T.conj().T)
    return DecompositionReport(idem, comp, comm, ok, norm2(adj.P_plus - Pp.conj().T))
