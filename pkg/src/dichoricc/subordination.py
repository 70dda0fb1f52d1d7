"""p-subordination bounds ``||R u|| <= c ||u||^{1-p} ||S u||^p``."""

from dataclasses import dataclass

import numpy as np

from .certify import RHO_MIN, _radii, _ray_sup, _rho_max
from .operator_model import split_diag_offdiag
from .validation import check_square, norm2


@dataclass(frozen=True)
class SubordinationEstimate:
    """``c`` is a lower estimate of the minimal bound (``direct_sup``) or an
    upper estimate derived from sampled resolvent decay (``resolvent_decay``).
    ``c_upper`` is the Jensen bound ``sqrt(lambda_max(R*R, (S*S)^p))``."""

    p: float
    c: float
    method: str
    samples: int
    seed: int = 0
    c_upper: float = float("nan")
    M_prime: float = float("nan")
    M_prime_axis: float = float("nan")
    witness: np.ndarray = None


def _psd_power(H, p):
    w, V = np.linalg.eigh(H)
    w = np.clip(w, 0.0, None)
    return (V * w ** p) @ V.conj().T


def _ratio(RU, SU, U, p):
    """Column-wise ``||Ru|| / (||u||^{1-p} ||Su||^p)`` with the infinity encoding."""
    r = np.linalg.norm(RU, axis=0)
    u = np.linalg.norm(U, axis=0)
    if p == 0:
        return r / u
    s = np.linalg.norm(SU, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = r / (u ** (1 - p) * s ** p)
    tiny = np.finfo(float).tiny
    out = np.where(s <= tiny, np.where(r <= tiny * 1e3, 0.0, np.inf), out)
    return out


def jensen_upper_bound(R, S, p):
    """``sqrt(lambda_max(R*R, (S*S)^p))``, a guaranteed upper bound on the
    p-subordination bound since ``u*(S*S)^p u <= (u*S*S u)^p`` for unit ``u``.

    Returns ``(bound, top generalized eigenvector)``; ``inf`` when ``(S*S)^p`` is
    singular on the range of ``R*R``.
    """
    G = R.conj().T @ R
    H = _psd_power(S.conj().T @ S, p)
    w, V = np.linalg.eigh(H)
    if w[0] <= 1e-14 * max(1.0, w[-1]):
        return float("inf"), None
    Hm = (V / np.sqrt(w)) @ V.conj().T
    lam, Y = np.linalg.eigh(Hm @ G @ Hm)
    vec = Hm @ Y[:, -1]
    return float(np.sqrt(max(lam[-1], 0.0))), vec / np.linalg.norm(vec)


def _ascend(R, S, p, u, steps=32):
    """Projected gradient ascent of ``log ratio`` on the unit sphere."""
    G = R.conj().T @ R
    H = S.conj().T @ S

    def logf(x):
        a = np.real(x.conj() @ G @ x)
        b = np.real(x.conj() @ H @ x)
        if a <= 0 or (p > 0 and b <= 0):
            return -np.inf if a <= 0 else np.inf
        return 0.5 * np.log(a) - 0.5 * (1 - p) * np.log(np.real(x.conj() @ x)) - 0.5 * p * np.log(b)

    u = u / np.linalg.norm(u)
    f = logf(u)
    eta = 1.0
    for _ in range(steps):
        if not np.isfinite(f):
            break
        a = np.real(u.conj() @ G @ u)
        b = np.real(u.conj() @ H @ u)
        g = G @ u / a - (1 - p) * u - (p * (H @ u) / b if p > 0 else 0.0)
        g = g - (u.conj() @ g) * u
        if np.linalg.norm(g) < 1e-15:
            break
        for _ in range(30):
            cand = u + eta * g
            cand /= np.linalg.norm(cand)
            fc = logf(cand)
            if fc > f:
                u, f = cand, fc
                eta *= 2.0
                break
            eta *= 0.5
        else:
            break
    return u


def estimate_subordination(R, S, p, n_samples=4096, seed=0, extra=None, ascent_starts=8,
                           ascent_steps=32):
    """Sampled lower estimate of the p-subordination bound of ``R`` to ``S``.

    Candidates: ``n_samples`` normalized complex Gaussian vectors, all basis
    vectors, optional ``extra`` columns and the top generalized eigenvector of
    ``(R*R, (S*S)^p)``; the best ``ascent_starts`` are refined by gradient ascent.
    Deterministic for a fixed ``seed``. A vector with ``Su = 0 != Ru`` yields
    ``c = inf`` and is stored as the witness.
    """
    R = check_square(R, "R")
    S = check_square(S, "S")
    if R.shape != S.shape:
        raise ValueError("R and S must have the same shape")
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    n = S.shape[0]
    if norm2(R) == 0.0:
        return SubordinationEstimate(p, 0.0, "direct_sup", n_samples, seed, 0.0)
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((n, n_samples)) + 1j * rng.standard_normal((n, n_samples))
    cols = [U / np.linalg.norm(U, axis=0), np.eye(n, dtype=complex)]
    if extra is not None:
        E = np.asarray(extra, dtype=complex).reshape(n, -1)
        cols.append(E / np.linalg.norm(E, axis=0))
    upper, vec = jensen_upper_bound(R, S, p)
    if vec is not None:
        cols.append(vec[:, None])
    U = np.concatenate(cols, axis=1)
    vals = _ratio(R @ U, S @ U, U, p)
    k = int(np.argmax(vals))
    if np.isinf(vals[k]):
        return SubordinationEstimate(p, float("inf"), "direct_sup", U.shape[1], seed, upper,
                                     witness=U[:, k])
    for j in np.argsort(vals)[::-1][:ascent_starts]:
        u = _ascend(R, S, p, U[:, j], ascent_steps)
        val = float(_ratio(R @ u[:, None], S @ u[:, None], u[:, None], p)[0])
        if val > vals[k]:
            U = np.concatenate([U, u[:, None]], axis=1)
            vals = np.append(vals, val)
            k = vals.size - 1
    return SubordinationEstimate(p, float(vals[k]), "direct_sup", U.shape[1], seed, upper,
                                 witness=U[:, k])


def epsilon_constant(p):
    """``min_eps (eps^{-p} a + eps^{1-p} b) = K(p) a^{1-p} b^p`` with
    ``K(p) = p^{-p} (1-p)^{-(1-p)}``."""
    p = float(p)
    k = 1.0
    if p > 0:
        k *= p ** (-p)
    if p < 1:
        k *= (1 - p) ** (-(1 - p))
    return k


def subordination_from_resolvent(R, S, p, theta_prime=np.pi / 2, per_decade=64):
    """Upper estimate of the subordination bound from resolvent decay.

    ``M_prime`` is the sampled sup of ``|z|^{1-p} ||R (S - z)^{-1}||`` over the
    rays of ``Omega_{theta', 0}``; the bound ``c = K(p) M_axis`` uses only the
    imaginary-axis sup, via ``z = i/eps`` and the optimal ``eps``.
    """
    R = check_square(R, "R")
    S = check_square(S, "S")
    p = float(p)
    n = S.shape[0]

    def fun(z):
        z = np.atleast_1d(z)
        out = np.empty(z.size)
        for i, zi in enumerate(z):
            X = np.linalg.solve((S - zi * np.eye(n)).T, R.T).T
            out[i] = abs(zi) ** (1 - p) * norm2(X)
        return out

    rhos = _radii(RHO_MIN, _rho_max(S), per_decade)
    real = np.allclose(S.imag, 0.0) and np.allclose(R.imag, 0.0)
    axis = [np.pi / 2] if real else [np.pi / 2, -np.pi / 2]
    M_axis = max(_ray_sup(fun, phi, rhos) for phi in axis)
    M = M_axis
    if theta_prime < np.pi / 2:
        others = [theta_prime, np.pi - theta_prime]
        if not real:
            others += [-phi for phi in others]
        M = max(M, max(_ray_sup(fun, phi, rhos) for phi in others))
    return SubordinationEstimate(p, epsilon_constant(p) * M_axis, "resolvent_decay", rhos.size,
                                 M_prime=float(M), M_prime_axis=float(M_axis))


@dataclass(frozen=True)
class DominanceReport:
    p: float
    c_B: float
    c_C: float
    c_R: float
    c_B_upper: float
    c_C_upper: float
    c_R_upper: float
    seed: int
    samples: int


def diag_p_dominance(system, p, n_samples=4096, seed=0):
    """Subordination bounds of ``C`` to ``A``, ``B`` to ``-A*`` and ``R`` to ``S``."""
    n = system.n
    minus_adj = -system.A.conj().T
    est_C = estimate_subordination(system.C, system.A, p, n_samples, seed)
    est_B = estimate_subordination(system.B, minus_adj, p, n_samples, seed)
    split = split_diag_offdiag(system)
    extra = []
    for est, top in ((est_C, True), (est_B, False)):
        if est.witness is not None:
            v = np.zeros(2 * n, dtype=complex)
            if top:
                v[:n] = est.witness
            else:
                v[n:] = est.witness
            extra.append(v)
    est_R = estimate_subordination(split.R, split.S, p, n_samples, seed,
                                   extra=np.array(extra).T if extra else None)
    return DominanceReport(float(p), est_B.c, est_C.c, est_R.c, est_B.c_upper, est_C.c_upper,
                           est_R.c_upper, seed, n_samples)


def smallest_p(R, S, threshold, grid=None, n_samples=1024, seed=0):
    """Smallest ``p`` on ``grid`` (default ``0, 0.1, ..., 0.9``) whose sampled
    bound does not exceed ``threshold``; ``None`` if there is none."""
    grid = np.round(np.arange(0.0, 1.0, 0.1), 10) if grid is None else grid
    for p in grid:
        if estimate_subordination(R, S, p, n_samples, seed).c <= threshold:
            return float(p)
    return None
