"""Sampled certificates for sectoriality, bisectoriality, the dichotomy gap
and the perturbed spectral enclosure.

All constants are sampled maxima on finite grids. They are labelled
``sampled`` in reports and are never proofs.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from ._errors import SpectrumOnAxis, SpectrumOnTestRay
from .validation import check_square, hermitian_part, norm2

PER_DECADE = 64
RHO_MIN = 1e-3
RHO_MAX = 1e6
_ON_RAY_TOL = 1e-12


@dataclass(frozen=True)
class SectorCertificate:
    theta: float
    radius: float
    M_of_thetaprime: list
    kind: str
    theta_W: float = float("nan")
    status: str = "sampled"


@dataclass(frozen=True)
class DichotomyCertificate:
    gap_h: float
    regular_type_min: float
    spectrum: np.ndarray = field(repr=False)
    theta_doubleprime: float
    r_prime: float = float("nan")
    t_max: float = float("nan")
    status: str = "sampled"


@dataclass(frozen=True)
class EnclosureReport:
    ok: bool
    theta_prime: float
    r_prime: float
    theta_doubleprime: float
    gap_h: float
    p: float
    violations: list


# -- primitives -------------------------------------------------------------

def _sigma_min_batch(S, zs, chunk=64):
    """``sigma_min(S - z I)`` for every ``z`` in ``zs``."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    n = S.shape[0]
    eye = np.eye(n)
    out = np.empty(zs.size)
    for lo in range(0, zs.size, chunk):
        z = zs[lo:lo + chunk]
        stack = S[None, :, :] - z[:, None, None] * eye
        out[lo:lo + chunk] = np.linalg.svd(stack, compute_uv=False)[:, -1]
    return out


def _singular_threshold(S, z):
    return S.shape[0] * np.finfo(float).eps * max(1.0, norm2(S), abs(z))


def resolvent_norm(S, z):
    """``||(S - z)^{-1}||_2 = 1 / sigma_min(S - z)``; ``inf`` at (numerical) spectrum."""
    S = check_square(S, "S")
    smin = _sigma_min_batch(S, [z])[0]
    if smin <= _singular_threshold(S, z):
        return float("inf")
    return float(1.0 / smin)


def _radii(lo, hi, per_decade=PER_DECADE):
    lo = max(lo, 1e-300)
    if hi <= lo:
        return np.array([lo])
    count = max(2, int(np.ceil(per_decade * np.log10(hi / lo))) + 1)
    return np.logspace(np.log10(lo), np.log10(hi), count)


def _rho_max(S):
    return max(RHO_MAX, 100.0 * norm2(S))


def _ray_sup(fun, phi, rhos, refine=True):
    """Sampled sup of ``fun(rho e^{i phi})`` over ``rhos`` with a bounded
    local refinement around the best grid point."""
    z = rhos * np.exp(1j * phi)
    vals = fun(z)
    k = int(np.argmax(vals))
    best = float(vals[k])
    if refine and np.isfinite(best) and rhos.size > 2:
        lo = np.log(rhos[max(k - 1, 0)])
        hi = np.log(rhos[min(k + 1, rhos.size - 1)])
        res = minimize_scalar(
            lambda s: -float(fun(np.array([np.exp(s + 1j * phi)]))[0]),
            bounds=(lo, hi), method="bounded", options={"xatol": 1e-7})
        best = max(best, -float(res.fun))
    return best


def _scaled_resolvent(S):
    thr = S.shape[0] * np.finfo(float).eps * max(1.0, norm2(S))

    def fun(z):
        smin = _sigma_min_batch(S, z)
        out = np.abs(z) / np.where(smin > thr * np.maximum(1.0, np.abs(z)), smin, np.nan)
        return np.where(np.isnan(out), np.inf, out)
    return fun


def _angle(eigs, double):
    a = np.abs(np.angle(eigs))
    a[eigs == 0] = 0.0
    if double:
        a = np.minimum(a, np.pi - a)
    return a


def _choose_radius(eigs, double):
    """Smallest radius on ``{0} U {2^k m}`` leaving an angle below pi/2 for the
    eigenvalues outside the closed ball; the ball may not swallow the whole
    spectrum."""
    ang = _angle(eigs, double)
    mod = np.abs(eigs)
    theta0 = float(ang.max()) if ang.size else 0.0
    if theta0 < np.pi / 2:
        return theta0, 0.0, True
    nz = mod[mod > 0]
    if nz.size:
        rho = float(mod.max())
        for k in range(-4, 11):
            r = float(nz.min()) * 2.0 ** k
            if r >= rho:
                break
            outside = mod > r
            th = float(ang[outside].max())
            if th < np.pi / 2:
                return th, r, True
    return theta0, 0.0, False


def numerical_range_angle(S, n_angles=512):
    """``max |arg w|`` over the sampled boundary of the numerical range ``W(S)``;
    ``pi`` if ``0`` lies in ``W(S)``."""
    S = check_square(S, "S")
    phis = np.linspace(0.0, 2 * np.pi, n_angles, endpoint=False)
    support = np.empty(n_angles)
    args = np.empty(n_angles)

    def boundary_arg(phi):
        w, v = np.linalg.eigh(hermitian_part(np.exp(-1j * phi) * S))
        x = v[:, -1]
        return w[-1], abs(np.angle(x.conj() @ S @ x))

    for i, phi in enumerate(phis):
        support[i], args[i] = boundary_arg(phi)
    # 0 is outside the convex set W(S) iff some support value is negative
    if support.min() >= -1e-14 * max(1.0, norm2(S)):
        return float(np.pi)
    k = int(np.argmax(args))
    step = 2 * np.pi / n_angles
    res = minimize_scalar(lambda phi: -boundary_arg(phi)[1],
                          bounds=(phis[k] - step, phis[k] + step), method="bounded",
                          options={"xatol": 1e-12})
    return float(max(args[k], -res.fun))


def _sector_certificate(S, theta_primes, samples_per_ray, double, n_angles):
    S = check_square(S, "S")
    eigs = np.linalg.eigvals(S)
    theta, radius, ok = _choose_radius(eigs, double)
    limit = np.pi / 2 if double else np.pi
    if theta_primes is None:
        theta_primes = [theta + (limit - theta) / 2] if theta < limit else []
    fun = _scaled_resolvent(S)
    lo = max(radius, RHO_MIN) * 1.01
    hi = _rho_max(S)
    if samples_per_ray is None:
        rhos = _radii(lo, hi)
    else:
        rhos = np.logspace(np.log10(lo), np.log10(hi), int(samples_per_ray))
    outside = np.abs(eigs) > radius
    eig_args = np.abs(np.angle(eigs[outside]))
    real = np.allclose(S.imag, 0.0)
    pairs = []
    for tp in theta_primes:
        tp = float(tp)
        if not (0 < tp <= limit) or tp <= theta:
            continue
        upper = np.pi - tp if double else np.pi
        test = {tp, upper, (tp + upper) / 2}
        for ray in test:
            if np.any(np.abs(eig_args - ray) < _ON_RAY_TOL):
                raise SpectrumOnTestRay(
                    f"an eigenvalue lies on the sampled ray arg z = {ray:.6g}", ray=ray)
        phis = sorted(test)
        phis = phis + ([] if real else [-p for p in phis])
        M = max(_ray_sup(fun, phi, rhos) for phi in phis)
        if radius > 0:
            arc = np.linspace(tp, upper, 33)
            arc = np.concatenate([arc, [] if real else -arc])
            M = max(M, float(np.max(fun(lo * np.exp(1j * arc)))))
        pairs.append((tp, float(M)))
    kind = ("bisectorial" if double else "sectorial") if (ok and theta < np.pi / 2) else "neither"
    theta_W = float("nan") if double else numerical_range_angle(S, n_angles)
    return SectorCertificate(theta=float(theta), radius=float(radius), M_of_thetaprime=pairs,
                             kind=kind, theta_W=theta_W)


def certify_sectorial(S, theta_primes=None, samples_per_ray=None, n_angles=512):
    """Sectoriality certificate of ``S``.

    ``theta`` is the largest eigenvalue argument outside the certificate ball.
    For each ``theta_prime > theta`` the constant ``M`` is the sampled maximum
    of ``|z| ||(S - z)^{-1}||`` on the rays ``arg z = +-theta_prime``, the
    bisecting rays and the negative real axis, with ``|z|`` log-spaced (64 per
    decade) between ``1.01 max(radius, 1e-3)`` and ``max(1e6, 100 ||S||)``.
    ``theta_W`` is the numerical-range angle, a stronger certificate.
    """
    return _sector_certificate(S, theta_primes, samples_per_ray, False, n_angles)


def certify_bisectorial(S, theta_primes=None, samples_per_ray=None):
    """Bisectoriality certificate of ``S``; rays sampled on the region
    ``theta' <= |arg z| <= pi - theta'``."""
    return _sector_certificate(S, theta_primes, samples_per_ray, True, 0)


def dichotomy_gap(T, t_max=None, samples=401):
    """Spectral gap around the imaginary axis and the regular-type minimum.

    ``regular_type_min`` is ``min sigma_min(T - i t)`` over a linear grid on
    ``[-t_cut, t_cut]`` refined by bounded golden-section search. Beyond
    ``|t| > 2||T|| + 1`` the minimum cannot occur since
    ``sigma_min(T - i t) >= |t| - ||T||``, so ``t_cut = min(t_max, 2||T|| + 1)``.
    """
    T = check_square(T, "T")
    nrm = norm2(T)
    if t_max is None:
        t_max = 100.0 * (1.0 + nrm)
    spectrum = np.linalg.eigvals(T)
    gap = float(np.min(np.abs(spectrum.real)))
    if gap < 1e-12 * max(1.0, nrm):
        raise SpectrumOnAxis(f"eigenvalue within {gap:.3e} of the imaginary axis", gap=gap)
    t_cut = min(float(t_max), 2.0 * nrm + 1.0)
    ts = np.linspace(-t_cut, t_cut, int(samples))
    vals = _sigma_min_batch(T, 1j * ts)
    order = np.argsort(vals)
    best = float(vals[order[0]])
    step = ts[1] - ts[0] if ts.size > 1 else 1.0
    for k in order[:3]:
        res = minimize_scalar(lambda t: _sigma_min_batch(T, [1j * t])[0],
                              bounds=(ts[k] - step, ts[k] + step), method="bounded",
                              options={"xatol": 1e-8 * max(1.0, abs(ts[k]))})
        best = min(best, float(res.fun))
    theta_T = float(np.max(_angle(spectrum, True)))
    return DichotomyCertificate(gap_h=gap, regular_type_min=best, spectrum=spectrum,
                                theta_doubleprime=theta_T + (np.pi / 2 - theta_T) / 2,
                                t_max=float(t_max))


def _perturbation_norm(S, R):
    def fun(z):
        z = np.atleast_1d(z)
        out = np.empty(z.size)
        n = S.shape[0]
        for i, zi in enumerate(z):
            out[i] = norm2(np.linalg.solve((S - zi * np.eye(n)).T, R.T).T)
        return out
    return fun


def enclosure_region(T, cert, sector, p, S, per_decade=16):
    """Check that ``sigma(T)`` avoids the strip, ``Omega_{theta'', 0}`` and
    ``Omega_{theta', r'}``.

    ``r'`` is the smallest radius on ``{0} U {2^k gap_h : k = -4..10}`` with
    ``||R (S - z)^{-1}|| <= 1/2`` at every sampled ``z`` of ``Omega_{theta', r'}``
    (rays plus the inner arc), the Neumann-series threshold.
    """
    T = check_square(T, "T")
    S = check_square(S, "S")
    R = T - S
    tps = [tp for tp, _ in sector.M_of_thetaprime if sector.theta < tp < np.pi / 2]
    theta_p = min(tps) if tps else sector.theta + (np.pi / 2 - sector.theta) / 2
    theta_pp = cert.theta_doubleprime
    if sector.theta >= np.pi / 2:
        return EnclosureReport(False, theta_p, float("inf"), theta_pp, cert.gap_h, p,
                               ["unperturbed part is not bisectorial"])
    fun = _perturbation_norm(S, R)
    real = np.allclose(S.imag, 0.0) and np.allclose(R.imag, 0.0)
    phis = [theta_p, np.pi / 2, np.pi - theta_p]
    if not real:
        phis += [-phi for phi in phis]
    candidates = [0.0] + [cert.gap_h * 2.0 ** k for k in range(-4, 11)]
    rhos = _radii(RHO_MIN, _rho_max(S), per_decade)
    ray_vals = np.max([fun(rhos * np.exp(1j * phi)) for phi in phis], axis=0)
    r_prime = float("inf")
    if norm2(R) == 0.0:
        r_prime = 0.0
    else:
        for r in candidates:
            tail = ray_vals[rhos > r]
            if tail.size and tail.max() > 0.5:
                continue
            if r > 0:
                arc = np.linspace(theta_p, np.pi - theta_p, 17)
                arc = np.concatenate([arc, [] if real else -arc])
                if np.max(fun(1.01 * r * np.exp(1j * arc))) > 0.5:
                    continue
            r_prime = float(r)
            break
    violations = []
    for lam in cert.spectrum:
        a = abs(np.angle(lam)) if lam != 0 else 0.0
        if abs(lam.real) < cert.gap_h * (1 - 1e-12):
            violations.append(("strip", complex(lam)))
        if theta_pp <= a <= np.pi - theta_pp:
            violations.append(("bisector_0", complex(lam)))
        if theta_p <= a <= np.pi - theta_p and abs(lam) > r_prime:
            violations.append(("bisector_r", complex(lam)))
    return EnclosureReport(not violations, float(theta_p), r_prime, float(theta_pp),
                           cert.gap_h, float(p), violations)


def enclosure_check(T, cert, sector, p, S):
    """``True`` iff every eigenvalue of ``T`` lies outside the certified region."""
    return enclosure_region(T, cert, sector, p, S).ok


def with_r_prime(cert, report):
    return replace(cert, r_prime=report.r_prime)
