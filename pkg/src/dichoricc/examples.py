"""Discretized model problems and seeded random systems.

Three one-dimensional model problems:

* ``laplace_singular`` -- ``A = -u'' + eps u`` on ``[-W, W]`` with ``B = C`` the
  multiplication by a capped singular potential ``|x|^{-q}``;
* ``nonnormal_fourth_order`` -- ``A = u''''`` with an anti-Hermitian boundary
  perturbation, ``B`` and ``C`` second-order divergence-form operators;
* ``block_antidiag`` -- the doubled system ``diag(A, -A*)`` whose diagonal
  part is dichotomous but neither sectorial nor anti-sectorial.
"""

from dataclasses import dataclass, field

import numpy as np

from ._errors import InvalidParams, SectorViolated
from .operator_model import HamiltonianSystem

NAMES = ("laplace_singular", "nonnormal_fourth_order", "block_antidiag")


@dataclass(frozen=True)
class ExampleSpec:
    name: str
    n: int
    params: dict
    expected_p: float
    expected_flags: dict = field(default_factory=dict)


def _second_difference(n, h, coef=None):
    """Dirichlet matrix of ``-(g u')'`` with ``g`` sampled at the n+1 cell midpoints."""
    g = np.ones(n + 1) if coef is None else np.asarray(coef, dtype=float)
    main = (g[:-1] + g[1:]) / h ** 2
    off = -g[1:-1] / h ** 2
    return np.diag(main) + np.diag(off, 1) + np.diag(off, -1)


def gen_laplace_singular(n=32, epsilon=1.0, q=0.25, domain_half_width=10.0):
    """``A = -d^2/dx^2 + eps`` on ``[-W, W]``; ``B = C = diag(min(|x|^{-q}, (h/2)^{-q}))``.

    The grid is shifted by half a cell if a node would fall on ``x = 0``.
    """
    if not epsilon > 0:
        raise InvalidParams("epsilon must be positive", epsilon=epsilon)
    if not 0 < q < 0.5:
        raise InvalidParams("q must lie in (0, 1/2)", q=q)
    if n < 8:
        raise InvalidParams("n must be at least 8", n=n)
    if not domain_half_width > 0:
        raise InvalidParams("domain_half_width must be positive")
    n = int(n)
    W = float(domain_half_width)
    h = 2 * W / (n + 1)
    x = -W + h * np.arange(1, n + 1)
    if np.min(np.abs(x)) < h / 4:
        x = x + h / 2
    A = _second_difference(n, h) + epsilon * np.eye(n)
    cap = (h / 2) ** (-q)
    g = np.minimum(np.abs(x) ** (-q), cap)
    B = np.diag(g)
    sys = HamiltonianSystem(A, B, B.copy())
    s = 1 - 2 * q
    spec = ExampleSpec("laplace_singular", n,
                       {"epsilon": epsilon, "q": q, "domain_half_width": W, "h": h, "g_cap": cap},
                       (1 - s) / 4,
                       {"A_sectorial": True, "negA_sectorial": False, "kernel_condition": True})
    return sys, spec


def gen_nonnormal(n=16, im_strength=0.5):
    """Clamped fourth-difference operator on ``[0, 1]`` plus ``i s W``.

    ``W = (e_1 e_1^T + e_n e_n^T)/h^3`` is a real symmetric boundary term, so
    ``i s W`` is anti-Hermitian and the numerical range stays in a sector
    ``{Re z >= lambda_min(A_0)}``. ``B = -((1 + x/2) u')' + u`` and
    ``C = -(u'/2)'``.
    """
    if n < 8:
        raise InvalidParams("n must be at least 8", n=n)
    if not im_strength >= 0:
        raise InvalidParams("im_strength must be nonnegative", im_strength=im_strength)
    n = int(n)
    h = 1.0 / (n + 1)
    D = _second_difference(n, h)
    A0 = D @ D
    A0[0, 0] += 1 / h ** 4
    A0[-1, -1] += 1 / h ** 4
    Wb = np.zeros((n, n))
    Wb[0, 0] = Wb[-1, -1] = 1 / h ** 3
    A = A0 + 1j * im_strength * Wb
    c0 = float(np.linalg.eigvalsh(A0)[0])
    if c0 <= 0:
        raise SectorViolated("numerical range leaves the right half-plane", c0=c0)
    mid = h * (np.arange(n + 1) + 0.5)
    B = _second_difference(n, h, 1 + mid / 2) + np.eye(n)
    C = _second_difference(n, h, 0.5 * np.ones(n + 1))
    sys = HamiltonianSystem(A, B, C)
    theta = float(np.arctan(im_strength / h ** 3 / c0))
    spec = ExampleSpec("nonnormal_fourth_order", n,
                       {"im_strength": im_strength, "h": h, "c0": c0, "theta": theta},
                       0.5,
                       {"A_sectorial": True, "negA_sectorial": False, "kernel_condition": True})
    return sys, spec


def gen_block_antidiag(n=16, beta=0.5, gamma=0.5, base=None):
    """``(diag(A, -A*), [[B, bB], [bB, B]], [[C, gC], [gC, C]])`` from a
    ``gen_nonnormal`` base system of size ``n``.

    ``base`` may be a ``(system, spec)`` pair; otherwise ``gen_nonnormal(n)``.
    """
    if not 0 <= beta < 1:
        raise InvalidParams("beta must lie in [0, 1)", beta=beta)
    if not 0 <= gamma <= 1:
        raise InvalidParams("gamma must lie in [0, 1]", gamma=gamma)
    if base is None:
        base = gen_nonnormal(n)
    bsys, bspec = base
    if bspec.name != "nonnormal_fourth_order":
        raise InvalidParams("base must come from gen_nonnormal", base=bspec.name)
    if bsys.n != n:
        raise InvalidParams("base size does not match n", n=n, base_n=bsys.n)
    A, B, C = bsys.A, bsys.B, bsys.C
    Z = np.zeros_like(A)
    At = np.block([[A, Z], [Z, -A.conj().T]])
    Bt = np.block([[B, beta * B], [beta * B, B]])
    Ct = np.block([[C, gamma * C], [gamma * C, C]])
    sys = HamiltonianSystem(At, Bt, Ct)
    params = dict(bspec.params, beta=beta, gamma=gamma)
    spec = ExampleSpec("block_antidiag", 2 * n, params, bspec.expected_p,
                       {"A_sectorial": False, "negA_sectorial": False, "kernel_condition": True})
    return sys, spec


def generate(name, n=None, **params):
    """Dispatch by example name; ``n`` falls back to each generator's default."""
    gens = {"laplace_singular": gen_laplace_singular,
            "nonnormal_fourth_order": gen_nonnormal,
            "block_antidiag": gen_block_antidiag}
    aliases = {"E1": "laplace_singular", "E2": "nonnormal_fourth_order", "E3": "block_antidiag",
               "nonnormal": "nonnormal_fourth_order"}
    name = aliases.get(name, name)
    if name not in gens:
        raise InvalidParams(f"unknown example {name!r}", choices=list(NAMES))
    if n is not None:
        params["n"] = int(n)
    try:
        return gens[name](**params)
    except TypeError as exc:
        raise InvalidParams(str(exc)) from exc


# -- seeded random systems -----------------------------------------------------

def _accretive(rng, n, nonnormal=0.5):
    """Complex ``A = H + iK + N``: ``H`` Hermitian with spectrum in ``[1, 5]``,
    ``K`` Hermitian, ``N`` strictly upper triangular with ``||N|| = nonnormal``,
    so ``Re W(A) >= 1 - nonnormal``."""
    Q = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))[0]
    H = (Q * np.linspace(1.0, 5.0, n)) @ Q.conj().T
    K = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    K = (K + K.conj().T) / (2 * np.sqrt(n))
    N = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), 1)
    if n > 1:
        N *= nonnormal / np.linalg.norm(N, 2)
    return H + 1j * K + N


def _gram(rng, n, rank=None):
    rank = n if rank is None else rank
    G = (rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))) / np.sqrt(2 * n)
    return G @ G.conj().T


def random_dominant_system(n, seed=0, min_gap_ratio=1e-3, max_tries=50):
    """Seeded random nonnegative system with ``Re W(A) >= 1/2`` and
    ``B = GG*``, ``C = FF*``; redrawn until ``gap_h >= min_gap_ratio ||T||``."""
    from .certify import dichotomy_gap

    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        sys = HamiltonianSystem(_accretive(rng, n), _gram(rng, n), _gram(rng, n))
        cert = dichotomy_gap(sys.T)
        if cert.gap_h >= min_gap_ratio * np.linalg.norm(sys.T, 2):
            return sys
    raise InvalidParams("could not draw a system with a certified gap", seed=seed)


def random_kernel_instance(kind, n, seed=0):
    """Random ``(A, B)`` for the kernel-condition implications.

    ``kind``: ``"posdef"`` (``B > 0``), ``"hautus"`` (``B`` annihilates an
    eigenvector of ``A*``) or ``"generic"`` (rank-one ``B``). ``C = 0``.
    """
    rng = np.random.default_rng(seed)
    A = _accretive(rng, n)
    if kind == "posdef":
        B = _gram(rng, n) + 0.1 * np.eye(n)
    elif kind == "hautus":
        w = np.linalg.eig(A.conj().T)[1][:, rng.integers(n)]
        w = w / np.linalg.norm(w)
        P = np.eye(n) - np.outer(w, w.conj())
        B = P @ _gram(rng, n) @ P
    elif kind == "generic":
        B = _gram(rng, n, rank=1)
    else:
        raise InvalidParams(f"unknown kind {kind!r}")
    B = (B + B.conj().T) / 2
    return HamiltonianSystem(A, B, np.zeros((n, n)))
