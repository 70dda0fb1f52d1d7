import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_complex
from dichoricc.examples import gen_laplace_singular
from dichoricc.operator_model import HamiltonianSystem, split_diag_offdiag
from dichoricc.subordination import (
    _ratio,
    diag_p_dominance,
    epsilon_constant,
    estimate_subordination,
    jensen_upper_bound,
    smallest_p,
    subordination_from_resolvent,
)


def test_direct_diag_example():
    est = estimate_subordination(np.diag([0.0, 2.0]), np.diag([1.0, 4.0]), 0.5)
    assert est.c == pytest.approx(1.0, rel=1e-12)
    assert est.method == "direct_sup"


def test_dense_sphere_oracle():
    # the basis-vector maximum is the global one for the diagonal example
    R, S = np.diag([0.0, 2.0]), np.diag([1.0, 4.0])
    th = np.linspace(0, np.pi / 2, 20001)
    U = np.vstack([np.cos(th), np.sin(th)])
    assert _ratio(R @ U, S @ U, U, 0.5).max() == pytest.approx(1.0, rel=1e-9)


def test_zero_and_identity():
    assert estimate_subordination(np.zeros((2, 2)), np.eye(2), 0.3).c == 0.0
    assert estimate_subordination(np.eye(3), np.eye(3), 0.0).c == pytest.approx(1.0)


def test_singular_S_gives_infinity():
    est = estimate_subordination(np.eye(2), np.diag([1.0, 0.0]), 0.5)
    assert np.isinf(est.c)
    assert np.linalg.norm(np.diag([1.0, 0.0]) @ est.witness) < 1e-12


def test_deterministic_seed():
    rng = np.random.default_rng(5)
    R, S = random_complex(rng, 4), random_complex(rng, 4)
    a = estimate_subordination(R, S, 0.4, n_samples=512, seed=11)
    b = estimate_subordination(R, S, 0.4, n_samples=512, seed=11)
    assert a.c == b.c


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 5), st.floats(0.0, 1.0))
def test_lower_and_upper_bounds(seed, n, p):
    rng = np.random.default_rng(seed)
    R, S = random_complex(rng, n), random_complex(rng, n) + 3 * np.eye(n)
    est = estimate_subordination(R, S, p, n_samples=256, seed=seed % 1000)
    U = random_complex(rng, n, 64)
    assert np.all(_ratio(R @ U, S @ U, U, p) <= est.c * (1 + 1e-12))
    assert est.c <= est.c_upper * (1 + 1e-9)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4), st.floats(0.0, 0.9))
def test_jensen_bound_holds_everywhere(seed, n, p):
    rng = np.random.default_rng(seed)
    R, S = random_complex(rng, n), random_complex(rng, n) + 2 * np.eye(n)
    c, _ = jensen_upper_bound(R, S, p)
    U = random_complex(rng, n, 500)
    assert np.all(_ratio(R @ U, S @ U, U, p) <= c * (1 + 1e-10))


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.0, 0.5), st.floats(0.0, 0.5))
def test_monotone_in_p(seed, p, dq):
    rng = np.random.default_rng(seed)
    n = 3
    S = random_complex(rng, n) + 4 * np.eye(n)
    if np.linalg.svd(S, compute_uv=False)[-1] < 1:
        return
    R = random_complex(rng, n)
    q = p + dq
    # per vector the ratio at q is at most the ratio at p times ||S^-1||^(q-p);
    # sharing the q-witness makes the two sampled estimates comparable
    eq = estimate_subordination(R, S, q, n_samples=256, seed=3)
    cq = eq.c
    cp = estimate_subordination(R, S, p, n_samples=256, seed=3, extra=eq.witness).c
    inv = np.linalg.norm(np.linalg.inv(S), 2)
    assert cq <= cp * inv ** (q - p) * (1 + 1e-6)


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.05, 0.95))
def test_epsilon_form(seed, p):
    rng = np.random.default_rng(seed)
    n = 3
    R, S = random_complex(rng, n), random_complex(rng, n) + 2 * np.eye(n)
    c = jensen_upper_bound(R, S, p)[0]
    u = random_complex(rng, n, 1)[:, 0]
    for eps in (1e-3, 1.0, 1e3):
        rhs = c * (eps ** -p * np.linalg.norm(u) + eps ** (1 - p) * np.linalg.norm(S @ u))
        assert np.linalg.norm(R @ u) <= rhs * (1 + 1e-12)


def test_epsilon_constant():
    assert epsilon_constant(0.5) == pytest.approx(2.0)
    assert epsilon_constant(0.0) == 1.0 and epsilon_constant(1.0) == 1.0
    # K(p) is the exact optimum of eps^{-p} a + eps^{1-p} b over eps
    a, b, p = 2.0, 5.0, 0.3
    eps = np.logspace(-4, 4, 200001)
    best = np.min(eps ** -p * a + eps ** (1 - p) * b)
    assert best == pytest.approx(epsilon_constant(p) * a ** (1 - p) * b ** p, rel=1e-6)


def test_resolvent_route_identity():
    est = subordination_from_resolvent(np.eye(2), np.eye(2), 0.0)
    assert est.M_prime == pytest.approx(1.0, rel=1e-3)
    assert subordination_from_resolvent(np.zeros((2, 2)), np.eye(2), 0.5).M_prime == 0.0


def test_resolvent_route_diag():
    R, S = np.diag([0.0, 2.0]), np.diag([1.0, 4.0])
    est = subordination_from_resolvent(R, S, 0.5)
    t = np.logspace(-4, 6, 200001)
    oracle = np.max(np.sqrt(t) * 2 / np.sqrt(16 + t ** 2))
    assert est.M_prime_axis == pytest.approx(oracle, rel=1e-6)
    assert est.c >= estimate_subordination(R, S, 0.5).c


def test_resolvent_and_direct_agree_on_examples():
    sys, _ = gen_laplace_singular(16)
    sp = split_diag_offdiag(sys)
    p = 0.25
    d = estimate_subordination(sp.R, sp.S, p, n_samples=512).c
    r = subordination_from_resolvent(sp.R, sp.S, p, per_decade=16).c
    assert d / 4 <= r <= 4 * d


def test_dominance_examples():
    z = diag_p_dominance(HamiltonianSystem(np.eye(2), np.zeros((2, 2)), np.zeros((2, 2))), 0.5, 64)
    assert z.c_B == z.c_C == z.c_R == 0
    A = np.diag([1.0, 4.0])
    d = diag_p_dominance(HamiltonianSystem(A, np.diag([0.0, 2.0]), np.diag([0.0, 2.0])), 0.5, 512)
    assert d.c_B == pytest.approx(1.0) and d.c_C == pytest.approx(1.0) and d.c_R == pytest.approx(1.0)


def test_dominance_scalar_two_exponents():
    sys = HamiltonianSystem([[2.0]], [[1.0]], [[3.0]])
    d1 = diag_p_dominance(sys, 1.0, 64)
    assert (d1.c_B, d1.c_C, d1.c_R) == pytest.approx((0.5, 1.5, 1.5))
    d0 = diag_p_dominance(sys, 0.0, 64)
    assert (d0.c_B, d0.c_C, d0.c_R) == pytest.approx((1.0, 3.0, 3.0))


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.0, 1.0))
def test_block_identity(seed, p):
    rng = np.random.default_rng(seed)
    n = 2
    A = random_complex(rng, n) + 3 * np.eye(n)
    G, F = random_complex(rng, n), random_complex(rng, n)
    d = diag_p_dominance(HamiltonianSystem(A, G @ G.conj().T, F @ F.conj().T), p, 256, seed % 97)
    m = max(d.c_B, d.c_C)
    assert m * (1 - 1e-6) <= d.c_R
    assert d.c_R <= max(d.c_B_upper, d.c_C_upper) * (1 + 1e-9)


def test_smallest_p():
    R, S = np.diag([0.0, 2.0]), np.diag([1.0, 4.0])
    # c(p) = 2 / 4^p on e2
    assert smallest_p(R, S, 1.0 + 1e-9) == pytest.approx(0.5)
    assert smallest_p(R, S, 0.99) == pytest.approx(0.6)
    assert smallest_p(R, S, 0.1) is None
