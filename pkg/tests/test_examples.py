import numpy as np
import pytest
from hypothesis import given, strategies as st

from dichoricc._errors import InvalidParams
from dichoricc.certify import certify_bisectorial, dichotomy_gap, numerical_range_angle
from dichoricc.examples import (
    gen_block_antidiag,
    gen_laplace_singular,
    gen_nonnormal,
    generate,
    random_dominant_system,
    random_kernel_instance,
)
from dichoricc.riccati import kernel_condition
from dichoricc.subordination import estimate_subordination


def test_laplace_defaults():
    sys, sp = gen_laplace_singular(32, epsilon=1.0, q=0.25)
    assert np.allclose(sys.A, sys.A.conj().T)
    assert np.linalg.eigvalsh(sys.A)[0] >= 1.0
    assert np.all(np.diag(sys.B).real > 0)
    assert kernel_condition(sys).holds
    assert sp.expected_p == pytest.approx(0.125)
    assert sp.params["g_cap"] == pytest.approx((sp.params["h"] / 2) ** -0.25)


def test_laplace_invalid():
    with pytest.raises(InvalidParams):
        gen_laplace_singular(16, q=0.6)
    with pytest.raises(InvalidParams):
        gen_laplace_singular(16, epsilon=0.0)


def test_laplace_subordination_bounded_under_refinement():
    cs = []
    for n in (16, 32, 64):
        sys, sp = gen_laplace_singular(n)
        cs.append(estimate_subordination(sys.B, sys.A, max(sp.expected_p, 0.25), n_samples=1024).c)
    assert max(cs) <= 4 * min(cs)


def test_nonnormal_hermitian_limit():
    sys, sp = gen_nonnormal(16, im_strength=0.0)
    assert np.allclose(sys.A, sys.A.conj().T) and np.linalg.eigvalsh(sys.A)[0] > 0
    assert sp.params["theta"] == 0
    assert numerical_range_angle(sys.A) == pytest.approx(0.0, abs=1e-8)


def test_nonnormal_is_nonnormal():
    sys, sp = gen_nonnormal(16, im_strength=0.5)
    A = sys.A
    assert np.linalg.norm(A - A.conj().T, 2) > 0
    assert np.linalg.norm(A @ A.conj().T - A.conj().T @ A, 2) > 0
    # sampled Re W(A) >= c0
    rng = np.random.default_rng(0)
    X = rng.standard_normal((16, 5000)) + 1j * rng.standard_normal((16, 5000))
    X /= np.linalg.norm(X, axis=0)
    w = np.einsum("ij,ij->j", X.conj(), A @ X)
    assert w.real.min() >= sp.params["c0"] * (1 - 1e-12) > 0
    assert numerical_range_angle(A) <= sp.params["theta"] + 1e-8


def test_nonnormal_subordination_stable():
    c = [estimate_subordination(gen_nonnormal(n)[0].C, gen_nonnormal(n)[0].A, 0.5, n_samples=1024).c
         for n in (16, 32)]
    assert np.isfinite(c).all() and max(c) <= 2 * min(c)


def test_block_antidiag_decoupled():
    base = gen_nonnormal(8)
    sys, sp = gen_block_antidiag(8, beta=0.0, gamma=0.0, base=base)
    Z = np.zeros((8, 8))
    np.testing.assert_array_equal(sys.B, np.block([[base[0].B, Z], [Z, base[0].B]]))
    np.testing.assert_array_equal(sys.C, np.block([[base[0].C, Z], [Z, base[0].C]]))
    assert sp.n == 16


def test_block_antidiag_beta():
    base = gen_nonnormal(8)
    sys, _ = gen_block_antidiag(8, beta=0.5, base=base)
    assert np.linalg.eigvalsh(sys.B)[0] == pytest.approx(0.5 * np.linalg.eigvalsh(base[0].B)[0])
    lam = np.linalg.eigvals(sys.A)
    mirrored = -lam.conj()
    assert max(np.min(np.abs(lam - m)) for m in mirrored) <= 1e-8 * np.abs(lam).max()


def test_block_antidiag_normal_base_exact():
    base = gen_nonnormal(8, im_strength=0.0)
    sys, _ = gen_block_antidiag(8, base=base)
    lam = np.linalg.eigvalsh(sys.A)
    c = certify_bisectorial(sys.A)
    assert c.theta == 0 and c.kind == "bisectorial"
    assert dichotomy_gap(sys.A).gap_h == pytest.approx(np.abs(lam).min(), rel=1e-10)


@pytest.mark.parametrize("name,n", [("laplace_singular", 16), ("nonnormal_fourth_order", 16),
                                    ("block_antidiag", 8), ("E1", 16), ("E2", 8), ("E3", 8)])
def test_generated_systems_valid(name, n):
    sys, sp = generate(name, n)
    assert sp.expected_p < 1
    assert sys.nonnegative
    assert kernel_condition(sys).holds == sp.expected_flags["kernel_condition"]
    assert dichotomy_gap(sys.T).gap_h > 0


def test_generate_unknown():
    with pytest.raises(InvalidParams):
        generate("nope")
    with pytest.raises(InvalidParams):
        generate("E1", 16, bogus=1)


@given(st.integers(0, 2 ** 16), st.sampled_from([2, 4, 8]))
def test_random_dominant_reproducible(seed, n):
    a, b = random_dominant_system(n, seed), random_dominant_system(n, seed)
    np.testing.assert_array_equal(a.T, b.T)
    assert a.nonnegative
    assert dichotomy_gap(a.T).gap_h >= 1e-3 * np.linalg.norm(a.T, 2)


@given(st.integers(0, 2 ** 16), st.sampled_from(["posdef", "hautus", "generic"]))
def test_random_kernel_instances(seed, kind):
    sys = random_kernel_instance(kind, 3, seed)
    assert sys.B_nonnegative and not sys.C.any()
