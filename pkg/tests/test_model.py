import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_instance, random_positive_point
from oblique_rmu.errors import NegativeEntry, NotOnSimplex
from oblique_rmu.manifold import is_on_manifold, project_tangent, random_point
from oblique_rmu.model import (
    GramCache,
    ProblemInstance,
    euclidean_subgradient,
    hadamard_square,
    lift_to_oblique,
    objective_nssls,
    objective_quartic,
    quasi_norm_half,
    sign_subgradient,
    split_riemannian_subgradient,
)


def central_difference(f, A, h=1e-6):
    G = np.zeros_like(A)
    for idx in np.ndindex(A.shape):
        E = np.zeros_like(A)
        E[idx] = h
        G[idx] = (f(A + E) - f(A - E)) / (2 * h)
    return G


def test_instance_validation():
    with pytest.raises(NegativeEntry):
        ProblemInstance(-np.ones((2, 2)), np.ones((2, 1)))
    with pytest.raises(ValueError):
        ProblemInstance(np.ones((2, 2)), np.ones((3, 1)))
    with pytest.raises(ValueError):
        ProblemInstance(np.ones((2, 2)), np.ones((2, 1)), lam=-1)


def test_gram_cache(rng):
    inst, cache = random_instance(rng, 7, 9, 3)
    np.testing.assert_allclose(cache.Q, cache.Q.T, rtol=1e-12)
    assert np.linalg.eigvalsh(cache.Q).min() >= -1e-12
    assert np.all(cache.P >= 0)


def test_nssls_examples(rng):
    W = rng.random((4, 2))
    H = np.array([[0.3, 1.0, 0.5], [0.7, 0.0, 0.5]])
    assert objective_nssls(ProblemInstance(W @ H, W, 0.0), H) == pytest.approx(0, abs=1e-28)
    inst = ProblemInstance(np.zeros((2, 1)), np.eye(2), 1.0)
    assert objective_nssls(inst, np.array([[0.25], [0.25]])) == pytest.approx(1.0625, abs=1e-15)
    X = rng.random((4, 3))
    assert objective_nssls(ProblemInstance(X, W, 3.7), np.zeros((2, 3))) == pytest.approx(
        0.5 * np.sum(X**2), rel=1e-14
    )
    with pytest.raises(NegativeEntry):
        objective_nssls(inst, np.array([[-1e-6], [1.0]]))


def test_quasi_norm_examples():
    assert quasi_norm_half(np.eye(2)) == 2
    assert quasi_norm_half(np.full((2, 2), 0.25)) == 2
    assert quasi_norm_half(np.zeros((3, 3))) == 0
    with pytest.raises(NegativeEntry):
        quasi_norm_half(-np.eye(2))


def test_quartic_examples(rng):
    inst = ProblemInstance(np.zeros((1, 1)), np.ones((1, 1)), 1.0)
    assert objective_quartic(inst, np.ones((1, 1))) == pytest.approx(1.25, abs=1e-15)

    A = random_positive_point(rng, 3, 6)
    W = rng.random((5, 3))
    exact = ProblemInstance(W @ (A * A), W, 0.0)
    assert objective_quartic(exact, A) == pytest.approx(0, abs=1e-26)

    inst0 = ProblemInstance(rng.random((5, 6)), W, 0.0)
    assert objective_quartic(inst0, A) == pytest.approx(0.5 * objective_nssls(inst0, A * A), rel=1e-13)


def test_quartic_is_half_of_nssls_with_half_penalty(rng):
    # the identity the solvers rely on: f with penalty lam/2 equals F/2 at H = A*A,
    # for any sign pattern of A
    inst, _ = random_instance(rng, 6, 8, 3, lam=0.9)
    A = random_point(rng, 3, 8)
    lhs = objective_quartic(inst.with_lambda(inst.lam / 2), A)
    assert lhs == pytest.approx(0.5 * objective_nssls(inst, A * A), rel=1e-13)


def test_lift_examples():
    np.testing.assert_array_equal(lift_to_oblique(np.eye(2)), np.eye(2))
    out = lift_to_oblique(np.array([[0.25], [0.75]]))
    np.testing.assert_allclose(out, [[0.5], [np.sqrt(0.75)]], atol=1e-16)
    assert is_on_manifold(out)
    with pytest.raises(NotOnSimplex):
        lift_to_oblique(np.array([[0.4], [0.5]]))


def test_hadamard_square_examples(rng):
    np.testing.assert_array_equal(hadamard_square(np.eye(2)), np.eye(2))
    H = hadamard_square(np.full((4, 3), 0.5))
    np.testing.assert_allclose(H, 0.25)
    A = random_point(rng, 4, 7)
    assert (A < 0).any()
    H = hadamard_square(A)
    assert np.all(H >= 0)
    np.testing.assert_allclose(H.sum(axis=0), 1, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_square_root_lift_round_trip(r, n, seed):
    rng = np.random.default_rng(seed)
    H = rng.random((r, n)) * (rng.random((r, n)) < 0.7)
    H[0, H.sum(axis=0) == 0] = 1.0
    H /= H.sum(axis=0)
    np.testing.assert_allclose(hadamard_square(lift_to_oblique(H)), H, rtol=0, atol=1e-12)


def test_sign_subgradient():
    np.testing.assert_array_equal(
        sign_subgradient(np.array([[2.0, -3.0], [0.0, 5.0]])), [[1, -1], [0, 1]]
    )
    assert set(np.unique(sign_subgradient(np.abs(np.random.default_rng(0).random((3, 3)))))) <= {0, 1}
    np.testing.assert_array_equal(sign_subgradient(np.zeros((2, 2))), 0)


def test_euclidean_subgradient_examples(rng):
    A = random_positive_point(rng, 3, 4)
    W = rng.random((6, 3))
    inst = ProblemInstance(W @ (A * A), W, 0.0)
    G = euclidean_subgradient(inst, GramCache.from_instance(inst), A)
    np.testing.assert_allclose(G, 0, atol=1e-14)

    inst = ProblemInstance(np.zeros((1, 1)), np.ones((1, 1)), 0.0)
    G = euclidean_subgradient(inst, GramCache.from_instance(inst), np.ones((1, 1)))
    assert G[0, 0] == 1.0


@pytest.mark.parametrize("shape", [(5, 4, 2), (8, 10, 3), (4, 1, 1)])
def test_gradient_matches_finite_differences(rng, shape):
    m, n, r = shape
    inst, cache = random_instance(rng, m, n, r)
    A = np.abs(random_point(rng, r, n)) + 1e-2
    G = euclidean_subgradient(inst, cache, A)
    fd = central_difference(lambda B: objective_quartic(inst, B), A)
    np.testing.assert_allclose(G, fd, rtol=1e-5, atol=1e-8)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([1, 2, 3, 5]), st.sampled_from([1, 4, 10]), st.integers(0, 2**32 - 1))
def test_split_consistency_and_sign(r, n, seed):
    rng = np.random.default_rng(seed)
    inst, cache = random_instance(rng, max(r, 6), n, r)
    A = random_positive_point(rng, r, n)
    sg = split_riemannian_subgradient(inst, cache, A)
    rg = project_tangent(A, euclidean_subgradient(inst, cache, A))
    scale = 1 + np.abs(euclidean_subgradient(inst, cache, A)).max()
    assert np.abs(sg.plus - sg.minus - rg).max() <= 1e-10 * scale
    assert sg.plus.min() >= -1e-15 and sg.minus.min() >= -1e-15


def test_split_with_zero_data(rng):
    A = random_positive_point(rng, 3, 5)
    inst = ProblemInstance(np.zeros((4, 5)), rng.random((4, 3)), 0.0)
    cache = GramCache.from_instance(inst)
    sg = split_riemannian_subgradient(inst, cache, A)
    Qh = (cache.Q @ (A * A)) * A
    np.testing.assert_allclose(sg.plus, Qh, rtol=1e-15)
    np.testing.assert_allclose(sg.minus, A * np.einsum("ij,ij->j", A, Qh), rtol=1e-14)


def test_split_penalty_terms(rng):
    inst, cache = random_instance(rng, 5, 4, 3, lam=0.0)
    A = random_positive_point(rng, 3, 4)
    base = split_riemannian_subgradient(inst, cache, A)
    pen = split_riemannian_subgradient(inst.with_lambda(0.7), cache, A)
    np.testing.assert_allclose(pen.plus - base.plus, 0.7, rtol=1e-12)
    np.testing.assert_allclose(pen.minus - base.minus, 0.7 * A * A.sum(axis=0), rtol=1e-10)


@pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
def test_split_scale_neutrality(rng, c):
    inst, cache = random_instance(rng, 6, 7, 3)
    A = random_positive_point(rng, 3, 7)
    one = split_riemannian_subgradient(inst, cache, A)
    sc = split_riemannian_subgradient(inst, cache, A, scale=c)
    np.testing.assert_allclose(sc.plus, c * one.plus, rtol=1e-14)
    np.testing.assert_allclose(sc.minus / sc.plus, one.minus / one.plus, rtol=1e-12)
