from fractions import Fraction

import numpy as np
import pytest

from nbdesign import matrixkit as mk
from nbdesign.designs import incidence_matrices, load_fixture


def F(x):
    return Fraction(x)


def test_q_matrix_small_orders():
    assert np.all(mk.q_matrix(1) == mk.as_exact([[0]]))
    expected = mk.as_exact(np.array([[F(1) / 2, F(-1) / 2], [F(-1) / 2, F(1) / 2]], dtype=object))
    assert np.all(mk.q_matrix(2) == expected)


def test_q5_entries_and_idempotent():
    Q = mk.q_matrix(5)
    assert all(Q[i, i] == Fraction(4, 5) for i in range(5))
    assert Q[0, 3] == Fraction(-1, 5)
    assert np.all(Q @ Q == Q)
    assert all(sum(row) == 0 for row in Q)


def test_projector_onto_constants():
    P = mk.projector(mk.as_exact(np.ones((4, 1), dtype=int)))
    assert np.all(P == mk.ones(4) * Fraction(1, 4))


def test_projector_identity():
    assert np.all(mk.projector(mk.identity(3)) == mk.identity(3))


def test_projector_of_block_incidence_averages_within_blocks():
    d = load_fixture("cnbd2_t4.design")
    B = incidence_matrices(d).B
    P = mk.projector(mk.as_exact(B))
    # oracle: 1/k on pairs of plots sharing a block
    expected = np.zeros((d.b * d.k, d.b * d.k), dtype=object)
    for r in range(d.b * d.k):
        for c in range(d.b * d.k):
            expected[r, c] = Fraction(1, d.k) if r // d.k == c // d.k else Fraction(0)
    assert np.all(P == expected)


def test_projector_invariant_to_column_scaling_and_order():
    rng = np.random.default_rng(3)
    A = rng.integers(-3, 4, size=(6, 3))
    P = mk.projector(mk.as_exact(A))
    A2 = A[:, [2, 0, 1]] * np.array([5, -2, 7])
    assert np.all(mk.projector(mk.as_exact(A2)) == P)
    Pf = mk.projector(A.astype(float))
    assert np.allclose(Pf, mk.projector(A2.astype(float)), atol=1e-10)
    assert np.allclose(Pf, mk.as_float(P), atol=1e-10)


def test_projector_properties_rank_deficient():
    A = mk.as_exact(np.array([[1, 2, 3], [2, 4, 6], [0, 1, 1], [1, 0, 1]]))
    P = mk.projector(A)
    assert np.all(P @ P == P)
    assert np.all(P == P.T)
    assert np.all(P @ A == A)


def test_pinv_scaled_q():
    a = Fraction(3, 2)
    assert np.all(mk.pinv_sym(mk.q_matrix(5) * a) == mk.q_matrix(5) / a)


def test_pinv_zero():
    Z = mk.as_exact(np.zeros((3, 3), dtype=int))
    assert np.all(mk.pinv_sym(Z) == Z)
    assert np.all(mk.pinv_sym(np.zeros((3, 3))) == 0)


def test_eigenvalues_of_scaled_q5():
    ev = mk.eig_sym(mk.q_matrix(5) * Fraction(3, 2))
    assert np.allclose(np.sort(ev), [0, 1.5, 1.5, 1.5, 1.5], atol=1e-12)


@pytest.mark.parametrize("seed", range(100))
def test_penrose_identities_random_psd(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 13))
    r = int(rng.integers(0, n + 1))
    G = rng.standard_normal((n, r))
    M = G @ G.T
    P = mk.pinv_sym(M)
    scale = max(1.0, np.abs(M).max(), np.abs(P).max())
    tol = 1e-9 * scale * max(1.0, np.abs(P).max())
    assert np.allclose(M @ P @ M, M, atol=tol)
    assert np.allclose(P @ M @ P, P, atol=tol)
    assert np.allclose((M @ P).T, M @ P, atol=tol)
    assert np.allclose((P @ M).T, P @ M, atol=tol)


@pytest.mark.parametrize("seed", range(10))
def test_exact_pinv_penrose_identities(seed):
    rng = np.random.default_rng(seed)
    G = rng.integers(-2, 3, size=(5, 3))
    M = mk.as_exact(G @ G.T)
    P = mk.pinv_sym(M)
    assert np.all(M @ P @ M == M)
    assert np.all(P @ M @ P == P)
    assert np.all((M @ P).T == M @ P)
    assert np.allclose(mk.as_float(P), np.linalg.pinv(G @ G.T), atol=1e-9)


def test_complete_symmetry_examples():
    ok, a, b = mk.complete_symmetry(mk.q_matrix(5) * Fraction(3, 2))
    assert ok and a == Fraction(3, 2) and b == Fraction(-3, 10)
    assert not mk.complete_symmetry(mk.as_exact(np.diag([1, 2])))[0]
    ok, a, b = mk.complete_symmetry(mk.ones(3))
    assert ok and a == 0 and b == 1


def test_complete_symmetry_float_tolerance():
    M = 1.5 * mk.q_matrix(5, exact=False)
    assert mk.complete_symmetry(M)[0]
    M[0, 1] += 1e-6
    M[1, 0] += 1e-6
    assert not mk.complete_symmetry(M)[0]


def test_is_psd_exact():
    assert mk.is_psd(mk.q_matrix(4))
    assert not mk.is_psd(mk.as_exact(np.array([[1, 2], [2, 1]])))
    assert not mk.is_psd(mk.as_exact(np.array([[0, 1], [1, 0]])))


def test_exact_rational_in_exact_out():
    P = mk.pinv_sym(mk.q_matrix(4) * Fraction(2, 7))
    assert all(isinstance(x, Fraction) for x in P.flat)
    assert all(type(x.numerator) is int for x in P.flat)
