import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm as scipy_expm

from qumode.linalg import (
    MatrixError,
    expm,
    hafnian,
    is_symplectic,
    is_valid_covariance,
    loop_hafnian,
    permanent,
    symplectic_eigenvalues,
    sympmat,
)

seeds = st.integers(0, 2**32 - 1)


def random_complex(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def random_symplectic(rng, n, scale=0.5):
    h = rng.normal(0, scale, (2 * n, 2 * n))
    return scipy_expm(sympmat(n) @ (h + h.T) / 2)


# permanent


def test_permanent_examples():
    assert permanent(np.identity(3)) == pytest.approx(1)
    assert permanent(np.ones((3, 3))) == pytest.approx(6)
    assert permanent(np.array([[1, 2], [3, 4]])) == pytest.approx(10)
    assert permanent(np.zeros((0, 0))) == 1


def test_permanent_errors():
    with pytest.raises(MatrixError):
        permanent(np.ones((2, 3)))
    with pytest.raises(MatrixError):
        permanent(np.ones((21, 21)))
    with pytest.raises(MatrixError):
        permanent(np.ones((4, 4)), limit=3)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 6))
def test_permanent_invariant_under_simultaneous_permutation(seed, n):
    rng = np.random.default_rng(seed)
    m = random_complex(rng, n)
    perm = rng.permutation(n)
    assert permanent(m[np.ix_(perm, perm)]) == pytest.approx(permanent(m), rel=1e-10, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 7))
def test_permanent_ryser_matches_enumeration(seed, n):
    m = random_complex(np.random.default_rng(seed), n)
    ref = permanent(m, method="enumerate")
    assert abs(permanent(m) - ref) <= 1e-10 * max(abs(ref), 1e-300)


# hafnian


def test_hafnian_examples():
    assert hafnian(np.array([[0, 1], [1, 0]])) == pytest.approx(1)
    assert hafnian(np.ones((4, 4)) - np.identity(4)) == pytest.approx(3)
    assert hafnian(np.zeros((0, 0))) == 1


def test_hafnian_errors():
    with pytest.raises(MatrixError):
        hafnian(np.ones((3, 3)))
    with pytest.raises(MatrixError):
        hafnian(np.array([[0, 1], [2, 0]]))
    with pytest.raises(MatrixError):
        hafnian(np.ones((18, 18)))


def test_hafnian_of_complete_graph_counts_matchings():
    for n in (2, 4, 6, 8, 10):
        m = np.ones((n, n)) - np.identity(n)
        double_factorial = math.prod(range(n - 1, 0, -2))
        assert hafnian(m).real == pytest.approx(double_factorial)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([2, 4, 6, 8]))
def test_hafnian_fast_path_matches_enumeration(seed, n):
    a = random_complex(np.random.default_rng(seed), n)
    a = a + a.T
    ref = hafnian(a, method="enumerate")
    assert abs(hafnian(a, method="powertrace") - ref) <= 1e-10 * abs(ref)


# loop hafnian


def test_loop_hafnian_examples():
    assert loop_hafnian(np.array([[2.5]])) == pytest.approx(2.5)
    a, b, d = 1.3, -0.7, 2.1
    assert loop_hafnian(np.array([[a, b], [b, d]])) == pytest.approx(b + a * d)


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([2, 4, 6]))
def test_loop_hafnian_zero_diagonal_equals_hafnian(seed, n):
    a = random_complex(np.random.default_rng(seed), n)
    a = a + a.T
    np.fill_diagonal(a, 0)
    assert loop_hafnian(a, method="enumerate") == hafnian(a, method="enumerate")


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 7))
def test_loop_hafnian_bitmask_matches_enumeration(seed, n):
    a = random_complex(np.random.default_rng(seed), n)
    a = a + a.T
    ref = loop_hafnian(a, method="enumerate")
    assert abs(loop_hafnian(a, method="bitmask") - ref) <= 1e-10 * abs(ref)


# expm


def test_expm_examples():
    np.testing.assert_allclose(expm(np.zeros((3, 3))), np.identity(3))
    np.testing.assert_allclose(expm(np.diag([1j * np.pi, 0])), np.diag([-1, 1]), atol=1e-15)
    with pytest.raises(MatrixError):
        expm(np.ones((2, 3)))


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 12), st.floats(1e-3, 30))
def test_expm_matches_scipy(seed, n, scale):
    m = random_complex(np.random.default_rng(seed), n) * scale / n
    ref = scipy_expm(m)
    assert np.abs(expm(m) - ref).max() <= 1e-12 * max(1.0, np.abs(ref).max()) * n


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 10))
def test_expm_of_skew_hermitian_is_unitary(seed, n):
    h = random_complex(np.random.default_rng(seed), n)
    u = expm(h - h.conj().T)
    np.testing.assert_allclose(u @ u.conj().T, np.identity(n), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 8))
def test_expm_of_commuting_sum_factorizes(seed, n):
    rng = np.random.default_rng(seed)
    a = np.diag(rng.normal(size=n) + 1j * rng.normal(size=n))
    b = np.diag(rng.normal(size=n))
    np.testing.assert_allclose(expm(a + b), expm(a) @ expm(b), rtol=1e-12, atol=1e-12)


# symplectic utilities


def test_sympmat_structure():
    for n in (1, 2, 3):
        o = sympmat(n)
        np.testing.assert_array_equal(o.T, -o)
        np.testing.assert_array_equal(o @ o, -np.identity(2 * n))
        np.testing.assert_array_equal(o[:n, n:], np.identity(n))


def test_is_symplectic_examples():
    t = 0.7
    assert is_symplectic(np.identity(4))
    assert is_symplectic(np.array([[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]]))
    assert not is_symplectic(np.diag([2.0, 2.0]))
    with pytest.raises(MatrixError):
        is_symplectic(np.identity(3))


def test_is_valid_covariance_examples():
    hbar = 2.0
    assert is_valid_covariance(hbar / 2 * np.identity(2), hbar)[0]
    ok, message = is_valid_covariance(hbar / 4 * np.identity(2), hbar)
    assert not ok and message
    for r in (-2.0, 0.0, 0.3, 3.0):
        assert is_valid_covariance(hbar / 2 * np.diag([math.exp(-2 * r), math.exp(2 * r)]), hbar)[0]
    with pytest.raises(MatrixError):
        is_valid_covariance(np.identity(3), hbar)


def test_symplectic_eigenvalue_examples():
    np.testing.assert_allclose(symplectic_eigenvalues(np.identity(2)), [1.0])
    nbar = 0.8
    np.testing.assert_allclose(symplectic_eigenvalues((2 * nbar + 1) * np.identity(2)), [2 * nbar + 1])
    with pytest.raises(MatrixError):
        symplectic_eigenvalues(0.5 * np.identity(2))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 4))
def test_pure_state_covariances_have_unit_eigenvalues(seed, n):
    s = random_symplectic(np.random.default_rng(seed), n)
    v = s @ s.T
    np.testing.assert_allclose(symplectic_eigenvalues(v), np.ones(n), atol=1e-9)
    assert math.isclose(np.linalg.det(v), 1.0, rel_tol=1e-8)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 4))
def test_symplectic_eigenvalues_invariant_under_congruence(seed, n):
    rng = np.random.default_rng(seed)
    nu = 1 + rng.exponential(1.0, n)
    s0 = random_symplectic(rng, n)
    v = s0 @ np.diag(np.concatenate([nu, nu])) @ s0.T
    s = random_symplectic(rng, n)
    np.testing.assert_allclose(symplectic_eigenvalues(s @ v @ s.T), symplectic_eigenvalues(v), rtol=1e-9)
    np.testing.assert_allclose(symplectic_eigenvalues(v), np.sort(nu), rtol=1e-9)


def test_hafnian_enumeration_counts_terms():
    # the (n-1)!! matchings of K_6 weighted by distinct primes multiply out uniquely
    n = 6
    primes = iter([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47])
    m = np.zeros((n, n))
    for i, j in itertools.combinations(range(n), 2):
        m[i, j] = m[j, i] = next(primes)
    want = 0
    def matchings(rest):
        if not rest:
            yield []
            return
        a = rest[0]
        for k in range(1, len(rest)):
            for tail in matchings(rest[1:k] + rest[k + 1:]):
                yield [(a, rest[k])] + tail
    for match in matchings(list(range(n))):
        want += math.prod(m[i, j] for i, j in match)
    assert hafnian(m).real == pytest.approx(want)
