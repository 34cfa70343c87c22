"""Hand-rolled Hermitian eigensolver against the reference LAPACK route."""

import numpy as np
import pytest

from ncho import hermitian_eigh
from ncho.errors import NotHermitian


def random_hermitian(rng, n, complex_entries):
    m = rng.standard_normal((n, n))
    if complex_entries:
        m = m + 1j * rng.standard_normal((n, n))
    return m + m.conj().T


def check_against_reference(m):
    w, v = hermitian_eigh(m)
    w_ref = np.linalg.eigvalsh(m)
    scale = np.abs(w_ref).max() + 1.0
    assert np.all(np.diff(w) >= 0)
    assert np.max(np.abs(w - w_ref)) <= 1e-12 * scale
    assert np.max(np.abs(m @ v - v * w)) <= 1e-11 * scale
    n = m.shape[0]
    assert np.max(np.abs(v.conj().T @ v - np.eye(n))) <= 1e-11


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8, 40, 173])
def test_matches_reference_real(n):
    rng = np.random.default_rng(100 + n)
    check_against_reference(random_hermitian(rng, n, False))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8, 40, 173])
def test_matches_reference_complex(n):
    rng = np.random.default_rng(200 + n)
    check_against_reference(random_hermitian(rng, n, True))


def test_large_real_matrix():
    rng = np.random.default_rng(300)
    check_against_reference(random_hermitian(rng, 400, False))


def test_degenerate_cluster():
    rng = np.random.default_rng(301)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    m = q @ np.diag([1.0, 1.0, 1.0, 2.0]) @ q.T
    w, v = hermitian_eigh(m)
    assert np.allclose(w, [1.0, 1.0, 1.0, 2.0], atol=1e-12)
    assert np.max(np.abs(v.T @ v - np.eye(4))) <= 1e-11


def test_block_diagonal_complex():
    # zero couplings between blocks exercise the tridiagonal split path
    m = np.zeros((4, 4), dtype=complex)
    m[:2, :2] = [[2.0, 1j], [-1j, 3.0]]
    m[2:, 2:] = [[5.0, 1 + 1j], [1 - 1j, 7.0]]
    check_against_reference(m)


def test_already_diagonal():
    check_against_reference(np.diag([3.0, -1.0, 4.0, 1.0, -5.0]))


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_deterministic_bitwise():
    rng = np.random.default_rng(302)
    m = random_hermitian(rng, 60, True)
    w1, v1 = hermitian_eigh(m)
    w2, v2 = hermitian_eigh(m)
    assert np.array_equal(w1, w2)
    assert np.array_equal(v1, v2)
