"""Oscillator basis functions: orthonormality, reference values, ODE check."""

import mpmath as mp
import numpy as np
import pytest

from ncho import default_grid, hermite_eval, hermite_table


def mp_psi(n, alpha, x):
    """Normalized eigenfunction evaluated independently at 60 digits."""
    with mp.workdps(60):
        al = mp.mpf(repr(alpha))
        y = mp.sqrt(al) * mp.mpf(repr(x))
        norm = (al / mp.pi) ** mp.mpf("0.25")
        norm /= mp.sqrt(mp.mpf(2) ** n * mp.factorial(n))
        return float(norm * mp.hermite(n, y) * mp.exp(-y * y / 2))


@pytest.mark.parametrize("alpha", [1.0, 0.3, 7.0])
def test_orthonormal_under_quadrature(alpha):
    xs = default_grid(alpha)
    dx = xs[1] - xs[0]
    table = hermite_table(25, alpha, xs)
    gram = table @ table.T * dx
    assert np.max(np.abs(gram - np.eye(26))) < 1e-10


@pytest.mark.parametrize("n", [0, 1, 5, 40, 200])
@pytest.mark.parametrize("x", [0.0, 0.3, 2.5, -1.7])
def test_matches_high_precision_reference(n, x):
    alpha = 0.7
    got = hermite_eval(n, alpha, np.array([x]))[0]
    want = mp_psi(n, alpha, x)
    assert abs(got - want) <= 1e-10 * max(abs(want), 1e-3)


def test_extreme_order_stays_finite_and_accurate():
    xs = default_grid(0.2)
    table = hermite_table(600, 0.2, xs)
    assert np.all(np.isfinite(table))
    got = hermite_eval(600, 0.2, np.array([40.0]))[0]
    want = mp_psi(600, 0.2, 40.0)
    assert abs(got - want) <= 1e-10 * abs(want)


def test_differential_equation_residual():
    # -psi'' + alpha^2 x^2 psi = alpha (2n + 1) psi, checked by 5-point FD
    n, alpha, h = 7, 1.3, 1e-3
    xs = np.linspace(-3.0, 3.0, 41)
    cols = np.stack([xs - 2 * h, xs - h, xs, xs + h, xs + 2 * h])
    vals = np.stack([hermite_eval(n, alpha, c) for c in cols])
    d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4])
    d2 /= 12 * h * h
    lhs = -d2 + alpha**2 * xs**2 * vals[2]
    rhs = alpha * (2 * n + 1) * vals[2]
    assert np.max(np.abs(lhs - rhs)) < 1e-6 * alpha * (2 * n + 1)


def test_parity_symmetry_is_exact():
    xs = np.linspace(0.1, 5.0, 7)
    t_pos = hermite_table(12, 0.7, xs)
    t_neg = hermite_table(12, 0.7, -xs)
    signs = np.array([(-1.0) ** n for n in range(13)])[:, None]
    assert np.array_equal(t_neg, signs * t_pos)


def test_table_agrees_with_single_eval():
    xs = np.linspace(-4.0, 4.0, 17)
    table = hermite_table(9, 1.1, xs)
    for n in (0, 3, 9):
        assert np.array_equal(table[n], hermite_eval(n, 1.1, xs))


def test_default_grid_shape():
    xs = default_grid(4.0)
    assert xs.size == 4001
    assert xs[0] == -10.0 and xs[-1] == 10.0
    assert np.all(np.diff(xs) > 0)
    assert np.allclose(xs, -xs[::-1], rtol=0, atol=1e-12)
