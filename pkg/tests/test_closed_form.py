"""Frequency roots, candidate eigenvalues, membership residuals, eigenvectors."""

import warnings

import mpmath as mp
import numpy as np
import pytest

from ncho import (
    Sign,
    assemble_sector,
    beta_roots,
    CoeffVector,
    canonicalize,
    construct_phi,
    eig2,
    from_tetrad,
    lambda_even,
    lambda_odd,
    m_alpha,
    membership_even,
    membership_odd,
    n_alpha,
    residual_even,
    residual_odd,
    state_residual,
    validate_pair,
    verify_eigenpair,
)
from ncho.errors import (
    CommutativeInput,
    DegenerateRoots,
    InconsistentSystem,
    OffManifold,
    SingularDenominator,
)

EXAMPLE = from_tetrad(4.0, 1.0, 2.0, 1.0)
FAMILY_EVEN = from_tetrad(4.0, 11.0 / 14.0, 22.0 / 7.0, 1.0)
ODD_A = 203.0 / (95.0 * np.sqrt(2.0))
FAMILY_ODD = from_tetrad(2.0, ODD_A, 2.0 * ODD_A, 1.0)


def mp_beta_sq(b, a, c, xi, sign):
    with mp.workdps(50):
        b_, a_, c_, x_ = (mp.mpf(repr(float(v))) for v in (b, a, c, xi))
        root = mp.sqrt((c_ - a_ * b_) ** 2 + 4 * x_**2 * b_)
        if sign == "minus":
            root = -root
        return (a_ * b_ + c_ + root) / (2 * b_)


def mp_lambda(b, a, c, xi, sign, factor):
    with mp.workdps(50):
        beta_sq = mp_beta_sq(b, a, c, xi, sign)
        beta = mp.sqrt(beta_sq)
        b_, a_, c_ = (mp.mpf(repr(float(v))) for v in (b, a, c))
        defect = a_ + c_ - (1 + b_) * beta_sq
        num = a_ * b_ + c_ - 2 * beta_sq * b_
        return float(factor * beta * num / defect)


def test_beta_roots_frozen_example():
    plus, minus = beta_roots(EXAMPLE)
    assert plus.sign is Sign.PLUS and minus.sign is Sign.MINUS
    assert plus.beta_sq == pytest.approx((6.0 + np.sqrt(20.0)) / 8.0,
                                         rel=1e-14)
    assert minus.beta_sq == pytest.approx((6.0 - np.sqrt(20.0)) / 8.0,
                                          rel=1e-14)
    assert plus.beta == pytest.approx(np.sqrt(plus.beta_sq), rel=1e-15)


def test_beta_roots_invariants(make_interior):
    rng = np.random.default_rng(41)
    for trial in range(12):
        params = make_interior(rng)
        if trial % 3 == 0:
            params = from_tetrad(params.b, params.a, params.c,
                                 params.xi * np.exp(0.6j))
        a_mat, b_mat = params.matrices()
        mscale = np.abs(a_mat).max() + np.abs(b_mat).max()
        plus, minus = beta_roots(params)
        assert plus.beta >= minus.beta > 0
        for root in (plus, minus):
            shifted = a_mat - root.beta_sq * b_mat
            assert abs(np.linalg.det(shifted)) <= 1e-10 * mscale**2
            assert np.max(np.abs(shifted @ root.kernel_u2)) <= \
                1e-10 * mscale * np.abs(root.kernel_u2).max()
            # bilinear (unconjugated) pairing with the companion direction
            pairing = np.sum(root.kernel_u2 * root.cokernel_u2t)
            assert abs(pairing) <= 1e-12 * (np.abs(root.kernel_u2).max()
                                            * np.abs(root.cokernel_u2t).max()
                                            + 1.0)
            det_id = (params.a - root.beta_sq) \
                * (params.c - root.beta_sq * params.b)
            assert det_id == pytest.approx(params.xi_abs**2,
                                           rel=1e-9, abs=1e-12 * mscale**2)
        # the squared roots diagonalize the symmetrized quotient
        quot = np.diag([1.0, 1.0 / np.sqrt(params.b)]) @ a_mat \
            @ np.diag([1.0, 1.0 / np.sqrt(params.b)])
        w, _ = eig2(quot)
        assert minus.beta_sq == pytest.approx(w[0], rel=1e-12)
        assert plus.beta_sq == pytest.approx(w[1], rel=1e-12)


def test_minus_root_survives_cancellation():
    # ac - xi^2 ~ 2e-6 wipes out ten digits in the naive quadratic formula
    b, a, c, xi = 2.0, 1.0, 1.0, 0.999999
    _, minus = beta_roots(from_tetrad(b, a, c, xi))
    want = float(mp_beta_sq(b, a, c, xi, "minus"))
    assert minus.beta_sq == pytest.approx(want, rel=1e-13)


def test_commutative_and_degenerate_warnings():
    with pytest.warns(CommutativeInput):
        beta_roots(from_tetrad(2.0, 1.0, 1.5, 0.0))
    with pytest.warns(CommutativeInput):
        beta_roots(from_tetrad(1.0, 1.0, 1.5, 0.2))
    with pytest.warns(DegenerateRoots):
        with pytest.warns(CommutativeInput):
            beta_roots(from_tetrad(4.0, 1.0, 4.0, 0.0))


def test_lambda_against_high_precision():
    plus, minus = beta_roots(EXAMPLE)
    for root, tag in ((plus, "plus"), (minus, "minus")):
        got_even = lambda_even(EXAMPLE, root)
        got_odd = lambda_odd(EXAMPLE, root)
        assert got_even == pytest.approx(
            mp_lambda(4.0, 1.0, 2.0, 1.0, tag, 5), rel=1e-14)
        assert got_odd == pytest.approx(
            mp_lambda(4.0, 1.0, 2.0, 1.0, tag, 7), rel=1e-14)
        assert got_odd == pytest.approx(1.4 * got_even, rel=1e-14)
        assert got_even > 0


def test_lambda_singular_denominator():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        params = from_tetrad(4.0, 1.0, 4.0, 0.0)
        for root in beta_roots(params):
            with pytest.raises(SingularDenominator):
                lambda_even(params, root)


def test_membership_even_family_point():
    res, scale = membership_even(FAMILY_EVEN, "minus")
    assert scale > 0
    assert abs(res) <= 1e-12 * scale
    assert residual_even(FAMILY_EVEN, "minus") == res
    _, minus = beta_roots(FAMILY_EVEN)
    lam = lambda_even(FAMILY_EVEN, minus)
    assert lam == pytest.approx(8.0 * np.sqrt(2.0 / 7.0), rel=1e-13)
    # both membership sides reduce to 40 beta = 140 beta^3 at this point
    assert 2.0 * lam * minus.defect == pytest.approx(40.0 * minus.beta,
                                                     rel=1e-12)
    assert 140.0 * minus.beta**3 == pytest.approx(40.0 * minus.beta,
                                                  rel=1e-12)


def test_membership_disjoint_at_even_family_point():
    for res, scale in (membership_even(FAMILY_EVEN, "plus"),
                       membership_odd(FAMILY_EVEN, "plus"),
                       membership_odd(FAMILY_EVEN, "minus")):
        assert abs(res) > 1e-3 * scale


def test_membership_odd_family_point():
    assert ODD_A == pytest.approx(1.5109755429565173, rel=1e-15)
    res, scale = membership_odd(FAMILY_ODD, "minus")
    assert abs(res) <= 1e-12 * scale
    res_even, scale_even = membership_even(FAMILY_ODD, "minus")
    assert abs(res_even) > 1e-3 * scale_even


def test_homogeneity_of_residuals(make_interior):
    rng = np.random.default_rng(42)
    fns = (membership_even, membership_odd)
    for _ in range(6):
        params = make_interior(rng)
        for r in (0.5, 2.0, 10.0):
            scaled = from_tetrad(params.b, r * params.a, r * params.c,
                                 r * params.xi)
            for fn in fns:
                for sign in ("plus", "minus"):
                    res0, sc0 = fn(params, sign)
                    res1, sc1 = fn(scaled, sign)
                    assert res1 == pytest.approx(r**1.5 * res0, rel=1e-9)
                    assert sc1 == pytest.approx(r**1.5 * sc0, rel=1e-9)


def test_membership_ignores_coupling_phase(make_interior):
    rng = np.random.default_rng(43)
    params = make_interior(rng)
    rotated = from_tetrad(params.b, params.a, params.c,
                          params.xi * np.exp(1.1j))
    for fn in (membership_even, membership_odd):
        for sign in ("plus", "minus"):
            res0, sc0 = fn(params, sign)
            res1, sc1 = fn(rotated, sign)
            assert res1 == pytest.approx(res0, rel=1e-14)
            assert sc1 == pytest.approx(sc0, rel=1e-14)


def test_construct_even_family_state():
    sol = construct_phi(FAMILY_EVEN, "minus", "even")
    assert sol.sign is Sign.MINUS
    assert sol.coeff_blocks.parity.value == "even"
    assert sol.coeff_blocks.blocks.shape == (2, 2)
    assert sol.residual_eigen <= 1e-12
    assert abs(sol.residual_membership) <= 1e-12 * sol.residual_scale
    assert verify_eigenpair(sol, FAMILY_EVEN) == sol.residual_eigen
    root = sol.beta_root
    # top block sits in the kernel of the shifted pencil
    v_top = sol.coeff_blocks.blocks[1]
    n_mat = n_alpha(FAMILY_EVEN, root.beta)
    assert np.max(np.abs(n_mat @ v_top)) <= \
        1e-12 * np.abs(n_mat).max() * np.abs(v_top).max()
    # twice the eigenvalue is a frequency-matrix eigenvalue
    w = np.linalg.eigvalsh(m_alpha(FAMILY_EVEN, root.beta))
    assert np.min(np.abs(w - 2.0 * sol.lam)) <= 1e-12 * sol.lam
    # companion-weight identities
    want = 5.0 * root.beta * FAMILY_EVEN.b - sol.lam
    assert sol.gamma_tilde * root.defect == pytest.approx(want, rel=1e-12)
    lhs = sol.gamma_tilde * root.defect**2 * (FAMILY_EVEN.a - root.beta_sq)
    rhs = 5.0 * root.beta * (FAMILY_EVEN.b - 1.0) * FAMILY_EVEN.xi_abs**2
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_construct_odd_family_state():
    sol = construct_phi(FAMILY_ODD, "minus", "odd")
    assert sol.parity.value == "odd"
    assert sol.coeff_blocks.blocks.shape == (2, 2)
    assert sol.residual_eigen <= 1e-12
    root = sol.beta_root
    w = np.linalg.eigvalsh(3.0 * m_alpha(FAMILY_ODD, root.beta))
    assert np.min(np.abs(w - 2.0 * sol.lam)) <= 1e-12 * sol.lam
    lam_even_here = lambda_even(FAMILY_ODD, root)
    assert sol.lam == pytest.approx(1.4 * lam_even_here, rel=1e-14)


def test_construct_rejections():
    generic = from_tetrad(1.7, 1.0, 1.0, 0.5)
    with pytest.raises(OffManifold):
        construct_phi(generic, "minus", "even")
    with pytest.raises(OffManifold):
        construct_phi(FAMILY_EVEN, "plus", "even")
    with pytest.raises(OffManifold):
        construct_phi(FAMILY_EVEN, "minus", "odd")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(OffManifold, match="companion"):
            construct_phi(from_tetrad(4.0, 1.0, 6.0, 0.0), "minus", "even")
    # silencing the membership gate exposes the inconsistent linear system
    with pytest.raises(InconsistentSystem):
        construct_phi(generic, "minus", "even", tol_membership=1e9)


def test_construct_with_coupling_phase():
    base = construct_phi(FAMILY_EVEN, "minus", "even")
    rotated_params = from_tetrad(4.0, 11.0 / 14.0, 22.0 / 7.0,
                                 np.exp(0.8j))
    sol = construct_phi(rotated_params, "minus", "even")
    assert sol.residual_eigen <= 1e-9
    assert sol.lam == pytest.approx(base.lam, rel=1e-13)
    assert sol.gamma == pytest.approx(base.gamma, rel=1e-12)
    assert sol.gamma_tilde == pytest.approx(base.gamma_tilde, rel=1e-12)
    assert np.allclose(np.abs(sol.coeff_blocks.blocks),
                       np.abs(base.coeff_blocks.blocks), rtol=1e-12)


def test_state_residual_matches_dense(make_interior):
    rng = np.random.default_rng(44)
    params = make_interior(rng)
    blocks = rng.standard_normal((6, 2)) + 1j * rng.standard_normal((6, 2))
    v = CoeffVector("odd", blocks)
    lam, alpha = 3.3, 1.2
    got = state_residual(params, alpha, v, lam)
    dense = assemble_sector(params, alpha, "odd", 7).matrix
    padded = np.zeros(14, dtype=complex)
    padded[:12] = blocks.ravel()
    want = np.linalg.norm(dense @ padded - lam * padded) \
        / np.linalg.norm(padded)
    assert got == pytest.approx(want, rel=1e-12)


def test_commutative_product_states_are_exact():
    params = canonicalize(validate_pair(np.diag([1.0, 4.0]), np.eye(2)))
    for j, (a_j, lam) in enumerate(((1.0, 1.0), (4.0, 2.0))):
        alpha = np.sqrt(a_j)
        blocks = np.zeros((1, 2))
        blocks[0, j] = 1.0
        v = CoeffVector("even", blocks)
        assert state_residual(params, alpha, v, lam) <= 1e-13


def test_eigen_residual_detects_perturbation():
    sol = construct_phi(FAMILY_EVEN, "minus", "even")
    beta = sol.beta_root.beta
    exact = state_residual(FAMILY_EVEN, beta, sol.coeff_blocks, sol.lam)
    bumped = state_residual(FAMILY_EVEN, beta, sol.coeff_blocks,
                            sol.lam + 1e-3)
    assert exact <= 1e-12
    assert bumped >= 1e-4
