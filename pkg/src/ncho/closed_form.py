"""Finite-support eigenpairs of the two-channel oscillator.

Everything here lives in canonical coordinates (b, a, c, xi).  The Gaussian
frequency beta solves det(At - beta^2 Bt) = 0; on a codimension-1 subset of
parameter space the operator has an eigenfunction whose coefficient sequence
occupies only the first two blocks of one parity sector.  This module
computes the frequency roots, the candidate eigenvalues, the membership
residual that decides whether a parameter point admits such a state, and the
state itself.
"""

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    CommutativeInput,
    DegenerateRoots,
    InconsistentSystem,
    OffManifold,
    SingularDenominator,
    SingularEncountered,
)
from .matrix_core import CanonicalParams
from .operator_assembly import CoeffVector, Parity, _coerce_parity, apply_operator


class Sign(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


def _coerce_sign(sign) -> Sign:
    if isinstance(sign, Sign):
        return sign
    return Sign(str(sign).lower())


@dataclass(frozen=True)
class BetaRoot:
    """One positive frequency root and the algebra attached to it.

    kernel_u2 spans ker(At - beta^2 Bt); cokernel_u2t is the companion
    direction (a - beta^2, xi) whose bilinear pairing with kernel_u2
    vanishes identically.  defect = a + c - (1+b) beta^2 is the nonzero
    eigenvalue of At - beta^2 Bt.
    """

    sign: Sign
    beta: float
    kernel_u2: np.ndarray
    cokernel_u2t: np.ndarray
    defect: float

    @property
    def beta_sq(self) -> float:
        return self.beta * self.beta


def _make_root(params: CanonicalParams, sign: Sign, beta_sq: float) -> BetaRoot:
    xi = complex(params.xi)
    if xi.imag == 0.0:
        kern = np.array([params.c - beta_sq * params.b, -xi.real])
        cokern = np.array([params.a - beta_sq, xi.real])
    else:
        kern = np.array([params.c - beta_sq * params.b, -np.conj(xi)])
        cokern = np.array([params.a - beta_sq, xi])
    defect = params.a + params.c - (1.0 + params.b) * beta_sq
    return BetaRoot(sign, math.sqrt(beta_sq), kern, cokern, float(defect))


def beta_roots(params: CanonicalParams) -> tuple[BetaRoot, BetaRoot]:
    """Both positive frequency roots, plus-sign first.

    beta^2 = (ab + c +/- sqrt((c - ab)^2 + 4|xi|^2 b)) / (2b); the minus root
    is evaluated through the product identity beta+^2 beta-^2 = (ac-|xi|^2)/b
    to avoid cancellation.
    """
    a, b, c = params.a, params.b, params.c
    x2 = params.xi_abs ** 2
    if params.xi_abs == 0.0 or params.b == 1.0:
        warnings.warn(
            "coefficient matrices commute; the frequency roots are the two "
            "scalar-channel values",
            CommutativeInput,
            stacklevel=2,
        )
    disc = (c - a * b) ** 2 + 4.0 * x2 * b
    if disc < 1e-14:
        warnings.warn(
            f"frequency roots collide (discriminant {disc:.3e} < 1e-14)",
            DegenerateRoots,
            stacklevel=2,
        )
    bsq_plus = (a * b + c + math.sqrt(disc)) / (2.0 * b)
    bsq_minus = (a * c - x2) / (b * bsq_plus)
    return (
        _make_root(params, Sign.PLUS, bsq_plus),
        _make_root(params, Sign.MINUS, bsq_minus),
    )


def _pick_root(params: CanonicalParams, sign) -> BetaRoot:
    roots = beta_roots(params)
    return roots[0] if _coerce_sign(sign) is Sign.PLUS else roots[1]


def _lambda(params: CanonicalParams, root: BetaRoot, factor: float) -> float:
    defect = root.defect
    dscale = params.a + params.c + (1.0 + params.b) * root.beta_sq
    if abs(defect) <= 1e-12 * dscale:
        raise SingularDenominator(
            f"defect {defect:.3e} vanishes relative to scale {dscale:.3e} "
            f"for the {root.sign.value} root")
    num = params.a * params.b + params.c - 2.0 * root.beta_sq * params.b
    return factor * root.beta * num / defect


def lambda_even(params: CanonicalParams, root: BetaRoot) -> float:
    """Candidate eigenvalue 5 beta (ab + c - 2 beta^2 b) / defect."""
    return _lambda(params, root, 5.0)


def lambda_odd(params: CanonicalParams, root: BetaRoot) -> float:
    """Candidate eigenvalue 7 beta (ab + c - 2 beta^2 b) / defect (= 1.4x even)."""
    return _lambda(params, root, 7.0)


def _membership(params: CanonicalParams, root: BetaRoot,
                parity: Parity) -> tuple[float, float, float]:
    """(lambda, residual, scale) for the finite-support condition.

    even: 2 lam defect = 5 beta (beta - lam)(beta b - lam)
    odd:  6 lam defect = 7 beta (3 beta - lam)(3 beta b - lam)
    """
    beta, b = root.beta, params.b
    if parity is Parity.EVEN:
        lam = _lambda(params, root, 5.0)
        lhs = 2.0 * lam * root.defect
        rhs = 5.0 * beta * (beta - lam) * (beta * b - lam)
    else:
        lam = _lambda(params, root, 7.0)
        lhs = 6.0 * lam * root.defect
        rhs = 7.0 * beta * (3.0 * beta - lam) * (3.0 * beta * b - lam)
    return lam, lhs - rhs, abs(lhs) + abs(rhs)


def membership_even(params: CanonicalParams, sign) -> tuple[float, float]:
    """(residual, scale) of the even condition at the given frequency sign."""
    root = _pick_root(params, sign)
    _, res, scale = _membership(params, root, Parity.EVEN)
    return res, scale


def membership_odd(params: CanonicalParams, sign) -> tuple[float, float]:
    """(residual, scale) of the odd condition at the given frequency sign."""
    root = _pick_root(params, sign)
    _, res, scale = _membership(params, root, Parity.ODD)
    return res, scale


def residual_even(params: CanonicalParams, sign) -> float:
    return membership_even(params, sign)[0]


def residual_odd(params: CanonicalParams, sign) -> float:
    return membership_odd(params, sign)[0]


@dataclass(frozen=True)
class ClosedFormSolution:
    """A constructed two-block eigenvector with its diagnostics.

    lam is the eigenvalue (an attribute named lambda is not expressible in
    Python); gamma and gamma_tilde are the coordinates of the bottom block
    in the (kernel, companion) frame, computed with the coupling phase
    rotated away so they are invariant under xi -> xi e^{i theta}.
    """

    parity: Parity
    beta_root: BetaRoot
    lam: float
    gamma: complex
    gamma_tilde: complex
    coeff_blocks: CoeffVector
    residual_membership: float
    residual_scale: float
    residual_eigen: float

    @property
    def sign(self) -> Sign:
        return self.beta_root.sign


def state_residual(params: CanonicalParams, alpha: float, v, lam: float) -> float:
    """Relative eigen-residual ||Hv - lam v|| / ||v|| via the matrix-free action.

    Exact for finitely supported coefficients: the action is evaluated on
    one extra block, so no truncation error enters.
    """
    hv = apply_operator(v, params, alpha)
    blocks = v.blocks if isinstance(v, CoeffVector) else np.atleast_2d(np.asarray(v))
    nv = float(np.linalg.norm(blocks))
    if nv == 0.0:
        raise ValueError("zero coefficient vector has no residual")
    diff = hv.blocks.astype(complex, copy=True)
    diff[: blocks.shape[0]] -= lam * blocks
    return float(np.linalg.norm(diff)) / nv


def construct_phi(params: CanonicalParams, sign, parity=Parity.EVEN,
                  tol_membership: float = 1e-8) -> ClosedFormSolution:
    """Build the finite-support eigenvector at an on-manifold point.

    The bottom ansatz block solves the constant-order equation
    (base B - lam) u_bot = mult * B u_top with base = beta (even) or 3 beta
    (odd); the quadratic-order equation is then checked and its failure
    raised as InconsistentSystem.  Points whose membership residual exceeds
    tol_membership * scale are rejected as OffManifold.
    """
    sign = _coerce_sign(sign)
    parity = _coerce_parity(parity)
    root = _pick_root(params, sign)
    even = parity is Parity.EVEN
    lam, res, scale = _membership(params, root, parity)
    if abs(res) > tol_membership * scale:
        raise OffManifold(
            f"membership residual {res:.6e} exceeds tol {tol_membership:g} * "
            f"scale {scale:.6e} for parity={parity.value}, sign={sign.value}")
    beta, b = root.beta, params.b
    if abs(params.a - root.beta_sq) <= 1e-12 * (params.a + root.beta_sq):
        raise OffManifold(
            "a equals beta^2 here, so the companion direction degenerates "
            "and no finite-support state exists at this point")
    u_top = root.kernel_u2
    if float(np.linalg.norm(u_top)) == 0.0:
        raise SingularEncountered(
            "kernel direction is the zero vector (decoupled scalar channel); "
            "this construction does not apply")
    mult, coef = (2.0, 5.0) if even else (6.0, 7.0)
    base = beta if even else 3.0 * beta
    d0 = base - lam
    d1 = base * b - lam
    if min(abs(d0), abs(d1)) <= 1e-14 * (base * (1.0 + b) + abs(lam)):
        raise SingularEncountered(
            f"resolvent denominators vanish: base-lam={d0:.3e}, "
            f"base*b-lam={d1:.3e}")
    u_bot = mult * np.array([u_top[0] / d0, b * u_top[1] / d1])

    # quadratic-order consistency: (At - beta^2 Bt) u_bot + (coef beta Bt - lam) u_top = 0
    at, bt = params.matrices()
    kmat = at - root.beta_sq * bt
    cons = kmat @ u_bot + coef * beta * (bt @ u_top) - lam * u_top
    cons_scale = (np.linalg.norm(kmat) * np.linalg.norm(u_bot)
                  + (coef * beta * np.linalg.norm(bt) + abs(lam))
                  * np.linalg.norm(u_top))
    if float(np.linalg.norm(cons)) > 1e-8 * cons_scale:
        raise InconsistentSystem(
            f"quadratic-order equation violated: |r| = {np.linalg.norm(cons):.3e} "
            f"against scale {cons_scale:.3e}")

    # gamma coordinates in the phase-reduced frame (coupling made real >= 0)
    xi_abs = params.xi_abs
    u2r = np.array([params.c - root.beta_sq * params.b, -xi_abs])
    u2tr = np.array([params.a - root.beta_sq, xi_abs])
    u_botr = mult * np.array([u2r[0] / d0, b * u2r[1] / d1])
    if xi_abs == 0.0:
        gamma = complex(u_botr[0] / u2r[0]) if u2r[0] != 0.0 else 0j
        gamma_tilde = 0j
    else:
        frame = np.column_stack([u2r, u2tr])
        try:
            coords = np.linalg.solve(frame, u_botr)
        except np.linalg.LinAlgError as exc:
            raise SingularEncountered(f"frame matrix is singular: {exc}") from exc
        gamma, gamma_tilde = complex(coords[0]), complex(coords[1])
        target = coef * beta * b - lam
        got = gamma_tilde * root.defect
        if complex(params.xi).imag == 0.0 and abs(got - target) > 1e-8 * (
                abs(got) + abs(target)):
            raise InconsistentSystem(
                f"companion coordinate violates gamma_tilde * defect = "
                f"{coef:g} beta b - lam: {got:.6e} vs {target:.6e}")

    # ansatz blocks -> orthonormal-basis coefficient blocks
    if even:
        v_bot = u_bot + u_top / (2.0 * beta)
        v_top = u_top / (math.sqrt(2.0) * beta)
    else:
        v_bot = u_bot + 3.0 * u_top / (2.0 * beta)
        v_top = math.sqrt(6.0) * u_top / (2.0 * beta)
    phi = CoeffVector(parity, np.vstack([v_bot, v_top]))
    residual_eigen = state_residual(params, beta, phi, lam)
    return ClosedFormSolution(
        parity=parity,
        beta_root=root,
        lam=lam,
        gamma=gamma,
        gamma_tilde=gamma_tilde,
        coeff_blocks=phi,
        residual_membership=res,
        residual_scale=scale,
        residual_eigen=residual_eigen,
    )


def verify_eigenpair(sol: ClosedFormSolution, params: CanonicalParams) -> float:
    """Recompute the eigen-residual of a constructed solution; idempotent."""
    return state_residual(params, sol.beta_root.beta, sol.coeff_blocks, sol.lam)
