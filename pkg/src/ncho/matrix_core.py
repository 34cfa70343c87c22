"""2x2 Hermitian pairs and their canonical form.

A pair (A, B) of positive definite 2x2 Hermitian matrices is reduced to
B = b1 * U^H * diag(1, b) * U with b = b2/b1 >= 1 and A = b1 * U^H * At * U,
where At = [[a, xi], [conj(xi), c]].  The canonical tetrad (b, a, c, xi)
together with (U, b1) reproduces the pair exactly; the original operator's
eigenvalues are b1 times the canonical ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, NotPositiveDefinite, NonPositiveAlpha, OutsideRegion

_HERM_TOL = 1e-12


def as_herm2(m) -> np.ndarray:
    """Validate a 2x2 Hermitian matrix and return its exactly Hermitian part."""
    arr = np.asarray(m)
    if arr.shape != (2, 2):
        raise NotHermitian(f"expected a 2x2 matrix, got shape {arr.shape}")
    arr = arr.astype(complex)
    dev = np.linalg.norm(arr - arr.conj().T)
    if dev > _HERM_TOL * max(np.linalg.norm(arr), 1e-300):
        raise NotHermitian(f"matrix deviates from Hermitian symmetry by {dev:.3e}")
    herm = 0.5 * (arr + arr.conj().T)
    if np.abs(herm.imag).max() == 0.0:
        return herm.real
    return herm


def is_positive_definite(m) -> bool:
    arr = as_herm2(m)
    tr = arr[0, 0].real + arr[1, 1].real
    det = (arr[0, 0].real * arr[1, 1].real - abs(arr[0, 1]) ** 2)
    return tr > 0.0 and det > 0.0


@dataclass(frozen=True)
class HermitianPair:
    """A validated pair of positive definite 2x2 Hermitian matrices."""

    a_mat: np.ndarray
    b_mat: np.ndarray


def validate_pair(a_mat, b_mat) -> HermitianPair:
    """Check Hermiticity first, then strict positive definiteness."""
    a_mat = as_herm2(a_mat)
    b_mat = as_herm2(b_mat)
    for name, m in (("A", a_mat), ("B", b_mat)):
        if not (m[0, 0].real > 0 and m[1, 1].real > 0
                and m[0, 0].real * m[1, 1].real - abs(m[0, 1]) ** 2 > 0):
            raise NotPositiveDefinite(f"{name} is not positive definite")
    return HermitianPair(a_mat, b_mat)


def eig2(m) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigendecomposition of a 2x2 Hermitian matrix.

    Returns (w, v) with w ascending and v's columns the orthonormal
    eigenvectors.  The small root is formed cancellation-free.
    """
    m = as_herm2(m)
    p = m[0, 0].real
    q = m[1, 1].real
    z = complex(m[0, 1])
    az = abs(z)
    h = 0.5 * (p - q)
    r = np.hypot(h, az)
    mean = 0.5 * (p + q)
    w = np.array([mean - r, mean + r])
    if az == 0.0:
        v = np.eye(2, dtype=m.dtype)
        if p > q:
            v = v[:, ::-1].copy()
            w = np.array([q, p])
        return w, v
    # eigenvector for the larger root: (z, r - h); r - h via |z|^2/(r + h)
    # when h > 0 to avoid cancellation
    t = az * az / (r + h) if h > 0 else r - h
    # pre-scale by the largest component so subnormal entries do not
    # underflow to a zero norm
    big = max(az, abs(t))
    hi = np.array([z / big, t / big], dtype=complex)
    hi /= np.linalg.norm(hi)
    lo = np.array([-np.conj(hi[1]), np.conj(hi[0])], dtype=complex)
    v = np.column_stack([lo, hi])
    if np.abs(v.imag).max() == 0.0:
        v = v.real
    return w, v


@dataclass(frozen=True)
class CanonicalParams:
    """Canonical tetrad (b, a, c, xi) plus the transform (u, b1) back to the pair."""

    b: float
    a: float
    c: float
    xi: complex
    u: np.ndarray
    b1: float

    def __post_init__(self):
        if self.b < 1.0:
            raise OutsideRegion(f"b must be >= 1, got {self.b}")
        if not (self.a > 0.0 and self.c > 0.0):
            raise OutsideRegion(f"need a, c > 0, got a={self.a}, c={self.c}")
        if abs(self.xi) ** 2 >= self.a * self.c:
            raise OutsideRegion(
                f"|xi|^2 = {abs(self.xi)**2:.6g} must stay below a*c = {self.a * self.c:.6g}")

    @property
    def xi_abs(self) -> float:
        return abs(self.xi)

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """Canonical (At, Bt); complex dtype only when xi has a phase."""
        if complex(self.xi).imag == 0.0:
            at = np.array([[self.a, complex(self.xi).real],
                           [complex(self.xi).real, self.c]])
        else:
            at = np.array([[self.a, self.xi],
                           [np.conj(self.xi), self.c]], dtype=complex)
        bt = np.diag([1.0, self.b]).astype(at.dtype)
        return at, bt

    def original_pair(self) -> HermitianPair:
        at, bt = self.matrices()
        uh = self.u.conj().T
        return HermitianPair(self.b1 * uh @ at @ self.u, self.b1 * uh @ bt @ self.u)


def from_tetrad(b: float, a: float, c: float, xi: complex = 0.0) -> CanonicalParams:
    """Canonical parameters given directly (identity transform, b1 = 1)."""
    return CanonicalParams(float(b), float(a), float(c), complex(xi), np.eye(2), 1.0)


def canonicalize(pair: HermitianPair) -> CanonicalParams:
    """Reduce a validated pair to canonical form."""
    w, v = eig2(pair.b_mat)
    b1, b2 = float(w[0]), float(w[1])
    if b1 <= 0:
        raise NotPositiveDefinite("B is not positive definite")
    u = v.conj().T
    at = (u @ pair.a_mat @ u.conj().T) / b1
    a = float(at[0, 0].real)
    c = float(at[1, 1].real)
    xi = complex(at[0, 1])
    b = b2 / b1
    if b < 1.0:  # roundoff on a scalar B
        b = 1.0
    return CanonicalParams(b, a, c, xi, u, b1)


def m_alpha(params: CanonicalParams, alpha: float) -> np.ndarray:
    """alpha**-1 * At + alpha * Bt (positive definite for alpha > 0)."""
    if alpha <= 0:
        raise NonPositiveAlpha(f"alpha must be positive, got {alpha}")
    at, bt = params.matrices()
    return at / alpha + alpha * bt


def n_alpha(params: CanonicalParams, alpha: float) -> np.ndarray:
    """alpha**-1 * At - alpha * Bt (singular exactly at the squared frequencies)."""
    if alpha <= 0:
        raise NonPositiveAlpha(f"alpha must be positive, got {alpha}")
    at, bt = params.matrices()
    return at / alpha - alpha * bt


def commutator_norm(pair: HermitianPair) -> float:
    """Frobenius norm of AB - BA."""
    g = pair.a_mat @ pair.b_mat - pair.b_mat @ pair.a_mat
    return float(np.linalg.norm(g))
