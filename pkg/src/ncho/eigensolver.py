"""Dense Hermitian eigensolver: Householder reduction + implicit-shift QL.

Self-contained path for the moderate dimensions used here (<= ~1200).  A
complex Hermitian (or real symmetric) matrix is reduced to real tridiagonal
form by Householder reflections with the unitary factor accumulated, the
off-diagonal is made nonnegative by a diagonal phase similarity, and the
tridiagonal problem is finished by QL sweeps with implicit Wilkinson-style
shifts, rotations applied to the accumulated transform.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceFailure, NotHermitian

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dependency normally
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

_EPS = float(np.finfo(np.float64).eps)

# per-eigenvalue sweep cap; the total over the matrix is <= 30 * dim
_MAX_SWEEPS = 30


def _householder_tridiag(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reduce Hermitian a to tridiagonal (d, e) with accumulated unitary q.

    q^H a q is tridiagonal with diagonal d and subdiagonal e (complex for
    complex input); a is destroyed.
    """
    n = a.shape[0]
    q = np.eye(n, dtype=a.dtype)
    for k in range(n - 2):
        x = a[k + 1:, k]
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        v = x.copy()
        phase = x[0] / abs(x[0]) if abs(x[0]) > 0 else 1.0
        v[0] += phase * nx
        nv = np.linalg.norm(v)
        if nv == 0.0:
            continue
        v /= nv
        head = -phase * nx
        a[k + 1:, k] = 0.0
        a[k + 1, k] = head
        a[k, k + 1:] = 0.0
        a[k, k + 1] = np.conj(head)
        sub = a[k + 1:, k + 1:]
        w = sub @ v
        mu = np.vdot(v, w)
        u = w - mu * v
        sub -= 2.0 * np.outer(v, u.conj())
        sub -= 2.0 * np.outer(u, v.conj())
        qs = q[:, k + 1:]
        qs -= 2.0 * np.outer(qs @ v, v.conj())
    d = np.ascontiguousarray(np.real(np.diag(a)))
    e = np.diag(a, -1).copy()
    return d, e, q


@njit(cache=True)
def _ql_implicit(d, e, z, max_sweeps):  # pragma: no cover - exercised via wrapper
    """In-place QL with implicit shifts on (d, e); rotations applied to z.

    e holds the n-1 subdiagonals in e[0..n-2] with e[n-1] = 0.  Returns 0 on
    success or 1 + index of the eigenvalue that failed to converge.
    """
    n = d.shape[0]
    nrow = z.shape[0]
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                return l + 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            if g >= 0.0:
                g = d[m] - d[l] + e[l] / (g + r)
            else:
                g = d[m] - d[l] + e[l] / (g - r)
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(nrow):
                    f2 = z[k, i + 1]
                    z[k, i + 1] = s * z[k, i] + c * f2
                    z[k, i] = c * z[k, i] - s * f2
            if not underflow:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    return 0


def hermitian_eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Returns (w, v) with v's columns orthonormal eigenvectors; v is real for
    real symmetric input.  Raises ConvergenceFailure if a QL eigenvalue
    exceeds the sweep cap (30 per eigenvalue).
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {h.shape}")
    n = h.shape[0]
    dev = np.linalg.norm(h - h.conj().T)
    if dev > 1e-12 * max(np.linalg.norm(h), 1e-300):
        raise NotHermitian(f"matrix deviates from Hermitian symmetry by {dev:.3e}")
    if n == 1:
        return np.array([h[0, 0].real]), np.ones((1, 1), dtype=h.dtype)
    cmplx = np.iscomplexobj(h)
    a = np.array(0.5 * (h + h.conj().T), dtype=complex if cmplx else float)
    d, e_raw, q = _householder_tridiag(a)
    e = np.zeros(n)
    if cmplx:
        # diagonal phase similarity making the subdiagonal real nonnegative:
        # with D = diag(phases), (QD)^H A (QD) has subdiagonal |e|
        phases = np.ones(n, dtype=complex)
        for i in range(n - 1):
            ae = abs(e_raw[i])
            e[i] = ae
            if ae > 0.0:
                phases[i + 1] = phases[i] * e_raw[i] / ae
            else:
                phases[i + 1] = phases[i]
        z = q * phases[None, :]
    else:
        e[:n - 1] = e_raw.real
        # QL prefers nonnegative subdiagonals; fold signs into the transform
        signs = np.ones(n)
        for i in range(n - 1):
            if e[i] < 0.0:
                signs[i + 1] = -signs[i]
            else:
                signs[i + 1] = signs[i]
            e[i] = abs(e[i])
        z = q * signs[None, :]
    z = np.ascontiguousarray(z)
    status = _ql_implicit(d, e, z, _MAX_SWEEPS)
    if status != 0:
        raise ConvergenceFailure(
            f"QL sweep cap exceeded for eigenvalue index {status - 1}")
    order = np.argsort(d, kind="stable")
    return d[order], z[:, order]
