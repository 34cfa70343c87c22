"""Block-tridiagonal sector operators in the scaled Hermite basis.

Expanding a two-component state over phi_{2k} (even sector) or phi_{2k+1}
(odd sector) with basis scale alpha turns the operator

    H = Bt * (-d^2/dx^2) + At * x^2

into a block tridiagonal matrix acting on the 2-vector coefficients.  With
M = At/alpha + alpha*Bt and N = At/alpha - alpha*Bt the doubled operator has
diagonal blocks (4k+1)M (even) or (4k+3)M (odd) and couplings
sqrt(2k)sqrt(2k-1)N (even) or sqrt(2k)sqrt(2k+1)N (odd); storage holds the
halved matrix so its eigenvalues are the physical ones.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ZeroDimension
from .hermite import default_grid, hermite_table
from .matrix_core import CanonicalParams, m_alpha, n_alpha


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"


def _coerce_parity(parity) -> Parity:
    if isinstance(parity, Parity):
        return parity
    return Parity(str(parity).lower())


@dataclass(frozen=True)
class CoeffVector:
    """Coefficient blocks of one parity sector, shape (n_blocks, 2)."""

    parity: Parity
    blocks: np.ndarray

    def __post_init__(self):
        blocks = np.atleast_2d(np.asarray(self.blocks))
        if blocks.ndim != 2 or blocks.shape[1] != 2:
            raise ValueError(f"blocks must have shape (n, 2), got {blocks.shape}")
        object.__setattr__(self, "parity", _coerce_parity(self.parity))
        object.__setattr__(self, "blocks", blocks)

    @property
    def n_blocks(self) -> int:
        return self.blocks.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.blocks))


def _coefficients(parity: Parity, n_blocks: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal scalars s_k and coupling scalars t_k (t_0 unused)."""
    k = np.arange(n_blocks, dtype=float)
    if parity is Parity.EVEN:
        s = 4.0 * k + 1.0
        t = np.sqrt(2.0 * k) * np.sqrt(np.maximum(2.0 * k - 1.0, 0.0))
    else:
        s = 4.0 * k + 3.0
        t = np.sqrt(2.0 * k) * np.sqrt(2.0 * k + 1.0)
    return s, t


@dataclass(frozen=True)
class SectorOperator:
    """Dense one-sector truncation; matrix is exactly Hermitian."""

    parity: Parity
    alpha: float
    n_blocks: int
    matrix: np.ndarray

    def norm_bound(self) -> float:
        """Cheap upper bound on the operator 2-norm (row-sum bound)."""
        return float(np.abs(self.matrix).sum(axis=1).max())

    def dump_csv(self, fileobj) -> None:
        """Row-major CSV dump for debugging; complex entries as 're+imj'."""
        close = False
        if isinstance(fileobj, str):
            fileobj = open(fileobj, "w")
            close = True
        try:
            cmplx = np.iscomplexobj(self.matrix)
            for row in self.matrix:
                cells = []
                for z in row:
                    if cmplx:
                        cells.append(f"{z.real:.17g}{z.imag:+.17g}j")
                    else:
                        cells.append(f"{z:.17g}")
                fileobj.write(",".join(cells) + "\n")
        finally:
            if close:
                fileobj.close()


def assemble_sector(params: CanonicalParams, alpha: float, parity,
                    n_blocks: int) -> SectorOperator:
    """Dense 2*n_blocks x 2*n_blocks truncation of one parity sector."""
    parity = _coerce_parity(parity)
    if n_blocks <= 0:
        raise ZeroDimension(f"n_blocks must be positive, got {n_blocks}")
    m = m_alpha(params, alpha)
    n = n_alpha(params, alpha)
    s, t = _coefficients(parity, n_blocks)
    dtype = complex if np.iscomplexobj(m) else float
    h = np.zeros((2 * n_blocks, 2 * n_blocks), dtype=dtype)
    for k in range(n_blocks):
        h[2 * k:2 * k + 2, 2 * k:2 * k + 2] = 0.5 * s[k] * m
    for k in range(1, n_blocks):
        blk = 0.5 * t[k] * n
        h[2 * (k - 1):2 * k, 2 * k:2 * k + 2] = blk
        h[2 * k:2 * k + 2, 2 * (k - 1):2 * k] = blk.conj().T
    return SectorOperator(parity, float(alpha), n_blocks, h)


def apply_operator(v, params: CanonicalParams, alpha: float,
                   parity=None) -> CoeffVector:
    """Matrix-free action of the sector operator on coefficient blocks.

    The result has one more block than the input; indices beyond the input
    are treated as zero, so the action is exact for finitely supported
    coefficients.
    """
    if isinstance(v, CoeffVector):
        if parity is not None and _coerce_parity(parity) is not v.parity:
            raise ValueError("parity argument disagrees with the vector's parity")
        parity = v.parity
        blocks = v.blocks
    else:
        if parity is None:
            raise ValueError("parity is required for bare arrays")
        parity = _coerce_parity(parity)
        blocks = np.atleast_2d(np.asarray(v))
    n = blocks.shape[0]
    m = m_alpha(params, alpha)
    nm = n_alpha(params, alpha)
    s, t = _coefficients(parity, n + 1)
    dtype = complex if (np.iscomplexobj(m) or np.iscomplexobj(blocks)) else float
    out = np.zeros((n + 1, 2), dtype=dtype)
    mv = blocks @ m.T
    nv = blocks @ nm.T
    out[:n] += 0.5 * s[:n, None] * mv
    out[1:n + 1] += 0.5 * t[1:n + 1, None] * nv          # T_k v_{k-1}
    out[:n - 1] += 0.5 * t[1:n, None] * nv[1:]           # T_{k+1} v_{k+1}
    return CoeffVector(parity, out)


def reconstruct(v, alpha: float, parity=None, xs=None):
    """Pointwise values of the two component functions on a grid.

    Defaults to the uniform grid of half-width 20/sqrt(alpha) with 4001
    points.  Returns (xs, comp0, comp1); components are complex only when
    the coefficients are.
    """
    if isinstance(v, CoeffVector):
        parity = v.parity
        blocks = v.blocks
    else:
        if parity is None:
            raise ValueError("parity is required for bare arrays")
        parity = _coerce_parity(parity)
        blocks = np.atleast_2d(np.asarray(v))
    if xs is None:
        xs = default_grid(alpha)
    xs = np.asarray(xs, dtype=float)
    n = blocks.shape[0]
    offset = 0 if parity is Parity.EVEN else 1
    table = hermite_table(2 * (n - 1) + offset, alpha, xs)
    rows = table[offset::2]
    comp0 = blocks[:, 0] @ rows
    comp1 = blocks[:, 1] @ rows
    return xs, comp0, comp1


__all__ = [
    "Parity", "CoeffVector", "SectorOperator",
    "assemble_sector", "apply_operator", "reconstruct",
]
