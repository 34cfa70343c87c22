"""Maps where finite-support eigenpairs live in parameter space.

The four membership conditions (even/odd parity x plus/minus frequency root)
cut codimension-1 zero sets out of the region a, c > 0, b > 1, |xi|^2 < ac.
This module classifies points and dense grids against those conditions with
a single vectorized kernel, produces the exact one-parameter families on the
c = a b plane, polishes roots along rays, and exports grids for rendering.

Residuals are reported next to a pointwise scale |lhs| + |rhs|; membership
at tolerance t means |residual| <= t * scale.  The residual of a tetrad
(b, r a, r c, r |xi|) is r^{3/2} times the original and the scale obeys the
same law, so relative flags are constant along those rays.
"""

import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .closed_form import Sign, _coerce_sign
from .errors import (
    ConvergenceFailure,
    DomainError,
    GridBudgetExceeded,
    InfeasibleFamilyPoint,
    OutOfInterval,
    OutsideRegion,
    RootNotFound,
    SingularEncountered,
)
from .matrix_core import CanonicalParams, from_tetrad
from .operator_assembly import Parity, _coerce_parity

FAMILY_NAMES = ("even_plus", "even_minus", "odd_plus", "odd_minus")

_MARGIN = 1e-12
_MAX_AXIS = 512
_MAX_SAMPLES = 10 ** 8


def family_index(parity, sign) -> int:
    """Slot of a (parity, sign) family in all length-4 outputs."""
    parity = _coerce_parity(parity)
    sign = _coerce_sign(sign)
    return (0 if parity is Parity.EVEN else 2) + (0 if sign is Sign.PLUS else 1)


def residual_mesh(b, a, c, xi_abs: float):
    """Vectorized membership residuals over broadcastable tetrad arrays.

    Returns (residuals, scales, singular, inside) where the first three have
    a leading axis of 4 in FAMILY_NAMES order.  Cells outside the open
    region, or where the rational eigenvalue formula loses its denominator,
    carry NaN residuals and a raised singular flag respectively.
    """
    b = np.asarray(b, dtype=float)
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    xi_abs = float(xi_abs)
    shape = np.broadcast_shapes(b.shape, a.shape, c.shape)
    res = np.full((4,) + shape, np.nan)
    scale = np.full((4,) + shape, np.nan)
    singular = np.zeros((4,) + shape, dtype=bool)
    inside = ((b > 1.0 + _MARGIN) & (a > _MARGIN) & (c > _MARGIN)
              & (xi_abs ** 2 < a * c * (1.0 - _MARGIN)))
    inside = np.broadcast_to(inside, shape)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        x2 = xi_abs ** 2
        disc = (c - a * b) ** 2 + 4.0 * x2 * b
        bsq_plus = (a * b + c + np.sqrt(disc)) / (2.0 * b)
        bsq_minus = (a * c - x2) / (b * bsq_plus)
        for si, bsq in ((0, bsq_plus), (1, bsq_minus)):
            beta = np.sqrt(np.where(inside & (bsq > 0.0), bsq, np.nan))
            defect = a + c - (1.0 + b) * bsq
            sing = np.abs(defect) <= 1e-12 * (a + c + (1.0 + b) * bsq)
            lam = 5.0 * beta * (a * b + c - 2.0 * bsq * b) / np.where(sing, 1.0, defect)
            lhs = 2.0 * lam * defect
            rhs = 5.0 * beta * (beta - lam) * (beta * b - lam)
            res[0 + si] = lhs - rhs
            scale[0 + si] = np.abs(lhs) + np.abs(rhs)
            singular[0 + si] = sing & inside
            lam = 1.4 * lam
            lhs = 6.0 * lam * defect
            rhs = 7.0 * beta * (3.0 * beta - lam) * (3.0 * beta * b - lam)
            res[2 + si] = lhs - rhs
            scale[2 + si] = np.abs(lhs) + np.abs(rhs)
            singular[2 + si] = sing & inside
    bad = singular | ~np.broadcast_to(inside, singular.shape)
    res[bad] = np.nan
    scale[bad] = np.nan
    return res, scale, singular, inside


def _flags_from(res, scale, tol: float):
    with np.errstate(invalid="ignore"):
        return np.abs(res) <= tol * scale


def count_flags(flags) -> dict:
    """Flagged-cell count per family from a (4, ...) boolean array."""
    return {name: int(np.asarray(flags)[i].sum())
            for i, name in enumerate(FAMILY_NAMES)}


def count_co_flags(flags) -> dict:
    """Simultaneous-flag counts for all six family pairs."""
    f = np.asarray(flags)
    out = {}
    for i in range(4):
        for j in range(i + 1, 4):
            out[f"{FAMILY_NAMES[i]}&{FAMILY_NAMES[j]}"] = int(
                (f[i] & f[j]).sum())
    return out


@dataclass(frozen=True)
class RegionSample:
    """One classified tetrad: residual, flag, and singularity per family."""

    tetrad: tuple
    residuals: np.ndarray
    flags: np.ndarray
    singular_flags: np.ndarray
    scales: np.ndarray
    tol: float


def classify_point(tetrad, tol: float = 1e-3) -> RegionSample:
    """Evaluate all four membership conditions at one interior tetrad.

    Never raises on a vanishing eigenvalue denominator; the affected
    families come back NaN with their singular flag set.
    """
    if isinstance(tetrad, CanonicalParams):
        vals = (tetrad.b, tetrad.a, tetrad.c, tetrad.xi_abs)
    else:
        vals = tuple(float(t) for t in tetrad)
        if len(vals) != 4:
            raise DomainError(f"tetrad needs 4 entries, got {len(vals)}")
    b, a, c, xi_abs = vals
    if not b > 1.0 + _MARGIN:
        raise OutsideRegion(f"need b > 1, got b = {b}")
    if not (a > _MARGIN and c > _MARGIN):
        raise OutsideRegion(f"need a, c > 0, got a = {a}, c = {c}")
    if xi_abs < 0.0:
        raise OutsideRegion(f"need |xi| >= 0, got {xi_abs}")
    if not xi_abs ** 2 < a * c * (1.0 - _MARGIN):
        raise OutsideRegion(
            f"need |xi|^2 < a c, got {xi_abs ** 2:.6g} vs {a * c:.6g}")
    res, scale, singular, _ = residual_mesh(
        np.float64(b), np.float64(a), np.float64(c), xi_abs)
    return RegionSample((b, a, c, xi_abs), res, _flags_from(res, scale, tol),
                        singular, scale, float(tol))


@dataclass(frozen=True)
class ScanGrid:
    """Dense classification over a box grid at fixed |xi|.

    Arrays are indexed [family, ib, ia, ic] in FAMILY_NAMES order with the
    b axis outermost and the c axis innermost (row-major export order).
    """

    b_axis: np.ndarray
    a_axis: np.ndarray
    c_axis: np.ndarray
    xi_abs: float
    tol: float
    residuals: np.ndarray
    flags: np.ndarray
    singular_flags: np.ndarray
    inside: np.ndarray

    @property
    def shape(self) -> tuple:
        return (self.b_axis.size, self.a_axis.size, self.c_axis.size)

    def flag_counts(self) -> dict:
        return count_flags(self.flags)

    def co_flag_counts(self) -> dict:
        return count_co_flags(self.flags)


def _axis(rng, resolution: int, name: str) -> np.ndarray:
    vals = tuple(float(v) for v in rng)
    if len(vals) == 3:
        lo, hi, n = vals[0], vals[1], int(rng[2])
    elif len(vals) == 2:
        lo, hi, n = vals[0], vals[1], int(resolution)
    else:
        raise DomainError(f"{name} range needs (lo, hi) or (lo, hi, n)")
    if not lo <= hi:
        raise DomainError(f"{name} range is reversed: {lo} > {hi}")
    if n < 1 or n > _MAX_AXIS:
        raise GridBudgetExceeded(
            f"{name} resolution {n} outside [1, {_MAX_AXIS}]")
    return np.linspace(lo, hi, n)


def _thread_budget(n_slices: int) -> int:
    env = os.environ.get("NCHO_THREADS")
    if env is not None:
        try:
            budget = int(env)
        except ValueError:
            raise DomainError(f"NCHO_THREADS must be an integer, got {env!r}")
        if budget < 1:
            raise DomainError(f"NCHO_THREADS must be positive, got {budget}")
    else:
        budget = os.cpu_count() or 1
    return max(1, min(budget, n_slices))


def scan_grid(b_range, a_range, c_range, resolution: int = 64,
              tol: float = 1e-3, xi_abs: float = 1.0) -> ScanGrid:
    """Classify a dense (b, a, c) box at fixed |xi|; deterministic.

    Ranges are (lo, hi) pairs sharing `resolution` or (lo, hi, n) triples.
    Work is split along the b axis across threads (NCHO_THREADS caps the
    pool); slices land in disjoint slots so the result never depends on
    scheduling.
    """
    b_axis = _axis(b_range, resolution, "b")
    a_axis = _axis(a_range, resolution, "a")
    c_axis = _axis(c_range, resolution, "c")
    if not b_axis[0] > 1.0 + _MARGIN:
        raise OutsideRegion(f"b range must start above 1, got {b_axis[0]}")
    if not (a_axis[0] > 0.0 and c_axis[0] > 0.0):
        raise OutsideRegion("a and c ranges must be positive")
    if float(xi_abs) < 0.0:
        raise OutsideRegion(f"need |xi| >= 0, got {xi_abs}")
    nb, na, nc = b_axis.size, a_axis.size, c_axis.size
    if nb * na * nc > _MAX_SAMPLES:
        raise GridBudgetExceeded(
            f"{nb * na * nc} samples exceed the {_MAX_SAMPLES} budget")
    res = np.empty((4, nb, na, nc))
    scale = np.empty((4, nb, na, nc))
    singular = np.empty((4, nb, na, nc), dtype=bool)
    inside = np.empty((nb, na, nc), dtype=bool)
    a_mesh = a_axis[:, None]
    c_mesh = c_axis[None, :]

    def work(sl: slice) -> None:
        r, s, g, ins = residual_mesh(b_axis[sl, None, None], a_mesh, c_mesh,
                                     xi_abs)
        res[:, sl] = r
        scale[:, sl] = s
        singular[:, sl] = g
        inside[sl] = ins

    n_threads = _thread_budget(nb)
    if n_threads == 1:
        work(slice(0, nb))
    else:
        bounds = np.linspace(0, nb, n_threads + 1).astype(int)
        chunks = [slice(bounds[i], bounds[i + 1]) for i in range(n_threads)
                  if bounds[i] < bounds[i + 1]]
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(work, chunks))
    return ScanGrid(b_axis, a_axis, c_axis, float(xi_abs), float(tol), res,
                    _flags_from(res, scale, tol), singular, inside)


_CSV_HEADER = ("b,a,c,xi_abs,"
               + ",".join(f"res_{n}" for n in FAMILY_NAMES) + ","
               + ",".join(f"flag_{n}" for n in FAMILY_NAMES))


def export_grid(grid: ScanGrid, format: str = "csv") -> bytes:
    """Serialize a grid; CSV rows are row-major (b outer, c inner), 17
    significant digits, flags as 0/1."""
    fmt = str(format).lower()
    if fmt == "csv":
        bb, aa, cc = np.meshgrid(grid.b_axis, grid.a_axis, grid.c_axis,
                                 indexing="ij")
        cols = np.column_stack([
            bb.ravel(), aa.ravel(), cc.ravel(),
            np.full(bb.size, grid.xi_abs),
            grid.residuals.reshape(4, -1).T,
            grid.flags.reshape(4, -1).T.astype(float),
        ])
        buf = io.BytesIO()
        np.savetxt(buf, cols, fmt="%.17g", delimiter=",",
                   header=_CSV_HEADER, comments="")
        return buf.getvalue()
    if fmt == "json":
        obj = {
            "kind": "region-scan",
            "b_axis": grid.b_axis.tolist(),
            "a_axis": grid.a_axis.tolist(),
            "c_axis": grid.c_axis.tolist(),
            "xi_abs": grid.xi_abs,
            "tol": grid.tol,
            "residuals": grid.residuals.tolist(),
            "flags": grid.flags.tolist(),
            "singular_flags": grid.singular_flags.tolist(),
            "inside": grid.inside.tolist(),
            "flag_counts": grid.flag_counts(),
            "co_flag_counts": grid.co_flag_counts(),
        }
        return (json.dumps(obj, sort_keys=True, indent=1) + "\n").encode()
    raise DomainError(f"unknown export format {format!r}")


def parse_grid(data: bytes, format: str = "csv", tol: float = 1e-3) -> ScanGrid:
    """Rebuild a ScanGrid from export_grid output.

    CSV carries no tolerance, so pass the one used at scan time; residuals
    and flags round-trip bitwise either way.
    """
    fmt = str(format).lower()
    if fmt == "csv":
        cols = np.loadtxt(io.BytesIO(data), delimiter=",", skiprows=1,
                          ndmin=2)
        if cols.shape[1] != 12:
            raise DomainError(f"expected 12 CSV columns, got {cols.shape[1]}")
        b_axis = np.unique(cols[:, 0])
        a_axis = np.unique(cols[:, 1])
        c_axis = np.unique(cols[:, 2])
        shape = (b_axis.size, a_axis.size, c_axis.size)
        if math.prod(shape) != cols.shape[0]:
            raise DomainError("CSV rows do not fill the axis grid")
        xi_abs = float(cols[0, 3])
        res = cols[:, 4:8].T.reshape((4,) + shape)
        flags = cols[:, 8:12].T.reshape((4,) + shape).astype(bool)
        _, _, singular, inside = residual_mesh(
            b_axis[:, None, None], a_axis[None, :, None],
            c_axis[None, None, :], xi_abs)
        return ScanGrid(b_axis, a_axis, c_axis, xi_abs, float(tol), res,
                        flags, singular, inside)
    if fmt == "json":
        obj = json.loads(data.decode())
        return ScanGrid(
            np.array(obj["b_axis"], dtype=float),
            np.array(obj["a_axis"], dtype=float),
            np.array(obj["c_axis"], dtype=float),
            float(obj["xi_abs"]),
            float(obj["tol"]),
            np.array(obj["residuals"], dtype=float),
            np.array(obj["flags"], dtype=bool),
            np.array(obj["singular_flags"], dtype=bool),
            np.array(obj["inside"], dtype=bool),
        )
    raise DomainError(f"unknown export format {format!r}")


_EVEN_PLUS_MAX = 9.0 + 4.0 * math.sqrt(5.0)
_ODD_PLUS_MAX = (11.0 + 4.0 * math.sqrt(7.0)) / 3.0


def parametric_family_even(b: float, xi_abs: float = 1.0,
                           sign=Sign.MINUS) -> CanonicalParams:
    """Exact even-membership tetrad on the c = a b plane.

    a = -sigma |xi| (5b^2 - 90b + 5) / (sqrt(b) (9b^2 - 82b + 9)) with
    sigma = +1 on the plus branch (9 < b < 9 + 4 sqrt(5)) and -1 on the
    minus branch (1 < b < 9 or b beyond the plus window).  Points whose a
    fails positivity are rejected rather than returned.
    """
    sign = _coerce_sign(sign)
    b = float(b)
    xi_abs = float(xi_abs)
    if xi_abs <= 0.0:
        raise DomainError(f"xi_abs must be positive, got {xi_abs}")
    p = 5.0 * b * b - 90.0 * b + 5.0
    q = 9.0 * b * b - 82.0 * b + 9.0
    if sign is Sign.PLUS:
        if not 9.0 < b < _EVEN_PLUS_MAX:
            raise OutOfInterval(
                f"plus branch needs 9 < b < {_EVEN_PLUS_MAX:.6f}, got {b}")
        a = -xi_abs * p / (math.sqrt(b) * q)
    else:
        if not (1.0 < b < 9.0 or b > _EVEN_PLUS_MAX):
            raise OutOfInterval(
                f"minus branch needs b in (1, 9) or b > "
                f"{_EVEN_PLUS_MAX:.6f}, got {b}")
        a = xi_abs * p / (math.sqrt(b) * q)
    if not (a > 0.0 and a * math.sqrt(b) > xi_abs):
        raise InfeasibleFamilyPoint(
            f"family formula gives a = {a:.6g} at b = {b}, which leaves "
            f"the region (need a sqrt(b) > |xi|)")
    return from_tetrad(b, a, a * b, xi_abs)


def parametric_family_odd(b: float, xi_abs: float = 1.0,
                          sign=Sign.MINUS) -> CanonicalParams:
    """Exact odd-membership tetrad on the c = a b plane.

    a = -sigma * 7 |xi| (3b^2 - 22b + 3) / (sqrt(b) (33b^2 - 130b + 33))
    with the plus branch on (11/3, (11 + 4 sqrt(7))/3) and the minus branch
    on (1, 11/3) or beyond the plus window.
    """
    sign = _coerce_sign(sign)
    b = float(b)
    xi_abs = float(xi_abs)
    if xi_abs <= 0.0:
        raise DomainError(f"xi_abs must be positive, got {xi_abs}")
    p = 3.0 * b * b - 22.0 * b + 3.0
    q = 33.0 * b * b - 130.0 * b + 33.0
    if sign is Sign.PLUS:
        if not 11.0 / 3.0 < b < _ODD_PLUS_MAX:
            raise OutOfInterval(
                f"plus branch needs 11/3 < b < {_ODD_PLUS_MAX:.6f}, got {b}")
        a = -7.0 * xi_abs * p / (math.sqrt(b) * q)
    else:
        if not (1.0 < b < 11.0 / 3.0 or b > _ODD_PLUS_MAX):
            raise OutOfInterval(
                f"minus branch needs b in (1, 11/3) or b > "
                f"{_ODD_PLUS_MAX:.6f}, got {b}")
        a = 7.0 * xi_abs * p / (math.sqrt(b) * q)
    if not (a > 0.0 and a * math.sqrt(b) > xi_abs):
        raise InfeasibleFamilyPoint(
            f"family formula gives a = {a:.6g} at b = {b}, which leaves "
            f"the region (need a sqrt(b) > |xi|)")
    return from_tetrad(b, a, a * b, xi_abs)


def solve_on_ray(b: float, c_over_a: float, xi_abs: float, sign, parity,
                 bracket, tol_certify: float = 1e-10) -> float:
    """Polish one membership root along a -> (b, a, c_over_a * a, xi_abs).

    The bracket is first clamped to the region (a > |xi| / sqrt(c_over_a)),
    then 64 probes look for sign changes; each candidate is polished with a
    200-iteration Brent solve and certified to |res| < tol_certify * scale.
    The failure message carries the probe trace.
    """
    sign = _coerce_sign(sign)
    parity = _coerce_parity(parity)
    b = float(b)
    ratio = float(c_over_a)
    xi_abs = float(xi_abs)
    if ratio <= 0.0:
        raise DomainError(f"c_over_a must be positive, got {ratio}")
    if not b > 1.0 + _MARGIN:
        raise OutsideRegion(f"need b > 1, got {b}")
    a_lo, a_hi = (float(x) for x in bracket)
    floor = xi_abs / math.sqrt(ratio)
    lo = max(a_lo, floor * (1.0 + 1e-9), _MARGIN)
    if not lo < a_hi:
        raise RootNotFound(
            f"bracket [{a_lo:.6g}, {a_hi:.6g}] has no overlap with the "
            f"region interior (need a > {floor:.6g})")
    idx = family_index(parity, sign)

    def eval_at(a):
        r, s, g, _ = residual_mesh(np.float64(b), np.asarray(a, dtype=float),
                                   np.asarray(a, dtype=float) * ratio, xi_abs)
        return r[idx], s[idx], g[idx]

    probes = np.linspace(lo, a_hi, 64)
    rvals, svals, gvals = eval_at(probes)
    finite = np.isfinite(rvals)
    if not finite.any():
        raise SingularEncountered(
            f"all 64 probes on [{lo:.6g}, {a_hi:.6g}] were singular or "
            f"outside the region")
    exact = finite & (rvals == 0.0)
    if exact.any():
        return float(probes[np.argmax(exact)])
    candidates = [i for i in range(63)
                  if finite[i] and finite[i + 1]
                  and (rvals[i] < 0.0) != (rvals[i + 1] < 0.0)]
    ratio_min = np.nanmin(np.abs(rvals) / svals)
    trace = (f"64 probes on [{lo:.6g}, {a_hi:.6g}]: "
             f"{int(finite.sum())} finite, min |res|/scale = {ratio_min:.3e} "
             f"at a = {probes[np.nanargmin(np.abs(rvals) / svals)]:.6g}, "
             f"{len(candidates)} sign changes")
    if not candidates:
        raise RootNotFound(f"no sign change for {parity.value}/{sign.value}: "
                           + trace)
    failures = []
    for i in candidates:
        root = brentq(lambda a: float(eval_at(a)[0]), probes[i],
                      probes[i + 1], maxiter=200, xtol=1e-15,
                      rtol=4.0 * np.finfo(float).eps)
        r_at, s_at, g_at = eval_at(root)
        if bool(g_at):
            failures.append(f"a = {root:.6g} lands on a singular denominator")
            continue
        if abs(r_at) < tol_certify * s_at:
            return float(root)
        failures.append(
            f"a = {root:.6g} fails certification: |res| = {abs(r_at):.3e} "
            f"vs {tol_certify:g} * scale = {tol_certify * float(s_at):.3e}")
    raise ConvergenceFailure(
        f"every sign change failed polishing for {parity.value}/{sign.value} "
        f"({trace}): " + "; ".join(failures))
