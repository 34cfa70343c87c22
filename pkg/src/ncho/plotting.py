"""Renders the membership landscape to image files next to the raw data.

The report slices parameter space along c = a b at fixed |xi|, where all
four one-parameter families are known in closed form, and paints the
relative membership residual per family as a heatmap.  Dark bands are the
zero sets; cells flagged at the scan tolerance are outlined.  The delimited
data behind every figure is written alongside it so the picture can be
reproduced with any plotting tool.
"""

import io
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .regions import (
    _CSV_HEADER,
    FAMILY_NAMES,
    _flags_from,
    count_co_flags,
    count_flags,
    residual_mesh,
)

_PANEL_TITLES = {
    "even_plus": "even parity, plus root",
    "even_minus": "even parity, minus root",
    "odd_plus": "odd parity, plus root",
    "odd_minus": "odd parity, minus root",
}


def slice_csv(b_axis, a_axis, xi_abs, res, flags) -> bytes:
    """CSV rows for the c = a b slice, same 12 columns as grid exports."""
    bb = np.broadcast_to(b_axis[:, None], (b_axis.size, a_axis.size))
    aa = np.broadcast_to(a_axis[None, :], (b_axis.size, a_axis.size))
    cols = np.column_stack([
        bb.ravel(), aa.ravel(), (bb * aa).ravel(),
        np.full(bb.size, float(xi_abs)),
        res.reshape(4, -1).T,
        flags.reshape(4, -1).T.astype(float),
    ])
    buf = io.BytesIO()
    np.savetxt(buf, cols, fmt="%.17g", delimiter=",", header=_CSV_HEADER,
               comments="")
    return buf.getvalue()


def render_report(out_dir, b_range=(1.05, 14.0), a_range=(0.05, 4.0),
                  resolution: int = 128, xi_abs: float = 1.0,
                  tol: float = 1e-3) -> dict:
    """Scan the c = a b plane and write PNG + CSV + JSON summary files.

    Returns the summary dict (also saved as report_summary.json): file
    names, per-family flagged-cell counts, and pairwise co-flag counts.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    b_axis = np.linspace(float(b_range[0]), float(b_range[1]), int(resolution))
    a_axis = np.linspace(float(a_range[0]), float(a_range[1]), int(resolution))
    res, scale, _, _ = residual_mesh(b_axis[:, None], a_axis[None, :],
                                     b_axis[:, None] * a_axis[None, :],
                                     xi_abs)
    flags = _flags_from(res, scale, tol)

    csv_path = out / "region_scan_slice.csv"
    csv_path.write_bytes(slice_csv(b_axis, a_axis, xi_abs, res, flags))

    with np.errstate(invalid="ignore", divide="ignore"):
        heat = np.log10(np.abs(res) / scale)
    fig, axes = plt.subplots(2, 2, figsize=(11.0, 8.0), sharex=True,
                             sharey=True)
    extent = (b_axis[0], b_axis[-1], a_axis[0], a_axis[-1])
    image = None
    for i, name in enumerate(FAMILY_NAMES):
        ax = axes[i // 2][i % 2]
        panel = np.ma.masked_invalid(heat[i]).T
        image = ax.imshow(panel, origin="lower", extent=extent,
                          aspect="auto", cmap="viridis", vmin=-8.0, vmax=0.0)
        if flags[i].any():
            ax.contour(b_axis, a_axis, flags[i].T.astype(float),
                       levels=[0.5], colors="red", linewidths=0.8)
        ax.set_title(f"{_PANEL_TITLES[name]} "
                     f"({int(flags[i].sum())} cells flagged)")
        if i // 2 == 1:
            ax.set_xlabel("b")
        if i % 2 == 0:
            ax.set_ylabel("a")
    fig.suptitle(
        f"relative membership residual on the c = a b plane, "
        f"|xi| = {xi_abs:g} (red contour: |res| <= {tol:g} * scale)")
    fig.colorbar(image, ax=axes, label="log10(|residual| / scale)",
                 fraction=0.046)
    png_path = out / "region_scan.png"
    fig.savefig(png_path, dpi=150)
    plt.close(fig)

    summary = {
        "files": [csv_path.name, png_path.name, "report_summary.json"],
        "b_range": [float(b_axis[0]), float(b_axis[-1])],
        "a_range": [float(a_axis[0]), float(a_axis[-1])],
        "c_rule": "c = a * b",
        "resolution": int(resolution),
        "xi_abs": float(xi_abs),
        "tol": float(tol),
        "flag_counts": count_flags(flags),
        "co_flag_counts": count_co_flags(flags),
    }
    (out / "report_summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=1) + "\n")
    return summary
