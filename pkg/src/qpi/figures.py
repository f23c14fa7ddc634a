"""Matplotlib rendering of Stokes maps and convergence curves.

Figures are written as deterministic SVG (fixed hash salt, no embedded date)
so identical runs produce byte-identical files; PNG output is available via
the file extension.  Styling follows the established conventions: Stokes
curves solid, anti-Stokes dashed, branch cuts zig-zag, singularities marked.
"""

from __future__ import annotations

import math

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .branches import ANCHORS  # noqa: E402
from .io import resolve_out  # noqa: E402

_STYLE = {
    "stokes": dict(color="#c22", lw=1.4, ls="-"),
    "anti": dict(color="#36c", lw=1.2, ls="--"),
    "cut": dict(color="#555", lw=1.0, ls=":"),
}

_RC = {
    "svg.hashsalt": "qpi",
    "figure.figsize": (6.0, 4.5),
    "axes.grid": True,
    "grid.alpha": 0.25,
    "font.size": 10,
}


def _zigzag(a: complex, b: complex, n: int = 24, amp: float = 0.03) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)
    base = a + (b - a) * t
    perp = 1j * (b - a) / abs(b - a)
    wig = amp * np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    wig[0] = wig[-1] = 0.0
    return base + perp * wig


def save_curve_figure(curves, plane: str, path, style: dict | None = None, out_dir=None):
    """Render traced curves in the s- or x-plane; returns the output path."""
    if not curves:
        raise ValueError("no curves to draw")
    style = style or {}
    with matplotlib.rc_context({**_RC, **style.get("rc", {})}):
        fig, ax = plt.subplots()
        anchors_seen = {}
        for c in curves:
            pts = c.s_points if plane == "s" else c.x_points
            kind = c.kind if c.kind in _STYLE else "cut"
            ax.plot(pts.real, pts.imag, **_STYLE[kind])
            anchors_seen[c.anchor.label] = c.anchor.location
        for lab, loc in sorted(anchors_seen.items()):
            cut_end = complex(loc.real - 3.0, loc.imag)
            zz = _zigzag(loc, cut_end)
            if plane == "x":
                zz = np.exp(zz)
                loc_p = np.exp(loc)
            else:
                loc_p = loc
            ax.plot(zz.real, zz.imag, **_STYLE["cut"])
            ax.plot([loc_p.real], [loc_p.imag], marker="o", ms=5, color="k")
        if plane == "s":
            for ybound in (-math.pi, math.pi):
                ax.axhline(ybound, color="0.4", lw=0.8, ls="-.")
            ax.set_xlabel("Re s")
            ax.set_ylabel("Im s")
        else:
            ax.set_xlabel("Re x")
            ax.set_ylabel("Im x")
            ax.set_aspect("equal")
        p = resolve_out(path, out_dir)
        fig.savefig(p, metadata=_metadata(p))
        plt.close(fig)
    return p


def save_convergence_figure(values: np.ndarray, limit: float, path, out_dir=None):
    """Partial-estimate convergence curve with its limiting value marked."""
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots()
        r = np.arange(1, len(values) + 1)
        ax.plot(r, values, color="#36c", lw=1.2)
        ax.axhline(limit, color="k", ls="--", lw=1.0)
        ax.set_xlabel("terms")
        ax.set_ylabel("partial estimate")
        p = resolve_out(path, out_dir)
        fig.savefig(p, metadata=_metadata(p))
        plt.close(fig)
    return p


def _metadata(path) -> dict | None:
    if str(path).endswith(".svg"):
        return {"Date": None}
    return None
