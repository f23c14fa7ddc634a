"""Leading-order branches of the quartic W**4 = W - exp(-s).

The four roots are labelled j = 1..4 by continuation from the reference point
s = 20 on the positive real axis, where they are pinned by their s -> +infinity
limits: the cube roots of unity for j = 1, 2, 3 and the vanishing branch
W ~ exp(-s) for j = 4.  Principal values of the paper-style nested radicals
jump on curves that are not the intended branch cuts, so every evaluation here
is a root-tracking continuation along a path from the reference point; cuts
run westward (towards Re s = -infinity) from each singular point.

Branches 1..3 are singular at one point each of the base strip (Type A); the
vanishing branch 4 is singular at all three (Type B).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .series import TruncatedSeries, newton_root

__all__ = [
    "S03",
    "A3",
    "B3",
    "SingularPoint",
    "LocalExpansion",
    "FarFieldClass",
    "singular_points",
    "branch_value",
    "branch_values",
    "branch_grid",
    "branch_series",
    "local_expansion",
    "symmetry_image",
    "far_field_class",
    "CoalescingBranches",
]

#: real singular point (1/3) log(256/27)
S03: float = math.log(256.0 / 27.0) / 3.0
#: local constant term at a singularity, (1/4)**(1/3)
A3: float = 0.25 ** (1.0 / 3.0)
#: local sqrt coefficient, (1/(8 sqrt 2))**(1/3)
B3: float = (1.0 / (8.0 * math.sqrt(2.0))) ** (1.0 / 3.0)

#: continuation reference point (limits of all four branches are separated here)
S_REF: complex = 20.0 + 0.0j

_LIMITS = {
    1: cmath.exp(2j * cmath.pi / 3),
    2: cmath.exp(-2j * cmath.pi / 3),
    3: 1.0 + 0j,
}


class CoalescingBranches(ValueError):
    """Evaluation at (or numerically at) a leading-order singular point."""


@dataclass(frozen=True)
class SingularPoint:
    """Singularity s0 = (1/3)(log(256/27) + 2 i k pi) of the leading order."""

    location: complex
    k: int
    label: str

    @classmethod
    def from_k(cls, k: int) -> "SingularPoint":
        loc = complex(S03, 2.0 * math.pi * k / 3.0)
        label = {0: "s03", 1: "s02", -1: "s01"}.get(k, f"s0(k={k})")
        return cls(loc, k, label)


def singular_points(k_min: int, k_max: int) -> list[SingularPoint]:
    """Singular points for k in [k_min, k_max]; k = 0, +-1 are s03, s02, s01."""
    if k_min > k_max:
        raise ValueError("k_min must not exceed k_max")
    return [SingularPoint.from_k(k) for k in range(k_min, k_max + 1)]


#: the three base-strip anchors, in label order s01, s02, s03
ANCHORS = {
    1: SingularPoint.from_k(-1),
    2: SingularPoint.from_k(1),
    3: SingularPoint.from_k(0),
}

_CUT_HEIGHTS = None


def _cut_heights(im_range: float = 16.0) -> np.ndarray:
    global _CUT_HEIGHTS
    if _CUT_HEIGHTS is None:
        kmax = int(im_range * 3 / (2 * math.pi)) + 1
        _CUT_HEIGHTS = np.array([2.0 * math.pi * k / 3.0 for k in range(-kmax, kmax + 1)])
    return _CUT_HEIGHTS


# ----------------------------------------------------------------------------
# root solving and continuation
# ----------------------------------------------------------------------------


def _roots_at(s: complex) -> np.ndarray:
    return np.roots([1.0, 0.0, 0.0, -1.0, cmath.exp(-s)])


def _newton_refine(w: np.ndarray, s, iters: int = 4) -> np.ndarray:
    es = np.exp(-np.asarray(s))
    for _ in range(iters):
        w = w - (w**4 - w + es) / (4.0 * w**3 - 1.0)
    return w


def _match(prev: np.ndarray, roots: np.ndarray):
    """Assign labels of ``prev`` to ``roots`` by nearest distance.

    Returns (assigned, ok) where ok is False when the assignment is ambiguous
    (a root claimed twice, or separation margin too small to trust).
    """
    dist = np.abs(prev[:, None] - roots[None, :])
    idx = np.argmin(dist, axis=1)
    if len(set(idx.tolist())) != 4:
        return None, False
    d_best = dist[np.arange(4), idx]
    dist_masked = dist.copy()
    dist_masked[np.arange(4), idx] = np.inf
    d_second = dist_masked.min(axis=1)
    ok = bool(np.all(d_best * 3.0 < d_second + 1e-300) or np.all(d_best < 1e-13))
    return roots[idx], ok


def _continue_leg(labels: np.ndarray, a: complex, b: complex, step: float = 0.15) -> np.ndarray:
    """Continue the labelled 4-vector of roots from a to b along the segment."""
    n = max(2, int(abs(b - a) / step) + 2)
    pts = np.linspace(a, b, n)
    cur = labels
    i = 1
    pending = list(pts[1:])
    prev_pt = a
    guard = 0
    while pending:
        guard += 1
        if guard > 200000:
            raise RuntimeError("continuation failed to converge along path")
        p = pending[0]
        cand = _newton_refine(cur.copy(), p, 6)
        # reject if Newton merged two labels
        if _min_sep(cand) < 1e-10:
            cand = None
        else:
            resid = np.abs(cand**4 - cand + np.exp(-p))
            if np.max(resid) > 1e-9:
                cand = None
        if cand is None:
            roots = _roots_at(p)
            cand, ok = _match(cur, roots)
            if not ok:
                mid = (prev_pt + p) / 2.0
                if abs(mid - prev_pt) < 1e-14:
                    raise CoalescingBranches(
                        f"cannot separate branches near s = {p} (singular point?)"
                    )
                pending.insert(0, mid)
                continue
        assigned, ok = _match(cur, cand)
        if not ok:
            mid = (prev_pt + p) / 2.0
            if abs(mid - prev_pt) < 1e-14:
                raise CoalescingBranches(
                    f"cannot separate branches near s = {p} (singular point?)"
                )
            pending.insert(0, mid)
            continue
        cur = assigned
        prev_pt = p
        pending.pop(0)
    return cur


def _min_sep(w: np.ndarray) -> float:
    d = np.abs(w[:, None] - w[None, :]) + np.eye(4)
    return float(d.min())


@lru_cache(maxsize=1)
def _ref_labels() -> tuple:
    roots = _roots_at(S_REF)
    out = np.empty(4, complex)
    used = set()
    for j in (1, 2, 3):
        k = int(np.argmin(np.abs(roots - _LIMITS[j])))
        out[j - 1] = roots[k]
        used.add(k)
    (k4,) = set(range(4)) - used
    out[3] = roots[k4]
    out = _newton_refine(out, S_REF, 8)
    return tuple(out)


def _near_singularity(s: complex, radius: float) -> SingularPoint | None:
    k = round(s.imag * 3.0 / (2.0 * math.pi))
    p = SingularPoint.from_k(int(k))
    if abs(s - p.location) < radius:
        return p
    return None


@lru_cache(maxsize=65536)
def _branch_values_cached(s: complex) -> tuple:
    sp = _near_singularity(s, 1e-12)
    if sp is not None:
        raise CoalescingBranches(f"branches coalesce at the singular point {sp.label}")
    labels = np.array(_ref_labels())
    # L-path: vertical at Re = 20, then horizontal at Im s.  Nudge the
    # horizontal leg off a branch cut so it cannot run through a singularity.
    y = s.imag
    heights = _cut_heights()
    on_cut = np.any(np.abs(y - heights) < 1e-9) and s.real < S03 + 0.05
    y_leg = y + 1e-6 if on_cut else y
    labels = _continue_leg(labels, S_REF, complex(S_REF.real, y_leg))
    labels = _continue_leg(labels, complex(S_REF.real, y_leg), complex(s.real, y_leg))
    if on_cut:
        labels = _continue_leg(labels, complex(s.real, y_leg), s, step=1e-7)
    return tuple(labels)


def branch_values(s: complex) -> np.ndarray:
    """All four branch values at s, index j-1, continued from the reference point."""
    return np.array(_branch_values_cached(complex(s)))


def branch_value(s: complex, j: int) -> complex:
    """W_{0,j}(s); raises CoalescingBranches exactly at a singular point."""
    if j not in (1, 2, 3, 4):
        raise ValueError("branch index must be in {1,2,3,4}")
    return complex(branch_values(s)[j - 1])


def branch_grid(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    """All four branches on the grid re x im; returns (4, len(im), len(re)).

    Continuation runs down a single column at the right edge and then westward
    along each row simultaneously, refining steps wherever labels become
    ambiguous.  Grid points within ~1e-12 of a singular point produce NaN.
    """
    re = np.asarray(re, float)
    im = np.asarray(im, float)
    nx, ny = len(re), len(im)
    x_right = max(re.max() + 1.0, S_REF.real)
    # labels at the right edge for every row, by one vertical continuation
    edge = np.empty((4, ny), complex)
    labels = np.array(_ref_labels())
    labels = _continue_leg(labels, S_REF, complex(x_right, 0.0))
    order_idx = np.argsort(np.abs(im))
    prev_y = 0.0
    cur = labels.copy()
    for iy in order_idx:
        # walk from the nearest already-visited height; heights are sorted by |y|
        cur = _continue_leg(cur, complex(x_right, prev_y), complex(x_right, im[iy]))
        edge[:, iy] = cur
        prev_y = im[iy]
    # sweep westward, vectorised over rows
    out = np.empty((4, ny, nx), complex)
    xs = np.sort(re)[::-1]
    col_of = {x: k for k, x in enumerate(re)}
    cur = edge.copy()
    prev_x = x_right
    es_cache = {}
    for x in xs:
        cur = _sweep_cols(cur, prev_x, x, im)
        out[:, :, col_of[x]] = cur
        prev_x = x
    return out


def _sweep_cols(cur: np.ndarray, x0: float, x1: float, im: np.ndarray, depth: int = 0) -> np.ndarray:
    """Vectorised westward continuation of (4, ny) labelled roots."""
    s = re_im(x1, im)
    w = cur.copy()
    es = np.exp(-s)
    for _ in range(8):
        w = w - (w**4 - w + es) / (4.0 * w**3 - 1.0)
    resid = np.abs(w**4 - w + es)
    sep = _pairwise_min_sep(w)
    bad = (resid.max(axis=0) > 1e-9) | (sep < 1e-10)
    if np.any(bad):
        if depth > 60 or abs(x1 - x0) < 1e-13:
            w[:, bad] = np.nan
            return w
        mid = 0.5 * (x0 + x1)
        half = _sweep_cols(cur[:, bad], x0, mid, im[bad], depth + 1)
        fixed = _sweep_cols(half, mid, x1, im[bad], depth + 1)
        w[:, bad] = fixed
    return w


def _pairwise_min_sep(w: np.ndarray) -> np.ndarray:
    m = np.full(w.shape[1], np.inf)
    for a in range(4):
        for b in range(a + 1, 4):
            m = np.minimum(m, np.abs(w[a] - w[b]))
    return m


def re_im(x: float, im: np.ndarray) -> np.ndarray:
    return x + 1j * np.asarray(im)


# ----------------------------------------------------------------------------
# series, local expansions, symmetry, far field
# ----------------------------------------------------------------------------


def quartic_on_series(w: TruncatedSeries) -> TruncatedSeries:
    """W**4 - W + exp(-s) as a series about w's base point."""
    n = w.order
    z = TruncatedSeries.identity(w.base_point, n)
    forcing = (-z).exp()
    return w * w * w * w - w + forcing


def branch_series(s_c: complex, j: int, order: int) -> TruncatedSeries:
    """Taylor series of W_{0,j} about s_c (s_c away from singular points)."""
    seed = branch_value(s_c, j)
    return newton_root(quartic_on_series, seed, complex(s_c), order)


@dataclass(frozen=True)
class LocalExpansion:
    """W_{0,j} ~ a_j + b_j sqrt(s - s0j) near its singular point (j = 1, 2, 3)."""

    a: complex
    b: complex
    center: SingularPoint


def local_expansion(j: int) -> LocalExpansion:
    if j == 4:
        raise ValueError(
            "the vanishing branch has no single local expansion; it coalesces "
            "with branch j at s0j -- use per-singularity data with j in {1,2,3}"
        )
    if j not in (1, 2, 3):
        raise ValueError("branch index must be in {1,2,3}")
    phase = cmath.exp(2j * cmath.pi * j / 3)
    return LocalExpansion(A3 * phase, B3 * phase, ANCHORS[j])


@lru_cache(maxsize=8)
def _symmetry_pairing() -> dict:
    """Numerically resolved cube-root pairing lambda . W3(s + log lambda) = W_j(s).

    Probed once at a reference point; the pairing with lambda = e^{2 i pi/3}
    lands on the branch whose far-field limit is e^{2 i pi/3} (and mirror).
    """
    probe = 6.0 + 0.4j
    vals = branch_values(probe)
    pairing = {3: (1.0 + 0j, 0.0 + 0j)}
    for m in (1, -1):
        lam = cmath.exp(2j * cmath.pi * m / 3)
        shift = cmath.log(lam)  # principal: +- 2 i pi / 3
        cand = lam * branch_value(probe + shift, 3)
        errs = {j: abs(cand - vals[j - 1]) for j in (1, 2)}
        j_t = min(errs, key=errs.get)
        if errs[j_t] > 1e-8:
            raise RuntimeError(
                f"symmetry pairing verification failed at probe point: {errs}"
            )
        pairing[j_t] = (lam, shift)
    if set(pairing) != {1, 2, 3}:
        raise RuntimeError("inconsistent branch labelling in symmetry pairing")
    return pairing


def symmetry_image(s: complex, j_source: int):
    """(j_target, lambda, shift) with lambda * W3(s + shift) = W_{j_source}(s).

    The cube-root/branch pairing is resolved numerically once and cached; the
    identity lambda = 1 maps branch 3 to itself.
    """
    if j_source not in (1, 2, 3):
        raise ValueError("symmetry images are defined for the Type A branches")
    lam, shift = _symmetry_pairing()[j_source]
    val = lam * branch_value(s + shift, 3)
    if abs(val - branch_value(s, j_source)) > 1e-8 * max(1.0, abs(val)):
        raise RuntimeError(f"symmetry verification failed at s = {s}")
    return j_source, lam, shift


@dataclass(frozen=True)
class FarFieldClass:
    kind: str  # "nonzero" | "vanishing"
    omega: complex | None


def far_field_class(j: int) -> FarFieldClass:
    """s -> +infinity class: cube root of unity for j = 1..3, vanishing for j = 4."""
    if j == 4:
        return FarFieldClass("vanishing", None)
    if j in (1, 2, 3):
        return FarFieldClass("nonzero", _LIMITS[j])
    raise ValueError("branch index must be in {1,2,3,4}")
