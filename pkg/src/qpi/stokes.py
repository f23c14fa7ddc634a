"""Stokes geometry: curve tracing, region classification, smoothing, evaluation.

Stokes curves of a singulant are the level lines Im(chi) = 0 with Re(chi) > 0
(the side that switches the exponential), anti-Stokes curves the lines
Re(chi) = 0.  Both launch from the anchoring singularity along directions
fixed by the local law chi ~ c (s - s0)^(5/4): five-fourths of the polar angle
plus arg(c) must be a multiple of pi (Stokes) or an odd multiple of pi/2
(anti-Stokes).  Curves are traced by a predictor-corrector walk of
ds/dt = u/chi'(s), with the corrector projecting back onto the level set, and
terminate at the strip boundary |Im s| = pi, at a branch cut, at a turning
point, or at the arclength budget.

The erf-smoothed Stokes multiplier uses the H factor evaluated on the Stokes
curve at matching |chi|, so the far-side jump is exactly 2 i pi sqrt(eps) H.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import erf

from . import branches, singulants
from .branches import ANCHORS, SingularPoint
from .recurrence import CoefficientTable
from .singulants import SingulantValue, _Walker, _acosh_candidates, _sigma_of_w

__all__ = [
    "initial_directions",
    "TracedCurve",
    "trace_curve",
    "standard_curves",
    "RegionInfo",
    "classify_point",
    "OnCurveError",
    "stokes_multiplier",
    "optimal_truncation",
    "AsymptoticApproximation",
    "evaluate_solution",
    "truncated_sum",
    "map_to_x",
]

_SQ = math.sqrt(6.0 * math.sqrt(2.0))


def _local_coeff_arg(j: int) -> float:
    """arg of the coefficient in chi ~ c (s-s0)^(5/4): -pi/2 for Type A, 0 for Type B."""
    return -math.pi / 2.0 if j != 4 else 0.0


def initial_directions(anchor: SingularPoint, kind: str, j: int = 3) -> tuple[float, ...]:
    """Launch angles in (-pi, pi] of Stokes or anti-Stokes curves at the anchor.

    Solves (5/4) theta + arg(c) = 0 mod pi (Stokes) or pi/2 mod pi
    (anti-Stokes).  Type A branches get two Stokes and three anti-Stokes
    directions, the vanishing branch three and two.
    """
    if kind not in ("stokes", "anti"):
        raise ValueError("kind must be 'stokes' or 'anti'")
    phi = _local_coeff_arg(j)
    target = 0.0 if kind == "stokes" else math.pi / 2.0
    out = []
    for m in range(-4, 5):
        theta = (target - phi + m * math.pi) * 4.0 / 5.0
        if -math.pi < theta <= math.pi + 1e-12:
            out.append(theta)
    return tuple(sorted(set(round(t, 12) for t in out)))


@dataclass
class TracedCurve:
    """Polyline of a Stokes/anti-Stokes curve (or a cut) with its x-plane image."""

    kind: str  # "stokes" | "anti" | "cut"
    anchor: SingularPoint
    branch: int
    s_points: np.ndarray
    chi_points: np.ndarray
    termination: str
    switched_singulant: SingularPoint | None = None
    x_points: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.x_points is None:
            self.x_points = np.exp(self.s_points)


def trace_curve(
    anchor: SingularPoint,
    j: int,
    kind: str,
    direction: float,
    max_arclength: float = 12.0,
    step: float = 4e-3,
    first_step: float = 1e-3,
) -> TracedCurve:
    """Trace one curve of the given kind launched at ``direction``.

    The first point is seeded by the local 5/4-power law; afterwards an RK2
    predictor on ds/dt = u/chi' is followed by a corrector projecting the
    accumulated chi back onto the level set.  The traversal direction u is
    chosen so the walk moves away from the anchor.
    """
    if kind not in ("stokes", "anti"):
        raise ValueError("kind must be 'stokes' or 'anti'")
    dirs = initial_directions(anchor, kind, j)
    if not any(abs(direction - d) < 1e-9 for d in dirs):
        raise ValueError(f"direction {direction} is not a launch angle {dirs}")
    delta0 = first_step * cmath.exp(1j * direction)
    s = anchor.location + delta0
    walker = _Walker(anchor, j, s)
    chi = 0.8 * delta0 * walker.dchi  # chi = (4/5) delta chi' under the 5/4 local law

    def correct(s_new, w_new, chi_new):
        for _ in range(4):
            resid = chi_new.imag if kind == "stokes" else chi_new.real
            if abs(resid) < 1e-14:
                break
            corr = (-1j * resid if kind == "stokes" else -resid) / w_new.dchi
            s_corr = s_new + corr
            w_corr = w_new.clone()
            w_corr.advance(s_corr)
            chi_new = chi_new + (w_new.dchi + w_corr.dchi) * (s_corr - s_new) / 2.0
            s_new, w_new = s_corr, w_corr
        return s_new, w_new, chi_new

    s, walker, chi = correct(s, walker, chi)
    # pick traversal direction: walk outward
    u = 1.0 if kind == "stokes" else 1j
    ds0 = u / walker.dchi
    if (ds0 / delta0).real < 0:
        u = -u
    pts = [s]
    chis = [chi]
    arclen = abs(delta0)
    termination = "arclength"
    switching = kind == "stokes" and chi.real > 0
    while arclen < max_arclength:
        try:
            w_mid = walker.clone()
            k1 = step * u / walker.dchi
            w_mid.advance(s + 0.5 * k1)
            k2 = step * u / w_mid.dchi
            s_new = s + k2
            w_new = walker.clone()
            w_new.advance(s_new)
            chi_new = chi + (walker.dchi + 4.0 * w_mid.dchi + w_new.dchi) * (s_new - s) / 6.0
            s_new, w_new, chi_new = correct(s_new, w_new, chi_new)
        except singulants.PathError:
            termination = "turning-point"
            break
        if _hits_cut(s, s_new, j, anchor):
            termination = "branch-cut"
            break
        arclen += abs(s_new - s)
        s, chi, walker = s_new, chi_new, w_new
        pts.append(s)
        chis.append(chi)
        if abs(s.imag) >= math.pi:
            termination = "strip-boundary"
            break
        if abs(s.real) > 14.0:
            termination = "strip-exit"
            break
    return TracedCurve(
        kind=kind,
        anchor=anchor,
        branch=j,
        s_points=np.array(pts),
        chi_points=np.array(chis),
        termination=termination,
        switched_singulant=anchor if switching else None,
    )


def _hits_cut(a: complex, b: complex, j: int, own: SingularPoint) -> bool:
    ks = range(-2, 3)
    for k in ks:
        p = SingularPoint.from_k(k)
        if j != 4 and p.location != own.location:
            continue  # Type A only stops at its own cut
        y = p.location.imag
        if (a.imag - y) * (b.imag - y) < 0:
            t = (y - a.imag) / (b.imag - a.imag)
            xc = a.real + t * (b.real - a.real)
            if xc < p.location.real - 1e-9:
                return True
    return False


def standard_curves(j: int = 3, anchors=None, max_arclength: float = 12.0) -> list[TracedCurve]:
    """All Stokes and anti-Stokes curves of branch j from its anchor(s)."""
    if anchors is None:
        anchors = [ANCHORS[j]] if j != 4 else list(ANCHORS.values())
    out = []
    for anc in anchors:
        for kind in ("stokes", "anti"):
            for th in initial_directions(anc, kind, j):
                out.append(trace_curve(anc, j, kind, th, max_arclength))
    return out


# ----------------------------------------------------------------------------
# classification
# ----------------------------------------------------------------------------


class OnCurveError(ValueError):
    """Point too close to a Stokes/anti-Stokes curve or cut to classify."""


@dataclass(frozen=True)
class RegionInfo:
    family: str  # "A" or "B"
    branch: int
    signs: dict  # anchor label -> (sign Re, sign Im)
    label: str  # "I".."IV" for Type B, "" otherwise
    values: dict  # anchor label -> singulant value


_TYPE_B_TABLE = {
    (1, 1, 1): "I",
    (1, -1, 1): "II",
    (1, -1, -1): "III",
    (-1, -1, -1): "IV",
}


def classify_point(s: complex, family: str = "A", j: int = 3, tol: float = 1e-6) -> RegionInfo:
    """Sign signature of the relevant singulant(s) at s; region label for Type B.

    Type B labels follow the sign table of the three Im(eta_j) (regions are
    assigned by signature, not geometric containment); points with any
    |Re| or |Im| below ``tol`` raise OnCurveError.
    """
    s = complex(s)
    if family == "A":
        vals = {ANCHORS[j].label: singulants.singulant(s, None, j).value}
        bj = j
    elif family == "B":
        vals = {
            anc.label: singulants.singulant(s, anc, 4).value
            for anc in ANCHORS.values()
        }
        bj = 4
    else:
        raise ValueError("family must be 'A' or 'B'")
    signs = {}
    for lab, v in vals.items():
        if abs(v.real) < tol or abs(v.imag) < tol:
            raise OnCurveError(
                f"point {s} is within {tol} of a Stokes/anti-Stokes level of {lab}"
            )
        signs[lab] = (int(math.copysign(1, v.real)), int(math.copysign(1, v.imag)))
    label = ""
    if family == "B":
        key = tuple(signs[lab][1] for lab in ("s01", "s02", "s03"))
        label = _TYPE_B_TABLE.get(key, "other")
    return RegionInfo(family, bj, signs, label, vals)


# ----------------------------------------------------------------------------
# smoothing and evaluation
# ----------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _switching_trace(anchor_label: str, j: int) -> TracedCurve:
    anchor = next(p for p in ANCHORS.values() if p.label == anchor_label)
    for th in initial_directions(anchor, "stokes", j):
        c = trace_curve(anchor, j, "stokes", th, max_arclength=16.0)
        if c.switched_singulant is not None:
            return c
    raise RuntimeError("no switching Stokes curve found")


def _H_on_curve(rho: float, anchor: SingularPoint, j: int) -> complex:
    """H factor evaluated at the point of the switching Stokes curve with |chi| = rho."""
    curve = _switching_trace(anchor.label, j)
    re = curve.chi_points.real
    if rho > re[-1]:
        raise ValueError(f"|chi| = {rho} beyond the traced Stokes curve (max {re[-1]:.3f})")
    i = int(np.searchsorted(re, rho))
    i = min(max(i, 1), len(re) - 1)
    t = (rho - re[i - 1]) / (re[i] - re[i - 1])
    s_star = curve.s_points[i - 1] * (1 - t) + curve.s_points[i] * t
    sv = singulants.singulant(s_star, anchor, j)
    # Newton-polish chi(s*) = rho using the conformal local map
    s_star = s_star + (rho - sv.value) / sv.derivative
    sv = singulants.singulant(s_star, anchor, j)
    w0 = branches.branch_value(s_star, j)
    return cmath.sqrt(1.0 - 4.0 * w0**3) / sv.derivative


def stokes_multiplier(
    s: complex,
    anchor: SingularPoint | None = None,
    j: int = 3,
    eps: float = 0.1,
    C: complex = 1.0,
    chi: SingulantValue | None = None,
) -> complex:
    """Erf-smoothed Stokes multiplier at s for the branch-j singulant.

    S = i pi sqrt(eps) H(|chi|) (erf(theta sqrt(|chi|/2 eps)) + C) with theta
    the argument of chi; C is the hidden free constant (C = 1 zeroes the
    multiplier on the theta < 0 side).
    """
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 0.5)")
    if anchor is None:
        if j == 4:
            raise ValueError("the vanishing branch needs an explicit anchor")
        anchor = ANCHORS[j]
    sv = chi if chi is not None else singulants.singulant(s, anchor, j)
    rho = abs(sv.value)
    theta = cmath.phase(sv.value)
    h = _H_on_curve(rho, anchor, j)
    return 1j * math.pi * math.sqrt(eps) * h * (erf(theta * math.sqrt(rho / (2.0 * eps))) + C)


def optimal_truncation(chi: complex, eps: float) -> tuple[int, float]:
    """(N_opt, kappa) with N_opt ~ (|chi|/eps + kappa)/2 an integer >= 1.

    kappa in [0,1) when such a value exists; otherwise N_opt rounds |chi|/(2 eps)
    and kappa reports the implied (out-of-range) remainder.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    t = abs(chi) / eps
    if t < 2.0:
        raise ValueError("eps too large for asymptotics here (|chi|/eps < 2)")
    kappa = (-t) % 2.0
    if kappa < 1.0:
        n = int(round((t + kappa) / 2.0))
    else:
        n = int(round(t / 2.0))
        kappa = 2.0 * n - t
    return max(n, 1), kappa


@dataclass(frozen=True)
class AsymptoticApproximation:
    """Configuration of a truncated-plus-exponential asymptotic evaluation."""

    family: str  # "A" or "B"
    branch: int
    eps: float
    multiplier_constants: dict = field(default_factory=dict)  # anchor label -> C
    n_terms: int | None = None  # override 2 N_opt terms if set
    include_exponential: bool = True

    def __post_init__(self):
        if not 0.0 < self.eps < 0.5:
            raise ValueError("eps must lie in (0, 0.5)")


def truncated_sum(table: CoefficientTable, s, eps, n_terms: int):
    """sum_{r < n_terms} eps^r W_r(s) straight off the table (dtype-preserving)."""
    if n_terms - 1 > table.R:
        raise ValueError(f"table holds r <= {table.R} < requested {n_terms - 1}")
    tot = None
    ep = None
    for r in range(n_terms):
        term = table.entries[r](s)
        ep = 1.0 if r == 0 else ep * eps
        tot = term if tot is None else tot + term * ep
    return tot


def evaluate_solution(s: complex, approx: AsymptoticApproximation, table: CoefficientTable) -> complex:
    """Optimally truncated series plus erf-smoothed switching exponential(s).

    Type A uses the single singulant of the branch; Type B sums the three
    exponential contributions anchored at the base-strip singularities.  The
    truncation point is the optimal one for the (smallest) singulant modulus
    unless the approximation fixes ``n_terms``.
    """
    s = complex(s)
    eps = approx.eps
    j = approx.branch
    if approx.family == "A":
        anchors = [ANCHORS[j]]
    elif approx.family == "B":
        anchors = list(ANCHORS.values())
        j = 4
    else:
        raise ValueError("family must be 'A' or 'B'")
    svs = [singulants.singulant(s, anc, j) for anc in anchors]
    if approx.n_terms is not None:
        n_terms = approx.n_terms
    else:
        rho_min = min(abs(sv.value) for sv in svs)
        n_opt, _ = optimal_truncation(rho_min, eps)
        n_terms = 2 * n_opt
    tot = complex(truncated_sum(table, s, eps, n_terms))
    if approx.include_exponential:
        for anc, sv in zip(anchors, svs):
            C = approx.multiplier_constants.get(anc.label, 1.0)
            mult = stokes_multiplier(s, anc, j, eps, C, chi=sv)
            u = singulants.prefactor_U(s, anc, j, "+")
            tot += mult * u * cmath.exp(-sv.value / eps)
    return tot


def map_to_x(obj, mode: str = "leading", eps: float | None = None):
    """s -> x map: leading x = e^s, exact x = (1+eps)^(s/eps); pointwise on curves."""
    if mode == "leading":
        f = np.exp
    elif mode == "exact":
        if eps in (None, 0):
            raise ValueError("exact mode needs eps > 0")
        f = lambda s: np.exp(np.asarray(s) / eps * np.log(1 + eps))
    else:
        raise ValueError("mode must be 'leading' or 'exact'")
    if isinstance(obj, TracedCurve):
        return TracedCurve(
            kind=obj.kind,
            anchor=obj.anchor,
            branch=obj.branch,
            s_points=obj.s_points,
            chi_points=obj.chi_points,
            termination=obj.termination,
            switched_singulant=obj.switched_singulant,
            x_points=f(obj.s_points),
        )
    return f(obj)
