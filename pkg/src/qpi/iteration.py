"""Direct iteration of the q-difference equation and asymptotic comparison.

The discrete orbit w_{n+1} w_{n-1} = 1/w_n - 1/(x0 q^n w_n^2) is iterated
forward until a blow-up guard trips; shooting adjusts the two seeds until the
orbit lands on a chosen far-field family (a cube root of unity, or the
vanishing branch w ~ 1/x).  Quantitative comparison against the asymptotic
evaluation is restricted to real q = 1 + eps, where s_n = eps n stays on the
real axis.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import precision as _pr

__all__ = [
    "IterationConfig",
    "Trajectory",
    "iterate",
    "rescaled_residual",
    "ShootTarget",
    "shoot_initial_conditions",
    "family_seed",
    "compare_trajectory",
]

BLOWUP_HI = 1e12
BLOWUP_LO = 1e-12


@dataclass(frozen=True)
class IterationConfig:
    q: complex
    w0: complex
    w1: complex
    n_max: int
    x0: complex = 1.0 + 0j

    def __post_init__(self):
        if abs(self.q) in (0.0, 1.0):
            raise ValueError("|q| must differ from 0 and 1")
        if abs(self.q) <= 1.0:
            raise ValueError("the forward iteration assumes |q| > 1")
        if self.n_max < 2:
            raise ValueError("n_max must be at least 2")


@dataclass(frozen=True)
class Trajectory:
    values: np.ndarray
    config: IterationConfig
    blowup_index: int | None = None

    def __len__(self) -> int:
        return len(self.values)


def iterate(config: IterationConfig) -> Trajectory:
    """Forward orbit w_0 ... w_{n_max}, halted early if |w_n| leaves [1e-12, 1e12]."""
    if config.w0 == 0 or config.w1 == 0:
        raise ValueError("seeds must be nonzero")
    q, x0 = config.q, config.x0
    w = np.empty(config.n_max + 1, complex)
    w[0], w[1] = config.w0, config.w1
    blow = None
    xq = q  # q^n at n = 1
    for n in range(1, config.n_max):
        wn, wm = w[n], w[n - 1]
        denom = x0 * xq * wn * wn
        if denom == 0 or wm == 0:
            blow = n
            break
        nxt = (1.0 / wn - 1.0 / denom) / wm
        w[n + 1] = nxt
        if not (BLOWUP_LO < abs(nxt) < BLOWUP_HI) or not np.isfinite(nxt):
            blow = n + 1
            break
        xq *= q
    if blow is not None:
        w = w[: blow + 1]
    return Trajectory(w, config, blow)


def discrete_residuals(traj: Trajectory) -> np.ndarray:
    """|w_{n+1} w_{n-1} w_n^2 - w_n + 1/(x0 q^n)| per interior step."""
    w = traj.values
    q, x0 = traj.config.q, traj.config.x0
    n = np.arange(1, len(w) - 1)
    return np.abs(w[2:] * w[:-2] * w[1:-1] ** 2 - w[1:-1] + 1.0 / (x0 * q**n))


def rescaled_residual(W_values, s, eps):
    """Left minus right of the rescaled equation at one point.

    ``W_values`` is the triple (W(s - eps), W(s), W(s + eps)).  Works for
    complex doubles and for gmpy2 scalars alike (the point of entry for the
    extended-precision optimal-truncation checks).
    """
    wm, wc, wp = W_values
    forcing = _pr.exp(-(s / eps) * _pr.log(1 + eps))
    return wp * wc * wc * wm - wc + forcing


@dataclass(frozen=True)
class ShootTarget:
    """Far-field family to land on: nonzero(omega) or the vanishing branch."""

    kind: str  # "nonzero" | "vanishing"
    omega: complex = 1.0 + 0j

    def value_at(self, n: int, q: complex, x0: complex = 1.0 + 0j) -> complex:
        if self.kind == "nonzero":
            return self.omega
        if self.kind == "vanishing":
            return 1.0 / (x0 * q**n)
        raise ValueError("kind must be 'nonzero' or 'vanishing'")


def shoot_initial_conditions(
    target: ShootTarget,
    q: complex,
    n_check: int,
    seed: tuple[complex, complex],
    x0: complex = 1.0 + 0j,
    tol: float = 1e-10,
    max_rounds: int = 3,
) -> tuple[complex, complex]:
    """Seeds (w0, w1) whose orbit hits the target family at n_check, n_check+1.

    Minimises |w_{nc} - t_{nc}|^2 + |w_{nc+1} - t_{nc+1}|^2 over the four real
    seed components with a damped least-squares (quasi-Newton) pass, falling
    back to a derivative-free simplex when it stalls; returns once the
    objective is below ``tol``.
    """
    t0 = target.value_at(n_check, q, x0)
    t1 = target.value_at(n_check + 1, q, x0)

    def resid(p):
        cfg_w0 = complex(p[0], p[1])
        cfg_w1 = complex(p[2], p[3])
        if cfg_w0 == 0 or cfg_w1 == 0:
            return np.full(4, 1e6)
        traj = iterate(IterationConfig(q, cfg_w0, cfg_w1, n_check + 1, x0))
        if traj.blowup_index is not None or len(traj.values) <= n_check + 1:
            return np.full(4, 1e6)
        d0 = traj.values[n_check] - t0
        d1 = traj.values[n_check + 1] - t1
        return np.array([d0.real, d0.imag, d1.real, d1.imag])

    p = np.array([seed[0].real, seed[0].imag, seed[1].real, seed[1].imag])
    if np.all(resid(p) >= 1e6):
        raise ValueError("seed trajectory blows up before the check window")
    for _ in range(max_rounds):
        sol = optimize.least_squares(resid, p, method="lm", xtol=1e-15, ftol=1e-15)
        p = sol.x
        if np.sum(resid(p) ** 2) < tol:
            break
        nm = optimize.minimize(
            lambda v: float(np.sum(resid(v) ** 2)),
            p,
            method="Nelder-Mead",
            options={"xatol": 1e-14, "fatol": 1e-16, "maxiter": 4000},
        )
        p = nm.x
        if np.sum(resid(p) ** 2) < tol:
            break
    obj = float(np.sum(resid(p) ** 2))
    if obj >= tol:
        raise ArithmeticError(f"shooting did not converge (objective {obj:.2e})")
    return complex(p[0], p[1]), complex(p[2], p[3])


def family_seed(target: ShootTarget, q: complex, n_check: int, x0: complex = 1.0 + 0j):
    """Seed pair from backward iteration of the family values at the check window.

    The map is reversible (w_{n-1} solves the same three-term relation), so
    walking the target values backwards gives an essentially converged seed
    for :func:`shoot_initial_conditions`.
    """
    wn1 = target.value_at(n_check + 1, q, x0)
    wn = target.value_at(n_check, q, x0)
    for n in range(n_check, 0, -1):
        prev = (1.0 / wn - 1.0 / (x0 * q**n * wn * wn)) / wn1
        wn1, wn = wn, prev
    return wn, wn1


@dataclass(frozen=True)
class ComparisonRow:
    n: int
    s: float
    w: complex
    w_asym: complex
    error: float


def compare_trajectory(traj: Trajectory, evaluate, window: tuple[float, float]) -> list[ComparisonRow]:
    """Rows (n, s_n = eps n, |w_n - W(s_n)|) over a real-s window.

    ``evaluate`` maps s to the asymptotic value; quantitative use requires
    real q (eps = q - 1 real positive), complex q only supports qualitative
    limit checks so it is refused here.
    """
    q = traj.config.q
    eps = q - 1.0
    if abs(eps.imag) > 1e-14 or not (0.0 < eps.real <= 0.2):
        raise ValueError("quantitative comparison needs real eps = q - 1 in (0, 0.2]")
    eps = eps.real
    out = []
    for n in range(len(traj.values)):
        s = eps * n
        if window[0] - 1e-12 <= s <= window[1] + 1e-12:
            wa = complex(evaluate(s))
            out.append(ComparisonRow(n, s, complex(traj.values[n]), wa, abs(traj.values[n] - wa)))
    if not out:
        raise ValueError("window contains no trajectory samples")
    return out
