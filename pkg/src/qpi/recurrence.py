"""Asymptotic-series coefficients W_r(s) of the rescaled q-difference equation.

Matching powers of the step parameter in

    W(s+e) W(s)^2 W(s-e) = W(s) - (1+e)^(-s/e)

gives a nonlinear recurrence for the Taylor-coefficient functions W_r(s); the
right side expands as sum_r e^r exp(-s) P_r(-s) with P_r built from Stirling
numbers of the first kind.  Each W_r enters its own grade linearly with factor
(4 W_0^3 - 1) and is obtained by one series division.

The engine assembles the shifted factors W(s +- e) as graded lists whose
entries are Taylor series in (s - base) and convolves grades, rather than
evaluating the literal quintuple sum.  Grade r only ever needs entry r-k
through order (target + R - r), so intermediate series shrink linearly with r;
the returned table is uniform in the requested order.

Coefficients are complex doubles by default; ``mp=True`` switches the whole
construction to gmpy2 multiprecision (needed only when optimally-truncated
residuals at small e must be resolved below double rounding).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np

from . import branches, precision as _pr
from .series import TruncatedSeries

__all__ = [
    "stirling_first",
    "q_expansion_polynomial",
    "q_expansion_polynomial_oracle",
    "forcing_term",
    "CoefficientTable",
    "compute_coefficients",
    "first_correction",
    "LateOrderFit",
    "fit_late_order",
    "richardson",
]


# ----------------------------------------------------------------------------
# Stirling numbers and the q-expansion polynomials P_n
# ----------------------------------------------------------------------------

_STIRLING_ROWS: list[list[int]] = [[1]]


def _ensure_stirling(n: int) -> None:
    while len(_STIRLING_ROWS) <= n:
        m = len(_STIRLING_ROWS) - 1
        row = _STIRLING_ROWS[m]
        new = [0] * (m + 2)
        for k in range(m + 2):
            new[k] = (row[k - 1] if 1 <= k <= m + 1 else 0) - m * (
                row[k] if k <= m else 0
            )
        _STIRLING_ROWS.append(new)


def stirling_first(n: int, k: int) -> int:
    """Signed Stirling number of the first kind s1(n, k), exact integer."""
    if k < 0 or n < 0 or k > n:
        raise ValueError("need 0 <= k <= n")
    _ensure_stirling(n)
    return _STIRLING_ROWS[n][k]


@lru_cache(maxsize=512)
def q_expansion_polynomial(n: int) -> tuple[Fraction, ...]:
    """Exact coefficients of P_n(s); P_0 = 1, P_1(s) = -s/2.

    P_n is the n-th coefficient of the expansion of (1+e)^(s/e) exp(-s) in e
    at fixed s, written as a double sum over Stirling numbers of the first kind.
    """
    _ensure_stirling(2 * n)
    out = []
    for r in range(n + 1):
        tot = Fraction(0)
        for k in range(r + 1):
            tot += Fraction((-1) ** (r - k), math.factorial(r - k)) * Fraction(
                stirling_first(k + n, k), math.factorial(k + n)
            )
        out.append(tot)
    return tuple(out)


@lru_cache(maxsize=128)
def q_expansion_polynomial_oracle(n: int) -> tuple[Fraction, ...]:
    """Independent route to P_n: exponentiate s*(log(1+e)/e - 1) in exact arithmetic.

    (1+e)^(s/e) exp(-s) = exp(s * sum_{m>=1} (-1)^m e^m/(m+1)); the exponential
    of an e-series with polynomial coefficients is built by the standard
    derivative recurrence.  Shares nothing with the Stirling-number route.
    """
    # b[m] = coefficient polynomial of e^m in the exponent: s * (-1)^m/(m+1)
    b = [None] + [
        (Fraction(0), Fraction((-1) ** m, m + 1)) for m in range(1, n + 1)
    ]  # poly in s: (const, linear)
    E: list[tuple[Fraction, ...]] = [(Fraction(1),)]
    for m in range(1, n + 1):
        acc: list[Fraction] = []
        for k in range(1, m + 1):
            term = _poly_mul(b[k], E[m - k])
            term = tuple(k * c for c in term)
            acc = list(_poly_add(tuple(acc), term))
        E.append(tuple(c / m for c in acc))
    return E[n]


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def _poly_add(a, b):
    n = max(len(a), len(b))
    return tuple(
        (a[i] if i < len(a) else Fraction(0)) + (b[i] if i < len(b) else Fraction(0))
        for i in range(n)
    )


# ----------------------------------------------------------------------------
# raw-array kernels (dtype-agnostic: complex128 or object/gmpy2.mpc)
# ----------------------------------------------------------------------------


def _conv(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    return np.convolve(a[: n + 1], b[: n + 1])[: n + 1]


def _div(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    out = np.array(a[: n + 1])
    inv0 = 1 / b[0]
    out[0] = a[0] * inv0
    for k in range(1, n + 1):
        acc = a[k]
        kk = min(k, len(b) - 1)
        for j in range(1, kk + 1):
            acc = acc - b[j] * out[k - j]
        out[k] = acc * inv0
    return out


def _exp_neg_s(base, n: int, mp: bool) -> np.ndarray:
    """Coefficients of exp(-s) about base."""
    out = _pr.zeros(n + 1, mp)
    e0 = _pr.exp(-_pr.as_scalar(base, mp))
    f = e0
    out[0] = f
    for k in range(1, n + 1):
        f = -f / k
        out[k] = f
    return out


def _w0_series_array(base, j: int, n: int, mp: bool) -> np.ndarray:
    """Quartic Newton for the branch-j leading order as a raw coefficient array."""
    seed = branches.branch_value(complex(base), j)
    es = _exp_neg_s(base, n, mp)
    W = _pr.zeros(n + 1, mp)
    W[0] = _pr.as_scalar(seed, mp)
    for _ in range(int(math.log2(max(n, 1))) + 4):
        W2 = _conv(W, W, n)
        W3 = _conv(W2, W, n)
        f = _conv(W2, W2, n) - W + es
        fp = 4 * W3
        fp[0] = fp[0] - 1
        W = W - _div(f, fp, n)
    resid = _conv(_conv(W, W, n), _conv(W, W, n), n) - W + es
    if max(abs(complex(c)) for c in resid) > 1e-9:
        raise ArithmeticError("leading-order series Newton failed at this base point")
    return W


# ----------------------------------------------------------------------------
# coefficient table
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class CoefficientTable:
    """Series W_0 ... W_R about a common base point, all at a common order."""

    base_point: complex
    branch: int
    order: int
    entries: tuple[TruncatedSeries, ...]

    @property
    def R(self) -> int:
        return len(self.entries) - 1

    def values_at(self, s: complex) -> np.ndarray:
        """W_r(s) for every r, as complex128."""
        return np.array([complex(e(s)) for e in self.entries])

    def to_json(self) -> str:
        return json.dumps(
            {
                "base_point": [self.base_point.real, self.base_point.imag],
                "branch": self.branch,
                "order": self.order,
                "entries": [
                    [[float(complex(c).real), float(complex(c).imag)] for c in e.coeffs]
                    for e in self.entries
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "CoefficientTable":
        d = json.loads(text)
        base = complex(*d["base_point"])
        entries = tuple(
            TruncatedSeries(base, np.array([complex(re, im) for re, im in coeffs]))
            for coeffs in d["entries"]
        )
        return cls(base, d["branch"], d["order"], entries)


def compute_coefficients(
    base: complex,
    j: int,
    R: int,
    order: int,
    mp: bool = False,
    precision_bits: int = _pr.DEFAULT_PRECISION_BITS,
) -> CoefficientTable:
    """Build the coefficient table for branch j about ``base``.

    Bases within 0.1 of a singular point are refused.  Internally every
    intermediate series carries the extra headroom the derivative mixing
    consumes (entry r is exact through order + R - r), so the returned
    entries are all correct through the requested order.
    """
    base = complex(base)
    k_near = round(base.imag * 3.0 / (2.0 * math.pi))
    for k in (k_near - 1, k_near, k_near + 1):
        p = branches.SingularPoint.from_k(int(k))
        if abs(base - p.location) < 0.1:
            raise ValueError(f"base point within 0.1 of singular point {p.label}")
    if mp:
        with _pr.bits(precision_bits):
            arrays = _engine(base, j, R, order, mp=True)
    else:
        arrays = _engine(base, j, R, order, mp=False)
    entries = tuple(
        TruncatedSeries(base, a[: order + 1]) for a in arrays
    )
    return CoefficientTable(base, j, order, entries)


def _engine(base, j, R, order, mp: bool):
    # order of intermediate entry r
    n_of = lambda r: order + (R - r)
    N0 = n_of(0)
    W = _w0_series_array(base, j, N0, mp)
    if abs(complex(1 - 4 * complex(W[0]) ** 3)) < 1e-6:
        raise ValueError("base point too close to a coalescing-branch point")
    es = _exp_neg_s(base, N0, mp)
    arrays = [W]
    # derivative cache: dcache[r][k] = coefficients of W_r^{(k)} / k!
    dcache = [[W]]

    def getd(r: int, k: int) -> np.ndarray:
        cache = dcache[r]
        while len(cache) <= k:
            prev = cache[-1]
            kk = len(cache)
            cache.append(prev[1:] * np.arange(1, len(prev)) / kk)
        return cache[k]

    one = _pr.zeros(N0 + 1, mp)
    one[0] = _pr.as_scalar(1.0, mp)
    denom = one - 4 * _conv(_conv(W, W, N0), W, N0)
    inv = _div(one, denom, N0)

    Ap = [W]
    Am = [W]
    A0 = [W]
    P1 = [_conv(W, W, N0)]
    P2 = [_conv(W, W, N0)]
    minus_s = _pr.zeros(N0 + 1, mp)
    minus_s[0] = _pr.as_scalar(-base, mp)
    minus_s[1] = _pr.as_scalar(-1.0, mp)

    for r in range(1, R + 1):
        n = n_of(r)
        ApK = _pr.zeros(n + 1, mp)
        AmK = _pr.zeros(n + 1, mp)
        for k in range(1, r + 1):
            d = getd(r - k, k)[: n + 1]
            ApK[: len(d)] += d
            if k % 2:
                AmK[: len(d)] -= d
            else:
                AmK[: len(d)] += d
        # grade-r product with the unknown W_r zeroed in every factor
        P1K = _conv(ApK, A0[0], n)
        for a in range(1, r):
            P1K += _conv(Ap[a], A0[r - a], n)
        P2K = _conv(AmK, A0[0], n)
        for a in range(1, r):
            P2K += _conv(A0[a], Am[r - a], n)
        PK = _conv(P1K, P2[0], n) + _conv(P1[0], P2K, n)
        for a in range(1, r):
            PK += _conv(P1[a], P2[r - a], n)
        f_r = _forcing_array(r, base, n, mp, es)
        Wr = _conv(PK + f_r, inv, n)
        arrays.append(Wr)
        dcache.append([Wr])
        ApF = ApK + Wr
        AmF = AmK + Wr
        Ap.append(ApF)
        Am.append(AmF)
        A0.append(Wr)
        P1f = _conv(ApF, A0[0], n) + _conv(Ap[0], Wr, n)
        for a in range(1, r):
            P1f += _conv(Ap[a], A0[r - a], n)
        P2f = _conv(Wr, Am[0], n) + _conv(A0[0], AmF, n)
        for a in range(1, r):
            P2f += _conv(A0[a], Am[r - a], n)
        P1.append(P1f)
        P2.append(P2f)
    return arrays


def _forcing_array(r: int, base, n: int, mp: bool, es: np.ndarray) -> np.ndarray:
    """exp(-s) P_r(-s) about base, as a raw coefficient array of order n."""
    pc = q_expansion_polynomial(r)
    if mp:
        consts = [gmpy2.mpc(gmpy2.mpq(c.numerator, c.denominator)) for c in pc]
    else:
        consts = [complex(c) for c in pc]
    minus_s = _pr.zeros(n + 1, mp)
    minus_s[0] = _pr.as_scalar(-base, mp)
    minus_s[1] = _pr.as_scalar(-1.0, mp)
    acc = _pr.zeros(n + 1, mp)
    acc[0] = consts[-1]
    for c in reversed(consts[:-1]):
        acc = _conv(acc, minus_s, n)
        acc[0] = acc[0] + c
    return _conv(es[: n + 1], acc, n)


def forcing_term(r: int, base: complex, order: int) -> TruncatedSeries:
    """Taylor series of the grade-r forcing exp(-s) P_r(-s) about ``base``."""
    es = _exp_neg_s(base, order, False)
    return TruncatedSeries(complex(base), _forcing_array(r, complex(base), order, False, es))


def first_correction(s: complex, j: int) -> complex:
    """Closed form of the first correction: s exp(-s) / (2 (1 - 4 W_0^3))."""
    w0 = branches.branch_value(s, j)
    return s * np.exp(-s) / (2.0 * (1.0 - 4.0 * w0**3))


# ----------------------------------------------------------------------------
# late-order fitting
# ----------------------------------------------------------------------------


def richardson(ms: np.ndarray, vals: np.ndarray, levels: int | None = None) -> complex:
    """Extrapolate vals(m) -> m = infinity assuming an expansion in 1/m.

    Neville's scheme on the nodes 1/m; ``levels`` caps the table depth.
    """
    x = 1.0 / np.asarray(ms, float)
    t = np.asarray(vals, complex).copy()
    nlev = len(t) - 1 if levels is None else min(levels, len(t) - 1)
    for lev in range(1, nlev + 1):
        t = (x[lev:] * t[:-1] - x[:-lev] * t[1:]) / (x[lev:] - x[:-lev])
    return complex(t[-1])


@dataclass(frozen=True)
class LateOrderFit:
    """Factorial-over-power fit of the tail of a coefficient table at a point."""

    chi_estimate: complex
    gamma_estimate: float
    prefactor_estimate: complex
    r_used: tuple[int, int]
    chi_squared: complex
    even_amplitude: complex
    odd_amplitude: complex


def fit_late_order(table: CoefficientTable, s: complex | None = None) -> LateOrderFit:
    """Estimate singulant, index and amplitude from the late table entries.

    Even-index ratios W_{2r+2}/W_{2r} = (2r+g)(2r+1+g)/chi^2 give chi^2 and
    then g by Richardson extrapolation in 1/r; amplitudes come from the
    residual ratio against Gamma(r+g)/chi^(r+g) for each parity.  The square
    root of chi^2 is reported with the branch whose imaginary part is negative
    (the package-wide continuation convention on the principal strip), ties
    broken towards positive real part.
    """
    if table.R < 20:
        raise ValueError("late-order fit needs coefficients up to r >= 20")
    s = table.base_point if s is None else complex(s)
    vals = table.values_at(s)
    R = table.R
    n_pairs = (R - 2) // 2
    ms = []
    ratios = []
    for m in range(2 * max(2, n_pairs - 8), R - 1, 2):
        if vals[m] == 0:
            continue
        ms.append(m)
        ratios.append(vals[m + 2] / vals[m])
    if len(ms) < 3:
        raise ValueError("not enough usable even-index ratios")
    ms = np.array(ms, float)
    ratios = np.array(ratios)
    if np.any(np.abs(ratios[1:]) < np.abs(ratios[:-1]) * 0.5):
        raise ArithmeticError("even-index ratios not growing: point outside validity")
    chisq_seq = ms * (ms + 1.0) / ratios
    chisq = richardson(ms, chisq_seq, levels=3)
    gam_seq = []
    for m, x in zip(ms, ratios):
        g = x * chisq
        gam_seq.append(-m - 0.5 + np.sqrt(complex(g) + 0.25))
    gamma = richardson(ms, np.array(gam_seq), levels=2).real
    chi = _sqrt_with_convention(chisq)
    even_amp = _amplitude(vals, ms, chi, parity=0)
    odd_amp = _amplitude(vals, ms, chi, parity=1)
    return LateOrderFit(
        chi_estimate=chi,
        gamma_estimate=float(gamma),
        prefactor_estimate=(even_amp + odd_amp) / 2.0,
        r_used=(int(ms[0]), int(ms[-1] + 2)),
        chi_squared=chisq,
        even_amplitude=even_amp,
        odd_amplitude=odd_amp,
    )


def _amplitude(vals, ms, chi, parity: int) -> complex:
    lc = np.log(chi)
    amps = []
    mm = []
    for m in ms:
        r = int(m) + parity
        if r >= len(vals):
            continue
        a = r - 0.5  # Gamma(2r - 1/2) pattern for even, (2r + 1/2) for odd
        amp = vals[r] * np.exp(a * lc - math.lgamma(a))
        amps.append(amp)
        mm.append(m)
    return richardson(np.array(mm, float), np.array(amps), levels=2)


def _sqrt_with_convention(chisq: complex) -> complex:
    w = np.sqrt(complex(chisq))
    for cand in (w, -w):
        if cand.imag < -1e-12 * abs(cand):
            return complex(cand)
        if abs(cand.imag) <= 1e-12 * abs(cand) and cand.real > 0:
            return complex(cand)
    return complex(w)
