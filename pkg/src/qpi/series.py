"""Truncated complex Taylor series about a base point.

A :class:`TruncatedSeries` stores the coefficients of

    f(s) = c[0] + c[1] (s - s0) + ... + c[order] (s - s0)**order

with ``c[k]`` the k-th Taylor coefficient (derivative over k!).  Arithmetic
between two series requires equal base points and truncates to the smaller
order; all operations return new instances.  Coefficients are complex doubles
by default; object arrays of ``gmpy2.mpc`` are accepted everywhere for
extended-precision work (``np.convolve`` falls back to object arithmetic).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import precision as _pr


class BasePointMismatch(ValueError):
    """Arithmetic between series defined about different base points."""


class SeriesDomainError(ValueError):
    """Constant term incompatible with the requested operation (1/f, log f, ...)."""


def _check_base(a: "TruncatedSeries", b: "TruncatedSeries") -> None:
    if a.base_point != b.base_point:
        raise BasePointMismatch(f"base points differ: {a.base_point} vs {b.base_point}")


@dataclass(frozen=True)
class TruncatedSeries:
    """Polynomial jet of a function about ``base_point``; immutable."""

    base_point: complex
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if c.ndim != 1 or len(c) == 0:
            raise ValueError("coeffs must be a non-empty 1-D sequence")
        if c.dtype != object:
            c = c.astype(complex)
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    # -- construction ----------------------------------------------------

    @classmethod
    def constant(cls, value, base_point, order: int, mp: bool = False):
        c = _pr.zeros(order + 1, mp)
        c[0] = _pr.as_scalar(value, mp) if mp else complex(value)
        return cls(base_point, c)

    @classmethod
    def identity(cls, base_point, order: int, mp: bool = False):
        """The series of s itself about ``base_point``."""
        c = _pr.zeros(order + 1, mp)
        c[0] = _pr.as_scalar(base_point, mp) if mp else complex(base_point)
        if order >= 1:
            c[1] = _pr.as_scalar(1.0, mp) if mp else 1.0 + 0j
        return cls(base_point, c)

    # -- basic properties --------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_mp(self) -> bool:
        return self.coeffs.dtype == object

    def truncated(self, order: int) -> "TruncatedSeries":
        if order >= self.order:
            return self
        return TruncatedSeries(self.base_point, self.coeffs[: order + 1])

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k: int):
        return self.coeffs[k]

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            _check_base(self, other)
            n = min(self.order, other.order)
            return TruncatedSeries(self.base_point, self.coeffs[: n + 1] + other.coeffs[: n + 1])
        c = np.array(self.coeffs)
        c[0] = c[0] + other
        return TruncatedSeries(self.base_point, c)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.base_point, -np.asarray(self.coeffs))

    def __sub__(self, other):
        if isinstance(other, TruncatedSeries):
            return self + (-other)
        c = np.array(self.coeffs)
        c[0] = c[0] - other
        return TruncatedSeries(self.base_point, c)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            _check_base(self, other)
            n = min(self.order, other.order)
            c = np.convolve(self.coeffs[: n + 1], other.coeffs[: n + 1])[: n + 1]
            return TruncatedSeries(self.base_point, c)
        return TruncatedSeries(self.base_point, np.asarray(self.coeffs) * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            _check_base(self, other)
            n = min(self.order, other.order)
            return TruncatedSeries(
                self.base_point, _div_coeffs(self.coeffs[: n + 1], other.coeffs[: n + 1])
            )
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        num = TruncatedSeries.constant(other, self.base_point, self.order, self.is_mp)
        return num / self

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise TypeError("only non-negative integer powers; use .pow(alpha) otherwise")
        out = TruncatedSeries.constant(1.0, self.base_point, self.order, self.is_mp)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    # -- calculus -----------------------------------------------------------

    def differentiate(self) -> "TruncatedSeries":
        """d/ds; drops the order by one (order 0 maps to the zero series)."""
        if self.order == 0:
            return TruncatedSeries(self.base_point, _pr.zeros(1, self.is_mp))
        ks = np.arange(1, self.order + 1)
        return TruncatedSeries(self.base_point, self.coeffs[1:] * ks)

    def integrate(self) -> "TruncatedSeries":
        """Antiderivative with zero constant; raises the order by one."""
        c = _pr.zeros(self.order + 2, self.is_mp)
        c[1:] = self.coeffs / np.arange(1, self.order + 2)
        return TruncatedSeries(self.base_point, c)

    # -- evaluation ----------------------------------------------------------

    def __call__(self, s):
        """Horner evaluation of the polynomial at ``s``."""
        z = s - self.base_point
        acc = self.coeffs[-1]
        for c in self.coeffs[-2::-1]:
            acc = acc * z + c
        return acc

    # -- elementary functions -------------------------------------------------

    def exp(self) -> "TruncatedSeries":
        n = self.order
        out = _pr.zeros(n + 1, self.is_mp)
        out[0] = _pr.exp(self.coeffs[0])
        for k in range(1, n + 1):
            acc = 0
            for j in range(1, k + 1):
                acc = acc + j * self.coeffs[j] * out[k - j]
            out[k] = acc / k
        return TruncatedSeries(self.base_point, out)

    def log(self) -> "TruncatedSeries":
        """Principal branch; constant term must be nonzero."""
        if self.coeffs[0] == 0:
            raise SeriesDomainError("log of a series with vanishing constant term")
        n = self.order
        out = _pr.zeros(n + 1, self.is_mp)
        out[0] = _pr.log(self.coeffs[0])
        if n >= 1:
            dlog = _div_coeffs(self.coeffs[1:] * np.arange(1, n + 1), self.coeffs[:n])
            out[1:] = dlog / np.arange(1, n + 1)
        return TruncatedSeries(self.base_point, out)

    def pow(self, alpha) -> "TruncatedSeries":
        """Principal branch of f**alpha for arbitrary (complex) alpha."""
        if self.coeffs[0] == 0:
            raise SeriesDomainError("pow of a series with vanishing constant term")
        n = self.order
        out = _pr.zeros(n + 1, self.is_mp)
        out[0] = _pr.power(self.coeffs[0], alpha)
        inv0 = 1 / self.coeffs[0]
        for k in range(1, n + 1):
            acc = 0
            for j in range(1, k + 1):
                acc = acc + ((alpha + 1) * j - k) * self.coeffs[j] * out[k - j]
            out[k] = acc * inv0 / k
        return TruncatedSeries(self.base_point, out)

    def sqrt(self) -> "TruncatedSeries":
        return self.pow(0.5)


def _div_coeffs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Coefficients of a/b through min length; b[0] must be nonzero."""
    if b[0] == 0:
        raise SeriesDomainError("division by a series with vanishing constant term")
    n = min(len(a), len(b)) - 1
    out = np.array(a[: n + 1])
    inv0 = 1 / b[0]
    out[0] = a[0] * inv0
    for k in range(1, n + 1):
        acc = a[k]
        for j in range(1, k + 1):
            acc = acc - b[j] * out[k - j]
        out[k] = acc * inv0
    return out


class _Dual:
    """First-order dual number used to differentiate callables on series."""

    __slots__ = ("val", "der")
    __array_priority__ = 1000.0

    def __init__(self, val, der=0.0):
        self.val = complex(val)
        self.der = complex(der)

    def __add__(self, o):
        o = o if isinstance(o, _Dual) else _Dual(o)
        return _Dual(self.val + o.val, self.der + o.der)

    __radd__ = __add__

    def __neg__(self):
        return _Dual(-self.val, -self.der)

    def __sub__(self, o):
        o = o if isinstance(o, _Dual) else _Dual(o)
        return _Dual(self.val - o.val, self.der - o.der)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = o if isinstance(o, _Dual) else _Dual(o)
        return _Dual(self.val * o.val, self.val * o.der + self.der * o.val)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = o if isinstance(o, _Dual) else _Dual(o)
        return _Dual(self.val / o.val, (self.der * o.val - self.val * o.der) / (o.val * o.val))

    def __rtruediv__(self, o):
        return _Dual(o) / self

    def __eq__(self, o):
        return self.val == (o.val if isinstance(o, _Dual) else o) and (
            not isinstance(o, _Dual) or self.der == o.der
        )

    def __abs__(self):
        return abs(self.val)

    def __complex__(self):
        return self.val

    def __repr__(self):
        return f"_Dual({self.val}, {self.der})"


def newton_root(poly, seed, base, order: int, tol: float = 1e-12):
    """Series S about ``base`` with poly(S) = 0 through ``order``.

    ``poly`` is a callable on TruncatedSeries built from ring operations
    (+, -, *, /, integer powers) and constant series.  ``seed`` must be a
    simple root of the order-0 equation; a seed at (or too near) a multiple
    root makes the Newton step singular and raises ValueError.
    """
    w = TruncatedSeries.constant(seed, base, order)
    f0 = poly(w)
    if abs(complex(f0.coeffs[0])) > 1e-8 * max(1.0, abs(complex(seed))):
        raise ValueError(f"seed {seed} is not a root of the order-0 equation")
    for _ in range(order + 4):
        fw = poly(w)
        dp = _poly_derivative(poly, w)
        if abs(complex(dp.coeffs[0])) < 1e-9:
            raise ValueError("Newton step singular: base point is at a coalescing-root point")
        w = w - fw / dp
        if _max_abs(poly(w).coeffs) < tol:
            break
    resid = _max_abs(poly(w).coeffs)
    if resid > 100 * tol:
        raise ValueError(f"series Newton did not converge (residual {resid:.2e})")
    return w


def _poly_derivative(poly, w: TruncatedSeries) -> TruncatedSeries:
    """poly'(w) as a series, via dual-number coefficients.

    Perturbing w by t (a constant direction) and reading the first-order part
    of poly(w + t) gives poly'(w) exactly for ring-operation callables.
    """
    duals = np.array(
        [_Dual(c, 1.0 if k == 0 else 0.0) for k, c in enumerate(np.asarray(w.coeffs))],
        dtype=object,
    )
    res = poly(TruncatedSeries(w.base_point, duals))
    der = np.array(
        [c.der if isinstance(c, _Dual) else 0.0 for c in res.coeffs], dtype=complex
    )
    return TruncatedSeries(w.base_point, der)


def _max_abs(coeffs) -> float:
    return max(abs(complex(c)) for c in coeffs)
