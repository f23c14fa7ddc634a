"""Scalar helpers that work for both machine complex and gmpy2 multiprecision values.

Everything numerical in this package runs in double precision by default.
The coefficient engine and the inner-problem recurrence optionally run on
``gmpy2.mpc``/``gmpy2.mpfr`` coefficients; these helpers give the two scalar
families a common surface so the series kernels stay dtype-agnostic.
"""

from __future__ import annotations

import cmath
from contextlib import contextmanager

import gmpy2
import numpy as np

#: default mantissa bits for extended-precision runs
DEFAULT_PRECISION_BITS = 200

_MP_TYPES = (gmpy2.mpc, gmpy2.mpfr, gmpy2.mpz, gmpy2.mpq)


def is_mp(x) -> bool:
    return isinstance(x, _MP_TYPES)


@contextmanager
def bits(nbits: int):
    """Temporarily set the gmpy2 working precision."""
    ctx = gmpy2.get_context()
    old = ctx.precision
    ctx.precision = nbits
    try:
        yield
    finally:
        ctx.precision = old


def as_scalar(x, mp: bool):
    return gmpy2.mpc(x) if mp else complex(x)


def exp(x):
    return gmpy2.exp(x) if is_mp(x) else cmath.exp(x)


def log(x):
    return gmpy2.log(x) if is_mp(x) else cmath.log(x)


def sqrt(x):
    return gmpy2.sqrt(x) if is_mp(x) else cmath.sqrt(x)


def power(x, alpha):
    if is_mp(x):
        return gmpy2.exp(gmpy2.mpc(alpha) * gmpy2.log(x))
    return cmath.exp(alpha * cmath.log(x))


def to_complex(x) -> complex:
    return complex(x)


def coeff_array(values, mp: bool) -> np.ndarray:
    """Coefficient storage: complex128 for doubles, object array of mpc otherwise."""
    if mp:
        return np.array([gmpy2.mpc(v) for v in values], dtype=object)
    return np.asarray(values, dtype=complex)


def zeros(n: int, mp: bool) -> np.ndarray:
    if mp:
        return np.array([gmpy2.mpc(0)] * n, dtype=object)
    return np.zeros(n, dtype=complex)
