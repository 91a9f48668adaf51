"""Truncated Taylor-series arithmetic, vectorized over evaluation points.

A jet of order K at points x (shape (n,)) is stored as an array of Taylor
coefficients with shape (K+1, n): entry k holds f^(k)(x)/k!.  All rules
(product, quotient, exp, log, real power, composition) are exact truncations,
so derivatives carry no finite-difference error.  Orders stay tiny here
(K <= 8), which keeps every operation a handful of vectorized numpy ops.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "taylor_variable",
    "taylor_const",
    "taylor_mul",
    "taylor_exp",
    "taylor_log",
    "taylor_pow",
    "taylor_reciprocal",
    "taylor_compose",
    "derivatives_from_taylor",
    "taylor_from_derivatives",
    "FACTORIALS",
]

FACTORIALS = np.array([math.factorial(k) for k in range(32)], dtype=np.float64)


def taylor_variable(x: np.ndarray, order: int) -> np.ndarray:
    """Jet of the identity map at the points x."""
    x = np.asarray(x, dtype=np.float64)
    c = np.zeros((order + 1,) + x.shape, dtype=np.float64)
    c[0] = x
    if order >= 1:
        c[1] = 1.0
    return c


def taylor_const(value, order: int, shape) -> np.ndarray:
    c = np.zeros((order + 1,) + tuple(shape), dtype=np.float64)
    c[0] = value
    return c


def taylor_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated Cauchy product of two coefficient arrays of equal order."""
    order = a.shape[0] - 1
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.float64)
    for k in range(order + 1):
        for i in range(k + 1):
            out[k] += a[i] * b[k - i]
    return out


def taylor_exp(a: np.ndarray) -> np.ndarray:
    """exp of a jet: e_k = (1/k) sum_{j=1..k} j a_j e_{k-j}."""
    order = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    for k in range(1, order + 1):
        acc = np.zeros_like(a[0])
        for j in range(1, k + 1):
            acc += j * a[j] * out[k - j]
        out[k] = acc / k
    return out


def taylor_log(a: np.ndarray) -> np.ndarray:
    """log of a jet with strictly positive value part."""
    order = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0] = np.log(a[0])
    for k in range(1, order + 1):
        acc = k * a[k].astype(np.float64, copy=True)
        for j in range(1, k):
            acc -= j * out[j] * a[k - j]
        out[k] = acc / (k * a[0])
    return out


def taylor_pow(a: np.ndarray, beta: float) -> np.ndarray:
    """Real power a^beta of a jet with strictly positive value part.

    Recurrence from a * p' = beta * a' * p, which avoids the log/exp detour
    and stays exact for integer beta.
    """
    order = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0] = np.power(a[0], beta)
    for k in range(1, order + 1):
        acc = np.zeros_like(a[0])
        for j in range(1, k + 1):
            acc += (beta * j - (k - j)) * a[j] * out[k - j]
        out[k] = acc / (k * a[0])
    return out


def taylor_reciprocal(a: np.ndarray) -> np.ndarray:
    """1/a for a jet with nonzero value part."""
    order = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0] = 1.0 / a[0]
    for k in range(1, order + 1):
        acc = np.zeros_like(a[0])
        for j in range(1, k + 1):
            acc += a[j] * out[k - j]
        out[k] = -acc / a[0]
    return out


def taylor_compose(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """Jet of f(g(t)) given outer = jet of f at the points g(t) and inner = jet of g.

    Horner evaluation in the shifted inner jet (whose value part is zeroed),
    so the truncation is the exact Faa di Bruno sum up to the common order.
    """
    if outer.shape[0] != inner.shape[0]:
        raise ValueError("outer and inner jets must have the same order")
    delta = inner.copy()
    delta[0] = 0.0
    order = outer.shape[0] - 1
    shape = np.broadcast_shapes(outer.shape[1:], inner.shape[1:])
    out = np.zeros((order + 1,) + shape, dtype=np.float64)
    out[0] = outer[order]
    for k in range(order - 1, -1, -1):
        out = taylor_mul(out, delta)
        out[0] += outer[k]
    return out


def derivatives_from_taylor(c: np.ndarray) -> np.ndarray:
    """Convert Taylor coefficients to derivative values f^(k)."""
    order = c.shape[0] - 1
    scale = FACTORIALS[: order + 1].reshape((order + 1,) + (1,) * (c.ndim - 1))
    return c * scale


def taylor_from_derivatives(d: np.ndarray) -> np.ndarray:
    order = d.shape[0] - 1
    scale = FACTORIALS[: order + 1].reshape((order + 1,) + (1,) * (d.ndim - 1))
    return d / scale
