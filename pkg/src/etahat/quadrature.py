"""Adaptive fixed-rule quadrature with node doubling."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from etahat.errors import NoConvergence

NODE_CAP = 2**16


@lru_cache(maxsize=32)
def chebyshev_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Chebyshev (first kind) rule for int_{-1}^{1} f(t) / sqrt(1 - t^2) dt."""
    k = np.arange(1, n + 1)
    return np.cos((2 * k - 1) * np.pi / (2 * n)), np.full(n, np.pi / n)


@lru_cache(maxsize=32)
def legendre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def adaptive(f, rule, rtol: float = 1e-11, n0: int = 16, cap: int = NODE_CAP):
    """Integrate ``f`` on [-1, 1] with ``rule``, doubling nodes until two
    successive estimates agree to ``rtol`` relative to the integrand's L1 size.

    Returns ``(value, nodes_used, residual)``.
    """
    t, w = rule(n0)
    vals = f(t)
    prev = np.sum(w * vals)
    n = n0
    while n < cap:
        n *= 2
        t, w = rule(n)
        vals = f(t)
        cur = np.sum(w * vals)
        scale = np.sum(w * np.abs(vals))
        resid = abs(cur - prev)
        if resid <= rtol * max(scale, 1e-300):
            return complex(cur), n, float(resid / max(scale, 1e-300))
        prev = cur
    raise NoConvergence(f"quadrature did not reach rtol={rtol:g} within {cap} nodes")
