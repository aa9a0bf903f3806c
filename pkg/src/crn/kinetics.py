"""Mass-action rate evaluation, deterministic and stochastic.

Deterministic rates are ``indicator(c >= 0) * kappa * c**y`` with the
convention ``0**0 = 1``; any negative coordinate kills every rate.
Stochastic rates are the falling-factorial form
``kappa * x!/(x-y)! * indicator(x >= y)``; states off the nonnegative
orthant are therefore absorbing.
"""

from __future__ import annotations

import numpy as np

from .model import MassActionSystem


def det_rates(sys: MassActionSystem, c) -> np.ndarray:
    """Deterministic mass-action rates at concentration vector ``c``.

    Returns an array aligned with ``sys.network.reactions``.
    """
    net = sys.network
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.shape != (net.n,):
        raise ValueError(f"state has length {c.shape[0]}, expected {net.n}")
    rates = np.zeros(net.r)
    if net.r == 0 or np.any(c < 0):
        return rates
    with np.errstate(over="ignore"):
        for k in range(net.r):
            mono = 1.0
            for ci, yi in zip(c, net.source_matrix[k]):
                if yi:
                    mono *= ci ** yi
            rates[k] = sys.kappa[k] * mono
    return rates


def falling_factorial(x: int, y: int) -> int:
    """x * (x-1) * ... * (x-y+1), with the empty product equal to 1."""
    out = 1
    for j in range(y):
        out *= x - j
    return out


def propensity(sys: MassActionSystem, x) -> np.ndarray:
    """Stochastic mass-action propensities at count vector ``x``.

    Returns an array aligned with ``sys.network.reactions``; a reaction with
    ``x`` not componentwise >= its source complex has propensity zero.
    """
    net = sys.network
    x = tuple(int(v) for v in x)
    if len(x) != net.n:
        raise ValueError(f"state has length {len(x)}, expected {net.n}")
    rates = np.zeros(net.r)
    for k in range(net.r):
        y = net.source_matrix[k]
        prod = 1
        for xi, yi in zip(x, y):
            if xi < yi:
                prod = 0
                break
            if yi:
                prod *= falling_factorial(xi, int(yi))
        if prod:
            rates[k] = sys.kappa[k] * prod
    return rates
