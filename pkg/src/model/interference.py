"""
Interference special functions Q, V and W.

For a linear SIR threshold beta and delta = 2/alpha in (0, 1):

    Q(beta) = (delta*beta/(1-delta)) * 2F1(1, 1-delta; 2-delta; -beta)
            = integral_1^inf beta / (beta + t**(1/delta)) dt
            = delta * beta**delta * integral_0^beta u**(-delta) / (1+u) du
    V(beta) = beta**delta * delta*pi / sin(delta*pi)
    W(beta) = 1 + Q(beta) - V(beta)

Q collects interference from BSs that hold the requested file (they are
farther than the serving BS), V from BSs that do not. Since
V - Q = delta * beta**delta * integral_beta^inf u**(-delta)/(1+u) du < 1,
W lies in (0, 1] for every admissible input.
"""

import logging
import math
from functools import lru_cache
from typing import NamedTuple

from scipy import integrate, special

from src.model.errors import DomainError

logger = logging.getLogger(__name__)

QUAD_EPSREL = 1e-12
QUAD_EPSABS = 0.0
QUAD_LIMIT = 200


def _check_domain(beta: float, delta: float) -> None:
    if not (math.isfinite(delta) and 0.0 < delta < 1.0):
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if not (math.isfinite(beta) and beta >= 0.0):
        raise DomainError(f"beta must be finite and >= 0, got {beta}")


def _kernel(u: float) -> float:
    return 1.0 / (1.0 + u)


def tail_interference_integral(x: float, delta: float) -> float:
    """Integral of u**(-delta) / (1 + u) over [0, x].

    The algebraic endpoint singularity is handled by QUADPACK's ``alg``
    weight, so the integrand left to the quadrature rule is smooth.
    """
    _check_domain(x, delta)
    if x == 0.0:
        return 0.0
    value, _ = integrate.quad(
        _kernel, 0.0, x, weight="alg", wvar=(-delta, 0.0),
        epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT,
    )
    return value


def _upper_tail_integral(x: float, delta: float) -> float:
    # integral_x^inf u^-delta/(1+u) du, mapped by u = 1/s onto [0, 1/x]
    value, _ = integrate.quad(
        _kernel, 0.0, 1.0 / x, weight="alg", wvar=(delta - 1.0, 0.0),
        epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT,
    )
    return value


@lru_cache(maxsize=4096)
def q_func(beta: float, delta: float) -> float:
    """Interference term Q(beta) from BSs that cache the requested file.

    Args:
        beta: Linear SIR threshold, >= 0
        delta: 2 / path-loss exponent, in (0, 1)

    Returns:
        Q(beta) >= 0, increasing in beta
    """
    beta = float(beta)
    delta = float(delta)
    _check_domain(beta, delta)
    if beta == 0.0:
        return 0.0
    if delta == 0.5:
        root = math.sqrt(beta)
        return root * math.atan(root)
    scale = delta * beta ** delta
    if beta <= 1.0:
        return scale * tail_interference_integral(beta, delta)
    # Q = V - scale * upper tail keeps full relative accuracy for large beta
    return v_func(beta, delta) - scale * _upper_tail_integral(beta, delta)


def q_func_series(beta: float, delta: float, terms: int = 2000) -> float:
    """Power-series evaluation of Q for beta < 1.

    Q = delta * sum_n (-1)**n beta**(n+1) / (n + 1 - delta)
    """
    _check_domain(beta, delta)
    if beta >= 1.0:
        raise DomainError(f"the power series only converges for beta < 1, got {beta}")
    total = 0.0
    power = beta
    for n in range(terms):
        term = power / (n + 1.0 - delta)
        total += term if n % 2 == 0 else -term
        power *= beta
        if power == 0.0:
            break
    return delta * total


def q_func_hyp2f1(beta: float, delta: float) -> float:
    """Q evaluated through scipy's Gauss hypergeometric function."""
    _check_domain(beta, delta)
    if beta == 0.0:
        return 0.0
    return delta * beta / (1.0 - delta) * float(special.hyp2f1(1.0, 1.0 - delta, 2.0 - delta, -beta))


def v_func(beta: float, delta: float) -> float:
    """Interference term V(beta) from BSs that do not cache the requested file."""
    _check_domain(beta, delta)
    return beta ** delta * delta * math.pi / math.sin(delta * math.pi)


def w_func(beta: float, delta: float) -> float:
    """W(beta) = 1 + Q(beta) - V(beta)."""
    return 1.0 + q_func(beta, delta) - v_func(beta, delta)


class InterferenceTerms(NamedTuple):
    q: float
    v: float
    w: float


def interference_terms(beta: float, delta: float) -> InterferenceTerms:
    """Q, V and W for one threshold, with the W*p + V > 0 guard applied."""
    q = q_func(beta, delta)
    v = v_func(beta, delta)
    w = 1.0 + q - v
    # W*p + V is affine in p, so positivity at both ends covers [0, 1]
    if beta > 0 and (v <= 0.0 or w + v <= 0.0):
        raise DomainError(f"non-positive hit denominator for beta={beta}, delta={delta}")
    return InterferenceTerms(q, v, w)
