"""Gain nonlinearities and the Lyapunov structure of the field dynamics.

The drift -alpha*u + K F(u) is the negative gradient, in the nonlocal inner
product (f, g)_-1 = <K^(-1) f, g>, of

    Theta(u) = -Phi(u) + Psi(u),
    Phi(u)   = integral phi(u(x)) dx,   phi' = f,  phi(0) = 0,
    Psi(u)   = (alpha/2) ||u||_-1^2.

All antiderivatives are pinned by phi(0) = 0; the additive constant is
irrelevant to gradients and to energy differences, and the convention makes
values comparable across gains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import RangeError
from .operator import (
    DEFAULT_MEMBERSHIP_TOL,
    Field,
    SpectralDecomposition,
    _coeffs_in_S,
)

LN2 = math.log(2.0)

GAIN_FAMILIES = ("sigmoid", "tanh", "cubic", "constant", "zero")


@dataclass(frozen=True)
class GainSpec:
    """Pointwise gain f with derivative and antiderivative.

    sigmoid   f(s) = 1/(1+exp(-s))          Lipschitz 1/4
    tanh      f(s) = (tanh(s)+1)/2          Lipschitz 1/2
    cubic     f(s) = (s+1)(1-s)(s-0.1)      not Lipschitz (cubic growth)
    constant  f(s) = c                      Lipschitz 0
    zero      f(s) = 0                      Lipschitz 0

    The cubic gain may be constructed freely but integrators refuse it
    unless allow_non_lipschitz is set: without global Lipschitz control the
    explicit schemes can escape to infinity, so runs with it are guarded by
    a trust region (see the BlowUp clamp in the integrators).
    """

    family: str
    c: float = 0.0
    allow_non_lipschitz: bool = False

    def __post_init__(self):
        if self.family not in GAIN_FAMILIES:
            raise RangeError(
                f"gain family must be one of {GAIN_FAMILIES}, got {self.family!r}"
            )
        if not np.isfinite(self.c):
            raise RangeError(f"constant gain level must be finite, got {self.c!r}")

    @property
    def non_lipschitz(self) -> bool:
        return self.family == "cubic"

    @property
    def lipschitz_constant(self) -> float | None:
        """Global Lipschitz constant of f, None for the cubic gain."""
        return {"sigmoid": 0.25, "tanh": 0.5, "cubic": None,
                "constant": 0.0, "zero": 0.0}[self.family]

    def f(self, s):
        s = np.asarray(s, dtype=float)
        if self.family == "sigmoid":
            return expit(s)
        if self.family == "tanh":
            return 0.5 * (np.tanh(s) + 1.0)
        if self.family == "cubic":
            return (s + 1.0) * (1.0 - s) * (s - 0.1)
        if self.family == "constant":
            return np.full_like(s, self.c)
        return np.zeros_like(s)

    def fprime(self, s):
        s = np.asarray(s, dtype=float)
        if self.family == "sigmoid":
            p = expit(s)
            return p * (1.0 - p)
        if self.family == "tanh":
            sech = 2.0 * np.exp(-np.abs(s)) / (1.0 + np.exp(-2.0 * np.abs(s)))
            return 0.5 * sech * sech
        if self.family == "cubic":
            return -3.0 * s * s + 0.2 * s + 1.0
        return np.zeros_like(s)

    def phi(self, s):
        """Antiderivative of f with phi(0) = 0, overflow-safe."""
        s = np.asarray(s, dtype=float)
        if self.family == "sigmoid":
            # log(1 + e^s) - log 2
            return np.logaddexp(0.0, s) - LN2
        if self.family == "tanh":
            # (log cosh s)/2 + s/2
            logcosh = np.abs(s) + np.log1p(np.exp(-2.0 * np.abs(s))) - LN2
            return 0.5 * (logcosh + s)
        if self.family == "cubic":
            s2 = s * s
            return -0.25 * s2 * s2 + (0.1 / 3.0) * s2 * s + 0.5 * s2 - 0.1 * s
        if self.family == "constant":
            return self.c * s
        return np.zeros_like(s)


def nemytskii_F(gain: GainSpec, u: Field) -> Field:
    """Pointwise superposition F(u)(x) = f(u(x))."""
    return Field(u.grid, gain.f(u.values))


def phi_functional(gain: GainSpec, u: Field) -> float:
    """Phi(u) = integral phi(u(x)) dx by the midpoint rule."""
    return float(u.grid.h * np.sum(gain.phi(u.values)))


def psi_functional(
    dec: SpectralDecomposition,
    alpha: float,
    u: Field,
    membership_tol: float = DEFAULT_MEMBERSHIP_TOL,
) -> float:
    """Psi(u) = (alpha/2) ||u||_-1^2; requires u in S."""
    if alpha <= 0.0:
        raise RangeError(f"alpha must be positive, got {alpha!r}")
    c = _coeffs_in_S(dec, u, membership_tol)
    return float(0.5 * alpha * np.sum(c * c / dec.lambdas))


def theta_functional(
    dec: SpectralDecomposition,
    gain: GainSpec,
    alpha: float,
    u: Field,
    membership_tol: float = DEFAULT_MEMBERSHIP_TOL,
) -> float:
    """Theta(u) = -Phi(u) + Psi(u), the Lyapunov functional of the flow."""
    return -phi_functional(gain, u) + psi_functional(dec, alpha, u, membership_tol)


def grad_theta(
    dec: SpectralDecomposition,
    gain: GainSpec,
    alpha: float,
    u: Field,
    membership_tol: float = DEFAULT_MEMBERSHIP_TOL,
) -> Field:
    """Riesz gradient of Theta in the (., .)_-1 product: alpha*u - K F(u).

    K is applied through the retained modes, so the result lies in S (up to
    u's own membership tolerance).  The negated gradient is exactly the
    drift the integrators assemble.
    """
    if alpha <= 0.0:
        raise RangeError(f"alpha must be positive, got {alpha!r}")
    _coeffs_in_S(dec, u, membership_tol)
    fu = gain.f(u.values)
    kf = dec.eigenfields @ (dec.lambdas * (dec.grid.h * (dec.eigenfields.T @ fu)))
    return Field(u.grid, alpha * u.values - kf)


def fd_directional(functional, u: Field, direction: Field, t: float) -> float:
    """Central finite difference of a functional along a direction."""
    if t <= 0.0:
        raise RangeError(f"step t must be positive, got {t!r}")
    up = Field(u.grid, u.values + t * direction.values)
    dn = Field(u.grid, u.values - t * direction.values)
    return (functional(up) - functional(dn)) / (2.0 * t)
