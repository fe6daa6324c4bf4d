import math

import numpy as np
import pytest

from amariflow import (
    Field,
    Gaussian,
    Grid,
    MexicanHatExp,
    MexicanHatGauss,
    build_operator_matrix,
    spectral_decompose,
)


@pytest.fixture(scope="session")
def gauss_setup():
    """Moderate-width Gaussian kernel on a truncated grid, decomposed once.

    The kernel decays to ~1e-28 by the domain edge, so truncation effects sit
    far below every tolerance used against this fixture.
    """
    kernel = Gaussian(width=0.3)
    grid = Grid(-4.0, 4.0, 64)
    dec = spectral_decompose(build_operator_matrix(kernel, grid), grid)
    return kernel, grid, dec


@pytest.fixture(scope="session")
def periodic_setup():
    """Same kernel on a periodic grid; wrap distance L/2 = 4 keeps J(L/2) tiny."""
    kernel = Gaussian(width=0.3)
    grid = Grid(-4.0, 4.0, 64, "periodic")
    dec = spectral_decompose(build_operator_matrix(kernel, grid), grid)
    return kernel, grid, dec


def field_in_span(dec, coeffs):
    c = np.zeros(dec.rank)
    c[: len(coeffs)] = coeffs
    return dec.reconstruct(c)


def random_field_in_S(dec, rng, scale=1.0):
    c = rng.normal(size=dec.rank) * np.sqrt(dec.lambdas) * scale
    return dec.reconstruct(c)


def constant_field(grid, value):
    return Field(grid, np.full(grid.n, float(value)))


def sweep_xi_max(kernel):
    """Frequency range guaranteed to cover the density's sign change."""
    if isinstance(kernel, MexicanHatGauss):
        if kernel.s < math.sqrt(2.0):
            # crossing of the two Gaussian branches; the negative tail
            # starts beyond it
            xc2 = math.log(math.sqrt(2.0) / (kernel.amp * kernel.s)) / (
                0.5 - kernel.s**2 / 4.0
            )
            return 1.5 * math.sqrt(xc2) + 5.0
        return 10.0
    if isinstance(kernel, MexicanHatExp):
        return 5.0 * kernel.gamma1
    return 20.0
