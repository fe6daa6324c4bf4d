"""Midpoint discretization of the convolution operator and its spectrum.

The operator (K g)(x) = integral J(x - y) g(y) dy on a bounded interval is
discretized on midpoint nodes x_j = a + (j + 1/2) h, h = (b - a)/n, as the
symmetric matrix K_ij = h * J(d(x_i, x_j)), with d the signed difference
(truncated boundary) or the minimal wrapped image (periodic boundary).

The discrete H inner product is <f, g> = h * sum f_j g_j.  Eigenvectors of K
are rescaled by h^(-1/2) so the eigenfields are H-orthonormal; everything
downstream (mode coefficients, H_-1 and H_1 norms, Galerkin dynamics) is
expressed in that basis.  S denotes the span of the retained eigenfields,
i.e. the numerically resolved range of K.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg

from .errors import (
    DimensionMismatchError,
    GridMismatchError,
    InvalidDomainError,
    NonpositiveEigenvalueError,
    NotInSError,
    NotNonnegativeError,
    RangeError,
    RankExceededError,
    ValidationError,
)
from .kernels import Kernel

DEFAULT_REL_TOL = 1e-10
DEFAULT_NEG_TOL = 1e-8
DEFAULT_MEMBERSHIP_TOL = 1e-6

BOUNDARIES = ("truncated", "periodic")


@dataclass(frozen=True)
class Grid:
    """Uniform midpoint grid on [a, b] with n cells."""

    a: float
    b: float
    n: int
    boundary: str = "truncated"

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b) and self.a < self.b):
            raise InvalidDomainError(f"need a < b, got [{self.a!r}, {self.b!r}]")
        if self.n < 1:
            raise InvalidDomainError(f"need n >= 1, got {self.n!r}")
        if self.boundary not in BOUNDARIES:
            raise InvalidDomainError(
                f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}"
            )

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def length(self) -> float:
        return self.b - self.a

    @cached_property
    def nodes(self) -> np.ndarray:
        return self.a + (np.arange(self.n) + 0.5) * self.h


def build_grid(a: float, b: float, n: int, boundary: str = "truncated") -> Grid:
    return Grid(float(a), float(b), int(n), boundary)


@dataclass(frozen=True, eq=False)
class Field:
    """Grid function carrying its grid; arithmetic checks grid identity."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise GridMismatchError(
                f"values shape {v.shape} does not match grid n = {self.grid.n}"
            )
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "Field":
        return cls(grid, np.full(grid.n, float(c)))

    def _check_same_grid(self, other: "Field"):
        if self.grid != other.grid:
            raise GridMismatchError("fields live on different grids")

    def __add__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, c: float) -> "Field":
        return Field(self.grid, self.values * float(c))

    __rmul__ = __mul__


def inner_h(f: Field, g: Field) -> float:
    f._check_same_grid(g)
    return float(f.grid.h * np.dot(f.values, g.values))


def norm_h(f: Field) -> float:
    return float(np.sqrt(f.grid.h) * np.linalg.norm(f.values))


def _distance_matrix(grid: Grid) -> np.ndarray:
    d = grid.nodes[:, None] - grid.nodes[None, :]
    if grid.boundary == "periodic":
        L = grid.length
        d = d - L * np.round(d / L)
    return np.abs(d)


def build_operator_matrix(kernel: Kernel, grid: Grid) -> np.ndarray:
    """Dense h * J(d) matrix; exactly symmetric by construction (J is
    evaluated on |d| and |d| is a symmetric matrix)."""
    return grid.h * kernel.evaluate(_distance_matrix(grid))


def apply_operator(kernel: Kernel, grid: Grid, g: Field) -> Field:
    """FFT application of K, O(n log n); matches the dense matvec to
    rounding.  Truncated boundary uses a symmetric Toeplitz product,
    periodic uses circular convolution."""
    if g.grid != grid:
        raise GridMismatchError("field grid does not match operator grid")
    h = grid.h
    if grid.boundary == "truncated":
        col = h * kernel.evaluate(np.arange(grid.n) * h)
        out = linalg.matmul_toeplitz((col, col), g.values)
    else:
        L = grid.length
        d = np.arange(grid.n) * h
        d = d - L * np.round(d / L)
        col = h * kernel.evaluate(np.abs(d))
        out = np.fft.irfft(np.fft.rfft(col) * np.fft.rfft(g.values), grid.n)
    return Field(grid, out)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Retained eigenpairs of the discretized operator.

    lambdas are strictly positive and descending; eigenfields columns are
    H-orthonormal (Euclidean eigenvectors scaled by h^(-1/2)).  threshold is
    the retention cutoff tau, discarded_max the largest eigenvalue left out
    (0.0 when nothing was discarded): it bounds the leakage of applying K
    through the retained modes only.
    """

    grid: Grid
    lambdas: np.ndarray
    eigenfields: np.ndarray
    threshold: float
    discarded_max: float

    @property
    def rank(self) -> int:
        return int(self.lambdas.size)

    def coeffs(self, g: Field) -> np.ndarray:
        """H-inner products <g, e_i> for all retained modes."""
        if g.grid != self.grid:
            raise GridMismatchError("field grid does not match decomposition grid")
        return self.grid.h * (self.eigenfields.T @ g.values)

    def reconstruct(self, c) -> Field:
        c = np.asarray(c, dtype=float)
        if c.ndim != 1:
            raise DimensionMismatchError(f"coefficients must be 1-d, got shape {c.shape}")
        if c.size > self.rank:
            raise RankExceededError(
                f"{c.size} coefficients but only {self.rank} retained modes"
            )
        return Field(self.grid, self.eigenfields[:, : c.size] @ c)


def spectral_decompose(
    K: np.ndarray,
    grid: Grid,
    rel_tol: float = DEFAULT_REL_TOL,
    neg_tol: float = DEFAULT_NEG_TOL,
) -> SpectralDecomposition:
    """Eigendecompose the discretized operator and retain lambda > tau.

    tau = rel_tol * lambda_max.  Raises NotNonnegative if any eigenvalue
    falls below -neg_tol * max|lambda|: the kernel fails nonnegative
    definiteness at this grid's resolution.
    """
    K = np.asarray(K, dtype=float)
    if K.shape != (grid.n, grid.n):
        raise GridMismatchError(f"operator shape {K.shape} does not match n = {grid.n}")
    if rel_tol < 0.0 or neg_tol < 0.0:
        raise RangeError("rel_tol and neg_tol must be >= 0")
    scale = float(np.abs(K).max())
    if scale > 0.0 and float(np.abs(K - K.T).max()) > 1e-12 * scale:
        raise ValidationError("operator matrix is not symmetric")
    w, V = linalg.eigh(K)
    lam_abs_max = float(np.abs(w).max()) if w.size else 0.0
    if w.size and float(w[0]) < -neg_tol * lam_abs_max:
        raise NotNonnegativeError(
            f"eigenvalue {w[0]:.6e} below -neg_tol * max|lambda| = "
            f"{-neg_tol * lam_abs_max:.6e}"
        )
    w = w[::-1]
    V = V[:, ::-1]
    lam_max = float(w[0]) if w.size else 0.0
    tau = rel_tol * max(lam_max, 0.0)
    keep = w > tau
    discarded = w[~keep]
    discarded_max = float(discarded.max()) if discarded.size else 0.0
    w = np.ascontiguousarray(w[keep])
    V = V[:, keep]
    # Deterministic sign: largest-magnitude component of each mode positive.
    if V.size:
        piv = np.argmax(np.abs(V), axis=0)
        signs = np.sign(V[piv, np.arange(V.shape[1])])
        signs[signs == 0.0] = 1.0
        V = V * signs
    eigenfields = V / np.sqrt(grid.h)
    return SpectralDecomposition(
        grid=grid,
        lambdas=w,
        eigenfields=np.ascontiguousarray(eigenfields),
        threshold=tau,
        discarded_max=discarded_max,
    )


def project_S(dec: SpectralDecomposition, g: Field) -> tuple[Field, float]:
    """H-orthogonal projection onto S and the H-norm of the residual."""
    c = dec.coeffs(g)
    p = dec.reconstruct(c)
    return p, norm_h(g - p)


def _coeffs_in_S(dec, g: Field, membership_tol: float) -> np.ndarray:
    c = dec.coeffs(g)
    resid = norm_h(g - dec.reconstruct(c))
    if resid > membership_tol * max(norm_h(g), np.finfo(float).tiny):
        raise NotInSError(
            f"field has H-relative residual {resid / max(norm_h(g), np.finfo(float).tiny):.3e} "
            f"outside S (tol {membership_tol:.1e})"
        )
    return c

def norm_hminus1(
    dec: SpectralDecomposition, g: Field, membership_tol: float = DEFAULT_MEMBERSHIP_TOL
) -> float:
    """Nonlocal norm ||K^(-1/2) g||_H; requires g in S within membership_tol."""
    c = _coeffs_in_S(dec, g, membership_tol)
    return float(np.sqrt(np.sum(c * c / dec.lambdas)))


def inner_hminus1(
    dec: SpectralDecomposition,
    f: Field,
    g: Field,
    membership_tol: float = DEFAULT_MEMBERSHIP_TOL,
) -> float:
    cf = _coeffs_in_S(dec, f, membership_tol)
    cg = _coeffs_in_S(dec, g, membership_tol)
    return float(np.sum(cf * cg / dec.lambdas))


def norm_hplus1(dec: SpectralDecomposition, g: Field) -> float:
    """Smoothed norm ||K^(1/2) g||_H; the null component contributes zero,
    so no membership requirement."""
    c = dec.coeffs(g)
    return float(np.sqrt(np.sum(dec.lambdas * c * c)))


def check_assumption5(lambdas, b_coeffs, n_terms: int | None = None):
    """Partial sums of b_i^2 / lambda_i, the small-noise summability
    quantity, plus a monotone-growth flag (non-decaying terms mean the sum
    would diverge as modes are added).  Advisory: in finite dimension every
    sum is finite, so nothing downstream refuses to run on this.
    """
    lam = np.asarray(lambdas, dtype=float).ravel()
    b = np.asarray(b_coeffs, dtype=float).ravel()
    if n_terms is None:
        n_terms = min(lam.size, b.size)
    n_terms = int(n_terms)
    if n_terms < 1:
        raise RangeError(f"need n_terms >= 1, got {n_terms}")
    if lam.size < n_terms or b.size < n_terms:
        raise DimensionMismatchError(
            f"need {n_terms} eigenvalues and coefficients, got {lam.size} and {b.size}"
        )
    lam = lam[:n_terms]
    b = b[:n_terms]
    if np.any(lam <= 0.0):
        raise NonpositiveEigenvalueError(
            "summability terms b_i^2/lambda_i need strictly positive eigenvalues"
        )
    terms = b * b / lam
    partial_sums = np.cumsum(terms)
    if n_terms >= 2:
        monotone_growth = bool(np.all(np.diff(terms) >= -1e-12 * max(terms.max(), 1.0)))
    else:
        monotone_growth = True
    return partial_sums, monotone_growth


def write_spectrum_csv(dec: SpectralDecomposition, path):
    """CSV of retained eigenvalues, descending; index is the 1-based mode
    number.  Floats use shortest round-trip decimal form."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "lambda"])
        for i, lam in enumerate(dec.lambdas, start=1):
            w.writerow([i, repr(float(lam))])
