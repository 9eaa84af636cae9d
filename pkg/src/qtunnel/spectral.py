"""Finite-difference eigenproblem for the time-independent pricing equation.

    -h^2 psi'' + V(S) psi = lambda psi,   psi(a) = psi(b) = 0

on the support/resistance box [a, b], discretized with the three-point
central stencil on N interior points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .core_model import MarketParams, lambda_constant, planck_coefficient
from .errors import DomainError, EigenSolverError

DEFAULT_POINTS = 2001


@dataclass(frozen=True)
class Box:
    lower: float
    upper: float
    points: int = DEFAULT_POINTS

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise DomainError("box walls must be finite")
        if not self.lower < self.upper:
            raise DomainError(f"box needs lower < upper, got [{self.lower}, {self.upper}]")
        if int(self.points) != self.points or self.points < 3:
            raise DomainError(f"box needs at least 3 interior points, got {self.points!r}")

    @property
    def spacing(self) -> float:
        return (self.upper - self.lower) / (self.points + 1)

    def grid(self) -> np.ndarray:
        i = np.arange(1, self.points + 1)
        return self.lower + i * self.spacing


@dataclass(frozen=True)
class TridiagonalOperator:
    grid: np.ndarray
    diagonal: np.ndarray
    offdiagonal: np.ndarray

    def dense(self) -> np.ndarray:
        return (np.diag(self.diagonal) + np.diag(self.offdiagonal, 1)
                + np.diag(self.offdiagonal, -1))


@dataclass(frozen=True)
class EigenSolution:
    grid: np.ndarray
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray  # shape (count, points)
    flat_potential: bool

    @property
    def spacing(self) -> float:
        return float(self.grid[1] - self.grid[0])


def discretize(params: MarketParams, box: Box, flat_potential: bool = False) -> TridiagonalOperator:
    """Assemble the symmetric tridiagonal matrix of the pricing operator."""
    if not flat_potential and not box.lower > 0:
        raise DomainError(
            f"support must be > 0 when the 1/S^2 potential is enabled, got {box.lower!r}")
    h2 = planck_coefficient(params)
    ds = box.spacing
    grid = box.grid()
    kinetic = h2 / (ds * ds)
    diag = np.full(box.points, 2.0 * kinetic)
    if not flat_potential:
        diag = diag + 1.0 / (grid * grid)
    off = np.full(box.points - 1, -kinetic)
    return TridiagonalOperator(grid=grid, diagonal=diag, offdiagonal=off)


def eigen_spectrum(params: MarketParams, box: Box, count: int,
                   flat_potential: bool = False) -> EigenSolution:
    """Lowest ``count`` eigenpairs, L2-normalized on the grid.

    Uses LAPACK bisection (stebz) with inverse iteration (stein). Each
    eigenvector is scaled so that sum(psi^2) * ds = 1 and its first nonzero
    component is positive.
    """
    if int(count) != count or not 1 <= count <= box.points:
        raise DomainError(f"count must lie in [1, {box.points}], got {count!r}")
    op = discretize(params, box, flat_potential)
    try:
        values, vectors = eigh_tridiagonal(
            op.diagonal, op.offdiagonal, select="i", select_range=(0, int(count) - 1),
            lapack_driver="stebz")
    except LinAlgError as exc:
        raise EigenSolverError(f"tridiagonal eigensolver failed: {exc}", info=str(exc)) from exc
    ds = box.spacing
    funcs = vectors.T / math.sqrt(ds)
    funcs = funcs / np.sqrt(np.sum(funcs * funcs, axis=1, keepdims=True) * ds)
    for row in funcs:
        nz = np.flatnonzero(row)
        if nz.size and row[nz[0]] < 0:
            row *= -1.0
    if np.any(np.diff(values) <= 0):
        raise EigenSolverError("eigenvalues not strictly ascending; spectrum not resolved",
                               info=values.tolist())
    return EigenSolution(grid=op.grid, eigenvalues=values, eigenfunctions=funcs,
                         flat_potential=bool(flat_potential))


def resonance_gap(params: MarketParams, solution: EigenSolution) -> float:
    """Distance from r/sigma to the nearest computed eigenvalue."""
    values = np.asarray(solution.eigenvalues, dtype=float)
    if values.size == 0:
        raise DomainError("resonance_gap needs at least one eigenvalue")
    return float(np.min(np.abs(values - lambda_constant(params))))


def sign_changes(vector: np.ndarray) -> int:
    """Number of sign changes, skipping exact zeros."""
    signs = np.sign(vector)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def box_eigenvalue(params: MarketParams, box: Box, n: int) -> float:
    """Continuum flat-box eigenvalue h^2 (n pi / (b - a))^2."""
    return planck_coefficient(params) * (n * math.pi / (box.upper - box.lower)) ** 2
