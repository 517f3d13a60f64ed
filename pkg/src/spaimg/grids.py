"""Uniform grids of interior unknowns on the unit square/cube."""

from dataclasses import dataclass

import numpy as np

__all__ = ["Grid"]


@dataclass
class Grid:
    """Interior values of a function on a uniform mesh of [0,1]^dim.

    The mesh has N cells per axis (mesh size h = 1/N); only the
    (N-1)^dim interior points are stored, in lexicographic (C) order.
    Boundary values are eliminated into right-hand sides, so a Grid
    never carries them.
    """

    N: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.N < 2:
            raise ValueError(f"need N >= 2, got N={self.N}")
        expected = (self.N - 1,) * self.values.ndim
        if self.values.shape != expected:
            raise ValueError(
                f"values shape {self.values.shape} does not match interior "
                f"of an N={self.N} mesh (expected {expected})"
            )

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @classmethod
    def zeros(cls, dim: int, N: int) -> "Grid":
        return cls(N, np.zeros((N - 1,) * dim))

    def copy(self) -> "Grid":
        return Grid(self.N, self.values.copy())

    def norm2(self) -> float:
        """Euclidean norm of the interior values."""
        return float(np.linalg.norm(self.values.ravel()))

    def interior_coordinates(self):
        """Tuple of dim arrays (meshgrid, ij indexing) of interior point coordinates."""
        x = np.arange(1, self.N) * self.h
        return np.meshgrid(*([x] * self.dim), indexing="ij")
