"""Manufactured Poisson problems and right-hand-side assembly.

The model problem is -Laplace(u) = f on (0,1)^d with Dirichlet data g.
Interior unknowns only; boundary values are lifted into the right-hand
side as g/h^2 contributions along stencil arms that leave the domain.
"""

from dataclasses import dataclass

import numpy as np

from .grids import Grid

__all__ = ["Problem", "example", "assemble_rhs", "error_inf"]


@dataclass
class Problem:
    """Poisson data: source f, boundary g, optional exact solution."""

    dim: int
    f: callable
    g: callable = None
    u_exact: callable = None
    name: str = ""


def example(k: int) -> Problem:
    """The three benchmark problems (k = 1, 2, 3).

    1: 2D polynomial  u = (x^2-x^4)(y^4-y^2)
    2: 2D             u = x ln(x) y ln(y)   (f blows up near x=0 / y=0)
    3: 3D             u = sin(pi x) sin(pi y) sin(pi z)
    """
    if k == 1:
        return Problem(
            dim=2,
            u_exact=lambda x, y: (x**2 - x**4) * (y**4 - y**2),
            f=lambda x, y: (2 * (1 - 6 * x**2) * (y**2 - y**4)
                            + 2 * (1 - 6 * y**2) * (x**2 - x**4)),
            g=None,
            name="poly2d",
        )
    if k == 2:
        return Problem(
            dim=2,
            u_exact=lambda x, y: x * np.log(x) * y * np.log(y),
            f=lambda x, y: -x * np.log(x) / y - y * np.log(y) / x,
            g=None,
            name="xlogx2d",
        )
    if k == 3:
        pi = np.pi
        return Problem(
            dim=3,
            u_exact=lambda x, y, z: np.sin(pi * x) * np.sin(pi * y) * np.sin(pi * z),
            f=lambda x, y, z: 3 * pi**2 * np.sin(pi * x) * np.sin(pi * y) * np.sin(pi * z),
            g=None,
            name="sine3d",
        )
    raise ValueError(f"unknown example {k}; expected 1, 2 or 3")


def assemble_rhs(p: Problem, N: int) -> Grid:
    """Right-hand side on the N-mesh: f at interior points plus Dirichlet lifting.

    Each interior point next to the boundary receives g(neighbor)/h^2
    for every stencil arm that exits the domain; p.g = None means
    homogeneous data and skips the lifting entirely.
    """
    if N < 2:
        raise ValueError("need N >= 2")
    h = 1.0 / N
    shape = (N - 1,) * p.dim
    x = np.arange(1, N) * h
    mesh = np.meshgrid(*([x] * p.dim), indexing="ij")
    b = np.broadcast_to(np.asarray(p.f(*mesh), dtype=float), shape).copy()
    if not np.all(np.isfinite(b)):
        raise ValueError("source term is not finite at an interior point")

    if p.g is not None:
        for axis in range(p.dim):
            for layer, coord in ((0, 0.0), (-1, 1.0)):
                idx = [slice(None)] * p.dim
                idx[axis] = layer
                idx = tuple(idx)
                face = [np.full(mesh[a][idx].shape, coord) if a == axis
                        else mesh[a][idx] for a in range(p.dim)]
                b[idx] += np.asarray(p.g(*face), dtype=float) / h**2
    return Grid(N, b)


def error_inf(u_h: Grid, p: Problem) -> float:
    """Max-norm error of the discrete solution against the exact one."""
    if p.u_exact is None:
        raise ValueError(f"problem {p.name or '?'} has no exact solution")
    exact = p.u_exact(*u_h.interior_coordinates())
    return float(np.max(np.abs(u_h.values - exact)))
