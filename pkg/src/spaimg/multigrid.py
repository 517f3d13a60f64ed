"""Geometric multigrid on uniform grids with stencil smoothers.

V- and W-cycles with damped preconditioned-Richardson smoothing
(u <- u + omega*M*(b - A*u)), full-weighting restriction, d-linear
prolongation, a re-discretized Laplacian on every level and a direct
dense solve on the coarsest mesh.
"""

import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .grids import Grid
from .stencils import NamedSmoother, Stencil, laplacian

__all__ = [
    "MgConfig",
    "SolveReport",
    "smooth",
    "restrict",
    "prolong",
    "cycle",
    "solve",
]


@dataclass
class MgConfig:
    """Multigrid cycle configuration.

    smoother is a NamedSmoother or a bare Stencil; omega defaults to the
    named smoother's analytic optimum and is mandatory for bare stencils.
    """

    smoother: object
    cycle: str = "W"
    nu1: int = 1
    nu2: int = 0
    omega: float | None = None
    coarsest_N: int = 4
    tol: float = 1e-10
    max_iters: int = 100
    rng_seed: int = 0

    def __post_init__(self):
        self.cycle = self.cycle.upper()
        if self.cycle not in ("V", "W"):
            raise ValueError(f"cycle must be 'V' or 'W', got {self.cycle!r}")
        if self.nu1 < 0 or self.nu2 < 0 or self.nu1 + self.nu2 < 1:
            raise ValueError("need nu1, nu2 >= 0 with nu1 + nu2 >= 1")
        if self.coarsest_N < 2:
            raise ValueError("coarsest_N must be at least 2")
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    def resolve_smoother(self) -> tuple:
        """(stencil, omega) actually used by the cycles."""
        if isinstance(self.smoother, NamedSmoother):
            omega = self.omega if self.omega is not None else self.smoother.omega_opt_analytic
            return self.smoother.stencil, float(omega)
        if isinstance(self.smoother, Stencil):
            if self.omega is None:
                raise ValueError("a custom stencil smoother needs an explicit omega")
            return self.smoother, float(self.omega)
        raise TypeError(f"smoother must be NamedSmoother or Stencil, got {type(self.smoother)}")


@dataclass
class SolveReport:
    """Iteration record of one multigrid solve."""

    iterations: int
    residual_norms: list
    rho_hat: float
    converged: bool
    wall_time: float
    error_inf: float | None = None

    def __post_init__(self):
        self.residual_norms = [float(r) for r in self.residual_norms]


def smooth(u: Grid, b: Grid, M: Stencil, omega: float, steps: int) -> Grid:
    """`steps` damped Richardson sweeps u <- u + omega*M*(b - A*u).

    The operator A is the Laplacian re-discretized at the grid's own
    mesh size; the update is simultaneous (Jacobi-style).
    """
    if u.N != b.N or u.dim != b.dim:
        raise ValueError("u and b must live on the same grid")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    A = laplacian(u.dim)
    v = u.copy()
    for _ in range(steps):
        r = Grid(b.N, b.values - A.apply(v).values)
        v.values += omega * M.apply(r).values
    return v


def _restrict_axis(a: np.ndarray, axis: int) -> np.ndarray:
    a = np.moveaxis(a, axis, 0)
    out = 0.25 * a[0:-2:2] + 0.5 * a[1:-1:2] + 0.25 * a[2::2]
    return np.moveaxis(out, 0, axis)


def restrict(fine: Grid) -> Grid:
    """Full-weighting restriction to the mesh with half the resolution."""
    if fine.N % 2:
        raise ValueError(f"cannot halve an odd mesh count N={fine.N}")
    if fine.N // 2 < 2:
        raise ValueError("coarse mesh would have no interior points")
    v = fine.values
    for axis in range(fine.dim):
        v = _restrict_axis(v, axis)
    return Grid(fine.N // 2, v)


def _prolong_axis(a: np.ndarray, axis: int) -> np.ndarray:
    a = np.moveaxis(a, axis, 0)
    m = a.shape[0]
    out = np.zeros((2 * m + 1,) + a.shape[1:])
    out[1::2] = a
    out[2:-2:2] = 0.5 * (a[:-1] + a[1:])
    out[0] = 0.5 * a[0]
    out[-1] = 0.5 * a[-1]
    return np.moveaxis(out, 0, axis)


def prolong(coarse: Grid, fine_N: int) -> Grid:
    """d-linear interpolation to the mesh with twice the resolution.

    Coincident points copy the coarse value, in-between points average
    their coarse neighbors, with zero coarse boundary values.
    """
    if fine_N != 2 * coarse.N:
        raise ValueError(f"fine_N must be 2*{coarse.N}, got {fine_N}")
    v = coarse.values
    for axis in range(coarse.dim):
        v = _prolong_axis(v, axis)
    return Grid(fine_N, v)


@lru_cache(maxsize=None)
def _coarsest_lu(dim: int, N: int):
    return lu_factor(laplacian(dim).to_matrix(N).toarray())


def _direct_solve(b: Grid) -> Grid:
    x = lu_solve(_coarsest_lu(b.dim, b.N), b.values.ravel())
    return Grid(b.N, x.reshape(b.values.shape))


def cycle(u: Grid, b: Grid, cfg: MgConfig) -> Grid:
    """One multigrid cycle for A*u = b at the grid's resolution.

    Recurses once (V) or twice (W) per level on the re-discretized
    coarse error equation; at cfg.coarsest_N the system is solved
    directly by dense LU.
    """
    if u.N != b.N or u.dim != b.dim:
        raise ValueError("u and b must live on the same grid")
    if u.N <= cfg.coarsest_N:
        return _direct_solve(b)

    M, omega = cfg.resolve_smoother()
    if M.dim != u.dim:
        raise ValueError(f"smoother dim {M.dim} != grid dim {u.dim}")
    A = laplacian(u.dim)
    gamma = 2 if cfg.cycle == "W" else 1

    v = smooth(u, b, M, omega, cfg.nu1)
    r = Grid(b.N, b.values - A.apply(v).values)
    rc = restrict(r)
    if rc.N <= cfg.coarsest_N:
        ec = _direct_solve(rc)
    else:
        ec = Grid.zeros(rc.dim, rc.N)
        for _ in range(gamma):
            ec = cycle(ec, rc, cfg)
    v = Grid(v.N, v.values + prolong(ec, v.N).values)
    return smooth(v, b, M, omega, cfg.nu2)


def solve(b: Grid, cfg: MgConfig) -> tuple:
    """Run multigrid cycles from a seeded random start until the relative
    residual drops below cfg.tol (or max_iters is hit).

    Returns (solution Grid, SolveReport); the report's rho_hat is
    (||r_K|| / ||r_0||)**(1/K) for the final iterate K.
    """
    levels = b.N // cfg.coarsest_N
    if levels * cfg.coarsest_N != b.N or levels & (levels - 1):
        raise ValueError(
            f"N={b.N} must equal coarsest_N={cfg.coarsest_N} times a power of 2")
    M, _ = cfg.resolve_smoother()
    if M.dim != b.dim:
        raise ValueError(f"smoother dim {M.dim} != problem dim {b.dim}")

    t0 = time.perf_counter()
    rng = np.random.default_rng(cfg.rng_seed)
    u = Grid(b.N, rng.uniform(0.0, 1.0, size=b.values.shape))
    A = laplacian(b.dim)
    norms = [float(np.linalg.norm(b.values - A.apply(u).values))]

    converged = False
    k = 0
    while k < cfg.max_iters:
        u = cycle(u, b, cfg)
        k += 1
        norms.append(float(np.linalg.norm(b.values - A.apply(u).values)))
        if norms[-1] <= cfg.tol * norms[0]:
            converged = True
            break

    rho_hat = (norms[-1] / norms[0]) ** (1.0 / k) if k else float("nan")
    report = SolveReport(
        iterations=k,
        residual_norms=norms,
        rho_hat=float(rho_hat),
        converged=converged,
        wall_time=time.perf_counter() - t0,
    )
    return u, report
