"""Symmetric finite-difference stencils and their Fourier symbols.

A stencil is a finite map from integer offsets to coefficients together
with a mesh-size scaling exponent: the operator it represents acts as

    (S u)[i] = h**h_exponent * sum_o c_o * u[i + o].

The discrete Laplacian carries h_exponent = -2, the sparse-approximate-
inverse (SPAI) smoothers carry +2, grid-transfer operators 0.  All
stencils here are symmetric (c_o == c_{-o}), which makes their Fourier
symbols real:

    symbol(theta) = h**h_exponent * sum_o c_o * cos(o . theta).

Coefficients are stored as exact `fractions.Fraction` values wherever
the defining formulas are rational, and only converted to float when a
symbol or a grid application is evaluated.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .grids import Grid

__all__ = [
    "Stencil",
    "Frequency",
    "NamedSmoother",
    "StencilSymmetryError",
    "laplacian",
    "upsilon",
    "tee",
    "named",
    "NAMED_SMOOTHER_IDS",
]


class StencilSymmetryError(ValueError):
    """Raised when an operation requires a symmetric stencil and gets none."""


@dataclass(frozen=True)
class Frequency:
    """A Fourier frequency with components in [-pi/2, 3*pi/2).

    Under standard coarsening a frequency is low iff every component
    lies in [-pi/2, pi/2); otherwise it is high.
    """

    theta: tuple

    def __post_init__(self):
        for t in self.theta:
            if not (-np.pi / 2 <= t < 3 * np.pi / 2):
                raise ValueError(f"frequency component {t} outside [-pi/2, 3pi/2)")

    @property
    def dim(self) -> int:
        return len(self.theta)

    @property
    def is_low(self) -> bool:
        return all(-np.pi / 2 <= t < np.pi / 2 for t in self.theta)

    @property
    def is_high(self) -> bool:
        return not self.is_low


@dataclass
class Stencil:
    """Finite-difference stencil with mesh-size scaling.

    entries maps integer offset tuples (length dim) to coefficients;
    h_exponent is the power of h multiplying the whole stencil.
    """

    dim: int
    entries: dict
    h_exponent: int = 0

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if not self.entries:
            raise ValueError("stencil needs at least one entry")
        for off in self.entries:
            if len(off) != self.dim:
                raise ValueError(f"offset {off} does not have {self.dim} components")

    @property
    def is_symmetric(self) -> bool:
        for off, c in self.entries.items():
            neg = tuple(-o for o in off)
            c2 = self.entries.get(neg)
            if c2 is None or abs(float(c) - float(c2)) > 1e-14 * max(1.0, abs(float(c))):
                return False
        return True

    def _require_symmetric(self):
        if not self.is_symmetric:
            raise StencilSymmetryError(
                "stencil is not symmetric; its symbol would not be real"
            )

    def symbol(self, theta, h: float = 1.0):
        """Real Fourier symbol at frequency theta, evaluated at mesh size h.

        theta is a sequence of dim components; each component may be a
        scalar or an ndarray (all broadcast together), so whole frequency
        grids can be evaluated in one call.  Requires a symmetric stencil,
        for which sum_o c_o exp(i o.theta) collapses exactly to the real
        cosine sum returned here.
        """
        self._require_symmetric()
        if isinstance(theta, Frequency):
            theta = theta.theta
        if len(theta) != self.dim:
            raise ValueError(f"expected {self.dim} frequency components, got {len(theta)}")
        if h <= 0:
            raise ValueError("mesh size h must be positive")
        th = [np.asarray(t, dtype=float) for t in theta]
        acc = 0.0
        for off, c in self.entries.items():
            phase = 0.0
            for o, t in zip(off, th):
                if o:
                    phase = phase + o * t
            acc = acc + float(c) * np.cos(phase)
        out = (h ** self.h_exponent) * acc
        return float(out) if np.ndim(out) == 0 else out

    def apply(self, u: Grid) -> Grid:
        """Apply the stencil to a grid of interior unknowns.

        Values outside the interior index set are taken as zero (the
        truncated-matrix convention for homogeneous Dirichlet problems);
        the grid's own mesh size supplies the h**h_exponent scaling.
        """
        if self.dim != u.dim:
            raise ValueError(f"stencil dim {self.dim} != grid dim {u.dim}")
        w = max(max(abs(o) for o in off) for off in self.entries)
        padded = np.pad(u.values, w) if w else u.values
        out = np.zeros_like(u.values)
        shape = u.values.shape
        for off, c in self.entries.items():
            sl = tuple(slice(w + o, w + o + n) for o, n in zip(off, shape))
            out += float(c) * padded[sl]
        out *= u.h ** self.h_exponent
        return Grid(u.N, out)

    def to_matrix(self, N: int):
        """Assemble the stencil as a sparse CSR matrix on the N-mesh interior."""
        from scipy import sparse

        n = N - 1
        shape = (n,) * self.dim
        size = n ** self.dim
        idx = np.indices(shape).reshape(self.dim, -1)
        scale = (1.0 / N) ** self.h_exponent
        rows, cols, vals = [], [], []
        for off, c in self.entries.items():
            j = idx + np.asarray(off, dtype=int)[:, None]
            ok = np.all((j >= 0) & (j < n), axis=0)
            rows.append(np.ravel_multi_index(tuple(idx[:, ok]), shape))
            cols.append(np.ravel_multi_index(tuple(j[:, ok]), shape))
            vals.append(np.full(int(ok.sum()), float(c) * scale))
        return sparse.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(size, size),
        )

    def scaled(self, factor) -> "Stencil":
        """New stencil with every coefficient multiplied by factor."""
        return Stencil(self.dim, {o: c * factor for o, c in self.entries.items()},
                       self.h_exponent)

    def __mul__(self, factor):
        return self.scaled(factor)

    __rmul__ = __mul__

    def __add__(self, other: "Stencil") -> "Stencil":
        if self.dim != other.dim or self.h_exponent != other.h_exponent:
            raise ValueError("can only add stencils of equal dim and h_exponent")
        entries = dict(self.entries)
        for o, c in other.entries.items():
            entries[o] = entries.get(o, 0) + c
        return Stencil(self.dim, entries, self.h_exponent)


@dataclass
class NamedSmoother:
    """A published SPAI smoother stencil with its analytic optimum."""

    id: str
    stencil: Stencil
    omega_opt_analytic: float
    mu_opt_analytic: float

    @property
    def dim(self) -> int:
        return self.stencil.dim


def laplacian(dim: int) -> Stencil:
    """Second-order central-difference Laplacian: 5-point (2D) / 7-point (3D)."""
    if dim == 2:
        entries = {(0, 0): Fraction(4)}
        for off in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            entries[off] = Fraction(-1)
    elif dim == 3:
        entries = {(0, 0, 0): Fraction(6)}
        for axis in range(3):
            for s in (1, -1):
                off = tuple(s if a == axis else 0 for a in range(3))
                entries[off] = Fraction(-1)
    else:
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    return Stencil(dim, entries, h_exponent=-2)


def upsilon(alpha, beta, gamma) -> Stencil:
    """Parametric symmetric 9-point smoother stencil h^2 [g b g; b a b; g b g].

    Zero edge/corner coefficients are dropped, so gamma=0 yields the
    5-point form.
    """
    alpha, beta, gamma = Fraction(alpha), Fraction(beta), Fraction(gamma)
    entries = {(0, 0): alpha}
    for off in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        entries[off] = beta
    for off in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        entries[off] = gamma
    entries = {o: c for o, c in entries.items() if c != 0 or o == (0, 0)}
    return Stencil(2, entries, h_exponent=2)


def tee(alpha, beta) -> Stencil:
    """Parametric symmetric 7-point smoother stencil: center h^2*alpha/2, faces h^2*beta/4."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    entries = {(0, 0, 0): alpha / 2}
    for axis in range(3):
        for s in (1, -1):
            off = tuple(s if a == axis else 0 for a in range(3))
            entries[off] = beta / 4
    entries = {o: c for o, c in entries.items() if c != 0 or o == (0, 0, 0)}
    return Stencil(3, entries, h_exponent=2)


_SQRT10 = math.sqrt(10.0)

# omega_opt / mu_opt for the weighted 5-point smoother of Tang & Wan type are
# not rational in the source material; both follow from the product-symbol
# extremes 40/61 and 841/732 and are stored exactly here.
_M5TW_MU = 361.0 / 1321.0      # ~0.2733
_M5TW_OMEGA = 1464.0 / 1321.0  # ~1.1082


def _named_table():
    f = Fraction
    table = {
        "jacobi2d": (
            Stencil(2, {(0, 0): f(1, 4)}, 2), f(4, 5), f(3, 5)),
        "m5tw": (
            Stencil(2, {(0, 0): f(17, 61),
                        (1, 0): f(3, 61), (-1, 0): f(3, 61),
                        (0, 1): f(3, 61), (0, -1): f(3, 61)}, 2),
            _M5TW_OMEGA, _M5TW_MU),
        "m5": (
            upsilon(f(48, 41), f(8, 41), 0), f(1, 4), f(9, 41)),
        "vanka9": (
            upsilon(28, 4, 1).scaled(f(1, 96)), f(24, 25), f(7, 25)),
        "m9": (
            upsilon(44, 10, 3).scaled(f(1, 24)),
            (309.0 - 12.0 * _SQRT10) / 1720.0,
            (9.0 + 8.0 * _SQRT10) / 215.0),
        "jacobi3d": (
            Stencil(3, {(0, 0, 0): f(1, 6)}, 2), f(6, 7), f(5, 7)),
        "m7": (
            tee(f(8, 5), f(2, 5)), f(20, 73), f(25, 73)),
    }
    return table


NAMED_SMOOTHER_IDS = tuple(_named_table())


def named(id: str) -> NamedSmoother:
    """Look up a published smoother by id.

    Available: jacobi2d, m5tw, m5, vanka9, m9 (2D); jacobi3d, m7 (3D).
    """
    try:
        stencil, omega, mu = _named_table()[id]
    except KeyError:
        raise KeyError(
            f"unknown smoother {id!r}; expected one of {', '.join(NAMED_SMOOTHER_IDS)}"
        ) from None
    return NamedSmoother(id, stencil, float(omega), float(mu))
