"""Reduced unit system, uniform spatial grids and the Gaussian Rabi profile.

Everything downstream works in reduced units hbar = m = d = 1: velocities in
v_d = hbar/(m d), times in tau = m d^2/hbar, energies in hbar^2/(m d^2),
lengths in d. The UnitSystem record documents the mapping; it carries no
conversion logic because all public I/O is already expressed in these units.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridError, NegativeVelocityError

#: Half-width of the default computational box, in units of d.  Exceeds the
#: effective potential width (|x| <= 1) so truncation error is negligible.
DEFAULT_BOX_HALF = 1.5

#: Default number of grid points.
DEFAULT_NPOINTS = 2001

#: Default Gaussian width of the Rabi profile, sqrt(2)/10 in units of d.
DEFAULT_WIDTH = np.sqrt(2.0) / 10.0


@dataclass(frozen=True)
class UnitSystem:
    """Reduced unit system with hbar = m = d = 1.

    d is the length unit, v_d = hbar/(m d) the velocity unit,
    tau = m d^2/hbar the time unit and V0 = hbar^2/(m d^3) the potential
    density unit.  V0 is retained for completeness but unused numerically.
    """

    hbar: float = 1.0
    m: float = 1.0
    d: float = 1.0

    @property
    def v_d(self) -> float:
        return self.hbar / (self.m * self.d)

    @property
    def tau(self) -> float:
        return self.m * self.d**2 / self.hbar

    @property
    def energy_unit(self) -> float:
        return self.hbar**2 / (self.m * self.d**2)

    @property
    def V0(self) -> float:
        return self.hbar**2 / (self.m * self.d**3)


@dataclass(frozen=True)
class Grid:
    """Uniform grid of n points on [x_min, x_max]."""

    x_min: float
    x_max: float
    n: int
    points: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.x_min >= self.x_max:
            raise GridError(
                f"invalid range: x_min={self.x_min} must be < x_max={self.x_max}"
            )
        if self.n < 3:
            raise GridError(f"too few points: n={self.n} < 3")
        if self.points is None:
            pts = np.linspace(self.x_min, self.x_max, self.n)
            object.__setattr__(self, "points", pts)

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    def index_of(self, x: float) -> int:
        """Nearest-grid-point index of coordinate x."""
        return int(round((x - self.x_min) / self.spacing))

    @property
    def symmetric(self) -> bool:
        """True if the grid is symmetric about x = 0."""
        return abs(self.x_min + self.x_max) < 1e-12 * (self.x_max - self.x_min)


def make_grid(x_min: float, x_max: float, n: int) -> Grid:
    """Uniform grid with first point x_min and last point x_max."""
    return Grid(x_min=x_min, x_max=x_max, n=int(n))


def default_grid(n: int = DEFAULT_NPOINTS) -> Grid:
    return make_grid(-DEFAULT_BOX_HALF, DEFAULT_BOX_HALF, n)


@dataclass(frozen=True)
class RabiProfile:
    """Two-Gaussian Rabi frequency Omega(x) = -i b g(x+x0) + c g(x-x0).

    g(x) = exp(-x^2/w^2).  b, c are real amplitudes in 1/tau, x0 the lobe
    offset and w the Gaussian width, both in d.  Values with |x| >= cutoff
    are truncated to exact zero; at the default cutoff 1.5 they are below
    double-precision noise anyway.
    """

    b: float
    c: float
    x0: float = 0.0
    w: float = DEFAULT_WIDTH
    cutoff: float = DEFAULT_BOX_HALF

    def __post_init__(self):
        if self.w <= 0:
            raise ValueError(f"Gaussian width must be positive, got w={self.w}")

    def __call__(self, x):
        return rabi_eval(self, x)


def rabi_eval(profile: RabiProfile, x):
    """Evaluate Omega(x); accepts scalars or arrays, returns complex."""
    x = np.asarray(x, dtype=float)
    g_plus = np.exp(-((x + profile.x0) ** 2) / profile.w**2)
    g_minus = np.exp(-((x - profile.x0) ** 2) / profile.w**2)
    omega = -1j * profile.b * g_plus + profile.c * g_minus
    if profile.cutoff is not None:
        omega = np.where(np.abs(x) >= profile.cutoff, 0.0 + 0.0j, omega)
    if omega.ndim == 0:
        return complex(omega)
    return omega


def velocity_to_energy(v: float) -> float:
    """E = v^2/2 in reduced units; for the ground channel k = v."""
    if v < 0:
        raise NegativeVelocityError(f"velocity must be >= 0, got {v}")
    return 0.5 * v * v
