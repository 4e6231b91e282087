"""Candidate velocity/pressure fields and parabolic-cylinder geometry.

Profiles are pure evaluators defined for t < 0.  Closed-form kinds
(power-law, constant, steady shear, self-similar) evaluate exactly;
sampled fields interpolate a cell-centered tensor grid.  Singular profiles
carry their radial/time exponents so the quadrature layer can integrate
them with exact power-law weights.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .errors import (
    NonFiniteSampleError,
    RadiusError,
    ResolutionError,
    SingularPointError,
)


@dataclass(frozen=True)
class CylinderSpec:
    """Geometry of Q^{lam,mu}(R) = {(y,t): |y| < lam*R, -mu*R^2 < t < 0}."""

    radius: float
    lam: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if self.radius <= 0 or self.lam <= 0 or self.mu <= 0:
            raise ValueError("cylinder radius and anisotropy factors must be positive")

    @property
    def space_radius(self) -> float:
        return self.lam * self.radius

    @property
    def time_depth(self) -> float:
        return self.mu * self.radius**2


def azimuthal_unit(x: np.ndarray) -> np.ndarray:
    """Unit field tangent to circles about the x3-axis; divergence-free."""
    sigma = np.sqrt(x[..., 0] ** 2 + x[..., 1] ** 2)
    if np.any(sigma == 0):
        raise SingularPointError("azimuthal direction undefined on the x3-axis")
    out = np.empty_like(x, dtype=float)
    out[..., 0] = -x[..., 1] / sigma
    out[..., 1] = x[..., 0] / sigma
    out[..., 2] = 0.0
    return out


class Profile:
    """Base class: a velocity/pressure evaluator on negative times."""

    #: magnitude behaves like |x|**radial_power near x = 0
    radial_power: float = 0.0
    #: magnitude behaves like (-t)**time_power near t = 0
    time_power: float = 0.0
    #: speed factorizes as coef * |x|**radial_power * (-t)**time_power
    separable: bool = False
    #: field does not depend on t
    steady: bool = False

    def velocity(self, x: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError

    def pressure(self, x: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError

    def speed(self, x: np.ndarray, t: float) -> np.ndarray:
        return np.linalg.norm(self.velocity(x, t), axis=-1)

    def grad_norm_sq(self, x: np.ndarray, t: float) -> Optional[np.ndarray]:
        """|grad v|^2 where a closed form exists, else None."""
        return None

    @property
    def singular_at_origin(self) -> bool:
        return self.radial_power < 0

    @property
    def singular_at_time_zero(self) -> bool:
        return self.time_power < 0


@dataclass(frozen=True)
class PowerLawProfile(Profile):
    """Speed c * (|x|**(-alpha_p) * (-t)**(-(1-alpha_p)/2))**gamma_p.

    The magnitude law is realized by attaching the azimuthal unit direction
    field, which is solenoidal and keeps every quantity computable.  Pressure
    defaults to pressure_coeff * speed**2.
    """

    c: float = 1.0
    alpha_p: float = 0.5
    gamma_p: float = 1.1
    pressure_coeff: float = 1.0

    def __post_init__(self):
        if not 0 <= self.alpha_p <= 1:
            raise ValueError(f"alpha_p must lie in [0, 1], got {self.alpha_p}")
        if self.gamma_p <= 1:
            raise ValueError(f"gamma_p must exceed 1, got {self.gamma_p}")

    @property
    def radial_power(self) -> float:
        return -self.alpha_p * self.gamma_p

    @property
    def time_power(self) -> float:
        return -(1 - self.alpha_p) * self.gamma_p / 2

    @property
    def separable(self) -> bool:
        return True

    @property
    def coef(self) -> float:
        return self.c

    def speed(self, x, t):
        _check_time(t)
        rho = np.linalg.norm(np.asarray(x, dtype=float), axis=-1)
        if self.radial_power < 0 and np.any(rho == 0):
            raise SingularPointError("power-law profile singular at x = 0")
        return self.c * rho**self.radial_power * (-t) ** self.time_power

    def speed_radial(self, rho: np.ndarray, t: float) -> np.ndarray:
        _check_time(t)
        return self.c * rho**self.radial_power * (-t) ** self.time_power

    def velocity(self, x, t):
        x = np.asarray(x, dtype=float)
        return self.speed(x, t)[..., None] * azimuthal_unit(x)

    def pressure(self, x, t):
        return self.pressure_coeff * self.speed(x, t) ** 2

    def grad_norm_sq(self, x, t):
        x = np.asarray(x, dtype=float)
        g = self.speed(x, t)
        rho_sq = np.einsum("...i,...i->...", x, x)
        sigma_sq = x[..., 0] ** 2 + x[..., 1] ** 2
        if np.any(sigma_sq == 0):
            raise SingularPointError("gradient undefined on the x3-axis")
        return g**2 * (self.radial_power**2 / rho_sq + 1.0 / sigma_sq)


@dataclass(frozen=True)
class ConstantProfile(Profile):
    """A constant velocity vector with zero pressure."""

    c3: tuple = (1.0, 0.0, 0.0)

    @property
    def separable(self) -> bool:
        return True

    @property
    def steady(self) -> bool:
        return True

    @property
    def coef(self) -> float:
        return float(np.linalg.norm(self.c3))

    def velocity(self, x, t):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.c3, dtype=float), x.shape).copy()

    def pressure(self, x, t):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape[:-1])

    def speed(self, x, t):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], self.coef)

    def grad_norm_sq(self, x, t):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape[:-1])


@dataclass(frozen=True)
class SteadyShearProfile(Profile):
    """u = (A sin(k x2), 0, 0), p = 0: a steady solution of the ideal flow
    equations that is exactly solenoidal."""

    amplitude: float = 1.0
    wavenumber: float = 1.0

    @property
    def steady(self) -> bool:
        return True

    def velocity(self, x, t):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        out[..., 0] = self.amplitude * np.sin(self.wavenumber * x[..., 1])
        return out

    def pressure(self, x, t):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape[:-1])

    def speed(self, x, t):
        x = np.asarray(x, dtype=float)
        return np.abs(self.amplitude * np.sin(self.wavenumber * x[..., 1]))

    def grad_norm_sq(self, x, t):
        x = np.asarray(x, dtype=float)
        return (self.amplitude * self.wavenumber) ** 2 * np.cos(
            self.wavenumber * x[..., 1]
        ) ** 2


@dataclass(frozen=True)
class SelfSimilarProfile(Profile):
    """u(x,t) = (-t)**(-alpha/(alpha+1)) * U(x * (-t)**(-1/(alpha+1))).

    Satisfies u(x,t) = lam**alpha * u(lam x, lam**(alpha+1) t) for every
    lam > 0 by construction.  ``U`` maps (..., 3) points to (..., 3)
    vectors; ``P`` is the matching pressure profile (default zero).
    """

    alpha: float = 1.5
    U: Callable = None
    P: Optional[Callable] = None
    #: optional radial magnitude |U|(rho) for radial-quadrature routes
    U_radial: Optional[Callable] = None

    @property
    def time_power(self) -> float:
        return -self.alpha / (self.alpha + 1)

    def _similarity_point(self, x, t):
        _check_time(t)
        x = np.asarray(x, dtype=float)
        return x * (-t) ** (-1.0 / (self.alpha + 1))

    def velocity(self, x, t):
        y = self._similarity_point(x, t)
        return (-t) ** self.time_power * np.asarray(self.U(y), dtype=float)

    def pressure(self, x, t):
        y = self._similarity_point(x, t)
        scale = (-t) ** (-2 * self.alpha / (self.alpha + 1))
        if self.P is None:
            return np.zeros(y.shape[:-1])
        return scale * np.asarray(self.P(y), dtype=float)


@dataclass(frozen=True)
class DiscreteSelfSimilarProfile(Profile):
    """Self-similar form with a profile periodic in the log-time variable.

    ``U(y, tau)`` has period ``S0`` in tau = -ln(-t); the physical field
    satisfies the scaling identity only for lam = exp(S0/(alpha+1)).
    """

    alpha: float = 1.5
    S0: float = 1.0
    U: Callable = None
    P: Optional[Callable] = None
    U_radial: Optional[Callable] = None
    grad_radial: Optional[Callable] = None
    P_radial: Optional[Callable] = None

    @property
    def time_power(self) -> float:
        return -self.alpha / (self.alpha + 1)

    @property
    def scaling_lambda(self) -> float:
        return float(np.exp(self.S0 / (self.alpha + 1)))

    def velocity(self, x, t):
        _check_time(t)
        x = np.asarray(x, dtype=float)
        y = x * (-t) ** (-1.0 / (self.alpha + 1))
        tau = -np.log(-t)
        return (-t) ** self.time_power * np.asarray(self.U(y, tau), dtype=float)

    def pressure(self, x, t):
        _check_time(t)
        x = np.asarray(x, dtype=float)
        y = x * (-t) ** (-1.0 / (self.alpha + 1))
        tau = -np.log(-t)
        if self.P is None:
            return np.zeros(y.shape[:-1])
        return (-t) ** (-2 * self.alpha / (self.alpha + 1)) * np.asarray(
            self.P(y, tau), dtype=float
        )


def steady_to_discrete(profile: SelfSimilarProfile, S0: float) -> DiscreteSelfSimilarProfile:
    """View a steady similarity profile as a (trivially) periodic one."""
    return DiscreteSelfSimilarProfile(
        alpha=profile.alpha,
        S0=S0,
        U=lambda y, tau: profile.U(y),
        P=None if profile.P is None else (lambda y, tau: profile.P(y)),
        U_radial=None
        if profile.U_radial is None
        else (lambda rho, tau: profile.U_radial(rho)),
    )


def _check_time(t):
    if not np.all(np.asarray(t) < 0):
        raise SingularPointError(f"profiles are defined for t < 0, got t={t}")


# ---------------------------------------------------------------------------
# sampled fields


@dataclass
class GridField:
    """Cell-centered samples of a velocity/pressure pair on a cylinder.

    ``velocity`` has shape (Nt, N, N, N, 3) and ``pressure`` (Nt, N, N, N);
    axis order is (t, x1, x2, x3).  Immutable by convention after
    construction; the discrete divergence residual is recorded up front.
    """

    cylinder: CylinderSpec
    n_space: int
    n_time: int
    velocity: np.ndarray
    pressure: np.ndarray
    radial_power: float = 0.0
    time_power: float = 0.0
    div_residual: float = dc_field(default=0.0)

    def __post_init__(self):
        if self.n_space < 2 or self.n_time < 2:
            raise ResolutionError("grid needs at least 2 cells per axis")
        expected = (self.n_time, self.n_space, self.n_space, self.n_space)
        if self.velocity.shape != expected + (3,) or self.pressure.shape != expected:
            raise ValueError("sample arrays do not match the declared resolutions")
        if not (np.all(np.isfinite(self.velocity)) and np.all(np.isfinite(self.pressure))):
            raise NonFiniteSampleError("non-finite samples in grid field")
        self.div_residual = divergence_residual(self)

    @property
    def space_axis(self) -> np.ndarray:
        a = self.cylinder.space_radius
        h = 2.0 * a / self.n_space
        return -a + h * (np.arange(self.n_space) + 0.5)

    @property
    def times(self) -> np.ndarray:
        T = self.cylinder.time_depth
        h = T / self.n_time
        return -T + h * (np.arange(self.n_time) + 0.5)

    @property
    def cell_size(self) -> float:
        return 2.0 * self.cylinder.space_radius / self.n_space


def sample(profile: Profile, cyl: CylinderSpec, n_space: int, n_time: int) -> GridField:
    """Cell-centered samples of a profile over the cylinder.

    The half-cell offset keeps every node off the singular locus (x = 0,
    t = 0 and the x3-axis) deterministically.
    """
    if n_space < 2 or n_time < 2:
        raise ResolutionError(f"need n_space, n_time >= 2, got {n_space}, {n_time}")
    a = cyl.space_radius
    h = 2.0 * a / n_space
    axis = -a + h * (np.arange(n_space) + 0.5)
    xx, yy, zz = np.meshgrid(axis, axis, axis, indexing="ij")
    pts = np.stack([xx, yy, zz], axis=-1)
    T = cyl.time_depth
    times = -T + (T / n_time) * (np.arange(n_time) + 0.5)
    vel = np.empty((n_time,) + pts.shape)
    prs = np.empty((n_time,) + pts.shape[:-1])
    for j, t in enumerate(times):
        vel[j] = profile.velocity(pts, t)
        prs[j] = profile.pressure(pts, t)
    if not (np.all(np.isfinite(vel)) and np.all(np.isfinite(prs))):
        raise NonFiniteSampleError("profile evaluated non-finite inside the cylinder")
    return GridField(
        cylinder=cyl,
        n_space=n_space,
        n_time=n_time,
        velocity=vel,
        pressure=prs,
        radial_power=profile.radial_power,
        time_power=profile.time_power,
    )


def divergence_residual(obj) -> float:
    """Max-norm centered-difference divergence over interior nodes."""
    if isinstance(obj, GridField):
        field = obj
    else:
        raise TypeError("divergence_residual expects a GridField")
    h = field.cell_size
    u = field.velocity
    div = (
        (u[:, 2:, 1:-1, 1:-1, 0] - u[:, :-2, 1:-1, 1:-1, 0])
        + (u[:, 1:-1, 2:, 1:-1, 1] - u[:, 1:-1, :-2, 1:-1, 1])
        + (u[:, 1:-1, 1:-1, 2:, 2] - u[:, 1:-1, 1:-1, :-2, 2])
    ) / (2.0 * h)
    return float(np.max(np.abs(div))) if div.size else 0.0


class SampledProfile(Profile):
    """Multilinear interpolation view of a GridField."""

    def __init__(self, field: GridField):
        from scipy.interpolate import RegularGridInterpolator

        self.field = field
        axes = (field.times,) + (field.space_axis,) * 3
        self._vel = RegularGridInterpolator(
            axes, field.velocity, bounds_error=False, fill_value=None
        )
        self._prs = RegularGridInterpolator(
            axes, field.pressure, bounds_error=False, fill_value=None
        )
        self.radial_power = field.radial_power
        self.time_power = field.time_power

    def _pack(self, x, t):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, 3)
        tcol = np.full((flat.shape[0], 1), float(t))
        return np.hstack([tcol, flat]), x.shape

    def velocity(self, x, t):
        pts, shape = self._pack(x, t)
        return self._vel(pts).reshape(shape[:-1] + (3,))

    def pressure(self, x, t):
        pts, shape = self._pack(x, t)
        return self._prs(pts).reshape(shape[:-1])


# ---------------------------------------------------------------------------
# evaluation and I/O


def evaluate(profile: Profile, x, t):
    """Velocity vector and pressure at one space-time point.

    Raises SingularPointError on the singular locus.
    """
    x = np.asarray(x, dtype=float)
    if profile.singular_at_origin and np.linalg.norm(x) == 0:
        raise SingularPointError("evaluation at the spatial singular point x = 0")
    if profile.singular_at_time_zero and t == 0:
        raise SingularPointError("evaluation at the temporal singular point t = 0")
    return profile.velocity(x, t), profile.pressure(x, t)


def write_grid_csv(field: GridField, csv_path, sidecar_path=None) -> None:
    """Flat CSV (x1,x2,x3,t,u1,u2,u3,p per node) plus a JSON sidecar."""
    axis = field.space_axis
    times = field.times
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "x2", "x3", "t", "u1", "u2", "u3", "p"])
        for j, t in enumerate(times):
            for i1, x1 in enumerate(axis):
                for i2, x2 in enumerate(axis):
                    for i3, x3 in enumerate(axis):
                        u = field.velocity[j, i1, i2, i3]
                        w.writerow(
                            [repr(float(v)) for v in (x1, x2, x3, t)]
                            + [repr(float(v)) for v in u]
                            + [repr(float(field.pressure[j, i1, i2, i3]))]
                        )
    if sidecar_path is not None:
        sidecar = {
            "cylinder": {
                "radius": field.cylinder.radius,
                "lam": field.cylinder.lam,
                "mu": field.cylinder.mu,
            },
            "n_space": field.n_space,
            "n_time": field.n_time,
            "radial_power": field.radial_power,
            "time_power": field.time_power,
            "div_residual": field.div_residual,
        }
        with open(sidecar_path, "w") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_grid_csv(csv_path, sidecar_path) -> GridField:
    """Inverse of write_grid_csv."""
    with open(sidecar_path) as fh:
        meta = json.load(fh)
    n, nt = meta["n_space"], meta["n_time"]
    vel = np.empty((nt, n, n, n, 3))
    prs = np.empty((nt, n, n, n))
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = list(reader)
    if len(rows) != nt * n**3:
        raise ValueError("row count does not match the sidecar resolutions")
    idx = 0
    for j in range(nt):
        for i1 in range(n):
            for i2 in range(n):
                for i3 in range(n):
                    row = rows[idx]
                    vel[j, i1, i2, i3] = [float(v) for v in row[4:7]]
                    prs[j, i1, i2, i3] = float(row[7])
                    idx += 1
    cyl = CylinderSpec(**meta["cylinder"])
    return GridField(
        cylinder=cyl,
        n_space=n,
        n_time=nt,
        velocity=vel,
        pressure=prs,
        radial_power=meta.get("radial_power", 0.0),
        time_power=meta.get("time_power", 0.0),
    )
