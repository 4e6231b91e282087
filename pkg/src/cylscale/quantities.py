"""Scaled energy quantities over parabolic cylinders.

All quantities are evaluated either from closed forms (separable power-law
profiles with exact radial/time weights), from Cartesian cell sums for
analytic profiles without radial symmetry, or from a GridField's own cells.
Cell grids at different radii correspond exactly under spatial scaling, so
scaling identities survive discretization to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    InequalityStructureError,
    RadiusError,
    ResolutionError,
    SupportError,
)
from .exponents import ExponentParams
from .fields import GridField, Profile, SelfSimilarProfile
from .quadrature import (
    DEFAULT_CONFIG,
    FOUR_PI,
    QuadratureConfig,
    ball_grid,
    centered_times,
    gauss_legendre,
    graded_nodes,
    graded_time_quadrature,
    power_radial_integral,
    power_time_integral,
)

_TINY = 1e-300


# ---------------------------------------------------------------------------
# spatial integrals at fixed time


def _separable_powers(profile: Profile, kind: str):
    """(coef, radial_power, time_power) of |v| or |q|, or None."""
    if not getattr(profile, "separable", False):
        return None
    if kind == "speed":
        return profile.coef, profile.radial_power, profile.time_power
    if kind == "pressure":
        pc = getattr(profile, "pressure_coeff", None)
        if pc is not None:
            return pc * profile.coef**2, 2 * profile.radial_power, 2 * profile.time_power
        return 0.0, 0.0, 0.0  # constant-kind profiles carry zero pressure
    return None


def _ball_power_integral(profile: Profile, kind: str, p: float, r: float,
                         t: float, cfg: QuadratureConfig) -> float:
    """int_{B(r)} |field|^p dx at fixed t for field in {speed, pressure}."""
    sep = _separable_powers(profile, kind)
    if sep is not None:
        coef, a, b = sep
        if coef == 0.0:
            return 0.0
        if cfg.radial_rule == "exact":
            return (
                FOUR_PI
                * coef**p
                * power_radial_integral(a * p, r)
                * (-t) ** (b * p)
            )
        nodes, weights = graded_nodes(r, cfg.n_radial, cfg.graded_levels)
        radial = float(np.sum(weights * nodes ** (2 + a * p)))
        return FOUR_PI * coef**p * radial * (-t) ** (b * p)
    pts, w = ball_grid(r, cfg.n_space)
    if kind == "speed":
        vals = profile.speed(pts, t)
    else:
        vals = np.abs(profile.pressure(pts, t))
    return float(np.sum(vals**p)) * w


def _ball_gradsq_integral(profile: Profile, r: float, t: float,
                          cfg: QuadratureConfig) -> float:
    """int_{B(r)} |grad v|^2 dx at fixed t (Cartesian cells)."""
    pts, w = ball_grid(r, cfg.n_space)
    g = profile.grad_norm_sq(pts, t)
    if g is None:
        h = 0.25 * 2.0 * r / cfg.n_space
        g = _gradsq_fd(profile, pts, t, h)
    return float(np.sum(g)) * w


def _gradsq_fd(profile: Profile, pts: np.ndarray, t: float, h: float) -> np.ndarray:
    g = np.zeros(pts.shape[:-1])
    for j in range(3):
        step = np.zeros(3)
        step[j] = h
        dv = (profile.velocity(pts + step, t) - profile.velocity(pts - step, t)) / (2 * h)
        g += np.einsum("...i,...i->...", dv, dv)
    return g


def _time_integrate(Gfun, time_exponent: Optional[float], T: float,
                    cfg: QuadratureConfig, steady: bool) -> float:
    """int_{-T}^0 G(t) dt given what is known about G's time dependence."""
    if steady:
        return Gfun(-T / 2) * T
    if time_exponent is not None and cfg.time_rule == "exact":
        tref = -T / 2
        K = Gfun(tref) / (-tref) ** time_exponent
        return K * power_time_integral(time_exponent, T)
    return graded_time_quadrature(lambda u: _vec(Gfun)(-u), T, cfg)


def _vec(f):
    def g(t):
        t = np.asarray(t)
        if t.ndim == 0:
            return f(float(t))
        return np.array([f(float(v)) for v in t])

    return g


# ---------------------------------------------------------------------------
# GridField reductions


def _grid_mask(field: GridField, r: float):
    axis = field.space_axis
    xx, yy, zz = np.meshgrid(axis, axis, axis, indexing="ij")
    return xx**2 + yy**2 + zz**2 < r**2


def _grid_times_in(field: GridField, T: float):
    times = field.times
    sel = times > -T
    if not np.any(sel):
        raise ResolutionError(
            f"no grid time samples inside (-{T}, 0); refine n_time or enlarge r"
        )
    return np.nonzero(sel)[0], field.cylinder.time_depth / field.n_time


def _grid_ball_power(field: GridField, kind: str, p: float, r: float):
    """Per-time-sample int_{B(r)} |field|^p dx from the grid's own cells."""
    mask = _grid_mask(field, r)
    w = field.cell_size**3
    if kind == "speed":
        vals = np.linalg.norm(field.velocity, axis=-1)
    elif kind == "pressure":
        vals = np.abs(field.pressure)
    else:
        vals = field.pressure  # unused
    return np.array([float(np.sum(vals[j][mask] ** p)) * w for j in range(field.n_time)])


def _grid_ball_gradsq(field: GridField, r: float):
    mask = _grid_mask(field, r)
    h = field.cell_size
    w = h**3
    out = np.empty(field.n_time)
    for j in range(field.n_time):
        u = field.velocity[j]
        g = np.zeros(u.shape[:-1])
        for comp in range(3):
            for ax in range(3):
                d = np.gradient(u[..., comp], h, axis=ax)
                g += d * d
        out[j] = float(np.sum(g[mask])) * w
    return out


def max_radius(field) -> float:
    if isinstance(field, GridField):
        return field.cylinder.space_radius
    return math.inf


def _check_radius(field, r: float):
    if r <= 0:
        raise RadiusError(f"radius must be positive, got {r}")
    if r > max_radius(field) * (1 + 1e-12):
        raise RadiusError(f"radius {r} exceeds the field cylinder {max_radius(field)}")


# ---------------------------------------------------------------------------
# the primitive quantities


def sup_weighted_mass(field, r: float, weight: float,
                      cfg: QuadratureConfig = DEFAULT_CONFIG, mu: float = 1.0,
                      times: Optional[Sequence[float]] = None) -> float:
    """r**(-weight) * max over time samples of int_{B(r)} |v|^2 dx.

    The sup over t is taken over the supplied (or cell-centered) samples,
    never interpolated.
    """
    _check_radius(field, r)
    T = mu * r**2
    if isinstance(field, GridField):
        idx, _ = _grid_times_in(field, T)
        per_time = _grid_ball_power(field, "speed", 2.0, r)
        vals = per_time[idx]
    else:
        if times is None:
            times = centered_times(T, cfg.n_time)
        vals = [_ball_power_integral(field, "speed", 2.0, r, t, cfg) for t in times]
    return r ** (-weight) * float(np.max(vals))


def cylinder_power_integral(field, kind: str, p: float, r: float, weight: float,
                            cfg: QuadratureConfig = DEFAULT_CONFIG,
                            mu: float = 1.0) -> float:
    """r**(-weight) * int over Q^{1,mu}(r) of |field|^p."""
    _check_radius(field, r)
    T = mu * r**2
    if isinstance(field, GridField):
        idx, dt = _grid_times_in(field, T)
        per_time = _grid_ball_power(field, kind, p, r)
        return r ** (-weight) * float(np.sum(per_time[idx])) * dt
    sep = _separable_powers(field, kind)
    e = sep[2] * p if sep is not None else None
    steady = getattr(field, "steady", False)
    G = lambda t: _ball_power_integral(field, kind, p, r, t, cfg)
    return r ** (-weight) * _time_integrate(G, e, T, cfg, steady)


def cylinder_gradsq_integral(field, r: float, weight: float,
                             cfg: QuadratureConfig = DEFAULT_CONFIG,
                             mu: float = 1.0) -> float:
    """r**(-weight) * int over Q^{1,mu}(r) of |grad v|^2."""
    _check_radius(field, r)
    T = mu * r**2
    if isinstance(field, GridField):
        idx, dt = _grid_times_in(field, T)
        per_time = _grid_ball_gradsq(field, r)
        return r ** (-weight) * float(np.sum(per_time[idx])) * dt
    sep = _separable_powers(field, "speed")
    e = 2 * sep[2] if sep is not None else None
    steady = getattr(field, "steady", False)
    G = lambda t: _ball_gradsq_integral(field, r, t, cfg)
    return r ** (-weight) * _time_integrate(G, e, T, cfg, steady)


def m_quantity(field, R: float, s: float, l: float, m0: float,
               cfg: QuadratureConfig = DEFAULT_CONFIG, mu: float = 1.0):
    """The kappa-weighted mixed norm and its attenuated variant.

    M = R**(-kappa) * int_{-mu R^2}^0 (int_{B(R)} |v|^s dx)**(l/s) dt and
    M_att = R**((1-m0) kappa) * M.
    """
    _check_radius(field, R)
    kappa = l * (3.0 / s + 2.0 / l - 1.0)
    T = mu * R**2
    if isinstance(field, GridField):
        idx, dt = _grid_times_in(field, T)
        S = _grid_ball_power(field, "speed", s, R)
        M = R ** (-kappa) * float(np.sum(S[idx] ** (l / s))) * dt
    else:
        sep = _separable_powers(field, "speed")
        e = sep[2] * l if sep is not None else None  # (b*s)*(l/s)
        steady = getattr(field, "steady", False)
        G = lambda t: _ball_power_integral(field, "speed", s, R, t, cfg) ** (l / s)
        M = R ** (-kappa) * _time_integrate(G, e, T, cfg, steady)
    return M, R ** ((1.0 - m0) * kappa) * M


def closed_form_m_power_law(c: float, alpha_p: float, gamma_p: float,
                            s: float, l: float, m0: float, R: float):
    """Attenuated mixed norm of the power-law profile in closed form.

    Returns (value, R_exponent) where the value equals
    coefficient * R**R_exponent with
    R_exponent = -kappa*m0 + (2 - (1-alpha)*gamma*l) + (3 - alpha*s*gamma)*l/s.

    Raises DivergentIntegralError when either separated integral is infinite.
    """
    kappa = l * (3.0 / s + 2.0 / l - 1.0)
    radial = power_radial_integral(-alpha_p * gamma_p * s, R)  # R**(3-a s g)/(3-a s g)
    bl = -(1 - alpha_p) * gamma_p * l / 2.0
    time_factor = power_time_integral(bl, R**2)
    value = c**l * (FOUR_PI * radial) ** (l / s) * time_factor * R ** (-kappa * m0)
    r_exponent = (
        -kappa * m0
        + (2.0 - (1 - alpha_p) * gamma_p * l)
        + (3.0 - alpha_p * s * gamma_p) * l / s
    )
    return value, r_exponent


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class QuantityRow:
    """All quantities at one radius; weighted variants use (m, m1) and n = m."""

    r: float
    A: float
    E: float
    C: float
    D: float
    H: float
    A_m1: float
    E_m: float
    D_m: float
    C_mt: float
    H_n: float
    M_kappa: float
    M_kappa_m0: float

    @property
    def calE(self) -> float:
        return self.E + self.A + self.D


@dataclass
class QuantityReport:
    rows: list = dc_field(default_factory=list)
    type1_sup: float = 0.0

    def append(self, row: QuantityRow):
        self.rows.append(row)
        self.type1_sup = max(self.type1_sup, row.A, row.E, row.C)

    CSV_COLUMNS = (
        "r", "A", "E", "C", "D", "H", "A_m1", "E_m", "D_m", "C_mt",
        "M_kappa", "M_kappa_m0", "calE",
    )

    def to_csv_rows(self):
        for row in self.rows:
            yield [
                row.r, row.A, row.E, row.C, row.D, row.H, row.A_m1,
                row.E_m, row.D_m, row.C_mt, row.M_kappa, row.M_kappa_m0,
                row.calE,
            ]


def energy_quantities(field, r: float, params: ExponentParams,
                      cfg: QuadratureConfig = DEFAULT_CONFIG,
                      mu: float = 1.0) -> QuantityRow:
    """One report row: plain and Morrey-weighted quantities plus mixed norms."""
    m = float(params.m)
    m1 = float(params.m1)
    A1 = sup_weighted_mass(field, r, 1.0, cfg, mu)
    Am1 = sup_weighted_mass(field, r, m1, cfg, mu)
    E1 = cylinder_gradsq_integral(field, r, 1.0, cfg, mu)
    Em = cylinder_gradsq_integral(field, r, m, cfg, mu)
    C1 = cylinder_power_integral(field, "speed", 3.0, r, 2.0, cfg, mu)
    Cmt = cylinder_power_integral(field, "speed", 3.0, r, 2.0 * m, cfg, mu)
    D1 = cylinder_power_integral(field, "pressure", 1.5, r, 2.0, cfg, mu)
    Dm = cylinder_power_integral(field, "pressure", 1.5, r, 2.0 * m, cfg, mu)
    H1 = cylinder_power_integral(field, "speed", 2.0, r, 3.0, cfg, mu)
    Hn = cylinder_power_integral(field, "speed", 2.0, r, m + 2.0, cfg, mu)
    Mk, Mk0 = m_quantity(field, r, float(params.s), float(params.l),
                         float(params.m0), cfg, mu)
    return QuantityRow(
        r=r, A=A1, E=E1, C=C1, D=D1, H=H1, A_m1=Am1, E_m=Em, D_m=Dm,
        C_mt=Cmt, H_n=Hn, M_kappa=Mk, M_kappa_m0=Mk0,
    )


def quantity_report(field, radii: Sequence[float], params: ExponentParams,
                    cfg: QuadratureConfig = DEFAULT_CONFIG) -> QuantityReport:
    """Evaluate the full quantity set over a radius ladder."""
    report = QuantityReport()
    for r in sorted(radii):
        report.append(energy_quantities(field, r, params, cfg))
    return report


# ---------------------------------------------------------------------------
# inequality-ratio diagnostics


def _ratio(lhs: float, rhs: float) -> float:
    if rhs == 0.0:
        if lhs == 0.0:
            return 0.0
        raise InequalityStructureError(
            f"ratio undefined: lhs={lhs} positive while rhs=0"
        )
    return lhs / rhs


@dataclass(frozen=True)
class InequalityRatios:
    """LHS/RHS ratios of the standard local estimates; diagnostics only.

    Only the invariance of these ratios under exact rescaling is asserted
    anywhere; the universal constants are existential.
    """

    r: float
    rho: float
    multiplicative_weighted: float
    multiplicative: float
    pressure_decay: float
    energy_local: float


def inequality_ratios(field, r: float, rho: float, params: ExponentParams,
                      cfg: QuadratureConfig = DEFAULT_CONFIG) -> InequalityRatios:
    """Ratios for the weighted multiplicative estimate, the unit-weight
    multiplicative estimate, the pressure decay estimate and the local
    energy estimate (the last evaluated at (r, 2r))."""
    if not 0 < r < rho:
        raise RadiusError(f"need 0 < r < rho, got r={r}, rho={rho}")
    _check_radius(field, 2 * r)
    _check_radius(field, rho)
    m = float(params.m)
    m1 = float(params.m1)

    Am1 = sup_weighted_mass(field, r, m1, cfg)
    Em = cylinder_gradsq_integral(field, r, m, cfg)
    Cmt = cylinder_power_integral(field, "speed", 3.0, r, 2.0 * m, cfg)
    pref = r ** (1.5 * m1 + 0.5 - 2.0 * m)
    mult_w = _ratio(Cmt, pref * Am1**0.75 * (r ** (m - m1) * Em + Am1) ** 0.75)

    A1 = sup_weighted_mass(field, r, 1.0, cfg)
    E1 = cylinder_gradsq_integral(field, r, 1.0, cfg)
    C1 = cylinder_power_integral(field, "speed", 3.0, r, 2.0, cfg)
    mult = _ratio(C1, A1**0.75 * (E1 + A1) ** 0.75)

    D1r = cylinder_power_integral(field, "pressure", 1.5, r, 2.0, cfg)
    D1rho = cylinder_power_integral(field, "pressure", 1.5, rho, 2.0, cfg)
    C1rho = cylinder_power_integral(field, "speed", 3.0, rho, 2.0, cfg)
    press = _ratio(D1r, (r / rho) * D1rho + (rho / r) ** 2 * C1rho)

    C12r = cylinder_power_integral(field, "speed", 3.0, 2 * r, 2.0, cfg)
    D12r = cylinder_power_integral(field, "pressure", 1.5, 2 * r, 2.0, cfg)
    energy = _ratio(A1 + E1, C12r ** (2.0 / 3.0) + C12r + D12r)

    return InequalityRatios(
        r=r, rho=rho, multiplicative_weighted=mult_w, multiplicative=mult,
        pressure_decay=press, energy_local=energy,
    )


# ---------------------------------------------------------------------------
# local energy balance


@dataclass(frozen=True)
class GaussianBump:
    """Smooth nonnegative test function with analytic derivatives.

    A Gaussian in space and time; the quadrature support is truncated at
    ``nsigma`` standard deviations, where the tails are negligible against
    the tolerances used here.
    """

    center: tuple = (0.0, 0.0, 0.0)
    t_center: float = -0.5
    sigma: float = 0.5
    sigma_t: float = 0.1
    amplitude: float = 1.0
    nsigma: float = 7.0

    def value(self, y, tau):
        y = np.asarray(y, dtype=float)
        d = y - np.asarray(self.center)
        q = np.einsum("...i,...i->...", d, d) / (2 * self.sigma**2)
        qt = (tau - self.t_center) ** 2 / (2 * self.sigma_t**2)
        return self.amplitude * np.exp(-q - qt)

    def grad(self, y, tau):
        y = np.asarray(y, dtype=float)
        d = y - np.asarray(self.center)
        return self.value(y, tau)[..., None] * (-d / self.sigma**2)

    def laplacian(self, y, tau):
        y = np.asarray(y, dtype=float)
        d = y - np.asarray(self.center)
        q = np.einsum("...i,...i->...", d, d)
        return self.value(y, tau) * (q / self.sigma**4 - 3.0 / self.sigma**2)

    def dt(self, y, tau):
        return self.value(y, tau) * (-(tau - self.t_center) / self.sigma_t**2)

    @property
    def space_box(self):
        c = np.asarray(self.center)
        return c - self.nsigma * self.sigma, c + self.nsigma * self.sigma

    @property
    def time_window(self):
        return (
            self.t_center - self.nsigma * self.sigma_t,
            self.t_center + self.nsigma * self.sigma_t,
        )


@dataclass(frozen=True)
class ExponentialWeighted:
    """phi = base * exp(rate * tau), with derivatives carried through."""

    base: GaussianBump
    rate: float

    def value(self, y, tau):
        return self.base.value(y, tau) * np.exp(self.rate * tau)

    def grad(self, y, tau):
        return self.base.grad(y, tau) * np.exp(self.rate * tau)

    def laplacian(self, y, tau):
        return self.base.laplacian(y, tau) * np.exp(self.rate * tau)

    def dt(self, y, tau):
        return (
            self.base.dt(y, tau) + self.rate * self.base.value(y, tau)
        ) * np.exp(self.rate * tau)

    @property
    def space_box(self):
        return self.base.space_box

    @property
    def time_window(self):
        return self.base.time_window


def _testfn_grid(testfn, n: int):
    lo, hi = testfn.space_box
    nodes = []
    weights = []
    for j in range(3):
        x, w = gauss_legendre(float(lo[j]), float(hi[j]), n)
        nodes.append(x)
        weights.append(w)
    xx, yy, zz = np.meshgrid(*nodes, indexing="ij")
    pts = np.stack([xx.ravel(), yy.ravel(), zz.ravel()], axis=-1)
    wx, wy, wz = np.meshgrid(*weights, indexing="ij")
    wts = (wx * wy * wz).ravel()
    return pts, wts


def local_energy_residual(profile, testfn, tau0: float, variant: str,
                          cfg: QuadratureConfig = DEFAULT_CONFIG,
                          params: Optional[ExponentParams] = None):
    """Both sides of a local energy balance and their difference.

    Variants: "standard-ns" (with dissipation and the heat-test term),
    "euler-limit" (inviscid: both drop out), "selfsimilar" (similarity
    variables with the drift and zeroth-order terms) and
    "selfsimilar-weighted" (the exponentially weighted pre-substitution
    form).  For a smooth exact solution of the corresponding equations the
    residual is zero up to quadrature error.
    """
    tlo, thi = testfn.time_window
    physical = variant in ("standard-ns", "euler-limit")
    if physical:
        if thi >= 0 and (profile.singular_at_time_zero or not getattr(profile, "steady", False)):
            raise SupportError("test function support reaches t >= 0")
        if tau0 >= 0:
            raise SupportError("tau0 must be negative for physical-time variants")
    if profile.singular_at_origin:
        lo, hi = testfn.space_box
        if np.all(lo < 0) and np.all(hi > 0):
            raise SupportError("test function support contains the singular point x = 0")

    n = cfg.n_space
    pts, wts = _testfn_grid(testfn, n)
    t_hi = min(thi, tau0)
    if t_hi <= tlo:
        tnodes, twts = np.array([]), np.array([])
    else:
        tnodes, twts = gauss_legendre(tlo, t_hi, max(cfg.n_time, n))

    if variant in ("selfsimilar", "selfsimilar-weighted"):
        if not isinstance(profile, SelfSimilarProfile):
            raise TypeError("similarity variants need a SelfSimilarProfile")
        if params is None:
            alpha = profile.alpha
            m1 = 3.0 - 2.0 * alpha
        else:
            alpha = float(params.alpha)
            m1 = float(params.m1)
        rate = m1 / (1.0 + alpha)
        U = np.asarray(profile.U(pts), dtype=float)
        P = (
            np.zeros(pts.shape[0])
            if profile.P is None
            else np.asarray(profile.P(pts), dtype=float)
        )
        U2 = np.einsum("...i,...i->...", U, U)
        rhs = 0.0
        for t, wt in zip(tnodes, twts):
            phi_g = testfn.grad(pts, t)
            drift = np.einsum("...i,...i->...", pts, phi_g) / (1.0 + alpha)
            adv = np.einsum("...i,...i->...", U, phi_g)
            if variant == "selfsimilar":
                integrand = (
                    U2 * (drift + testfn.dt(pts, t) + rate * testfn.value(pts, t))
                    + adv * (U2 + 2.0 * P)
                )
                weight = 1.0
            else:
                integrand = U2 * (drift + testfn.dt(pts, t)) + adv * (U2 + 2.0 * P)
                weight = np.exp(-rate * t)
            rhs += wt * weight * float(np.sum(wts * integrand))
        lhs_weight = 1.0 if variant == "selfsimilar" else np.exp(-rate * tau0)
        lhs = lhs_weight * float(np.sum(wts * U2 * testfn.value(pts, tau0)))
        return lhs, rhs, lhs - rhs

    rhs = 0.0
    dissipation = 0.0
    for t, wt in zip(tnodes, twts):
        v = profile.velocity(pts, t)
        p = profile.pressure(pts, t)
        v2 = np.einsum("...i,...i->...", v, v)
        phi_g = testfn.grad(pts, t)
        adv = np.einsum("...i,...i->...", v, phi_g)
        heat = testfn.dt(pts, t)
        if variant == "standard-ns":
            heat = heat + testfn.laplacian(pts, t)
            g = profile.grad_norm_sq(pts, t)
            if g is None:
                g = _gradsq_fd(profile, pts, t, 1e-4)
            dissipation += wt * float(np.sum(wts * testfn.value(pts, t) * g))
        rhs += wt * float(np.sum(wts * (v2 * heat + adv * (v2 + 2.0 * p))))
    v0 = profile.velocity(pts, tau0)
    v02 = np.einsum("...i,...i->...", v0, v0)
    lhs = float(np.sum(wts * v02 * testfn.value(pts, tau0)))
    if variant == "standard-ns":
        lhs = lhs + 2.0 * dissipation
    elif variant != "euler-limit":
        raise ValueError(f"unknown variant {variant!r}")
    return lhs, rhs, lhs - rhs
