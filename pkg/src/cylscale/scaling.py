"""The viscous and inviscid scaling groups and their machine checks.

The viscous group is v -> lam v(lam y, lam^2 s); the inviscid group
v -> lam^alpha v(lam y, lam^(alpha+1) tau) with alpha > 1 used to zoom into
slow-growth blowup scenarios.  The viscous group is the alpha = 1 member of
the same family, and closed-form profiles rescale to closed-form profiles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, GeometryError
from .exponents import ExponentParams
from .fields import (
    ConstantProfile,
    CylinderSpec,
    GridField,
    PowerLawProfile,
    Profile,
    SelfSimilarProfile,
    SteadyShearProfile,
)
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, centered_times
from .quantities import (
    cylinder_gradsq_integral,
    cylinder_power_integral,
    m_quantity,
    sup_weighted_mass,
)

ROOT_TOL = 1e-14


@dataclass(frozen=True)
class ScalingSpec:
    """One scaling transformation: kind 'navier-stokes' or 'euler'.

    ``alpha`` is only read for the inviscid kind; alpha <= 1 there is allowed
    but flagged, since the zoom inequality chain needs alpha > 1.
    """

    kind: str
    lam: float
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("navier-stokes", "euler"):
            raise DomainError(f"unknown scaling kind {self.kind!r}")
        if self.lam <= 0:
            raise DomainError("lam must be positive")
        if self.kind == "euler" and self.alpha is None:
            raise DomainError("euler scaling needs alpha")

    @property
    def exponent(self) -> float:
        return 1.0 if self.kind == "navier-stokes" else float(self.alpha)

    @property
    def weak_alpha(self) -> bool:
        """True when the inviscid chain's alpha > 1 requirement fails."""
        return self.kind == "euler" and self.alpha is not None and self.alpha <= 1


class RescaledProfile(Profile):
    """Generic pullback lam^alpha v(lam y, lam^(alpha+1) tau)."""

    def __init__(self, base: Profile, lam: float, alpha: float):
        self.base = base
        self.lam = lam
        self.alpha = alpha
        self.radial_power = base.radial_power
        self.time_power = base.time_power
        self.steady = getattr(base, "steady", False)

    def velocity(self, x, t):
        la = self.lam
        return la**self.alpha * self.base.velocity(
            la * np.asarray(x, dtype=float), la ** (self.alpha + 1) * t
        )

    def pressure(self, x, t):
        la = self.lam
        return la ** (2 * self.alpha) * self.base.pressure(
            la * np.asarray(x, dtype=float), la ** (self.alpha + 1) * t
        )


def rescale(profile, spec: ScalingSpec):
    """Apply a scaling transformation, staying in closed form when possible."""
    la = spec.lam
    al = spec.exponent
    if isinstance(profile, ConstantProfile):
        return ConstantProfile(tuple(la**al * np.asarray(profile.c3, dtype=float)))
    if isinstance(profile, PowerLawProfile):
        # speed coefficient picks up lam^(alpha + a + (alpha+1) b); the
        # quadratic pressure closure is preserved with the same coefficient
        shift = al + profile.radial_power + (al + 1) * profile.time_power
        return PowerLawProfile(
            c=profile.c * la**shift,
            alpha_p=profile.alpha_p,
            gamma_p=profile.gamma_p,
            pressure_coeff=profile.pressure_coeff,
        )
    if isinstance(profile, SteadyShearProfile):
        return SteadyShearProfile(
            amplitude=la**al * profile.amplitude,
            wavenumber=la * profile.wavenumber,
        )
    if isinstance(profile, SelfSimilarProfile) and spec.kind == "euler" \
            and spec.alpha == profile.alpha:
        return profile  # exactly invariant by construction
    if isinstance(profile, GridField):
        return rescale_grid(profile, spec)
    return RescaledProfile(profile, la, al)


def rescale_grid(field: GridField, spec: ScalingSpec) -> GridField:
    """Rescale a sampled field; nodes map to nodes exactly."""
    la = spec.lam
    al = spec.exponent
    cyl = field.cylinder
    new_radius = cyl.radius / la
    new_mu = cyl.mu * la ** (1.0 - al)
    return GridField(
        cylinder=CylinderSpec(radius=new_radius, lam=cyl.lam, mu=new_mu),
        n_space=field.n_space,
        n_time=field.n_time,
        velocity=la**al * field.velocity,
        pressure=la ** (2 * al) * field.pressure,
        radial_power=field.radial_power,
        time_power=field.time_power,
    )


def lambda_for_rk(r_k: float, alpha: float) -> float:
    """Zoom factor with lam**((alpha+1)/2) = r_k."""
    if not 0 < r_k < 1:
        raise DomainError(f"need 0 < r_k < 1, got {r_k}")
    if alpha < 1:
        raise DomainError(f"need alpha >= 1, got {alpha}")
    lam = r_k ** (2.0 / (alpha + 1.0))
    if abs(lam ** ((alpha + 1.0) / 2.0) - r_k) > ROOT_TOL:
        raise ArithmeticError("round-trip check of the zoom factor failed")
    return lam


@dataclass(frozen=True)
class InvarianceRow:
    relation: str
    a: float
    lhs: float
    rhs: float
    slack: float
    tolerance: float
    passed: bool


INVARIANCE_COLUMNS = ("relation", "a", "lhs", "rhs", "slack", "tolerance", "pass")


def _rel_slack(lhs: float, rhs: float) -> float:
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return abs(lhs - rhs) / scale


def invariance_report(profile, spec: ScalingSpec, params: ExponentParams,
                      radii: Sequence[float],
                      cfg: QuadratureConfig = DEFAULT_CONFIG,
                      tolerance: float = 1e-9) -> list:
    """Machine check of the scaling laws over a radius ladder.

    Viscous kind: equality rows for A, E, C, D and M between the rescaled
    field at radius a and the original at lam*a.  Inviscid kind: one-sided
    rows (slack = rhs - lhs >= 0) for the Morrey-weighted A, D, E transfer
    plus the mixed-norm zoom lower bound.
    """
    rows = []
    la = spec.lam
    scaled = rescale(profile, spec)
    m = float(params.m)
    m1 = float(params.m1)
    s, l, m0 = float(params.s), float(params.l), float(params.m0)

    if spec.kind == "navier-stokes":
        for a in radii:
            pairs = [
                ("A", sup_weighted_mass(scaled, a, 1.0, cfg),
                 sup_weighted_mass(profile, la * a, 1.0, cfg)),
                ("E", cylinder_gradsq_integral(scaled, a, 1.0, cfg),
                 cylinder_gradsq_integral(profile, la * a, 1.0, cfg)),
                ("C", cylinder_power_integral(scaled, "speed", 3.0, a, 2.0, cfg),
                 cylinder_power_integral(profile, "speed", 3.0, la * a, 2.0, cfg)),
                ("D", cylinder_power_integral(scaled, "pressure", 1.5, a, 2.0, cfg),
                 cylinder_power_integral(profile, "pressure", 1.5, la * a, 2.0, cfg)),
                ("M", m_quantity(scaled, a, s, l, m0, cfg)[0],
                 m_quantity(profile, la * a, s, l, m0, cfg)[0]),
            ]
            for name, lhs, rhs in pairs:
                slack = _rel_slack(lhs, rhs)
                rows.append(InvarianceRow(
                    relation=f"{name}(v^lam,a)={name}(v,lam*a)", a=a, lhs=lhs,
                    rhs=rhs, slack=slack, tolerance=tolerance,
                    passed=slack <= tolerance,
                ))
        return rows

    al = float(spec.alpha)
    if la > 1:
        raise GeometryError("inviscid transfer bounds need lam <= 1")
    mu_shrunk = la ** (al - 1.0)
    for a in radii:
        # the shrunk time base embeds in Q(lam*a) only for alpha >= 1
        if mu_shrunk > 1 + 1e-12:
            raise GeometryError(
                "scaled time base exceeds the reference cylinder (alpha < 1)"
            )
        # matched time samples: preimages of the reference samples that land
        # inside the shrunk base, so the discrete sup compares subsets
        t_ref = centered_times((la * a) ** 2, cfg.n_time)
        tau = t_ref / la ** (al + 1.0)
        tau = tau[tau > -(a**2)]
        lhs = sup_weighted_mass(scaled, a, m1, cfg, times=tau)
        rhs = sup_weighted_mass(profile, la * a, m1, cfg, times=t_ref)
        rows.append(_one_sided("A_m1", a, lhs, rhs, tolerance))

        lhs = cylinder_gradsq_integral(scaled, a, m, cfg)
        rhs = cylinder_gradsq_integral(profile, la * a, m, cfg)
        rows.append(_one_sided("E_m", a, lhs, rhs, tolerance))

        lhs = cylinder_power_integral(scaled, "pressure", 1.5, a, 2 * m, cfg)
        rhs = cylinder_power_integral(profile, "pressure", 1.5, la * a, 2 * m, cfg)
        rows.append(_one_sided("D_m", a, lhs, rhs, tolerance))

    # mixed-norm zoom lower bound at the matched radius
    r_match = la ** ((al + 1.0) / 2.0)
    lhs = m_quantity(scaled, 1.0, s, l, m0, cfg)[1]
    rhs = m_quantity(profile, r_match, s, l, m0, cfg)[1]
    slack = lhs - rhs
    scale = max(abs(lhs), abs(rhs), 1.0)
    rows.append(InvarianceRow(
        relation="M_att(v^zoom,1)>=M_att(v,r_k)", a=1.0, lhs=lhs, rhs=rhs,
        slack=slack, tolerance=tolerance,
        passed=slack >= -tolerance * scale,
    ))
    return rows


def _one_sided(name: str, a: float, lhs: float, rhs: float,
               tolerance: float) -> InvarianceRow:
    slack = rhs - lhs
    scale = max(abs(lhs), abs(rhs), 1.0)
    return InvarianceRow(
        relation=f"{name}(v^zoom,a)<={name}(v,lam*a)", a=a, lhs=lhs, rhs=rhs,
        slack=slack, tolerance=tolerance, passed=slack >= -tolerance * scale,
    )


def write_invariance_csv(rows, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(INVARIANCE_COLUMNS)
        for row in rows:
            w.writerow([
                row.relation, repr(row.a), repr(row.lhs), repr(row.rhs),
                repr(row.slack), repr(row.tolerance), row.passed,
            ])
