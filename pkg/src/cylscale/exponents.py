"""Exponent algebra for scaled energy quantities on parabolic cylinders.

Everything here is pure arithmetic on the Lebesgue pair (s, l) and the growth
attenuation exponent m0.  When the inputs are `fractions.Fraction` (or any
`numbers.Rational`), every derived exponent and identity certificate is exact;
with floats the identities hold to `IDENTITY_TOL`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

from .errors import DegenerateInputError, DomainError, InfeasibleDeltaError

Number = Union[int, float, Fraction]

#: tolerance for identity certificates evaluated in binary64
IDENTITY_TOL = 1e-12


def _is_exact(*values: Number) -> bool:
    return all(isinstance(v, Rational) for v in values)


def _half(exact: bool) -> Number:
    return Fraction(1, 2) if exact else 0.5


@dataclass(frozen=True)
class SLPair:
    """A Lebesgue space/time exponent pair, both at least 1."""

    s: Number
    l: Number

    def __post_init__(self):
        if self.s < 1 or self.l < 1:
            raise DomainError(f"require s >= 1 and l >= 1, got s={self.s}, l={self.l}")


@dataclass(frozen=True)
class ExponentParams:
    """The (s, l, m0) triple together with every derived exponent.

    ``kappa`` is the weight of the mixed-norm quantity, ``q_interp`` the
    interpolation exponent 2l(3/s + 2/l - 3/2), ``alpha`` the inviscid zoom
    exponent, ``m = 2 - alpha`` the Morrey weight and ``m1 = 2m - 1``.
    ``gamma_profile`` is the power attached to the candidate singular profile.
    """

    sl: SLPair
    m0: Number
    kappa: Number
    q_interp: Number
    alpha: Number
    m: Number
    m1: Number
    gamma_profile: Number
    #: strict strong admissibility window for (s, l)
    strong_admissible: bool
    #: weak admissibility, l > kappa
    weak_admissible: bool
    #: l > kappa > 0
    positive_window: bool
    #: alpha > 1 and m1 < m < 1 (the blowup-scenario ordering)
    scenario_ordered: bool
    #: lower bound forced on m0 by m >= 1/2; None when kappa <= 0
    m0_lower_bound: Optional[Number] = None

    @property
    def s(self) -> Number:
        return self.sl.s

    @property
    def l(self) -> Number:
        return self.sl.l


def strong_admissibility(s: Number, l: Number) -> bool:
    """Strict window 1 > 3/s + 2/l - 1 > 1/2 + max(1/(2l), 1/2 - 1/l)."""
    if s < 1 or l < 1:
        raise DomainError(f"require s >= 1 and l >= 1, got s={s}, l={l}")
    exact = _is_exact(s, l)
    half = _half(exact)
    mid = 3 / _n(s, exact) + 2 / _n(l, exact) - 1
    lower = half + max(1 / (2 * _n(l, exact)), half - 1 / _n(l, exact))
    return lower < mid < 1


def _n(v: Number, exact: bool) -> Number:
    """Promote ints to Fraction in exact mode so divisions stay exact."""
    if exact and isinstance(v, int):
        return Fraction(v)
    return v


def derive(s: Number, l: Number, m0: Number) -> ExponentParams:
    """Derive every exponent attached to the triple (s, l, m0).

    Raises
    ------
    DomainError
        if s < 1, l < 1 or m0 outside (0, 1].
    DegenerateInputError
        if the denominator of the zoom exponent alpha vanishes.
    """
    if s < 1 or l < 1:
        raise DomainError(f"require s >= 1 and l >= 1, got s={s}, l={l}")
    if not 0 < m0 <= 1:
        raise DomainError(f"require 0 < m0 <= 1, got m0={m0}")
    exact = _is_exact(s, l, m0)
    s = _n(s, exact)
    l = _n(l, exact)
    m0 = _n(m0, exact)
    half = _half(exact)

    mid = 3 / s + 2 / l - 1  # the quantity the admissibility window bounds
    kappa = l * mid
    q_interp = 2 * l * (mid - half)

    base = l * (3 / s + 1)
    denom = base + (m0 - 1) * kappa
    if denom == 0:
        raise DegenerateInputError(
            f"alpha undefined: l*(3/s + 1) + (m0 - 1)*kappa = 0 for s={s}, l={l}, m0={m0}"
        )
    alpha = (base - (m0 - 1) * kappa) / denom
    m = 2 - alpha
    m1 = 2 * m - 1
    gamma_profile = mid * (1 - m0) + 1

    strong = strong_admissibility(s, l)
    weak = l > kappa
    window = l > kappa > 0
    ordered = alpha > 1 and m1 < m < 1

    m0_bound = None
    if kappa > 0:
        m0_bound = 2 * (6 / s + 5 / l - 3) / (5 * mid)

    return ExponentParams(
        sl=SLPair(s, l),
        m0=m0,
        kappa=kappa,
        q_interp=q_interp,
        alpha=alpha,
        m=m,
        m1=m1,
        gamma_profile=gamma_profile,
        strong_admissible=strong,
        weak_admissible=weak,
        positive_window=window,
        scenario_ordered=ordered,
        m0_lower_bound=m0_bound,
    )


def pq_of_lambda(lambda_p: Number):
    """The one-parameter exponent family with 3/p + 2/q - 1 = 1/2 identically.

    1/p = lambda/6 + 3(1-lambda)/10 and 1/q = lambda/2 + 3(1-lambda)/10
    for lambda in [0, 1].
    """
    if not 0 <= lambda_p <= 1:
        raise DomainError(f"require 0 <= lambda <= 1, got {lambda_p}")
    exact = _is_exact(lambda_p)
    lam = _n(lambda_p, exact)
    inv_p = lam / 6 + 3 * (1 - lam) / (Fraction(10) if exact else 10.0)
    inv_q = lam / 2 + 3 * (1 - lam) / (Fraction(10) if exact else 10.0)
    return 1 / inv_p, 1 / inv_q


@dataclass(frozen=True)
class ProfileConstruction:
    """Output of the singular-profile exponent construction.

    ``exponent_certificate`` is the closed-form radius exponent of the
    attenuated mixed norm of the power-law profile; in the interior branch it
    cancels to zero (exactly so in rational mode).
    """

    m0: Number
    alpha_profile: Number
    delta: Optional[Number]
    delta_interval: Optional[tuple]
    s: Number
    l: Number
    gamma: Number
    kappa: Number
    exponent_certificate: Number
    #: 1/l > gamma*(1-alpha)/2 and 1/s > gamma*alpha/3 (integrability)
    integrable: bool
    strong_admissible: bool
    branch: str
    #: edge-branch closure checks: l*gamma < 2 (alpha=0) or s*gamma < 3 (alpha=1)
    edge_check: Optional[bool] = None

    @property
    def params(self) -> ExponentParams:
        return derive(self.s, self.l, self.m0)


def delta_interval(m0: Number, alpha_profile: Number):
    """Admissible open interval for delta in the interior construction."""
    exact = _is_exact(m0, alpha_profile)
    m0 = _n(m0, exact)
    a = _n(alpha_profile, exact)
    lo = max(6 / (3 + a), 4 / (3 - a)) / (2 - m0)
    hi = 2 / (2 - m0)
    return lo, hi


def construct_profile_exponents(
    m0: Number,
    alpha_profile: Number,
    delta: Optional[Number] = None,
    delta1: Number = Fraction(1, 100),
    delta2: Number = Fraction(1, 100),
) -> ProfileConstruction:
    """Build (s, l, gamma) making the attenuated mixed norm of the power-law
    profile radius-independent.

    For 0 < alpha_profile < 1 the construction picks (or validates) delta with
    max(6/(3+alpha), 4/(3-alpha)) < delta*(2-m0) < 2 and sets
    1/l = delta*(2-m0)*(1-alpha)/2, 1/s = delta*(2-m0)*alpha/3.  The edge
    branches alpha_profile in {0, 1} instead use fixed closed forms with small
    perturbations delta1, delta2.
    """
    if not 0 < m0 < 1:
        raise DomainError(f"require 0 < m0 < 1, got m0={m0}")
    exact = _is_exact(m0, alpha_profile, delta1, delta2) and (
        delta is None or _is_exact(delta)
    )
    m0 = _n(m0, exact)
    a = _n(alpha_profile, exact)

    if alpha_profile == 0:
        if not Fraction(19, 20) < m0 < 1:
            raise DomainError(f"alpha=0 branch needs 19/20 < m0 < 1, got m0={m0}")
        d1 = _n(delta1, exact)
        d2 = _n(delta2, exact)
        s = 10 / (3 * (1 + d1))
        l = 20 / (11 * (1 - d2))
        return _finish_construction(m0, a, None, None, s, l, branch="alpha0")
    if alpha_profile == 1:
        if not Fraction(4, 5) < m0 < 1:
            raise DomainError(f"alpha=1 branch needs 4/5 < m0 < 1, got m0={m0}")
        d1 = _n(delta1, exact)
        d2 = _n(delta2, exact)
        s = 15 / (7 * (1 - d1))
        l = 10 / (3 * (1 + d2))
        return _finish_construction(m0, a, None, None, s, l, branch="alpha1")
    if not 0 < alpha_profile < 1:
        raise DomainError(
            f"interior branch needs 0 < alpha_profile < 1, got {alpha_profile}"
        )

    lo, hi = delta_interval(m0, a)
    if not lo < hi:
        raise InfeasibleDeltaError(
            f"empty delta interval ({lo}, {hi}) for m0={m0}, alpha={alpha_profile}"
        )
    if delta is None:
        delta = (lo + hi) / 2
    else:
        delta = _n(delta, exact)
        if not lo < delta < hi:
            raise DomainError(
                f"delta={delta} outside admissible interval ({lo}, {hi})"
            )
    inv_l = delta * (2 - m0) * (1 - a) / 2
    inv_s = delta * (2 - m0) * a / 3
    return _finish_construction(m0, a, delta, (lo, hi), 1 / inv_s, 1 / inv_l,
                                branch="interior")


def _finish_construction(m0, a, delta, interval, s, l, branch):
    mid = 3 / s + 2 / l - 1
    kappa = l * mid
    gamma = mid * (1 - m0) + 1
    # radius exponent of the attenuated mixed norm of the profile
    certificate = -kappa * m0 + (2 - (1 - a) * gamma * l) + (3 - a * s * gamma) * l / s
    integrable = (1 / l > gamma * (1 - a) / 2) and (1 / s > gamma * a / 3)
    strong = strong_admissibility(s, l)
    edge_check = None
    if branch == "alpha0":
        edge_check = l * gamma < 2
    elif branch == "alpha1":
        edge_check = s * gamma < 3
    return ProfileConstruction(
        m0=m0,
        alpha_profile=a,
        delta=delta,
        delta_interval=interval,
        s=s,
        l=l,
        gamma=gamma,
        kappa=kappa,
        exponent_certificate=certificate,
        integrable=integrable,
        strong_admissible=strong,
        branch=branch,
        edge_check=edge_check,
    )


@dataclass(frozen=True)
class InterpolationSplit:
    """One interpolation splitting of the cubic term, with its identities.

    ``identities`` maps a label to an (lhs, rhs) pair that must agree exactly
    (rational mode) or to IDENTITY_TOL (float mode).  Non-applicable cases are
    returned as markers with ``applicable=False``.
    """

    case_tag: str
    applicable: bool
    lambda_i: Optional[Number] = None
    mu_i: Optional[Number] = None
    gamma_i: Optional[Number] = None
    q_dual: Optional[tuple] = None
    identities: Optional[dict] = None
    flags: Optional[dict] = None


def interpolation_splits(s: Number, l: Number) -> list:
    """All interpolation splittings attached to the pair (s, l).

    Emits one entry per case tag; the ones whose preconditions fail are
    markers, not errors.
    """
    if s < 1 or l < 1:
        raise DomainError(f"require s >= 1 and l >= 1, got s={s}, l={l}")
    exact = _is_exact(s, l)
    s = _n(s, exact)
    l = _n(l, exact)
    half = _half(exact)
    splits = []

    # three-factor Hoelder/Gagliardo-Nirenberg split, valid on the strong window
    q = 2 * l * (3 / s + 2 / l - 3 * half)
    if strong_admissibility(s, l):
        lam = (l / q) * (1 / s)
        gam = (l / q) * (2 / s + 1 / l - 1)
        mu = (l / q) * (3 / s + 3 / l - 2)
        qp = q / (q - 1)
        splits.append(
            InterpolationSplit(
                case_tag="AppII",
                applicable=True,
                lambda_i=lam,
                mu_i=mu,
                gamma_i=gam,
                q_dual=(q, qp),
                identities={
                    "sum": (lam + mu + gam, 1),
                    "moment": (s * lam + 2 * mu + 6 * gam, 3),
                    "dual-weight": (3 * gam * qp, 1),
                },
            )
        )
    else:
        splits.append(InterpolationSplit(case_tag="AppII", applicable=False))

    # direct case l = 3, s >= 3: no interpolation exponents needed
    splits.append(
        InterpolationSplit(case_tag="AppIII-l3", applicable=(l == 3 and s >= 3))
    )

    # 1 <= l < 3 requires s > 3: two-factor split between |v|^s and |v|^2
    if l < 3 and s > 3:
        lam = 1 / (s - 2)
        mu = (s - 3) / (s - 2)
        splits.append(
            InterpolationSplit(
                case_tag="AppIII-l-below-3",
                applicable=True,
                lambda_i=lam,
                mu_i=mu,
                q_dual=(l / (lam * s), None),
                identities={
                    "sum": (lam + mu, 1),
                    "moment": (s * lam + 2 * mu, 3),
                },
            )
        )
    else:
        splits.append(InterpolationSplit(case_tag="AppIII-l-below-3", applicable=False))

    # l > 3 with s >= 3: direct again
    splits.append(
        InterpolationSplit(
            case_tag="AppIII-l-above-3-s-above-3", applicable=(l > 3 and s >= 3)
        )
    )

    # l > 3 with 3/2 < s < 3: split between |v|^s and |v|^6
    if l > 3 and 3 * half < s < 3:
        lam = 3 / (6 - s)
        gam = (3 - s) / (6 - s)
        q_here = l / (lam * s)
        qp = q_here / (q_here - 1)
        splits.append(
            InterpolationSplit(
                case_tag="AppIII-l-above-3-s-mid",
                applicable=True,
                lambda_i=lam,
                gamma_i=gam,
                q_dual=(q_here, qp),
                identities={
                    "sum": (lam + gam, 1),
                    "moment": (s * lam + 6 * gam, 3),
                },
                flags={
                    "three-gamma-below-1": 3 * gam < 1,
                    "dual-weight-le-1": 3 * gam * qp <= 1,
                },
            )
        )
    else:
        splits.append(
            InterpolationSplit(case_tag="AppIII-l-above-3-s-mid", applicable=False)
        )
    return splits


@dataclass(frozen=True)
class WeightedKappa:
    """kappa_n = n*kappa + q*(1-n) and the attenuation it corresponds to."""

    n: Number
    kappa: Number
    q_interp: Number
    kappa_n: Number
    #: m0* with kappa * m0* = kappa_n; None when kappa <= 0
    m0_star: Optional[Number]
    #: m0* strictly inside (0, 1)
    m0_star_interior: Optional[bool]


def weighted_kappa(s: Number, l: Number, n: Number) -> WeightedKappa:
    """Interpolated weight between the mixed-norm exponents kappa and q."""
    if s < 1 or l < 1:
        raise DomainError(f"require s >= 1 and l >= 1, got s={s}, l={l}")
    exact = _is_exact(s, l, n)
    s = _n(s, exact)
    l = _n(l, exact)
    n = _n(n, exact)
    half = _half(exact)
    kappa = l * (3 / s + 2 / l - 1)
    q = 2 * l * (3 / s + 2 / l - 3 * half)
    kappa_n = n * kappa + q * (1 - n)
    m0_star = None
    interior = None
    if kappa > 0:
        m0_star = kappa_n / kappa
        interior = 0 < m0_star < 1
    return WeightedKappa(
        n=n, kappa=kappa, q_interp=q, kappa_n=kappa_n,
        m0_star=m0_star, m0_star_interior=interior,
    )
