"""Iteration-lemma engine, Liouville verdicts and growth-envelope diagnostics.

The iteration lemma bounds F(R) by a contracting profile term plus a forcing
term A(k, theta, R) with three closed-form branches; the Liouville verdicts
combine the exponent window with growth evidence collected on radius
ladders.  Existential constants in sup-bounds are handled by log-log slope
fitting with a fixed slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError
from .fields import DiscreteSelfSimilarProfile
from .quadrature import DEFAULT_CONFIG, FOUR_PI, QuadratureConfig, ball_grid, graded_nodes

SLOPE_SLACK = 0.05
DEFAULT_LADDER = tuple(float(2**j) for j in range(11))


# ---------------------------------------------------------------------------
# the iteration lemma


@dataclass(frozen=True)
class IterationParams:
    """Contraction/forcing data of the one-step bound
    F(R) <= theta * F(2R) + C / R**beta under growth F(2^k R) <= C (2^k R)**(gamma*m1)."""

    theta: float
    beta: float
    C_force: float = 1.0
    gamma: float = 0.0
    m1: float = 0.0
    gamma_max: float = math.inf
    gamma_ok: bool = True

    def __post_init__(self):
        if not 0 < self.theta < 1:
            raise DomainError(f"theta must lie in (0,1), got {self.theta}")

    @property
    def case_tag(self) -> str:
        x = 2.0**self.beta * self.theta
        if abs(x - 1.0) <= 1e-14:
            return "2^beta*theta=1"
        return "2^beta*theta>1" if x > 1 else "2^beta*theta<1"

    @property
    def contraction(self) -> float:
        """The per-step factor theta * 2**(gamma*m1) of the profile term."""
        return self.theta * 2.0 ** (self.gamma * self.m1)


def gamma_ceiling(m1: float) -> float:
    """Largest growth exponent for which the profile term still contracts."""
    if m1 == 0:
        return 1.0 / (2.0 * math.log(2.0))
    return (math.log(2.0 + m1) - math.log(2.0)) / (m1 * math.log(2.0))


def derive_iteration_params(m: float, gamma: float,
                            C_force: float = 1.0) -> IterationParams:
    """Contraction and forcing exponents from the weighted-quantity window.

    Requires 1/2 < m < 3/5, i.e. 0 < m1 < 1/5 for m1 = 2m - 1.
    """
    if not 0.5 < m < 0.6:
        raise DomainError(f"m must lie in (1/2, 3/5), got {m}")
    if gamma < 0:
        raise DomainError(f"gamma must be nonnegative, got {gamma}")
    m1 = 2.0 * m - 1.0
    theta = 2.0 / (2.0 + m1)
    beta = 1.25 * (1.0 - 5.0 * m / 3.0)
    gmax = gamma_ceiling(m1)
    return IterationParams(
        theta=theta, beta=beta, C_force=C_force, gamma=gamma, m1=m1,
        gamma_max=gmax, gamma_ok=gamma < gmax,
    )


def forcing_term(params: IterationParams, R: float, k: int) -> float:
    """A(k, theta, R) = C * theta**(k-1) * R**-beta * sum_{i<k} (2**beta*theta)**-i."""
    th, be, C = params.theta, params.beta, params.C_force
    x = 1.0 / (2.0**be * th)
    if k <= 0:
        return C * R**-be
    if abs(x - 1.0) <= 1e-14:
        return C * th ** (k - 1) * R**-be * k
    # theta^(k-1) * x^k = 2^(-beta*k) / theta keeps both powers bounded,
    # so the geometric sum never overflows for large k
    head = th ** (k - 1)
    tail = 2.0 ** (-be * k) / th
    return C * R**-be * (head - tail) / (1.0 - x)


@dataclass
class IterationTrace:
    params: IterationParams
    R: float
    ks: list = dc_field(default_factory=list)
    profile_terms: list = dc_field(default_factory=list)
    forcing_terms: list = dc_field(default_factory=list)
    bounds: list = dc_field(default_factory=list)
    case_tag: str = ""
    verdict: str = "inconclusive"

    CSV_COLUMNS = ("k", "profile_term", "forcing_term", "bound")

    def to_csv_rows(self):
        for k, p, a, b in zip(self.ks, self.profile_terms,
                              self.forcing_terms, self.bounds):
            yield [k, repr(p), repr(a), repr(b)]


def iterate_bound(params: IterationParams, R: float, k_max: int) -> IterationTrace:
    """k-fold iteration of the one-step bound in closed form.

    Entry k = 0 is the trivial pre-iteration bound C + C/R**beta; entries
    k >= 1 follow the closed forms of the three forcing cases.  The verdict
    is "converges-to-zero" exactly when the profile term contracts.
    """
    if R < 1:
        raise DomainError(f"need R >= 1, got {R}")
    if k_max < 0:
        raise DomainError(f"need k_max >= 0, got {k_max}")
    trace = IterationTrace(params=params, R=R, case_tag=params.case_tag)
    rho = params.contraction
    C = params.C_force
    for k in range(k_max + 1):
        if k == 0:
            p, a = C, C * R**-params.beta
        else:
            p, a = rho**k * C, forcing_term(params, R, k)
        trace.ks.append(k)
        trace.profile_terms.append(p)
        trace.forcing_terms.append(a)
        trace.bounds.append(p + a)
    trace.verdict = "converges-to-zero" if rho < 1 else "inconclusive"
    return trace


# ---------------------------------------------------------------------------
# growth envelopes


@dataclass(frozen=True)
class GrowthEnvelope:
    """Normalized masses b**-e * integral over B(b), their sup and trend."""

    exponent: float
    ladder: tuple
    masses: tuple
    running_sup: tuple
    slope: float
    bounded: bool

    CSV_COLUMNS = ("b", "normalized_mass", "running_sup")

    def to_csv_rows(self):
        for b, m, s in zip(self.ladder, self.masses, self.running_sup):
            yield [repr(b), repr(m), repr(s)]


def _fit_slope(ladder, masses) -> float:
    b = np.asarray(ladder, dtype=float)
    v = np.asarray(masses, dtype=float)
    keep = v > 0
    if keep.sum() < 2:
        return -math.inf
    return float(np.polyfit(np.log(b[keep]), np.log(v[keep]), 1)[0])


def growth_envelope(u: Callable, exponent: float,
                    ladder: Sequence[float] = DEFAULT_LADDER,
                    power: float = 2.0, radial: bool = False,
                    cfg: QuadratureConfig = DEFAULT_CONFIG) -> GrowthEnvelope:
    """Normalized masses b**-exponent * int_{B(b)} |u|**power over a ladder.

    ``u`` maps (..., 3) points to vectors or scalar magnitudes, or with
    radial=True maps radii to magnitudes (integrated with the graded radial
    rule).  A fitted log-log slope <= SLOPE_SLACK is the numerical witness
    of sup-boundedness on the ladder.
    """
    ladder = [float(b) for b in ladder]
    if any(b2 <= b1 for b1, b2 in zip(ladder, ladder[1:])):
        raise DomainError("ladder must be strictly increasing")
    masses = []
    for b in ladder:
        if radial:
            nodes, weights = graded_nodes(b, cfg.n_radial, cfg.graded_levels)
            vals = np.abs(np.asarray(u(nodes), dtype=float))
            raw = FOUR_PI * float(np.sum(weights * nodes**2 * vals**power))
        else:
            pts, w = ball_grid(b, cfg.n_space)
            vals = np.asarray(u(pts), dtype=float)
            if vals.ndim == pts.ndim:
                vals = np.linalg.norm(vals, axis=-1)
            raw = float(np.sum(np.abs(vals) ** power)) * w
        masses.append(b**-exponent * raw)
    sup = np.maximum.accumulate(masses)
    slope = _fit_slope(ladder, masses)
    return GrowthEnvelope(
        exponent=exponent, ladder=tuple(ladder), masses=tuple(masses),
        running_sup=tuple(float(s) for s in sup), slope=slope,
        bounded=slope <= SLOPE_SLACK,
    )


# ---------------------------------------------------------------------------
# Liouville verdicts

TRIVIAL = "Trivial"
OUT_OF_SCOPE = "OutOfScope"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class LiouvilleVerdict:
    verdict: str
    checklist: dict

    def to_json_dict(self) -> dict:
        return {"verdict": self.verdict, "checklist": self.checklist}


def liouville_verdict(m: float, gamma: Optional[float] = None,
                      evidence=None, profile_kind: str = "selfsimilar") -> LiouvilleVerdict:
    """Triviality verdict for a (discrete) self-similar profile.

    Trivial when m < 1/2, or when 1/2 < m < 3/5, gamma is below the
    contraction ceiling and the supplied growth evidence is bounded on its
    ladder.  OutOfScope when the window fails; Inconclusive when the window
    holds but either gamma reaches the ceiling (strict) or the evidence is
    missing/unbounded.  The verdict is conditional on finite-ladder
    evidence, which the checklist records.
    """
    m1 = 2.0 * m - 1.0
    checklist = {
        "profile_kind": profile_kind,
        "m": m,
        "m1": m1,
        "m1_negative": m1 < 0,
        "window_half_to_three_fifths": 0.5 < m < 0.6,
        "gamma": gamma,
        "gamma_max": None,
        "gamma_below_max": None,
        "evidence_supplied": evidence is not None,
        "evidence_bounded": None,
        "evidence_note": "boundedness judged on the tested ladder only",
    }
    if m1 < 0:
        return LiouvilleVerdict(TRIVIAL, checklist)
    if not 0.5 < m < 0.6:
        return LiouvilleVerdict(OUT_OF_SCOPE, checklist)
    if gamma is None:
        return LiouvilleVerdict(OUT_OF_SCOPE, checklist)
    gmax = gamma_ceiling(m1)
    checklist["gamma_max"] = gmax
    checklist["gamma_below_max"] = gamma < gmax
    if not gamma < gmax:
        return LiouvilleVerdict(INCONCLUSIVE, checklist)
    bounded = _evidence_bounded(evidence)
    checklist["evidence_bounded"] = bounded
    if bounded:
        return LiouvilleVerdict(TRIVIAL, checklist)
    return LiouvilleVerdict(INCONCLUSIVE, checklist)


def _evidence_bounded(evidence) -> bool:
    if evidence is None:
        return False
    if isinstance(evidence, bool):
        return evidence
    if isinstance(evidence, GrowthEnvelope):
        return evidence.bounded
    try:
        return all(_evidence_bounded(e) for e in evidence) and len(list(evidence)) > 0
    except TypeError:
        return False


# ---------------------------------------------------------------------------
# discrete self-similar time-slab bounds


@dataclass(frozen=True)
class SlabBoundRow:
    quantity: str
    target_exponent: float
    fitted_slope: float
    masses: tuple
    passed: bool


def dss_slab_bounds(profile: DiscreteSelfSimilarProfile,
                    ladder: Sequence[float], S0: Optional[float] = None,
                    m: float = 0.55, n_tau: int = 8,
                    cfg: QuadratureConfig = DEFAULT_CONFIG) -> list:
    """Slope checks of the four time-slab growth bounds on an R ladder.

    For each R the masses are sup_tau int_{B(2R)} |U|^2 and the slab
    integrals over (0, S0) of |grad U|^2, |P|^{3/2} and |U|^3; a bound
    <= C * R**e passes iff the fitted log-log slope is <= e + SLOPE_SLACK.
    """
    if S0 is None:
        S0 = profile.S0
    alpha = profile.alpha
    m1 = 2.0 * m - 1.0
    ladder = [float(R) for R in ladder]
    r_min = math.exp(2.0 * S0 / (1.0 + alpha))
    if min(ladder) <= r_min:
        raise DomainError(
            f"every ladder radius must exceed exp(2 S0/(1+alpha)) = {r_min:.6g}"
        )
    taus = S0 * (np.arange(n_tau) + 0.5) / n_tau
    dtau = S0 / n_tau

    sup_mass, grad_mass, prs_mass, cube_mass = [], [], [], []
    for R in ladder:
        pts, w = ball_grid(2.0 * R, cfg.n_space)
        per_tau_sq = []
        grad_tot = prs_tot = cube_tot = 0.0
        for tau in taus:
            U = np.asarray(profile.U(pts, tau), dtype=float)
            if U.ndim == pts.ndim:
                U2 = np.einsum("...i,...i->...", U, U)
            else:
                U2 = np.abs(U) ** 2
            per_tau_sq.append(float(np.sum(U2)) * w)
            cube_tot += dtau * float(np.sum(U2**1.5)) * w
            if profile.P is not None:
                P = np.abs(np.asarray(profile.P(pts, tau), dtype=float))
                prs_tot += dtau * float(np.sum(P**1.5)) * w
            g = _slab_gradsq(profile, pts, tau, 2.0 * R / cfg.n_space)
            grad_tot += dtau * float(np.sum(g)) * w
        sup_mass.append(max(per_tau_sq))
        grad_mass.append(grad_tot)
        prs_mass.append(prs_tot)
        cube_mass.append(cube_tot)

    rows = []
    for name, masses, target in (
        ("sup_mass", sup_mass, m1),
        ("slab_gradsq", grad_mass, m),
        ("slab_pressure", prs_mass, 2.0 * m),
        ("slab_cubed", cube_mass, 0.75 * (m + m1)),
    ):
        slope = _fit_slope(ladder, masses)
        rows.append(SlabBoundRow(
            quantity=name, target_exponent=target, fitted_slope=slope,
            masses=tuple(masses), passed=slope <= target + SLOPE_SLACK,
        ))
    return rows


def _slab_gradsq(profile: DiscreteSelfSimilarProfile, pts: np.ndarray,
                 tau: float, h: float) -> np.ndarray:
    if profile.grad_radial is not None:
        rho = np.linalg.norm(pts, axis=-1)
        return np.asarray(profile.grad_radial(rho, tau), dtype=float)
    step_len = 0.25 * h
    g = np.zeros(pts.shape[:-1])
    for j in range(3):
        step = np.zeros(3)
        step[j] = step_len
        up = np.asarray(profile.U(pts + step, tau), dtype=float)
        dn = np.asarray(profile.U(pts - step, tau), dtype=float)
        dv = (up - dn) / (2.0 * step_len)
        if dv.ndim == pts.ndim:
            g += np.einsum("...i,...i->...", dv, dv)
        else:
            g += dv * dv
    return g


# ---------------------------------------------------------------------------
# generic decay recursion


def decay_recursion(G0: float, b: float, k: int,
                    factor: float = 0.5) -> list:
    """Iterate G(theta rho) <= factor * G(rho) + b down k steps.

    Returns the per-step bounds; for factor = 1/2 the closed form is
    G_k <= 2**-k * G_0 + 2b.
    """
    if not 0 < factor < 1:
        raise DomainError(f"factor must lie in (0,1), got {factor}")
    out = [G0]
    g = G0
    for _ in range(k):
        g = factor * g + b
        out.append(g)
    return out


def write_trace_csv(trace: IterationTrace, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(IterationTrace.CSV_COLUMNS)
        for row in trace.to_csv_rows():
            w.writerow(row)
