"""Batch front-end: key=value configs in, reproducible CSV/JSON reports out.

Subcommands: exponents, construct, quantities, scale-check, liouville,
iterate, suite, defaults.  Outputs are deterministic for a fixed config:
evaluation order is fixed, floats are emitted with repr, JSON keys are
sorted and no timestamps are written.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import asymptotics as asy
from . import exponents as ex
from . import fields as fl
from . import quantities as qt
from . import scaling as sc
from .errors import CylscaleError
from .quadrature import QuadratureConfig

OUT_ENV = "CYLSCALE_OUT"

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERIC = 2

DEFAULTS = {
    "exponents.s": "14/5",
    "exponents.l": "14/5",
    "exponents.m0": "9/10",
    "construct.m0": "9/10",
    "construct.alpha": "1/2",
    "profile.kind": "power-law",
    "profile.c": "1.0",
    "profile.alpha_p": "0.5",
    "profile.gamma_p": "1.0857142857142856",
    "profile.pressure_coeff": "1.0",
    "profile.amplitude": "1.0",
    "profile.wavenumber": "1.0",
    "ladder.start": "0.125",
    "ladder.factor": "2.0",
    "ladder.count": "4",
    "scale.kind": "navier-stokes",
    "scale.lam": "0.5",
    "scale.alpha": "none",
    "liouville.m": "0.55",
    "liouville.gamma": "0.5",
    "liouville.compact_support": "false",
    "iterate.m": "0.55",
    "iterate.gamma": "0.5",
    "iterate.C": "1.0",
    "iterate.R": "2.0",
    "iterate.k_max": "400",
    "quadrature.n_space": "32",
    "quadrature.n_time": "16",
    "quadrature.n_radial": "64",
    "quadrature.graded_levels": "28",
    "quadrature.radial_rule": "exact",
    "quadrature.time_rule": "exact",
    "run.tolerance": "1e-9",
    "run.threads": "1",
}


class ConfigError(CylscaleError):
    """Invalid or missing configuration entry."""


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _coerce(raw: str):
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    if low == "none":
        return None
    try:
        return int(raw)
    except ValueError:
        pass
    if "/" in raw:
        try:
            return Fraction(raw)
        except ValueError:
            pass
    try:
        return float(raw)
    except ValueError:
        return raw


class RunConfig:
    def __init__(self, entries: dict, tolerance=None, threads=None):
        merged = dict(DEFAULTS)
        merged.update(entries)
        self.entries = merged
        if tolerance is not None:
            self.entries["run.tolerance"] = repr(tolerance)
        if threads is not None:
            self.entries["run.threads"] = str(threads)
        tol = self.get("run.tolerance")
        if not tol > 0:
            raise ConfigError("run.tolerance must be positive")

    def get(self, key: str):
        if key not in self.entries:
            raise ConfigError(f"missing config field {key!r}")
        return _coerce(self.entries[key])

    @property
    def tolerance(self) -> float:
        return float(self.get("run.tolerance"))

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(
            n_space=int(self.get("quadrature.n_space")),
            n_time=int(self.get("quadrature.n_time")),
            n_radial=int(self.get("quadrature.n_radial")),
            graded_levels=int(self.get("quadrature.graded_levels")),
            radial_rule=str(self.get("quadrature.radial_rule")),
            time_rule=str(self.get("quadrature.time_rule")),
        )

    def profile(self):
        kind = self.get("profile.kind")
        if kind == "power-law":
            return fl.PowerLawProfile(
                c=float(self.get("profile.c")),
                alpha_p=float(self.get("profile.alpha_p")),
                gamma_p=float(self.get("profile.gamma_p")),
                pressure_coeff=float(self.get("profile.pressure_coeff")),
            )
        if kind == "constant":
            return fl.ConstantProfile((float(self.get("profile.c")), 0.0, 0.0))
        if kind == "shear":
            return fl.SteadyShearProfile(
                amplitude=float(self.get("profile.amplitude")),
                wavenumber=float(self.get("profile.wavenumber")),
            )
        raise ConfigError(f"unknown profile.kind {kind!r}")

    def ladder(self):
        start = float(self.get("ladder.start"))
        factor = float(self.get("ladder.factor"))
        count = int(self.get("ladder.count"))
        if start <= 0 or factor <= 1 or count < 1:
            raise ConfigError("ladder needs start > 0, factor > 1, count >= 1")
        return [start * factor**j for j in range(count)]

    def provenance(self) -> dict:
        q = self.quadrature()
        return {
            "tolerance": self.tolerance,
            "quadrature": {
                "n_space": q.n_space,
                "n_time": q.n_time,
                "n_radial": q.n_radial,
                "graded_levels": q.graded_levels,
                "radial_rule": q.radial_rule,
                "time_rule": q.time_rule,
            },
        }


# ---------------------------------------------------------------------------
# emitters


def _num(v):
    """JSON-safe rendering preserving exactness where it exists."""
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    return float(v)


def write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _emit(outdir: Path, stem: str, fmt: str, header, rows, payload: dict) -> None:
    if fmt in ("csv", "both"):
        write_csv(outdir / f"{stem}.csv", header, rows)
    if fmt in ("json", "both"):
        write_json(outdir / f"{stem}.json", payload)


# ---------------------------------------------------------------------------
# subcommands


def cmd_exponents(cfg: RunConfig, outdir: Path, fmt: str) -> int:
    s, l, m0 = cfg.get("exponents.s"), cfg.get("exponents.l"), cfg.get("exponents.m0")
    p = ex.derive(s, l, m0)
    record = {
        "s": _num(p.s), "l": _num(p.l), "m0": _num(p.m0),
        "kappa": _num(p.kappa), "q_interp": _num(p.q_interp),
        "alpha": _num(p.alpha), "m": _num(p.m), "m1": _num(p.m1),
        "gamma_profile": _num(p.gamma_profile),
        "strong_admissible": p.strong_admissible,
        "weak_admissible": p.weak_admissible,
        "positive_window": p.positive_window,
        "scenario_ordered": p.scenario_ordered,
        "m0_lower_bound": _num(p.m0_lower_bound),
        "provenance": cfg.provenance(),
    }
    header = ("s", "l", "m0", "kappa", "q_interp", "alpha", "m", "m1",
              "gamma_profile", "strong_admissible", "m0_lower_bound")
    row = [float(p.s), float(p.l), float(p.m0), float(p.kappa),
           float(p.q_interp), float(p.alpha), float(p.m), float(p.m1),
           float(p.gamma_profile), p.strong_admissible,
           float(p.m0_lower_bound)]
    _emit(outdir, "exponents", fmt, header, [row], record)
    return EXIT_OK


def cmd_construct(cfg: RunConfig, outdir: Path, fmt: str) -> int:
    m0 = cfg.get("construct.m0")
    alpha = cfg.get("construct.alpha")
    delta = cfg.entries.get("construct.delta")
    delta = _coerce(delta) if delta is not None else None
    con = ex.construct_profile_exponents(m0, alpha, delta)
    record = {
        "m0": _num(con.m0), "alpha": _num(con.alpha_profile),
        "delta": _num(con.delta),
        "delta_interval": None if con.delta_interval is None
        else [_num(con.delta_interval[0]), _num(con.delta_interval[1])],
        "s": _num(con.s), "l": _num(con.l), "gamma": _num(con.gamma),
        "kappa": _num(con.kappa),
        "certificate": _num(con.exponent_certificate),
        "integrable": con.integrable,
        "strong_admissible": con.strong_admissible,
        "branch": con.branch,
        "edge_check": con.edge_check,
        "provenance": cfg.provenance(),
    }
    header = ("m0", "alpha", "delta", "s", "l", "gamma", "certificate", "branch")
    row = [float(con.m0), float(con.alpha_profile),
           None if con.delta is None else float(con.delta),
           float(con.s), float(con.l), float(con.gamma),
           float(con.exponent_certificate), con.branch]
    _emit(outdir, "construct", fmt, header, [row], record)
    return EXIT_OK


def cmd_quantities(cfg: RunConfig, outdir: Path, fmt: str) -> int:
    params = ex.derive(cfg.get("exponents.s"), cfg.get("exponents.l"),
                       cfg.get("exponents.m0"))
    profile = cfg.profile()
    report = qt.quantity_report(profile, cfg.ladder(), params, cfg.quadrature())
    rows = list(report.to_csv_rows())
    payload = {
        "rows": [dict(zip(qt.QuantityReport.CSV_COLUMNS, [_num(v) for v in r]))
                 for r in rows],
        "type1_sup": report.type1_sup,
        "provenance": cfg.provenance(),
    }
    _emit(outdir, "quantities", fmt, qt.QuantityReport.CSV_COLUMNS, rows, payload)
    return EXIT_OK


def cmd_scale_check(cfg: RunConfig, outdir: Path, fmt: str) -> int:
    params = ex.derive(cfg.get("exponents.s"), cfg.get("exponents.l"),
                       cfg.get("exponents.m0"))
    kind = cfg.get("scale.kind")
    alpha = cfg.get("scale.alpha")
    if kind == "euler" and alpha is None:
        alpha = float(params.alpha)
    spec = sc.ScalingSpec(kind=kind, lam=float(cfg.get("scale.lam")),
                          alpha=None if alpha is None else float(alpha))
    rows = sc.invariance_report(cfg.profile(), spec, params, cfg.ladder(),
                                cfg.quadrature(), tolerance=cfg.tolerance)
    csv_rows = [[r.relation, r.a, r.lhs, r.rhs, r.slack, r.tolerance, r.passed]
                for r in rows]
    payload = {
        "rows": [dict(zip(sc.INVARIANCE_COLUMNS, row)) for row in csv_rows],
        "all_pass": all(r.passed for r in rows),
        "provenance": cfg.provenance(),
    }
    _emit(outdir, "scale_check", fmt, sc.INVARIANCE_COLUMNS, csv_rows, payload)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_NUMERIC


def cmd_liouville(cfg: RunConfig, outdir: Path, fmt: str) -> int:
    m = float(cfg.get("liouville.m"))
    gamma = cfg.get("liouville.gamma")
    gamma = None if gamma is None else float(gamma)
    evidence = None
    if bool(cfg.get("liouville.compact_support")):
        # compact support makes every ladder-normalized mass decay
        evidence = True
    verdict = asy.liouville_verdict(m, gamma, evidence)
    payload = verdict.to_json_dict()
    payload["provenance"] = cfg.provenance()
    _emit(outdir, "liouville", fmt, ("verdict",), [[verdict.verdict]], payload)
    return EXIT_OK


def cmd_iterate(cfg: RunConfig, outdir: Path, fmt: str) -> int:
    params = asy.derive_iteration_params(
        float(cfg.get("iterate.m")), float(cfg.get("iterate.gamma")),
        C_force=float(cfg.get("iterate.C")),
    )
    trace = asy.iterate_bound(params, float(cfg.get("iterate.R")),
                              int(cfg.get("iterate.k_max")))
    rows = [[k, p, a, b] for k, p, a, b in zip(
        trace.ks, trace.profile_terms, trace.forcing_terms, trace.bounds)]
    payload = {
        "theta": params.theta, "beta": params.beta,
        "gamma": params.gamma, "gamma_max": params.gamma_max,
        "case_tag": trace.case_tag, "verdict": trace.verdict,
        "final_bound": trace.bounds[-1],
        "final_forcing": trace.forcing_terms[-1],
        "provenance": cfg.provenance(),
    }
    _emit(outdir, "iterate", fmt, asy.IterationTrace.CSV_COLUMNS, rows, payload)
    return EXIT_OK


def cmd_suite(cfg: RunConfig, outdir: Path, fmt: str) -> int:
    codes = [
        cmd_exponents(cfg, outdir, fmt),
        cmd_construct(cfg, outdir, fmt),
        cmd_quantities(cfg, outdir, fmt),
        cmd_scale_check(cfg, outdir, fmt),
        cmd_liouville(cfg, outdir, fmt),
        cmd_iterate(cfg, outdir, fmt),
    ]
    return max(codes)


def cmd_defaults(cfg: RunConfig, outdir: Path, fmt: str) -> int:
    for key in sorted(DEFAULTS):
        print(f"{key} = {DEFAULTS[key]}")
    return EXIT_OK


COMMANDS = {
    "exponents": cmd_exponents,
    "construct": cmd_construct,
    "quantities": cmd_quantities,
    "scale-check": cmd_scale_check,
    "liouville": cmd_liouville,
    "iterate": cmd_iterate,
    "suite": cmd_suite,
    "defaults": cmd_defaults,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cylscale",
        description="Exponent algebra, scaled energy quantities and "
        "iteration verdicts on parabolic cylinders.",
    )
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("overrides", nargs="*", metavar="key=value",
                    help="inline config overrides")
    ap.add_argument("--config", type=Path, default=None)
    ap.add_argument("--out", type=Path, default=None,
                    help=f"output directory (default ${OUT_ENV} or cwd)")
    ap.add_argument("--format", choices=("csv", "json", "both"), default="both")
    ap.add_argument("--tolerance", type=float, default=None)
    ap.add_argument("--threads", type=int, default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        entries = {}
        if args.config is not None:
            if not args.config.exists():
                raise ConfigError(f"config file not found: {args.config}")
            entries.update(parse_config_text(args.config.read_text()))
        for item in args.overrides:
            if "=" not in item:
                raise ConfigError(f"override must be key=value, got {item!r}")
            key, val = item.split("=", 1)
            entries[key.strip()] = val.strip()
        cfg = RunConfig(entries, tolerance=args.tolerance, threads=args.threads)
        outdir = args.out or Path(os.environ.get(OUT_ENV, "."))
        outdir.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, outdir, args.format)
    except (CylscaleError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
