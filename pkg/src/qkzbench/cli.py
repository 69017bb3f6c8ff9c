"""Command-line front end: flat-text configs, check orchestration, reports.

Config files are flat ``key = value`` text with ``[a, b, c]`` lists and no
nesting; rationals are written ``p/q``.  Keys: model, N, n, eta, hbar, x
(rational flavor) or u, t, h (trigonometric flavor), g, seed, tol, mode.

Exit codes: 0 every check passed, 1 at least one failed, 2 config error.
"""
from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import chain, correspond, rmatrix, verify
from .chain import ModelConfig
from .errors import (
    FlavorMismatch,
    NeedsFloat,
    NonPositiveTolerance,
    ParseError,
    WorkbenchError,
)
from .report import CheckResult, error_result
from .scalars import EXACT, ComplexDomain
from .tensor import all_sectors

CHECK_NAMES = (
    "ybe",
    "unitarity",
    "twist-commute",
    "transfer-commute",
    "pole-expansion",
    "sum-rule",
    "qkz-compat",
    "omega",
    "k-projection",
    "proposition-higher",
    "det-identity",
    "symmetric-identity",
    "macdonald-eigenvalue",
    "correspondence",
)

_RATIONAL_ONLY = {"det-identity", "symmetric-identity"}


@dataclass
class RunConfig:
    model: ModelConfig
    checks: list
    sectors: object  # "all" or list of weight tuples
    tol: float = 1e-10
    fmt: str = "text"
    seed: int = 0
    mode: str = "exact"


@dataclass
class RunReport:
    config: dict
    results: list = field(default_factory=list)
    timings: list = field(default_factory=list)  # millis, parallel to results

    @property
    def overall(self):
        # an empty check list passes vacuously
        return "pass" if all(r.passed for r in self.results) else "fail"


# ------------------------------------------------------------------- parsing

_SCALAR_KEYS = {"eta", "hbar", "t", "h"}
_LIST_KEYS = {"x", "u", "g"}
_INT_KEYS = {"N", "n", "seed"}


def _parse_value(key, text, line):
    try:
        if key in _INT_KEYS:
            return int(text)
        if key == "tol":
            return float(text)
        if key in ("model", "mode"):
            return text
        if key in _SCALAR_KEYS:
            return Fraction(text)
        if key in _LIST_KEYS:
            body = text.strip()
            if not (body.startswith("[") and body.endswith("]")):
                raise ValueError("expected a [ ... ] list")
            inner = body[1:-1].strip()
            if not inner:
                return []
            return [Fraction(part.strip()) for part in inner.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad value for {key!r}: {exc}", line=line) from None
    raise ParseError(f"unknown key {key!r}", line=line)


def load_config(path):
    """Parse and validate a flat key = value config file into a RunConfig."""
    raw = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ParseError("expected 'key = value'", line=lineno)
            key, _, value = body.partition("=")
            key, value = key.strip(), value.strip()
            if key in raw:
                raise ParseError(f"duplicate key {key!r}", line=lineno)
            raw[key] = _parse_value(key, value, lineno)

    def need(key):
        if key not in raw:
            raise ParseError(f"missing key {key!r}")
        return raw[key]

    model = need("model")
    if model not in (chain.RATIONAL, chain.TRIGONOMETRIC):
        raise ParseError(f"model must be rational or trigonometric, got {model!r}")
    N, n = need("N"), need("n")
    g = need("g")
    tol = raw.get("tol", 1e-10)
    if tol <= 0:
        raise NonPositiveTolerance(f"tol must be positive, got {tol}")
    mode = raw.get("mode", "exact")
    if mode not in ("exact", "float"):
        raise ParseError(f"mode must be exact or float, got {mode!r}")
    if model == chain.RATIONAL:
        cfg = ModelConfig.rational(N, n, need("eta"), need("hbar"), need("x"), g)
    else:
        cfg = ModelConfig.trigonometric(N, n, need("t"), need("h"), need("u"), g)
    return RunConfig(
        model=cfg,
        checks=["all"],
        sectors="all",
        tol=tol,
        seed=raw.get("seed", 0),
        mode=mode,
    )


def parse_sector(text, N, n):
    parts = [p for p in text.replace(" ", "").split(",") if p]
    try:
        sector = tuple(int(p) for p in parts)
    except ValueError:
        raise ParseError(f"bad sector {text!r}") from None
    if len(sector) != N or any(m < 0 for m in sector) or sum(sector) != n:
        raise ParseError(f"sector {sector} is not a weight of {n} sites, {N} colors")
    return sector


# ------------------------------------------------------------ check registry

def _draw_rational(rng, nonzero=False):
    while True:
        v = Fraction(rng.randint(-12, 12), rng.randint(1, 9))
        if not nonzero or v != 0:
            return v


def _draw_spectral(cfg, rng):
    """A generic spectral sample away from the flavor's poles."""
    while True:
        v = _draw_rational(rng)
        if cfg.is_rational:
            if v + cfg.eta != 0:
                return cfg.domain.coerce(v)
        else:
            if v != 0 and v * v * cfg.t * cfg.t != 1 and v * v != 1:
                return cfg.domain.coerce(v)


def _merge(name, results):
    """Collapse several sampled instances of one check into one result."""
    worst = max(results, key=lambda r: (not r.passed, r.residual))
    return CheckResult(
        name=name,
        status="pass" if all(r.passed for r in results) else "fail",
        residual=worst.residual,
        params={"samples": len(results)},
        witness=worst.witness,
    )


def _check_ybe(cfg, sectors, rc, rng):
    out = []
    while len(out) < 3:
        p1 = _draw_spectral(cfg, rng)
        p2 = _draw_spectral(cfg, rng)
        if cfg.is_rational:
            ok = p1 - p2 + cfg.eta != 0 and p1 != p2
        else:
            r = p1 / p2
            ok = r * r != 1 and r * r * cfg.t * cfg.t != 1
        if not ok:
            continue
        coupling = cfg.eta if cfg.is_rational else cfg.t
        out.append(
            rmatrix.check_yang_baxter(cfg.flavor, p1, p2, coupling, cfg.N, cfg.domain)
        )
    return [_merge("ybe", out)]


def _check_unitarity(cfg, sectors, rc, rng):
    coupling = cfg.eta if cfg.is_rational else cfg.t
    out = []
    while len(out) < 3:
        p = _draw_spectral(cfg, rng)
        if cfg.is_rational and p - cfg.eta == 0:
            continue  # the reversed factor would sit on a pole
        if not cfg.is_rational:
            inv = 1 / p
            if inv * inv * cfg.t * cfg.t == 1:
                continue
        out.append(rmatrix.check_unitarity(cfg.flavor, p, coupling, cfg.N, cfg.domain))
    return [_merge("unitarity", out)]


def _check_twist(cfg, sectors, rc, rng):
    coupling = cfg.eta if cfg.is_rational else cfg.t
    p = _draw_spectral(cfg, rng)
    return [
        rmatrix.check_twist_commutation(
            cfg.flavor, p, coupling, cfg.g, cfg.N, cfg.domain
        )
    ]


def _check_transfer_commute(cfg, sectors, rc, rng):
    return [chain.check_transfer_commute(cfg)]


def _check_pole_expansion(cfg, sectors, rc, rng):
    try:
        chain.pole_expansion(cfg)
    except WorkbenchError as exc:
        return [error_result("pole-expansion", exc)]
    zero = cfg.domain.residual(cfg.domain.zero, cfg.domain.zero)
    return [CheckResult("pole-expansion", "pass", zero)]


def _check_sum_rule(cfg, sectors, rc, rng):
    return [chain.sum_rule(cfg)]


def _check_qkz_compat(cfg, sectors, rc, rng):
    out = []
    for i in range(1, cfg.n + 1):
        for j in range(i + 1, cfg.n + 1):
            out.append(chain.qkz_compatibility(cfg, i, j))
    return out


def _check_omega(cfg, sectors, rc, rng):
    return [verify.check_omega_invariance(cfg)]


def _check_k_projection(cfg, sectors, rc, rng):
    return [verify.check_k_projection(cfg, i) for i in range(1, cfg.n + 1)]


def _check_proposition(cfg, sectors, rc, rng):
    out = []
    for d in range(1, cfg.n + 1):
        for sites in itertools.combinations(range(1, cfg.n + 1), d):
            out.append(verify.check_proposition_higher(cfg, sites))
    return out


def _check_det_identity(cfg, sectors, rc, rng):
    return [verify.check_det_identity(cfg, M) for M in sectors]


def _check_symmetric(cfg, sectors, rc, rng):
    return [
        verify.check_symmetric_identity(cfg, M, d)
        for M in sectors
        for d in range(1, cfg.n + 1)
    ]


def _check_macdonald(cfg, sectors, rc, rng):
    degrees = range(1, cfg.n + 1) if cfg.is_rational else (1,)
    return [
        verify.check_macdonald_eigenvalue(cfg, M, d) for M in sectors for d in degrees
    ]


def _check_correspondence(cfg, sectors, rc, rng):
    if rc.mode == "exact":
        raise NeedsFloat(
            "correspondence needs the eigensolver backend; set mode = float "
            "or use the correspond subcommand"
        )
    out = []
    for M in sectors:
        # operators are always built from the exact parameters; floats enter
        # only at the eigensolver boundary
        rep = correspond.check_correspondence(rc.model, M, tol=rc.tol, rng=rng)
        out.append(
            CheckResult(
                name="correspondence",
                status=rep.status,
                residual=rep.worst,
                sector=rep.sector,
                params={"eigenstates": len(rep.rows)},
            )
        )
    return out


_REGISTRY = {
    "ybe": _check_ybe,
    "unitarity": _check_unitarity,
    "twist-commute": _check_twist,
    "transfer-commute": _check_transfer_commute,
    "pole-expansion": _check_pole_expansion,
    "sum-rule": _check_sum_rule,
    "qkz-compat": _check_qkz_compat,
    "omega": _check_omega,
    "k-projection": _check_k_projection,
    "proposition-higher": _check_proposition,
    "det-identity": _check_det_identity,
    "symmetric-identity": _check_symmetric,
    "macdonald-eigenvalue": _check_macdonald,
    "correspondence": _check_correspondence,
}


def _applicable_checks(rc):
    """Expansion of "all": every check that can run on this flavor and mode."""
    names = []
    for name in CHECK_NAMES:
        if name in _RATIONAL_ONLY and not rc.model.is_rational:
            continue
        if name == "correspondence" and rc.mode == "exact":
            continue
        names.append(name)
    return names


def run(rc: RunConfig) -> RunReport:
    """Dispatch the selected checks; deterministic for a fixed seed.

    Module errors become failed CheckResults, never mid-suite aborts.
    """
    rng = random.Random(rc.seed)
    cfg = rc.model
    if rc.mode == "float":
        cfg = cfg.to_domain(ComplexDomain(rc.tol))
    sectors = all_sectors(cfg.N, cfg.n) if rc.sectors == "all" else list(rc.sectors)
    names = []
    for name in rc.checks:
        if name == "all":
            names.extend(_applicable_checks(rc))
        elif name in _REGISTRY:
            names.append(name)
        else:
            raise ParseError(f"unknown check {name!r}; known: {', '.join(CHECK_NAMES)}")
    report = RunReport(config=_describe_run(rc))
    for name in names:
        t0 = time.perf_counter()
        try:
            results = _REGISTRY[name](cfg, sectors, rc, rng)
        except WorkbenchError as exc:
            results = [error_result(name, exc)]
        millis = (time.perf_counter() - t0) * 1000.0
        for r in results:
            report.results.append(r)
            report.timings.append(millis / max(1, len(results)))
    return report


def _describe_run(rc):
    d = rc.model.describe()
    d["seed"] = rc.seed
    d["tol"] = rc.tol
    d["mode"] = rc.mode
    d["checks"] = list(rc.checks)
    d["sectors"] = (
        "all" if rc.sectors == "all" else [list(s) for s in rc.sectors]
    )
    return d


# ------------------------------------------------------------------ emitting

def _encode_residual(r):
    if r is None:
        return None
    if isinstance(r, Fraction):
        return str(r)
    return float(r)


def _result_to_dict(r, millis=None):
    d = {
        "name": r.name,
        "sector": list(r.sector) if r.sector is not None else None,
        "status": r.status,
        "residual": _encode_residual(r.residual),
    }
    if r.params:
        d["params"] = {k: _json_safe(v) for k, v in r.params.items()}
    if r.witness is not None:
        d["witness"] = _json_safe(r.witness)
    if millis is not None:
        d["millis"] = round(millis, 3)
    return d


def _json_safe(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _json_safe(x) for k, x in v.items()}
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    return str(v)


def emit(report: RunReport, fmt: str = "text", timings: bool = False) -> str:
    """Render a report; json output is byte-stable for a fixed config and seed
    (per-check wall-clock appears only when timings is requested)."""
    overall = "pass" if all(r.passed for r in report.results) else "fail"
    if fmt == "json":
        doc = {
            "config": report.config,
            "results": [
                _result_to_dict(r, m if timings else None)
                for r, m in zip(report.results, report.timings)
            ],
            "overall": overall,
        }
        return json.dumps(doc, indent=2)
    lines = []
    header = (
        f"{'check':<22} {'sector':<10} {'params':<16} {'status':<7} "
        f"{'residual':<13} ms"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for r, m in zip(report.results, report.timings):
        sector = ",".join(str(x) for x in r.sector) if r.sector else "-"
        params = ",".join(f"{k}={_compact(v)}" for k, v in r.params.items()) or "-"
        if r.residual is None:
            res = "-"
        elif isinstance(r.residual, Fraction):
            res = str(r.residual) if r.residual == 0 else f"{float(r.residual):.3e}"
        else:
            res = f"{float(r.residual):.3e}"
        lines.append(
            f"{r.name:<22} {sector:<10} {params:<16} {r.status:<7} "
            f"{res:<13} {m:8.1f}"
        )
        if r.witness is not None:
            lines.append(f"    witness: {r.witness}")
    lines.append(f"overall: {overall}")
    return "\n".join(lines)


def _compact(v):
    if isinstance(v, (list, tuple)):
        return "/".join(str(x) for x in v)
    return str(v)


# ----------------------------------------------------------------- commands

def _float_fmt(z):
    return [z.real, z.imag]


def _cmd_verify(args):
    rc = load_config(args.config)
    if args.check:
        rc.checks = list(args.check)
    if args.sector:
        rc.sectors = [parse_sector(s, rc.model.N, rc.model.n) for s in args.sector]
    if args.tol is not None:
        if args.tol <= 0:
            raise NonPositiveTolerance(f"tol must be positive, got {args.tol}")
        rc.tol = args.tol
    if args.seed is not None:
        rc.seed = args.seed
    rc.fmt = args.format
    report = run(rc)
    print(emit(report, rc.fmt, timings=args.timings))
    return 0 if all(r.passed for r in report.results) else 1


def _cmd_spectrum(args):
    rc = load_config(args.config)
    seed = args.seed if args.seed is not None else rc.seed
    rng = random.Random(seed)
    sectors = (
        [parse_sector(s, rc.model.N, rc.model.n) for s in args.sector]
        if args.sector
        else all_sectors(rc.model.N, rc.model.n)
    )
    doc = {"config": _describe_run(rc), "sectors": []}
    for M in sectors:
        states = correspond.diagonalize_sector(rc.model, M, tol=rc.tol, rng=rng)
        doc["sectors"].append(
            {
                "sector": list(M),
                "states": [
                    {
                        "eigenvalues": [_float_fmt(l) for l in st.eigenvalues],
                        "residuals": st.residuals,
                    }
                    for st in states
                ],
            }
        )
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_correspond(args):
    rc = load_config(args.config)
    seed = args.seed if args.seed is not None else rc.seed
    rng = random.Random(seed)
    tol = args.tol if args.tol is not None else 1e-8
    sectors = (
        [parse_sector(s, rc.model.N, rc.model.n) for s in args.sector]
        if args.sector
        else all_sectors(rc.model.N, rc.model.n)
    )
    doc = {"config": _describe_run(rc), "sectors": []}
    ok = True
    for M in sectors:
        rep = correspond.check_correspondence(rc.model, M, tol=tol, rng=rng)
        ok = ok and rep.passed
        doc["sectors"].append(
            {
                "sector": list(M),
                "status": rep.status,
                "worst": rep.worst,
                "rows": [
                    {
                        "eigenvalues": [_float_fmt(z) for z in row.eigenvalues],
                        "velocities": [_float_fmt(z) for z in row.velocities],
                        "lax_spectrum": [_float_fmt(z) for z in row.lax_spectrum],
                        "target": [_float_fmt(z) for z in row.target],
                        "invariants": [_float_fmt(z) for z in row.invariants],
                        "match_distance": row.match_distance,
                        "hamiltonian_deviation": row.hamiltonian_deviation,
                    }
                    for row in rep.rows
                ],
            }
        )
    doc["overall"] = "pass" if ok else "fail"
    print(json.dumps(doc, indent=2))
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="workbench",
        description="Machine-check the operator identities of twisted "
        "inhomogeneous spin chains and their spectral correspondence.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run identity checks from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--check", action="append", metavar="NAME",
                   help=f"one of: all, {', '.join(CHECK_NAMES)}")
    p.add_argument("--sector", action="append", metavar="M1,M2,...")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--timings", action="store_true",
                   help="include per-check wall clock in json output")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("spectrum", help="joint sector spectra of the Hamiltonians")
    p.add_argument("--config", required=True)
    p.add_argument("--sector", action="append", metavar="M1,M2,...")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("correspond", help="Lax spectra against their targets")
    p.add_argument("--config", required=True)
    p.add_argument("--sector", action="append", metavar="M1,M2,...")
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_correspond)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, NonPositiveTolerance, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except WorkbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
