"""Command-line interface.

Subcommands: classify, vacua, solve, orbit-check, energy, sumrules,
profile, sweep, count-general.  Parameters come from flags and/or a
``key = value`` config file (``--config``); flags win.  Exit status is 0
on success, 1 on validation errors and 2 on numerical failures.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .bps_solver import IntegrationOptions, KinkTrajectory, box_for, integrate_kink
from .energy_analysis import (
    DEFAULT_THETA,
    DEFAULT_WINDOW,
    FAMILIES,
    FamilyLabel,
    check_sum_rules,
    classify_stability,
    closed_form_energies,
    energy_profile,
    euler_lagrange_residual,
    family_member,
    rule4_path_variant,
    trajectory_energy_numeric,
)
from .errors import KinkError, NumericalError, ValidationError
from .model_core import EllipticPoint, ModelParams, Regime, classify_regime, is_regime_boundary
from .orbit_quadratures import CONTACT_FLOOR, piece_invariant_drift, trajectory_invariants
from .superpotential import SignSector
from .vacua import GeneralModelSpec, count_vacua_general, count_vacua_single_alpha, enumerate_vacua

PROFILE_HEADER = ("x", "eps", "lambda1", "lambda2", "lambda3", "phi1", "phi2", "phi3")
SUM_RULE_TOL = 1e-12
NUMERIC_ENERGY_TOL = 1e-4
EL_TOL = 1e-5
GAMMA_TOL = 1e-6


def fmt(v: float) -> str:
    """17 significant digits, '.' decimal; nan/inf spelled out."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def fmt_text(v: float) -> str:
    """Shortest round-trip form, used in structured-text reports."""
    v = float(v)
    return fmt(v) if not math.isfinite(v) else repr(v)


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class RunConfig:
    sigma2_sq: float | None = None
    sigma3_sq: float | None = None
    alpha_bar_sq: float | None = None
    delta0: float = 1e-6
    rtol: float = 1e-12
    atol: float = 1e-14
    tol_vac: float = 1e-8
    x_cap: float = 200.0
    dx: float = 0.02
    theta: float = DEFAULT_THETA
    window: int = DEFAULT_WINDOW
    output: str | None = None
    format: str = "structured-text"

    def __post_init__(self) -> None:
        for name in ("delta0", "rtol", "atol", "tol_vac", "x_cap", "dx", "theta"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        if self.window < 1:
            raise ValidationError("window must be at least 1")
        if self.format not in ("csv", "structured-text"):
            raise ValidationError("format must be csv or structured-text")

    @property
    def params(self) -> ModelParams:
        missing = [n for n in ("sigma2_sq", "sigma3_sq", "alpha_bar_sq") if getattr(self, n) is None]
        if missing:
            raise ValidationError(f"missing parameter(s): {', '.join(missing)}")
        return ModelParams(self.sigma2_sq, self.sigma3_sq, self.alpha_bar_sq)

    @property
    def options(self) -> IntegrationOptions:
        return IntegrationOptions(delta0=self.delta0, rtol=self.rtol, atol=self.atol, tol_vac=self.tol_vac, x_cap=self.x_cap)


_CONFIG_FIELDS = {f.name: f for f in fields(RunConfig)}


def _coerce(name: str, text: str):
    kind = _CONFIG_FIELDS[name].type
    try:
        if "int" in str(kind):
            return int(text)
        if "float" in str(kind):
            return float(text)
    except ValueError:
        raise ValidationError(f"config key {name}: cannot parse {text!r}") from None
    return text


def read_config_file(path: str | Path) -> dict[str, object]:
    """Parse a ``key = value`` file with ``#`` comments into config fields."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from None
    parser = configparser.ConfigParser(comment_prefixes=("#",), inline_comment_prefixes=("#",), delimiters=("=",))
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ValidationError(f"invalid config file {path}: {exc}") from None
    out: dict[str, object] = {}
    for key, value in parser["run"].items():
        name = key.strip().replace("-", "_")
        if name not in _CONFIG_FIELDS:
            raise ValidationError(f"unknown config key {key!r}")
        out[name] = _coerce(name, value.strip())
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, object] = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for name in _CONFIG_FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    return RunConfig(**values)


# ---------------------------------------------------------------------------
# Structured text


class Report:
    """Sectioned ``key = value`` text; tolerances ride along as ``key.tol``."""

    def __init__(self) -> None:
        self.lines: list[str] = []

    def section(self, name: str) -> None:
        if self.lines:
            self.lines.append("")
        self.lines.append(f"[{name}]")

    def put(self, key: str, value, tol: float | None = None) -> None:
        if isinstance(value, (float, np.floating)):
            value = fmt_text(value)
        self.lines.append(f"{key} = {value}")
        if tol is not None:
            self.lines.append(f"{key}.tol = {fmt_text(tol)}")

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


@dataclass
class ReportBundle:
    """Machine-readable record of one parameter point."""

    params: ModelParams
    regime: Regime
    vacua: list[tuple[str, tuple[float, float, float], str, int]] = field(default_factory=list)
    energies: dict[str, tuple[float, float, float]] = field(default_factory=dict)
    sum_rules: list[tuple[str, float]] = field(default_factory=list)
    stability: dict[str, tuple[str, bool]] = field(default_factory=dict)
    lumps: dict[str, int] = field(default_factory=dict)
    gammas: dict[str, tuple[float, float, float]] = field(default_factory=dict)

    def render(self) -> str:
        r = Report()
        r.section("params")
        r.put("sigma2_sq", self.params.sigma2_sq)
        r.put("sigma3_sq", self.params.sigma3_sq)
        r.put("alpha_bar_sq", self.params.alpha_bar_sq)
        r.put("regime", self.regime.value)
        if self.vacua:
            r.section("vacua")
            for name, lam, stab, size in self.vacua:
                r.put(f"{name}.lambda", " ".join(fmt_text(v) for v in lam))
                r.put(f"{name}.stabilizer", stab)
                r.put(f"{name}.orbit_size", size)
        if self.energies:
            r.section("energies")
            for name, (closed, itin, num) in self.energies.items():
                r.put(f"{name}.closed_form", closed)
                r.put(f"{name}.itinerary", itin)
                r.put(f"{name}.numeric", num)
                r.put(f"{name}.relative_gap", abs(num - closed) / abs(closed), NUMERIC_ENERGY_TOL)
        if self.sum_rules:
            r.section("sum_rules")
            for rid, res in self.sum_rules:
                r.put(f"{rid}.residual", res, SUM_RULE_TOL)
        if self.stability:
            r.section("stability")
            for name, (tag, expected) in self.stability.items():
                r.put(f"{name}.verdict", tag)
                r.put(f"{name}.expected_stable", str(expected).lower())
        if self.lumps:
            r.section("lumps")
            for name, n in self.lumps.items():
                r.put(f"{name}.count", n)
        if self.gammas:
            r.section("orbit_constants")
            for name, g in self.gammas.items():
                r.put(f"{name}.gamma", " ".join(fmt_text(v) for v in g))
        return r.text()


# ---------------------------------------------------------------------------
# Output helpers


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def profile_rows(traj: KinkTrajectory, dx: float, theta: float = DEFAULT_THETA, window: int = DEFAULT_WINDOW):
    """(profile, rows) for the CSV export of a trajectory."""
    prof = energy_profile(traj, dx, theta, window)
    _, _, lam, phi = traj.resample(dx)
    rows = [(float(x), float(e), *map(float, l), *map(float, f)) for x, e, l, f in zip(prof.x, prof.eps, lam, phi)]
    return prof, rows


def write_profile_csv(traj: KinkTrajectory, path: str | None, dx: float = 0.02) -> float:
    """Write the profile CSV; returns the trapezoid energy of the written samples."""
    prof, rows = profile_rows(traj, dx)
    _emit(_csv_text(PROFILE_HEADER, rows), path)
    return prof.total


def read_profile_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Columns of a profile CSV as float arrays."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != PROFILE_HEADER:
            raise ValidationError(f"unexpected profile header {header}")
        data = np.array([[float(v) for v in row] for row in reader])
    return {name: data[:, k] for k, name in enumerate(header)}


def profile_energy(columns: dict[str, np.ndarray]) -> float:
    return float(np.trapezoid(columns["eps"], columns["x"]))


# ---------------------------------------------------------------------------
# Subcommands


def _trajectory(cfg: RunConfig, args) -> tuple[str, KinkTrajectory]:
    p = cfg.params
    if getattr(args, "family", None):
        label = FamilyLabel.parse(args.family)
        gamma = tuple(args.gamma) if getattr(args, "gamma", None) else None
        return label.value, family_member(label, p, args.member, gamma, cfg.options)
    if getattr(args, "start", None):
        lam = EllipticPoint(*args.start)
        sector = SignSector.parse(args.sector)
        return "custom", integrate_kink(lam, sector, p, cfg.options)
    raise ValidationError("give --family or --start")


def cmd_classify(cfg: RunConfig, args) -> int:
    print(classify_regime(cfg.params).value)
    return 0


def cmd_vacua(cfg: RunConfig, args) -> int:
    p = cfg.params
    vs = enumerate_vacua(p)
    if cfg.format == "csv":
        rows = []
        for v in vs.vacua:
            for q in v.cartesian_orbit:
                rows.append((v.name, *v.elliptic.as_array().tolist(), *q.as_array().tolist(), v.stabilizer))
        _emit(_csv_text(("name", "lambda1", "lambda2", "lambda3", "phi1", "phi2", "phi3", "stabilizer"), rows), cfg.output)
        return 0
    r = Report()
    r.section("regime")
    r.put("regime", vs.regime.value)
    r.put("cartesian_count", vs.cartesian_count)
    for v in vs.vacua:
        r.section(v.name)
        r.put("lambda", " ".join(fmt_text(x) for x in v.elliptic.as_array()))
        r.put("stabilizer", v.stabilizer)
        r.put("orbit_size", v.orbit_size)
        for k, q in enumerate(v.cartesian_orbit):
            r.put(f"phi.{k}", " ".join(fmt_text(x) for x in q.as_array()))
    _emit(r.text(), cfg.output)
    return 0


def cmd_solve(cfg: RunConfig, args) -> int:
    name, traj = _trajectory(cfg, args)
    if cfg.format == "csv":
        write_profile_csv(traj, cfg.output, cfg.dx)
        return 0
    r = Report()
    r.section("trajectory")
    r.put("name", name)
    r.put("complete", str(traj.complete).lower())
    r.put("start_vacuum", traj.start_vacuum.name if traj.start_vacuum else "none")
    r.put("end_vacuum", traj.end_vacuum.name if traj.end_vacuum else "none")
    r.put("x_start", float(traj.x[0]) if len(traj.x) else math.nan)
    r.put("x_end", float(traj.x[-1]) if len(traj.x) else math.nan)
    r.put("sub_box", traj.sub_box or "none")
    r.put("sectors", " ".join(str(s) for s in traj.sector_sequence()))
    r.put("box_exit", box_for(cfg.params).exit_distance(traj.lam), 1e-8)
    r.section("events")
    for k, ev in enumerate(traj.events):
        r.put(f"event.{k}", f"{fmt_text(ev.x)} {ev.tag()}")
    if traj.complete:
        ne = trajectory_energy_numeric(traj, dx=cfg.dx)
        r.section("energy")
        r.put("quadrature", ne.quadrature)
        r.put("superpotential", ne.superpotential)
        r.put("relative_gap", ne.relative_gap, NUMERIC_ENERGY_TOL)
        r.put("el_residual", euler_lagrange_residual(traj), EL_TOL)
    _emit(r.text(), cfg.output)
    return 0


def cmd_orbit_check(cfg: RunConfig, args) -> int:
    name, traj = _trajectory(cfg, args)
    inv = trajectory_invariants(traj)
    r = Report()
    r.section("orbit")
    r.put("name", name)
    k = len(inv) // 2
    r.put("gamma", " ".join(fmt_text(v) for v in inv[k]))
    r.put("contact_floor", CONTACT_FLOOR)
    worst = 0.0
    for j, d in enumerate(piece_invariant_drift(traj)):
        r.section(f"piece.{j}")
        r.put("x_range", f"{fmt_text(d.x_lo)} {fmt_text(d.x_hi)}")
        r.put("samples", d.samples)
        r.put("drift_gamma1", d.gamma1, GAMMA_TOL)
        r.put("drift_gamma2", d.gamma2, GAMMA_TOL)
        r.put("drift_gamma3", d.gamma3, GAMMA_TOL)
        worst = max(worst, d.worst)
    r.section("summary")
    r.put("max_drift", worst, GAMMA_TOL)
    r.put("pass", str(worst < GAMMA_TOL).lower())
    _emit(r.text(), cfg.output)
    return 0


def build_bundle(p: ModelParams, labels, opts: IntegrationOptions, dx: float, theta: float, window: int) -> ReportBundle:
    b = ReportBundle(p, classify_regime(p))
    for v in enumerate_vacua(p).vacua:
        b.vacua.append((v.name, tuple(v.elliptic.as_array().tolist()), v.stabilizer, v.orbit_size))
    closed = closed_form_energies(p)
    itin = closed_form_energies(p, "itinerary")
    numeric = {}
    for label in labels:
        traj = family_member(label, p, opts=opts)
        numeric[label] = trajectory_energy_numeric(traj, dx=dx).value
        b.energies[label.value] = (closed[label], itin[label], numeric[label])
        b.stability[label.value] = (classify_stability(traj).tag, FAMILIES[label].expected_stable)
        b.lumps[label.value] = energy_profile(traj, dx, theta, window).lump_count
        inv = trajectory_invariants(traj)
        b.gammas[label.value] = tuple(float(v) for v in inv[len(inv) // 2])
    b.sum_rules = [(s.rule_id, s.residual) for s in check_sum_rules(p)]
    return b


def cmd_energy(cfg: RunConfig, args) -> int:
    p = cfg.params
    labels = [FamilyLabel.parse(f) for f in args.family] if args.family else list(FamilyLabel)
    _emit(build_bundle(p, labels, cfg.options, cfg.dx, cfg.theta, cfg.window).render(), cfg.output)
    return 0


def cmd_sumrules(cfg: RunConfig, args) -> int:
    p = cfg.params
    r = Report()
    r.section("closed_form")
    for s in check_sum_rules(p):
        r.put(f"{s.rule_id}.lhs", s.lhs)
        r.put(f"{s.rule_id}.rhs", s.rhs)
        r.put(f"{s.rule_id}.residual", s.residual, SUM_RULE_TOL)
    if args.numeric:
        from .energy_analysis import numeric_energies

        E = numeric_energies(p, opts=cfg.options)
        r.section("numeric")
        for s in check_sum_rules(p, E):
            r.put(f"{s.rule_id}.relative_residual", s.relative_residual, NUMERIC_ENERGY_TOL)
        v = rule4_path_variant(E)
        r.put(f"{v.rule_id}.relative_residual", v.relative_residual, NUMERIC_ENERGY_TOL)
    _emit(r.text(), cfg.output)
    return 0


def cmd_profile(cfg: RunConfig, args) -> int:
    _, traj = _trajectory(cfg, args)
    total = write_profile_csv(traj, cfg.output, cfg.dx)
    if cfg.output:
        print(f"energy = {fmt_text(total)}")
    return 0


SWEEP_HEADER = ("sigma2_sq", "sigma3_sq", "alpha_bar_sq", "status", "regime", "cartesian_vacua", "max_sum_rule_residual", "message")


def _grid_axis(spec: str | None, fixed: float | None, name: str) -> list[float]:
    if spec is None:
        if fixed is None:
            raise ValidationError(f"sweep needs --{name.replace('_', '-')} or --{name.replace('_', '-')}-grid")
        return [fixed]
    try:
        lo, hi, n = spec.split(",")
        n = int(n)
        lo, hi = float(lo), float(hi)
    except ValueError:
        raise ValidationError(f"grid spec {spec!r} must be lo,hi,n") from None
    if n < 1:
        raise ValidationError("grid axis needs at least one point")
    return np.linspace(lo, hi, n).tolist() if n > 1 else [lo]


def sweep_point(point: tuple[float, float, float]) -> tuple:
    """One sweep row; failures are captured in the row, never raised."""
    s2, s3, ab = point
    try:
        p = ModelParams(s2, s3, ab)
    except KinkError as exc:
        return (s2, s3, ab, "invalid", "", "", "", str(exc))
    regime = classify_regime(p)
    status = "degenerate" if is_regime_boundary(p) else "ok"
    try:
        count = enumerate_vacua(p).cartesian_count
        resid = ""
        if regime is Regime.H1:
            resid = max(s.residual for s in check_sum_rules(p))
        return (s2, s3, ab, status, regime.value, count, resid, "")
    except KinkError as exc:
        return (s2, s3, ab, "error", regime.value, "", "", str(exc))


def sweep_threads() -> int:
    env = os.environ.get("KINK_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValidationError("KINK_THREADS must be a positive integer") from None
        if n < 1:
            raise ValidationError("KINK_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def run_sweep(points: list[tuple[float, float, float]]) -> list[tuple]:
    if not points:
        raise ValidationError("empty sweep grid")
    workers = min(sweep_threads(), len(points))
    if workers == 1:
        return [sweep_point(q) for q in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(sweep_point, points))


def cmd_sweep(cfg: RunConfig, args) -> int:
    a2 = _grid_axis(args.sigma2_sq_grid, cfg.sigma2_sq, "sigma2_sq")
    a3 = _grid_axis(args.sigma3_sq_grid, cfg.sigma3_sq, "sigma3_sq")
    ab = _grid_axis(args.alpha_bar_sq_grid, cfg.alpha_bar_sq, "alpha_bar_sq")
    points = [(x, y, z) for x in a2 for y in a3 for z in ab]
    rows = run_sweep(points)
    _emit(_csv_text(SWEEP_HEADER, rows), cfg.output)
    return 0


def _parse_holes(items: list[str] | None, N: int) -> tuple[tuple[float, ...], ...]:
    holes: list[list[float]] = [[] for _ in range(N)]
    for item in items or []:
        try:
            j, v = item.split(":")
            holes[int(j) - 1].append(float(v))
        except (ValueError, IndexError):
            raise ValidationError(f"hole {item!r} must be j:value with 1 <= j <= N") from None
    return tuple(tuple(h) for h in holes)


def cmd_count_general(cfg: RunConfig, args) -> int:
    N = args.N
    if args.single_hole is not None:
        spec = GeneralModelSpec.single_hole(N, args.single_hole)
    else:
        sb = tuple(args.sigma_bar_sq) if args.sigma_bar_sq else tuple(1.0 - k / N for k in range(1, N))
        spec = GeneralModelSpec(N, sb, _parse_holes(args.hole, N))
    res = count_vacua_general(spec)
    r = Report()
    r.section("count")
    r.put("N", N)
    r.put("sigma_bar_sq", " ".join(fmt_text(v) for v in spec.sigma_bar_sq))
    r.put("elliptic_count", res.elliptic_count)
    r.put("cartesian_count", res.cartesian_count)
    r.put("per_q", " ".join(str(v) for v in res.per_q))
    if args.single_hole is not None:
        r.put("single_alpha_formula", count_vacua_single_alpha(N, args.single_hole))
    _emit(r.text(), cfg.output)
    return 0


# ---------------------------------------------------------------------------
# Parser


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage problems are validation errors
        raise ValidationError(message)


def _add_common(sp: argparse.ArgumentParser, params: bool = True) -> None:
    sp.add_argument("--config", help="key = value config file; flags override it")
    if params:
        sp.add_argument("--sigma2-sq", dest="sigma2_sq", type=float)
        sp.add_argument("--sigma3-sq", dest="sigma3_sq", type=float)
        sp.add_argument("--alpha-bar-sq", dest="alpha_bar_sq", type=float)
    sp.add_argument("--output", "-o")
    sp.add_argument("--format", choices=("csv", "structured-text"))


def _add_solver(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--delta0", type=float)
    sp.add_argument("--rtol", type=float)
    sp.add_argument("--atol", type=float)
    sp.add_argument("--tol-vac", dest="tol_vac", type=float)
    sp.add_argument("--x-cap", dest="x_cap", type=float)
    sp.add_argument("--dx", type=float)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--window", type=int)


def _add_trajectory(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--family", help="family label, e.g. TE_v1v3")
    sp.add_argument("--member", type=float, default=0.5, help="position in (0, 1) along the family")
    sp.add_argument("--gamma", type=float, nargs=3, metavar=("G1", "G2", "G3"), help="orbit constants (generic families)")
    sp.add_argument("--start", type=float, nargs=3, metavar=("L1", "L2", "L3"), help="start point in elliptic coordinates")
    sp.add_argument("--sector", default="000", help="sign sector, e.g. 010")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kinkmanifold", description="Kink manifold of the three-field model.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("classify", help="print the parameter regime")
    _add_common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("vacua", help="list vacua with stabilizers and Cartesian orbits")
    _add_common(sp)
    sp.set_defaults(func=cmd_vacua)

    for name, func, helptext in (
        ("solve", cmd_solve, "integrate one kink"),
        ("orbit-check", cmd_orbit_check, "check constancy of the orbit constants"),
        ("profile", cmd_profile, "write the energy-density profile as CSV"),
    ):
        sp = sub.add_parser(name, help=helptext)
        _add_common(sp)
        _add_solver(sp)
        _add_trajectory(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("energy", help="energies, stability, lumps and constants per family")
    _add_common(sp)
    _add_solver(sp)
    sp.add_argument("--family", action="append", help="restrict to these families (repeatable)")
    sp.set_defaults(func=cmd_energy)

    sp = sub.add_parser("sumrules", help="evaluate the energy sum rules")
    _add_common(sp)
    _add_solver(sp)
    sp.add_argument("--numeric", action="store_true", help="also check with integrated energies")
    sp.set_defaults(func=cmd_sumrules)

    sp = sub.add_parser("sweep", help="sweep a parameter grid")
    _add_common(sp)
    sp.add_argument("--sigma2-sq-grid", help="lo,hi,n")
    sp.add_argument("--sigma3-sq-grid", help="lo,hi,n")
    sp.add_argument("--alpha-bar-sq-grid", help="lo,hi,n")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("count-general", help="count vacua of the N-field model")
    _add_common(sp, params=False)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--sigma-bar-sq", type=float, nargs="+", help="decreasing couplings (N - 1 values)")
    sp.add_argument("--hole", action="append", help="j:value, alpha-hole inside interval L_j (repeatable)")
    sp.add_argument("--single-hole", type=int, metavar="J", help="one hole in the middle of L_J, evenly spaced couplings")
    sp.set_defaults(func=cmd_count_general)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = build_config(args)
        return args.func(cfg, args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
