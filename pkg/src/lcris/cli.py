"""Command-line front end: ``lcris solve --scenario s.json --out dir``.

Exit codes: 0 on success, 2 for an invalid scenario or argument, 3 when every
grid point failed for at least one user.
"""

from __future__ import annotations

import argparse
import copy
import csv
import enum
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

from lcris import __version__
from lcris.phase_opt import InfeasibleError
from lcris.scenario import Scenario, ScenarioError, resolve_dict, scenario_from_dict
from lcris.sweep import TradeoffPoint, UserSolution, assemble, fom_sweep, run_curves, user_curve

log = logging.getLogger("lcris")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3

CURVE_COLUMNS = ("user", "omega_max_rad", "omega_max_deg", "insertion_loss_db", "alpha_linear",
                 "alpha_db", "required_power_dbm", "converged")


class SweepKind(str, enum.Enum):
    POWER_VS_OMEGA = "power_vs_omega"
    FOM = "fom"
    RADIUS = "radius"


@dataclass(frozen=True)
class RunManifest:
    scenario_path: Path
    output_dir: Path
    sweep: SweepKind = SweepKind.POWER_VS_OMEGA
    overrides: tuple[str, ...] = ()
    seed: Optional[int] = None
    threads: int = 1
    trace: bool = False


@dataclass
class RunResult:
    """Exit code, written files and, per user (or per radius), the solved curves."""

    exit_code: int
    files: list[Path] = field(default_factory=list)
    curves: list[list[TradeoffPoint]] = field(default_factory=list, repr=False)
    solutions: list[Optional[UserSolution]] = field(default_factory=list, repr=False)


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return f"{x:.12g}"


def _dbm(watts: float) -> float:
    return 10 * math.log10(watts * 1e3) if watts > 0 else math.inf


def _db(x: float) -> float:
    return 10 * math.log10(x) if x > 0 else -math.inf


def _write_csv(path: Path, header: Sequence[str], rows) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _load_raw(path: Path) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ScenarioError("--scenario", f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ScenarioError("--scenario", f"malformed JSON: {exc}") from None
    # a manifest echo carries the resolved scenario under "scenario"
    if isinstance(raw, dict) and "scenario" in raw and "lcris_version" in raw:
        raw = raw["scenario"]
    return raw


def parse_scenario(path) -> Scenario:
    """Read a scenario JSON (or a manifest echo); missing fields take the defaults."""
    return scenario_from_dict(_load_raw(Path(path)))


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(resolved: dict, overrides: Sequence[str]) -> dict:
    """Apply ``dotted.key=value`` assignments; list items are addressed by index."""
    out = copy.deepcopy(resolved)
    for item in overrides:
        key, sep, text = item.partition("=")
        if not sep or not key:
            raise ScenarioError("--set", f"expected key=value, got {item!r}")
        *parents, leaf = key.split(".")
        node = out
        for part in parents:
            node = _child(node, part, key)
        if isinstance(node, list):
            node[_index(node, leaf, key)] = _parse_value(text)
        elif isinstance(node, dict) and leaf in node:
            node[leaf] = _parse_value(text)
        else:
            raise ScenarioError(key, "unknown field")
    return out


def _index(node: list, part: str, key: str) -> int:
    if not part.isdigit() or int(part) >= len(node):
        raise ScenarioError(key, f"bad list index {part!r}")
    return int(part)


def _child(node, part: str, key: str):
    if isinstance(node, list):
        return node[_index(node, part, key)]
    if isinstance(node, dict) and part in node:
        return node[part]
    raise ScenarioError(key, "unknown field")


def resolve_manifest(manifest: RunManifest) -> dict:
    resolved = resolve_dict(_load_raw(manifest.scenario_path))
    resolved = resolve_dict(apply_overrides(resolved, manifest.overrides))
    if manifest.seed is not None:
        resolved["seed"] = manifest.seed
    return resolved


def _curve_rows(k: int, curve: Sequence[TradeoffPoint]):
    for p in curve:
        yield (k + 1, p.omega_max, math.degrees(p.omega_max), p.insertion_loss_db, p.alpha, _db(p.alpha),
               _dbm(p.required_power_w), p.converged)


def _write_traces(out: Path, tag: str, curves: dict[int, Sequence[TradeoffPoint]]) -> list[Path]:
    tdir = out / "traces"
    tdir.mkdir(exist_ok=True)
    files = []
    for k, curve in curves.items():
        for j, p in enumerate(curve):
            for r, rec in enumerate(p.rounds):
                path = tdir / f"{tag}user{k + 1}_omega{j:02d}_round{r}.csv"
                rec.trace.write_csv(path)
                files.append(path)
    return files


def _solutions(sc: Scenario, curves: dict[int, list[TradeoffPoint]]
               ) -> tuple[list[Optional[UserSolution]], list[int]]:
    sols, failed = [], []
    for k, curve in curves.items():
        try:
            sols.append(assemble(sc, k, curve))
        except InfeasibleError:
            log.error("user %d: no feasible grid point", k + 1)
            sols.append(None)
            failed.append(k)
    return sols, failed


def _summary_row(k: int, sol: Optional[UserSolution]):
    if sol is None:
        return (k + 1, math.nan, math.nan, math.nan, math.nan, math.inf, 0)
    p = sol.best
    return (k + 1, p.omega_max, math.degrees(p.omega_max), p.insertion_loss_db, _db(p.alpha),
            _dbm(sol.required_power_w), len(sol.per_point_snr))


SUMMARY_COLUMNS = ("user", "omega_star_rad", "omega_star_deg", "insertion_loss_db", "alpha_db",
                   "required_power_dbm", "n_points")


def run_manifest(manifest: RunManifest) -> RunResult:
    """Execute one manifest and write its artifacts."""
    resolved = resolve_manifest(manifest)
    sc = scenario_from_dict(resolved)
    out = Path(manifest.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: list[Path] = []
    code = EXIT_OK
    all_curves, all_sols = [], []

    if manifest.sweep is SweepKind.RADIUS:
        k = sc.sweeps.radius_user - 1
        rows = []
        for i, radius in enumerate(sc.sweeps.radii):
            sub = sc.with_user_radius(k, radius)
            curve = user_curve(sub, k, manifest.threads)
            sols, failed = _solutions(sub, {k: curve})
            files.append(_write_csv(out / f"curve_user{k + 1}_radius{i}.csv", CURVE_COLUMNS,
                                    _curve_rows(k, curve)))
            if manifest.trace:
                files += _write_traces(out, f"radius{i}_", {k: curve})
            if failed:
                code = EXIT_SOLVER
            all_curves.append(curve)
            all_sols += sols
            rows.append((radius, *_summary_row(k, sols[0])))
        files.append(_write_csv(out / "summary.csv", ("radius_m", *SUMMARY_COLUMNS), rows))
    else:
        curves = run_curves(sc, manifest.threads)
        sols, failed = _solutions(sc, dict(enumerate(curves)))
        all_curves, all_sols = curves, sols
        if failed:
            code = EXIT_SOLVER
        for k, curve in enumerate(curves):
            files.append(_write_csv(out / f"curve_user{k + 1}.csv", CURVE_COLUMNS, _curve_rows(k, curve)))
        if manifest.trace:
            files += _write_traces(out, "", dict(enumerate(curves)))
        if manifest.sweep is SweepKind.FOM:
            ok = [s for s in sols if s is not None]
            rows = [(r.fom, r.user + 1, r.omega_star, math.degrees(r.omega_star), _db(r.alpha),
                     _dbm(r.required_power_w)) for r in fom_sweep(sc, sc.sweeps.fom_values, ok)]
            files.append(_write_csv(out / "summary.csv", ("fom_deg_per_db", "user", "omega_star_rad",
                                                          "omega_star_deg", "alpha_db", "required_power_dbm"),
                                    rows))
        else:
            files.append(_write_csv(out / "summary.csv", SUMMARY_COLUMNS,
                                    (_summary_row(k, s) for k, s in enumerate(sols))))

    echo = {"lcris_version": __version__, "sweep": manifest.sweep.value, "scenario": resolved}
    path = out / "manifest_echo.json"
    path.write_text(json.dumps(echo, indent=2, sort_keys=True) + "\n")
    files.append(path)
    return RunResult(code, files, all_curves, all_sols)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcris", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    solve = sub.add_parser("solve", help="run a sweep and write CSV artifacts")
    solve.add_argument("--scenario", required=True, type=Path, help="scenario JSON or manifest echo")
    solve.add_argument("--out", required=True, type=Path, help="output directory")
    solve.add_argument("--sweep", choices=[k.value for k in SweepKind], default=SweepKind.POWER_VS_OMEGA.value)
    solve.add_argument("--seed", type=int)
    solve.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a resolved scenario field, e.g. users.0.radius_m=1.0")
    solve.add_argument("--threads", type=int, default=1)
    solve.add_argument("--trace", action="store_true", help="also write penalty-loop traces")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    manifest = RunManifest(args.scenario, args.out, SweepKind(args.sweep), tuple(args.overrides), args.seed,
                           args.threads, args.trace)
    try:
        result = run_manifest(manifest)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
