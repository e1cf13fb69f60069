"""Command-line front end: spectrum, drive, evolve and verify."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from .cluster import GEOMETRIES, catalog
from .errors import NumericError
from .fastforward import DEFAULT_STEPS, Schedule, driving_weights, evolve, spectrum_at
from .verify import run_checks

log = logging.getLogger("ffclusters")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2
COMMANDS = ("spectrum", "drive", "evolve", "verify")


@dataclass(frozen=True)
class RunConfig:
    geometry: str | None = None
    b0: float = 10.0
    r0: float = 0.0
    vbar: float = 100.0
    tff: float = 0.1
    steps: int = DEFAULT_STEPS
    stride: int = 1000
    output_path: str | None = None
    format: str = "csv"

    def validate(self) -> None:
        if self.geometry is not None:
            catalog(self.geometry)
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        if self.steps < 1 or self.stride < 1 or self.steps % self.stride:
            raise ValueError("stride must be a positive divisor of steps")
        self.schedule()

    def schedule(self) -> Schedule:
        return Schedule(B0=self.b0, R0=self.r0, vbar=self.vbar, Tff=self.tff)

    def sample_times(self) -> list[float]:
        dt = self.tff / self.steps
        return [k * dt for k in range(0, self.steps + 1, self.stride)]


# config-file keys and flag names map onto RunConfig fields
_KEYS = {
    "geometry": ("geometry", str),
    "b0": ("b0", float),
    "r0": ("r0", float),
    "vbar": ("vbar", float),
    "tff": ("tff", float),
    "steps": ("steps", int),
    "stride": ("stride", int),
    "out": ("output_path", str),
    "format": ("format", str),
}


def read_config_file(path: str | Path) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower().replace("-", "_")
        if key not in _KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        name, conv = _KEYS[key]
        try:
            values[name] = conv(value)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return values


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

def _num(x) -> str:
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def table_spectrum(geometry: str, cfg: RunConfig):
    geo = catalog(geometry)
    sched = cfg.schedule()
    columns = ["t", "R"] + [f"E{k}" for k in range(geo.dim)]
    rows = []
    for t in cfg.sample_times():
        rows.append([t, sched.advanced_R(t), *spectrum_at(geo, sched, t)])
    return columns, rows


def table_drive(geometry: str, cfg: RunConfig):
    geo = catalog(geometry)
    sched = cfg.schedule()
    names = [f"vW{k + 1}" for k in range(len(geo.w_classes))]
    if geo.q_included:
        names.append("vQ")
    columns = ["t", "v", *names, "status"]
    rows = []
    for t in cfg.sample_times():
        v = sched.velocity(t)
        try:
            _, _, w = driving_weights(geo, sched, t)
        except NumericError as exc:
            log.warning("drive %s t=%g: %s", geometry, t, exc)
            rows.append([t, v, *([math.nan] * len(names)), type(exc).__name__])
            continue
        vals = [v * x for x in w.w] + ([v * w.q] if geo.q_included else [])
        rows.append([t, v, *vals, "ok"])
    return columns, rows


def table_evolve(geometry: str, cfg: RunConfig):
    geo = catalog(geometry)
    reps = geo.representatives()
    columns = ["t", "fidelity", "norm"] + [f"abs2_C{r}" for r in reps]
    rows = []
    for rec in evolve(geo, cfg.schedule(), steps=cfg.steps, stride=cfg.stride):
        probs = np.abs(rec.amplitudes) ** 2
        rows.append([rec.t, rec.fidelity, rec.norm, *(probs[r - 1] for r in reps)])
    return columns, rows


TABLES = {"spectrum": table_spectrum, "drive": table_drive, "evolve": table_evolve}


def render(columns, rows, fmt: str, meta: dict) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_num(x) for x in row])
        return buf.getvalue()
    def jsonable(x):
        if isinstance(x, str):
            return x
        x = float(x)
        return x if math.isfinite(x) else None
    payload = dict(meta, columns=columns, rows=[[jsonable(x) for x in r] for r in rows])
    return json.dumps(payload, indent=1) + "\n"


def _output_path(cfg: RunConfig, command: str, geometry: str, many: bool) -> str:
    if cfg.output_path is None:
        return f"{command}_{geometry}.{cfg.format}"
    if cfg.output_path == "-" or not many:
        return cfg.output_path
    p = Path(cfg.output_path)
    return str(p.with_name(f"{p.stem}_{geometry}{p.suffix}"))


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def run_table(command: str, geometry: str, cfg: RunConfig, many: bool = False) -> str:
    columns, rows = TABLES[command](geometry, cfg)
    meta = {"command": command, "config": dict(asdict(cfg), geometry=geometry)}
    path = _output_path(cfg, command, geometry, many)
    _write(render(columns, rows, cfg.format, meta), path)
    log.info("%s %s -> %s (%d rows)", command, geometry, path, len(rows))
    return path


def cmd_spectrum(cfg: RunConfig) -> str:
    return run_table("spectrum", cfg.geometry or "triangle", cfg)


def cmd_drive(cfg: RunConfig) -> str:
    return run_table("drive", cfg.geometry or "triangle", cfg)


def cmd_evolve(cfg: RunConfig) -> str:
    return run_table("evolve", cfg.geometry or "triangle", cfg)


def cmd_verify(cfg: RunConfig, golden_tables: dict | None = None) -> dict:
    geometries = (cfg.geometry,) if cfg.geometry else GEOMETRIES
    report = run_checks(
        geometries, cfg.schedule(), steps=cfg.steps, golden_tables=golden_tables
    )
    text = json.dumps(report, indent=1) + "\n"
    _write(text, cfg.output_path or "-")
    return report


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ffclusters",
        description="Fast-forward driving for small transverse Ising clusters.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key=value file; flags override it")
        p.add_argument("--geometry", choices=GEOMETRIES)
        p.add_argument("--all-geometries", action="store_true",
                       help="run every geometry, one output file each")
        p.add_argument("--b0", type=float)
        p.add_argument("--r0", type=float)
        p.add_argument("--vbar", type=float)
        p.add_argument("--tff", type=float)
        p.add_argument("--steps", type=int)
        p.add_argument("--stride", type=int)
        p.add_argument("--out", help="output file ('-' for stdout)")
        p.add_argument("--format", choices=("csv", "json"))
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = read_config_file(args.config) if args.config else {}
    for flag, (name, _) in _KEYS.items():
        given = getattr(args, flag, None)
        if given is not None:
            values[name] = given
    known = {f.name for f in fields(RunConfig)}
    cfg = replace(RunConfig(), **{k: v for k, v in values.items() if k in known})
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        cfg = config_from_args(args)
        if args.command == "verify":
            if args.all_geometries:
                cfg = replace(cfg, geometry=None)
            report = cmd_verify(cfg)
            return EXIT_OK if report["passed"] else EXIT_VALIDATION
        if args.all_geometries:
            with ThreadPoolExecutor() as pool:
                futures = [
                    pool.submit(run_table, args.command, g, cfg, True) for g in GEOMETRIES
                ]
                for fut in futures:
                    fut.result()
        else:
            run_table(args.command, cfg.geometry or "triangle", cfg)
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
