"""Command-line interface.

    tripod-eit spectrum  --gc 5 --delta 5 --evaluator analytic-full
    tripod-eit scan      --axis g_c --axis-min 0 --axis-max 10 --out maps --format csv,svg
    tripod-eit eigen     --gp 1 --gc 2 --deltac 5
    tripod-eit compare   --gc 5 --delta 2.5 --alpha 0.1
    tripod-eit bfield    --splitting-mhz 10 --lande-g 1
    tripod-eit reproduce --figure all --out figures

Exit status: 0 success, 2 invalid arguments or parameters, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hamiltonian import (
    NumericalError,
    build_lambda_h,
    build_tripod_h,
    cubic_roots,
    eigensystem,
    find_dark_states,
    format_matrix,
)
from .liouville import DEFAULT_MODEL, MODELS
from .model import EVALUATOR_TAGS, FIELDS, PRESETS, LambdaParams, ParameterError, Sweep, TripodParams, preset_for
from .render import VERSION_TAG, render_outputs, render_text, write_text
from .spectra import EvaluationError, analyze_windows, scan_2d, sweep_delta_c

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
FORMATS = ("csv", "json", "svg")
SCAN_AXES = ("g_c", "Delta", "alpha")

#: Bohr magneton over Planck's constant, MHz per gauss
MU_B_MHZ_PER_GAUSS = 1.3996246


class UsageError(ValueError):
    """Bad command-line or config input (exit status 2)."""


# -- magnetic field ---------------------------------------------------------------


@dataclass(frozen=True)
class BFieldQuery:
    splitting_mhz: float
    lande_g: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.splitting_mhz) and self.splitting_mhz >= 0):
            raise ParameterError([f"splitting_mhz must be finite and >= 0, got {self.splitting_mhz}"])
        if not (math.isfinite(self.lande_g) and self.lande_g > 0):
            raise ParameterError([f"lande_g must be finite and > 0, got {self.lande_g}"])


def bfield_for_splitting(q: BFieldQuery) -> float:
    """Field in gauss giving a Zeeman splitting of ``q.splitting_mhz`` (h * nu = g mu_B B)."""
    return q.splitting_mhz / (q.lande_g * MU_B_MHZ_PER_GAUSS)


# -- run configuration ------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    params: TripodParams = field(default_factory=TripodParams)
    evaluator: str = "analytic-full"
    sweep: Sweep = field(default_factory=lambda: Sweep("delta_c", -15.0, 15.0, 601))
    model: str = DEFAULT_MODEL
    out: Path | None = None
    formats: tuple[str, ...] = ("csv",)
    axis: Sweep = field(default_factory=lambda: Sweep("g_c", 0.0, 10.0, 101))
    figure: str = "all"
    references: tuple[str, ...] = ()

    def check(self) -> "RunConfig":
        if self.evaluator not in EVALUATOR_TAGS:
            raise UsageError(f"unknown evaluator {self.evaluator!r}; expected one of {', '.join(EVALUATOR_TAGS)}")
        for ref in self.references:
            if ref not in EVALUATOR_TAGS:
                raise UsageError(f"unknown reference evaluator {ref!r}")
        if self.model not in MODELS:
            raise UsageError(f"unknown model {self.model!r}; expected one of {', '.join(MODELS)}")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad or not self.formats:
            raise UsageError(f"formats must be a nonempty subset of {','.join(FORMATS)}, got {','.join(self.formats)}")
        if self.axis.variable not in SCAN_AXES:
            raise UsageError(f"scan axis must be one of {', '.join(SCAN_AXES)}")
        if self.figure != "all" and self.figure not in PRESETS:
            raise UsageError(f"unknown figure {self.figure!r}; expected all or one of {', '.join(PRESETS)}")
        if self.out is not None:
            try:
                self.out.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                raise UsageError(f"output directory {self.out} is not writable: {exc.strerror or exc}") from exc
        return self


def _load_config(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    known = {"command", "params", "evaluator", "sweep", "model", "out", "formats", "axis", "figure", "references"}
    extra = sorted(set(doc) - known)
    if extra:
        raise UsageError(f"config {path}: unknown key(s) {', '.join(extra)}")
    return doc


def _sweep_from(doc, variable, where) -> dict:
    if not isinstance(doc, dict):
        raise UsageError(f"{where} must be an object with min, max, count")
    extra = sorted(set(doc) - {"variable", "min", "max", "count"})
    if extra:
        raise UsageError(f"{where}: unknown key(s) {', '.join(extra)}")
    return {"variable": doc.get("variable", variable), **{k: doc[k] for k in ("min", "max", "count") if k in doc}}


_FLAG_FIELDS = {"gp": "g_p", "gc": "g_c", "deltac": "delta_c", "delta": "Delta", "alpha": "alpha", "beta": "beta"}


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then explicit flags."""
    doc = _load_config(args.config) if args.config else {}
    if "command" in doc and doc["command"] != args.command:
        raise UsageError(f"config is for command {doc['command']!r}, not {args.command!r}")
    base = TripodParams().to_dict()
    if args.command == "reproduce":
        base["g_p"] = PRESETS["fig2"].params.g_p
    cfg_params = doc.get("params", {})
    if not isinstance(cfg_params, dict):
        raise UsageError("config params must be an object")
    unknown = sorted(set(cfg_params) - set(FIELDS))
    if unknown:
        raise UsageError(f"config params: unknown field(s) {', '.join(unknown)}")
    base.update(cfg_params)
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            base[name] = value
    params = TripodParams.from_dict(base)

    sweep = {"variable": "delta_c", "min": -15.0, "max": 15.0, "count": 601}
    if "sweep" in doc:
        sweep.update(_sweep_from(doc["sweep"], "delta_c", "config sweep"))
    for flag, key in (("deltac_min", "min"), ("deltac_max", "max"), ("points", "count")):
        if getattr(args, flag, None) is not None:
            sweep[key] = getattr(args, flag)
    axis = {"variable": "g_c", "min": 0.0, "max": 10.0, "count": 101}
    if "axis" in doc:
        axis.update(_sweep_from(doc["axis"], "g_c", "config axis"))
    for flag, key in (("axis", "variable"), ("axis_min", "min"), ("axis_max", "max"), ("axis_points", "count")):
        if getattr(args, flag, None) is not None:
            axis[key] = getattr(args, flag)

    def pick(name, default):
        value = getattr(args, name, None)
        return value if value is not None else doc.get(name, default)

    evaluator_default = "numeric-tripod" if args.command in ("compare", "reproduce") else "analytic-full"
    formats = args.format if getattr(args, "format", None) is not None else doc.get("formats")
    if formats is None:
        formats = ["csv", "svg"] if args.command == "reproduce" else ["csv"]
    elif isinstance(formats, str):
        formats = [f.strip() for f in formats.split(",") if f.strip()]
    out = pick("out", None)
    if out is None and args.command == "reproduce":
        out = "figures"
    refs = pick("reference", None) or doc.get("references", ())
    try:
        cfg = RunConfig(
            command=args.command,
            params=params,
            evaluator=pick("evaluator", evaluator_default),
            sweep=Sweep(str(sweep["variable"]), float(sweep["min"]), float(sweep["max"]), int(sweep["count"])),
            model=pick("model", DEFAULT_MODEL),
            out=None if out is None else Path(out),
            formats=tuple(formats),
            axis=Sweep(str(axis["variable"]), float(axis["min"]), float(axis["max"]), int(axis["count"])),
            figure=pick("figure", "all"),
            references=tuple(refs),
        )
    except (TypeError, KeyError) as exc:
        raise UsageError(f"malformed configuration: {exc}") from exc
    return cfg.check()


# -- commands ---------------------------------------------------------------------


def _emit(result, cfg: RunConfig, stem: str, title: str = "", extra=(), report=None, stdout=None) -> None:
    stdout = stdout or sys.stdout
    if cfg.out is None:
        if len(cfg.formats) > 1:
            raise UsageError("several formats need --out <dir>")
        stdout.write(render_text(result, cfg.formats[0], title, extra, report))
        return
    for path in render_outputs(result, cfg.formats, cfg.out, stem, title, extra, report):
        print(f"wrote {path}", file=stdout)


def _sweep_range(cfg):
    return (cfg.sweep.min, cfg.sweep.max), cfg.sweep.count


def cmd_spectrum(cfg: RunConfig, stdout) -> int:
    rng, n = _sweep_range(cfg)
    params = LambdaParams(**cfg.params.to_dict()) if "lambda" in cfg.evaluator else cfg.params
    s = sweep_delta_c(cfg.evaluator, params, rng, n, cfg.model)
    report = analyze_windows(s) if cfg.params.g_c > 0 else None
    _emit(s, cfg, "spectrum", f"{cfg.evaluator}", report=report, stdout=stdout)
    return EXIT_OK


def cmd_scan(cfg: RunConfig, stdout) -> int:
    rng, n = _sweep_range(cfg)
    a = cfg.axis
    grid = scan_2d(cfg.evaluator, cfg.params, a.variable, (a.min, a.max), a.count, rng, n, cfg.model)
    _emit(grid, cfg, f"scan_{a.variable}", f"Im h over {a.variable}", stdout=stdout)
    return EXIT_OK


def _fmt_c(z: complex) -> str:
    return f"{z.real:+.10f}{z.imag:+.10f}j"


def cmd_eigen(cfg: RunConfig, stdout) -> int:
    p = cfg.params
    lam = "lambda" in cfg.evaluator
    h = build_lambda_h(p) if lam else build_tripod_h(p)
    es = eigensystem(h)
    dark = find_dark_states(es)
    doc = {
        "version": VERSION_TAG,
        "system": "lambda" if lam else "tripod",
        "params": p.to_dict(),
        "hamiltonian": [[[z.real, z.imag] for z in row] for row in h],
        "eigenvalues": [float(v.real) for v in es.values],
        "eigenvectors": [[[z.real, z.imag] for z in es.vectors[:, k]] for k in range(len(es.values))],
        "dark_states": [
            {
                "value": float(d.value.real),
                "vector": [[z.real, z.imag] for z in d.vector],
                "excited_amplitude": d.excited_amplitude,
                "coupled_amplitude": d.coupled_amplitude,
                "ideal": d.is_ideal(1e-8),
            }
            for d in dark
        ],
    }
    if not lam:
        doc["cubic_roots"] = [[r.real, r.imag] for r in cubic_roots(p)]
    if "json" in cfg.formats and cfg.out is not None:
        print(f"wrote {write_text(cfg.out / 'eigen.json', json.dumps(doc, indent=1) + chr(10))}", file=stdout)
        return EXIT_OK
    if cfg.formats == ("json",):
        stdout.write(json.dumps(doc, indent=1) + "\n")
        return EXIT_OK
    lines = [f"# {VERSION_TAG}", "# params: " + json.dumps(p.to_dict()), "Hamiltonian:", format_matrix(h, 6), "Eigenpairs:"]
    for v, vec in es.pairs():
        lines.append(f"  {v.real:+.10f}  [" + ", ".join(_fmt_c(z) for z in vec) + "]")
    lines.append(f"Dark states (|<1|v>| <= 1e-8): {len(dark)}")
    for d in dark:
        tag = "ideal" if d.is_ideal(1e-8) else f"|<3|v>| = {d.coupled_amplitude:.3g}"
        lines.append(f"  {d.value.real:+.10f}  [" + ", ".join(_fmt_c(z) for z in d.vector) + f"]  {tag}")
    if not lam:
        lines.append("Closed-form cubic roots: " + ", ".join(_fmt_c(r) for r in cubic_roots(p)))
    stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _default_references(evaluator):
    if evaluator in ("numeric-lambda", "analytic-lambda-exact"):
        return ("analytic-lambda-exact",) if evaluator == "numeric-lambda" else ("numeric-lambda",)
    return ("analytic-full", "analytic-two-lambda")


def cmd_compare(cfg: RunConfig, stdout) -> int:
    rng, n = _sweep_range(cfg)
    p = cfg.params
    refs = cfg.references or _default_references(cfg.evaluator)

    def run(tag):
        q = LambdaParams(**p.to_dict()) if "lambda" in tag else p
        return sweep_delta_c(tag, q, rng, n, cfg.model)

    base = run(cfg.evaluator)
    rows = []
    for ref in refs:
        other = run(ref)
        d = np.abs(base.h - other.h)
        di = np.abs(base.h.imag - other.h.imag)
        k, ki = int(np.argmax(d)), int(np.argmax(di))
        peak = float(np.max(other.h.imag))
        rows.append(
            {
                "reference": ref,
                "sup_abs_h": float(d[k]),
                "at_delta_c": float(base.delta_c[k]),
                "sup_abs_im_h": float(di[ki]),
                "im_at_delta_c": float(base.delta_c[ki]),
                "reference_peak_im": peak,
                "relative_to_peak": float(di[ki] / peak) if peak > 0 else None,
            }
        )
    doc = {"version": VERSION_TAG, "evaluator": cfg.evaluator, "model": base.model, "params": p.to_dict(), "rows": rows}
    if cfg.out is not None and "json" in cfg.formats:
        print(f"wrote {write_text(cfg.out / 'compare.json', json.dumps(doc, indent=1) + chr(10))}", file=stdout)
    lines = [
        f"# {VERSION_TAG}",
        "# params: " + json.dumps(p.to_dict()),
        f"# {cfg.evaluator}" + (f" ({base.model})" if base.model else "") + f" on {n} points in [{rng[0]:g}, {rng[1]:g}]",
        f"{'reference':<22}{'sup|dh|':>12}{'at dc':>9}{'sup|dIm h|':>13}{'at dc':>9}{'rel. peak':>11}",
    ]
    for r in rows:
        rel = "n/a" if r["relative_to_peak"] is None else f"{r['relative_to_peak']:.3%}"
        lines.append(
            f"{r['reference']:<22}{r['sup_abs_h']:>12.3e}{r['at_delta_c']:>9.3f}"
            f"{r['sup_abs_im_h']:>13.3e}{r['im_at_delta_c']:>9.3f}{rel:>11}"
        )
    stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_bfield(args, stdout) -> int:
    q = BFieldQuery(args.splitting_mhz, args.lande_g)
    b = bfield_for_splitting(q)
    stdout.write(f"B = {b:.6g} G for a {q.splitting_mhz:g} MHz splitting at g = {q.lande_g:g}\n")
    return EXIT_OK


def reproduce_figure(name: str, out: Path, formats=("csv", "svg"), model: str = DEFAULT_MODEL, stdout=None) -> list[Path]:
    """Run one preset and write its artifacts; returns the written paths."""
    preset = preset_for(name)
    sw = preset.sweep
    written = []
    meta = [("figure", name)] + ([("note", preset.note)] if preset.note else [])
    if preset.axis is not None:
        ax = preset.axis
        grid = scan_2d(preset.evaluator, preset.params, ax.variable, (ax.min, ax.max), ax.count, (sw.min, sw.max), sw.count, model)
        written += render_outputs(grid, formats, out, name, f"{name}: Im h over {ax.variable}", meta)
    for label, p in preset.panel_params():
        s = sweep_delta_c(preset.evaluator, p, (sw.min, sw.max), sw.count, model)
        over = ", ".join(f"{k}={v:g}" for k, v in dict(preset.panels)[label])
        report = analyze_windows(s) if p.g_c > 0 else None
        written += render_outputs(
            s, formats, out, f"{name}{label}", f"{name} ({label}) {over}", meta + [("panel", f"{label}: {over}")], report
        )
    if stdout is not None:
        for path in written:
            print(f"wrote {path}", file=stdout)
    return written


def cmd_reproduce(cfg: RunConfig, stdout) -> int:
    names = list(PRESETS) if cfg.figure == "all" else [cfg.figure]
    for name in names:
        t0 = time.perf_counter()
        reproduce_figure(name, cfg.out, cfg.formats, cfg.model, stdout)
        print(f"{name}: {time.perf_counter() - t0:.1f} s", file=stdout)
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------


def _formats(text: str) -> list[str]:
    items = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in items if f not in FORMATS]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"formats must come from {','.join(FORMATS)}")
    return items


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tripod-eit", description="Double-EIT spectra of a tripod atom.")
    parser.add_argument("--version", action="version", version=VERSION_TAG)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("parameters (units of gamma)")
    g.add_argument("--gp", type=float, help="probe Rabi frequency g_p (default 0.001)")
    g.add_argument("--gc", type=float, help="coupling Rabi frequency g_c (default 5)")
    g.add_argument("--delta", type=float, help="Zeeman splitting Delta (default 5)")
    g.add_argument("--alpha", type=float, help="ground relaxation rate (default 0.001)")
    g.add_argument("--beta", type=float, help="radiative rate per channel (default 0.666)")
    common.add_argument("--evaluator", choices=EVALUATOR_TAGS)
    common.add_argument("--model", choices=MODELS, help=f"ground relaxation model (default {DEFAULT_MODEL})")
    common.add_argument("--out", help="output directory (default: stdout)")
    common.add_argument("--format", type=_formats, help="comma list from csv,json,svg")
    common.add_argument("--config", help="JSON run configuration; flags override it")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--deltac-min", dest="deltac_min", type=float)
    grid.add_argument("--deltac-max", dest="deltac_max", type=float)
    grid.add_argument("--points", type=int, help="delta_c grid points (default 601)")

    sub.add_parser("spectrum", parents=[common, grid], help="1D sweep over delta_c")
    p = sub.add_parser("scan", parents=[common, grid], help="2D absorption map")
    p.add_argument("--axis", choices=SCAN_AXES)
    p.add_argument("--axis-min", dest="axis_min", type=float)
    p.add_argument("--axis-max", dest="axis_max", type=float)
    p.add_argument("--axis-points", dest="axis_points", type=int)
    p = sub.add_parser("eigen", parents=[common], help="eigensystem and dark states")
    p.add_argument("--deltac", type=float, help="probe-coupling detuning (default 0)")
    p = sub.add_parser("compare", parents=[common, grid], help="numeric vs closed-form deviation table")
    p.add_argument("--reference", action="append", choices=EVALUATOR_TAGS, help="repeatable")
    p = sub.add_parser("bfield", help="magnetic field for a Zeeman splitting")
    p.add_argument("--splitting-mhz", dest="splitting_mhz", type=float, default=10.0)
    p.add_argument("--lande-g", dest="lande_g", type=float, default=1.0)
    p = sub.add_parser("reproduce", parents=[common], help="regenerate figure presets")
    p.add_argument("--figure", choices=("all", *PRESETS))
    return parser


COMMANDS = {
    "spectrum": cmd_spectrum,
    "scan": cmd_scan,
    "eigen": cmd_eigen,
    "compare": cmd_compare,
    "reproduce": cmd_reproduce,
}


def run_command(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if args.command == "bfield":
            return cmd_bfield(args, stdout)
        cfg = build_config(args)
        return COMMANDS[args.command](cfg, stdout)
    except (UsageError, ParameterError) as exc:
        print(f"tripod-eit: error: {exc}", file=stderr)
        return EXIT_USAGE
    except (EvaluationError, NumericalError) as exc:
        print(f"tripod-eit: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError) as exc:
        print(f"tripod-eit: error: {exc}", file=stderr)
        return EXIT_USAGE


def main(argv=None) -> None:
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main()
