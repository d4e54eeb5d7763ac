"""Batch driver: declarative JSON config in, CSV/JSON reports and SVG plots out.

Output files are byte-reproducible for a fixed (config, seed): floats are
serialized with shortest round-trip repr, JSON keys are sorted, check rows
are ordered by name, and the wall-clock timings are kept out of the compared
artifacts (they go to the human-readable run.log instead).

Exit codes: 0 all non-skipped checks passed, 1 at least one failed or
errored, 2 configuration problem.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import jsonschema

from . import information as info
from .measures import (
    AtomMixture,
    DiracAtom,
    GammaMixtureSource,
    GammaParams,
    GammaSource,
)
from .numerics import NumericConfig
from .path import SmartPathModel
from .verify import chebyshev_tau_grid, expand_check_names, run_checks

__all__ = ["ConfigError", "RunConfig", "parse_config", "run_suite", "emit_svg", "main"]


class ConfigError(ValueError):
    """Invalid run configuration; the message lists every violation."""


_SOURCE_SCHEMAS = [
    {
        "type": "object",
        "properties": {"type": {"const": "dirac"}, "x0": {"type": "number", "exclusiveMinimum": 0}},
        "required": ["type", "x0"],
        "additionalProperties": False,
    },
    {
        "type": "object",
        "properties": {
            "type": {"const": "mixture"},
            "atoms": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "array",
                    "minItems": 2,
                    "maxItems": 2,
                    "items": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
        "required": ["type", "atoms"],
        "additionalProperties": False,
    },
    {
        "type": "object",
        "properties": {
            "type": {"const": "gamma"},
            "alpha": {"type": "number", "exclusiveMinimum": 0},
            "lambda": {"type": "number", "exclusiveMinimum": 0},
        },
        "required": ["type", "alpha", "lambda"],
        "additionalProperties": False,
    },
    {
        "type": "object",
        "properties": {
            "type": {"const": "gamma_mixture"},
            "components": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "array",
                    "minItems": 3,
                    "maxItems": 3,
                    "items": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
        "required": ["type", "components"],
        "additionalProperties": False,
    },
]

_CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "target": {
            "type": "object",
            "properties": {
                "alpha": {"type": "number", "exclusiveMinimum": 0},
                "lambda": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["alpha", "lambda"],
            "additionalProperties": False,
        },
        "source": {"oneOf": _SOURCE_SCHEMAS},
        "tau_grid": {
            "oneOf": [
                {"const": "default"},
                {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                },
            ]
        },
        "checks": {
            "oneOf": [
                {"const": "all"},
                {"type": "array", "minItems": 1, "items": {"type": "string"}},
            ]
        },
        "numeric": {
            "type": "object",
            "properties": {
                "quad_rel_tol": {"type": "number", "exclusiveMinimum": 0},
                "quad_abs_tol": {"type": "number", "exclusiveMinimum": 0},
                "quad_max_subdiv": {"type": "integer", "minimum": 10},
                "tail_cutoff_mass": {"type": "number", "exclusiveMinimum": 0},
                "mc_samples": {"type": "integer", "minimum": 1000},
                "mc_seed": {"type": "integer"},
                "fd_step": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "output_dir": {"type": "string"},
        "emit_plots": {"type": "boolean"},
        "seed": {"type": "integer", "minimum": 0},
    },
    "required": ["target", "source"],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class RunConfig:
    """Validated run description with defaults applied."""

    model: SmartPathModel
    tau_grid: tuple
    checks: tuple
    numeric: NumericConfig
    output_dir: str = "smartpath-out"
    emit_plots: bool = True
    seed: int = 0
    raw: dict = field(default_factory=dict, compare=False)


def _build_source(spec):
    kind = spec["type"]
    if kind == "dirac":
        return DiracAtom(spec["x0"])
    if kind == "mixture":
        return AtomMixture(tuple((x, w) for x, w in spec["atoms"]))
    if kind == "gamma":
        return GammaSource(GammaParams(spec["alpha"], spec["lambda"]))
    return GammaMixtureSource(tuple((a, r, w) for a, r, w in spec["components"]))


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration.

    All schema violations are collected and reported together; semantic
    errors (weights not summing to 1, unknown check names, ...) are appended
    to the same list before raising.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None

    validator = jsonschema.Draft202012Validator(_CONFIG_SCHEMA)
    problems = []
    for err in sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path)):
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        problems.append(f"{where}: {err.message}")
    if problems:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(problems))

    try:
        target = GammaParams(raw["target"]["alpha"], raw["target"]["lambda"])
        source = _build_source(raw["source"])
    except ValueError as exc:
        raise ConfigError(f"invalid configuration:\n  {exc}") from None

    tau_spec = raw.get("tau_grid", "default")
    tau_grid = chebyshev_tau_grid() if tau_spec == "default" else tuple(float(t) for t in tau_spec)

    checks_spec = raw.get("checks", "all")
    try:
        checks = tuple(expand_check_names(checks_spec))
    except ValueError as exc:
        raise ConfigError(f"invalid configuration:\n  {exc}") from None

    numeric_kwargs = dict(raw.get("numeric", {}))
    try:
        numeric = NumericConfig(**numeric_kwargs)
    except ValueError as exc:
        raise ConfigError(f"invalid configuration:\n  numeric: {exc}") from None

    return RunConfig(
        model=SmartPathModel(source, target),
        tau_grid=tau_grid,
        checks=checks,
        numeric=numeric,
        output_dir=raw.get("output_dir", "smartpath-out"),
        emit_plots=raw.get("emit_plots", True),
        seed=raw.get("seed", 0),
        raw=raw,
    )


# --- SVG -------------------------------------------------------------------

_SVG_W, _SVG_H = 640, 420
_MARGIN = {"left": 64, "right": 16, "top": 34, "bottom": 44}
_DASHES = ("none", "6 4", "2 3", "8 3 2 3")
_STROKES = ("#1f6fb2", "#b2501f", "#3a8c3f", "#7a4fb2")


def _ticks(lo, hi, n=5):
    if not math.isfinite(lo) or not math.isfinite(hi) or lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    span = hi - lo
    step = 10.0 ** math.floor(math.log10(span / n))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if span / (step * mult) <= n:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12 * span:
        out.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return out


def emit_svg(series, path, title="", xlabel="", ylabel="", log_y=False):
    """Write a standalone SVG line chart.

    ``series`` is a list of (label, x array, y array) with equal-length
    arrays; each series gets its own stroke color/dash pattern and a legend
    entry. ``log_y`` plots log10 of the (positive) values. Output bytes
    depend only on the numeric inputs.
    """
    cleaned = []
    for label, xs, ys in series:
        xs = [float(v) for v in xs]
        ys = [float(v) for v in ys]
        if len(xs) != len(ys):
            raise ValueError(f"series {label!r} has mismatched lengths")
        if log_y:
            pts = [(x, math.log10(y)) for x, y in zip(xs, ys) if y > 0.0]
            xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        cleaned.append((label, xs, ys))

    all_x = [v for _, xs, _ in cleaned for v in xs]
    all_y = [v for _, _, ys in cleaned for v in ys]
    x_lo, x_hi = (min(all_x), max(all_x)) if all_x else (0.0, 1.0)
    y_lo, y_hi = (min(all_y), max(all_y)) if all_y else (0.0, 1.0)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    px_w = _SVG_W - _MARGIN["left"] - _MARGIN["right"]
    px_h = _SVG_H - _MARGIN["top"] - _MARGIN["bottom"]

    def to_px(x, y):
        fx = _MARGIN["left"] + (x - x_lo) / (x_hi - x_lo) * px_w
        fy = _MARGIN["top"] + (1.0 - (y - y_lo) / (y_hi - y_lo)) * px_h
        return fx, fy

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_SVG_W / 2:.1f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>'
        )
    ax_y = _SVG_H - _MARGIN["bottom"]
    parts.append(
        f'<line x1="{_MARGIN["left"]}" y1="{ax_y}" x2="{_SVG_W - _MARGIN["right"]}" '
        f'y2="{ax_y}" stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_MARGIN["left"]}" y1="{_MARGIN["top"]}" x2="{_MARGIN["left"]}" '
        f'y2="{ax_y}" stroke="black" stroke-width="1"/>'
    )
    for t in _ticks(x_lo, x_hi):
        fx, _ = to_px(t, y_lo)
        parts.append(f'<line x1="{fx:.2f}" y1="{ax_y}" x2="{fx:.2f}" y2="{ax_y + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{fx:.2f}" y="{ax_y + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{t:.6g}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        _, fy = to_px(x_lo, t)
        parts.append(
            f'<line x1="{_MARGIN["left"] - 5}" y1="{fy:.2f}" x2="{_MARGIN["left"]}" y2="{fy:.2f}" stroke="black"/>'
        )
        label = f"{t:.6g}"
        parts.append(
            f'<text x="{_MARGIN["left"] - 8}" y="{fy + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{label}</text>'
        )
    if xlabel:
        parts.append(
            f'<text x="{_SVG_W / 2:.1f}" y="{_SVG_H - 8}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{xlabel}</text>'
        )
    if ylabel:
        y_mid = (_MARGIN["top"] + ax_y) / 2
        parts.append(
            f'<text x="14" y="{y_mid:.1f}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="12" transform="rotate(-90 14 {y_mid:.1f})">{ylabel}{" (log10)" if log_y else ""}</text>'
        )
    for i, (label, xs, ys) in enumerate(cleaned):
        stroke = _STROKES[i % len(_STROKES)]
        dash = _DASHES[i % len(_DASHES)]
        if xs:
            pts = " ".join(f"{to_px(x, y)[0]:.2f},{to_px(x, y)[1]:.2f}" for x, y in zip(xs, ys))
            dash_attr = "" if dash == "none" else f' stroke-dasharray="{dash}"'
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="1.6"{dash_attr}/>'
            )
        ly = _MARGIN["top"] + 14 + 16 * i
        lx = _SVG_W - _MARGIN["right"] - 150
        dash_attr = "" if dash == "none" else f' stroke-dasharray="{dash}"'
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 26}" y2="{ly - 4}" stroke="{stroke}" '
            f'stroke-width="1.6"{dash_attr}/>'
        )
        parts.append(
            f'<text x="{lx + 32}" y="{ly}" font-family="sans-serif" font-size="11">{label}</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


# --- suite orchestration -----------------------------------------------------


def _report_rows(report):
    rows = []
    for g, l, r in zip(report.grid, report.lhs, report.rhs):
        abs_dev = abs(l - r)
        scale = max(abs(l), abs(r))
        rel_dev = abs_dev / scale if scale > 1e-12 else 0.0
        rows.append((g, l, r, abs_dev, rel_dev))
    return rows


def _write_csv(report, path):
    lines = ["grid,lhs,rhs,abs_dev,rel_dev"]
    for row in _report_rows(report):
        lines.append(",".join(repr(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _report_json_dict(report):
    d = asdict(report)
    d.pop("runtime_ms")  # wall-clock: excluded from byte-reproducible artifacts
    for key in ("grid", "lhs", "rhs"):
        d[key] = list(d[key])
    return d


def run_suite(cfg: RunConfig) -> int:
    """Run the configured checks, write reports, plots and logs.

    Writes one CSV per check, a summary.json with every (deterministic)
    report field, a run.log with human-readable status lines including
    timings, and optionally the two functional plots. Returns the exit code.
    """
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports = run_checks(
        cfg.model, list(cfg.checks), cfg.numeric, seed=cfg.seed, tau_grid=cfg.tau_grid
    )
    for report in reports:
        _write_csv(report, out / f"{report.check_name}.csv")
    summary = {
        "checks": [_report_json_dict(r) for r in reports],
        "n_passed": sum(r.status == "passed" for r in reports),
        "n_failed": sum(r.status in ("failed", "error") for r in reports),
        "n_skipped": sum(r.status == "skipped" for r in reports),
        "seed": cfg.seed,
    }
    (out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    log_lines = [
        f"{r.check_name}: {r.status} (abs={r.max_abs_dev!r}, rel={r.max_rel_dev!r}, "
        f"{r.runtime_ms} ms) {r.detail}".rstrip()
        for r in reports
    ]
    (out / "run.log").write_text("\n".join(log_lines) + "\n", encoding="utf-8")

    if cfg.emit_plots:
        lam = cfg.model.target.rate
        entropy_vals = [
            info.relative_entropy(cfg.model, t, cfg.numeric).value for t in cfg.tau_grid
        ]
        fisher_vals = [
            info.standardized_fisher_path(cfg.model, t, cfg.numeric).value / (lam * t)
            for t in cfg.tau_grid
        ]
        emit_svg(
            [("relative entropy", cfg.tau_grid, entropy_vals)],
            out / "entropy_vs_tau.svg",
            title="Relative entropy along the interpolation",
            xlabel="tau",
            ylabel="D(X_tau || gamma)",
        )
        emit_svg(
            [("J / (lambda tau)", cfg.tau_grid, fisher_vals)],
            out / "fisher_vs_tau.svg",
            title="Entropy production along the interpolation",
            xlabel="tau",
            ylabel="J(X_tau)/(lambda tau)",
        )

    any_bad = any(r.status in ("failed", "error") for r in reports)
    return 1 if any_bad else 0


def _eval_functional(cfg: RunConfig, functional: str, tau: float) -> float:
    if functional == "entropy":
        return info.relative_entropy(cfg.model, tau, cfg.numeric).value
    if functional == "fisher":
        return info.standardized_fisher_path(cfg.model, tau, cfg.numeric).value
    if functional == "stein":
        return info.stein_discrepancy(cfg.model.source, cfg.model.target, cfg.numeric)
    raise ValueError(f"unknown functional {functional!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="smartpath",
        description="Gamma-interpolation functionals and identity checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a check suite from a JSON config")
    run_p.add_argument("--config", required=True, help="path to the JSON run configuration")
    run_p.add_argument("--out", help="output directory (overrides the config)")
    run_p.add_argument("--seed", type=int, help="seed override")
    run_p.add_argument("--checks", help="comma-separated check names (overrides the config)")
    run_p.add_argument("--no-plots", action="store_true", help="skip SVG plot output")

    eval_p = sub.add_parser("eval", help="evaluate one functional at one tau")
    eval_p.add_argument("--config", required=True)
    eval_p.add_argument("--functional", required=True, choices=["entropy", "fisher", "stein"])
    eval_p.add_argument("--tau", type=float, default=0.5)

    args = parser.parse_args(argv)
    try:
        cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.command == "eval":
        try:
            value = _eval_functional(cfg, args.functional, args.tau)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(repr(value))
        return 0

    overrides = {}
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.checks is not None:
        try:
            overrides["checks"] = tuple(expand_check_names(args.checks.split(",")))
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    if args.no_plots:
        overrides["emit_plots"] = False
    if overrides:
        kwargs = {f.name: getattr(cfg, f.name) for f in fields(RunConfig)}
        kwargs.update(overrides)
        cfg = RunConfig(**kwargs)
    return run_suite(cfg)


if __name__ == "__main__":
    sys.exit(main())
