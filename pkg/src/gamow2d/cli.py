"""Command-line entry point.

Subcommands: kernel-check, energy, minimize, sweep, lens-verify, cut-paste,
report.  Every run takes a key=value config file, writes JSON/CSV/SVG into
--out, and returns 0 (pass), 1 (a requested check failed), 2 (config error),
or 3 (partial failure).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    Field,
    kernel_to_text,
    parse_config_text,
    parse_kernel,
    validate,
    write_csv,
    write_json,
)
from .errors import ConfigError, ToolkitError
from .kernels import (
    DIVERGENT,
    admissibility_integral,
    check_decreasing,
    check_pd_fourier,
    check_pd_inequality,
    default_decreasing_grid,
    lipschitz_integral,
    random_blob_pair_source,
    strip_pair_source,
)
from .shapes import RasterSet, StarShape, disk
from .energy import ComponentList, cut_and_paste, gamow_energy, generalized_energy
from .lens import lens_derivatives, lens_inequality_check, lens_state
from .minimize import OptimizerConfig, epsilon_sweep, minimize_single
from . import svgout


def _parse_shape(text: str, base: Path) -> StarShape:
    text = text.strip()
    if text == "disk":
        return disk()
    if text.startswith("disk(") and text.endswith(")"):
        inner = text[5:-1].strip()
        radius = 1.0
        if inner:
            key, val = (p.strip() for p in inner.split("="))
            if key != "radius":
                raise ConfigError("disk takes only radius=...")
            radius = float(val)
        return disk(radius)
    path = (base / text).resolve() if not Path(text).is_absolute() else Path(text)
    if not path.exists():
        raise ConfigError(f"shape file {path} not found")
    return StarShape.from_json_dict(json.loads(path.read_text()))


def _apply_overrides(cfg: dict, overrides: list) -> dict:
    out = dict(cfg)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--tol-override expects KEY=VAL, got {item!r}")
        key, val = item.split("=", 1)
        if key not in out:
            raise ConfigError(f"--tol-override key {key!r} not in config schema")
        out[key] = float(val)
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

_KERNEL_CHECK_SCHEMA = {
    "kernel": Field(str, required=True),
    "checks": Field(list, default=["admissibility", "lipschitz", "decreasing",
                                   "pd_fourier"]),
    "n_pairs": Field(int, default=100),
    "pd_source": Field(str, default="blobs"),
    "pd_pitch": Field(float, default=1 / 24),
    "window": Field(float, default=20.0),
    "grid_n": Field(int, default=512),
    "pd_tol": Field(float, default=1e-6),
}


def cmd_kernel_check(cfg: dict, out_dir: Path, seed: int) -> int:
    k = parse_kernel(cfg["kernel"])
    results: dict = {"kernel": kernel_to_text(k)}
    all_pass = True
    for check in cfg["checks"]:
        if check == "admissibility":
            val = admissibility_integral(k)
            ok = val is not DIVERGENT
            results[check] = {"passed": ok,
                              "value": None if not ok else val}
        elif check == "lipschitz":
            val = lipschitz_integral(k)
            ok = val is not DIVERGENT
            results[check] = {"passed": ok, "value": None if not ok else val}
        elif check == "decreasing":
            rep = check_decreasing(k, default_decreasing_grid())
            ok = rep.passed
            results[check] = rep.to_json_dict()
        elif check == "pd_fourier":
            rep = check_pd_fourier(k, window=cfg["window"], n=cfg["grid_n"])
            ok = rep.passed
            results[check] = rep.to_json_dict()
        elif check == "pd_inequality":
            if cfg["pd_source"] == "strips":
                source, n_avail = strip_pair_source(pitch=cfg["pd_pitch"])
                n = min(cfg["n_pairs"], n_avail)
            else:
                source = random_blob_pair_source(pitch=cfg["pd_pitch"])
                n = cfg["n_pairs"]
            rep = check_pd_inequality(k, source, n, seed=seed, tol=cfg["pd_tol"])
            ok = rep.passed
            results[check] = rep.to_json_dict()
        else:
            raise ConfigError(f"unknown check {check!r}")
        all_pass = all_pass and ok
    results["passed"] = all_pass
    write_json(out_dir / "kernel_check.json", results, cfg)
    return 0 if all_pass else 1


_ENERGY_SCHEMA = {
    "kernel": Field(str, required=True),
    "epsilon": Field(float, default=1.0),
    "shape": Field(str, default=""),
    "components": Field(list, default=[]),
    "n_theta": Field(int, default=128),
    "n_radial": Field(int, default=10),
    "svg": Field(bool, default=True),
}


def cmd_energy(cfg: dict, out_dir: Path, base: Path) -> int:
    k = parse_kernel(cfg["kernel"])
    if cfg["components"]:
        comps = [_parse_shape(c, base) for c in cfg["components"]]
        breakdown = generalized_energy(k, cfg["epsilon"], ComponentList(tuple(comps)),
                                       cfg["n_theta"], cfg["n_radial"])
        shapes = comps
    elif cfg["shape"]:
        s = _parse_shape(cfg["shape"], base)
        breakdown = gamow_energy(k, cfg["epsilon"], s, cfg["n_theta"],
                                 cfg["n_radial"])
        shapes = [s]
    else:
        raise ConfigError("energy needs a shape or a components list")
    write_json(out_dir / "energy.json", breakdown.to_json_dict(), cfg)
    n_comp = len(breakdown.per_component) if breakdown.per_component else 1
    write_csv(out_dir / "energy.csv",
              ["epsilon", "perimeter", "riesz", "total", "n_components"],
              [(breakdown.epsilon, breakdown.perimeter, breakdown.riesz,
                breakdown.total, n_comp)], cfg)
    if cfg["svg"]:
        (out_dir / "shape.svg").write_text(svgout.shape_svg(shapes))
    return 0


_MINIMIZE_SCHEMA = {
    "kernel": Field(str, required=True),
    "epsilon": Field(float, required=True),
    "start": Field(str, default="disk"),
    "perturb": Field(float, default=0.05),
    "n_modes": Field(int, default=8),
    "max_iters": Field(int, default=80),
    "step_init": Field(float, default=0.06),
    "tol_energy": Field(float, default=1e-9),
    "tol_step": Field(float, default=1e-4),
    "n_theta": Field(int, default=64),
    "n_radial": Field(int, default=6),
    "svg": Field(bool, default=True),
}


def cmd_minimize(cfg: dict, out_dir: Path, base: Path, seed: int) -> int:
    k = parse_kernel(cfg["kernel"])
    start = _parse_shape(cfg["start"], base)
    if cfg["perturb"] > 0 and not start.modes:
        rng = np.random.default_rng(seed)
        from .shapes import random_star_shape

        start = random_star_shape(rng, cfg["n_modes"], cfg["perturb"])
    opt = OptimizerConfig(
        n_modes=cfg["n_modes"], max_iters=cfg["max_iters"],
        step_init=cfg["step_init"], tol_energy=cfg["tol_energy"],
        tol_step=cfg["tol_step"], seed=seed, n_theta=cfg["n_theta"],
        n_radial=cfg["n_radial"],
    )
    trace = minimize_single(k, cfg["epsilon"], start, opt)
    write_json(out_dir / "minimize_trace.json", trace.to_json_dict(), cfg)
    if cfg["svg"]:
        (out_dir / "final_shape.svg").write_text(
            svgout.shape_svg([trace.final_shape, disk()], ["final", "unit disk"])
        )
    return 0


_SWEEP_SCHEMA = {
    "kernel": Field(str, required=True),
    "epsilons": Field(list, default=[]),
    "eps_min": Field(float, default=0.0),
    "eps_max": Field(float, default=0.0),
    "n_eps": Field(int, default=12),
    "h_max": Field(int, default=2),
    "n_modes": Field(int, default=6),
    "max_iters": Field(int, default=40),
    "n_theta": Field(int, default=64),
    "n_radial": Field(int, default=6),
    "tol_step": Field(float, default=2e-4),
}


def cmd_sweep(cfg: dict, out_dir: Path, seed: int) -> int:
    k = parse_kernel(cfg["kernel"])
    if cfg["epsilons"]:
        eps = [float(e) for e in cfg["epsilons"]]
    elif cfg["eps_max"] > cfg["eps_min"] > 0:
        eps = list(np.geomspace(cfg["eps_min"], cfg["eps_max"], cfg["n_eps"]))
    else:
        raise ConfigError("sweep needs epsilons or eps_min/eps_max")
    opt = OptimizerConfig(
        n_modes=cfg["n_modes"], max_iters=cfg["max_iters"], seed=seed,
        n_theta=cfg["n_theta"], n_radial=cfg["n_radial"],
        tol_step=cfg["tol_step"],
    )
    result = epsilon_sweep(k, eps, opt, h_max=cfg["h_max"])
    rows = [
        (r.epsilon, r.best_single_energy, r.best_split_energy,
         r.n_components_chosen, r.asymmetry)
        for r in result.rows
    ]
    write_csv(out_dir / "sweep.csv",
              ["epsilon", "perimeter_plus_riesz_single", "best_split",
               "n_components", "asymmetry"],
              rows, cfg)
    write_json(out_dir / "sweep.json", result.to_json_dict(), cfg)
    (out_dir / "sweep.svg").write_text(
        svgout.sweep_svg(result.rows, result.threshold_interpolated)
    )
    if any(r.failed for r in result.rows):
        return 3
    return 0


_LENS_SCHEMA = {
    "n_theta_bar": Field(int, default=60),
    "n_delta": Field(int, default=41),
    "theta_bar_min": Field(float, default=0.05),
    "theta_bar_max": Field(float, default=math.pi / 2 - 0.05),
    "slack_tol": Field(float, default=1e-12),
    "include_out_of_domain": Field(bool, default=False),
    "svg": Field(bool, default=True),
}


def cmd_lens_verify(cfg: dict, out_dir: Path) -> int:
    rows = []
    min_slack = math.inf
    tbs = np.linspace(cfg["theta_bar_min"], cfg["theta_bar_max"], cfg["n_theta_bar"])
    for tb in tbs:
        bound = math.cos(tb) / 8.0
        deltas = np.linspace(-bound, bound, cfg["n_delta"])
        if cfg["include_out_of_domain"]:
            deltas = np.concatenate([deltas, [-1.5 * bound, 1.5 * bound]])
        for d in deltas:
            in_dom = abs(d) < bound - 1e-9 and abs(1 + d - math.cos(tb)) > 1e-7
            if not in_dom:
                rows.append((float(tb), float(d), math.nan, math.nan, 0))
                continue
            st = lens_state(tb, float(d))
            slack = lens_inequality_check(tb, float(d))
            rho_p, theta_p, tau_p, mu_p = lens_derivatives(tb, float(d))
            rows.append((float(tb), float(d), slack, mu_p, 1))
            min_slack = min(min_slack, slack)
    write_csv(out_dir / "lens_grid.csv",
              ["theta_bar", "delta", "slack", "mu_prime", "in_domain"],
              rows, cfg)
    summary = {"min_slack": min_slack, "rows": len(rows)}
    write_json(out_dir / "lens_summary.json", summary, cfg)
    if cfg["svg"]:
        st = lens_state(float(tbs[len(tbs) // 2]),
                        0.5 * math.cos(float(tbs[len(tbs) // 2])) / 8.0)
        (out_dir / "lens.svg").write_text(svgout.lens_svg(st))
        from .lens import min_curve_inner, min_curve_outer

        (out_dir / "min_curve_outer.svg").write_text(
            svgout.min_curve_svg(min_curve_outer(0.3, 0.1))
        )
        (out_dir / "min_curve_inner.svg").write_text(
            svgout.min_curve_svg(min_curve_inner(0.3, 0.1))
        )
    return 0 if min_slack >= -cfg["slack_tol"] else 1


_CUT_SCHEMA = {
    "kernel": Field(str, required=True),
    "epsilon": Field(float, default=1e-3),
    "raster": Field(str, required=True),
    "a": Field(float, required=True),
    "b": Field(float, required=True),
    "m_bar": Field(float, required=True),
    "window": Field(float, default=0.0),
}


def cmd_cut_paste(cfg: dict, out_dir: Path, base: Path) -> int:
    k = parse_kernel(cfg["kernel"])
    raster_path = (base / cfg["raster"]).resolve()
    if not raster_path.exists():
        raise ConfigError(f"raster file {raster_path} not found")
    raster = RasterSet.from_pgm_text(raster_path.read_text())
    window = cfg["window"] if cfg["window"] > 0 else None
    result = cut_and_paste(k, cfg["epsilon"], raster, cfg["a"], cfg["b"],
                           cfg["m_bar"], window)
    payload = {
        "found": result.found,
        "energy_change": result.energy_change,
        "a_plus": result.a_plus,
        "b_minus": result.b_minus,
        "removed_area": result.removed_area,
        "guaranteed_decrease": result.guaranteed_decrease,
        "satisfies_guarantee": (
            bool(result.energy_change <= -result.guaranteed_decrease + 1e-9)
            if result.found and result.removed_area > 0
            else None
        ),
    }
    write_json(out_dir / "cut_result.json", payload, cfg)
    if result.found and result.removed_area > 0:
        (out_dir / "reduced.pgm").write_text(result.raster.to_pgm_text())
    return 0


def cmd_report(out_dir: Path) -> int:
    """Collect prior run outputs in --out into one markdown summary."""
    lines = [f"# gamow2d run report (toolkit {__version__})", ""]
    for path in sorted(out_dir.glob("*.json")):
        try:
            payload = json.loads(path.read_text())
        except json.JSONDecodeError:
            continue
        lines.append(f"## {path.name}")
        lines.append("")
        lines.append("```json")
        lines.append(json.dumps(payload, sort_keys=True, indent=2))
        lines.append("```")
        lines.append("")
    svgs = sorted(p.name for p in out_dir.glob("*.svg"))
    if svgs:
        lines.append("## figures")
        lines.extend(f"- {name}" for name in svgs)
        lines.append("")
    (out_dir / "report.md").write_text("\n".join(lines))
    return 0


# ---------------------------------------------------------------------------


_SCHEMAS = {
    "kernel-check": _KERNEL_CHECK_SCHEMA,
    "energy": _ENERGY_SCHEMA,
    "minimize": _MINIMIZE_SCHEMA,
    "sweep": _SWEEP_SCHEMA,
    "lens-verify": _LENS_SCHEMA,
    "cut-paste": _CUT_SCHEMA,
    "report": {},
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gamow2d",
        description="perimeter-plus-repulsion energies for planar sets",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SCHEMAS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None)
        p.add_argument("--out", type=Path, default=Path("."))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol-override", action="append", default=[],
                       metavar="KEY=VAL")
        p.add_argument("--threads", type=int, default=1,
                       help="worker budget for independent sub-runs "
                            "(current commands execute serially)")
    args = parser.parse_args(argv)

    try:
        raw = {}
        base = Path(".")
        if args.config is not None:
            if not args.config.exists():
                raise ConfigError(f"config file {args.config} not found")
            raw = parse_config_text(args.config.read_text())
            base = args.config.parent
        cfg = validate(raw, _SCHEMAS[args.command])
        cfg = _apply_overrides(cfg, args.tol_override)
        out_dir = args.out
        out_dir.mkdir(parents=True, exist_ok=True)

        if args.command == "kernel-check":
            return cmd_kernel_check(cfg, out_dir, args.seed)
        if args.command == "energy":
            return cmd_energy(cfg, out_dir, base)
        if args.command == "minimize":
            return cmd_minimize(cfg, out_dir, base, args.seed)
        if args.command == "sweep":
            return cmd_sweep(cfg, out_dir, args.seed)
        if args.command == "lens-verify":
            return cmd_lens_verify(cfg, out_dir)
        if args.command == "cut-paste":
            return cmd_cut_paste(cfg, out_dir, base)
        if args.command == "report":
            return cmd_report(out_dir)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
