"""Command-line front end.

Every command reads one JSON config, validates all of it, and only then
computes.  Exit codes: 0 ok, 1 config error, 2 runtime/size error,
3 verification failure, 4 bound violation.

Pattern CSV columns are ``rho,phi,zeta,rate`` ('.' decimal point, full
round-trip precision); ``rate`` is in units of ``I0**M``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds, oracle, rates
from .errors import BoundViolationError, PhotonBoundError
from .modes import ANGULAR_INTEGRAL_EXACT, Constants, Direction, ModeGrid, build_grid
from .optimize import RateOperator, power_iteration
from .rates import FieldPoint
from .states import (
    LightState,
    coherent_amplitude,
    fock_state,
    noon_amplitude,
    optimal_coherent_mode,
    poisson_superposition,
    random_symmetric_state,
    state_from_dict,
    state_to_dict,
    two_mode_coherent_mode,
    vacuum,
    weighted_norm2,
)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_VERIFY, EXIT_BOUND = 0, 1, 2, 3, 4

PRESETS = ("optimal-coherent", "two-mode-coherent", "noon-two-mode", "random-symmetric", "vacuum")
VERIFY_CHECKS = (
    "dense-rate",
    "mc-angular",
    "dense-eigen",
    "bound-sweep",
    "grid-convergence",
    "saturation",
)


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    grid: ModeGrid
    state_spec: dict | None
    m_photons: int
    direction: Direction
    point: FieldPoint
    points: list[FieldPoint]
    bound_tol: float
    eig_tol: float
    seed: int
    output_format: str
    output_path: Path | None
    intensity_unit: float = 1.0
    optimize: dict = field(default_factory=dict)
    verify: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    @property
    def constants(self) -> Constants:
        return Constants(self.intensity_unit)


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


def _as_int(value, name, minimum=None):
    _require(isinstance(value, int) and not isinstance(value, bool), f"{name} must be an integer")
    if minimum is not None:
        _require(value >= minimum, f"{name} must be >= {minimum}")
    return value


def _as_complex(value, name):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    _require(
        isinstance(value, list) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value),
        f"{name} must be a number or a [re, im] pair",
    )
    return complex(value[0], value[1])


def _parse_direction(value) -> Direction:
    _require(isinstance(value, list) and len(value) == 3, "direction must have three components")
    comps = [_as_complex(v, f"direction[{i}]") for i, v in enumerate(value)]
    try:
        return Direction.from_vector(comps)
    except ValueError as exc:
        raise ConfigError(f"direction: {exc}") from None


def _parse_point(d) -> FieldPoint:
    _require(isinstance(d, dict), "a point must be an object with rho, phi, zeta")
    try:
        return FieldPoint(float(d.get("rho", 0.0)), float(d.get("phi", 0.0)), float(d.get("zeta", 0.0)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"point: {exc}") from None


def _parse_points(value) -> list[FieldPoint]:
    if value is None:
        return []
    if isinstance(value, list):
        return [_parse_point(p) for p in value]
    _require(isinstance(value, dict) and "raster" in value, "points must be a list or {raster: ...}")
    spec = value["raster"]
    axes = {}
    for name in ("rho", "phi", "zeta"):
        ax = spec.get(name, [0.0, 0.0, 1])
        _require(isinstance(ax, list) and len(ax) == 3, f"raster.{name} must be [start, stop, count]")
        _as_int(ax[2], f"raster.{name} count", 1)
        axes[name] = (float(ax[0]), float(ax[1]), ax[2])
    _require(axes["rho"][0] >= 0 and axes["rho"][1] >= 0, "raster rho must be non-negative")
    return rates.raster(axes["rho"], axes["phi"], axes["zeta"])


def _check_state_spec(spec, grid: ModeGrid, base_dir: Path):
    _require(isinstance(spec, dict), "state must be an object")
    if "path" in spec:
        path = (base_dir / spec["path"]).resolve()
        _require(path.is_file(), f"state file not found: {spec['path']}")
        return
    if "components" in spec:
        _require(isinstance(spec["components"], list), "state.components must be a list")
        return
    preset = spec.get("preset")
    _require(preset in PRESETS, f"state.preset must be one of {', '.join(PRESETS)}")
    if preset == "vacuum":
        return
    has_n = "n_photons" in spec
    has_mean = "mean_photons" in spec
    if preset == "random-symmetric" or preset == "noon-two-mode":
        _require(has_n, f"{preset} needs n_photons")
    else:
        _require(has_n != has_mean, f"{preset} needs exactly one of n_photons, mean_photons")
    if has_n:
        _as_int(spec["n_photons"], "state.n_photons", 0)
    if has_mean:
        _require(isinstance(spec["mean_photons"], (int, float)) and spec["mean_photons"] > 0,
                 "state.mean_photons must be positive")
    if preset in ("noon-two-mode", "two-mode-coherent"):
        ia = _as_int(spec.get("alpha_index", grid.n_alpha - 1), "state.alpha_index", 0)
        ib = _as_int(spec.get("beta_index", 0), "state.beta_index", 0)
        _require(ia < grid.n_alpha, "state.alpha_index out of range")
        _require(ib < grid.n_beta, "state.beta_index out of range")
        _require(grid.n_beta % 2 == 0, "two-mode presets need an even n_beta")


def load_config(path, overrides: argparse.Namespace | None = None) -> RunConfig:
    path = Path(path)
    _require(path.is_file(), f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return parse_config(raw, base_dir=path.parent, overrides=overrides)


def parse_config(raw: dict, base_dir: Path = Path("."), overrides=None) -> RunConfig:
    _require(isinstance(raw, dict), "config must be a JSON object")
    g = raw.get("grid", {"n_alpha": 32, "n_beta": 16})
    _require(isinstance(g, dict), "grid must be an object")
    grid = build_grid(_as_int(g.get("n_alpha", 32), "grid.n_alpha", 1),
                      _as_int(g.get("n_beta", 16), "grid.n_beta", 1))
    m = _as_int(raw.get("m_photons", 1), "m_photons", 0)
    direction = _parse_direction(raw.get("direction", [0, 0, 1]))
    point = _parse_point(raw.get("point", {}))
    points = _parse_points(raw.get("points"))

    tol = raw.get("tolerances", {})
    _require(isinstance(tol, dict), "tolerances must be an object")
    bound_tol = tol.get("bound_tol")
    bound_tol = bounds.default_tolerance(grid) if bound_tol is None else float(bound_tol)
    eig_tol = float(tol.get("eig_tol", 1e-10))
    _require(bound_tol > 0 and eig_tol > 0, "tolerances must be positive")

    seed = _as_int(raw.get("seed", 0), "seed")
    out = raw.get("output", {})
    _require(isinstance(out, dict), "output must be an object")
    fmt = out.get("format", "json")
    out_path = out.get("path")
    i0 = raw.get("intensity_unit", 1.0)
    _require(isinstance(i0, (int, float)) and i0 > 0, "intensity_unit must be positive")

    if overrides is not None:
        if getattr(overrides, "seed", None) is not None:
            seed = overrides.seed
        if getattr(overrides, "format", None) is not None:
            fmt = overrides.format
        if getattr(overrides, "output", None) is not None:
            out_path = overrides.output
    _require(fmt in ("csv", "json"), "output.format must be csv or json")
    if out_path:
        _require(Path(out_path).parent.is_dir(), f"output directory does not exist: {out_path}")

    state_spec = raw.get("state")
    if state_spec is not None:
        _check_state_spec(state_spec, grid, base_dir)

    opt = raw.get("optimize", {})
    _require(isinstance(opt, dict), "optimize must be an object")
    if "n_photons" in opt:
        _as_int(opt["n_photons"], "optimize.n_photons", 1)
    if "max_iters" in opt:
        _as_int(opt["max_iters"], "optimize.max_iters", 1)
    ver = raw.get("verify", {})
    _require(isinstance(ver, dict), "verify must be an object")

    return RunConfig(
        grid=grid,
        state_spec=state_spec,
        m_photons=m,
        direction=direction,
        point=point,
        points=points,
        bound_tol=bound_tol,
        eig_tol=eig_tol,
        seed=seed,
        output_format=fmt,
        output_path=Path(out_path) if out_path else None,
        intensity_unit=float(i0),
        optimize=opt,
        verify=ver,
        base_dir=base_dir,
    )


def build_state(cfg: RunConfig) -> LightState:
    spec = cfg.state_spec
    _require(spec is not None, "this command needs a state")
    grid = cfg.grid
    if "path" in spec:
        try:
            state = state_from_dict(json.loads((cfg.base_dir / spec["path"]).read_text()))
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"cannot read state file: {exc}") from None
        _require(state.grid.same_as(grid), "state file grid differs from config grid")
        return state
    if "components" in spec:
        try:
            state = state_from_dict({
                "format": "photonbound.state",
                "version": 1,
                "grid": {"n_alpha": grid.n_alpha, "n_beta": grid.n_beta},
                "components": spec["components"],
            })
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"invalid explicit state: {exc}") from None
        return state

    preset = spec["preset"]
    if preset == "vacuum":
        return vacuum(grid)
    if preset == "random-symmetric":
        return fock_state(random_symmetric_state(grid, spec["n_photons"], cfg.seed))

    if preset == "noon-two-mode" or preset == "two-mode-coherent":
        ia = spec.get("alpha_index", grid.n_alpha - 1)
        ib = spec.get("beta_index", 0)
        a = grid.index(ia, ib, 1, "s")
        b = grid.index(ia, (ib + grid.n_beta // 2) % grid.n_beta, 1, "s")
        if preset == "noon-two-mode":
            return fock_state(noon_amplitude(grid, a, b, spec["n_photons"]))
        f = two_mode_coherent_mode(grid, a, b)
    else:
        f = optimal_coherent_mode(grid, cfg.direction)
    if "mean_photons" in spec:
        return poisson_superposition(f, float(spec["mean_photons"]), spec.get("cutoff"))
    return fock_state(coherent_amplitude(f, spec["n_photons"]))


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _emit(text: str, path: Path | None):
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        path.write_text(text if text.endswith("\n") else text + "\n")


# --- commands ----------------------------------------------------------------


def cmd_rate(cfg: RunConfig, args) -> int:
    state = build_state(cfg)
    report = bounds.check_bound(state, cfg.m_photons, cfg.direction, cfg.bound_tol, cfg.point, cfg.constants)
    out = report.to_dict()
    out["bound_report"] = bounds.state_bound(state, cfg.m_photons, cfg.direction, cfg.constants).to_dict()
    _emit(_dump(out), cfg.output_path)
    return EXIT_OK


def cmd_pattern(cfg: RunConfig, args) -> int:
    _require(cfg.points, "pattern needs points (a list or a raster)")
    state = build_state(cfg)
    values = rates.pattern(state, cfg.m_photons, cfg.direction, cfg.points, cfg.constants,
                           threads=args.threads)
    if cfg.output_format == "csv":
        text = rates.pattern_to_csv(cfg.points, values)
    else:
        text = rates.pattern_to_json(cfg.points, values)
    bound = bounds.state_bound(state, cfg.m_photons, cfg.direction, cfg.constants).bound
    i = int(np.argmax(values))
    summary = {
        "max": values[i],
        "argmax": cfg.points[i].to_dict(),
        "bound": bound,
        "max_ratio": values[i] / bound if bound > 0 else 0.0,
        "points": len(values),
    }
    if cfg.output_path is None:
        sys.stdout.write(text)
        sys.stderr.write(_dump(summary) + "\n")
    else:
        cfg.output_path.write_text(text)
        sys.stdout.write(_dump(summary) + "\n")
    if bound > 0 and summary["max_ratio"] > 1 + cfg.bound_tol:
        sys.stderr.write(f"bound violated: peak ratio {summary['max_ratio']!r}\n")
        return EXIT_BOUND
    return EXIT_OK


def cmd_optimize(cfg: RunConfig, args) -> int:
    n = cfg.optimize.get("n_photons")
    if n is None and cfg.state_spec is not None:
        n = cfg.state_spec.get("n_photons")
    _require(n is not None, "optimize needs optimize.n_photons")
    op = RateOperator(cfg.grid, n, cfg.m_photons, cfg.direction, cfg.point, cfg.constants)
    result = power_iteration(op, seed=cfg.seed, max_iters=cfg.optimize.get("max_iters", 1000),
                             residual_tol=cfg.eig_tol)
    bound = bounds.fock_bound(n, cfg.m_photons, cfg.constants)
    geo = bounds.geometric_factor(cfg.grid, cfg.m_photons, cfg.direction) * (3 * math.pi) ** cfg.m_photons
    out = result.to_dict()
    out.update({
        "m_photons": cfg.m_photons,
        "bound": bound,
        "ratio_to_bound": result.max_rate / bound if bound > 0 else 0.0,
        "ratio_to_grid_bound": result.max_rate / (bound * geo) if bound > 0 else 0.0,
        "seed": cfg.seed,
    })
    sys.stdout.write(_dump(out) + "\n")
    if cfg.output_path is not None:
        cfg.output_path.write_text(_dump(state_to_dict(fock_state(result.argmax))) + "\n")
    if bound > 0 and out["ratio_to_bound"] > 1 + cfg.bound_tol:
        return EXIT_BOUND
    return EXIT_OK


def _check_dense_rate(cfg, seed, scale):
    grid = build_grid(*cfg.verify.get("dense_grid", [2, 2]))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(int(cfg.verify.get("dense_cases", 20))):
        n = 1 + i % 2
        m = int(rng.integers(0, n + 1))
        amp = random_symmetric_state(grid, n, seed + i)
        p = Direction.random(rng)
        pt = FieldPoint(float(rng.uniform(0, 3)), float(rng.uniform(0, 2 * math.pi)), float(rng.uniform(-3, 3)))
        fast = rates.fock_rate(amp, m, p, pt) * scale
        slow = oracle.dense_rate(amp, m, p, pt)
        worst = max(worst, abs(fast - slow) / abs(slow))
    return worst <= 1e-12, f"max rel diff {worst:.2e} (tol 1e-12)"


def _check_mc(cfg, seed, scale):
    samples = int(cfg.verify.get("mc_samples", 200_000))
    est, err = oracle.mc_angular_integral(cfg.direction, samples, seed)
    est *= scale
    dev = abs(est - ANGULAR_INTEGRAL_EXACT)
    return dev <= 4 * err, f"estimate {est:.6f} +- {err:.1e}, |dev| = {dev / err:.2f} stderr (tol 4)"


def _check_dense_eigen(cfg, seed, scale):
    grid = build_grid(*cfg.verify.get("dense_grid", [2, 2]))
    worst = 0.0
    for n, m in ((2, 2), (2, 1), (1, 1)):
        op = RateOperator(grid, n, m, cfg.direction)
        value, _ = oracle.dense_top_eigenpair(op)
        res = power_iteration(op, seed=seed, residual_tol=1e-12)
        worst = max(worst, abs(res.max_rate * scale - value) / value)
    return worst <= 1e-8, f"max rel diff {worst:.2e} (tol 1e-8)"


def _check_bound_sweep(cfg, seed, scale):
    # Against the grid's own geometric factor the coherent optimum sits at
    # ratio 1, so it is swept along with the random states.
    grid = build_grid(*cfg.verify.get("sweep_grid", [4, 4]))
    count = int(cfg.verify.get("sweep_states", 200))
    amps = [coherent_amplitude(optimal_coherent_mode(grid, cfg.direction), 2)]
    amps += [random_symmetric_state(grid, 2, seed + i) for i in range(count)]
    worst = 0.0
    for amp in amps:
        for m in (1, 2):
            grid_bound = bounds.fock_bound(2, m) * (
                bounds.geometric_factor(grid, m, cfg.direction) * (3 * math.pi) ** m)
            r = rates.fock_rate(amp, m, cfg.direction) * scale / grid_bound
            worst = max(worst, r)
    return worst <= 1 + 1e-8, f"max ratio {worst:.3e} over {len(amps)} states (tol 1 + 1e-8)"


def _check_grid_convergence(cfg, seed, scale):
    errs = [e if scale == 1.0 else abs((1 + e) * scale - 1.0)
            for e in bounds.geometric_error_series((8, 16, 32, 64))]
    ok = bounds.errors_monotone(errs) and errs[-1] < 1e-10
    return ok, "errors " + ", ".join(f"{e:.1e}" for e in errs)


def _check_saturation(cfg, seed, scale):
    worst = math.inf
    f = optimal_coherent_mode(cfg.grid, cfg.direction)
    for n, m in ((1, 1), (2, 2), (3, 3), (2, 1), (3, 2)):
        r = rates.fock_rate(coherent_amplitude(f, n), m, cfg.direction) * scale
        worst = min(worst, r / bounds.fock_bound(n, m))
    tol = bounds.default_tolerance(cfg.grid)
    return abs(worst - 1) <= tol, f"min ratio {worst:.12f} (tol {tol:.0e})"


_CHECK_FUNCS = {
    "dense-rate": _check_dense_rate,
    "mc-angular": _check_mc,
    "dense-eigen": _check_dense_eigen,
    "bound-sweep": _check_bound_sweep,
    "grid-convergence": _check_grid_convergence,
    "saturation": _check_saturation,
}


def cmd_verify(cfg: RunConfig, args) -> int:
    fault = getattr(args, "inject_fault", None)
    if fault is not None and fault not in _CHECK_FUNCS:
        raise ConfigError(f"unknown check {fault!r}")
    rows = []
    for name in VERIFY_CHECKS:
        scale = 1.1 if name == fault else 1.0
        ok, detail = _CHECK_FUNCS[name](cfg, cfg.seed, scale)
        rows.append({"check": name, "passed": bool(ok), "detail": detail})
    if cfg.output_format == "json" and cfg.output_path is not None:
        cfg.output_path.write_text(_dump(rows) + "\n")
    width = max(len(r["check"]) for r in rows)
    for r in rows:
        sys.stdout.write(f"{r['check']:<{width}}  {'PASS' if r['passed'] else 'FAIL'}  {r['detail']}\n")
    failed = [r["check"] for r in rows if not r["passed"]]
    if failed:
        sys.stderr.write(f"failed checks: {', '.join(failed)}\n")
        return EXIT_VERIFY
    return EXIT_OK


def cmd_state(cfg: RunConfig | None, args) -> int:
    if args.input is not None:
        src = Path(args.input)
        if not src.is_file():
            raise ConfigError(f"state file not found: {src}")
        try:
            state = state_from_dict(json.loads(src.read_text()))
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"cannot read state file: {exc}") from None
    else:
        if cfg is None:
            raise ConfigError("state needs --input or --config")
        state = build_state(cfg)
    if args.densify:
        state = LightState(state.grid, tuple((c, a.to_dense()) for c, a in state.components))
    if args.summary:
        comps = []
        for c, a in state.components:
            norm = a.norm2() if a.is_product else weighted_norm2(a.values, state.grid.weights)
            comps.append({"n_photons": a.n_photons, "probability": abs(c) ** 2,
                          "form": "product" if a.is_product else "tensor", "norm": norm})
        text = _dump({"grid": state.grid.to_dict(include_nodes=False), "modes": state.grid.size,
                      "components": comps})
    else:
        text = _dump(state_to_dict(state))
    out = args.output if args.output is not None else (cfg.output_path if cfg else None)
    _emit(text, Path(out) if out else None)
    return EXIT_OK


COMMANDS = {
    "rate": cmd_rate,
    "pattern": cmd_pattern,
    "optimize": cmd_optimize,
    "verify": cmd_verify,
    "state": cmd_state,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--threads", type=int, default=1, help="worker threads for pattern rasters")
    common.add_argument("--output", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")

    parser = argparse.ArgumentParser(
        prog="photonbound",
        description="Multiphoton absorption rates of monochromatic light and their quantum bound.",
        epilog="Exit codes: 0 ok, 1 config error, 2 runtime/size error, "
        "3 verification failure, 4 bound violation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("rate", parents=[common], help="rate, bound and ratio at one point (JSON)")
    sub.add_parser(
        "pattern",
        parents=[common],
        help="rate over a set of points",
        description="Writes CSV columns rho,phi,zeta,rate ('.' decimal, rate in units of I0^M) "
        "or the same rows as JSON; prints a max/argmax summary.",
    )
    sub.add_parser("optimize", parents=[common], help="power iteration for the rate maximizer")
    p_verify = sub.add_parser("verify", parents=[common], help="run the oracle cross-check battery")
    p_verify.add_argument("--inject-fault", dest="inject_fault", help=argparse.SUPPRESS)
    p_state = sub.add_parser("state", parents=[common], help="build, inspect or convert state files")
    p_state.add_argument("--input", help="existing state JSON to read")
    p_state.add_argument("--densify", action="store_true", help="store every component as a tensor")
    p_state.add_argument("--summary", action="store_true", help="print a summary instead of the state")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = None
        if args.config is not None:
            cfg = load_config(args.config, overrides=args)
        elif args.command != "state":
            cfg = parse_config({}, overrides=args)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except BoundViolationError as exc:
        sys.stderr.write(f"bound violation: {exc}\n")
        return EXIT_BOUND
    except (PhotonBoundError, MemoryError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_RUNTIME
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
