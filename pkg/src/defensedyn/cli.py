"""Command-line front end: ingestion, analysis, simulation, CSV/JSON reports.

One declarative TOML config file describes an experiment (graph, rates,
grids, seeds); command-line flags override individual values.  All outputs
are reproducible bit-for-bit from the config and the master seed.

Exit codes: 0 success, 1 usage/config error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import gzip
import hashlib
import json
import sys
import urllib.request
from dataclasses import dataclass, fields
from pathlib import Path
from typing import IO, Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .bounds import BoundMode, envelope_curves, make_envelope
from .convergence import classify_convergence, speed_indicator
from .dynamics import IntegrationError, ModelParams, Trajectory, integrate
from .equilibrium import EquilibriumError, solve_equilibrium
from .graph import AttackGraph, EdgeListFormatError, load_edge_list
from .spectral import PowerIterationError, classify_regime
from .stochastic import agreement_stats, run_ensemble

__all__ = ["main", "ExperimentConfig", "ConfigError", "DATASETS"]


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


DATASETS = {
    "gnutella": {
        "url": "https://snap.stanford.edu/data/p2p-Gnutella09.txt.gz",
        "filename": "p2p-Gnutella09.txt.gz",
        "directed": True,
        "n": 8114,
        "edge_count": 26013,
    },
    "facebook": {
        "url": "https://snap.stanford.edu/data/facebook_combined.txt.gz",
        "filename": "facebook_combined.txt.gz",
        "directed": False,
        "n": 4039,
        "edge_count": 88234,
    },
}

_NUMERICAL_ERRORS = (PowerIterationError, EquilibriumError, IntegrationError)


# -- configuration --------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """Resolved experiment description (defaults already applied)."""

    # graph
    graph_path: str | None = None
    synthetic: str | None = None
    n: int = 10
    p: float = 0.1
    graph_seed: int = 1
    directed: bool = False
    # rates (floats, or file paths for per-node / per-edge values)
    alpha: float | str = 0.0
    beta: float | str = 0.5
    gamma: float | str = 0.2
    # deterministic integration
    ode_step: float = 0.05
    ode_stride: int = 1
    ode_init: float | None = None
    # chain simulation
    dt: float = 0.05
    runs: int = 50
    init_lo: float = 0.2
    init_hi: float = 0.9
    master_seed: int = 1
    record_stride: int = 1
    # shared horizon / analysis
    t_end: float = 500.0
    window_lo: float = 50.0
    window_hi: float = 500.0
    boundary_tol: float = 1e-6
    bound_mode: str = "Empirical"
    geometric_factor: bool = False
    poly_tol: float = 0.01
    tail_fraction: float = 0.25
    equilibrium_tol: float = 1e-12
    power_tol: float = 1e-12
    max_iter: int = 100_000
    # output
    output_dir: str = "out"
    per_node: bool = False

    def validate(self) -> None:
        if (self.graph_path is None) == (self.synthetic is None):
            raise ConfigError("config needs exactly one of graph.path or graph.synthetic")
        if self.synthetic is not None and self.synthetic not in (
            "cycle",
            "complete",
            "erdos_renyi",
        ):
            raise ConfigError(f"unknown synthetic graph kind {self.synthetic!r}")
        if self.graph_path is not None and not Path(self.graph_path).exists():
            raise ConfigError(f"graph file not found: {self.graph_path}")
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if isinstance(value, str) and not Path(value).exists():
                raise ConfigError(f"{name} file not found: {value}")
        if self.runs < 1:
            raise ConfigError("mc.runs must be >= 1")
        if not (0.0 <= self.init_lo <= self.init_hi <= 1.0):
            raise ConfigError("mc.init_interval must satisfy 0 <= lo <= hi <= 1")
        if self.dt <= 0 or self.ode_step <= 0 or self.t_end <= 0:
            raise ConfigError("dt, ode.step and experiment.t_end must be positive")
        if not (0.0 <= self.window_lo <= self.window_hi <= self.t_end):
            raise ConfigError("experiment.window must lie inside [0, t_end]")
        try:
            BoundMode(self.bound_mode)
        except ValueError:
            raise ConfigError(
                f"analysis.bound_mode must be one of "
                f"{[m.value for m in BoundMode]}, got {self.bound_mode!r}"
            ) from None

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, mapping: dict) -> "ExperimentConfig":
        known = {f.name for f in cls.__dataclass_fields__.values()}
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**mapping)
        cfg.validate()
        return cfg


_SECTION_KEYS = {
    "graph": {
        "path": "graph_path",
        "synthetic": "synthetic",
        "n": "n",
        "p": "p",
        "seed": "graph_seed",
        "directed": "directed",
    },
    "params": {"alpha": "alpha", "beta": "beta", "gamma": "gamma"},
    "ode": {"step": "ode_step", "stride": "ode_stride", "init": "ode_init"},
    "mc": {
        "dt": "dt",
        "runs": "runs",
        "init_interval": ("init_lo", "init_hi"),
        "master_seed": "master_seed",
        "record_stride": "record_stride",
    },
    "experiment": {"t_end": "t_end", "window": ("window_lo", "window_hi")},
    "analysis": {
        "boundary_tol": "boundary_tol",
        "bound_mode": "bound_mode",
        "geometric_factor": "geometric_factor",
        "poly_tol": "poly_tol",
        "tail_fraction": "tail_fraction",
        "equilibrium_tol": "equilibrium_tol",
        "power_tol": "power_tol",
        "max_iter": "max_iter",
    },
    "output": {"dir": "output_dir", "per_node": "per_node"},
}


def load_config(path: str | Path) -> ExperimentConfig:
    """Read a TOML experiment file into a validated :class:`ExperimentConfig`."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path}: {exc}") from None

    flat: dict = {}
    for section, values in doc.items():
        keys = _SECTION_KEYS.get(section)
        if keys is None:
            raise ConfigError(f"unknown config section [{section}]")
        if not isinstance(values, dict):
            raise ConfigError(f"section [{section}] must be a table")
        for key, value in values.items():
            target = keys.get(key)
            if target is None:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            if isinstance(target, tuple):  # two-element interval
                if not (isinstance(value, (list, tuple)) and len(value) == 2):
                    raise ConfigError(f"[{section}].{key} must be a 2-element array")
                flat[target[0]], flat[target[1]] = float(value[0]), float(value[1])
            else:
                flat[target] = value
    return ExperimentConfig.from_dict(flat)


def _apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> None:
    simple = {
        "graph": "graph_path",
        "alpha": "alpha",
        "beta": "beta",
        "gamma": "gamma",
        "t_end": "t_end",
        "step": "ode_step",
        "dt": "dt",
        "runs": "runs",
        "seed": "master_seed",
        "tol": "boundary_tol",
        "max_iter": "max_iter",
        "bound_mode": "bound_mode",
        "out": "output_dir",
    }
    for arg_name, field_name in simple.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            setattr(cfg, field_name, value)
    if getattr(args, "graph", None) is not None:
        cfg.synthetic = None
    if getattr(args, "window", None) is not None:
        cfg.window_lo, cfg.window_hi = args.window
    if getattr(args, "directed", None) is not None:
        cfg.directed = args.directed
    if getattr(args, "per_node", False):
        cfg.per_node = True
    cfg.validate()


# -- config materialization -----------------------------------------------------


def _open_text(path: str | Path) -> IO[str]:
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "rt", encoding="utf-8")


def _build_graph(cfg: ExperimentConfig) -> AttackGraph:
    if cfg.graph_path is not None:
        with _open_text(cfg.graph_path) as fh:
            return load_edge_list(fh, directed=cfg.directed)
    if cfg.synthetic == "cycle":
        return AttackGraph.cycle(cfg.n, directed=cfg.directed)
    if cfg.synthetic == "complete":
        return AttackGraph.complete(cfg.n)
    return AttackGraph.erdos_renyi(cfg.n, cfg.p, seed=cfg.graph_seed, directed=cfg.directed)


def _load_node_values(path: str, n: int, name: str) -> np.ndarray:
    values = []
    with open(path, "rt", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise ConfigError(f"{name} file {path} line {lineno}: not a number") from None
    if len(values) != n:
        raise ConfigError(f"{name} file {path} has {len(values)} values, graph has {n} nodes")
    return np.asarray(values)


def _load_edge_values(path: str) -> dict[tuple[int, int], float]:
    out: dict[tuple[int, int], float] = {}
    with open(path, "rt", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            tokens = text.split()
            if len(tokens) != 3:
                raise ConfigError(f"gamma file {path} line {lineno}: expected 'u v value'")
            try:
                out[(int(tokens[0]), int(tokens[1]))] = float(tokens[2])
            except ValueError:
                raise ConfigError(f"gamma file {path} line {lineno}: bad number") from None
    return out


def _build_params(cfg: ExperimentConfig, g: AttackGraph) -> ModelParams:
    alpha = (
        _load_node_values(cfg.alpha, g.n, "alpha") if isinstance(cfg.alpha, str) else float(cfg.alpha)
    )
    beta = (
        _load_node_values(cfg.beta, g.n, "beta") if isinstance(cfg.beta, str) else float(cfg.beta)
    )
    gamma = _load_edge_values(cfg.gamma) if isinstance(cfg.gamma, str) else float(cfg.gamma)
    try:
        return ModelParams(alpha=alpha, beta=beta, gamma=gamma)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _ode_init(cfg: ExperimentConfig, n: int) -> np.ndarray:
    init = cfg.ode_init
    if init is None:
        init = 0.5 * (cfg.init_lo + cfg.init_hi)
    if not (0.0 <= init <= 1.0):
        raise ConfigError("ode.init must lie in [0, 1]")
    return np.full(n, float(init))


# -- deterministic writers -------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    rows = len(columns[0])
    with open(path, "wt", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for k in range(rows):
            fh.write(",".join(_fmt(col[k]) for col in columns) + "\n")


def _write_json(path: Path, obj: dict) -> None:
    with open(path, "wt", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_trajectory_csv(path: Path, traj: Trajectory, per_node: bool) -> None:
    if per_node:
        header = ["t"] + [f"i_{v}" for v in range(traj.n_nodes)]
        columns = [traj.times] + [traj.states[:, v] for v in range(traj.n_nodes)]
    else:
        header = ["t", "mean_i"]
        columns = [traj.times, traj.mean_series()]
    _write_csv(path, header, columns)


# -- subcommands -----------------------------------------------------------------


def _solve_and_classify(cfg: ExperimentConfig, g: AttackGraph, params: ModelParams):
    result = solve_equilibrium(
        g,
        params,
        tol=cfg.equilibrium_tol,
        boundary_tol=cfg.boundary_tol,
    )
    report = classify_regime(
        g,
        params,
        i_star=result.i_star,
        tol=cfg.boundary_tol,
        power_tol=cfg.power_tol,
        max_iter=cfg.max_iter,
    )
    return result, report


def cmd_spectral(cfg: ExperimentConfig) -> int:
    g = _build_graph(cfg)
    params = _build_params(cfg, g)
    if params.all_alpha_zero and params.homogeneous:
        report = classify_regime(
            g, params, tol=cfg.boundary_tol, power_tol=cfg.power_tol, max_iter=cfg.max_iter
        )
    else:
        _, report = _solve_and_classify(cfg, g, params)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {"graph": g.summary(), "spectral": report.to_dict()}
    _write_json(out / "spectral.json", payload)
    print(f"lambda_A1={report.lambda_A1:.6f} regime={report.regime.value}")
    print(f"wrote {out / 'spectral.json'}")
    return 0


def cmd_equilibrium(cfg: ExperimentConfig) -> int:
    g = _build_graph(cfg)
    params = _build_params(cfg, g)
    result = solve_equilibrium(
        g, params, tol=cfg.equilibrium_tol, boundary_tol=cfg.boundary_tol, with_margin=True
    )
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "equilibrium.json", result.to_dict())
    print(
        f"regime={result.regime.value} mean_i*={float(result.i_star.mean()):.6f} "
        f"residual={result.residual:.3g} iterations={result.iterations}"
    )
    print(f"wrote {out / 'equilibrium.json'}")
    return 0


def cmd_simulate_ode(cfg: ExperimentConfig) -> int:
    g = _build_graph(cfg)
    params = _build_params(cfg, g)
    traj = integrate(
        g, params, _ode_init(cfg, g.n), cfg.t_end, step=cfg.ode_step, stride=cfg.ode_stride
    )
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_trajectory_csv(out / "ode.csv", traj, per_node=cfg.per_node or g.n <= 200)
    print(f"wrote {out / 'ode.csv'} ({len(traj.times)} samples)")
    return 0


def cmd_simulate_mc(cfg: ExperimentConfig) -> int:
    g = _build_graph(cfg)
    params = _build_params(cfg, g)
    runs = run_ensemble(
        g,
        params,
        runs=cfg.runs,
        dt=cfg.dt,
        t_end=cfg.t_end,
        init_interval=(cfg.init_lo, cfg.init_hi),
        master_seed=cfg.master_seed,
        record_stride=cfg.record_stride,
    )
    out = Path(cfg.output_dir)
    (out / "runs").mkdir(parents=True, exist_ok=True)
    for k, run in enumerate(runs):
        _write_csv(out / "runs" / f"run_{k:03d}.csv", ["t", "fraction"], [run.times, run.fraction])
    mean_fraction = np.mean([r.fraction for r in runs], axis=0)
    _write_csv(out / "mc_mean.csv", ["t", "mean_fraction"], [runs[0].times, mean_fraction])
    print(f"wrote {cfg.runs} per-run CSVs under {out / 'runs'} and {out / 'mc_mean.csv'}")
    return 0


def cmd_bounds(cfg: ExperimentConfig) -> int:
    g = _build_graph(cfg)
    params = _build_params(cfg, g)
    result, report = _solve_and_classify(cfg, g, params)
    i0 = _ode_init(cfg, g.n)
    traj = integrate(g, params, i0, cfg.t_end, step=cfg.ode_step, stride=cfg.ode_stride)
    env = make_envelope(
        g,
        params,
        report,
        mode=cfg.bound_mode,
        trajectory=traj,
        geometric_factor=cfg.geometric_factor,
    )
    lower, upper = envelope_curves(env, traj.states[0], params.beta_vector(g.n), traj.times)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "bounds.csv",
        ["t", "mean_lower", "mean_i", "mean_upper"],
        [traj.times, lower.mean(axis=1), traj.mean_series(), upper.mean(axis=1)],
    )
    print(f"wrote {out / 'bounds.csv'} (mode={env.mode.value})")
    return 0


def cmd_speed(cfg: ExperimentConfig) -> int:
    g = _build_graph(cfg)
    params = _build_params(cfg, g)
    traj = integrate(
        g, params, _ode_init(cfg, g.n), cfg.t_end, step=cfg.ode_step, stride=cfg.ode_stride
    )
    series = speed_indicator(traj)
    verdict = classify_convergence(series, tail_fraction=cfg.tail_fraction, poly_tol=cfg.poly_tol)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "speed.csv", ["t", "S"], [series.times, series.S])
    _write_json(out / "speed_verdict.json", verdict.to_dict())
    rate = "" if verdict.rate is None else f" rate={verdict.rate:.4f}"
    print(f"verdict={verdict.kind.value}{rate}")
    print(f"wrote {out / 'speed.csv'} and {out / 'speed_verdict.json'}")
    return 0


def cmd_run(cfg: ExperimentConfig) -> int:
    g = _build_graph(cfg)
    params = _build_params(cfg, g)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        result, report = _solve_and_classify(cfg, g, params)

        # the deterministic trajectory shares the chain's grid exactly
        i0 = _ode_init(cfg, g.n)
        traj = integrate(g, params, i0, cfg.t_end, step=cfg.dt, stride=cfg.record_stride)

        runs = run_ensemble(
            g,
            params,
            runs=cfg.runs,
            dt=cfg.dt,
            t_end=cfg.t_end,
            init_interval=(cfg.init_lo, cfg.init_hi),
            master_seed=cfg.master_seed,
            record_stride=cfg.record_stride,
        )
        ensemble = agreement_stats(runs, traj, (cfg.window_lo, cfg.window_hi))

        env = make_envelope(
            g,
            params,
            report,
            mode=cfg.bound_mode,
            trajectory=traj,
            geometric_factor=cfg.geometric_factor,
        )
        beta_vec = params.beta_vector(g.n)
        lower, upper = envelope_curves(env, traj.states[0], beta_vec, traj.times)

        series = speed_indicator(traj)
        verdict = classify_convergence(
            series, tail_fraction=cfg.tail_fraction, poly_tol=cfg.poly_tol
        )

        ode_path = out / "ode.csv"
        _write_trajectory_csv(ode_path, traj, per_node=cfg.per_node)
        written.append(ode_path)

        ens_path = out / "ensemble.csv"
        _write_csv(
            ens_path,
            ["t", "mean_fraction", "ode_mean", "lower_mean", "upper_mean"],
            [
                ensemble.times,
                ensemble.mean_fraction,
                traj.mean_series(),
                lower.mean(axis=1),
                upper.mean(axis=1),
            ],
        )
        written.append(ens_path)

        bounds_path = out / "bounds.csv"
        _write_csv(
            bounds_path,
            ["t", "mean_lower", "mean_i", "mean_upper"],
            [traj.times, lower.mean(axis=1), traj.mean_series(), upper.mean(axis=1)],
        )
        written.append(bounds_path)

        speed_path = out / "speed.csv"
        _write_csv(speed_path, ["t", "S"], [series.times, series.S])
        written.append(speed_path)

        report_path = out / "report.json"
        _write_json(
            report_path,
            {
                "config": cfg.to_dict(),
                "graph": g.summary(),
                "spectral": report.to_dict(),
                "equilibrium": result.to_dict(),
                "agreement": ensemble.to_dict(),
                "speed_verdict": verdict.to_dict(),
                "bound_mode": env.mode.value,
                "clamp_events": traj.clamp_events,
            },
        )
        written.append(report_path)
    except Exception:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    print(
        f"regime={report.regime.value} mean_i*={float(result.i_star.mean()):.6f} "
        f"m={ensemble.m:.4f} sd={ensemble.sd:.4f} verdict={verdict.kind.value}"
    )
    print(f"wrote {', '.join(p.name for p in written)} in {out}")
    return 0


def cmd_fetch_data(args: argparse.Namespace) -> int:
    names = list(DATASETS) if args.dataset == "all" else [args.dataset]
    if args.sha256 and len(names) != 1:
        raise ConfigError("--sha256 needs a single named dataset")
    target = Path(args.dir)
    target.mkdir(parents=True, exist_ok=True)
    for name in names:
        meta = DATASETS[name]
        dest = target / meta["filename"]
        if not dest.exists():
            print(f"downloading {meta['url']} -> {dest}")
            partial = dest.with_suffix(dest.suffix + ".part")
            try:
                urllib.request.urlretrieve(meta["url"], partial)
                partial.rename(dest)
            finally:
                partial.unlink(missing_ok=True)
        else:
            print(f"{dest} already present")
        if args.sha256:
            digest = hashlib.sha256(dest.read_bytes()).hexdigest()
            if digest != args.sha256.lower():
                dest.unlink()
                raise ConfigError(f"{dest}: sha256 mismatch ({digest})")
        with _open_text(dest) as fh:
            g = load_edge_list(fh, directed=meta["directed"])
        if g.n != meta["n"] or g.edge_count != meta["edge_count"]:
            raise ConfigError(
                f"{dest}: structure mismatch, got n={g.n} edges={g.edge_count}, "
                f"expected n={meta['n']} edges={meta['edge_count']}"
            )
        print(f"{name}: n={g.n} edges={g.edge_count} ok")
    return 0


# -- argument parsing -------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1, numerical failures are reserved for exit 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="TOML experiment file")
    parser.add_argument("--graph", help="override: edge-list path (.gz ok)")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--directed", dest="directed", action="store_true", default=None)
    group.add_argument("--undirected", dest="directed", action="store_false", default=None)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--t-end", dest="t_end", type=float)
    parser.add_argument("--step", type=float, help="override: ode.step")
    parser.add_argument("--dt", type=float, help="override: mc.dt")
    parser.add_argument("--runs", type=int)
    parser.add_argument("--seed", type=int, help="override: mc.master_seed")
    parser.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    parser.add_argument("--tol", type=float, help="override: analysis.boundary_tol")
    parser.add_argument("--max-iter", dest="max_iter", type=int)
    parser.add_argument("--bound-mode", dest="bound_mode", choices=[m.value for m in BoundMode])
    parser.add_argument("--per-node", dest="per_node", action="store_true", default=False)
    parser.add_argument("--out", help="override: output.dir")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="defensedyn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    commands = {
        "spectral": cmd_spectral,
        "equilibrium": cmd_equilibrium,
        "simulate-ode": cmd_simulate_ode,
        "simulate-mc": cmd_simulate_mc,
        "bounds": cmd_bounds,
        "speed": cmd_speed,
        "run": cmd_run,
    }
    for name, func in commands.items():
        p = sub.add_parser(name, parents=[], help=func.__doc__)
        _add_common(p)
        p.set_defaults(func=func)

    fetch = sub.add_parser("fetch-data", help="download the reference graph datasets")
    fetch.add_argument("dataset", choices=["all", *DATASETS], nargs="?", default="all")
    fetch.add_argument("--dir", default="data")
    fetch.add_argument("--sha256", help="expected digest (single dataset only)")
    fetch.set_defaults(func=None)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "fetch-data":
            return cmd_fetch_data(args)
        cfg = load_config(args.config)
        _apply_overrides(cfg, args)
        return args.func(cfg)
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, EdgeListFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
