"""Command-line front end.

Every subcommand reads an optional JSON config (model fields at the top level
or under ``"params"``; other keys are subcommand options), applies flag
overrides, and writes CSV or JSON. CSV output starts with one ``#`` line
holding the resolved configuration as JSON.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .bounds import (
    BoundError,
    default_family_count,
    first_order_bound_interaction,
    first_order_bound_schrodinger,
    optimize_cost_first_order,
    optimize_cost_second_order,
    second_order_bound_schrodinger,
)
from .hamiltonian import build_interaction, build_schrodinger, term_counts
from .mixed import MixedError, build_O_N_vector, diagonal_mixture, evolve_vectorized, mixed_statistics
from .model import ModelParams, ParamError, validate
from .partition import export_graph, partition_greedy, partition_structured
from .pauli import DenseLimitError, to_dense
from .resources import BudgetConfig, ResourceError, resource_report
from .sim import (
    SimError,
    apply_schedule,
    error_metrics,
    exact_interaction_propagator,
    exact_unitary,
    jc_simulate,
    jc_survival,
    spectral_norm,
)
from .trotter import ScheduleError, schedule_blocks, schedule_interaction

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

DEFAULT_PARAMS = {"n_modes": 3, "trunc_bits": 2, "mode_freqs": [1.0] * 3, "atom_freq": 1.0,
                  "couplings": [1.0] * 3}
MODEL_KEYS = ("n_modes", "trunc_bits", "mode_freqs", "atom_freq", "couplings", "resonance_tol")


class ConfigError(ValueError):
    pass


# config


def _load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return raw


def _params(cfg: dict[str, Any]) -> ModelParams:
    if "params" in cfg:
        raw = cfg["params"]
    elif any(k in cfg for k in MODEL_KEYS):
        raw = {k: cfg[k] for k in MODEL_KEYS if k in cfg}
    else:
        raw = DEFAULT_PARAMS
    return validate(raw)


def _floats(text: str | None) -> list[float] | None:
    if text is None:
        return None
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc
    if not vals:
        raise ConfigError("sweep axis is empty")
    return vals


def _ints(text: str | None) -> list[int] | None:
    vals = _floats(text)
    if vals is None:
        return None
    if any(not v.is_integer() for v in vals):
        raise ConfigError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def _opt(args: argparse.Namespace, cfg: dict[str, Any], name: str, default: Any) -> Any:
    val = getattr(args, name, None)
    if val is not None:
        return val
    return cfg.get(name, default)


def _nonempty(name: str, vals: Sequence[Any]) -> Sequence[Any]:
    if not vals:
        raise ConfigError(f"sweep axis {name!r} is empty")
    return vals


# output


def _emit(args: argparse.Namespace, name: str, meta: dict[str, Any], header: list[str] | None,
          rows: list[list[Any]] | None, payload: Any = None) -> None:
    fmt = args.format
    if payload is not None or fmt == "json":
        body = payload if payload is not None else {"rows": [dict(zip(header, r)) for r in rows]}
        text = json.dumps({"metadata": meta, **body} if isinstance(body, dict) else
                          {"metadata": meta, "data": body}, indent=2, sort_keys=True) + "\n"
        ext = "json"
    else:
        buf = io.StringIO()
        buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        text = buf.getvalue()
        ext = "csv"
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.{ext}").write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write to {out}: {exc}") from exc


def _fmt(v: Any) -> Any:
    if isinstance(v, float):
        return repr(v)
    return v


def _meta(args: argparse.Namespace, params: ModelParams | None, **extra: Any) -> dict[str, Any]:
    meta: dict[str, Any] = {"command": args.command, "version": __version__}
    if params is not None:
        meta["params"] = params.to_dict()
    meta |= extra
    return meta


def _pool_map(fn: Callable[..., Any], items: list[Any], jobs: int) -> list[Any]:
    if jobs <= 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, *zip(*items)))


# subcommands


def cmd_build(args: argparse.Namespace, cfg: dict[str, Any]) -> None:
    params = _params(cfg)
    picture = _opt(args, cfg, "picture", "schrodinger")
    t = float(_opt(args, cfg, "t", 0.0))
    if picture == "schrodinger":
        parts = build_schrodinger(params)
        ham = {"photon": parts.h_photon.to_text(), "atom": parts.h_atom.to_text(),
               "interaction": parts.h_int.to_text(), "photon_shift": parts.photon_shift}
    else:
        ham = {"interaction": build_interaction(params, t).to_text()}
    payload = {"hamiltonian": ham, "counts": term_counts(params).as_dict()}
    _emit(args, "build", _meta(args, params, picture=picture, t=t), None, None, payload)


def cmd_partition(args: argparse.Namespace, cfg: dict[str, Any]) -> None:
    params = _params(cfg)
    picture = _opt(args, cfg, "picture", "schrodinger")
    t = float(_opt(args, cfg, "t", 0.0))
    method = _opt(args, cfg, "method", "structured")
    h = build_schrodinger(params).h_int if picture == "schrodinger" else build_interaction(params, t)
    if method == "structured":
        part = partition_structured(h, params, picture, t)
    elif method == "greedy":
        part = partition_greedy(h, int(_opt(args, cfg, "seed", 0)))
    else:
        raise ConfigError(f"unknown partition method {method!r}")
    edges, groups = export_graph(h, part)
    meta = _meta(args, params, picture=picture, t=t, method=method)
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "graph.edges").write_text(edges, encoding="utf-8")
    _emit(args, "partition", meta, None, None, json.loads(groups))


def cmd_bound(args: argparse.Namespace, cfg: dict[str, Any]) -> None:
    params = _params(cfg)
    G = int(_opt(args, cfg, "G", default_family_count(params)))
    T = float(_opt(args, cfg, "T", 1.0))
    picture = _opt(args, cfg, "picture", "schrodinger")
    nts = _nonempty("nt", _ints(args.nt) or cfg.get("nt", [2**i for i in range(8)]))
    rows = []
    for n in nts:
        if picture == "schrodinger":
            b1 = first_order_bound_schrodinger(params, G, T, n).epsilon_bound
            b2 = second_order_bound_schrodinger(params, G, T, n).epsilon_bound
            rows.append([n, b1, b2])
        else:
            rows.append([n, first_order_bound_interaction(params, G, T, n).epsilon_bound, ""])
    _emit(args, "bound", _meta(args, params, G=G, T=T, picture=picture),
          ["N_T", "bound_order1", "bound_order2"], rows)


def cmd_plan(args: argparse.Namespace, cfg: dict[str, Any]) -> None:
    params = _params(cfg)
    G = int(_opt(args, cfg, "G", default_family_count(params)))
    t = float(_opt(args, cfg, "t", 1.0))
    epss = _nonempty("eps", _floats(args.eps) or cfg.get("eps", [0.1]))
    orders = [args.order] if args.order else cfg.get("order", [1, 2])
    orders = orders if isinstance(orders, list) else [orders]
    plans = []
    for eps in epss:
        for o in orders:
            fn = optimize_cost_first_order if int(o) == 1 else optimize_cost_second_order
            plans.append({"eps": eps} | fn(params, G, t, eps).to_json())
    _emit(args, "plan", _meta(args, params, G=G, t=t), None, None, {"plans": plans})


def _random_state(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _simulate_point(params: ModelParams, G: int, T: float, n: int, order: int, ordering: str,
                    seed: int) -> list[Any]:
    parts = build_schrodinger(params)
    part = partition_structured(parts.h_int, params)
    blocks = [[(c.real, s.label) for c, s in parts.h0 if not s.is_identity]]
    terms = parts.h_int.terms
    for g in part.groups:
        blocks.append([(terms[i][0].real, terms[i][1].label) for i in g])
    s = schedule_blocks(blocks, params.n_qubits, T, n, order, ordering, seed)
    U = exact_unitary(to_dense(parts.total()), T)
    psi0 = _random_state(U.shape[0], seed)
    m = error_metrics(s, U, psi0)
    bound = (first_order_bound_schrodinger if order == 1 else second_order_bound_schrodinger)(
        params, G, T, n).epsilon_bound
    return [n, bound, m.operator_error, m.state_error, seed]


def cmd_simulate(args: argparse.Namespace, cfg: dict[str, Any]) -> None:
    params = _params(cfg)
    if _opt(args, cfg, "picture", "schrodinger") != "schrodinger":
        raise ConfigError("simulate runs the Schrodinger picture; use 'interaction' instead")
    G = int(_opt(args, cfg, "G", default_family_count(params)))
    T = float(_opt(args, cfg, "T", 1.0))
    order = int(args.order or cfg.get("order", 1))
    ordering = _opt(args, cfg, "ordering", "fixed")
    nts = _nonempty("nt", _ints(args.nt) or cfg.get("nt", [2**i for i in range(8)]))
    seeds = _nonempty("seeds", _ints(args.seeds) or cfg.get("seeds", [args.seed]))
    items = [(params, G, T, n, order, ordering, sd) for n in nts for sd in seeds]
    rows = _pool_map(_simulate_point, items, args.jobs)
    meta = _meta(args, params, G=G, T=T, order=order, ordering=ordering, nt=list(nts),
                 seeds=list(seeds))
    _emit(args, "simulate", meta, ["N_T", "bound", "operator_error", "state_error", "seed"], rows)


def cmd_jc(args: argparse.Namespace, cfg: dict[str, Any]) -> None:
    g = float(_opt(args, cfg, "g", 1.0))
    delta = float(_opt(args, cfg, "delta", 0.0))
    n = int((_ints(args.nt) or [cfg.get("nt", 512)])[0])
    points = int(_opt(args, cfg, "points", 64))
    tmax = float(_opt(args, cfg, "tmax", 2 * math.pi))
    order = int(args.order or cfg.get("order", 1))
    if points < 1:
        raise ConfigError("points must be >= 1")
    times = np.linspace(0.0, tmax, points)
    sim = jc_simulate(g, delta, times, n, order)
    ana = jc_survival(g, delta, times)
    rows = [[float(t), float(a), float(s)] for t, a, s in zip(times, ana, sim)]
    meta = _meta(args, None, g=g, delta=delta, nt=n, points=points, tmax=tmax, order=order)
    _emit(args, "jc", meta, ["t", "P_analytic", "P_simulated"], rows)


def interaction_error(params: ModelParams, t: float, L: int, order: int = 2,
                      integrator: str = "midpoint", ref: np.ndarray | None = None) -> float:
    """Operator error of the sliced interaction-picture propagator with ``L`` slices."""
    ref = exact_interaction_propagator(params, t) if ref is None else ref
    s = schedule_interaction(params, t, L, 1, order, integrator, final_diagonal=False)
    return spectral_norm(ref - apply_schedule(s))


def numerical_slices(params: ModelParams, t: float, eps: float, order: int = 2,
                     L_max: int = 2**16, ref: np.ndarray | None = None) -> int:
    """Smallest ``L`` whose measured error is at most ``eps`` (doubling, then bisection)."""
    ref = exact_interaction_propagator(params, t) if ref is None else ref
    lo, hi = 0, 1
    while interaction_error(params, t, hi, order, ref=ref) > eps:
        lo, hi = hi, hi * 2
        if hi > L_max:
            raise SimError(f"no L <= {L_max} reaches eps={eps}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if interaction_error(params, t, mid, order, ref=ref) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


def cmd_interaction(args: argparse.Namespace, cfg: dict[str, Any]) -> None:
    params = _params(cfg)
    G = int(_opt(args, cfg, "G", default_family_count(params)))
    t = float(_opt(args, cfg, "t", 1.0))
    order = int(args.order or cfg.get("order", 2))
    epss = _nonempty("eps", _floats(args.eps) or cfg.get("eps", [0.1, 0.05, 0.01]))
    ref = exact_interaction_propagator(params, t)
    rows = []
    for eps in epss:
        plan = (optimize_cost_first_order if order == 1 else optimize_cost_second_order)(
            params, G, t, eps)
        rows.append([eps, numerical_slices(params, t, eps, order, ref=ref), plan.L])
    _emit(args, "interaction", _meta(args, params, G=G, t=t, order=order),
          ["eps", "L_numerical", "L_theoretical"], rows)


def cmd_mixed(args: argparse.Namespace, cfg: dict[str, Any]) -> None:
    params = _params(cfg)
    n = int((_ints(args.nt) or [cfg.get("nt", 32)])[0])
    order = int(args.order or cfg.get("order", 2))
    times = _nonempty("times", _floats(args.times) or cfg.get("times", [0.0, 0.5, 1.0]))
    weights = cfg.get("weights")
    d = 1 << params.n_qubits
    if weights is None:
        weights = [1.0 if i % 2 == 0 else 0.0 for i in range(d)]
    v0 = diagonal_mixture(weights, params.n_qubits)
    parts = build_schrodinger(params)
    part = partition_structured(parts.h_int, params)
    terms = parts.h_int.terms
    blocks = [[(c.real, s.label) for c, s in parts.h0 if not s.is_identity]]
    blocks += [[(terms[i][0].real, terms[i][1].label) for i in g] for g in part.groups]
    o_n = build_O_N_vector(params, include_atom=True)
    rows = []
    for t in times:
        s = schedule_blocks(blocks, params.n_qubits, t, n, order)
        st = mixed_statistics(evolve_vectorized(s, v0), o_n)
        rows.append([t, st["trace"], st["mean_photon"], st["purity"]])
    meta = _meta(args, params, nt=n, order=order, weights=list(weights))
    _emit(args, "mixed", meta, ["t", "trace", "mean_photon", "purity"], rows)


def cmd_resources(args: argparse.Namespace, cfg: dict[str, Any]) -> None:
    params = _params(cfg)
    G = int(_opt(args, cfg, "G", default_family_count(params)))
    t = float(_opt(args, cfg, "t", 1.0))
    order = int(args.order or cfg.get("order", 2))
    epss = _nonempty("eps", _floats(args.eps) or cfg.get("eps", [0.25]))
    bc = BudgetConfig(**cfg.get("budget", {}))
    reports = []
    for eps in epss:
        plan = (optimize_cost_first_order if order == 1 else optimize_cost_second_order)(
            params, G, t, eps)
        rep = resource_report(plan.total_cost, params.n_qubits, bc)
        reports.append({"eps": eps, "N": params.n_modes, "k": params.trunc_bits,
                        "plan": plan.to_json(), "report": rep.to_json()})
    _emit(args, "resources", _meta(args, params, G=G, t=t, order=order), None, None,
          {"reports": reports})


COMMANDS: dict[str, Callable[[argparse.Namespace, dict[str, Any]], None]] = {
    "build": cmd_build,
    "partition": cmd_partition,
    "bound": cmd_bound,
    "plan": cmd_plan,
    "simulate": cmd_simulate,
    "jc": cmd_jc,
    "interaction": cmd_interaction,
    "mixed": cmd_mixed,
    "resources": cmd_resources,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output directory (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--nt", help="Trotter numbers, comma-separated")
    common.add_argument("--eps", help="target errors, comma-separated")
    common.add_argument("--order", type=int, choices=(1, 2))
    common.add_argument("--picture", choices=("schrodinger", "interaction"))
    common.add_argument("--ordering", choices=("fixed", "randomized"))

    p = argparse.ArgumentParser(prog="ejcm", description="Extended Jaynes-Cummings simulation toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name in ("bound", "simulate"):
            sp.add_argument("--T", dest="T", type=float)
        if name in ("build", "partition", "plan", "interaction", "resources"):
            sp.add_argument("--t", dest="t", type=float)
        if name in ("bound", "plan", "simulate", "interaction", "resources"):
            sp.add_argument("--G", dest="G", type=int)
        if name == "partition":
            sp.add_argument("--method", choices=("structured", "greedy"))
        if name == "simulate":
            sp.add_argument("--seeds", help="seeds, comma-separated")
        if name == "jc":
            sp.add_argument("--g", type=float)
            sp.add_argument("--delta", type=float)
            sp.add_argument("--points", type=int)
            sp.add_argument("--tmax", type=float)
        if name == "mixed":
            sp.add_argument("--times", help="evolution times, comma-separated")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = _load_config(args.config)
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        COMMANDS[args.command](args, cfg)
    except (ConfigError, ParamError, TypeError, KeyError) as exc:
        print(f"ejcm {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BoundError, SimError, ScheduleError, ResourceError, MixedError, DenseLimitError,
            np.linalg.LinAlgError) as exc:
        print(f"ejcm {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
