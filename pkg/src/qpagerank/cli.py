"""Command-line interface: ``qpagerank {generate,rank,stability,powerlaw}``.

Exit codes: 0 success, 2 usage error, 3 numeric/convergence error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, svg
from .analysis import (
    Algorithm,
    GeneratorConfig,
    default_algorithms,
    default_alpha_grid,
    ensemble_run,
    fidelity,
    format_csv,
    powerlaw_fit,
    rank_nodes,
    sorted_pagerank_pipeline,
    stability_pipeline,
    stability_report,
)
from .classical import classical_pagerank
from .errors import ConvergenceError, DomainError, NumericError, ParseError, QPageRankError
from .google import DEFAULT_ALPHA, google_from_graph
from .graph import (
    ErdosRenyiParams,
    ScaleFreeParams,
    format_edge_list,
    generate_erdos_renyi,
    generate_scale_free,
    load_edge_list,
)
from .qrank import APRScheme, SchemeKind, default_steps, run_quantum_pagerank

log = logging.getLogger("qpagerank")

SCHEMA_VERSION = 1

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class UsageError(QPageRankError):
    pass


_ANGLE = re.compile(r"^\s*([+-]?)\s*(\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$", re.IGNORECASE)


def parse_angle(text: str) -> float:
    """Radians from ``'1.5707963'``, ``'pi'``, ``'pi/2'``, ``'-pi/10'`` or ``'3pi/4'``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _ANGLE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}")
    sign, coef, den = m.groups()
    val = (float(coef) if coef not in ("", ".") else 1.0) * math.pi
    if den:
        val /= float(den)
    return -val if sign == "-" else val


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            a, b, s = (float(x) for x in text.split(":"))
            if s <= 0 or b < a:
                raise ValueError
            return default_alpha_grid(a, b, s)
        return np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}; use start:stop:step or a,b,c") from None


# -- config / envelope -------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    graph: str | None = None
    model: str | None = None
    nodes: int | None = None
    seed: int = 0
    p_edge: float = 0.1
    alpha: float = DEFAULT_ALPHA
    scheme: str = "standard"
    theta: float = math.pi / 2
    steps: int | None = None
    out: str = "."
    plot: bool = False
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.graph is None and self.model is None:
            raise UsageError("give --graph FILE or --model MODEL --nodes N")
        if self.model is not None and self.model not in ("scale-free", "erdos-renyi"):
            raise UsageError(f"unknown model {self.model!r}")
        if self.model is not None and self.graph is None and (self.nodes is None or self.nodes < 1):
            raise UsageError("--nodes must be a positive integer")
        if not 0.0 <= self.alpha <= 1.0:
            raise UsageError("--alpha must lie in [0, 1]")
        if self.steps is not None and self.steps < 1:
            raise UsageError("--steps must be >= 1")
        SchemeKind(self.scheme)


@dataclass
class ResultEnvelope:
    schema_version: int
    config: dict
    pageranks: dict = field(default_factory=dict)
    std_devs: dict = field(default_factory=dict)
    rankings: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)
    stability: dict = field(default_factory=dict)
    convergence: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=1, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ResultEnvelope":
        return cls(**json.loads(text))


def _tolist(x):
    return np.asarray(x).tolist()


# -- helpers -----------------------------------------------------------------


def _load_graph(cfg: RunConfig):
    if cfg.graph is not None:
        return load_edge_list(cfg.graph)
    return GeneratorConfig(cfg.model, cfg.nodes, p_edge=cfg.p_edge).generate(cfg.seed)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    log.info("wrote %s", path)


def _algorithms(args, T: int) -> list[Algorithm]:
    algs = default_algorithms(args.theta, T)
    if getattr(args, "algorithms", None):
        wanted = [a.strip() for a in args.algorithms.split(",")]
        unknown = set(wanted) - {a.name for a in algs}
        if unknown:
            raise UsageError(f"unknown algorithm(s): {sorted(unknown)}")
        algs = [a for a in algs if a.name in wanted]
    return algs


# -- commands ----------------------------------------------------------------


def cmd_generate(args) -> int:
    if args.model == "scale-free":
        params = ScaleFreeParams(args.p_alpha, args.p_beta, args.p_gamma, args.delta_in, args.delta_out, args.seed)
        g = generate_scale_free(args.nodes, params)
        meta = {"model": args.model, "nodes": args.nodes, **asdict(params)}
    else:
        params = ErdosRenyiParams(args.p, args.seed)
        g = generate_erdos_renyi(args.nodes, params)
        meta = {"model": args.model, "nodes": args.nodes, **asdict(params)}
    out = Path(args.output)
    _write(out, format_edge_list(g))
    meta.update({"schema_version": SCHEMA_VERSION, "edges": len(g.edges), "version": __version__})
    _write(out.with_name(out.name + ".json"), json.dumps(meta, sort_keys=True, indent=1) + "\n")
    return EXIT_OK


def _rank_config(args) -> RunConfig:
    cfg = RunConfig(
        command="rank",
        graph=args.graph,
        model=args.model,
        nodes=args.nodes,
        seed=args.seed,
        p_edge=args.p,
        alpha=args.alpha,
        scheme=args.scheme,
        theta=args.theta,
        steps=args.steps,
        out=args.out,
        plot=args.plot,
        extra={"classical": args.classical, "quantum": args.quantum, "all_schemes": args.all_schemes,
               "series": args.series},
    )
    cfg.validate()
    return cfg


def cmd_rank(args) -> int:
    cfg = _rank_config(args)
    g = _load_graph(cfg)
    T = cfg.steps or default_steps(g.n)
    G = google_from_graph(g, cfg.alpha)
    want_c = args.classical or args.all_schemes or not args.quantum
    if args.all_schemes:
        schemes = [APRScheme.standard()] + [APRScheme(k, cfg.theta) for k in (SchemeKind.EQUAL, SchemeKind.OPPOSITE, SchemeKind.ALTERNATE)]
    elif args.quantum or not args.classical:
        schemes = [APRScheme(cfg.scheme, cfg.theta) if cfg.scheme != "standard" else APRScheme.standard()]
    else:
        schemes = []

    env = ResultEnvelope(SCHEMA_VERSION, asdict(cfg))
    t0 = time.perf_counter()
    classical = None
    if want_c:
        pr = classical_pagerank(G)
        classical = pr.values
        env.pageranks["classical"] = _tolist(pr.values)
        env.rankings["classical"] = _tolist(rank_nodes(pr.values))
        env.convergence["classical"] = {"converged": True, "iterations": pr.iterations}
    status = EXIT_OK
    series = {}
    for sch in schemes:
        name = sch.kind.value
        res = run_quantum_pagerank(G, sch, T)
        if args.series:
            series[name] = res.instantaneous
        env.pageranks[name] = _tolist(res.averaged.values)
        env.std_devs[name] = _tolist(res.std_dev)
        env.rankings[name] = _tolist(rank_nodes(res.averaged.values))
        env.convergence[name] = {"converged": bool(res.converged), "drift": res.drift, "T": T}
        if classical is not None:
            env.fits.setdefault("fidelity_vs_classical", {})[name] = fidelity(classical, res.averaged.values)
        if not res.converged:
            log.warning("%s: time average not converged (drift %.3e)", name, res.drift)
    env.timing["seconds"] = time.perf_counter() - t0

    out = Path(cfg.out)
    _write(out / "rank.json", env.to_json())
    names = list(env.pageranks)
    _write(out / "rank.csv", format_csv(["node", *names], [np.arange(g.n), *[env.pageranks[k] for k in names]]))
    if env.std_devs:
        sn = list(env.std_devs)
        _write(out / "rank_std.csv", format_csv(["node", *sn], [np.arange(g.n), *[env.std_devs[k] for k in sn]]))
    for name, rows in series.items():
        cols = [np.arange(rows.shape[0]), *rows.T]
        _write(out / f"series_{name}.csv", format_csv(["t", *[str(i) for i in range(g.n)]], cols))
    if cfg.plot:
        _write(out / "rank.svg", svg.bar_chart(env.pageranks, title="PageRank"))
    return status


def _source_args(args) -> RunConfig:
    cfg = RunConfig(
        command=args.command,
        graph=args.graph,
        model=args.model,
        nodes=args.nodes,
        seed=args.seed,
        p_edge=args.p,
        theta=args.theta,
        steps=args.steps,
        out=args.out,
        plot=args.plot,
    )
    cfg.validate()
    return cfg


def cmd_stability(args) -> int:
    cfg = _source_args(args)
    grid = args.grid if args.grid is not None else default_alpha_grid()
    cfg.extra = {"grid": _tolist(grid), "heatmap": args.heatmap, "ensemble": args.ensemble,
                 "master_seed": args.master_seed, "algorithms": args.algorithms}
    env = ResultEnvelope(SCHEMA_VERSION, asdict(cfg))
    t0 = time.perf_counter()
    if args.ensemble:
        if cfg.model is None:
            raise UsageError("--ensemble needs --model and --nodes")
        algs = _algorithms(args, cfg.steps or default_steps(cfg.nodes))
        gen = GeneratorConfig(cfg.model, cfg.nodes, p_edge=cfg.p_edge)
        rep = ensemble_run(gen, args.ensemble, stability_pipeline(algs, grid, args.heatmap),
                           master_seed=args.master_seed, threads=args.threads)
        curves = {a.name: rep.mean[f"curve:{a.name}"] for a in algs}
        heat = {a.name: rep.mean[f"heatmap:{a.name}"] for a in algs} if args.heatmap else {}
        conv = {a.name: _tolist(rep.mean[f"converged:{a.name}"]) for a in algs}
        env.stability["seeds"] = rep.seeds
    else:
        g = _load_graph(cfg)
        algs = _algorithms(args, cfg.steps or default_steps(g.n))
        rep = stability_report(g, algs, grid, heatmap=args.heatmap)
        curves, heat = rep.fidelities, rep.heatmaps
        conv = {k: _tolist(v.astype(float)) for k, v in rep.converged.items()}
    env.stability.update({
        "alphas": _tolist(grid),
        "alpha_ref": DEFAULT_ALPHA,
        "curves": {k: _tolist(v) for k, v in curves.items()},
        "minima": {k: float(np.min(v)) for k, v in curves.items()},
    })
    if heat:
        env.stability["heatmap_minima"] = {k: float(np.min(v)) for k, v in heat.items()}
    env.convergence = conv
    env.timing["seconds"] = time.perf_counter() - t0

    out = Path(cfg.out)
    _write(out / "stability.json", env.to_json())
    names = list(curves)
    _write(out / "stability.csv", format_csv(["alpha", *names], [grid, *[curves[k] for k in names]]))
    for k, M in heat.items():
        _write(out / f"heatmap_{k}.csv", format_csv([f"{a:.17g}" for a in grid], list(np.asarray(M).T)))
    if cfg.plot:
        _write(out / "stability.svg", svg.line_chart(grid, curves, title="Fidelity vs damping"))
        for k, M in heat.items():
            _write(out / f"heatmap_{k}.svg", svg.heatmap(grid, M, title=f"{k}: fidelity over (alpha, alpha')"))
    return EXIT_OK


def _fit_or_none(values, alg: Algorithm, tail_cut: bool):
    use = tail_cut and alg.tail_tol is not None
    try:
        return powerlaw_fit(values, use_tail_cut=use, rel_tol=alg.tail_tol or 0.0)
    except DomainError as exc:
        log.warning("%s: %s", alg.name, exc)
        return None


def cmd_powerlaw(args) -> int:
    cfg = _source_args(args)
    cfg.extra = {"ensemble": args.ensemble, "master_seed": args.master_seed, "tail_cut": not args.no_tail_cut,
                 "algorithms": args.algorithms}
    env = ResultEnvelope(SCHEMA_VERSION, asdict(cfg))
    t0 = time.perf_counter()
    if args.ensemble:
        if cfg.model is None:
            raise UsageError("--ensemble needs --model and --nodes")
        algs = _algorithms(args, cfg.steps or default_steps(cfg.nodes))
        gen = GeneratorConfig(cfg.model, cfg.nodes, p_edge=cfg.p_edge)
        rep = ensemble_run(gen, args.ensemble, sorted_pagerank_pipeline(algs),
                           master_seed=args.master_seed, threads=args.threads)
        curves = {a.name: rep.mean[f"sorted:{a.name}"] for a in algs}
        env.fits["seeds"] = rep.seeds
    else:
        g = _load_graph(cfg)
        algs = _algorithms(args, cfg.steps or default_steps(g.n))
        curves = {}
        for a in algs:
            vals, _, _ = a.run(g, DEFAULT_ALPHA)
            curves[a.name] = np.sort(vals)[::-1]
    fits = {}
    for a in algs:
        f = _fit_or_none(curves[a.name], a, not args.no_tail_cut)
        fits[a.name] = f.to_dict() if f else None
    env.fits["powerlaw"] = fits
    env.pageranks = {k: _tolist(v) for k, v in curves.items()}
    env.timing["seconds"] = time.perf_counter() - t0

    out = Path(cfg.out)
    _write(out / "powerlaw.json", env.to_json())
    names = list(curves)
    n = len(next(iter(curves.values())))
    _write(out / "powerlaw.csv", format_csv(["index", *names], [np.arange(1, n + 1), *[curves[k] for k in names]]))
    if cfg.plot:
        fl = {k: (v["beta"], v["intercept"], v["cut_index"]) for k, v in fits.items() if v}
        _write(out / "powerlaw.svg", svg.loglog_chart(curves, fl, title="Sorted PageRank"))
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _add_source(p, with_ensemble: bool = False):
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--model", choices=["scale-free", "erdos-renyi"], help="generate the graph instead")
    p.add_argument("--nodes", type=int, help="node count for --model")
    p.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    p.add_argument("--p", type=float, default=0.1, help="Erdos-Renyi edge probability (default 0.1)")
    p.add_argument("--theta", type=parse_angle, default=math.pi / 2, help="APR phase, e.g. pi/2 (default)")
    p.add_argument("--steps", type=int, help="quantum time steps T (default 4000 if n<=16 else 1000)")
    p.add_argument("-o", "--out", default=".", help="output directory")
    p.add_argument("--plot", action="store_true", help="also emit SVG plots")
    if with_ensemble:
        p.add_argument("--ensemble", type=int, default=0, metavar="N", help="average over N generated graphs")
        p.add_argument("--master-seed", type=int, default=0, help="ensemble master seed")
        p.add_argument("--threads", type=int, default=None, help="worker threads (default $QWR_THREADS or 1)")
        p.add_argument("--algorithms", help="comma list from classical,standard,equal,opposite,alternate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpagerank", description="Classical and phase-generalized quantum PageRank.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random graph as an edge list")
    p.add_argument("--model", choices=["scale-free", "erdos-renyi"], required=True)
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, default=0.1, help="Erdos-Renyi edge probability")
    p.add_argument("--p-alpha", type=float, default=0.41)
    p.add_argument("--p-beta", type=float, default=0.54)
    p.add_argument("--p-gamma", type=float, default=0.05)
    p.add_argument("--delta-in", type=float, default=0.2)
    p.add_argument("--delta-out", type=float, default=0.0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("rank", help="classical and/or quantum PageRank of one graph")
    _add_source(p)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--classical", action="store_true")
    p.add_argument("--quantum", action="store_true")
    p.add_argument("--scheme", choices=[k.value for k in SchemeKind], default="standard")
    p.add_argument("--all-schemes", action="store_true", help="classical plus all four quantum variants")
    p.add_argument("--series", action="store_true", help="also write each instantaneous series as series_<scheme>.csv")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("stability", help="fidelity against alpha=0.85 over a damping grid")
    _add_source(p, with_ensemble=True)
    p.add_argument("--grid", type=parse_grid, default=None, help="start:stop:step (default 0.10:0.99:0.01)")
    p.add_argument("--heatmap", action="store_true", help="also compute the (alpha, alpha') matrix")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("powerlaw", help="log-log fit of the sorted PageRank")
    _add_source(p, with_ensemble=True)
    p.add_argument("--no-tail-cut", action="store_true", help="fit over all nodes")
    p.set_defaults(func=cmd_powerlaw)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, DomainError, ValueError) as exc:
        if isinstance(exc, ParseError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, ConvergenceError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except QPageRankError as exc:
        cause = exc.__cause__
        if isinstance(cause, (NumericError, ConvergenceError)):
            print(f"numeric error: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
