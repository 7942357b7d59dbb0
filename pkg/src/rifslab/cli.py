"""``rifslab`` command line: dimension, trace, walk, mn and separation experiments.

Exit codes: 0 ok, 2 invalid config or arguments, 3 solver precondition,
4 budget truncation (partial output kept), 5 mode mismatch.
"""

import argparse
import csv
import json
import logging
import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from ._parallel import parallel_map, worker_count
from .coding import CLT_MASS, CylinderMeasure, estimate_mn_measure
from .config import ConfigError, ExperimentConfig, parse_seeds
from .content import (
    content_trace,
    divergence_summary,
    equicontractive_walk,
    log_running_surrogate,
    running_average_content,
)
from .core import BudgetExceededError, ModeMismatchError, Realization
from .dimension import (
    DegenerateDistributionError,
    almost_sure_dimension,
    is_almost_deterministic,
    similarity_dimension,
)
from .plotting import plot_trace, plot_walks
from .separation import SeparationParams, check_separation, volume_constant
from .walk import lil_envelope

log = logging.getLogger("rifslab")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_BUDGET, EXIT_MODE = 0, 2, 3, 4, 5


class CommandError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def write_csv(path, header, rows, cfg, command):
    with open(path, "w", newline="") as fh:
        fh.write(f"# rifslab config_hash={cfg.hash} command={command}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


class Run:
    """Collects what a command did and writes the manifest next to its outputs."""

    def __init__(self, cfg, command, out, params):
        self.cfg, self.command, self.out = cfg, command, Path(out)
        self.params = params
        self.outputs, self.truncated = [], {}
        self.seeds = []
        self.start = time.perf_counter()
        self.out.mkdir(parents=True, exist_ok=True)

    def path(self, name):
        self.outputs.append(name)
        return self.out / name

    def finish(self):
        manifest = {
            "config_hash": self.cfg.hash,
            "tool_version": __version__,
            "command": self.command,
            "parameters": self.params,
            "seeds": self.seeds,
            "threads": worker_count(),
            "wall_clock_seconds": round(time.perf_counter() - self.start, 6),
            "truncated": self.truncated,
            "outputs": self.outputs,
        }
        (self.out / f"manifest_{self.command}.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _exponent(cfg):
    if cfg.exponent is not None:
        return cfg.exponent
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return almost_sure_dimension(cfg.dist).s
    except DegenerateDistributionError as exc:
        raise CommandError(EXIT_SOLVER, str(exc)) from exc


def cmd_dimension(cfg, args, run):
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            res = almost_sure_dimension(cfg.dist)
    except DegenerateDistributionError as exc:
        raise CommandError(EXIT_SOLVER, str(exc)) from exc
    for w in caught:
        log.warning("%s", w.message)
    det = is_almost_deterministic(cfg.dist)
    rows = [
        (res.s, res.residual, k, similarity_dimension(atom), det is not None)
        for k, atom in enumerate(cfg.dist.atoms)
    ]
    write_csv(run.path("dimension.csv"),
              ["s", "residual", "atom", "similarity_dimension", "almost_deterministic"], rows, cfg, "dimension")
    return EXIT_OK


def _trace_one(cfg, s, seed):
    omega = Realization(cfg.dist, seed)
    mode = "sandwich" if cfg.dist.dim == 1 else "mc"
    return content_trace(omega, s, cfg.grid, mode=mode, max_words=cfg.max_words,
                         samples=cfg.samples, seed=seed)


def cmd_trace(cfg, args, run):
    if cfg.grid is None or cfg.grid.count < 2:
        raise CommandError(EXIT_CONFIG, "trace needs a 'grid' with at least 2 points")
    s = _exponent(cfg)
    traces = parallel_map(lambda seed: _trace_one(cfg, s, seed), run.seeds)
    code = EXIT_OK
    for seed, tr in zip(run.seeds, traces):
        avg_lo, avg_hi = running_average_content(tr) if len(tr) >= 2 else (np.full(len(tr), np.nan),) * 2
        rows = zip(tr.eps, tr.depth, tr.lower, tr.upper, tr.scaled_lower, tr.scaled_upper, avg_lo, avg_hi)
        write_csv(run.path(f"trace_{seed}.csv"),
                  ["epsilon", "depth", "lower", "upper", "scaled_lower", "scaled_upper", "avg_lower", "avg_upper"],
                  rows, cfg, "trace")
        if len(tr):
            plot_trace(tr, run.path(f"trace_{seed}.svg"), title=f"content trace, seed {seed}, s = {s:.10g}")
        run.truncated[str(seed)] = tr.truncated
        if tr.truncated:
            log.warning("seed %s: trace truncated after %d of %d scales (word budget)", seed, len(tr), cfg.grid.count)
            code = EXIT_BUDGET
    return code


def cmd_walk(cfg, args, run):
    if not cfg.dist.is_equicontractive():
        raise CommandError(EXIT_MODE, "walk needs an equicontractive distribution")
    s = _exponent(cfg)
    depth = args.depth or cfg.depth
    every = max(1, args.every)

    def one(seed):
        return equicontractive_walk(Realization(cfg.dist, seed), s, depth)

    walks = parallel_map(one, run.seeds)
    env = lil_envelope(np.full(depth, walks[0].variance))
    rows, summary = [], []
    for seed, w in zip(run.seeds, walks):
        surrogate = np.exp(log_running_surrogate(w))
        normalized = env.normalize(w.partial_sums)
        for i in range(every - 1, depth, every):
            rows.append((seed, i + 1, w.partial_sums[i], math.exp(w.partial_sums[i]), surrogate[i],
                         env.envelope[i], normalized[i]))
        ds = divergence_summary(w)
        summary.append((seed, ds.length, ds.max_w, ds.argmax, ds.min_w, ds.argmin,
                        ds.scaled_max, ds.scaled_min, surrogate[-1]))
    write_csv(run.path("walk.csv"), ["seed", "n", "W", "exp_W", "surrogate", "envelope", "normalized"],
              rows, cfg, "walk")
    scaled = np.array([r[6] for r in summary])
    finals = np.array([r[8] for r in summary])
    summary.append(("all", depth, max(r[2] for r in summary), "", min(r[4] for r in summary), "",
                    float(np.mean(scaled)), float(np.mean([r[7] for r in summary])), float(np.median(finals))))
    write_csv(run.path("walk_summary.csv"),
              ["seed", "length", "max_W", "argmax", "min_W", "argmin", "scaled_max",
               "scaled_min", "final_surrogate"], summary, cfg, "walk")
    plot_walks([w.partial_sums for w in walks], [env], run.path("walk.svg"),
               labels=[f"seed {sd}" for sd in run.seeds], title=f"equicontractive walk, s = {s:.10g}")
    return EXIT_OK


def cmd_mn(cfg, args, run):
    s = _exponent(cfg)
    n = args.depth or cfg.depth
    samples = args.samples or cfg.samples

    def one(seed):
        m = CylinderMeasure(Realization(cfg.dist, seed), s)
        return estimate_mn_measure(m, n, samples=samples, seed=seed, max_words=cfg.max_words)

    results = parallel_map(one, run.seeds)
    rows = [(seed, r.n, r.estimate, r.stderr, r.exact, CLT_MASS) for seed, r in zip(run.seeds, results)]
    write_csv(run.path("mn.csv"), ["seed", "n", "estimate", "stderr", "exact", "target"], rows, cfg, "mn")
    return EXIT_OK


def cmd_separation(cfg, args, run):
    depth = args.depth or cfg.depth
    seed = run.seeds[0]
    run.seeds = [seed]
    omega = Realization(cfg.dist, seed)
    params = SeparationParams(cfg.gamma, cfg.x0) if cfg.gamma is not None else None
    rows, code = [], EXIT_OK
    for n in range(1, depth + 1):
        try:
            rep = check_separation(omega, n, params, x0=cfg.x0, max_words=cfg.max_words)
        except BudgetExceededError as exc:
            log.warning("%s", exc)
            run.truncated[str(seed)] = True
            code = EXIT_BUDGET
            break
        gamma = rep.gamma
        c0 = volume_constant(gamma, cfg.x0, cfg.dist.r_min, cfg.dist.dim) if gamma > 0 else math.inf
        rows.append((n, rep.achieved, rep.proposed_gamma, gamma, rep.passed, c0))
    write_csv(run.path("separation.csv"), ["depth", "achieved_min", "proposed_gamma", "gamma", "passed", "c0"],
              rows, cfg, "separation")
    return code


COMMANDS = {
    "dimension": cmd_dimension,
    "trace": cmd_trace,
    "walk": cmd_walk,
    "mn": cmd_mn,
    "separation": cmd_separation,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="rifslab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rifslab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON experiment config")
        group = p.add_mutually_exclusive_group()
        group.add_argument("--seed", type=int, help="single seed")
        group.add_argument("--seeds", help="inclusive seed range A..B")
        p.add_argument("--depth", type=int, help="walk depth, central-set level, or separation depth")
        p.add_argument("--samples", type=int, help="Monte Carlo sample count")
        p.add_argument("--out", help="output directory (default: config 'output')")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "walk":
            p.add_argument("--every", type=int, default=1, help="write every k-th level to walk.csv")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="rifslab: %(levelname)s: %(message)s")
    try:
        cfg = ExperimentConfig.load(args.config)
        if args.seed is not None:
            seeds = [args.seed]
        elif args.seeds is not None:
            seeds = parse_seeds(args.seeds)
        else:
            seeds = cfg.seeds
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    params = {k: v for k, v in vars(args).items() if k not in ("config", "verbose") and v is not None}
    params["config"] = str(args.config)
    if args.command == "trace" and (cfg.grid is None or cfg.grid.count < 2):
        log.error("trace needs a 'grid' with at least 2 points")
        return EXIT_CONFIG
    run = Run(cfg, args.command, args.out or cfg.output, params)
    run.seeds = list(seeds)
    try:
        code = COMMANDS[args.command](cfg, args, run)
    except CommandError as exc:
        log.error("%s", exc)
        code = exc.code
    except ModeMismatchError as exc:
        log.error("%s", exc)
        code = EXIT_MODE
    except BudgetExceededError as exc:
        log.error("%s", exc)
        code = EXIT_BUDGET
    run.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
