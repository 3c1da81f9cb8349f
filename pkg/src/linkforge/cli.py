"""Command-line driver: generate, solve, ablate, oracle, validate.

Exit codes: 0 success / feasible, 1 infeasible or invariant breach, 2 usage,
3 I/O or unreadable input.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import instgen
from .evolve import ScoreRule
from .model import StructuralError, validate
from .oracle import OracleLimitError, permutation_oracle, placement_oracle
from .solver import SolveResult, SolverConfig, Variant, solve

log = logging.getLogger("linkforge")

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

RUN_COLUMNS = ["seed", "best_profit", "wall_time", "real_evals", "fuzzy_evals"]
SUMMARY_COLUMNS = ["runs", "max", "ave", "std"]
ABLATION_COLUMNS = ["instance", "variant", "runs", "max", "ave", "std",
                    "mean_real_evals", "mean_fuzzy_evals", "mean_wall_time"]
ABLATION_VARIANTS = (Variant.FULL, Variant.NO_ADAPTIVE_CROSSOVER, Variant.NO_FFEM)


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunManifest:
    instance: Path
    config: SolverConfig
    replications: int
    seed_base: int
    out_dir: Path

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")


def _setup_logging():
    level = os.environ.get("LINKFORGE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_instance(path):
    try:
        return instgen.load(path)
    except OSError as e:
        raise CliError(f"cannot read instance {path}: {e}", EXIT_IO) from None
    except instgen.InstanceFormatError as e:
        raise CliError(f"bad instance {path}: {e}", EXIT_IO) from None


def _write_csv(path, columns, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)


def summarize(values):
    """Max, mean and population standard deviation."""
    v = np.asarray(values, dtype=np.float64)
    return float(v.max()), float(v.mean()), float(v.std(ddof=0))


def check_result(result: SolveResult, instance) -> list[str]:
    problems = []
    violations = validate(result.best_schedule, instance)
    if violations:
        problems.append(f"best schedule infeasible: {violations[:3]}")
    best = [b for _, b in result.convergence]
    if any(b2 < b1 for b1, b2 in zip(best, best[1:])):
        problems.append("convergence series decreases")
    if best[-1] != result.best_profit:
        problems.append("convergence does not end at best_profit")
    return problems


def _solve_one(args):
    instance, config = args
    return solve(instance, config)


def run_replications(instance, config: SolverConfig, seeds, jobs=1) -> list[SolveResult]:
    tasks = [(instance, replace(config, seed=s)) for s in seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_solve_one, tasks))
    return [_solve_one(t) for t in tasks]


def write_solve_outputs(out_dir: Path, seeds, results, instance):
    rows = [[s, repr(r.best_profit), f"{r.wall_time:.6f}", r.real_evals, r.fuzzy_evals]
            for s, r in zip(seeds, results)]
    _write_csv(out_dir / "runs.csv", RUN_COLUMNS, rows)
    mx, ave, std = summarize([r.best_profit for r in results])
    _write_csv(out_dir / "summary.csv", SUMMARY_COLUMNS, [[len(results), repr(mx), repr(ave), repr(std)]])
    for s, r in zip(seeds, results):
        _write_csv(out_dir / "convergence" / f"run-{s}.csv", ["eval_count", "global_best"],
                   [[e, repr(b)] for e, b in r.convergence])
        (out_dir / "schedules").mkdir(parents=True, exist_ok=True)
        instgen.save_schedule(r.best_schedule, instance, out_dir / "schedules" / f"run-{s}.json")


def solver_config(ns, variant=None) -> SolverConfig:
    return SolverConfig(
        pop_size=ns.pop_size, max_evals=ns.max_evals, alpha=ns.alpha, beta=ns.beta,
        epsilon=ns.epsilon, gamma=ns.gamma, tau=ns.tau, thre=ns.thre, theta=ns.theta,
        score_rule=ScoreRule(ns.sco1, ns.sco2, ns.sco3, ns.acceptance),
        initial_score=ns.initial_score, fragment_length=ns.fragment_length,
        variant=Variant(variant or ns.variant), feed_switch=not ns.no_feed_switch,
        eq27_as_printed=ns.eq27_as_printed, seed=ns.seed,
    )


def _parse_tasks(text):
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
            return lo, hi
        n = int(text)
        return n, n
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO..HI, got {text!r}") from None


def cmd_generate(ns) -> int:
    lo, hi = ns.tasks
    if lo < 1 or hi < lo:
        raise CliError("--tasks must be >= 1", EXIT_USAGE)
    base = dict(
        horizon=ns.horizon, n_satellites=ns.satellites, n_stations=ns.stations,
        antennas_per_station=ns.antennas_per_station, pass_length_range=(ns.pass_min, ns.pass_max),
        setup_time=ns.setup_time, min_overlap=ns.min_overlap, switch_interval=ns.switch_interval,
        fs_pair_rate=ns.fs_pair_rate,
    )
    batch = lo != hi or ns.variants > 1
    jobs = []
    if batch:
        out_dir = Path(ns.out_dir)
        k = 0
        for n in range(lo, hi + 1, ns.step):
            for v in range(1, ns.variants + 1):
                jobs.append((out_dir / f"{n}-{v}.json", instgen.GenParams(n, seed=ns.seed + k, **base)))
                k += 1
    else:
        path = Path(ns.output) if ns.output else Path(ns.out_dir) / f"{lo}.json"
        jobs.append((path, instgen.GenParams(lo, seed=ns.seed, **base)))
    for path, params in jobs:
        try:
            inst = instgen.generate(params)
        except instgen.ConfigError as e:
            raise CliError(str(e), EXIT_USAGE) from None
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            instgen.save(inst, path)
        except OSError as e:
            raise CliError(f"cannot write {path}: {e}", EXIT_IO) from None
        lengths = np.array([w.length for w in inst.windows])
        print(f"{path}: tasks={len(inst)} window_len mean={lengths.mean():.1f} "
              f"min={lengths.min()} max={lengths.max()} fs_pairs={len(inst.feed_switch_pairs())}")
    return EXIT_OK


def cmd_solve(ns) -> int:
    instance = _load_instance(ns.instance)
    manifest = RunManifest(Path(ns.instance), solver_config(ns), ns.replications, ns.seed,
                           Path(ns.out_dir))
    seeds = [manifest.seed_base + k for k in range(manifest.replications)]
    results = run_replications(instance, manifest.config, seeds, ns.jobs)
    write_solve_outputs(manifest.out_dir, seeds, results, instance)
    mx, ave, std = summarize([r.best_profit for r in results])
    print(f"runs={len(results)} max={mx:.3f} ave={ave:.3f} std={std:.3f}")
    code = EXIT_OK
    for s, r in zip(seeds, results):
        for p in check_result(r, instance):
            print(f"seed {s}: invariant breach: {p}", file=sys.stderr)
            code = EXIT_INFEASIBLE
    return code


def cmd_ablate(ns) -> int:
    out_dir = Path(ns.out_dir)
    rows, run_rows = [], []
    code = EXIT_OK
    seeds = [ns.seed + k for k in range(ns.replications)]
    for path in ns.instance:
        instance = _load_instance(path)
        name = Path(path).stem
        for variant in ABLATION_VARIANTS:
            results = run_replications(instance, solver_config(ns, variant.value), seeds, ns.jobs)
            for s, r in zip(seeds, results):
                run_rows.append([name, variant.value, s, repr(r.best_profit), f"{r.wall_time:.6f}",
                                 r.real_evals, r.fuzzy_evals])
                if check_result(r, instance):
                    code = EXIT_INFEASIBLE
            mx, ave, std = summarize([r.best_profit for r in results])
            rows.append([name, variant.value, len(results), repr(mx), repr(ave), repr(std),
                         repr(float(np.mean([r.real_evals for r in results]))),
                         repr(float(np.mean([r.fuzzy_evals for r in results]))),
                         f"{np.mean([r.wall_time for r in results]):.6f}"])
            print(f"{name} {variant.value}: ave={ave:.3f} max={mx:.3f}")
    _write_csv(out_dir / "ablation.csv", ABLATION_COLUMNS, rows)
    _write_csv(out_dir / "ablation_runs.csv",
               ["instance", "variant"] + RUN_COLUMNS, run_rows)
    return code


def cmd_oracle(ns) -> int:
    instance = _load_instance(ns.instance)
    fs = not ns.no_feed_switch
    try:
        if ns.kind == "permutation":
            res = permutation_oracle(instance, ns.limit or 8, fs)
            print(f"best_profit={res.best_profit!r} enumerated={res.enumerated} "
                  f"permutation={res.best_permutation.tolist()}")
            schedule = res.best_schedule
        else:
            res = placement_oracle(instance, ns.time_step, ns.limit or 4, fs)
            print(f"best_profit={res.best_profit!r} nodes={res.nodes}")
            schedule = res.best_schedule
    except OracleLimitError as e:
        raise CliError(str(e), EXIT_USAGE) from None
    if ns.output:
        instgen.save_schedule(schedule, instance, ns.output)
    return EXIT_OK


def cmd_validate(ns) -> int:
    instance = _load_instance(ns.instance)
    try:
        doc = instgen.load_schedule(ns.schedule, instance)
    except OSError as e:
        raise CliError(f"cannot read schedule {ns.schedule}: {e}", EXIT_IO) from None
    except (instgen.InstanceFormatError, StructuralError) as e:
        raise CliError(f"bad schedule {ns.schedule}: {e}", EXIT_IO) from None
    violations = validate(doc.schedule, instance)
    ok = True
    for v in violations:
        print(v)
        ok = False
    for t in doc.window_mismatches:
        print(f"task {t}: window id does not match the instance")
        ok = False
    profit = doc.schedule.profit
    if abs(profit - doc.claimed_profit) > 1e-6 * max(1.0, abs(profit)):
        print(f"profit mismatch: file says {doc.claimed_profit!r}, recomputed {profit!r}")
        ok = False
    if not violations:
        print("feasible")
    print(f"profit={profit!r}")
    return EXIT_OK if ok else EXIT_INFEASIBLE


def _solver_flags(p):
    d = SolverConfig()
    g = p.add_argument_group("solver")
    g.add_argument("--pop-size", type=int, default=d.pop_size)
    g.add_argument("--max-evals", type=int, default=d.max_evals)
    g.add_argument("--alpha", type=float, default=d.alpha, help="crossover probability")
    g.add_argument("--beta", type=float, default=d.beta, help="mutation probability")
    g.add_argument("--epsilon", type=float, default=d.epsilon)
    g.add_argument("--gamma", type=float, default=d.gamma)
    g.add_argument("--tau", type=float, default=d.tau, help="emphasis exponent")
    g.add_argument("--thre", type=int, default=d.thre, help="elite retention cutoff")
    g.add_argument("--theta", type=int, default=d.theta, help="weight refresh period")
    g.add_argument("--sco1", type=float, default=d.score_rule.sco1)
    g.add_argument("--sco2", type=float, default=d.score_rule.sco2)
    g.add_argument("--sco3", type=float, default=d.score_rule.sco3)
    g.add_argument("--lambda", dest="acceptance", type=float, default=d.score_rule.acceptance)
    g.add_argument("--initial-score", type=float, default=d.initial_score)
    g.add_argument("--fragment-length", type=int, default=None)
    g.add_argument("--variant", choices=[v.value for v in Variant], default=d.variant.value)
    g.add_argument("--no-feed-switch", action="store_true")
    g.add_argument("--eq27-as-printed", action="store_true",
                   help="use the literal inverted normalisation for operator weights")
    g.add_argument("--replications", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out-dir", default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="linkforge", parents=[common], description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write random instances")
    g.add_argument("--tasks", type=_parse_tasks, required=True, help="N or LO..HI")
    g.add_argument("--step", type=int, default=100)
    g.add_argument("--variants", type=int, default=1)
    g.add_argument("-o", "--output")
    gp = instgen.GenParams(1)
    g.add_argument("--horizon", type=int, default=gp.horizon)
    g.add_argument("--satellites", type=int, default=gp.n_satellites)
    g.add_argument("--stations", type=int, default=gp.n_stations)
    g.add_argument("--antennas-per-station", type=int, default=gp.antennas_per_station)
    g.add_argument("--pass-min", type=int, default=gp.pass_length_range[0])
    g.add_argument("--pass-max", type=int, default=gp.pass_length_range[1])
    g.add_argument("--setup-time", type=int, default=gp.setup_time)
    g.add_argument("--min-overlap", type=int, default=gp.min_overlap)
    g.add_argument("--switch-interval", type=int, default=gp.switch_interval)
    g.add_argument("--fs-pair-rate", type=float, default=gp.fs_pair_rate)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", parents=[common], help="run replicated solves")
    s.add_argument("--instance", required=True)
    _solver_flags(s)
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("ablate", parents=[common], help="full vs w1 vs w2")
    a.add_argument("--instance", required=True, action="append")
    _solver_flags(a)
    a.set_defaults(func=cmd_ablate)

    o = sub.add_parser("oracle", parents=[common], help="exhaustive reference on tiny instances")
    o.add_argument("--instance", required=True)
    o.add_argument("--kind", choices=("permutation", "placement"), default="permutation")
    o.add_argument("--limit", type=int, default=None)
    o.add_argument("--time-step", type=int, default=1)
    o.add_argument("--no-feed-switch", action="store_true")
    o.add_argument("-o", "--output")
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("validate", parents=[common], help="check a schedule file")
    v.add_argument("instance")
    v.add_argument("schedule")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    _setup_logging()
    ns = build_parser().parse_args(argv)
    for key, default in (("seed", 0), ("out_dir", "."), ("jobs", 1)):
        if not hasattr(ns, key):
            setattr(ns, key, default)
    if getattr(ns, "replications", 1) < 1:
        print("linkforge: --replications must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return ns.func(ns)
    except CliError as e:
        print(f"linkforge: {e}", file=sys.stderr)
        return e.code
    except ValueError as e:
        print(f"linkforge: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
