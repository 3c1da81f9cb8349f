"""The evolutionary main loop with fuzzy evaluation, adaptive crossover and
early elite retention."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import evolve
from .decode import decode, decode_profit, random_chromosome
from .evolve import OperatorPortfolio, ScoreRule
from .ffem import Baseline, FfemConfig, Method, evaluate_offspring
from .model import Instance, Schedule, profit_upper_bound

_STREAMS = ("init", "parent", "operator", "crossover", "mutation", "gate")


class Variant(str, Enum):
    FULL = "full"
    NO_ADAPTIVE_CROSSOVER = "w1"  # equal operator weights forever
    NO_FFEM = "w2"  # every evaluation real
    PLAIN_GA = "plain"

    @property
    def adaptive(self) -> bool:
        return self in (Variant.FULL, Variant.NO_FFEM)

    @property
    def fuzzy(self) -> bool:
        return self in (Variant.FULL, Variant.NO_ADAPTIVE_CROSSOVER)


@dataclass(frozen=True)
class SolverConfig:
    pop_size: int = 10
    max_evals: int = 5000
    alpha: float = 0.9  # crossover probability
    beta: float = 0.1  # mutation probability
    epsilon: float = 0.9
    gamma: float = 1.0
    tau: float = 0.05
    thre: int = 500
    theta: int = 100
    score_rule: ScoreRule = field(default_factory=ScoreRule)
    initial_score: float = 10.0
    fragment_length: int | None = None  # None: max(2, n // 20)
    variant: Variant = Variant.FULL
    feed_switch: bool = True
    eq27_as_printed: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2")
        if self.max_evals < self.pop_size:
            raise ValueError("max_evals must be >= pop_size")
        for name in ("alpha", "beta", "epsilon"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.theta < 1:
            raise ValueError("theta must be >= 1")

    def ffem(self) -> FfemConfig:
        eps = self.epsilon if self.variant.fuzzy else 0.0
        return FfemConfig(epsilon=eps, gamma=self.gamma, tau=self.tau)


@dataclass
class SolveResult:
    best_profit: float
    best_genes: np.ndarray
    best_schedule: Schedule
    convergence: list[tuple[int, float]]
    real_evals: int
    fuzzy_evals: int
    wall_time: float
    operator_history: list[OperatorPortfolio]
    generations: int

    @property
    def evals(self) -> int:
        return self.real_evals + self.fuzzy_evals


def elite_retain(population, values, best_genes, best_value, count, thre):
    """Swap the worst individual for the global best while ``count < thre``.

    Returns new (population, values) lists; the inputs are not modified.
    """
    population, values = list(population), list(values)
    if count < thre and max(values) < best_value:
        worst = int(np.argmin(values))
        population[worst] = np.array(best_genes, copy=True)
        values[worst] = best_value
    return population, values


def solve(instance: Instance, config: SolverConfig) -> SolveResult:
    t0 = time.perf_counter()
    seqs = np.random.SeedSequence(config.seed).spawn(len(_STREAMS))
    rng = {name: np.random.default_rng(s) for name, s in zip(_STREAMS, seqs)}
    n = len(instance)
    L = config.fragment_length or evolve.default_fragment_length(n)
    ffem_cfg = config.ffem()
    fs = config.feed_switch

    def real(genes):
        return decode_profit(genes, instance, fs)

    population = [random_chromosome(instance, rng["init"]) for _ in range(config.pop_size)]
    values = [real(x) for x in population]
    n_real, n_fuzzy = len(population), 0
    eval_count = len(population)

    k = int(np.argmax(values))
    global_best, global_genes = values[k], population[k].copy()
    baseline = Baseline(global_genes.copy(), global_best, profit_upper_bound(instance))
    last_best = global_best
    count = 0
    portfolio = OperatorPortfolio.uniform(config.initial_score,
                                          eq27_as_printed=config.eq27_as_printed)
    history = [portfolio]
    convergence = [(eval_count, global_best)]
    generations = 0

    while eval_count < config.max_evals:
        generations += 1
        op = evolve.select_operator(portfolio, rng["operator"])
        offspring = []
        for _ in range(config.pop_size):
            child = evolve.select_parent(population, values, rng["parent"])
            if rng["crossover"].random() < config.alpha:
                child = evolve.crossover(op, child, L, rng["crossover"])
            offspring.append(evolve.mutate(child, config.beta, rng["mutation"]))

        records = evaluate_offspring(offspring, baseline, ffem_cfg, rng["gate"], real)
        off_values = [r.value for r in records]
        real_now = sum(r.method is Method.REAL for r in records)
        n_real += real_now
        n_fuzzy += len(records) - real_now
        prev_count = eval_count
        eval_count += len(records)

        k = int(np.argmax(off_values))
        local_best = off_values[k]
        if config.variant.adaptive:
            portfolio = evolve.update_score(portfolio, op, local_best, last_best, global_best,
                                            config.score_rule)
        if local_best > global_best:
            # fuzzy values stay below the baseline, so this is a real evaluation
            assert records[k].method is Method.REAL
            global_best, global_genes = local_best, offspring[k].copy()
            baseline.offer(global_genes, global_best)
        else:
            count += 1
        portfolio = replace(portfolio, eval_counter=eval_count)
        if config.variant.adaptive and eval_count // config.theta > prev_count // config.theta:
            portfolio = evolve.recompute_weights(portfolio)
            history.append(portfolio)

        population, values = elite_retain(offspring, off_values, global_genes, global_best,
                                          count, config.thre)
        last_best = local_best
        convergence.append((eval_count, global_best))

    schedule = decode(global_genes, instance, fs)
    return SolveResult(
        best_profit=schedule.profit,
        best_genes=global_genes,
        best_schedule=schedule,
        convergence=convergence,
        real_evals=n_real,
        fuzzy_evals=n_fuzzy,
        wall_time=time.perf_counter() - t0,
        operator_history=history,
        generations=generations,
    )
