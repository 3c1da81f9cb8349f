"""Selection, the four single-parent crossover operators, mutation and the
adaptive operator portfolio."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np


class Op(IntEnum):
    DOUBLE_SHORT = 0
    DOUBLE_LONG = 1
    RECOMBINE = 2
    FLIP = 3


N_OPS = len(Op)
WEIGHT_FLOOR = 0.05


@dataclass(frozen=True)
class ScoreRule:
    sco1: float = 30.0
    sco2: float = 20.0
    sco3: float = 10.0
    acceptance: float = 0.95  # lambda

    def __post_init__(self):
        if not self.sco1 >= self.sco2 >= self.sco3 >= 0:
            raise ValueError("need sco1 >= sco2 >= sco3 >= 0")
        if not 0 < self.acceptance <= 1:
            raise ValueError("acceptance must lie in (0, 1]")


@dataclass(frozen=True)
class OperatorPortfolio:
    scores: tuple[float, ...] = (10.0,) * N_OPS
    weights: tuple[float, ...] = (1.0 / N_OPS,) * N_OPS
    eval_counter: int = 0
    floor: float = WEIGHT_FLOOR
    eq27_as_printed: bool = False  # literal inverted normalisation: top score gets the floor

    @classmethod
    def uniform(cls, initial_score: float = 10.0, **kw) -> "OperatorPortfolio":
        if initial_score <= 0:
            raise ValueError("initial score must be positive")
        return cls(scores=(float(initial_score),) * N_OPS, **kw)


def select_operator(portfolio: OperatorPortfolio, rng: np.random.Generator) -> Op:
    w = np.asarray(portfolio.weights, dtype=np.float64)
    return Op(int(rng.choice(N_OPS, p=w / w.sum())))


def select_parent(population, fitness, rng: np.random.Generator):
    """Fitness-proportional (roulette) pick; uniform if every fitness is zero."""
    f = np.asarray(fitness, dtype=np.float64)
    total = f.sum()
    if total <= 0:
        return population[int(rng.integers(len(population)))]
    return population[int(rng.choice(len(population), p=f / total))]


def swap_fragments(genes, first: int, second: int, length: int) -> np.ndarray:
    out = np.array(genes, copy=True)
    a, b = sorted((first, second))
    if b < a + length:
        raise ValueError("fragments overlap")
    out[a:a + length], out[b:b + length] = genes[b:b + length], genes[a:a + length]
    return out


def reverse_fragment(genes, start: int, length: int) -> np.ndarray:
    out = np.array(genes, copy=True)
    out[start:start + length] = out[start:start + length][::-1]
    return out


def shuffle_fragment(genes, start: int, length: int, rng: np.random.Generator) -> np.ndarray:
    out = np.array(genes, copy=True)
    out[start:start + length] = rng.permutation(out[start:start + length])
    return out


def _two_starts(n: int, length: int, rng):
    # first start must leave room for a disjoint second fragment
    left = np.arange(0, n - 2 * length + 1)
    right = np.arange(length, n - length + 1)
    firsts = np.union1d(left, right)
    s1 = int(rng.choice(firsts))
    starts = np.arange(n - length + 1)
    return s1, int(rng.choice(starts[np.abs(starts - s1) >= length]))


def crossover(op: Op, parent, L: int, rng: np.random.Generator) -> np.ndarray:
    """Apply one operator to a single parent; the output is a permutation of it."""
    genes = np.asarray(parent)
    n = len(genes)
    length = L if op is Op.DOUBLE_SHORT else 2 * L
    length = min(length, n // 2)
    if length < 1:
        return genes.copy()
    if op in (Op.DOUBLE_SHORT, Op.DOUBLE_LONG):
        s1, s2 = _two_starts(n, length, rng)
        return swap_fragments(genes, s1, s2, length)
    start = int(rng.integers(0, n - length + 1))
    if op is Op.RECOMBINE:
        return shuffle_fragment(genes, start, length, rng)
    return reverse_fragment(genes, start, length)


def mutate(genes, beta: float, rng: np.random.Generator) -> np.ndarray:
    out = np.array(genes, copy=True)
    if len(out) >= 2 and rng.random() < beta:
        i, j = rng.choice(len(out), size=2, replace=False)
        out[i], out[j] = out[j], out[i]
    return out


def default_fragment_length(n: int) -> int:
    return max(2, n // 20)


def update_score(portfolio: OperatorPortfolio, op: Op, local_best: float, last_best: float,
                 global_best: float, rule: ScoreRule) -> OperatorPortfolio:
    if local_best > global_best:
        inc = rule.sco1
    elif local_best > last_best * rule.acceptance:
        inc = rule.sco2
    else:
        inc = rule.sco3
    scores = list(portfolio.scores)
    scores[op] += inc
    return replace(portfolio, scores=tuple(scores))


def recompute_weights(portfolio: OperatorPortfolio) -> OperatorPortfolio:
    s = np.asarray(portfolio.scores, dtype=np.float64)
    hi, lo = s.max(), s.min()
    if hi > lo:
        if portfolio.eq27_as_printed:
            norm = (hi - s) / (hi - lo)
        else:
            norm = (s - lo) / (hi - lo)
    else:
        norm = np.ones_like(s)
    norm = np.maximum(norm, portfolio.floor)
    w = norm / norm.sum()
    return replace(portfolio, weights=tuple(float(v) for v in w))
