"""Fuzzy fitness evaluation.

Offspring are scored either by decoding (real) or by a Gaussian similarity to
the best-known baseline chromosome, scaled by the baseline's profit (fuzzy).
A random gate forces a share of offspring onto the real path regardless of
similarity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .model import StructuralError


class Method(str, Enum):
    FUZZY = "fuzzy"
    REAL = "real"


@dataclass(frozen=True)
class FfemConfig:
    epsilon: float = 0.9
    gamma: float = 1.0
    tau: float = 0.05
    mu_one_tol: float = 1e-9

    def __post_init__(self):
        if not 0 <= self.epsilon <= 1:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.gamma <= 0 or self.tau <= 0:
            raise ValueError("gamma and tau must be positive")
        if not 0 < self.mu_one_tol <= 1e-6:
            raise ValueError("mu_one_tol must lie in (0, 1e-6]")


@dataclass
class Baseline:
    """The best real-evaluated chromosome and its profit."""

    genes: np.ndarray
    fitness: float
    upper_bound: float

    @property
    def normalized(self) -> float:
        if self.upper_bound <= 0:
            return 0.0
        return min(max(self.fitness / self.upper_bound, 0.0), 1.0)

    def offer(self, genes: np.ndarray, fitness: float) -> bool:
        if fitness > self.fitness:
            self.genes = np.array(genes, copy=True)
            self.fitness = fitness
            return True
        return False


@dataclass(frozen=True)
class EvalRecord:
    value: float
    method: Method
    mu: float | None = None


def sigma(normalized_fitness: float, config: FfemConfig) -> float:
    # gamma / (e^f)^tau, shared by every gene position
    return config.gamma * math.exp(-config.tau * normalized_fitness)


def similarity(x, center, sig: float) -> float:
    x = np.asarray(x, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    if x.shape != center.shape or x.ndim != 1 or x.size == 0:
        raise StructuralError(f"similarity needs equal non-empty vectors, got {x.shape} vs {center.shape}")
    diff = x - center
    return float(np.mean(np.exp(-(diff * diff) / (sig * sig))))


def evaluate_offspring(
    offspring: Sequence[np.ndarray],
    baseline: Baseline,
    config: FfemConfig,
    rng: np.random.Generator,
    real_eval: Callable[[np.ndarray], float],
) -> list[EvalRecord]:
    """Score a batch; real results better than the baseline replace it afterwards."""
    sig = sigma(baseline.normalized, config)
    center, f_center = baseline.genes, baseline.fitness
    gate = rng.random(len(offspring))
    records = []
    for x, u in zip(offspring, gate):
        if u > config.epsilon:
            records.append(EvalRecord(real_eval(x), Method.REAL))
            continue
        mu = similarity(x, center, sig)
        if mu >= 1.0 - config.mu_one_tol:
            records.append(EvalRecord(real_eval(x), Method.REAL, mu))
        else:
            records.append(EvalRecord(f_center * mu, Method.FUZZY, mu))

    best = None
    for k, r in enumerate(records):
        if r.method is Method.REAL and (best is None or r.value > records[best].value):
            best = k
    if best is not None:
        baseline.offer(offspring[best], records[best].value)
    return records
