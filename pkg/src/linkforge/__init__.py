"""Satellite to ground-station link scheduling with a fuzzy-fitness evolutionary solver."""

from .decode import decode, decode_profit, free_intervals, random_chromosome
from .instgen import GenParams, generate, load, save
from .model import (
    Assignment,
    Instance,
    Schedule,
    StructuralError,
    Violation,
    profit_of,
    profit_upper_bound,
    validate,
)
from .solver import SolveResult, SolverConfig, Variant, solve

__version__ = "0.1.0"
