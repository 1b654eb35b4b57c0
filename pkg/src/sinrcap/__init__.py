"""SINR interference calculus, oblivious power, and greedy capacity maximization."""

__version__ = "0.1.0"

from .affectance import (
    AffectanceMatrix,
    Explicit,
    Oblivious,
    affectance,
    aggregate,
    c_factor,
    is_feasible,
    non_weak_scale,
    power_of,
)
from .capacity import brute_min_schedule, brute_opt, gr, schedule_gr
from .independence import partition_q_independent, q_independent
from .measures import inductive_independence, max_avg_affectance, max_out_affectance
from .model import GeneratorConfig, Instance, SinrParams, delta, generate, length_classes
from .power_control import gain_matrix, pc_solve, spectral_radius

__all__ = [
    "AffectanceMatrix", "Explicit", "GeneratorConfig", "Instance", "Oblivious", "SinrParams",
    "affectance", "aggregate", "brute_min_schedule", "brute_opt", "c_factor", "delta",
    "gain_matrix", "generate", "gr", "inductive_independence", "is_feasible", "length_classes",
    "max_avg_affectance", "max_out_affectance", "non_weak_scale", "partition_q_independent",
    "pc_solve", "power_of", "q_independent", "schedule_gr", "spectral_radius",
]
