"""The greedy capacity algorithm, exhaustive optima, and slot scheduling."""

from __future__ import annotations

import math
import os
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

from .affectance import (
    AffectanceMatrix,
    Oblivious,
    PowerAssignment,
    SinrCheck,
    c_factors,
    non_weak_scale,
)
from .errors import SizeLimit
from .model import Instance
from .power_control import pc_solve

CHAIN_TOL = 1e-9

# "pc", an oblivious exponent p (scaled to be non-weak), or a fixed assignment
PowerMode = Union[str, float, Oblivious, PowerAssignment]


def oracle_cap(default: int) -> int:
    env = os.environ.get("SINR_MAX_ORACLE_N")
    return int(env) if env else default


def resolve_assignment(inst: Instance, mode: PowerMode) -> PowerAssignment:
    if isinstance(mode, (int, float)) and not isinstance(mode, bool):
        return non_weak_scale(inst, float(mode))
    if isinstance(mode, str):
        raise ValueError(f"mode {mode!r} does not name a fixed assignment")
    return mode


def feasibility_test(inst: Instance, mode: PowerMode) -> Callable[[Sequence[int]], bool]:
    if mode == "pc":
        return lambda S: pc_solve(inst, S).feasible
    return SinrCheck(inst, resolve_assignment(inst, mode))


def _members(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def feasible_family(inst: Instance, mode: PowerMode, max_n: int = 16) -> frozenset[int]:
    """Bitmasks of every feasible subset (the empty set included).

    Feasibility is closed under taking subsets, so a mask is tested only if
    all its one-smaller submasks passed.  Masks are visited in increasing
    numeric order, which visits every submask first.  Results are cached per
    (instance, mode).
    """
    cap = oracle_cap(max_n)
    if inst.n > cap:
        raise SizeLimit(inst.n, cap)
    return _family(inst, mode)


@lru_cache(maxsize=128)
def _family(inst: Instance, mode: PowerMode) -> frozenset[int]:
    test = feasibility_test(inst, mode)
    family = {0}
    for mask in range(1, 1 << inst.n):
        m, ok = mask, True
        while m:
            bit = m & -m
            if mask ^ bit not in family:
                ok = False
                break
            m ^= bit
        if ok and test(_members(mask)):
            family.add(mask)
    return frozenset(family)


def maximal_sets(family: set[int], n: int) -> list[int]:
    out = []
    for mask in sorted(family):
        if not any(mask | (1 << i) in family for i in range(n) if not mask >> i & 1):
            out.append(mask)
    return out


def brute_opt(inst: Instance, mode: PowerMode, max_n: int = 16) -> tuple[int, ...]:
    """Largest feasible subset; ties go to the lexicographically smallest id tuple."""
    family = feasible_family(inst, mode, max_n)
    best = max(bin(m).count("1") for m in family)
    cands = [tuple(_members(m)) for m in family if bin(m).count("1") == best]
    return min(cands)


def brute_min_schedule(inst: Instance, mode: PowerMode, max_n: int = 12) -> int:
    """Exact minimum slot count by set-cover dynamic programming over 2^n states."""
    family = feasible_family(inst, mode, max_n)
    full = (1 << inst.n) - 1
    chi = [0] * (full + 1)
    for mask in range(1, full + 1):
        low = mask & -mask
        rest = mask ^ low
        best = math.inf
        # every submask of rest, each joined with the lowest member
        sub = rest
        while True:
            slot = sub | low
            if slot in family:
                best = min(best, 1 + chi[mask ^ slot])
            if sub == 0:
                break
            sub = (sub - 1) & rest
        chi[mask] = best
    return int(chi[full])


@dataclass
class GrTrace:
    accepted: list[int]  # R in processing order
    final: list[int]  # X, ascending ids
    tested: dict[int, float]  # b̂ against R_{i-1} at the acceptance test
    processed: list[int]
    assignment: PowerAssignment
    in_affectance: dict[int, float] = field(default_factory=dict)  # a_R(v) for v in R

    @property
    def rejected(self) -> list[int]:
        acc = set(self.accepted)
        return [v for v in self.processed if v not in acc]


def gr(
    inst: Instance,
    p: float = 0.5,
    links: Iterable[int] | None = None,
    assignment: PowerAssignment | None = None,
) -> GrTrace:
    """Single pass in (length, id) order with a budget of 1/2 per link.

    A link joins R when its symmetric affectance with the links already in R
    is below 1/2; the output keeps the members of R whose in-affectance from
    R is at most 1.
    """
    P = assignment if assignment is not None else non_weak_scale(inst, p)
    c_factors(inst, P)  # noise-dominated links fail here, before any processing
    mat = AffectanceMatrix(inst, P)
    pool = set(range(inst.n)) if links is None else set(links)
    processed = [v for v in inst.order if v in pool]
    accepted: list[int] = []
    tested: dict[int, float] = {}
    for v in processed:
        # every member of R precedes v, so b̂_R(v) is the plain b sum
        val = float(mat.b[accepted, v].sum()) if accepted else 0.0
        tested[v] = val
        if val < 0.5:
            accepted.append(v)
    in_aff = {v: mat.a_in(accepted, v) for v in accepted}
    final = sorted(v for v in accepted if in_aff[v] <= 1.0)
    return GrTrace(accepted, final, tested, processed, P, in_aff)


def check_gr_chain(inst: Instance, trace: GrTrace) -> dict[str, bool]:
    """Each step of the approximation argument, asserted on one run."""
    mat = AffectanceMatrix(inst, trace.assignment)
    R = trace.accepted
    X = trace.final
    rej = trace.rejected
    r_set = set(R)
    checks = {
        "x_subset_r": set(X) <= r_set,
        "rejected_tested_half": all(trace.tested[j] >= 0.5 for j in rej),
        "rejected_final_half": all(mat.hat_b_in(R, j) >= 0.5 - CHAIN_TOL for j in rej),
        "avg_in_affectance": mat.total(R) <= len(R) / 2 + CHAIN_TOL,
        "half_survive": len(X) >= math.ceil(len(R) / 2),
        "x_in_affectance": all(mat.a_in(X, v) <= 1 + CHAIN_TOL for v in X),
    }
    return checks


@dataclass
class Schedule:
    slots: list[list[int]]
    assignment: PowerAssignment

    def __len__(self) -> int:
        return len(self.slots)


def schedule_gr(inst: Instance, p: float = 0.5, assignment: PowerAssignment | None = None) -> Schedule:
    """Repeat gr on the links not yet scheduled; each output X is one slot."""
    P = assignment if assignment is not None else non_weak_scale(inst, p)
    remaining = set(range(inst.n))
    slots = []
    while remaining:
        X = gr(inst, p, links=remaining, assignment=P).final
        assert X, "schedule_gr made no progress"
        slots.append(X)
        remaining -= set(X)
    return Schedule(slots, P)
