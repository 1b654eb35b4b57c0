"""Slow reference implementations used to cross-check the library.

Everything here works from raw coordinates with plain loops and the math
module, and shares no code with sinrcap beyond reading an instance's points.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def raw_rows(inst):
    """(sender, receiver) coordinate pairs, or None for matrix metrics."""
    pts = inst.metric.points
    return [(pts[l.sender], pts[l.receiver]) for l in inst.links]


def dist(inst, x, y):
    if hasattr(inst.metric, "points"):
        (ax, ay), (bx, by) = inst.metric.points[x], inst.metric.points[y]
        return math.sqrt((ax - bx) ** 2 + (ay - by) ** 2)
    return float(inst.metric.d[x][y])


def d_sr(inst, w, v):
    """Distance from the sender of w to the receiver of v."""
    return dist(inst, inst.links[w].sender, inst.links[v].receiver)


def length(inst, v):
    return d_sr(inst, v, v)


def oblivious_powers(inst, p, scale):
    return [scale * length(inst, v) ** (p * inst.params.alpha) for v in range(inst.n)]


def nonweak_powers(inst, p):
    prm = inst.params
    if prm.noise == 0:
        scale = 1.0
    else:
        lmax = max(length(inst, v) for v in range(inst.n))
        scale = 2 * prm.beta * prm.noise * lmax ** ((1 - p) * prm.alpha)
    return oblivious_powers(inst, p, scale)


def sinr_ok(inst, S, powers):
    prm = inst.params
    for v in S:
        interf = sum(powers[w] / d_sr(inst, w, v) ** prm.alpha for w in S if w != v)
        if powers[v] / length(inst, v) ** prm.alpha < prm.beta * (interf + prm.noise):
            return False
    return True


def aff(inst, powers, w, v):
    if w == v:
        return 0.0
    prm = inst.params
    lv = length(inst, v)
    c = prm.beta / (1 - prm.beta * prm.noise * lv**prm.alpha / powers[v])
    d = d_sr(inst, w, v)
    if d == 0:
        return 1.0
    return min(1.0, c * powers[w] / powers[v] * (lv / d) ** prm.alpha)


def precedes(inst, v, w):
    return (length(inst, v), v) < (length(inst, w), w)


def bhat(inst, powers, v, S):
    return sum(aff(inst, powers, v, w) + aff(inst, powers, w, v) for w in S if precedes(inst, v, w))


def feasible_sets(inst, test):
    """All feasible subsets by plain combinations, sizes ascending."""
    out = [()]
    for k in range(1, inst.n + 1):
        found = [S for S in itertools.combinations(range(inst.n), k) if test(S)]
        out += found
    return out


def opt_size(inst, test):
    return max(len(S) for S in feasible_sets(inst, test))


def min_partition(inst, test):
    """Fewest feasible blocks covering all links, by recursive set partitions."""
    feas = {S for S in feasible_sets(inst, test) if S}
    best = [inst.n]

    def go(rest, used):
        if used >= best[0]:
            return
        if not rest:
            best[0] = used
            return
        first, others = rest[0], rest[1:]
        for k in range(len(others), -1, -1):
            for comb in itertools.combinations(others, k):
                block = tuple(sorted((first,) + comb))
                if block in feas:
                    go([x for x in others if x not in comb], used + 1)

    go(list(range(inst.n)), 0)
    return best[0]


def inductive_measure(inst, p, test):
    powers = nonweak_powers(inst, p)
    best = 0.0
    for S in feasible_sets(inst, test):
        for v in range(inst.n):
            best = max(best, bhat(inst, powers, v, S))
    return best


def gain(inst, S):
    prm = inst.params
    return [
        [0.0 if v == w else prm.beta * length(inst, v) ** prm.alpha / d_sr(inst, w, v) ** prm.alpha for w in S]
        for v in S
    ]


def eig_radius(m):
    m = np.asarray(m, dtype=float)
    return float(np.max(np.abs(np.linalg.eigvals(m)))) if m.size else 0.0


def lp_pc_feasible(inst, S):
    """PC feasibility as a linear program: P >= 0 with (I - M) P >= u.

    Without noise the right-hand side is all ones, which is equivalent to
    strict feasibility by scaling.
    """
    from scipy.optimize import linprog

    prm = inst.params
    k = len(S)
    m = np.asarray(gain(inst, S))
    if prm.noise > 0:
        u = np.array([prm.beta * prm.noise * length(inst, v) ** prm.alpha for v in S])
    else:
        u = np.ones(k)
    res = linprog(np.ones(k), A_ub=-(np.eye(k) - m), b_ub=-u, bounds=[(0, None)] * k, method="highs")
    return res.status == 0
