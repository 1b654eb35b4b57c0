"""Pairwise q-independence and the constructive partition of a feasible set."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .affectance import AffectanceMatrix, PowerAssignment
from .errors import PreconditionError
from .model import Instance

EXTRACT_TOL = 1e-9


def q_independent(inst: Instance, v: int, w: int, q: float) -> bool:
    """d(s_v, r_w) * d(s_w, r_v) >= q^2 * l_v * l_w."""
    if v == w:
        raise ValueError("q-independence is defined for distinct links")
    if q <= 0:
        raise ValueError("q must be > 0")
    d = inst.cross
    return bool(d[v, w] * d[w, v] >= q * q * inst.lengths[v] * inst.lengths[w])


def is_q_independent_set(inst: Instance, S: Iterable[int], q: float) -> bool:
    idx = sorted(set(S))
    return all(q_independent(inst, v, w, q) for i, v in enumerate(idx) for w in idx[i + 1:])


def class_bound(q: float, alpha: float, beta: float) -> int:
    """Maximum class count floor(2 q^alpha / beta) + 1."""
    return math.floor(2.0 * q**alpha / beta) + 1


@dataclass(frozen=True)
class IndependencePartition:
    q: float
    classes: tuple[tuple[int, ...], ...]
    order: tuple[int, ...]
    max_heavy: int  # largest number of later heavy neighbours seen in the order


def partition_q_independent(
    inst: Instance,
    S: Iterable[int],
    q: float,
    P: PowerAssignment,
    matrix: AffectanceMatrix | None = None,
) -> IndependencePartition:
    """Split a P-feasible set into at most floor(2q^a/b)+1 q-independent classes.

    Links are joined by an edge when ``b_v(w) >= beta / q^alpha``.  An ordering
    is built by repeatedly removing the link of least symmetric affectance into
    what remains (feasibility keeps that value at most 2, so it has few heavy
    edges), then links are greedily coloured in reverse order.  ``matrix``
    may supply a precomputed AffectanceMatrix for P.
    """
    if q <= 0:
        raise ValueError("q must be > 0")
    prm = inst.params
    idx = sorted(set(S))
    if not idx:
        return IndependencePartition(q, (), (), 0)
    mat = matrix if matrix is not None else AffectanceMatrix(inst, P)
    b = mat.b
    threshold = prm.beta / q**prm.alpha
    z = math.floor(2.0 * q**prm.alpha / prm.beta)

    remaining = list(idx)
    order: list[int] = []
    max_heavy = 0
    while remaining:
        loads = [float(b[u, remaining].sum()) for u in remaining]
        best = min(range(len(remaining)), key=lambda i: (loads[i], remaining[i]))
        u = remaining.pop(best)
        if loads[best] > 2.0 + EXTRACT_TOL:
            raise PreconditionError(
                f"extraction step: least-loaded link {u} has b_u(remaining) = {loads[best]:.6g} > 2; "
                "the set is not feasible under the supplied assignment"
            )
        heavy = sum(1 for w in remaining if b[u, w] >= threshold)
        if heavy > z:
            raise PreconditionError(
                f"extraction step: link {u} has {heavy} heavy neighbours, more than {z}"
            )
        max_heavy = max(max_heavy, heavy)
        order.append(u)

    color: dict[int, int] = {}
    for u in reversed(order):
        used = {color[w] for w in color if b[u, w] >= threshold}
        c = next(k for k in range(len(idx) + 1) if k not in used)
        assert c <= z, "colouring exceeded Z+1 classes"
        color[u] = c
    ncls = max(color.values()) + 1
    classes = tuple(tuple(sorted(v for v in idx if color[v] == k)) for k in range(ncls))
    for cls in classes:
        if not is_q_independent_set(inst, cls, q):
            raise PreconditionError(
                f"class {cls} is not {q}-independent; the set is not feasible under the supplied assignment"
            )
    return IndependencePartition(q, classes, tuple(order), max_heavy)
