"""Inductive independence, maximum average affectance, and out-affectance.

Exact values come from subset enumeration (small n only); every exact
report carries a witness that recomputes to the reported value.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Iterable

import numpy as np

from .affectance import AffectanceMatrix, Oblivious, c_factors, non_weak_scale
from .capacity import (
    PowerMode,
    _members,
    feasibility_test,
    feasible_family,
    maximal_sets,
    oracle_cap,
)
from .errors import SizeLimit
from .model import Euclidean2D, Instance, digest


@dataclass
class MeasureReport:
    value: float
    method: str  # exact | peel | sampled
    witness: dict[str, Any] | None
    digest: str
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def witness_interference(mat: AffectanceMatrix, v: int, S: Iterable[int]) -> float:
    """b̂_v(S)."""
    return mat.hat_b_out(v, S)


def _mode_label(mode: PowerMode) -> str:
    return "pc" if mode == "pc" else f"oblivious({mode})" if isinstance(mode, (int, float)) else repr(mode)


def inductive_independence(
    inst: Instance,
    p: float,
    q_mode: PowerMode = "pc",
    max_n: int = 14,
    method: str = "exact",
    samples: int = 200,
    seed: int = 0,
) -> MeasureReport:
    """max over Q-feasible S and links v of b̂_v(S) with b measured under P_p.

    P_p is scaled to make every link non-weak.  b̂_v(S) only grows with S, so
    the exact maximum is attained on a maximal feasible set.  The sampled
    method grows random maximal feasible sets and reports a lower bound.
    """
    P = non_weak_scale(inst, p)
    mat = AffectanceMatrix(inst, P)
    weighted = mat.b * mat.hat  # weighted[v, w] = b̂_v(w)
    dig = digest(inst)
    extra = {"p": p, "q_mode": _mode_label(q_mode), "n": inst.n}

    if method == "exact":
        cap = oracle_cap(max_n)
        if inst.n > cap:
            raise SizeLimit(inst.n, cap)
        family = feasible_family(inst, q_mode, max_n=cap)
        candidates = [_members(m) for m in maximal_sets(family, inst.n)]
    elif method == "sampled":
        test = feasibility_test(inst, q_mode)
        rng = np.random.default_rng(seed)
        candidates = []
        for _ in range(samples):
            S: list[int] = []
            for v in rng.permutation(inst.n):
                if test(sorted(S + [int(v)])):
                    S.append(int(v))
            candidates.append(sorted(S))
    else:
        raise ValueError(f"unknown method {method!r}")

    best, witness = 0.0, None
    for S in candidates:
        if not S:
            continue
        vals = weighted[:, S].sum(axis=1)
        v = int(np.argmax(vals))
        if witness is None or vals[v] > best:
            best, witness = float(vals[v]), {"set": list(S), "link": v}
    extra["candidates"] = len(candidates)
    return MeasureReport(best, method, witness, dig, extra)


def _subset_table(n: int) -> np.ndarray:
    masks = np.arange(1 << n)
    return ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(float)


def max_avg_affectance(
    inst: Instance, p: float, method: str = "exact", max_n: int = 14
) -> MeasureReport:
    """max over nonempty S of a_S(S)/|S| under non-weak P_p.

    ``peel`` is the greedy densest-subgraph peel on edge weights b: drop the
    link with least b_v(S) and keep the best ratio seen.
    """
    P = non_weak_scale(inst, p)
    mat = AffectanceMatrix(inst, P)
    dig = digest(inst)
    n = inst.n
    if method == "exact":
        cap = oracle_cap(max_n)
        if n > cap:
            raise SizeLimit(n, cap)
        X = _subset_table(n)[1:]
        totals = np.einsum("mi,ij,mj->m", X, mat.a, X)
        ratios = totals / X.sum(axis=1)
        k = int(np.argmax(ratios))
        S = [i for i in range(n) if X[k, i]]
        return MeasureReport(float(ratios[k]), "exact", {"set": S}, dig, {"p": p, "n": n})
    if method == "peel":
        S = list(range(n))
        best, best_set = -1.0, None
        sequence = []
        while S:
            ratio = mat.total(S) / len(S)
            if ratio > best:
                best, best_set = ratio, list(S)
            loads = mat.b[np.ix_(S, S)].sum(axis=1)
            drop = S[int(np.argmin(loads))]  # argmin keeps the first, i.e. smallest id
            sequence.append(drop)
            S.remove(drop)
        return MeasureReport(best, "peel", {"set": best_set}, dig, {"p": p, "n": n, "peel_order": sequence})
    raise ValueError(f"unknown method {method!r}")


def probe_grid(inst: Instance, grid: int = 9) -> list[tuple[float, float, float]]:
    """Deterministic probe senders and lengths for synthetic out-affectance links.

    Positions span the bounding box of the instance on a ``grid x grid``
    lattice; lengths run over powers of two from l_min up to l_max.
    """
    if not isinstance(inst.metric, Euclidean2D) or grid < 1:
        return []
    pts = np.asarray(inst.metric.points)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    xs = np.linspace(lo[0], hi[0], grid)
    ys = np.linspace(lo[1], hi[1], grid)
    lmin, lmax = float(inst.lengths.min()), float(inst.lengths.max())
    lens = [lmin]
    while lens[-1] * 2 <= lmax:
        lens.append(lens[-1] * 2)
    return [(float(x), float(y), float(l)) for x in xs for y in ys for l in lens]


def probe_out_affectance(
    inst: Instance, P: Oblivious, probe: tuple[float, float, float], S: Iterable[int]
) -> float:
    """â of a synthetic link (sender at (x, y), length l) onto S.

    Only the sender position and the length matter: the probe's receiver
    enters neither its power nor its interference.
    """
    x, y, lp = probe
    # a probe has no id, so it sorts after real links of equal length
    idx = [w for w in sorted(set(S)) if inst.lengths[w] > lp]
    if not idx:
        return 0.0
    alpha = inst.params.alpha
    c = c_factors(inst, P)
    powers = P.powers(inst)
    p_probe = P.scale * lp ** (P.p * alpha)
    recv = np.asarray([inst.metric.points[inst.links[w].receiver] for w in idx])
    d = np.hypot(recv[:, 0] - x, recv[:, 1] - y)
    lw = inst.lengths[idx]
    with np.errstate(divide="ignore"):
        raw = c[idx] * p_probe / powers[idx] * (lw / d) ** alpha
    raw[d == 0] = 1.0
    return float(np.minimum(raw, 1.0).sum())


def max_out_affectance(
    inst: Instance, p: float, max_n: int = 14, grid: int = 9
) -> MeasureReport:
    """max over P_p-feasible S of â_v(S), v over L and a probe grid."""
    cap = oracle_cap(max_n)
    if inst.n > cap:
        raise SizeLimit(inst.n, cap)
    P = non_weak_scale(inst, p)
    mat = AffectanceMatrix(inst, P)
    weighted = mat.a * mat.hat  # â_v(w)
    family = feasible_family(inst, P, max_n=cap)
    sets = [_members(m) for m in maximal_sets(family, inst.n)]
    best, witness = 0.0, None
    for S in sets:
        if not S:
            continue
        vals = weighted[:, S].sum(axis=1)
        v = int(np.argmax(vals))
        if witness is None or vals[v] > best:
            best, witness = float(vals[v]), {"set": S, "link": v, "probe": None}
    probes = probe_grid(inst, grid)
    for probe in probes:
        for S in sets:
            val = probe_out_affectance(inst, P, probe, S)
            if val > best:
                best, witness = val, {"set": S, "link": None, "probe": list(probe)}
    return MeasureReport(best, "exact", witness, digest(inst), {"p": p, "probes": len(probes)})
