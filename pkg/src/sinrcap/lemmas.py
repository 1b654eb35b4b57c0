"""Falsification harnesses for the structural lemmas behind the interference bounds.

Each validator checks concrete inequalities on constructed or sampled inputs
and reports violations; none of them proves anything.  Inputs that do not
meet a lemma's hypotheses are skipped with a reason.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .affectance import AffectanceMatrix, SinrCheck, non_weak_scale
from .errors import PreconditionError
from .independence import is_q_independent_set
from .model import Euclidean2D, Instance, SinrParams, delta, length_classes

TOL = 1e-9


@dataclass
class ValidatorReport:
    name: str
    checked: int = 0
    skipped: int = 0
    violations: list[dict] = field(default_factory=list)
    skip_reasons: dict[str, int] = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def skip(self, reason: str) -> None:
        self.skipped += 1
        self.skip_reasons[reason] = self.skip_reasons.get(reason, 0) + 1

    def merge(self, other: "ValidatorReport") -> None:
        self.checked += other.checked
        self.skipped += other.skipped
        self.violations += other.violations
        for k, v in other.skip_reasons.items():
            self.skip_reasons[k] = self.skip_reasons.get(k, 0) + v
        for k, v in other.stats.items():
            if isinstance(v, (int, float)) and k.startswith("max_"):
                self.stats[k] = max(self.stats.get(k, -math.inf), v)
            elif isinstance(v, (int, float)):
                self.stats[k] = self.stats.get(k, 0) + v

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ok"] = self.ok
        return out


# --- the two factor-6 propositions ------------------------------------------

@dataclass
class GeometryReport:
    nearest_in: int  # link u of S minimizing d(s_u, r_v)
    nearest_out: int  # link u' of S minimizing d(s_v, r_u')
    ratio_in: float  # max over w != u of d_wu / (6 d_wv)
    ratio_out: float  # max over w != u' of d_wu' / (6 d_vw)

    @property
    def ok(self) -> bool:
        return self.ratio_in <= 1 + TOL and self.ratio_out <= 1 + TOL


def validate_geometry(inst: Instance, S: Sequence[int], v: int) -> GeometryReport:
    """Check d_wv >= d_wu/6 and d_vw >= d_wu'/6 for a 2-independent length class S.

    w ranges over S minus the respective nearest link; for w = u the claim
    would bound d_uv by l_u/6, which the hypotheses do not give.
    """
    idx = sorted(set(S))
    if not idx:
        raise PreconditionError("S must be nonempty")
    if not 0 <= v < inst.n:
        raise IndexError(f"link {v} out of range")
    if delta(inst, idx) > 2.0:
        raise PreconditionError(f"S is not nearly-equilength (Delta = {delta(inst, idx):.6g} > 2)")
    if not is_q_independent_set(inst, idx, 2.0):
        raise PreconditionError("S is not 2-independent")
    d = inst.cross
    u = min(idx, key=lambda w: (d[w, v], w))
    u2 = min(idx, key=lambda w: (d[v, w], w))

    def worst(others, num, den):
        out = 0.0
        for w in others:
            n_, d_ = num(w), den(w)
            out = max(out, math.inf if d_ == 0 and n_ > 0 else (n_ / (6 * d_) if d_ else 0.0))
        return out

    r_in = worst([w for w in idx if w != u], lambda w: d[w, u], lambda w: d[w, v])
    r_out = worst([w for w in idx if w != u2], lambda w: d[w, u2], lambda w: d[v, w])
    return GeometryReport(u, u2, float(r_in), float(r_out))


def construct_geometry_sample(rng: np.random.Generator, params: SinrParams | None = None):
    """Random 2-independent nearly-equilength set plus one arbitrary link.

    Returns ``(instance, S, v)``; v is the last link.
    """
    box = rng.uniform(2.0, 15.0)
    m = int(rng.integers(2, 25))
    rows = []
    for _ in range(m):
        s = rng.uniform(0, box, 2)
        ell = rng.uniform(1.0, 1.99)
        th = rng.uniform(0, 2 * math.pi)
        rows.append((s[0], s[1], s[0] + ell * math.cos(th), s[1] + ell * math.sin(th)))
    kept: list[tuple] = []
    for row in rows:
        trial = Instance.euclidean(kept + [row], params)
        if is_q_independent_set(trial, range(trial.n), 2.0):
            kept.append(row)
    s = rng.uniform(-1, box + 1, 2)
    ell = float(np.exp(rng.uniform(np.log(0.05), np.log(20.0))))
    th = rng.uniform(0, 2 * math.pi)
    kept.append((s[0], s[1], s[0] + ell * math.cos(th), s[1] + ell * math.sin(th)))
    inst = Instance.euclidean(kept, params)
    return inst, list(range(inst.n - 1)), inst.n - 1


# --- ball count around a probe sender ----------------------------------------

def _point(inst: Instance, origin):
    if isinstance(origin, (int, np.integer)):
        return origin
    if not isinstance(inst.metric, Euclidean2D):
        raise PreconditionError("coordinate probes need a Euclidean instance")
    return tuple(map(float, origin))


def _dist_from(inst: Instance, origin, handle: int) -> float:
    if isinstance(origin, tuple):
        x, y = inst.metric.points[handle]
        return float(np.hypot(x - origin[0], y - origin[1]))
    return inst.metric.distance(origin, handle)


def l3_bound(alpha: float) -> float:
    return 2.0 * 4.0**alpha + 1.0


def validate_l3(inst: Instance, S: Sequence[int], origin) -> dict:
    """Receivers within half the nearest-sender distance of a probe sender.

    With D the least distance from the probe to a sender of S, the links of S
    whose receivers lie in the ball of radius D/2 are all at least D/2 long,
    are pairwise not 4-independent (cross product at most 9 l_x l_y), and for
    a feasible S number at most 2*4^alpha + 1.
    """
    origin = _point(inst, origin)
    idx = sorted(set(S))
    if not idx:
        return {"D": math.inf, "members": [], "count_ok": True, "pairs_ok": True, "lengths_ok": True}
    D = min(_dist_from(inst, origin, inst.links[w].sender) for w in idx)
    L3 = [w for w in idx if _dist_from(inst, origin, inst.links[w].receiver) <= D / 2]
    lens = inst.lengths
    d = inst.cross
    lengths_ok = all(lens[x] >= D / 2 - TOL * max(1.0, D) for x in L3)
    pairs_ok = all(
        d[x, y] * d[y, x] <= 9 * lens[x] * lens[y] * (1 + TOL)
        for i, x in enumerate(L3)
        for y in L3[i + 1:]
    )
    return {
        "D": D,
        "members": L3,
        "count_ok": len(L3) <= l3_bound(inst.params.alpha),
        "pairs_ok": pairs_ok,
        "lengths_ok": lengths_ok,
    }


def greedy_feasible(inst: Instance, check: SinrCheck, order) -> list[int]:
    S: list[int] = []
    for v in order:
        if check(S + [int(v)]):
            S.append(int(v))
    return sorted(S)


def construct_l3_sample(rng: np.random.Generator, params: SinrParams | None = None, p: float = 0.5):
    """Senders at distance >= D from the origin, most receivers crowded inside D/2.

    Returns ``(instance, S, origin)`` with S feasible under non-weak P_p.
    """
    D = rng.uniform(1.0, 10.0)
    k = int(rng.integers(3, 30))
    rows = []
    for i in range(k):
        r = D if i == 0 else D * (1.0 + rng.exponential(0.5))
        th = rng.uniform(0, 2 * math.pi)
        sx, sy = r * math.cos(th), r * math.sin(th)
        if rng.random() < 0.8:
            rr = D / 2 * math.sqrt(rng.random())
        else:
            rr = rng.uniform(D / 2, 2 * D)
        th2 = rng.uniform(0, 2 * math.pi)
        rows.append((sx, sy, rr * math.cos(th2), rr * math.sin(th2)))
    inst = Instance.euclidean(rows, params)
    check = SinrCheck(inst, non_weak_scale(inst, p))
    S = greedy_feasible(inst, check, rng.permutation(inst.n))
    return inst, S, (0.0, 0.0)


def l3_report(samples: Sequence[tuple], name: str = "l3bound") -> ValidatorReport:
    rep = ValidatorReport(name)
    biggest = 0
    for inst, S, origin in samples:
        res = validate_l3(inst, S, origin)
        rep.checked += 1
        biggest = max(biggest, len(res["members"]))
        if not (res["count_ok"] and res["pairs_ok"] and res["lengths_ok"]):
            rep.violations.append({k: res[k] for k in ("D", "members", "count_ok", "pairs_ok", "lengths_ok")})
    rep.stats["max_l3_size"] = biggest
    return rep


def geometry_report(samples: Sequence[tuple]) -> ValidatorReport:
    rep = ValidatorReport("geometry")
    worst = 0.0
    for inst, S, v in samples:
        try:
            res = validate_geometry(inst, S, v)
        except PreconditionError as e:
            rep.skip(str(e).split(" (")[0])
            continue
        rep.checked += 1
        worst = max(worst, res.ratio_in, res.ratio_out)
        if not res.ok:
            rep.violations.append({"S": list(S), "v": v, **asdict(res)})
    rep.stats["max_ratio"] = worst
    return rep


# --- long-link chain and equilength residual ---------------------------------

def hat_p(p: float) -> float:
    return 1.0 / min(1.0 - p, p)


def lld_threshold(p: float, tau: float, params: SinrParams) -> float:
    """Lambda = (4 (2 beta tau)^(1/alpha))^(hat p)."""
    return (4.0 * (2.0 * params.beta * tau) ** (1.0 / params.alpha)) ** hat_p(p)


def _group_bound(p: float, dlt: float) -> float:
    ll = math.log2(dlt) if dlt > 1 else 0.0
    return 1.0 + math.log(ll) / math.log(1.0 / p) if ll > 1 else 1.0


def lld_size_bound(p: float, dlt: float) -> float:
    """2 + log_{1/p} log2 Delta + log_{1/(1-p)} log2 Delta, clamped at small Delta."""
    return _group_bound(p, dlt) + _group_bound(1.0 - p, dlt)


def _two_independent_subset(inst: Instance, cands: list[int], rng) -> list[int]:
    d, lens = inst.cross, inst.lengths
    Q: list[int] = []
    for w in rng.permutation(cands):
        w = int(w)
        if all(d[w, x] * d[x, w] >= 4.0 * lens[w] * lens[x] for x in Q):
            Q.append(w)
    return sorted(Q)


def validate_lld(inst: Instance, p: float, tau: float = 1.0, samples: int = 20, seed: int = 0) -> ValidatorReport:
    """Length chain among long links that are 1/tau-close to a probe link.

    Links affecting v satisfy lambda_{i+1}^p >= 2 lambda_i once sorted by length
    (lambda measured against the shortest); links affected by v satisfy the
    same with 1-p.  The set size is checked against the resulting log-log bound.
    """
    rep = ValidatorReport("lld")
    if not (0 < p < 1):
        rep.skip("p outside (0, 1)")
        return rep
    if tau < 1:
        rep.skip("tau < 1")
        return rep
    P = non_weak_scale(inst, p)
    mat = AffectanceMatrix(inst, P)
    a, lens = mat.a, inst.lengths
    lam = lld_threshold(p, tau, inst.params)
    dlt = delta(inst)
    size_bound = lld_size_bound(p, dlt)
    rng = np.random.default_rng(seed)
    largest = 0
    for v in range(inst.n):
        cands = [
            w for w in range(inst.n)
            if w != v and lens[w] >= lam * lens[v] and max(a[v, w], a[w, v]) >= 1.0 / tau
        ]
        if not cands:
            rep.skip("no long close links")
            continue
        seen = set()
        for _ in range(samples):
            Q = tuple(_two_independent_subset(inst, cands, rng))
            if Q in seen:
                continue
            seen.add(Q)
            rep.checked += 1
            largest = max(largest, len(Q))
            into = [w for w in Q if a[w, v] >= 1.0 / tau]
            outof = [w for w in Q if w not in into]
            for group, expo in ((into, p), (outof, 1.0 - p)):
                g = sorted(group, key=lambda w: (lens[w], w))
                if not g:
                    continue
                lam_ = lens[g] / lens[g[0]]
                bad = [
                    i for i in range(len(g) - 1)
                    if lam_[i + 1] ** expo < 2.0 * lam_[i] * (1 - TOL)
                ]
                if bad:
                    rep.violations.append({"v": v, "Q": list(Q), "group": g, "exponent": expo, "kind": "chain"})
            if len(Q) > size_bound + TOL:
                rep.violations.append({"v": v, "Q": list(Q), "bound": size_bound, "kind": "size"})
    rep.stats.update({"max_q_size": largest, "lambda": lam, "size_bound": size_bound})
    return rep


def affequi_constant(alpha: float) -> float:
    """6^alpha (1 + 2^(1+alpha)): the explicit constant the argument yields."""
    return 6.0**alpha * (1.0 + 2.0 ** (1.0 + alpha))


def validate_affequi(inst: Instance, p: float, samples: int = 5, seed: int = 0) -> ValidatorReport:
    """Residual of b_v(S) beyond its best pair, for feasible 2-independent classes S.

    q is taken as large as the hypothesis allows, (min l_S / l_v)^(alpha/hat p).
    Reports the empirical constant q * (b_v(S) - max pair) and hard-checks the
    residual over the two nearest links against affequi_constant / q.
    """
    rep = ValidatorReport("affequi")
    if not (0 < p < 1):
        rep.skip("p outside (0, 1)")
        return rep
    P = non_weak_scale(inst, p)
    mat = AffectanceMatrix(inst, P)
    check = SinrCheck(inst, P)
    lens, d, b = inst.lengths, inst.cross, mat.b
    alpha = inst.params.alpha
    cmax = affequi_constant(alpha)
    rng = np.random.default_rng(seed)
    emp = 0.0
    for v in range(inst.n):
        for cls in length_classes(inst):
            pool = [w for w in cls if w != v and lens[w] >= lens[v]]
            if not pool:
                continue
            seen = set()
            for _ in range(samples):
                S: list[int] = []
                for w in rng.permutation(pool):
                    w = int(w)
                    if all(d[w, x] * d[x, w] >= 4.0 * lens[w] * lens[x] for x in S) and check(S + [w]):
                        S.append(w)
                key = tuple(sorted(S))
                if key in seen:
                    continue
                seen.add(key)
                q = (lens[list(key)].min() / lens[v]) ** (alpha / hat_p(p))
                if q < 1:
                    rep.skip("q < 1")
                    continue
                rep.checked += 1
                total = float(b[v, list(key)].sum())
                if len(key) == 1:
                    pair = total
                else:
                    pair = max(b[v, x] + b[v, y] for i, x in enumerate(key) for y in key[i + 1:])
                emp = max(emp, q * (total - pair))
                u = min(key, key=lambda w: (d[w, v], w))
                u2 = min(key, key=lambda w: (d[v, w], w))
                near = b[v, u] + (b[v, u2] if u2 != u else 0.0)
                if total - near > cmax / q + TOL:
                    rep.violations.append({"v": v, "S": list(key), "q": q, "residual": total - near})
    rep.stats.update({"max_empirical_c": emp, "analytic_c": cmax})
    return rep


def validate_l3_on_instance(inst: Instance, p: float, samples: int = 10, seed: int = 0) -> ValidatorReport:
    """Ball count around every sender of the instance, for sampled feasible sets."""
    rng = np.random.default_rng(seed)
    check = SinrCheck(inst, non_weak_scale(inst, p))
    sets = {tuple(greedy_feasible(inst, check, rng.permutation(inst.n))) for _ in range(samples)}
    cases = []
    for S in sorted(sets):
        for v in range(inst.n):
            rest = [w for w in S if w != v]
            cases.append((inst, rest, inst.links[v].sender))
    return l3_report(cases)


def validate_interference_lemmas(
    inst: Instance, p: float, tau: float = 1.0, samples: int = 10, seed: int = 0
) -> dict[str, ValidatorReport]:
    return {
        "lld": validate_lld(inst, p, tau, samples, seed),
        "affequi": validate_affequi(inst, p, max(1, samples // 2), seed),
        "l3bound": validate_l3_on_instance(inst, p, samples, seed),
    }
