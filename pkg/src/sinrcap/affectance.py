"""Power assignments, affectance, and fixed-power feasibility.

Notation follows the usual SINR calculus: ``a_w(v)`` is the (truncated)
affectance of link w on link v, ``b_v(w) = a_v(w) + a_w(v)`` its symmetric
version, and the hatted variants keep a pair only when the first link is
shorter in the (length, id) order.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import NoiseDominated
from .model import Instance

NON_WEAK_RTOL = 1e-9


@dataclass(frozen=True)
class Oblivious:
    """P_v = scale * l_v^(p*alpha)."""

    p: float
    scale: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"oblivious exponent p must lie in [0, 1], got {self.p}")
        if not self.scale > 0:
            raise ValueError("scale must be > 0")

    def powers(self, inst: Instance) -> np.ndarray:
        return self.scale * inst.lengths ** (self.p * inst.params.alpha)


@dataclass(frozen=True)
class Explicit:
    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(x) for x in self.values)
        if not all(x > 0 for x in vals):
            raise ValueError("explicit powers must be > 0")
        object.__setattr__(self, "values", vals)

    def powers(self, inst: Instance) -> np.ndarray:
        if len(self.values) != inst.n:
            raise ValueError(f"expected {inst.n} powers, got {len(self.values)}")
        return np.array(self.values)


PowerAssignment = Union[Oblivious, Explicit]


def power_of(P: PowerAssignment, inst: Instance, v: int) -> float:
    return float(P.powers(inst)[v])


def c_factors(inst: Instance, P: PowerAssignment) -> np.ndarray:
    """c_v = beta / (1 - beta*N*l_v^alpha / P_v) for every link."""
    prm = inst.params
    powers = P.powers(inst)
    floor = prm.beta * prm.noise * inst.lengths**prm.alpha
    bad = np.flatnonzero(powers <= floor)
    if bad.size:
        v = int(bad[0])
        raise NoiseDominated(v, float(powers[v]), float(floor[v]))
    return prm.beta / (1.0 - floor / powers)


def c_factor(inst: Instance, P: PowerAssignment, v: int) -> float:
    prm = inst.params
    pv = power_of(P, inst, v)
    floor = prm.beta * prm.noise * float(inst.lengths[v]) ** prm.alpha
    if pv <= floor:
        raise NoiseDominated(v, pv, floor)
    return prm.beta / (1.0 - floor / pv)


def affectance(inst: Instance, P: PowerAssignment, w: int, v: int) -> float:
    """a_w(v): affectance of link w on link v, truncated at 1."""
    if w == v:
        return 0.0
    cv = c_factor(inst, P, v)
    d = float(inst.cross[w, v])
    if d == 0.0:
        return 1.0
    powers = P.powers(inst)
    ratio = float(inst.lengths[v]) / d
    return min(1.0, cv * powers[w] / powers[v] * ratio**inst.params.alpha)


def is_non_weak(inst: Instance, P: PowerAssignment) -> np.ndarray:
    """Per-link flag c_v <= 2 beta (relative slack for the boundary case)."""
    prm = inst.params
    powers = P.powers(inst)
    floor = prm.beta * prm.noise * inst.lengths**prm.alpha
    return powers >= 2.0 * floor * (1.0 - NON_WEAK_RTOL)


def non_weak_scale(inst: Instance, p: float) -> Oblivious:
    """Smallest global scale making every link non-weak under P_p."""
    prm = inst.params
    if prm.noise == 0:
        return Oblivious(p, 1.0)
    lmax = float(inst.lengths.max())
    return Oblivious(p, 2.0 * prm.beta * prm.noise * lmax ** ((1.0 - p) * prm.alpha))


class AffectanceMatrix:
    """Cached ``a[w, v] = a_w(v)`` for one (instance, assignment) pair.

    Sums run in ascending link id order so results are reproducible.
    """

    def __init__(self, inst: Instance, P: PowerAssignment):
        self.instance = inst
        self.assignment = P
        alpha = inst.params.alpha
        powers = P.powers(inst)
        c = c_factors(inst, P)
        d = inst.cross
        with np.errstate(divide="ignore", invalid="ignore"):
            raw = c[None, :] * (powers[:, None] / powers[None, :]) * (inst.lengths[None, :] / d) ** alpha
        raw[d == 0] = 1.0
        a = np.minimum(raw, 1.0)
        np.fill_diagonal(a, 0.0)
        a.flags.writeable = False
        self.a = a
        self.c = c
        self.powers = powers
        b = a + a.T
        b.flags.writeable = False
        self.b = b
        # hat[v, w] is True when v precedes w in the length order
        rank = inst.rank
        self.hat = rank[:, None] < rank[None, :]

    @property
    def n(self) -> int:
        return self.instance.n

    def a_in(self, S: Iterable[int], v: int) -> float:
        """a_S(v) = sum_{w in S} a_w(v)."""
        idx = sorted(set(S))
        return float(self.a[idx, v].sum()) if idx else 0.0

    def a_out(self, v: int, S: Iterable[int]) -> float:
        """a_v(S) = sum_{w in S} a_v(w)."""
        idx = sorted(set(S))
        return float(self.a[v, idx].sum()) if idx else 0.0

    def b_sum(self, v: int, S: Iterable[int]) -> float:
        idx = sorted(set(S))
        return float(self.b[v, idx].sum()) if idx else 0.0

    def hat_a_out(self, v: int, S: Iterable[int]) -> float:
        """â_v(S): out-affectance of v onto the members of S longer than v."""
        idx = sorted(set(S))
        return float((self.a[v, idx] * self.hat[v, idx]).sum()) if idx else 0.0

    def hat_a_in(self, S: Iterable[int], v: int) -> float:
        """â_S(v): affectance on v from the members of S shorter than v."""
        idx = sorted(set(S))
        return float((self.a[idx, v] * self.hat[idx, v]).sum()) if idx else 0.0

    def hat_b_out(self, v: int, S: Iterable[int]) -> float:
        """b̂_v(S): symmetric affectance between v and the members of S longer than v."""
        idx = sorted(set(S))
        return float((self.b[v, idx] * self.hat[v, idx]).sum()) if idx else 0.0

    def hat_b_in(self, S: Iterable[int], v: int) -> float:
        """b̂_S(v): symmetric affectance between v and the members of S shorter than v."""
        idx = sorted(set(S))
        return float((self.b[idx, v] * self.hat[idx, v]).sum()) if idx else 0.0

    def total(self, S: Iterable[int]) -> float:
        """a_S(S)."""
        idx = sorted(set(S))
        return float(self.a[np.ix_(idx, idx)].sum()) if idx else 0.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["w\\v"] + list(range(self.n)))
        for w in range(self.n):
            writer.writerow([w] + [repr(float(x)) for x in self.a[w]])
        return buf.getvalue()


_MODES = {
    ("a", "from_set"): AffectanceMatrix.a_in,
    ("a", "to_set"): lambda m, S, v: m.a_out(v, S),
    ("b", "from_set"): lambda m, S, v: m.b_sum(v, S),
    ("b", "to_set"): lambda m, S, v: m.b_sum(v, S),
    ("â", "from_set"): AffectanceMatrix.hat_a_in,
    ("â", "to_set"): lambda m, S, v: m.hat_a_out(v, S),
    ("b̂", "from_set"): AffectanceMatrix.hat_b_in,
    ("b̂", "to_set"): lambda m, S, v: m.hat_b_out(v, S),
}
_ALIASES = {"a_hat": "â", "b_hat": "b̂", "ahat": "â", "bhat": "b̂"}


def aggregate(m: AffectanceMatrix, mode: str, direction: str, S: Iterable[int], v: int) -> float:
    """Set aggregate of affectance ``mode`` in {a, b, â, b̂}.

    ``from_set`` sums the contributions of the members of S onto v (``x_S(v)``),
    ``to_set`` the contributions of v onto S (``x_v(S)``).
    """
    key = (_ALIASES.get(mode, mode), direction)
    if key not in _MODES:
        raise ValueError(f"unknown aggregate {mode!r}/{direction!r}")
    return _MODES[key](m, S, v)


class SinrCheck:
    """Raw-SINR feasibility test for subsets under a fixed assignment.

    Works on the untruncated received powers, so it is the model's ground
    truth rather than the affectance relaxation.
    """

    def __init__(self, inst: Instance, P: PowerAssignment):
        prm = inst.params
        powers = P.powers(inst)
        d = inst.cross
        with np.errstate(divide="ignore"):
            recv = powers[:, None] / d**prm.alpha  # recv[w, v] at r_v from s_w
        np.fill_diagonal(recv, 0.0)
        self.recv = recv
        self.signal = powers / inst.lengths**prm.alpha
        self.beta = prm.beta
        self.noise = prm.noise

    def sinr_slack(self, S: Iterable[int]) -> np.ndarray:
        """signal - beta*(interference + N) per member of S (ascending ids)."""
        idx = sorted(set(S))
        if not idx:
            return np.zeros(0)
        interf = self.recv[np.ix_(idx, idx)].sum(axis=0)
        return self.signal[idx] - self.beta * (interf + self.noise)

    def __call__(self, S: Iterable[int]) -> bool:
        return bool(np.all(self.sinr_slack(S) >= 0))


def is_feasible(inst: Instance, S: Iterable[int], P: PowerAssignment) -> bool:
    return SinrCheck(inst, P)(S)
