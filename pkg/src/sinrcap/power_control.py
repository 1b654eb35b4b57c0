"""Power-control feasibility via the normalized gain matrix.

A set S is feasible under some assignment iff the system ``P >= M P + u``
has a positive solution, where ``M[v, w] = beta * l_v^alpha / d_wv^alpha``
and ``u_v = beta * N * l_v^alpha``.  That happens exactly when the spectral
radius of M is below one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .affectance import Explicit
from .errors import DegenerateGeometry, NumericalError
from .model import Instance

DEFAULT_TOL = 1e-9
MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class GainMatrix:
    links: tuple[int, ...]
    m: np.ndarray
    u: np.ndarray


@dataclass(frozen=True)
class PcResult:
    """Outcome of a power-control feasibility test.

    ``spectral_radius`` is the midpoint of a certified bracket of half-width
    ``radius_error``; the bracket is only narrowed until the verdict is settled.
    """

    feasible: bool
    spectral_radius: float
    min_powers: Optional[tuple[float, ...]]
    iterations: int
    verdict: str  # feasible | infeasible | marginal | degenerate
    links: tuple[int, ...] = ()
    radius_error: float = 0.0


def gain_matrix(inst: Instance, S: Iterable[int]) -> GainMatrix:
    idx = tuple(sorted(set(S)))
    if not idx:
        raise ValueError("gain matrix of an empty set")
    prm = inst.params
    d = inst.cross[np.ix_(idx, idx)]  # d[w, v] = d(s_w, r_v)
    off = ~np.eye(len(idx), dtype=bool)
    if np.any(d[off] == 0):
        w, v = np.argwhere((d == 0) & off)[0]
        raise DegenerateGeometry(idx[w], idx[v])
    lens = inst.lengths[list(idx)]
    with np.errstate(divide="ignore"):
        m = prm.beta * (lens[:, None] ** prm.alpha) / (d.T**prm.alpha)
    np.fill_diagonal(m, 0.0)
    u = prm.beta * prm.noise * lens**prm.alpha
    return GainMatrix(idx, m, u)


def _components(a: np.ndarray) -> list[np.ndarray]:
    """Strongly connected components of the support graph of ``a``."""
    n = a.shape[0]
    reach = (a > 0) | np.eye(n, dtype=bool)
    while True:
        nxt = (reach.astype(np.int64) @ reach.astype(np.int64)) > 0
        if np.array_equal(nxt, reach):
            break
        reach = nxt
    mutual = reach & reach.T
    seen = np.zeros(n, dtype=bool)
    out = []
    for i in range(n):
        if not seen[i]:
            members = np.flatnonzero(mutual[i])
            seen[members] = True
            out.append(members)
    return out


def _perron_block(
    a: np.ndarray, tol: float, max_iter: int, decide_at: float | None
) -> tuple[float, float, np.ndarray, int]:
    n = a.shape[0]
    x = np.ones(n)
    rowmax = float(a.sum(axis=1).max())
    if rowmax == 0.0:
        return 0.0, 0.0, x, 0
    # irreducible here, so the shift makes the iteration matrix primitive and
    # the Collatz-Wielandt bounds close
    sigma = 0.5 * rowmax
    prev = np.inf
    stall = 0
    for it in range(1, max_iter + 1):
        y = a @ x
        ratios = y / x
        lo, hi = float(ratios.min()), float(ratios.max())
        est = float(y.sum() / x.sum())
        if hi - lo <= tol:
            return lo, hi, x, it
        if decide_at is not None and (hi < decide_at - tol or lo > decide_at + tol):
            return lo, hi, x, it
        # guard against underflow-limited brackets that stop improving
        stall = stall + 1 if abs(est - prev) <= 1e-3 * tol else 0
        if stall >= 50:
            return est, est, x, it
        prev = est
        z = y + sigma * x
        x = z / z.max()
    raise NumericalError(f"power iteration did not converge in {max_iter} steps", x)


def _perron(
    m: np.ndarray, tol: float, max_iter: int, decide_at: float | None = None
) -> tuple[float, float, np.ndarray, int]:
    """Spectral radius bracket ``(lo, hi)``, Perron vector, iteration count.

    The radius of a nonnegative matrix is the largest radius over its
    irreducible diagonal blocks; each block runs a shifted power iteration
    from the all-ones vector with Collatz-Wielandt bounds as the stopping
    rule.  With ``decide_at`` set, stops as soon as the bracket lies clear of
    ``decide_at +- tol``.
    """
    a = np.abs(m)
    n = a.shape[0]
    x = np.ones(n)
    lo = hi = 0.0
    total = 0
    for comp in _components(a):
        if len(comp) == 1 and a[comp[0], comp[0]] == 0.0:
            continue
        blo, bhi, bx, it = _perron_block(a[np.ix_(comp, comp)], tol, max_iter, decide_at)
        total += it
        if bhi > hi:
            x = np.zeros(n)
            x[comp] = bx
        lo, hi = max(lo, blo), max(hi, bhi)
        if decide_at is not None and lo > decide_at + tol:
            break
    return lo, hi, x, total


def spectral_radius(m, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER) -> float:
    if isinstance(m, GainMatrix):
        m = m.m
    m = np.asarray(m, dtype=float)
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if m.shape[0] <= 1:
        return 0.0
    lo, hi, _, _ = _perron(m, tol, max_iter)
    return 0.5 * (lo + hi)


def pc_solve(inst: Instance, S: Iterable[int], tol: float = DEFAULT_TOL) -> PcResult:
    idx = tuple(sorted(set(S)))
    if not idx:
        return PcResult(True, 0.0, (), 0, "feasible", idx)
    try:
        g = gain_matrix(inst, idx)
    except DegenerateGeometry:
        return PcResult(False, float("inf"), None, 0, "degenerate", idx)
    k = len(idx)
    lo, hi, it = 0.0, 0.0, 0
    if k > 1:
        lo, hi, _, it = _perron(g.m, tol, MAX_ITER, decide_at=1.0)
    rho, err = 0.5 * (lo + hi), 0.5 * (hi - lo)
    if lo >= 1.0 + tol or (rho >= 1.0 + tol and err <= tol):
        return PcResult(False, rho, None, it, "infeasible", idx, err)
    if hi >= 1.0 - tol:
        return PcResult(False, rho, None, it, "marginal", idx, err)
    # with N = 0 the right-hand side is zero; any positive u gives a strictly
    # feasible direction, and unit u keeps every constraint slack by one unit
    rhs = g.u if inst.params.noise > 0 else np.ones(k)
    try:
        lhs = np.eye(k) - g.m
        powers = np.linalg.solve(lhs, rhs)
        powers += np.linalg.solve(lhs, rhs - lhs @ powers)  # one refinement step
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"elimination failed: {e}") from e
    if not np.all(np.isfinite(powers)) or np.any(powers <= 0):
        raise NumericalError("elimination produced non-positive powers", powers)
    if inst.params.noise == 0:
        powers = powers / powers.min()
    return PcResult(True, rho, tuple(float(x) for x in powers), it, "feasible", idx, err)


def witness_assignment(inst: Instance, result: PcResult, inflate: float = 1e-8) -> Explicit:
    """Full-length assignment realizing a feasible PcResult.

    Links outside the solved set get the non-weak floor ``2*beta*N*l^alpha``
    (or 1 without noise); they play no role when S is examined alone.
    """
    if not result.feasible:
        raise ValueError("no witness for an infeasible set")
    prm = inst.params
    if prm.noise > 0:
        base = 2.0 * prm.beta * prm.noise * inst.lengths**prm.alpha
    else:
        base = np.ones(inst.n)
    base = base.copy()
    for v, pv in zip(result.links, result.min_powers):
        base[v] = pv * (1.0 + inflate)
    return Explicit(tuple(base))
