"""Exit criteria, one test per criterion.

Each test prints a single PASS/FAIL line (also collected into the terminal
summary) and then asserts it.
"""

import csv
import math
import time
from collections import defaultdict

import numpy as np
import pytest

import oracles
from conftest import ACCEPTANCE_LINES, corpus
from sinrcap import cli
from sinrcap.affectance import AffectanceMatrix, non_weak_scale
from sinrcap.capacity import _members, brute_opt, check_gr_chain, feasible_family, gr
from sinrcap.independence import is_q_independent_set, partition_q_independent
from sinrcap.lemmas import construct_geometry_sample, construct_l3_sample, geometry_report, l3_report
from sinrcap.measures import inductive_independence, max_avg_affectance
from sinrcap.model import GeneratorConfig, SinrParams, generate
from sinrcap.power_control import gain_matrix, pc_solve, witness_assignment

pytestmark = pytest.mark.acceptance

PS = (0.25, 0.5, 0.75)
SLACK = 1e-9


def report(num, ok, detail):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def corp():
    return corpus(200, n_min=4, n_max=12, params=SinrParams(3.0, 2.0, 1.0))


def test_criterion_1_capacity_bound(corp):
    t0 = time.perf_counter()
    violations, worst, runs = [], 0.0, 0
    for i, inst in enumerate(corp):
        opt = len(brute_opt(inst, "pc"))
        for p in PS:
            I = inductive_independence(inst, p, "pc").value
            X = len(gr(inst, p).final)
            bound = 2 * (2 * I + 1) * X
            runs += 1
            worst = max(worst, opt / bound)
            if opt > bound + SLACK:
                violations.append((i, p, opt, bound))
    elapsed = time.perf_counter() - t0
    ok = not violations and elapsed <= 600
    report(1, ok, f"{runs} runs on {len(corp)} instances, {len(violations)} violations, "
                  f"max |OPT|/bound = {worst:.3f}, {elapsed:.1f}s")


def test_criterion_2_gr_chain(corp):
    failures, runs = defaultdict(int), 0
    for inst in corp:
        for p in (0.0,) + PS + (1.0,):
            runs_here = [gr(inst, p)]
            # every round of the repeated scheduler is a gr run too
            P = non_weak_scale(inst, p)
            remaining = set(range(inst.n))
            while remaining:
                tr = gr(inst, p, links=remaining, assignment=P)
                runs_here.append(tr)
                remaining -= set(tr.final)
            for tr in runs_here:
                runs += 1
                for name, passed in check_gr_chain(inst, tr).items():
                    if not passed:
                        failures[name] += 1
    report(2, not failures, f"{runs} gr runs, violations by step: {dict(failures) or 'none'}")


def test_criterion_3_partition(corp):
    count, bad = 0, []
    for i, inst in enumerate(corp):
        prm = inst.params
        obl = non_weak_scale(inst, 0.5)
        obl_mat = AffectanceMatrix(inst, obl)
        for mode in ("pc", 0.5):
            for mask in feasible_family(inst, mode):
                S = _members(mask)
                if mode == "pc":
                    P = witness_assignment(inst, pc_solve(inst, S))
                    mat = AffectanceMatrix(inst, P)
                else:
                    P, mat = obl, obl_mat
                for q in (1.0, 2.0, 4.0):
                    part = partition_q_independent(inst, S, q, P, matrix=mat)
                    count += 1
                    limit = math.floor(2 * q**prm.alpha / prm.beta) + 1
                    flat = sorted(v for c in part.classes for v in c)
                    if (
                        len(part.classes) > limit
                        or flat != S
                        or not all(is_q_independent_set(inst, c, q) for c in part.classes)
                    ):
                        bad.append((i, mode, S, q))
    report(3, not bad, f"{count} partitions (pc and oblivious feasible sets, q in 1/2/4), {len(bad)} violations")


def test_criterion_4_identity(corp):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        inst = corp[int(rng.integers(len(corp)))]
        p = float(rng.uniform(0, 1))
        S = [v for v in range(inst.n) if rng.random() < rng.uniform(0.2, 1.0)]
        mat = AffectanceMatrix(inst, non_weak_scale(inst, p))
        a = mat.total(S)
        bh = sum(mat.hat_b_out(v, S) for v in S)
        b = sum(mat.b_sum(v, S) for v in S)
        worst = max(worst, abs(a - bh), abs(a - b / 2))
    report(4, worst <= 1e-12, f"1000 draws, max deviation {worst:.2e} (tol 1e-12)")


def test_criterion_5_feasible_sets_independent(corp):
    count, bad = 0, 0
    for inst in corp:
        q = inst.params.beta ** (1 / inst.params.alpha)
        for mode in ("pc",) + PS:
            for mask in feasible_family(inst, mode):
                count += 1
                if not is_q_independent_set(inst, _members(mask), q):
                    bad += 1
    report(5, bad == 0, f"{count} feasible sets checked for beta^(1/alpha)-independence, {bad} violations")


def test_criterion_6_pc_consistency(corp):
    rng = np.random.default_rng(6)
    bad, pairs, verdicts = [], 0, defaultdict(int)
    for k in range(500):
        inst = corp[int(rng.integers(len(corp)))]
        size = 2 if k % 3 == 0 else int(rng.integers(2, inst.n + 1))
        S = sorted(int(v) for v in rng.choice(inst.n, size=size, replace=False))
        res = pc_solve(inst, S)
        verdicts[res.verdict] += 1
        if res.feasible:
            powers = [1.0] * inst.n
            for v, pv in zip(res.links, res.min_powers):
                powers[v] = pv * (1 + 1e-8)
            if not oracles.sinr_ok(inst, S, powers):
                bad.append(("powers fail", S))
        elif res.verdict == "infeasible" and oracles.lp_pc_feasible(inst, S):
            bad.append(("lp finds powers", S))
        if size == 2:
            pairs += 1
            m = gain_matrix(inst, S).m
            rho = math.sqrt(m[0, 1] * m[1, 0])
            if rho < 1 - 1e-9 and not res.feasible or rho > 1 + 1e-9 and res.feasible:
                bad.append(("closed form", S, rho))
    report(6, not bad, f"500 sets ({pairs} pairs), verdicts {dict(verdicts)}, {len(bad)} violations")


def test_criterion_7_peel(corp):
    extra = [generate(GeneratorConfig(n, world_size=10, target_delta=16, seed=900 + s)) for n in (13, 14) for s in range(5)]
    worst_lo, worst_hi, bad = math.inf, 0.0, 0
    for inst in list(corp) + extra:
        for p in PS:
            exact = max_avg_affectance(inst, p).value
            peel = max_avg_affectance(inst, p, method="peel").value
            if exact > 0:
                worst_lo = min(worst_lo, peel / exact)
                worst_hi = max(worst_hi, peel / exact)
            if not (exact / 2 - 1e-12 <= peel <= exact + 1e-12):
                bad += 1
    n = (len(corp) + len(extra)) * len(PS)
    report(7, bad == 0, f"{n} runs (n up to 14), peel/exact in [{worst_lo:.3f}, {worst_hi:.3f}], {bad} violations")


def sweep(tmp_path, q):
    path = tmp_path / f"sweep_{q}.csv"
    code = cli.main([
        "measure", "--which", "ind", "--p", "0.5", "--q", q, "--n", "12",
        "--seeds", "0..49", "--sweep-delta", "4,16,256,1e4,1e6", "--csv", "-o", str(path),
    ])
    assert code == 0
    table = defaultdict(dict)
    with open(path) as fh:
        for row in csv.DictReader(fh):
            assert row["schema_version"] == "1"
            table[float(row["target_delta"])][int(row["seed"])] = float(row["value"])
    return table


def test_criterion_8_non_divergence(tmp_path):
    obl = sweep(tmp_path, "0.5")
    pc = sweep(tmp_path, "pc")
    deltas = sorted(obl)
    seeds = range(50)
    mean = lambda t, d: float(np.mean([t[d][s] for s in seeds]))
    # 3x rule, per seed and on the mean
    per_seed_3x = [s for s in seeds if obl[1e6][s] > 3 * obl[4.0][s]]
    mean_3x = mean(obl, 1e6) <= 3 * mean(obl, 4.0)
    # consecutive sweep points, per seed and on the mean
    steps = list(zip(deltas, deltas[1:]))
    per_seed_steps = [(s, a, b) for s in seeds for a, b in steps if pc[b][s] > 2 * pc[a][s]]
    mean_steps = all(mean(pc, b) <= 2 * mean(pc, a) for a, b in steps)
    ok = not per_seed_3x and mean_3x and not per_seed_steps and mean_steps
    means_o = ", ".join(f"{mean(obl, d):.2f}" for d in deltas)
    means_p = ", ".join(f"{mean(pc, d):.2f}" for d in deltas)
    report(8, ok, f"mean I(0.5,0.5) over Delta 4..1e6 = [{means_o}]; mean I(0.5,pc) = [{means_p}]; "
                  f"per-seed violations: 3x {len(per_seed_3x)}, consecutive {len(per_seed_steps)}")


def test_criterion_9_geometry():
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    geo = geometry_report([construct_geometry_sample(rng) for _ in range(1000)])
    l3 = l3_report([construct_l3_sample(rng) for _ in range(1000)])
    elapsed = time.perf_counter() - t0
    ok = geo.ok and l3.ok and geo.checked == 1000 and l3.checked == 1000 and elapsed <= 60
    report(9, ok, f"geometry {geo.checked} samples (max ratio {geo.stats['max_ratio']:.3f}), "
                  f"ball count {l3.checked} samples (max {l3.stats['max_l3_size']}), "
                  f"{len(geo.violations) + len(l3.violations)} violations, {elapsed:.1f}s")
