"""Acceptance criteria, one test each, at the stated tolerances.

Every test prints a single ``PASS``/``FAIL`` line (collected into the pytest
terminal summary).  Run standalone with ``python3 tests/test_acceptance.py``.
"""

import itertools
import time

import numpy as np
import pytest

from causalab.dag import Dag, all_paths, d_separated, d_separated_by_paths
from causalab.discovery import run_lingam, run_pc
from causalab.estimate import estimate_effect
from causalab.identify import identify_effect
from causalab.phenomena import build_entanglement_dataset, log_negativity, ohm, quantum, tides
from causalab.phenomena.quantum import BELL_PHI_PLUS
from causalab.pipeline import config_from_text, run_pipeline
from causalab.refute import aggregate_confidence, refute_data_subset, refute_placebo, refute_random_common_cause

from conftest import linear_sem
from scm import CASES, interventional_effect

RESULTS = []


def verdict(number, title, passed, detail, elapsed=None):
    timing = f" [{elapsed:.1f}s]" if elapsed is not None else ""
    line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}: {title}: {detail}{timing}"
    RESULTS.append(line)
    print(line)
    assert passed, line


def _ohm_effect(df, model, treatment, outcome="I"):
    e = identify_effect(model, treatment, outcome).get("backdoor")
    return e, estimate_effect(df, e)


def test_01_ohm_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(5):
        df = ohm.generate_ohm_dataset(10000, rng=seed)
        a = _ohm_effect(df, ohm.MODEL_A, "T")[1].ate
        c = _ohm_effect(df, ohm.MODEL_C, "T")[1].ate
        worst = max(worst, abs(a - c) / max(abs(a), abs(c)))
    elapsed = (time.perf_counter() - t0) / 5
    verdict(1, "Ohm T->I equal under models A and C", worst <= 1e-9 and elapsed < 5,
            f"max relative gap {worst:.2e} over 5 seeds, {elapsed:.2f}s per run", elapsed)


def test_02_ohm_falsification():
    t0 = time.perf_counter()
    wins = 0
    ties = 0
    for seed in range(100):
        df = ohm.generate_ohm_dataset(10000, rng=seed)
        cache = {}
        p = {}
        for name in "ABC":
            e, est = _ohm_effect(df, ohm.MODELS[name], "T")
            # identical estimands on identical data give identical refutations
            if e not in cache:
                cache[e] = refute_placebo(df, e, est, k=100, seed=seed).p_value
            p[name] = cache[e]
        wins += p["B"] < min(p["A"], p["C"])
        ties += p["B"] == p["A"] == p["C"]
    elapsed = time.perf_counter() - t0
    verdict(2, "Ohm model B placebo p lower than A and C", wins >= 95 and elapsed < 60,
            f"B lower in {wins}/100 seeds ({ties} ties: all three models share the empty adjustment set)", elapsed)


def test_03_ohm_signs():
    signs = {"V": set(), "R": set(), "T": set()}
    for seed in range(20):
        df = ohm.generate_ohm_dataset(10000, rng=seed)
        for model in ohm.MODELS.values():
            for t in signs:
                signs[t].add(np.sign(_ohm_effect(df, model, t)[1].ate))
    ok = signs["V"] == {1.0} and signs["R"] == {-1.0} and signs["T"] == {1.0}
    shown = {t: "".join("+" if s > 0 else "-" for s in sorted(v, reverse=True)) for t, v in signs.items()}
    verdict(3, "Ohm signs V->I +, R->I -, T->I +", ok,
            f"observed V->I {shown['V']}, R->I {shown['R']}, T->I {shown['T']} over 20 seeds x 3 models")


TIDE_CFG = """
[run]
seed = 0
[data]
fixture = tides/synthetic
[model]
builtin = tides
[effect]
treatment = {t}
outcome = h
[refute]
methods = placebo_treatment
k = 20
"""


def test_04_tides_pattern():
    df = tides.load_fixture()
    moon = estimate_effect(df, identify_effect(tides.DOMAIN_MODEL, "EMd", "h").get("backdoor")).ate
    sun = estimate_effect(df, identify_effect(tides.DOMAIN_MODEL, "ESd", "h").get("backdoor")).ate
    ratio = abs(moon) / abs(sun)
    texts = [run_pipeline(config_from_text(TIDE_CFG.format(t="EMd"))).text() for _ in range(2)]
    ok = moon < 0 and sun < 0 and ratio > 50 and texts[0] == texts[1]
    verdict(4, "tides ATEs negative with |EMd|/|ESd| > 50, reruns identical", ok,
            f"EMd {moon:.2f}, ESd {sun:.4f}, ratio {ratio:.0f}, rerun identical {texts[0] == texts[1]}")


def test_05_quantum():
    t0 = time.perf_counter()
    ate = {"E": [], "M_A": [], "M_B": []}
    wins = 0
    for seed in range(100):
        df = build_entanglement_dataset(20, 100, rng=seed)
        conf = {}
        for t in ate:
            e = identify_effect(quantum.DOMAIN_MODEL, t, "absC").get("backdoor")
            est = estimate_effect(df, e)
            ate[t].append(est.ate)
            if t in ("E", "M_A"):
                conf[t] = aggregate_confidence([
                    refute_random_common_cause(df, e, est, k=100, seed=seed),
                    refute_placebo(df, e, est, k=100, seed=seed),
                    refute_data_subset(df, e, est, k=100, seed=seed),
                ])
        wins += conf["E"] > conf["M_A"]
    elapsed = time.perf_counter() - t0
    med = {t: float(np.median(v)) for t, v in ate.items()}
    ok = 0.2 <= med["E"] <= 0.6 and abs(med["M_A"]) < 0.05 and abs(med["M_B"]) < 0.05 and wins >= 90 and elapsed < 120
    verdict(5, "quantum medians and confidence ordering", ok,
            f"median E {med['E']:.4f}, M_A {med['M_A']:.4f}, M_B {med['M_B']:.4f}; "
            f"conf(E) > conf(M_A) in {wins}/100", elapsed)


def test_06_zero_correlation_trap():
    df = build_entanglement_dataset(1000, 100, rng=0)
    per_state = df.groupby("state").first()
    mc, mabs = per_state["C"].mean(), per_state["absC"].mean()
    verdict(6, "mean C near 0, mean |C| > 0.1", abs(mc) <= 0.05 and mabs > 0.1,
            f"mean C {mc:+.4f}, mean |C| {mabs:.4f} over 1000 states")


def test_07_log_negativity():
    bell = log_negativity(BELL_PHI_PLUS)
    prod = log_negativity(np.diag([1.0, 0, 0, 0]).astype(complex))
    werner = log_negativity(0.5 * BELL_PHI_PLUS + 0.5 * np.eye(4) / 4)
    ok = abs(bell - 1) <= 1e-10 and abs(prod) <= 1e-10 and abs(werner - np.log2(1.25)) <= 1e-10
    verdict(7, "log-negativity oracles", ok, f"Bell {bell!r}, product {prod!r}, Werner {werner!r}")


def test_08_estimators():
    counts = {}
    for name, (sampler, estimand, _) in sorted(CASES.items()):
        truth = interventional_effect(sampler)
        hits = 0
        for seed in range(100):
            est = estimate_effect(sampler(5000, np.random.default_rng(seed)), estimand)
            hits += abs(est.ate - truth) <= 3 * est.se
        counts[name] = hits
    verdict(8, "estimators within 3 SE of interventional truth", min(counts.values()) >= 95,
            ", ".join(f"{k} {v}/100" for k, v in counts.items()))


def test_09_discovery():
    from causalab.dag import parse_dot
    import pandas as pd

    rng = np.random.default_rng(0)
    collider = run_pc(linear_sem(parse_dot("digraph { X -> Z; Y -> Z }"), 2000, rng))
    chain = run_pc(linear_sem(parse_dot("digraph { X -> Y -> Z }"), 2000, np.random.default_rng(0)))
    pc_ok = collider.directed == {("X", "Z"), ("Y", "Z")} and chain.skeleton == {frozenset("XY"), frozenset("YZ")}
    hits = 0
    for seed in range(20):
        r = np.random.default_rng(seed)
        x = r.uniform(-1, 1, 2000)
        g = run_lingam(pd.DataFrame({"x": x, "y": 2 * x + r.uniform(-1, 1, 2000)}))
        hits += g.edges == {("x", "y")}
    moon = ("EMd", "h") in run_lingam(tides.load_fixture()).edges
    verdict(9, "PC collider/chain, LiNGAM orientation, tides EMd->h", pc_ok and hits >= 19 and moon,
            f"PC fixtures {'ok' if pc_ok else 'wrong'}, LiNGAM {hits}/20, EMd->h kept {moon}")


def test_10_placebo_baseline():
    df = tides.load_fixture()
    e = identify_effect(tides.DOMAIN_MODEL, "EMd", "h").get("backdoor")
    est = estimate_effect(df, e)
    r = refute_placebo(df, e, est, k=100, seed=0)
    ok = abs(r.new_effect) <= 0.02 * abs(est.ate) and r.p_value >= 0.9
    verdict(10, "tides placebo near zero with p >= 0.9", ok,
            f"new effect {r.new_effect:.3f} vs bound {0.02 * abs(est.ate):.1f}, p {r.p_value:.4f}")


def _dag_classes(n):
    """One representative DAG per isomorphism class on ``n`` nodes.

    Every DAG is isomorphic to one whose edges go from lower to higher index;
    the canonical code is the smallest adjacency bitmask over all relabelings.
    """
    pairs = list(itertools.combinations(range(n), 2))
    masks = np.arange(1 << len(pairs), dtype=np.int64)
    best = np.full(masks.shape, np.iinfo(np.int64).max)
    for perm in itertools.permutations(range(n)):
        code = np.zeros_like(masks)
        for b, (i, j) in enumerate(pairs):
            code |= ((masks >> b) & 1) << (perm[i] * n + perm[j])
        np.minimum(best, code, out=best)
    _, idx = np.unique(best, return_index=True)
    return [[pairs[b] for b in range(len(pairs)) if m >> b & 1] for m in masks[idx]]


def _open_paths(g, index, x, y):
    """Each path as (non-collider mask, [descendant mask per collider]); same rules as Path.is_blocked."""
    desc = {v: sum(1 << index[d] for d in g.descendants(v)) for v in index}
    out = []
    for p in all_paths(g, x, y):
        noncol, cols = 0, []
        for i in range(1, len(p.nodes) - 1):
            if p.is_collider(i):
                cols.append(desc[p.nodes[i]])
            else:
                noncol |= 1 << index[p.nodes[i]]
        out.append((noncol, cols))
    return out


def test_11_d_separation_exhaustive():
    t0 = time.perf_counter()
    counts = {n: len(_dag_classes(n)) for n in range(1, 7)}
    queries = mismatches = 0
    for n in range(1, 7):
        names = [f"v{i}" for i in range(n)]
        index = {v: i for i, v in enumerate(names)}
        for edges in _dag_classes(n):
            g = Dag(names, [(names[i], names[j]) for i, j in edges])
            for x, y in itertools.combinations(names, 2):
                paths = _open_paths(g, index, x, y)
                others = [v for v in names if v not in (x, y)]
                for r in range(len(others) + 1):
                    for zs in itertools.combinations(others, r):
                        zm = sum(1 << index[z] for z in zs)
                        oracle = not any(not (nc & zm) and all(c & zm for c in cols) for nc, cols in paths)
                        queries += 1
                        mismatches += d_separated(g, {x}, {y}, set(zs)) != oracle
    # the bitmask oracle mirrors d_separated_by_paths; confirm on a sample
    sample_rng = np.random.default_rng(0)
    six = _dag_classes(6)
    for k in sample_rng.choice(len(six), 50, replace=False):
        names = [f"v{i}" for i in range(6)]
        g = Dag(names, [(names[i], names[j]) for i, j in six[k]])
        for x, y in itertools.combinations(names, 2):
            zs = {v for v in names if v not in (x, y) and sample_rng.random() < 0.5}
            mismatches += d_separated(g, x, y, zs) != d_separated_by_paths(g, x, y, zs)
    elapsed = time.perf_counter() - t0
    verdict(11, "d-separation vs path oracle, all DAGs up to 6 nodes", mismatches == 0 and elapsed < 60,
            f"{queries} queries over {sum(counts.values())} isomorphism classes {tuple(counts.values())}, "
            f"{mismatches} mismatches", elapsed)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
