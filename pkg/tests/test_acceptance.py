"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import random
import time
from fractions import Fraction

import pytest

from smgnash import (ThresholdQuery, certify_positional, certify_zero_sum_equilibrium, emit_statne_smt,
                     gen_rabin_hardness_game, generic_ec_union, mc_omega_payoff, mdp_max_reach_value,
                     mdp_omega_value, positive_value_set, rabin_ec, solve_posne, solve_qualne, streett_ec,
                     synthesize_equilibrium, verify_finite_state_profile)
from smgnash.markov import induce_markov_chain
from smgnash.nash import positional_profiles, reaches_in_product, statne_assignment, support_of
from smgnash.objectives import Objective
from smgnash.oracles import (brute_force_ec_union, enumerate_mdp_omega, enumerate_mdp_reach,
                             monte_carlo_payoff, positional_zero_sum_values, sat_truth_table)
from smgnash.random_games import random_cnf, random_game, random_mdp
from smgnash.zerosum import coalition_solver

RESULTS = {}


def report(number, name, ok, detail=""):
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
    RESULTS[number] = line
    print(line)
    return ok


def qualne_corpus():
    """Seeded parity/Streett/Rabin games with at most 8 vertices and 3 players."""
    rng = random.Random(7)
    kinds = ("parity", "streett", "rabin")
    out = []
    while len(out) < 400:
        g = random_game(rng, n=rng.randint(2, 8), players=rng.randint(1, 3), kinds=kinds,
                        p_chance=0.25, max_out=3)
        out.append(g)
    return out


def accepted_instances(games):
    from itertools import product
    for g in games:
        for x in product((0, 1), repeat=g.players):
            res = solve_qualne(g, g.initial, x)
            if res.accepted:
                yield g, x, res


@pytest.fixture(scope="module")
def accepted():
    return list(accepted_instances(qualne_corpus()))


def test_criterion_1_hardness_gadget():
    rng = random.Random(1)
    t0 = time.perf_counter()
    bad = []
    for k in range(50):
        cnf = random_cnf(rng, max_vars=4, max_clauses=6)
        g = gen_rabin_hardness_game(cnf)
        if solve_qualne(g, "C1", (0, 1), synthesize=False).accepted != (not sat_truth_table(cnf)):
            bad.append(cnf)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 60
    assert report(1, "hardness gadget equivalence", ok, f"50 CNFs, {len(bad)} mismatches, {elapsed:.1f}s")


def test_criterion_2_synthesis_soundness(accepted):
    games = {id(g) for g, _, _ in accepted}
    failures = []
    for g, x, res in accepted:
        w = synthesize_equilibrium(g, g.initial, x)
        cert = verify_finite_state_profile(g, g.initial, w)
        if not cert.accepted or cert.payoff != [Fraction(b) for b in x]:
            failures.append((g, x, cert.reasons))
    ok = len(games) >= 100 and not failures
    assert report(2, "synthesized witnesses verify", ok,
                  f"{len(accepted)} accepted instances over {len(games)} games, {len(failures)} failures")


def test_criterion_3_end_component_oracles():
    rng = random.Random(3)
    t0 = time.perf_counter()
    bad = 0
    n = 0
    for k in range(240):
        kind = ("streett", "rabin", "mixed")[k % 3]
        kinds = ("parity", "buchi", "cobuchi", "streett", "rabin", "muller") if kind == "mixed" else (kind,)
        g = random_game(rng, n=rng.randint(2, 8), players=rng.randint(1, 3), kinds=kinds, p_chance=0.3)
        x = tuple(rng.randint(0, 1) for _ in range(g.players))
        expect = brute_force_ec_union(g, x)
        if kind == "streett":
            got = streett_ec(g, x)
        elif kind == "rabin":
            got = rabin_ec(g, x)
        else:
            got = generic_ec_union(g, x)
        bad += got != expect
        n += 1
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and n >= 200 and elapsed < 30
    assert report(3, "end-component unions match brute force", ok, f"{n} games, {bad} mismatches, {elapsed:.1f}s")


def test_criterion_4_mdp_values():
    rng = random.Random(4)
    bad = 0
    for k in range(120):
        g = random_mdp(rng, n=rng.randint(2, 8), kind=("parity", "streett", "rabin", "muller")[k % 4],
                       p_chance=0.4)
        a = g.arena
        T = frozenset(v for v in g.vertices if rng.random() < 0.3)
        val, _ = mdp_max_reach_value(a, T)
        bad += val != enumerate_mdp_reach(a, T)
        bad += mdp_omega_value(a, g.objectives[0]) != enumerate_mdp_omega(a, g.objectives[0])
    assert report(4, "MDP reach and omega values match enumeration", bad == 0, f"120 MDPs, {bad} mismatches")


def test_criterion_5_posne():
    rng = random.Random(5)
    bad = 0
    checked = 0
    for k in range(110):
        g = random_game(rng, n=rng.randint(2, 5), players=rng.randint(1, 3),
                        kinds=("parity", "buchi", "streett", "rabin"), p_chance=0.3)
        x = tuple(Fraction(rng.choice((0, 0, 1, 2)), 2) for _ in range(g.players))
        q = ThresholdQuery.at_least(x)
        found = solve_posne(g, g.initial, q)
        sweep = [p for p in positional_profiles(g) if certify_positional(g, g.initial, p, q).accepted]
        if (found is None) != (not sweep) or (found is not None and found != sweep[0]):
            bad += 1
        for p in sweep:
            c = certify_positional(g, g.initial, p, q)
            if not all(r <= z and lo <= z <= hi for r, z, lo, hi in zip(c.best_response, c.payoff, q.x, q.y)):
                bad += 1
        checked += 1
    assert report(5, "PosNE search matches exhaustive certification", bad == 0, f"{checked} games, {bad} mismatches")


def test_criterion_6_statne_consistency():
    from smgnash.nash import certify_stationary
    rng = random.Random(6)
    accepted = rejected = bad = 0
    for k in range(120):
        g = random_game(rng, n=rng.randint(2, 5), players=rng.randint(1, 2), kinds=("parity", "buchi"),
                        p_chance=0.3)
        prof = {}
        for v in g.controlled:
            ws = [w for w in g.succ[v] if rng.random() < 0.6] or [g.succ[v][0]]
            weights = [rng.randint(1, 3) for _ in ws]
            prof[v] = {w: Fraction(c, sum(weights)) for w, c in zip(ws, weights)}
        z = [p for p in mc_omega_payoff(induce_markov_chain(g, prof), g.objectives, g.initial)]
        # alternate between a query matching the payoff and a random one
        q = ThresholdQuery.exactly(z) if k % 2 == 0 else \
            ThresholdQuery.at_least([Fraction(rng.randint(0, 2), 2) for _ in z])
        cert = certify_stationary(g, g.initial, prof, q)
        script = emit_statne_smt(g, g.initial, q, support_of(g, prof))
        values = statne_assignment(g, prof)
        failing = script.failing(values)
        if cert.accepted:
            accepted += 1
            bad += bool(failing)
        else:
            rejected += 1
            bad += not any(c.block[0] == "final" for c in failing)
            bad += any(c.block[0] != "final" for c in failing)
    ok = bad == 0 and accepted > 0 and rejected > 0
    assert report(6, "StatNE script agrees with exact certification", ok,
                  f"{accepted} accepted, {rejected} rejected, {bad} inconsistencies")


def branching_chain(rng):
    """Chain with transient states feeding several absorbing states, so payoffs are fractional."""
    from smgnash import make_game
    n = rng.randint(2, 5)
    sinks = [f"s{k}" for k in range(rng.randint(2, 3))]
    trans = [f"t{k}" for k in range(n)]
    edges = []
    for k, v in enumerate(trans):
        ws = sorted(rng.sample(trans[k + 1:] + sinks, min(len(trans[k + 1:]) + len(sinks), rng.randint(2, 3))))
        weights = [rng.randint(1, 5) for _ in ws]
        edges += [(v, Fraction(c, sum(weights)), w) for w, c in zip(ws, weights)]
    for s in sinks:
        edges.append((s, Fraction(1), s))
    owner = {v: None for v in trans + sinks}
    win = Objective.buchi(rng.sample(sinks, len(sinks) - 1))
    return make_game(1, owner, edges, [win], "t0")


def test_criterion_7_monte_carlo():
    rng = random.Random(8)
    worst = 0.0
    fractional = 0
    for k in range(20):
        g = branching_chain(rng)
        exact = mc_omega_payoff(g.arena, g.objectives, g.initial)[0]
        fractional += 0 < exact < 1
        means, errs = monte_carlo_payoff(g.arena, g.objectives, g.initial, runs=100_000, seed=k)
        worst = max(worst, abs(float(exact) - means[0]) / errs[0])
    assert report(7, "exact chain payoffs agree with simulation", worst <= 3 and fractional >= 15,
                  f"20 chains x 1e5 runs ({fractional} with fractional payoff), worst deviation {worst:.2f} SE")


def zero_sum_parity(rng):
    g = random_game(rng, n=rng.randint(2, 6), players=2, kinds=("parity",), p_chance=0.3)
    pr = g.objectives[0].priority_map
    return g.with_objectives([Objective.parity(pr), Objective.parity({v: p + 1 for v, p in pr.items()})])


def optimal_positional(g, i):
    """Best positional strategy of player i against all positional coalition strategies, from g.initial."""
    from smgnash.oracles import chain_omega, policies
    from smgnash.oracles import _policy_rows
    a = g.arena
    mine = [v for v in g.vertices if g.owner[v] == i]
    theirs = [v for v in g.vertices if g.owner[v] is not None and g.owner[v] != i]
    best, arg = Fraction(-1), None
    for sigma in policies(a, mine):
        worst = min(chain_omega(a, *_policy_rows(a, {**sigma, **tau}), [g.objectives[i]])[0][g.initial]
                    for tau in policies(a, theirs))
        if worst > best:
            best, arg = worst, sigma
    return arg, best


def test_criterion_8_zero_sum_duality():
    rng = random.Random(9)
    bad = 0
    for k in range(50):
        g = zero_sum_parity(rng)
        s0, val = optimal_positional(g, 0)
        s1, _ = optimal_positional(g, 1)
        oracle = lambda game, v: positional_zero_sum_values(game, 0)[v]
        cert = certify_zero_sum_equilibrium(g, g.initial, [s0, s1], value_oracle=oracle)
        bad += not cert.accepted or cert.payoff != [val, 1 - val]
    assert report(8, "zero-sum equilibrium payoff equals (val, 1-val)", bad == 0, f"50 games, {bad} mismatches")


def test_criterion_9_reach_condition(accepted):
    cases = bad = 0
    for g, x, res in accepted:
        if 0 not in x:
            continue
        w = res.witness
        for i, b in enumerate(x):
            if b == 0:
                cases += 1
                P = coalition_solver(g, i).positive(g.vertices, 0)
                bad += reaches_in_product(g, g.initial, w.strategies, P)
    assert report(9, "witnesses never reach the zero players' positive sets", bad == 0 and cases > 0,
                  f"{cases} zero-payoff players checked, {bad} violations")


def test_positive_set_direct_agrees_with_lar():
    """Supports criterion 8: the default solver and the parity reduction give the same sets."""
    rng = random.Random(10)
    for k in range(30):
        g = random_game(rng, n=rng.randint(2, 5), players=2, kinds=("parity", "muller"), p_chance=0.3)
        assert positive_value_set(g, 0) == positive_value_set(g, 0, method="lar")


def test_summary(capsys):
    """Echo the collected lines so one -s run shows all verdicts together."""
    with capsys.disabled():
        for k in sorted(RESULTS):
            print(RESULTS[k])
