import random
import sys
from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from smgnash import (EquilibriumWitness, FiniteStateStrategy, ThresholdQuery, build_qualne_mdp, certify_positional,
                     certify_stationary, certify_zero_sum_equilibrium, ec_sweep_profile, emit_statne_smt,
                     gen_rabin_hardness_game, make_game, solve_posne, solve_qualne, solve_statne,
                     synthesize_equilibrium, verify_finite_state_profile)
from smgnash.game import GameError
from smgnash.nash import (NotZeroSum, SearchSpaceExceeded, candidate_supports, positional_profiles,
                          statne_assignment, support_of)
from smgnash.objectives import Objective
from smgnash.random_games import random_game
from smgnash.strategy import positional_strategy

from conftest import DATA, needs_z3, z3_command

seeds = st.integers(0, 100_000)
FAKE = f"{sys.executable} {DATA / 'fake_solver.py'}"


def three_sinks():
    """Player 0 picks one of three sinks; player k wants sink k."""
    owner = {"s": 0, "k0": None, "k1": None, "k2": None}
    edges = [("s", "k0"), ("s", "k1"), ("s", "k2")] + [(k, 1, k) for k in ("k0", "k1", "k2")]
    objs = [Objective.buchi({f"k{i}"}) for i in range(3)]
    return make_game(3, owner, edges, objs, "s")


def deviation_game():
    """c (player 0) goes to a dead end d or to e, where player 1 picks w or l."""
    owner = {"c": 0, "d": None, "e": 1, "w": None, "l": None}
    edges = [("c", "d"), ("c", "e"), ("e", "w"), ("e", "l"), ("d", 1, "d"), ("w", 1, "w"), ("l", 1, "l")]
    return make_game(2, owner, edges, [Objective.buchi({"w"}), Objective.buchi({"l"})], "c")


def zero_sum_choice():
    owner = {"s": 0, "a": None, "b": None}
    edges = [("s", "a"), ("s", "b"), ("a", 1, "a"), ("b", 1, "b")]
    pr = {"s": 1, "a": 0, "b": 1}
    return make_game(2, owner, edges, [Objective.parity(pr), Objective.parity({v: p + 1 for v, p in pr.items()})],
                     "s")


# -- threshold queries and positional certification ---------------------------

def test_threshold_query_validation():
    with pytest.raises(ValueError):
        ThresholdQuery((F(1, 2),), (F(1, 3),))
    with pytest.raises(ValueError):
        ThresholdQuery((0, 0), (1,))
    assert ThresholdQuery.at_least([F(1, 2)]).y == (1,)


def test_certify_g2_choice(g2_choice):
    good = certify_positional(g2_choice, "c", {"c": "v0"}, ThresholdQuery.exactly([F(1, 2)]))
    assert good.accepted and good.payoff == [F(1, 2)] and good.best_response == [F(1, 2)]
    bad = certify_positional(g2_choice, "c", {"c": "b"}, ThresholdQuery.at_least([0]))
    assert not bad.accepted and "player 0 gains" in bad.reasons[0]


def test_certificate_json(g2_choice):
    c = certify_positional(g2_choice, "c", {"c": "v0"}, ThresholdQuery.at_least([0]))
    assert c.to_json() == {"verdict": "accept", "payoff": ["1/2"], "best_response": ["1/2"], "reasons": [],
                           "profile": {"c": "v0"}}


def test_certify_stationary_mixture(g2_choice):
    c = certify_stationary(g2_choice, "c", {"c": {"v0": F(1, 2), "b": F(1, 2)}}, ThresholdQuery.at_least([0]))
    assert c.payoff == [F(1, 4)] and not c.accepted


def test_posne_three_players():
    g = three_sinks()
    assert solve_posne(g, "s", ThresholdQuery.at_least([0, 0, 0])) == {"s": "k0"}
    assert solve_posne(g, "s", ThresholdQuery.at_least([0, 1, 0])) is None
    assert solve_posne(g, "s", ThresholdQuery.exactly([1, 0, 0])) == {"s": "k0"}


def test_posne_cap():
    with pytest.raises(SearchSpaceExceeded):
        solve_posne(three_sinks(), "s", ThresholdQuery.at_least([0, 0, 0]), cap=2)


def test_query_length_checked(g2_choice):
    with pytest.raises(ValueError):
        solve_posne(g2_choice, "c", ThresholdQuery.at_least([0, 0]))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 5), st.integers(1, 3))
def test_lower_thresholds_keep_equilibria(seed, n, players):
    rng = random.Random(seed)
    g = random_game(rng, n=n, players=players, kinds=("parity", "buchi"), p_chance=0.3)
    x = [F(rng.randint(0, 2), 2) for _ in range(players)]
    p = solve_posne(g, g.initial, ThresholdQuery.at_least(x))
    if p is not None:
        lower = [F(rng.randint(0, int(2 * xi)), 2) for xi in x]
        assert certify_positional(g, g.initial, p, ThresholdQuery.at_least(lower)).accepted


# -- stationary equilibria --------------------------------------------------

def test_statne_script_is_deterministic(g2_choice):
    q = ThresholdQuery.at_least([F(1, 2)])
    S = {("c", "v0"), ("v0", "a"), ("v0", "b"), ("a", "a"), ("b", "b")}
    t1 = emit_statne_smt(g2_choice, "c", q, S).text()
    t2 = emit_statne_smt(g2_choice, "c", q, sorted(S, reverse=True)).text()
    assert t1 == t2
    assert t1.startswith("; stationary") and "(check-sat)" in t1


def test_statne_g1_substitution(g1):
    q = ThresholdQuery.exactly([1])
    script = emit_statne_smt(g1, "v", q, support_of(g1, {"v": "v"}))
    values = statne_assignment(g1, {"v": "v"})
    assert script.failing(values) == []
    assert values["z_0_0"] == 1 and values["r_0_0"] == 1


def test_statne_rejected_fails_final_block(g2_choice):
    prof = {"c": "b"}
    q = ThresholdQuery.at_least([0])
    script = emit_statne_smt(g2_choice, "c", q, support_of(g2_choice, prof))
    failing = script.failing(statne_assignment(g2_choice, prof))
    assert failing and all(c.block == ("final", 0) for c in failing)


def test_bad_support_rejected(g2_choice):
    with pytest.raises(GameError):
        emit_statne_smt(g2_choice, "c", ThresholdQuery.at_least([0]), {("c", "a")})


def test_candidate_supports_order(g2_choice):
    sups = list(candidate_supports(g2_choice))
    assert len(sups) == 3
    assert [len(s) for s in sups] == [5, 5, 6]
    assert ("c", "b") in sups[0]


def test_statne_fake_solver_unsat(g2_choice):
    res = solve_statne(g2_choice, "c", ThresholdQuery.exactly([1]), solver=f"{FAKE} unsat")
    assert res.status == "none" and res.supports_tried == 3


def test_statne_fake_solver_sat_is_recertified(g2_choice):
    res = solve_statne(g2_choice, "c", ThresholdQuery.exactly([F(1, 2)]), solver=f"{FAKE} sat")
    # the first support (c->b) cannot be certified, the second can
    assert res.status == "found" and res.profile == {"c": {"v0": 1}}
    assert res.inconclusive == ["a->a b->b c->b v0->a v0->b"]


def test_statne_fake_solver_unknown(g2_choice):
    res = solve_statne(g2_choice, "c", ThresholdQuery.exactly([1]), solver=f"{FAKE} unknown")
    assert res.status == "inconclusive" and len(res.inconclusive) == 3


@needs_z3
def test_statne_z3(g2_choice):
    res = solve_statne(g2_choice, "c", ThresholdQuery.exactly([F(1, 2)]), solver=z3_command())
    assert res.status == "found" and res.certificate.accepted
    none = solve_statne(g2_choice, "c", ThresholdQuery.exactly([1]), solver=z3_command())
    assert none.status == "none"


# -- qualitative equilibria -------------------------------------------------

def test_qualne_g1(g1):
    res = solve_qualne(g1, "v", (1,))
    assert res.accepted and res.target == {"v"}
    assert [s.memory for s in res.witness.strategies] == [1]
    assert not solve_qualne(g1, "v", (0,)).accepted


def test_qualne_g2_choice(g2_choice):
    assert not solve_qualne(g2_choice, "c", (1,)).accepted
    res = solve_qualne(g2_choice, "c", (0,))
    assert not res.accepted and "positive probability" in res.reasons[0]
    assert solve_qualne(g2_choice, "b", (0,)).accepted


def test_build_qualne_mdp(g2_choice):
    q = build_qualne_mdp(g2_choice, (0,))
    assert q.positive[0] == {"c", "v0", "a"}
    assert q.zone == {"b"} and q.target == {"b"}
    assert q.mdp.states == ("b",)


def test_binary_payoff_required(g1):
    with pytest.raises(ValueError):
        solve_qualne(g1, "v", (2,))


def test_ec_sweep_profile():
    g = deviation_game()
    assert ec_sweep_profile(g, {"w"}) == {}
    loop = make_game(1, {"a": 0, "b": 0}, [("a", "a"), ("a", "b"), ("b", "a")], [Objective.buchi({"a"})], "a")
    assert ec_sweep_profile(loop, {"a", "b"}) == {"a": {"a": F(1, 2), "b": F(1, 2)}, "b": {"a": 1}}
    with pytest.raises(GameError):
        ec_sweep_profile(loop, {"b"})


def test_synthesize_g1_is_memoryless(g1):
    w = synthesize_equilibrium(g1, "v", (1,))
    assert w.strategies[0].memory == 1
    assert verify_finite_state_profile(g1, "v", w).accepted


def test_synthesize_refuses_impossible(g2_choice):
    with pytest.raises(GameError):
        synthesize_equilibrium(g2_choice, "c", (1,))


def test_verify_names_the_deviator():
    g = deviation_game()
    w = EquilibriumWitness([positional_strategy(0, {"c": "d"}, g.vertices),
                            positional_strategy(1, {"e": "w"}, g.vertices)], (0, 0), "c")
    cert = verify_finite_state_profile(g, "c", w)
    assert not cert.accepted
    assert cert.reasons == ["player 0 gains by deviating: 1 > 0"]


def test_verify_rejects_wrong_claim(g1):
    w = synthesize_equilibrium(g1, "v", (1,))
    cert = verify_finite_state_profile(g1, "v", EquilibriumWitness(w.strategies, (0,), "v"))
    assert not cert.accepted and "differs from claimed" in cert.reasons[0]


def test_witness_json_round_trip():
    g = deviation_game()
    w = synthesize_equilibrium(g, "c", (0, 1))
    back = EquilibriumWitness.from_json(w.to_json())
    assert back.to_json() == w.to_json()
    assert verify_finite_state_profile(g, "c", back).accepted


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 6), st.integers(1, 3))
def test_synthesized_witnesses_verify(seed, n, players):
    rng = random.Random(seed)
    kinds = ("parity", "buchi", "cobuchi", "streett", "rabin", "muller")
    g = random_game(rng, n=n, players=players, kinds=kinds, p_chance=0.3)
    for x in product((0, 1), repeat=players):
        res = solve_qualne(g, g.initial, x)
        if res.accepted:
            cert = verify_finite_state_profile(g, g.initial, res.witness)
            assert cert.accepted and cert.payoff == list(x)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 5), st.integers(1, 3))
def test_positional_binary_equilibria_are_found(seed, n, players):
    g = random_game(random.Random(seed), n=n, players=players, kinds=("parity", "rabin", "streett"), p_chance=0.3)
    q = ThresholdQuery((0,) * players, (1,) * players)
    for p in positional_profiles(g):
        c = certify_positional(g, g.initial, p, q)
        if c.accepted and all(z in (0, 1) for z in c.payoff):
            assert solve_qualne(g, g.initial, [int(z) for z in c.payoff], synthesize=False).accepted


# -- zero-sum games -----------------------------------------------------------

def test_zero_sum_certification():
    g = zero_sum_choice()
    good = certify_zero_sum_equilibrium(g, "s", [{"s": "a"}, {}])
    assert good.accepted and good.payoff == [1, 0]
    bad = certify_zero_sum_equilibrium(g, "s", [{"s": "b"}, {}])
    assert not bad.accepted and "not optimal" in bad.reasons[0]


def test_zero_sum_value_oracle_mismatch():
    g = zero_sum_choice()
    cert = certify_zero_sum_equilibrium(g, "s", [{"s": "a"}, {}], value_oracle=lambda game, v: F(1, 2))
    assert not cert.accepted and "differs from the value" in cert.reasons[0]


def test_zero_sum_machines_accepted():
    g = zero_sum_choice()
    s0 = positional_strategy(0, {"s": "a"}, g.vertices)
    s1 = FiniteStateStrategy(1, 1, 0, {(0, v): 0 for v in g.vertices}, {})
    assert certify_zero_sum_equilibrium(g, "s", [s0, s1]).accepted


def test_not_zero_sum():
    with pytest.raises(NotZeroSum):
        certify_zero_sum_equilibrium(deviation_game(), "c", [{"c": "d"}, {"e": "w"}])
    with pytest.raises(NotZeroSum):
        certify_zero_sum_equilibrium(three_sinks(), "s", [{"s": "k0"}, {}, {}])


# -- hardness gadget ----------------------------------------------------------

def test_gadget_shape():
    g = gen_rabin_hardness_game([[1, -2], [2]])
    assert g.vertices == ("C1", "C2", "X1", "X2", "~X2")
    assert g.succ["C1"] == ("X1", "~X2") and g.succ["X1"] == ("C1", "C2")
    assert g.owner["C1"] == 0 and g.owner["~X2"] == 1
    assert g.objectives[0].pairs == Objective.rabin([({"X1"}, set()), ({"X2"}, {"~X2"}),
                                                     ({"~X2"}, {"X2"})]).pairs


@pytest.mark.parametrize("cnf, unsat", [
    ([[1], [-1]], True),
    ([[1]], False),
    ([[1, 2], [-1, 2], [1, -2], [-1, -2]], True),
    ([[1, 2], [-1, -2]], False),
])
def test_gadget_equivalence(cnf, unsat):
    g = gen_rabin_hardness_game(cnf)
    res = solve_qualne(g, "C1", (0, 1))
    assert res.accepted == unsat
    if unsat:
        assert verify_finite_state_profile(g, "C1", res.witness).accepted


def test_gadget_rejects_bad_input():
    with pytest.raises(ValueError):
        gen_rabin_hardness_game([])
    with pytest.raises(ValueError):
        gen_rabin_hardness_game([[1], []])
