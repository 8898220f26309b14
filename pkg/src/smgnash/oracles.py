"""Brute-force reference implementations used to cross-check the solvers.

These deliberately share no algorithmic code with the main solvers: graph
structure comes from networkx and linear systems are solved by plain
Gauss-Jordan elimination.  Everything here is exponential and meant for
games with a handful of vertices.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

import networkx as nx

from .game import Arena, Game
from .objectives import Objective


def _graph(a: Arena, succ=None) -> nx.DiGraph:
    G = nx.DiGraph()
    G.add_nodes_from(a.states)
    succ = a.succ if succ is None else succ
    for s in a.states:
        G.add_edges_from((s, t) for t in succ[s])
    return G


def _closed_connected(a: Arena, C: frozenset) -> bool:
    for s in C:
        nxt = a.succ[s]
        if s in a.controller:
            if not any(t in C for t in nxt):
                return False
        elif any(t not in C for t in nxt):
            return False
    sub = nx.DiGraph()
    sub.add_nodes_from(C)
    sub.add_edges_from((s, t) for s in C for t in a.succ[s] if t in C)
    return nx.is_strongly_connected(sub)


def brute_force_ecs(a: Arena, U: Iterable | None = None) -> list[frozenset]:
    U = sorted(a.states if U is None else U, key=a.order.__getitem__)
    out = []
    for r in range(1, len(U) + 1):
        for c in combinations(U, r):
            C = frozenset(c)
            if _closed_connected(a, C):
                out.append(C)
    return out


def brute_force_ec_union(g, x: Sequence[int], U: Iterable | None = None,
                         objectives: Sequence[Objective] | None = None) -> frozenset:
    a = g.arena if isinstance(g, Game) else g
    objectives = g.objectives if objectives is None else objectives
    out = set()
    for C in brute_force_ecs(a, U):
        P = a.project(C)
        if all(int(o.accepts(P)) == b for o, b in zip(objectives, x)):
            out |= C
    return frozenset(out)


def _gauss_jordan(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(A)
    M = [row[:] + [rhs] for row, rhs in zip(A, b)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [e / p for e in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [e - f * q for e, q in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def chain_reach(states, succ, prob, target) -> dict:
    """Reachability probabilities of a chain given as successor lists and probabilities."""
    G = nx.DiGraph()
    G.add_nodes_from(states)
    G.add_edges_from((s, t) for s in states for t in succ[s])
    target = set(target)
    can = set(target)
    for t in target:
        can |= nx.ancestors(G, t)
    unknown = [s for s in states if s in can and s not in target]
    idx = {s: k for k, s in enumerate(unknown)}
    A = [[Fraction(int(r == c)) for c in range(len(unknown))] for r in range(len(unknown))]
    b = [Fraction(0)] * len(unknown)
    for s, r in idx.items():
        for t in succ[s]:
            p = prob[s, t]
            if t in target:
                b[r] += p
            elif t in idx:
                A[r][idx[t]] -= p
    sol = _gauss_jordan(A, b) if unknown else []
    val = {s: Fraction(0) for s in states}
    for s in target:
        val[s] = Fraction(1)
    for s, k in idx.items():
        val[s] = sol[k]
    return val


def _policy_rows(a: Arena, policy: dict):
    succ, prob = {}, {}
    for s in a.states:
        if s in a.controller:
            succ[s] = (policy[s],)
            prob[s, policy[s]] = Fraction(1)
        else:
            succ[s] = a.succ[s]
            for t in a.succ[s]:
                prob[s, t] = a.prob[s, t]
    return succ, prob


def chain_omega(a: Arena, succ, prob, objectives: Sequence[Objective]) -> list[dict]:
    G = nx.DiGraph()
    G.add_nodes_from(a.states)
    G.add_edges_from((s, t) for s in a.states for t in succ[s])
    cond = nx.condensation(G)
    bottoms = [frozenset(cond.nodes[c]["members"]) for c in cond if cond.out_degree(c) == 0]
    out = []
    for o in objectives:
        win = set()
        for B in bottoms:
            if o.accepts(a.project(B)):
                win |= B
        out.append(chain_reach(a.states, succ, prob, win))
    return out


def policies(a: Arena, states: Iterable | None = None):
    ctrl = sorted(a.controller if states is None else states, key=a.order.__getitem__)
    for combo in product(*(a.succ[s] for s in ctrl)):
        yield dict(zip(ctrl, combo))


def enumerate_mdp_reach(a: Arena, target) -> dict:
    best = {s: Fraction(0) for s in a.states}
    for pol in policies(a):
        succ, prob = _policy_rows(a, pol)
        val = chain_reach(a.states, succ, prob, target)
        for s in a.states:
            best[s] = max(best[s], val[s])
    return best


def enumerate_mdp_omega(a: Arena, o: Objective) -> dict:
    """Maximal winning probabilities by enumeration.

    Streett and Muller objectives may need memory even in MDPs, so for them
    the enumeration is over reachability of the brute-force union of winning
    end components, which positional policies do attain.
    """
    if o.kind in ("streett", "muller"):
        return enumerate_mdp_reach(a, brute_force_ec_union(a, (1,), objectives=[o]))
    best = {s: Fraction(0) for s in a.states}
    for pol in policies(a):
        succ, prob = _policy_rows(a, pol)
        val = chain_omega(a, succ, prob, [o])[0]
        for s in a.states:
            best[s] = max(best[s], val[s])
    return best


def profile_payoff(g: Game, profile: dict) -> list[dict]:
    a = g.arena
    succ, prob = _policy_rows(a, profile)
    return chain_omega(a, succ, prob, g.objectives)


def positional_zero_sum_values(g: Game, i: int = 0) -> dict:
    """max over player-i positional strategies of min over coalition positional
    strategies of player i's winning probability, per vertex.

    Valid as the game value where both sides have positional optimal
    strategies, for instance with parity objectives.
    """
    a = g.arena
    mine = [v for v in g.vertices if g.owner[v] == i]
    theirs = [v for v in g.vertices if g.owner[v] is not None and g.owner[v] != i]
    best = {v: Fraction(0) for v in g.vertices}
    for sigma in policies(a, mine):
        worst = {v: Fraction(1) for v in g.vertices}
        for tau in policies(a, theirs):
            succ, prob = _policy_rows(a, {**sigma, **tau})
            val = chain_omega(a, succ, prob, [g.objectives[i]])[0]
            for v in g.vertices:
                worst[v] = min(worst[v], val[v])
        for v in g.vertices:
            best[v] = max(best[v], worst[v])
    return best


def positional_positive_set(g: Game, i: int) -> frozenset:
    vals = positional_zero_sum_values(g, i)
    return frozenset(v for v, x in vals.items() if x > 0)


def monte_carlo_payoff(a: Arena, objectives: Sequence[Objective], v0, runs: int, seed: int):
    """Sampled winning frequencies and standard errors, simulating until a bottom SCC is entered."""
    rng = random.Random(seed)
    G = _graph(a)
    cond = nx.condensation(G)
    bottom_of = {}
    for c in cond:
        if cond.out_degree(c) == 0:
            B = frozenset(cond.nodes[c]["members"])
            for s in B:
                bottom_of[s] = B
    verdict = {B: [o.accepts(a.project(B)) for o in objectives] for B in set(bottom_of.values())}
    rows = {s: (list(a.succ[s]), [float(a.prob[s, t]) for t in a.succ[s]]) for s in a.states}
    wins = [0] * len(objectives)
    for _ in range(runs):
        s = v0
        while s not in bottom_of:
            ts, ps = rows[s]
            s = rng.choices(ts, ps)[0]
        for k, ok in enumerate(verdict[bottom_of[s]]):
            wins[k] += ok
    means = [w / runs for w in wins]
    errs = [math.sqrt(max(m * (1 - m), 1e-12) / runs) for m in means]
    return means, errs


def sat_truth_table(cnf: Sequence[Sequence[int]]) -> bool:
    nv = max((abs(l) for c in cnf for l in c), default=0)
    for bits in product((False, True), repeat=nv):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in cnf):
            return True
    return False
