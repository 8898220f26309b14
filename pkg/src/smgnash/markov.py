"""Exact analysis of Markov chains and MDPs obtained by fixing strategies."""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Iterable, Mapping

from .endcomponents import bottom_sccs, generic_ec_union, sccs
from .game import Arena, Game, GameError, MarkovChain, MDP
from .linalg import solve_exact
from .objectives import Objective

ONE = Fraction(1)
ZERO = Fraction(0)


class ProfileError(GameError):
    pass


def _distribution(g: Game, v, choice) -> dict:
    """Normalise a positional choice or a stationary distribution at ``v``."""
    if isinstance(choice, Mapping):
        dist = {w: Fraction(p) for w, p in choice.items() if Fraction(p) != 0}
        if any(p < 0 for p in dist.values()):
            raise ProfileError(f"negative probability at {v}")
        if sum(dist.values(), ZERO) != 1:
            raise ProfileError(f"distribution at {v} does not sum to 1")
    else:
        dist = {choice: ONE}
    for w in dist:
        if w not in g.succ[v]:
            raise ProfileError(f"{v}->{w} is not an edge")
    return dist


def _fixed_rows(g: Game, profile: Mapping, free: int | None):
    succ, prob, ctrl = {}, {}, {}
    for v in g.vertices:
        o = g.owner[v]
        if o is None:
            succ[v] = g.succ[v]
            for w in g.succ[v]:
                prob[v, w] = g.prob[v, w]
        elif o == free:
            succ[v] = g.succ[v]
            ctrl[v] = 0
        else:
            if v not in profile:
                raise ProfileError(f"profile has no choice at {v}")
            dist = _distribution(g, v, profile[v])
            succ[v] = tuple(sorted(dist))
            for w, p in dist.items():
                prob[v, w] = p
    return succ, prob, ctrl


def induce_markov_chain(g: Game, profile: Mapping) -> MarkovChain:
    """Chain over the game's vertices with every controlled vertex fixed by ``profile``.

    ``profile`` maps controlled vertices to a successor (positional) or to a
    distribution over successors (stationary).
    """
    succ, prob, _ = _fixed_rows(g, profile, None)
    return MarkovChain(g.vertices, succ, prob, {})


def induce_mdp(g: Game, profile: Mapping, i: int) -> MDP:
    """MDP in which player ``i`` moves freely and all other players follow ``profile``."""
    succ, prob, ctrl = _fixed_rows(g, profile, i)
    return MDP(g.vertices, succ, prob, ctrl)


# -- Markov chains -------------------------------------------------------

def _backward(a: Arena, seeds: Iterable, through=None) -> set:
    """States with a path into ``seeds``, only passing through states in ``through``."""
    seen = set(seeds)
    queue = deque(seen)
    while queue:
        t = queue.popleft()
        for s in a.pred[t]:
            if s not in seen and (through is None or s in through):
                seen.add(s)
                queue.append(s)
    return seen


def reach_probabilities_exact(mc: Arena, target: Iterable) -> dict:
    """Exact probability of eventually reaching ``target`` from every state."""
    T = frozenset(target)
    can = _backward(mc, T)
    zero = set(mc.states) - can
    # states that can reach a zero state while avoiding T reach T with prob < 1
    notone = _backward(mc, zero, through=set(mc.states) - T)
    val = {s: ONE for s in mc.states if s not in notone}
    for s in zero:
        val[s] = ZERO
    unknown = frozenset(s for s in mc.states if s not in val)
    # Tarjan emits components sinks first, so successors are always solved
    for comp in sccs(mc, unknown):
        idx = {s: k for k, s in enumerate(sorted(comp, key=mc.order.__getitem__))}
        n = len(idx)
        A = [[ZERO] * n for _ in range(n)]
        b = [ZERO] * n
        for s, r in idx.items():
            A[r][r] += 1
            for t in mc.succ[s]:
                p = mc.prob[s, t]
                if t in idx:
                    A[r][idx[t]] -= p
                else:
                    b[r] += p * val[t]
        for s, x in zip(idx, solve_exact(A, b)):
            val[s] = x
    return val


def mc_omega_values(mc: Arena, objectives: Iterable[Objective]) -> list[dict]:
    """Per objective, the probability of winning from every state of the chain."""
    objectives = list(objectives)
    bottoms = bottom_sccs(mc, frozenset(mc.states))
    out = []
    for o in objectives:
        win = set()
        for B in bottoms:
            if o.accepts(mc.project(B)):
                win |= B
        out.append(reach_probabilities_exact(mc, win))
    return out


def mc_omega_payoff(mc: Arena, objectives: Iterable[Objective], v0) -> list[Fraction]:
    return [vals[v0] for vals in mc_omega_values(mc, objectives)]


# -- MDPs ------------------------------------------------------------------

def almost_sure_reach_set(m: Arena, target: Iterable) -> frozenset:
    return almost_sure_reach_strategy(m, target)[0]


def almost_sure_reach_strategy(m: Arena, target: Iterable) -> tuple[frozenset, dict]:
    """States from which the controller reaches ``target`` with probability 1.

    Also returns a positional strategy attaining it: controlled states move
    to a successor strictly closer to the target inside the winning set.
    """
    T = frozenset(target)
    Z = set(m.states)
    while True:
        R = {s for s in T if s in Z}
        choice = {}
        frontier = True
        while frontier:
            added = []
            for s in m.states:
                if s in R or s not in Z:
                    continue
                nxt = m.succ[s]
                if s in m.controller:
                    w = next((t for t in nxt if t in R), None)
                    if w is not None:
                        added.append(s)
                        choice[s] = w
                elif all(t in Z for t in nxt) and any(t in R for t in nxt):
                    added.append(s)
            R.update(added)
            frontier = bool(added)
        if R == Z:
            break
        Z = R
    for s in T & Z:
        if s in m.controller:
            choice[s] = next((t for t in m.succ[s] if t in Z), m.succ[s][0])
    return frozenset(Z), choice


def _policy_chain(m: Arena, policy: dict) -> MarkovChain:
    succ, prob = {}, {}
    for s in m.states:
        if s in m.controller:
            succ[s] = (policy[s],)
            prob[s, policy[s]] = ONE
        else:
            succ[s] = m.succ[s]
            for t in m.succ[s]:
                prob[s, t] = m.prob[s, t]
    return MarkovChain(m.states, succ, prob, {})


def mdp_max_reach_value(m: Arena, target: Iterable) -> tuple[dict, dict]:
    """Maximal reachability probabilities and an optimal positional policy.

    Policy iteration over exact rationals.  States that cannot reach the
    target, and states winning almost surely, are settled graph-theoretically
    first; elsewhere the initial choice is the lowest successor and each
    improvement step switches to a best successor (lowest id on ties).
    """
    T = frozenset(target)
    sure, as_choice = almost_sure_reach_strategy(m, T)
    can = _backward(m, T)
    policy = {}
    for s in m.controller:
        if s in sure:
            policy[s] = as_choice[s]
        else:
            nxt = m.succ[s]
            policy[s] = next((t for t in nxt if t in can), nxt[0])
    while True:
        val = reach_probabilities_exact(_policy_chain(m, policy), T)
        changed = False
        for s in m.controller:
            if s in T or s in sure:
                continue
            cur = val[policy[s]]
            best = max(m.succ[s], key=lambda t: (val[t], -m.order[t]))
            if val[best] > cur:
                policy[s] = best
                changed = True
        if not changed:
            break
    _assert_bellman(m, T, val)
    return val, policy


def _assert_bellman(m: Arena, T: frozenset, val: dict) -> None:
    for s in m.states:
        if s in T:
            expect = ONE
        elif s in m.controller:
            expect = max(val[t] for t in m.succ[s])
        else:
            expect = sum((m.prob[s, t] * val[t] for t in m.succ[s]), ZERO)
        assert val[s] == expect, f"Bellman equation violated at {s!r}"


def winning_ec_union(m: Arena, o: Objective) -> frozenset:
    return generic_ec_union(m, (1,), objectives=[o])


def mdp_omega_value(m: Arena, o: Objective) -> dict:
    """Maximal probability of satisfying ``o`` from every state of ``m``."""
    return mdp_max_reach_value(m, winning_ec_union(m, o))[0]
