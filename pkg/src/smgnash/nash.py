"""Nash equilibria in stochastic multiplayer games.

Certifiers and searches for positional and stationary equilibria, the
qualitative decision procedure with binary payoffs and its constructive
finite-state witnesses, and the Rabin hardness gadget.
"""

from __future__ import annotations

import logging
import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .endcomponents import bottom_sccs, generic_ec_union, generic_ec_witnesses, is_end_component, largest_subarena
from .game import Arena, Game, GameError, MarkovChain, MDP, format_rational, make_game
from .markov import (almost_sure_reach_strategy, induce_markov_chain, induce_mdp, mc_omega_payoff,
                     mc_omega_values, mdp_omega_value)
from .objectives import Objective, nonempty_subsets
from .smt import (Constraint, SmtScript, SolverUnavailable, add, const, mul, run_solver, var)
from .strategy import FiniteStateStrategy, compile_program, minimize
from .zerosum import coalition_solver

log = logging.getLogger(__name__)

SOLVER_ENV = "SMGNASH_SMT_SOLVER"


class SearchSpaceExceeded(RuntimeError):
    pass


class NotZeroSum(GameError):
    pass


# -- queries and certificates ------------------------------------------------

@dataclass(frozen=True)
class ThresholdQuery:
    x: tuple
    y: tuple

    def __post_init__(self):
        x = tuple(Fraction(a) for a in self.x)
        y = tuple(Fraction(b) for b in self.y)
        if len(x) != len(y):
            raise ValueError("threshold vectors differ in length")
        for i, (a, b) in enumerate(zip(x, y)):
            if not 0 <= a <= b <= 1:
                raise ValueError(f"player {i}: need 0 <= x <= y <= 1")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def exactly(cls, z: Sequence) -> ThresholdQuery:
        return cls(tuple(z), tuple(z))

    @classmethod
    def at_least(cls, x: Sequence) -> ThresholdQuery:
        return cls(tuple(x), tuple(1 for _ in x))

    def __len__(self):
        return len(self.x)


@dataclass
class Certificate:
    accepted: bool
    payoff: list
    best_response: list
    reasons: list = field(default_factory=list)
    profile: dict | None = None

    def to_json(self) -> dict:
        out = {
            "verdict": "accept" if self.accepted else "reject",
            "payoff": [format_rational(z) for z in self.payoff],
            "best_response": [format_rational(r) for r in self.best_response],
            "reasons": list(self.reasons),
        }
        if self.profile is not None:
            out["profile"] = _profile_json(self.profile)
        return out


def _profile_json(profile: Mapping) -> dict:
    out = {}
    for v in sorted(profile):
        c = profile[v]
        if isinstance(c, Mapping):
            out[v] = {w: format_rational(p) for w, p in sorted(c.items())}
        else:
            out[v] = c
    return out


def threshold_violations(payoff: Sequence, best: Sequence, q: ThresholdQuery) -> list[str]:
    """Reasons why the Nash and threshold inequalities fail, empty when they all hold."""
    out = []
    for i, (z, r) in enumerate(zip(payoff, best)):
        if r > z:
            out.append(f"player {i} gains by deviating: {format_rational(r)} > {format_rational(z)}")
        if z < q.x[i]:
            out.append(f"player {i} payoff {format_rational(z)} below {format_rational(q.x[i])}")
        if z > q.y[i]:
            out.append(f"player {i} payoff {format_rational(z)} above {format_rational(q.y[i])}")
    return out


def _check_query(g: Game, v0, q: ThresholdQuery | None):
    if v0 not in g.owner:
        raise GameError(f"unknown initial vertex {v0}")
    if q is not None and len(q) != g.players:
        raise ValueError(f"query has {len(q)} components for {g.players} players")


def _certify(g: Game, v0, profile: Mapping, q: ThresholdQuery) -> Certificate:
    _check_query(g, v0, q)
    mc = induce_markov_chain(g, profile)
    z = mc_omega_payoff(mc, g.objectives, v0)
    r = [mdp_omega_value(induce_mdp(g, profile, i), o)[v0] for i, o in enumerate(g.objectives)]
    reasons = threshold_violations(z, r, q)
    return Certificate(not reasons, z, r, reasons, dict(profile))


def certify_positional(g: Game, v0, profile: Mapping[str, str], q: ThresholdQuery) -> Certificate:
    """Exact check that a positional profile is an equilibrium with payoff within ``q``."""
    for v, w in profile.items():
        if isinstance(w, Mapping):
            raise GameError(f"positional profile has a distribution at {v}")
    return _certify(g, v0, profile, q)


def certify_stationary(g: Game, v0, profile: Mapping[str, Mapping], q: ThresholdQuery) -> Certificate:
    """Exact check for a stationary profile given as rational distributions."""
    norm = {}
    for v, d in profile.items():
        norm[v] = {w: Fraction(p) for w, p in d.items()} if isinstance(d, Mapping) else {d: Fraction(1)}
    return _certify(g, v0, norm, q)


def positional_profiles(g: Game):
    ctrl = sorted(g.controlled)
    for combo in product(*(g.succ[v] for v in ctrl)):
        yield dict(zip(ctrl, combo))


def profile_count(g: Game) -> int:
    n = 1
    for v in g.controlled:
        n *= len(g.succ[v])
    return n


def solve_posne(g: Game, v0, q: ThresholdQuery, cap: int = 1_000_000) -> dict | None:
    """First positional equilibrium within ``q`` in lexicographic order, or None."""
    _check_query(g, v0, q)
    n = profile_count(g)
    if n > cap:
        raise SearchSpaceExceeded(f"{n} positional profiles exceed the cap of {cap}")
    for p in positional_profiles(g):
        if certify_positional(g, v0, p, q).accepted:
            return p
    return None


# -- stationary equilibria -----------------------------------------------------

def support_of(g: Game, profile: Mapping) -> frozenset:
    """Edges used with positive probability, including all stochastic edges."""
    S = set()
    for v in g.vertices:
        if g.owner[v] is None:
            S.update((v, w) for w in g.succ[v])
        else:
            c = profile[v]
            if isinstance(c, Mapping):
                S.update((v, w) for w, p in c.items() if Fraction(p) > 0)
            else:
                S.add((v, c))
    return frozenset(S)


def check_support(g: Game, S: Iterable) -> frozenset:
    S = frozenset(S)
    for v, w in S:
        if v not in g.owner or w not in g.succ.get(v, ()):
            raise GameError(f"support edge {v}->{w} is not an edge of the game")
    for v in g.vertices:
        row = {w for u, w in S if u == v}
        if g.owner[v] is None:
            if row != set(g.succ[v]):
                raise GameError(f"support at stochastic vertex {v} must be all of its edges")
        elif not row:
            raise GameError(f"support has no edge leaving {v}")
    return S


def _support_arena(g: Game, S: frozenset, free: int | None) -> Arena:
    """Graph of the support; player ``free`` keeps all its edges.  Probabilities are placeholders."""
    succ, prob, ctrl = {}, {}, {}
    for v in g.vertices:
        if free is not None and g.owner[v] == free:
            succ[v] = g.succ[v]
            ctrl[v] = 0
        else:
            succ[v] = tuple(sorted(w for u, w in S if u == v))
            for w in succ[v]:
                prob[v, w] = Fraction(1, len(succ[v]))
    cls = MarkovChain if free is None else MDP
    return cls(g.vertices, succ, prob, ctrl)


@dataclass(frozen=True)
class SupportSets:
    winning_bottoms: tuple  # per player: union of winning bottom SCCs
    positive: tuple  # per player: vertices reaching it with positive probability
    winning_ecs: tuple  # per player: union of winning end components with the others fixed


def support_sets(g: Game, S: Iterable) -> SupportSets:
    S = check_support(g, S)
    chain = _support_arena(g, S, None)
    bottoms = bottom_sccs(chain, frozenset(chain.states))
    F, R, T = [], [], []
    for i, o in enumerate(g.objectives):
        win = frozenset().union(*[B for B in bottoms if o.accepts(B)]) if bottoms else frozenset()
        F.append(win)
        reach = set(win)
        queue = deque(win)
        while queue:
            t = queue.popleft()
            for s in chain.pred[t]:
                if s not in reach:
                    reach.add(s)
                    queue.append(s)
        R.append(frozenset(reach))
        T.append(generic_ec_union(_support_arena(g, S, i), (1,), objectives=[o]))
    return SupportSets(tuple(F), tuple(R), tuple(T))


def _vindex(g: Game) -> dict:
    return {v: k for k, v in enumerate(g.vertices)}


def alpha_name(g: Game, v, w) -> str:
    ix = _vindex(g)
    return f"a_{ix[v]}_{ix[w]}"


def emit_statne_smt(g: Game, v0, q: ThresholdQuery, S: Iterable) -> SmtScript:
    """Real-arithmetic sentence satisfiable iff a stationary equilibrium with support ``S``
    and payoff within ``q`` exists.  Emission is deterministic."""
    _check_query(g, v0, q)
    S = check_support(g, S)
    sets = support_sets(g, S)
    V = g.vertices
    ix = _vindex(g)
    manifest = {}

    def a(v, w):
        name = f"a_{ix[v]}_{ix[w]}"
        manifest[name] = ("alpha", v, w)
        return var(name)

    def z(i, v):
        name = f"z_{i}_{ix[v]}"
        manifest[name] = ("z", i, v)
        return var(name)

    def r(i, v):
        name = f"r_{i}_{ix[v]}"
        manifest[name] = ("r", i, v)
        return var(name)

    cons = []

    def c(lhs, op, rhs, block):
        cons.append(Constraint(lhs, op, rhs, block))

    blk = ("profile",)
    for v in V:
        if g.owner[v] is not None:
            for w in V:
                if w in g.succ[v]:
                    c(a(v, w), ">=", const(0), blk)
                else:
                    c(a(v, w), "=", const(0), blk)
            c(add(*(a(v, w) for w in g.succ[v])), "=", const(1), blk)
        else:
            for w in V:
                c(a(v, w), "=", const(g.prob.get((v, w), 0)), blk)
    for v in V:
        for w in V:
            if (v, w) in S:
                c(a(v, w), ">", const(0), blk)
            else:
                c(a(v, w), "=", const(0), blk)
    for i in range(g.players):
        F, R, T = sets.winning_bottoms[i], sets.positive[i], sets.winning_ecs[i]
        blk = ("payoff", i)
        for v in V:
            if v in F:
                c(z(i, v), "=", const(1), blk)
        for v in V:
            if v not in R:
                c(z(i, v), "=", const(0), blk)
        for v in V:
            if v not in F:
                c(z(i, v), "=", add(*(mul(a(v, w), z(i, w)) for w in g.succ[v])), blk)
        blk = ("best-response", i)
        for v in V:
            c(r(i, v), ">=", const(0), blk)
        for v in V:
            if v in T:
                c(r(i, v), "=", const(1), blk)
        for v in V:
            if g.owner[v] == i:
                for w in g.succ[v]:
                    c(r(i, v), ">=", r(i, w), blk)
            else:
                c(r(i, v), "=", add(*(mul(a(v, w), r(i, w)) for w in g.succ[v])), blk)
        blk = ("final", i)
        c(r(i, v0), "<=", z(i, v0), blk)
        c(const(q.x[i]), "<=", z(i, v0), blk)
        c(z(i, v0), "<=", const(q.y[i]), blk)
    comments = [f"stationary equilibrium query from {v0}, {len(S)} support edges"]
    return SmtScript(cons, manifest, comments)


def statne_assignment(g: Game, profile: Mapping) -> dict:
    """Exact values of all script variables for a stationary profile."""
    ix = _vindex(g)
    norm = {}
    for v in g.controlled:
        d = profile[v]
        norm[v] = {w: Fraction(p) for w, p in d.items()} if isinstance(d, Mapping) else {d: Fraction(1)}
    values = {}
    for v in g.vertices:
        for w in g.vertices:
            if g.owner[v] is None:
                p = g.prob.get((v, w), Fraction(0))
            else:
                p = norm[v].get(w, Fraction(0))
            values[f"a_{ix[v]}_{ix[w]}"] = p
    mc = induce_markov_chain(g, norm)
    for i, zs in enumerate(mc_omega_values(mc, g.objectives)):
        for v, p in zs.items():
            values[f"z_{i}_{ix[v]}"] = p
    for i, o in enumerate(g.objectives):
        for v, p in mdp_omega_value(induce_mdp(g, norm, i), o).items():
            values[f"r_{i}_{ix[v]}"] = p
    return values


def candidate_supports(g: Game):
    """Support relations in increasing size, then lexicographic order."""
    fixed = [(v, w) for v in g.vertices if g.owner[v] is None for w in g.succ[v]]
    ctrl = sorted(g.controlled)
    rows = [[tuple(sorted((v, w) for w in s)) for s in nonempty_subsets(g.succ[v])] for v in ctrl]
    combos = []
    for pick in product(*rows):
        edges = tuple(sorted(fixed + [e for row in pick for e in row]))
        combos.append(edges)
    combos.sort(key=lambda e: (len(e), e))
    for edges in combos:
        yield frozenset(edges)


def rationalise_profile(g: Game, S: frozenset, model: Mapping, max_denominator: int = 1000) -> dict | None:
    """Stationary profile from solver values, rounded to nearby rationals; None if degenerate."""
    ix = _vindex(g)
    out = {}
    for v in sorted(g.controlled):
        row = sorted(w for u, w in S if u == v)
        dist = {}
        for w in row[:-1]:
            val = model.get(f"a_{ix[v]}_{ix[w]}")
            if val is None:
                return None
            dist[w] = Fraction(val).limit_denominator(max_denominator)
        dist[row[-1]] = 1 - sum(dist.values(), Fraction(0))
        if any(p <= 0 for p in dist.values()):
            return None
        out[v] = dist
    return out


@dataclass
class StatNEResult:
    status: str  # "found", "none" or "inconclusive"
    profile: dict | None = None
    certificate: Certificate | None = None
    supports_tried: int = 0
    inconclusive: list = field(default_factory=list)


def default_solver() -> str | None:
    return os.environ.get(SOLVER_ENV) or None


def solve_statne(g: Game, v0, q: ThresholdQuery, solver: str | None = None, limit: int | None = None,
                 timeout: float = 30.0, max_denominator: int = 1000) -> StatNEResult:
    """Search supports, asking an external solver for each; every candidate is re-certified."""
    _check_query(g, v0, q)
    solver = solver or default_solver()
    if not solver:
        raise SolverUnavailable(f"no solver configured (set {SOLVER_ENV})")
    res = StatNEResult("none")
    for k, S in enumerate(candidate_supports(g)):
        if limit is not None and k >= limit:
            res.inconclusive.append("support limit reached")
            break
        res.supports_tried += 1
        script = emit_statne_smt(g, v0, q, S)
        ans = run_solver(solver, script.text(), timeout)
        if ans.status == "unsat":
            continue
        if ans.status != "sat":
            res.inconclusive.append(_support_label(S))
            continue
        profile = rationalise_profile(g, S, ans.model, max_denominator)
        if profile is None:
            res.inconclusive.append(_support_label(S))
            continue
        cert = certify_stationary(g, v0, profile, q)
        if cert.accepted:
            return StatNEResult("found", profile, cert, res.supports_tried, res.inconclusive)
        res.inconclusive.append(_support_label(S))
    if res.inconclusive:
        res.status = "inconclusive"
    return res


def _support_label(S) -> str:
    return " ".join(f"{v}->{w}" for v, w in sorted(S))


# -- qualitative equilibria with binary payoffs ---------------------------------

def _binary(g: Game, x: Sequence) -> tuple:
    x = tuple(int(b) for b in x)
    if len(x) != g.players or any(b not in (0, 1) for b in x):
        raise ValueError("payoff must be a binary vector with one entry per player")
    return x


@dataclass
class QualNEMdp:
    mdp: MDP
    zone: frozenset  # vertices where every zero-payoff player has value 0
    target: frozenset  # union of end components in the zone with payoff x
    witnesses: list  # those end components
    positive: dict  # zero-payoff player -> its positive-value set
    solvers: dict  # zero-payoff player -> coalition solver


def build_qualne_mdp(g: Game, x: Sequence) -> QualNEMdp:
    x = _binary(g, x)
    positive, solvers = {}, {}
    Z = set(g.vertices)
    for i, b in enumerate(x):
        if b == 0:
            solvers[i] = coalition_solver(g, i)
            positive[i] = solvers[i].positive(g.vertices, 0)
            Z -= positive[i]
    Z = largest_subarena(g.arena, frozenset(Z))
    succ, prob, ctrl = {}, {}, {}
    for v in sorted(Z):
        if g.owner[v] is None:
            succ[v] = g.succ[v]
            for w in succ[v]:
                prob[v, w] = g.prob[v, w]
        else:
            succ[v] = tuple(w for w in g.succ[v] if w in Z)
            ctrl[v] = 0
    mdp = MDP(tuple(sorted(Z)), succ, prob, ctrl)
    witnesses = generic_ec_witnesses(g, x, Z) if Z else []
    T = frozenset().union(*witnesses) if witnesses else frozenset()
    return QualNEMdp(mdp, Z, T, witnesses, positive, solvers)


@dataclass
class EquilibriumWitness:
    strategies: list  # one FiniteStateStrategy per player
    payoff: tuple
    initial: str

    def to_json(self) -> dict:
        return {"initial": self.initial, "payoff": list(self.payoff),
                "strategies": [s.to_json() for s in self.strategies]}

    @classmethod
    def from_json(cls, data: Mapping) -> EquilibriumWitness:
        return cls([FiniteStateStrategy.from_json(s) for s in data["strategies"]],
                   tuple(int(b) for b in data["payoff"]), data["initial"])


@dataclass
class QualNEResult:
    accepted: bool
    zone: frozenset
    target: frozenset
    witness: EquilibriumWitness | None = None
    reasons: list = field(default_factory=list)


def solve_qualne(g: Game, v0, x: Sequence, synthesize: bool = True) -> QualNEResult:
    """Decide whether an equilibrium with binary payoff ``x`` exists from ``v0``."""
    _check_query(g, v0, None)
    x = _binary(g, x)
    q = build_qualne_mdp(g, x)
    if v0 not in q.zone:
        bad = [i for i, P in q.positive.items() if v0 in P]
        why = f"players {bad} win with positive probability from {v0}" if bad else \
            f"{v0} cannot stay clear of the zero players' positive regions"
        return QualNEResult(False, q.zone, q.target, None, [why])
    sure, _ = almost_sure_reach_strategy(q.mdp, q.target)
    if v0 not in sure:
        return QualNEResult(False, q.zone, q.target, None,
                            [f"end components with payoff {x} are not reached almost surely"])
    w = _synthesize(g, v0, x, q) if synthesize else None
    return QualNEResult(True, q.zone, q.target, w, [])


def ec_sweep_profile(g: Game, C: Iterable) -> dict:
    """Uniform randomisation over the in-component successors of every controlled vertex of C."""
    C = frozenset(C)
    if not is_end_component(g, C):
        raise GameError(f"{sorted(C)} is not an end component")
    out = {}
    for v in sorted(C):
        if g.owner[v] is not None:
            inside = [w for w in g.succ[v] if w in C]
            out[v] = {w: Fraction(1, len(inside)) for w in inside}
    return out


def _distances_to(g: Game, C: frozenset, target) -> dict:
    dist = {target: 0}
    queue = deque([target])
    pred: dict = {v: [] for v in C}
    for v in C:
        for w in g.succ[v]:
            if w in C:
                pred[w].append(v)
    while queue:
        t = queue.popleft()
        for s in pred[t]:
            if s not in dist:
                dist[s] = dist[t] + 1
                queue.append(s)
    return dist


class EquilibriumProgram:
    """Main behaviour plus deviation-triggered punishment, shared by all players.

    Memory is ("main", phase, expected) where ``phase`` is ("reach",) or
    ("sweep", component, target index) and ``expected`` the move prescribed at
    the previous vertex, ("punish", deviator, memory) or ("free", deviator).
    """

    def __init__(self, g: Game, x: tuple, q: QualNEMdp, reach_choice: Mapping, punish: Mapping):
        self.g = g
        self.x = x
        self.zone = q.zone
        self.target = q.target
        self.components = [tuple(sorted(C)) for C in q.witnesses]
        self.reach_choice = dict(reach_choice)
        self.punish = dict(punish)
        self.dist = [[_distances_to(g, frozenset(C), t) for t in C] for C in self.components]

    def init(self):
        return ("main", ("reach",), None)

    def _arrive(self, phase, v):
        if phase[0] == "reach" and v in self.target:
            k = next(k for k, C in enumerate(self.components) if v in C)
            phase = ("sweep", k, 0)
        if phase[0] == "sweep":
            _, k, t = phase
            C = self.components[k]
            if v in C and C[t] == v:
                phase = ("sweep", k, (t + 1) % len(C))
        return phase

    def _prescribe(self, phase, v):
        g = self.g
        if phase[0] == "sweep":
            _, k, t = phase
            C = self.components[k]
            if v in C:
                d = self.dist[k][t]
                inside = [w for w in g.succ[v] if w in d]
                return min(inside, key=lambda w: (d[w], w))
        w = self.reach_choice.get(v)
        if w is not None:
            return w
        return next((w for w in g.succ[v] if w in self.zone), g.succ[v][0])

    def step(self, mem, v):
        mode = mem[0]
        if mode == "main":
            _, phase, expected = mem
            if expected is not None and expected[1] != v:
                j = expected[0]
                if self.x[j] == 0:
                    prog = self.punish[j]
                    return ("punish", j, prog.step(prog.init(), v))
                return ("free", j)
            phase = self._arrive(phase, v)
            o = self.g.owner[v]
            exp = None if o is None else (o, self._prescribe(phase, v))
            return ("main", phase, exp)
        if mode == "punish":
            _, j, m = mem
            return ("punish", j, self.punish[j].step(m, v))
        return mem

    def choose(self, mem, v):
        mode = mem[0]
        if mode == "main":
            return self._prescribe(mem[1], v)
        if mode == "punish":
            return self.punish[mem[1]].choose(mem[2], v)
        return self.g.succ[v][0]


def _synthesize(g: Game, v0, x: tuple, q: QualNEMdp) -> EquilibriumWitness:
    _, reach_choice = almost_sure_reach_strategy(q.mdp, q.target)
    punish = {i: s.almost_sure_program(g.vertices, 1) for i, s in q.solvers.items()}
    prog = EquilibriumProgram(g, x, q, reach_choice, punish)
    strategies = [minimize(compile_program(prog, i, g.vertices, g.owned_by(i), g.succ), g.vertices, g.owned_by(i))
                  for i in range(g.players)]
    return EquilibriumWitness(strategies, x, v0)


def synthesize_equilibrium(g: Game, v0, x: Sequence) -> EquilibriumWitness:
    """Finite-state equilibrium with payoff ``x``; raises if none exists."""
    res = solve_qualne(g, v0, x, synthesize=True)
    if not res.accepted:
        raise GameError("no equilibrium with this payoff: " + "; ".join(res.reasons))
    return res.witness


# -- products with finite-state strategies ------------------------------------

def product_arena(g: Game, v0, strategies: Sequence[FiniteStateStrategy], free: int | None = None):
    """Chain (or MDP for player ``free``) of the game with the players' machines.

    States are ``(vertex, memories)`` with memories updated on arrival.
    """
    P = g.players

    def arrive(mems, v):
        return tuple(None if j == free else strategies[j].update[mems[j], v] for j in range(P))

    start = (v0, arrive(tuple(None if j == free else strategies[j].initial for j in range(P)), v0))
    succ, prob, ctrl, label = {}, {}, {}, {}
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        v, mems = s
        label[s] = v
        o = g.owner[v]
        if o is None:
            nxt = [(w, g.prob[v, w]) for w in g.succ[v]]
        elif o == free:
            ctrl[s] = 0
            nxt = [(w, None) for w in g.succ[v]]
        else:
            w = strategies[o].output.get((mems[o], v))
            if w not in g.succ[v]:
                raise GameError(f"player {o} moves off the arena at {v}")
            nxt = [(w, Fraction(1))]
        out = []
        for w, p in nxt:
            t = (w, arrive(mems, w))
            out.append(t)
            if p is not None:
                prob[s, t] = p
            if t not in seen:
                seen.add(t)
                queue.append(t)
        succ[s] = tuple(out)
    states = tuple(sorted(seen, key=repr))
    cls = MarkovChain if free is None else MDP
    return cls(states, succ, prob, ctrl, label), start


def verify_finite_state_profile(g: Game, v0, w: EquilibriumWitness) -> Certificate:
    """Exact check that the witness machines form an equilibrium with the claimed payoff."""
    if len(w.strategies) != g.players:
        raise GameError("witness needs one strategy per player")
    for i, s in enumerate(w.strategies):
        problems = s.check(g.vertices, g.owned_by(i), g.succ)
        if problems:
            raise GameError(f"player {i}: {problems[0]}")
    chain, start = product_arena(g, v0, w.strategies)
    z = mc_omega_payoff(chain, g.objectives, start)
    r = []
    for i, o in enumerate(g.objectives):
        m, s0 = product_arena(g, v0, w.strategies, free=i)
        r.append(mdp_omega_value(m, o)[s0])
    reasons = []
    for i, (zi, ri, xi) in enumerate(zip(z, r, w.payoff)):
        if zi != xi:
            reasons.append(f"player {i} payoff {format_rational(zi)} differs from claimed {xi}")
        if ri > zi:
            reasons.append(f"player {i} gains by deviating: {format_rational(ri)} > {format_rational(zi)}")
    return Certificate(not reasons, z, r, reasons)


def reaches_in_product(g: Game, v0, strategies, targets: Iterable) -> bool:
    """Whether the product chain has a path to a state whose vertex lies in ``targets``."""
    chain, _ = product_arena(g, v0, strategies)
    targets = frozenset(targets)
    return any(chain.label[s] in targets for s in chain.states)


# -- zero-sum games -----------------------------------------------------------

def _as_machine(g: Game, i: int, s) -> FiniteStateStrategy:
    if isinstance(s, FiniteStateStrategy):
        return s
    return FiniteStateStrategy(i, 1, 0, {(0, v): 0 for v in g.vertices}, {(0, v): w for v, w in s.items()})


def check_zero_sum(g: Game) -> None:
    if g.players != 2:
        raise NotZeroSum("zero-sum certification needs exactly two players")
    o0, o1 = g.objectives
    for I in nonempty_subsets(g.vertices):
        if o0.accepts(I) == o1.accepts(I):
            raise NotZeroSum(f"objectives agree on limit set {sorted(I)}")


def certify_zero_sum_equilibrium(g: Game, v0, strategies: Sequence, value_oracle=None) -> Certificate:
    """Accept iff both strategies are optimal.

    With ``r_i`` the best response of player ``i`` against the other's
    strategy, player 0 is guaranteed ``1 - r_1`` and held to ``r_0``, so both
    are optimal exactly when ``r_0 + r_1 = 1``.  ``value_oracle`` (a function
    of the game and vertex) adds an independent cross-check of the value.
    """
    _check_query(g, v0, None)
    if len(g.vertices) > 16:
        raise NotZeroSum("complementarity is only checked up to 16 vertices")
    check_zero_sum(g)
    ms = [_as_machine(g, i, s) for i, s in enumerate(strategies)]
    chain, start = product_arena(g, v0, ms)
    z = mc_omega_payoff(chain, g.objectives, start)
    r = []
    for i, o in enumerate(g.objectives):
        m, s0 = product_arena(g, v0, ms, free=i)
        r.append(mdp_omega_value(m, o)[s0])
    reasons = []
    if r[0] + r[1] != 1:
        reasons.append(f"not optimal: player 0 is guaranteed {format_rational(1 - r[1])} "
                       f"but only held to {format_rational(r[0])}")
    if value_oracle is not None:
        val = Fraction(value_oracle(g, v0))
        if z[0] != val:
            reasons.append(f"payoff {format_rational(z[0])} differs from the value {format_rational(val)}")
    return Certificate(not reasons, z, r, reasons)


# -- hardness gadget ----------------------------------------------------------

def literal_name(lit: int) -> str:
    return f"X{lit}" if lit > 0 else f"~X{-lit}"


def gen_rabin_hardness_game(cnf: Sequence[Sequence[int]]) -> Game:
    """Two-player game, without chance, that has an equilibrium with payoff (0, 1)
    from its first clause iff the CNF is unsatisfiable.

    Literals are non-zero integers, negative for negated variables.
    """
    if not cnf:
        raise ValueError("empty clause list")
    clauses = [f"C{k + 1}" for k in range(len(cnf))]
    lits = sorted({l for c in cnf for l in c}, key=lambda l: (abs(l), l < 0))
    if any(not c for c in cnf):
        raise ValueError("empty clause")
    if 0 in lits:
        raise ValueError("0 is not a literal")
    owner = {c: 0 for c in clauses}
    owner.update({literal_name(l): 1 for l in lits})
    edges = set()
    for c, clause in zip(clauses, cnf):
        edges.update((c, literal_name(l)) for l in clause)
    for l in lits:
        edges.update((literal_name(l), c) for c in clauses)
    present = set(lits)
    pairs = []
    for l in lits:
        G = {literal_name(-l)} if -l in present else set()
        pairs.append(({literal_name(l)}, G))
    V = list(owner)
    objs = [Objective.rabin(pairs), Objective.rabin([(V, ())])]
    return make_game(2, owner, sorted(edges), objs, clauses[0])
