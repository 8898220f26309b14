"""Qualitative solving of two-player zero-sum stochastic games.

The solver works directly on limit-set predicates over state colours, which
covers every objective class at once: player 0 wins a play iff ``win0`` holds
for the set of colours seen infinitely often.  It computes almost-sure
winning regions with a McNaughton-style recursion built from positive
attractors, and extracts pure finite-state strategies for both sides.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .game import Arena, CoalitionGame, Game, coalition_view
from .objectives import Objective
from .strategy import (FiniteStateStrategy, Positional, RegionSwitch, compile_program, minimize,
                       lowest_successor, successor_within)


class SolverError(RuntimeError):
    pass


class RoundRobin:
    """Cycle through the colours of ``G``: attract to the current colour, or play
    the subgame strategy when the play sits outside the attractor."""

    def __init__(self, colours, colour, attractors, subprograms, G, fallback):
        self.colours = colours
        self.colour = colour
        self.attractors = attractors  # per colour: (attractor set, choice)
        self.subprograms = subprograms  # per colour: (H, program) or None
        self.G = G
        self.fallback = fallback

    def init(self):
        return (0, None)

    def step(self, mem, v):
        k, sub = mem
        if v in self.G and self.colour[v] == self.colours[k]:
            k = (k + 1) % len(self.colours)
            sub = None
        part = self.subprograms[k]
        if part is not None and v in part[0]:
            prog = part[1]
            return (k, prog.step(prog.init() if sub is None else sub, v))
        return (k, None)

    def choose(self, mem, v):
        k, sub = mem
        A, choice = self.attractors[k]
        if v in A:
            return choice.get(v) or self.fallback(v)
        part = self.subprograms[k]
        if part is not None and v in part[0]:
            prog = part[1]
            return prog.choose(prog.step(prog.init(), v) if sub is None else sub, v)
        return self.fallback(v)


class QualitativeSolver:
    """Almost-sure and positive regions on subarenas of ``arena``.

    ``controller`` of the arena maps controlled states to 0 or 1; ``colour``
    maps states to colours and ``win0`` decides player 0's limit sets.
    """

    def __init__(self, arena: Arena, colour: Mapping, win0: Callable[[frozenset], bool]):
        self.a = arena
        self.colour = colour
        self.win0 = win0
        self._wins: dict = {}
        self._solved: dict = {}
        self._as_prog: dict = {}
        self._sure_prog: dict = {}
        self._pos_prog: dict = {}

    # -- basics ------------------------------------------------------------
    def wins(self, X: int, cols: frozenset) -> bool:
        w = self._wins.get(cols)
        if w is None:
            w = self._wins[cols] = bool(self.win0(cols))
        return w if X == 0 else not w

    def colours(self, G: frozenset) -> frozenset:
        return frozenset(self.colour[s] for s in G)

    def attractor(self, G: frozenset, X: int, T: Iterable) -> tuple[frozenset, dict]:
        """Positive attractor of ``T`` for ``X`` within ``G``, with rank-decreasing choices."""
        a = self.a
        A = set(s for s in T if s in G)
        choice = {}
        frontier = set(A)
        while frontier:
            cand = sorted({p for t in frontier for p in a.pred[t] if p in G and p not in A}, key=a.order.__getitem__)
            new = []
            for s in cand:
                ctrl = a.controller.get(s)
                nxt = a.succ[s]
                if ctrl is None:
                    ok = any(t in A for t in nxt)
                elif ctrl == X:
                    w = next((t for t in nxt if t in A), None)
                    ok = w is not None
                    if ok:
                        choice[s] = w
                else:
                    ok = all(t in A for t in nxt if t in G)
                if ok:
                    new.append(s)
            A.update(new)
            frontier = set(new)
        return frozenset(A), choice

    def _of_colour(self, G, c):
        return [s for s in G if self.colour[s] == c]

    # -- regions -----------------------------------------------------------
    def solve(self, G: Iterable, X: int) -> frozenset:
        """The states of subarena ``G`` from which ``X`` wins almost surely."""
        G = frozenset(G)
        key = (G, X)
        hit = self._solved.get(key)
        if hit is not None:
            return hit[0]
        if not G:
            self._solved[key] = (frozenset(), ("empty",))
            return frozenset()
        Y = 1 - X
        if self.wins(X, self.colours(G)):
            for c in sorted(self.colours(G)):
                A, _ = self.attractor(G, X, self._of_colour(G, c))
                H = G - A
                if not H:
                    continue
                pos_y = H - self.solve(H, X)
                if pos_y:
                    W, _ = self.attractor(G, Y, pos_y)
                    rest = G - W
                    res = self.solve(rest, X)
                    self._solved[key] = (res, ("split", H, pos_y, W, rest))
                    return res
            self._solved[key] = (G, ("all",))
            return G
        won_y: frozenset = frozenset()
        pieces = []
        while True:
            P = self.attractor(G, Y, won_y)[0] if won_y else frozenset()
            H = G - P
            if not H:
                break
            piece = self.solve(H, Y)
            if not piece:
                break
            pieces.append((H, piece))
            won_y = won_y | piece
        P = self.attractor(G, Y, won_y)[0] if won_y else frozenset()
        res = G - P
        self._solved[key] = (res, ("loop", pieces, won_y))
        return res

    def plan(self, G: frozenset, X: int):
        self.solve(G, X)
        return self._solved[G, X][1]

    def positive(self, G: Iterable, X: int) -> frozenset:
        """States of ``G`` from which ``X`` wins with positive probability."""
        G = frozenset(G)
        return G - self.solve(G, 1 - X)

    # -- strategies --------------------------------------------------------
    def _within(self, G):
        return successor_within(self.a.succ, G)

    def almost_sure_program(self, G: Iterable, X: int):
        """Program for ``X`` winning almost surely from every state of ``solve(G, X)``."""
        G = frozenset(G)
        key = (G, X)
        if key in self._as_prog:
            return self._as_prog[key]
        res = self.solve(G, X)
        plan = self.plan(G, X)
        if not res:
            prog = Positional({}, lowest_successor(self.a.succ))
        elif plan[0] == "split":
            prog = self.almost_sure_program(plan[4], X)
        elif plan[0] == "all":
            prog = self._round_robin(G, X)
        else:
            prog = self.sure_program(res, X)
        self._as_prog[key] = prog
        return prog

    def _round_robin(self, G: frozenset, X: int):
        cols = sorted(self.colours(G))
        attractors, subs = [], []
        for c in cols:
            A, choice = self.attractor(G, X, self._of_colour(G, c))
            attractors.append((A, choice))
            H = G - A
            subs.append((H, self.almost_sure_program(H, X)) if H else None)
        return RoundRobin(cols, self.colour, attractors, subs, G, self._within(G))

    def sure_program(self, K: frozenset, X: int):
        """Program for ``X`` on a region ``K`` that ``X`` wins almost surely everywhere."""
        key = (K, X)
        if key in self._sure_prog:
            return self._sure_prog[key]
        if self.solve(K, X) != K:
            raise SolverError("region is not almost-surely winning")
        Y = 1 - X
        if self.wins(X, self.colours(K)):
            if self.plan(K, X)[0] != "all":
                raise SolverError("unexpected split on a winning region")
            prog = self._round_robin(K, X)
        else:
            for c in sorted(self.colours(K)):
                A, _ = self.attractor(K, Y, self._of_colour(K, c))
                H = K - A
                if H and self.solve(H, X):
                    break
            else:
                raise SolverError("no colour-avoiding subgame is winning")
            U = self.solve(H, X)
            P, choice = self.attractor(K, X, U)
            regions = [(U, self.almost_sure_program(H, X)),
                       (P - U, Positional(choice, self._within(K)))]
            K2 = K - P
            if K2:
                regions.append((K2, self.sure_program(K2, X)))
            prog = RegionSwitch(regions, self._within(K))
        self._sure_prog[key] = prog
        return prog

    def positive_program(self, G: Iterable, X: int):
        """Program for ``1 - X`` winning with positive probability on ``G - solve(G, X)``."""
        G = frozenset(G)
        key = (G, X)
        if key in self._pos_prog:
            return self._pos_prog[key]
        Y = 1 - X
        plan = self.plan(G, X)
        fallback = self._within(G)
        if plan[0] in ("empty", "all"):
            prog = Positional({}, fallback)
        elif plan[0] == "split":
            _, H, pos_y, W, rest = plan
            _, choice = self.attractor(G, Y, pos_y)
            regions = [(pos_y, self.positive_program(H, X)),
                       (W - pos_y, Positional(choice, fallback))]
            rest_pos = rest - self.solve(rest, X)
            if rest_pos:
                regions.append((rest_pos, self.positive_program(rest, X)))
            prog = RegionSwitch(regions, fallback)
        else:
            _, pieces, won_y = plan
            regions = [(piece, self.almost_sure_program(H, Y)) for H, piece in pieces]
            if won_y:
                P, choice = self.attractor(G, Y, won_y)
                regions.append((P - won_y, Positional(choice, fallback)))
            prog = RegionSwitch(regions, fallback)
        self._pos_prog[key] = prog
        return prog


sys.setrecursionlimit(max(sys.getrecursionlimit(), 10_000))


# -- coalition games -----------------------------------------------------

def _coalition_arena(g: Game, i: int) -> Arena:
    ctrl = {v: (0 if o == i else 1) for v, o in g.owner.items() if o is not None}
    return Arena(g.vertices, g.succ, g.prob, ctrl)


def coalition_solver(g: Game, i: int) -> QualitativeSolver:
    """Solver for player ``i`` (as player 0) against the coalition of all others (player 1)."""
    cg = coalition_view(g, i)
    ident = {v: v for v in g.vertices}
    return QualitativeSolver(_coalition_arena(g, i), ident, cg.objective.accepts)


@dataclass(frozen=True, eq=False)
class LarProduct:
    """Parity game equivalent to a coalition game.

    ``arena.label`` projects product states to base vertices and
    ``entry`` gives the product state where a play from each base vertex starts.
    Objectives already of parity, Büchi or co-Büchi type need no memory and
    use the base vertices as states.
    """

    base: CoalitionGame
    arena: Arena
    priority: Mapping
    entry: Mapping

    @property
    def has_memory(self) -> bool:
        return self.arena.label is not None


def parity_priorities(o: Objective, vertices: Iterable[str]) -> dict | None:
    """Memoryless min-even parity encoding of ``o``, when one exists."""
    if o.kind == "parity":
        return o.priority_map
    if o.kind == "buchi":
        return {v: 0 if v in o.vertices else 1 for v in vertices}
    if o.kind == "cobuchi":
        return {v: 2 if v in o.vertices else 1 for v in vertices}
    return None


def to_parity(cg: CoalitionGame) -> LarProduct:
    """Parity game for the protagonist's objective, using a latest-appearance record if needed."""
    g = cg.base
    base_arena = _coalition_arena(g, cg.protagonist)
    pr = parity_priorities(cg.objective, g.vertices)
    if pr is not None:
        return LarProduct(cg, base_arena, pr, {v: v for v in g.vertices})
    o = cg.objective
    n = len(g.vertices)

    def prio(S):
        return 2 * (n - len(S)) + (0 if o.accepts(frozenset(S)) else 1)

    entry = {v: ((v,), 1) for v in g.vertices}
    succ, prob, ctrl, label, pri = {}, {}, {}, {}, {}
    stack = list(entry.values())
    seen = set(stack)
    while stack:
        s = stack.pop()
        rec, h = s
        v = rec[0]
        label[s] = v
        pri[s] = prio(rec[:h])
        if v in base_arena.controller:
            ctrl[s] = base_arena.controller[v]
        out = []
        for w in g.succ[v]:
            if w in rec:
                k = rec.index(w)
                t = ((w,) + rec[:k] + rec[k + 1:], k + 1)
            else:
                t = ((w,) + rec, len(rec) + 1)
            out.append(t)
            if v not in base_arena.controller:
                prob[s, t] = g.prob[v, w]
            if t not in seen:
                seen.add(t)
                stack.append(t)
        succ[s] = tuple(out)
    states = tuple(sorted(seen, key=lambda s: (s[0], s[1])))
    return LarProduct(cg, Arena(states, succ, prob, ctrl, label), pri, entry)


def min_even(cols: frozenset) -> bool:
    return min(cols) % 2 == 0


@dataclass(frozen=True, eq=False)
class ParitySolution:
    almost_sure: frozenset  # protagonist wins with probability 1
    positive: frozenset  # protagonist wins with positive probability
    protagonist_as: object  # programs over product states
    protagonist_pos: object
    coalition_as: object
    coalition_pos: object
    solver: QualitativeSolver


def qualitative_parity_solve(pg: LarProduct) -> ParitySolution:
    solver = QualitativeSolver(pg.arena, pg.priority, min_even)
    S = frozenset(pg.arena.states)
    as0 = solver.solve(S, 0)
    as1 = solver.solve(S, 1)
    return ParitySolution(as0, S - as1,
                          solver.almost_sure_program(S, 0), solver.positive_program(S, 1),
                          solver.almost_sure_program(S, 1), solver.positive_program(S, 0),
                          solver)


def positive_value_set(g: Game, i: int, method: str = "direct") -> frozenset:
    """Vertices from which player ``i`` wins with positive probability against every coalition strategy."""
    if method == "lar":
        pg = to_parity(coalition_view(g, i))
        sol = qualitative_parity_solve(pg)
        return frozenset(v for v, s in pg.entry.items() if s in sol.positive)
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    solver = coalition_solver(g, i)
    return solver.positive(g.vertices, 0)


def punishment_strategy(g: Game, i: int, solver: QualitativeSolver | None = None) -> dict[int, FiniteStateStrategy]:
    """Pure finite-state strategies of every other player that, played together,
    keep player ``i``'s winning probability at 0 from outside its positive set."""
    if solver is None:
        solver = coalition_solver(g, i)
    prog = solver.almost_sure_program(g.vertices, 1)
    out = {}
    for j in range(g.players):
        if j == i:
            continue
        out[j] = minimize(compile_program(prog, j, g.vertices, g.owned_by(j), g.succ), g.vertices, g.owned_by(j))
    return out
