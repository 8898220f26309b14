"""Stochastic multiplayer games: model, JSON format, validation and views."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Mapping

from .objectives import Objective, ObjectiveError

log = logging.getLogger(__name__)

CHANCE = "chance"


class GameFormatError(ValueError):
    """Raised for malformed or invalid game documents."""


class GameError(ValueError):
    pass


def parse_rational(text) -> Fraction:
    if isinstance(text, bool):
        raise GameFormatError(f"bad rational {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise GameFormatError(f"rationals are strings 'p/q' or 'p', got {text!r}")
    s = text.strip()
    num, _, den = s.partition("/")
    try:
        if "." in s or "e" in s.lower():
            raise ValueError
        return Fraction(int(num), int(den)) if den else Fraction(int(num))
    except (ValueError, ZeroDivisionError):
        raise GameFormatError(f"bad rational {text!r}") from None


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, eq=False)
class Arena:
    """A finite graph with controlled and random states.

    This is the common shape of games, MDPs, Markov chains and products.
    ``label`` projects states to game vertices (identity for plain games);
    objectives are always evaluated on projected limit sets.
    """

    states: tuple
    succ: Mapping[Hashable, tuple]
    prob: Mapping[tuple, Fraction]  # (s, t) -> p for random s
    controller: Mapping[Hashable, int]  # controlled states only
    label: Mapping[Hashable, str] | None = None

    @cached_property
    def random(self) -> frozenset:
        return frozenset(s for s in self.states if s not in self.controller)

    @cached_property
    def order(self) -> dict:
        return {s: k for k, s in enumerate(self.states)}

    @cached_property
    def pred(self) -> dict:
        out = {s: [] for s in self.states}
        for s in self.states:
            for t in self.succ[s]:
                out[t].append(s)
        return out

    def project(self, C: Iterable) -> frozenset:
        if self.label is None:
            return frozenset(C)
        return frozenset(self.label[s] for s in C)

    def vertex(self, s) -> str:
        return s if self.label is None else self.label[s]


class MDP(Arena):
    """Arena whose controlled states all belong to one player (0)."""


class MarkovChain(Arena):
    """Arena without controlled states."""

    def row(self, s) -> dict:
        return {t: self.prob[s, t] for t in self.succ[s]}


@dataclass(frozen=True, eq=False)
class Game:
    """A stochastic multiplayer game with identity colouring.

    ``owner`` maps every vertex to a player index or None (stochastic).
    ``edges`` holds raw ``(source, probability-or-None, target)`` triples;
    derived structure is computed lazily.  Instances are never mutated.
    """

    players: int
    owner: Mapping[str, int | None]
    edges: tuple
    objectives: tuple
    initial: str | None = None

    @cached_property
    def vertices(self) -> tuple:
        return tuple(sorted(self.owner))

    @cached_property
    def succ(self) -> dict:
        out = {v: set() for v in self.owner}
        for v, _, w in self.edges:
            if v in out and w in self.owner:
                out[v].add(w)
        return {v: tuple(sorted(ws)) for v, ws in out.items()}

    @cached_property
    def prob(self) -> dict:
        return {(v, w): p for v, p, w in self.edges if p is not None}

    @cached_property
    def controlled(self) -> frozenset:
        return frozenset(v for v, o in self.owner.items() if o is not None)

    def is_stochastic(self, v) -> bool:
        return self.owner[v] is None

    def owned_by(self, i: int) -> frozenset:
        return frozenset(v for v, o in self.owner.items() if o == i)

    @cached_property
    def arena(self) -> Arena:
        ctrl = {v: o for v, o in self.owner.items() if o is not None}
        return Arena(self.vertices, self.succ, self.prob, ctrl)

    def __eq__(self, other):
        if not isinstance(other, Game):
            return NotImplemented
        return serialize_game(self) == serialize_game(other)

    __hash__ = None

    def with_initial(self, v0: str | None) -> Game:
        return Game(self.players, self.owner, self.edges, self.objectives, v0)

    def with_objectives(self, objectives: Iterable[Objective]) -> Game:
        return Game(self.players, self.owner, self.edges, tuple(objectives), self.initial)


def make_game(players, owner, edges, objectives, initial=None) -> Game:
    """Build a game from plain Python data; probabilities may be strings or numbers."""
    norm = []
    for e in edges:
        if len(e) == 2:
            v, w = e
            p = None
        else:
            v, p, w = e
        if p is not None and not isinstance(p, Fraction):
            p = parse_rational(p) if isinstance(p, str) else Fraction(p)
        norm.append((v, p, w))
    return Game(players, dict(owner), tuple(sorted(norm, key=_edge_key)), tuple(objectives), initial)


def _edge_key(e):
    v, p, w = e
    return (v, w, -1 if p is None else 0, p or 0)


# -- JSON format --------------------------------------------------------

def parse_game(text: str, validate: bool = True) -> Game:
    """Parse a game document; raises GameFormatError on syntax or invariant errors."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GameFormatError(f"JSON syntax error at line {e.lineno} column {e.colno}: {e.msg}") from None
    g = game_from_json(data)
    if validate:
        problems = validate_smg(g)
        if problems:
            raise GameFormatError("; ".join(problems))
    return g


def game_from_json(data) -> Game:
    if not isinstance(data, dict):
        raise GameFormatError("game document must be a JSON object")
    for key in ("players", "vertices", "edges", "objectives"):
        if key not in data:
            raise GameFormatError(f"missing field {key!r}")
    players = data["players"]
    if not isinstance(players, int) or isinstance(players, bool) or players < 0:
        raise GameFormatError("'players' must be a non-negative integer")
    owner = {}
    for k, item in enumerate(data["vertices"]):
        if not isinstance(item, dict) or "id" not in item:
            raise GameFormatError(f"vertices[{k}]: expected object with 'id'")
        vid = item["id"]
        if not isinstance(vid, str):
            raise GameFormatError(f"vertices[{k}]: id must be a string")
        if vid in owner:
            raise GameFormatError(f"vertices[{k}]: duplicate id {vid!r}")
        o = item.get("owner", CHANCE)
        if o == CHANCE:
            owner[vid] = None
        elif isinstance(o, int) and not isinstance(o, bool):
            owner[vid] = o
        else:
            raise GameFormatError(f"vertices[{k}]: owner must be an int or 'chance'")
        colour = item.get("colour", vid)
        if colour != vid:
            raise GameFormatError(f"vertices[{k}]: colouring must be the identity")
    edges = []
    for k, item in enumerate(data["edges"]):
        if not isinstance(item, dict) or "from" not in item or "to" not in item:
            raise GameFormatError(f"edges[{k}]: expected object with 'from' and 'to'")
        p = item.get("prob")
        if p is not None:
            p = parse_rational(p)
            if p == 0:
                log.warning("dropping zero-probability edge %s -> %s", item["from"], item["to"])
                continue
        edges.append((item["from"], p, item["to"]))
    try:
        objectives = tuple(Objective.from_json(o) for o in data["objectives"])
    except ObjectiveError as e:
        raise GameFormatError(str(e)) from None
    return Game(players, owner, tuple(sorted(edges, key=_edge_key)), objectives, data.get("initial"))


def game_to_json(g: Game) -> dict:
    verts = [{"id": v, "owner": CHANCE if g.owner[v] is None else g.owner[v]} for v in g.vertices]
    edges = []
    for v, p, w in g.edges:
        e = {"from": v, "to": w}
        if p is not None:
            e["prob"] = format_rational(p)
        edges.append(e)
    out = {
        "players": g.players,
        "vertices": verts,
        "edges": edges,
        "objectives": [o.to_json(g.vertices) for o in g.objectives],
    }
    if g.initial is not None:
        out["initial"] = g.initial
    return out


def serialize_game(g: Game) -> str:
    return json.dumps(game_to_json(g), sort_keys=True, indent=1) + "\n"


# -- validation -----------------------------------------------------------

def validate_smg(g: Game) -> list[str]:
    """Every violated model invariant, each naming the offending vertex or edge."""
    out = []
    V = set(g.owner)
    if not V:
        out.append("no vertices")
    for v, o in sorted(g.owner.items()):
        if o is not None and not 0 <= o < g.players:
            out.append(f"owner {o} of {v} is not a player")
    seen = set()
    for v, p, w in g.edges:
        if v not in V or w not in V:
            out.append(f"edge {v}->{w} mentions unknown vertex")
            continue
        if (v, w) in seen:
            out.append(f"duplicate edge {v}->{w}")
        seen.add((v, w))
        if g.owner[v] is not None and p is not None:
            out.append(f"probability on controlled edge {v}->{w}")
        if g.owner[v] is None:
            if p is None:
                out.append(f"missing probability on stochastic edge {v}->{w}")
            elif not 0 < p <= 1:
                out.append(f"probability {format_rational(p)} out of range on {v}->{w}")
    for v in sorted(V):
        if not g.succ.get(v):
            out.append(f"no successor at {v}")
        elif g.owner[v] is None:
            total = sum((p for (s, _), p in g.prob.items() if s == v), Fraction(0))
            if total != 1:
                out.append(f"sum ≠ 1 at {v}")
    if len(g.objectives) != g.players:
        out.append(f"{len(g.objectives)} objectives for {g.players} players")
    for i, o in enumerate(g.objectives):
        unknown = o.referenced() - V
        if unknown:
            out.append(f"objective {i} mentions unknown vertices {sorted(unknown)}")
        if o.kind == "parity":
            missing = V - o.referenced()
            if missing:
                out.append(f"objective {i} has no priority for {sorted(missing)}")
            if any(p < 0 for _, p in o.priorities):
                out.append(f"objective {i} has a negative priority")
        if o.kind == "muller" and frozenset() in o.family:
            out.append(f"objective {i} has an empty muller set")
    if g.initial is not None and g.initial not in V:
        out.append(f"initial vertex {g.initial} unknown")
    return out


def require_valid(g: Game) -> Game:
    problems = validate_smg(g)
    if problems:
        raise GameError("; ".join(problems))
    return g


# -- structural views -----------------------------------------------------

def is_subarena(g: Game | Arena, U: Iterable) -> bool:
    a = g.arena if isinstance(g, Game) else g
    U = frozenset(U)
    if not U:
        return False
    for s in U:
        nxt = a.succ[s]
        if s in a.random:
            if any(t not in U for t in nxt):
                return False
        elif not any(t in U for t in nxt):
            return False
    return True


def restrict(g: Game, U: Iterable) -> Game:
    """The game on subarena ``U``; objectives are intersected with ``U``."""
    U = frozenset(U)
    if not is_subarena(g, U):
        raise GameError(f"{sorted(U)} is not a subarena")
    owner = {v: o for v, o in g.owner.items() if v in U}
    edges = tuple(e for e in g.edges if e[0] in U and e[2] in U)
    init = g.initial if g.initial in U else None
    return Game(g.players, owner, edges, tuple(o.restrict(U) for o in g.objectives), init)


@dataclass(frozen=True, eq=False)
class CoalitionGame:
    """Two-player zero-sum view: ``protagonist`` against everybody else.

    In the view, player 0 is the protagonist and player 1 the coalition.
    """

    base: Game
    protagonist: int

    @cached_property
    def objective(self) -> Objective:
        return self.base.objectives[self.protagonist]

    @cached_property
    def coalition_objective(self) -> Objective:
        return self.objective.complement(self.base.vertices)

    @cached_property
    def coalition_vertices(self) -> frozenset:
        i = self.protagonist
        return frozenset(v for v, o in self.base.owner.items() if o is not None and o != i)

    @cached_property
    def game(self) -> Game:
        i = self.protagonist
        owner = {v: (None if o is None else (0 if o == i else 1)) for v, o in self.base.owner.items()}
        return Game(2, owner, self.base.edges, (self.objective, self.coalition_objective), self.base.initial)


def coalition_view(g: Game, i: int) -> CoalitionGame:
    if not 0 <= i < g.players:
        raise GameError(f"unknown player {i}")
    return CoalitionGame(g, i)
