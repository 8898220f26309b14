"""Seeded generators for small random games, MDPs, chains and CNF formulas."""

from __future__ import annotations

import random
from fractions import Fraction

from .game import Game, make_game
from .objectives import Objective

KIND_CHOICES = ("buchi", "cobuchi", "parity", "streett", "rabin", "muller")


def _names(n: int) -> list[str]:
    return [f"v{k}" for k in range(n)]


def _distribution(rng: random.Random, k: int) -> list[Fraction]:
    weights = [rng.randint(1, 3) for _ in range(k)]
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def random_objective(rng: random.Random, kind: str, V: list[str], max_priority: int = 3) -> Objective:
    def subset(p=0.4):
        return frozenset(v for v in V if rng.random() < p)

    if kind == "buchi":
        return Objective.buchi(subset())
    if kind == "cobuchi":
        return Objective.cobuchi(subset(0.6))
    if kind == "parity":
        return Objective.parity({v: rng.randint(0, max_priority) for v in V})
    if kind in ("streett", "rabin"):
        pairs = [(subset(), subset(0.3)) for _ in range(rng.randint(1, 2))]
        return Objective(kind, pairs=tuple(pairs))
    if kind == "muller":
        fam = set()
        for _ in range(rng.randint(0, 4)):
            s = subset(0.5)
            if s:
                fam.add(s)
        return Objective.muller(fam)
    raise ValueError(kind)


def random_game(rng: random.Random, n: int = 5, players: int = 2, kinds=("parity",),
                p_chance: float = 0.25, max_out: int = 3, max_priority: int = 3) -> Game:
    V = _names(n)
    owner = {}
    for v in V:
        owner[v] = None if rng.random() < p_chance else rng.randrange(players) if players else None
    edges = []
    for v in V:
        k = rng.randint(1, min(max_out, n))
        targets = sorted(rng.sample(V, k))
        if owner[v] is None:
            for w, p in zip(targets, _distribution(rng, k)):
                edges.append((v, p, w))
        else:
            edges.extend((v, w) for w in targets)
    objs = [random_objective(rng, rng.choice(kinds), V, max_priority) for _ in range(players)]
    return make_game(players, owner, edges, objs, V[0])


def random_mdp(rng: random.Random, n: int = 5, kind: str = "parity", **kw) -> Game:
    return random_game(rng, n, 1, (kind,), **kw)


def random_chain(rng: random.Random, n: int = 5, max_out: int = 3, kinds=("parity",)) -> Game:
    return random_game(rng, n, 1, kinds, p_chance=1.0, max_out=max_out)


def random_cnf(rng: random.Random, max_vars: int = 4, max_clauses: int = 6) -> list[list[int]]:
    nv = rng.randint(1, max_vars)
    out = []
    for _ in range(rng.randint(1, max_clauses)):
        width = rng.randint(1, min(3, nv))
        vars_ = rng.sample(range(1, nv + 1), width)
        out.append([x if rng.random() < 0.5 else -x for x in vars_])
    return out
