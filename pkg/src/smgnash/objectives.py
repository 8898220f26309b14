"""Omega-regular winning conditions evaluated on limit sets.

Every condition here is prefix-independent and depends only on the set of
vertices visited infinitely often, so an objective is fully described by the
predicate ``accepts(I)`` over non-empty vertex sets ``I``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

KINDS = ("buchi", "cobuchi", "parity", "streett", "rabin", "muller")

# Muller complements are materialised only up to this many vertices.
MATERIALISE_LIMIT = 16

Pair = tuple[frozenset, frozenset]


class ObjectiveError(ValueError):
    pass


@dataclass(frozen=True)
class Objective:
    kind: str
    vertices: frozenset = frozenset()
    priorities: tuple = ()  # sorted (vertex, priority) items
    pairs: tuple = ()  # tuple of (F, G) frozenset pairs
    family: frozenset = frozenset()
    negated: bool = False  # muller only: accept iff I is NOT in family

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ObjectiveError(f"unknown objective type {self.kind!r}")
        if self.negated and self.kind != "muller":
            raise ObjectiveError("only muller objectives carry a negation flag")

    # -- constructors -------------------------------------------------
    @classmethod
    def buchi(cls, F: Iterable) -> Objective:
        return cls("buchi", vertices=frozenset(F))

    @classmethod
    def cobuchi(cls, F: Iterable) -> Objective:
        return cls("cobuchi", vertices=frozenset(F))

    @classmethod
    def parity(cls, priorities: dict) -> Objective:
        return cls("parity", priorities=tuple(sorted((v, int(p)) for v, p in priorities.items())))

    @classmethod
    def streett(cls, pairs: Iterable) -> Objective:
        return cls("streett", pairs=_canon_pairs(pairs))

    @classmethod
    def rabin(cls, pairs: Iterable) -> Objective:
        return cls("rabin", pairs=_canon_pairs(pairs))

    @classmethod
    def muller(cls, family: Iterable, negated: bool = False) -> Objective:
        return cls("muller", family=frozenset(frozenset(s) for s in family), negated=negated)

    # -- semantics ----------------------------------------------------
    @property
    def priority_map(self) -> dict:
        return dict(self.priorities)

    def accepts(self, inf: Iterable) -> bool:
        """Whether a play whose limit set is ``inf`` satisfies the objective."""
        I = inf if isinstance(inf, frozenset) else frozenset(inf)
        if not I:
            raise ObjectiveError("limit sets are non-empty")
        k = self.kind
        if k == "buchi":
            return not I.isdisjoint(self.vertices)
        if k == "cobuchi":
            return I <= self.vertices
        if k == "parity":
            pr = self.priority_map
            try:
                return min(pr[v] for v in I) % 2 == 0
            except KeyError as e:
                raise ObjectiveError(f"vertex {e.args[0]!r} has no priority") from None
        if k == "streett":
            return all(I.isdisjoint(F) or not I.isdisjoint(G) for F, G in self.pairs)
        if k == "rabin":
            return any(not I.isdisjoint(F) and I.isdisjoint(G) for F, G in self.pairs)
        return (I in self.family) != self.negated

    def referenced(self) -> frozenset:
        """All vertices mentioned by the objective's data."""
        k = self.kind
        if k in ("buchi", "cobuchi"):
            return self.vertices
        if k == "parity":
            return frozenset(v for v, _ in self.priorities)
        if k in ("streett", "rabin"):
            out = set()
            for F, G in self.pairs:
                out |= F | G
            return frozenset(out)
        return frozenset().union(*self.family) if self.family else frozenset()

    # -- transformations ----------------------------------------------
    def complement(self, universe: Iterable) -> Objective:
        """The objective accepting exactly the limit sets (within ``universe``) this one rejects."""
        U = frozenset(universe)
        k = self.kind
        if k == "buchi":
            return Objective.cobuchi(U - self.vertices)
        if k == "cobuchi":
            return Objective.buchi(U - self.vertices)
        if k == "parity":
            return Objective("parity", priorities=tuple((v, p + 1) for v, p in self.priorities))
        if k == "streett":
            return Objective("rabin", pairs=self.pairs)
        if k == "rabin":
            return Objective("streett", pairs=self.pairs)
        return Objective("muller", family=self.family, negated=not self.negated)

    def restrict(self, U: Iterable) -> Objective:
        U = frozenset(U)
        k = self.kind
        if k in ("buchi", "cobuchi"):
            return Objective(k, vertices=self.vertices & U)
        if k == "parity":
            return Objective(k, priorities=tuple((v, p) for v, p in self.priorities if v in U))
        if k in ("streett", "rabin"):
            return Objective(k, pairs=_canon_pairs((F & U, G & U) for F, G in self.pairs))
        return Objective(k, family=frozenset(s for s in self.family if s <= U), negated=self.negated)

    def materialise(self, universe: Iterable) -> Objective:
        """Explicit (non-negated) Muller family equivalent over ``universe``."""
        U = sorted(universe)
        if self.kind == "muller" and not self.negated:
            return self
        if len(U) > MATERIALISE_LIMIT:
            raise ObjectiveError(f"refusing to materialise over {len(U)} vertices")
        return Objective.muller(I for I in nonempty_subsets(U) if self.accepts(I))

    def streett_form(self, universe: Iterable) -> tuple[tuple[Pair, ...], bool] | None:
        """``(pairs, negate)`` with ``accepts(I) == Streett(pairs)(I) != negate``.

        Returns None for Muller objectives, which have no compact pair form.
        """
        U = frozenset(universe)
        k = self.kind
        if k == "buchi":
            return ((U, self.vertices),), False
        if k == "cobuchi":
            return ((U, U - self.vertices),), True
        if k == "parity":
            return parity_streett_pairs(self.priority_map), False
        if k == "streett":
            return self.pairs, False
        if k == "rabin":
            return self.pairs, True
        return None

    # -- serialisation ------------------------------------------------
    def to_json(self, universe: Iterable | None = None) -> dict:
        k = self.kind
        if k in ("buchi", "cobuchi"):
            return {"type": k, "set": sorted(self.vertices)}
        if k == "parity":
            return {"type": k, "priorities": dict(self.priorities)}
        if k in ("streett", "rabin"):
            return {"type": k, "pairs": [{"F": sorted(F), "G": sorted(G)} for F, G in self.pairs]}
        obj = self
        if self.negated:
            if universe is None:
                raise ObjectiveError("negated muller objective needs a universe to serialise")
            obj = self.materialise(universe)
        return {"type": "muller", "family": sorted(sorted(s) for s in obj.family)}

    @classmethod
    def from_json(cls, data: dict) -> Objective:
        if not isinstance(data, dict) or "type" not in data:
            raise ObjectiveError("objective must be an object with a 'type'")
        k = data["type"]
        if k in ("buchi", "cobuchi"):
            return cls(k, vertices=frozenset(data.get("set", [])))
        if k == "parity":
            return cls.parity(data.get("priorities", {}))
        if k in ("streett", "rabin"):
            return cls(k, pairs=_canon_pairs((p.get("F", []), p.get("G", [])) for p in data.get("pairs", [])))
        if k == "muller":
            return cls.muller(data.get("family", []))
        raise ObjectiveError(f"unknown objective type {k!r}")


def _canon_pairs(pairs: Iterable) -> tuple:
    return tuple((frozenset(F), frozenset(G)) for F, G in pairs)


def parity_streett_pairs(priorities: dict) -> tuple[Pair, ...]:
    """Streett pairs for min-even parity: one pair per odd priority."""
    out = []
    for o in sorted({p for p in priorities.values() if p % 2}):
        F = frozenset(v for v, p in priorities.items() if p == o)
        G = frozenset(v for v, p in priorities.items() if p < o)
        out.append((F, G))
    return tuple(out)


def parity_rabin_pairs(priorities: dict) -> tuple[Pair, ...]:
    """Rabin pairs for min-even parity: one pair per even priority."""
    out = []
    for e in sorted({p for p in priorities.values() if p % 2 == 0}):
        F = frozenset(v for v, p in priorities.items() if p == e)
        G = frozenset(v for v, p in priorities.items() if p < e)
        out.append((F, G))
    return tuple(out)


def nonempty_subsets(items: Iterable) -> Iterator[frozenset]:
    items = list(items)
    for r in range(1, len(items) + 1):
        for c in combinations(items, r):
            yield frozenset(c)


def accepts_limit_set(o: Objective, I: Iterable) -> bool:
    return o.accepts(I)


def complement_objective(o: Objective, universe: Iterable) -> Objective:
    return o.complement(universe)


def payoff_bits(objectives: Iterable[Objective], I: Iterable) -> tuple[int, ...]:
    I = frozenset(I)
    return tuple(int(o.accepts(I)) for o in objectives)
