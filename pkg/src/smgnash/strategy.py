"""Finite-state strategies (Mealy machines) and composable strategy programs.

A program is any object with ``init()``, ``step(mem, v)`` and
``choose(mem, v)``.  Memory is updated on arrival at ``v`` and the move at
``v`` is chosen from the updated memory.  ``compile_program`` explores all
reachable memory values and produces an explicit ``FiniteStateStrategy``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence


class StrategyError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteStateStrategy:
    player: int
    memory: int  # memory states are 0 .. memory-1
    initial: int
    update: Mapping[tuple, int]  # (m, v) -> m'
    output: Mapping[tuple, str]  # (m, v) -> successor, for the player's vertices

    def next_memory(self, m: int, v: str) -> int:
        return self.update[m, v]

    def move(self, m: int, v: str) -> str:
        return self.output[m, v]

    def check(self, vertices: Iterable[str], owned: Iterable[str], succ: Mapping) -> list[str]:
        """Totality and edge-respect problems, if any."""
        out = []
        vertices, owned = list(vertices), list(owned)
        for m in range(self.memory):
            for v in vertices:
                n = self.update.get((m, v))
                if n is None or not 0 <= n < self.memory:
                    out.append(f"update undefined at memory {m}, vertex {v}")
            for v in owned:
                w = self.output.get((m, v))
                if w not in succ[v]:
                    out.append(f"output at memory {m}, vertex {v} is not a successor")
        if not 0 <= self.initial < self.memory:
            out.append("initial memory out of range")
        return out

    def to_json(self) -> dict:
        upd: dict = {}
        for (m, v), n in self.update.items():
            upd.setdefault(str(m), {})[v] = n
        outp: dict = {}
        for (m, v), w in self.output.items():
            outp.setdefault(str(m), {})[v] = w
        return {"player": self.player, "memory": self.memory, "initial": self.initial,
                "update": upd, "output": outp}

    @classmethod
    def from_json(cls, data: Mapping) -> FiniteStateStrategy:
        try:
            upd = {(int(m), v): int(n) for m, row in data["update"].items() for v, n in row.items()}
            outp = {(int(m), v): w for m, row in data["output"].items() for v, w in row.items()}
            return cls(int(data["player"]), int(data["memory"]), int(data["initial"]), upd, outp)
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise StrategyError(f"malformed strategy: {e}") from None


def minimize(s: FiniteStateStrategy, vertices: Sequence[str], owned: Iterable[str]) -> FiniteStateStrategy:
    """Merge memory states with identical behaviour (partition refinement), keeping reachable ones."""
    owned = sorted(owned)
    reach = {s.initial}
    stack = [s.initial]
    while stack:
        m = stack.pop()
        for v in vertices:
            n = s.update[m, v]
            if n not in reach:
                reach.add(n)
                stack.append(n)
    states = sorted(reach)
    block = {m: tuple(s.output[m, v] for v in owned) for m in states}
    while True:
        ids = {b: k for k, b in enumerate(sorted(set(block.values())))}
        sig = {m: (ids[block[m]],) + tuple(ids[block[s.update[m, v]]] for v in vertices) for m in states}
        if len(set(sig.values())) == len(ids):
            break
        block = sig
    # renumber blocks in order of first reachable member, initial first
    order: dict = {}
    for m in [s.initial] + states:
        order.setdefault(block[m], len(order))
    rep = {}
    for m in states:
        rep.setdefault(order[block[m]], m)
    update = {(k, v): order[block[s.update[m, v]]] for k, m in rep.items() for v in vertices}
    output = {(k, v): s.output[m, v] for k, m in rep.items() for v in owned}
    return FiniteStateStrategy(s.player, len(rep), 0, update, output)


def positional_strategy(player: int, choice: Mapping[str, str], vertices: Sequence[str]) -> FiniteStateStrategy:
    upd = {(0, v): 0 for v in vertices}
    return FiniteStateStrategy(player, 1, 0, upd, {(0, v): w for v, w in choice.items()})


def compile_program(program, player: int, vertices: Sequence[str], owned: Iterable[str],
                    succ: Mapping, limit: int = 200_000) -> FiniteStateStrategy:
    """Explicit tables for ``program`` over all memory values reachable by any vertex sequence."""
    owned = sorted(owned)
    ids: dict = {}
    order = []

    def intern(m):
        k = ids.get(m)
        if k is None:
            k = ids[m] = len(order)
            order.append(m)
            queue.append(m)
        return k

    queue: deque = deque()
    initial = intern(program.init())
    update, output = {}, {}
    while queue:
        m = queue.popleft()
        k = ids[m]
        for v in vertices:
            update[k, v] = intern(program.step(m, v))
        for v in owned:
            w = program.choose(m, v)
            if w not in succ[v]:
                raise StrategyError(f"program chose non-edge {v}->{w}")
            output[k, v] = w
        if len(order) * max(1, len(vertices)) > limit:
            raise StrategyError("strategy memory too large to tabulate")
    return FiniteStateStrategy(player, len(order), initial, update, output)


# -- programs ---------------------------------------------------------------

class Positional:
    """Memoryless: ``choice`` where defined, ``fallback`` elsewhere."""

    def __init__(self, choice: Mapping[str, str], fallback: Callable[[str], str]):
        self.choice = dict(choice)
        self.fallback = fallback

    def init(self):
        return None

    def step(self, mem, v):
        return None

    def choose(self, mem, v):
        w = self.choice.get(v)
        return self.fallback(v) if w is None else w


class RegionSwitch:
    """Play a sub-program per disjoint region; memory resets on entering a region."""

    def __init__(self, regions: Sequence[tuple[frozenset, object]], fallback: Callable[[str], str]):
        self.regions = list(regions)
        self.fallback = fallback
        self.where: dict = {}
        for k, (R, _) in enumerate(self.regions):
            for v in R:
                if v in self.where:
                    raise StrategyError(f"regions overlap at {v}")
                self.where[v] = k

    def init(self):
        return (None, None)

    def step(self, mem, v):
        k = self.where.get(v)
        if k is None:
            return (None, None)
        prog = self.regions[k][1]
        sub = mem[1] if mem[0] == k else prog.init()
        return (k, prog.step(sub, v))

    def choose(self, mem, v):
        k = self.where.get(v)
        if k is None or mem[0] != k:
            if k is None:
                return self.fallback(v)
            prog = self.regions[k][1]
            return prog.choose(prog.step(prog.init(), v), v)
        return self.regions[k][1].choose(mem[1], v)


def lowest_successor(succ: Mapping) -> Callable[[str], str]:
    return lambda v: succ[v][0]


def successor_within(succ: Mapping, U: Iterable, default: Callable[[str], str] | None = None) -> Callable[[str], str]:
    """Lowest successor inside ``U``, else ``default`` (or the lowest successor)."""
    U = frozenset(U)

    def pick(v):
        for w in succ[v]:
            if w in U:
                return w
        return default(v) if default else succ[v][0]

    return pick

