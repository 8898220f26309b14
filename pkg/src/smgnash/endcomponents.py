"""End-component decomposition and unions of end components with a given payoff."""

from __future__ import annotations

from itertools import product
from typing import Iterable, Sequence

from .game import Arena, Game
from .objectives import Objective, ObjectiveError


def _arena(g) -> Arena:
    return g.arena if isinstance(g, Game) else g


def sccs(a: Arena, U: frozenset) -> list[frozenset]:
    """Strongly connected components of the graph induced by ``U`` (iterative Tarjan)."""
    index, low, onstack = {}, {}, set()
    stack, out = [], []
    counter = 0
    for root in sorted(U, key=a.order.__getitem__):
        if root in index:
            continue
        work = [(root, iter(a.succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        onstack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in U:
                    continue
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    onstack.add(w)
                    work.append((w, iter(a.succ[w])))
                    advanced = True
                    break
                if w in onstack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    onstack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                out.append(frozenset(comp))
    return out


def bottom_sccs(a: Arena, U: frozenset) -> list[frozenset]:
    out = []
    for c in sccs(a, U):
        if all(t in c for s in c for t in a.succ[s] if t in U):
            out.append(c)
    return out


def largest_subarena(a: Arena, W: frozenset) -> frozenset:
    """Largest subset of ``W`` closed under the subarena conditions (possibly empty)."""
    W = set(W)
    changed = True
    while changed:
        changed = False
        for s in list(W):
            nxt = a.succ[s]
            if s in a.random:
                bad = any(t not in W for t in nxt)
            else:
                bad = not any(t in W for t in nxt)
            if bad:
                W.discard(s)
                changed = True
    return frozenset(W)


def is_end_component(g, C: Iterable) -> bool:
    a = _arena(g)
    C = frozenset(C)
    if not C or largest_subarena(a, C) != C:
        return False
    return len(sccs(a, C)) == 1


def maximal_end_components(g, U: Iterable | None = None) -> list[frozenset]:
    """All end components maximal within ``U``, pairwise disjoint, in canonical order."""
    a = _arena(g)
    work = [frozenset(a.states if U is None else U)]
    out = []
    while work:
        W = largest_subarena(a, work.pop())
        if not W:
            continue
        comps = sccs(a, W)
        if len(comps) == 1:
            out.append(W)
        else:
            work.extend(comps)
    out.sort(key=lambda c: min(a.order[s] for s in c))
    return out


def ec_has_payoff(g, C: Iterable, x: Sequence[int], objectives: Sequence[Objective] | None = None) -> bool:
    a = _arena(g)
    if objectives is None:
        objectives = g.objectives
    P = a.project(C)
    return all(int(o.accepts(P)) == int(b) for o, b in zip(objectives, x, strict=True))


# -- unions of end components with payoff x -------------------------------

def pair_ec_witnesses(a: Arena, specs, U: Iterable, exact: bool = True) -> list[frozenset]:
    """End components within ``U`` meeting every Streett requirement in ``specs``.

    ``specs`` is a list of ``(pairs, want)``: the projected limit set must
    satisfy the Streett condition ``pairs`` iff ``want``.  Players that want
    the condition satisfied shrink the component by removing the F-sets of
    violated pairs.  Players that want it violated pick one pair each with
    F present and remove its G-set; with ``exact=False`` all G-sets are
    removed at once and a component is dropped unless every F is present,
    which only agrees with the brute-force union when such players have a
    single pair.
    """
    found: dict = {}
    seen = set()
    label = a.vertex

    def shrink(C, remove):
        return frozenset(s for s in C if label(s) not in remove)

    def rec(U):
        if U in seen or not U:
            return
        seen.add(U)
        for C in maximal_end_components(a, U):
            P = a.project(C)
            violated_by_winners = []
            satisfied_by_losers = []
            for pairs, want in specs:
                viol = [(F, G) for F, G in pairs if not P.isdisjoint(F) and P.isdisjoint(G)]
                if want and viol:
                    violated_by_winners.append(viol)
                elif not want and not viol:
                    satisfied_by_losers.append(pairs)
            if not violated_by_winners and not satisfied_by_losers:
                found.setdefault(C, None)
            elif violated_by_winners:
                remove = set()
                for viol in violated_by_winners:
                    for F, _ in viol:
                        remove |= F
                rec(shrink(C, remove))
            elif exact:
                choices = [[(F, G) for F, G in pairs if not P.isdisjoint(F)] for pairs in satisfied_by_losers]
                if any(not c for c in choices):
                    continue
                for combo in product(*choices):
                    remove = set()
                    for _, G in combo:
                        remove |= G
                    rec(shrink(C, remove))
            else:
                if all(not P.isdisjoint(F) for pairs in satisfied_by_losers for F, _ in pairs):
                    remove = set()
                    for pairs in satisfied_by_losers:
                        for _, G in pairs:
                            remove |= G
                    rec(shrink(C, remove))

    rec(frozenset(U))
    return _canonical(a, found)


def muller_ec_witnesses(a: Arena, objectives: Sequence[Objective], x: Sequence[int], U: Iterable) -> list[frozenset]:
    """Recursive refinement for arbitrary limit-set predicates (exponential in |V|)."""
    found: dict = {}
    seen = set()
    want = tuple(int(b) for b in x)

    def rec(U):
        if U in seen or not U:
            return
        seen.add(U)
        for C in maximal_end_components(a, U):
            P = a.project(C)
            if tuple(int(o.accepts(P)) for o in objectives) == want:
                found.setdefault(C, None)
                continue
            for v in sorted(P):
                rec(frozenset(s for s in C if a.vertex(s) != v))

    rec(frozenset(U))
    return _canonical(a, found)


def _canonical(a: Arena, found) -> list[frozenset]:
    return sorted(found, key=lambda c: sorted(a.order[s] for s in c))


def _specs(objectives, x, universe):
    specs = []
    for o, b in zip(objectives, x, strict=True):
        form = o.streett_form(universe)
        if form is None:
            return None
        pairs, negate = form
        specs.append((pairs, bool(b) != negate))
    return specs


def generic_ec_witnesses(g, x: Sequence[int], U: Iterable | None = None,
                         objectives: Sequence[Objective] | None = None, exact: bool = True) -> list[frozenset]:
    a = _arena(g)
    if objectives is None:
        objectives = g.objectives
    U = frozenset(a.states if U is None else U)
    specs = _specs(objectives, x, a.project(a.states))
    if specs is None:
        return muller_ec_witnesses(a, objectives, x, U)
    return pair_ec_witnesses(a, specs, U, exact=exact)


def _union(cs) -> frozenset:
    return frozenset().union(*cs) if cs else frozenset()


def generic_ec_union(g, x: Sequence[int], U: Iterable | None = None,
                     objectives: Sequence[Objective] | None = None) -> frozenset:
    """Union of all end components within ``U`` whose limit set has payoff ``x``."""
    return _union(generic_ec_witnesses(g, x, U, objectives))


def _uniform(g: Game, kind: str):
    for i, o in enumerate(g.objectives):
        if o.kind != kind:
            raise ObjectiveError(f"objective {i} is {o.kind}, expected {kind}")


def streett_ec(g: Game, x: Sequence[int], U: Iterable | None = None, exact: bool = True) -> frozenset:
    _uniform(g, "streett")
    specs = [(o.pairs, bool(b)) for o, b in zip(g.objectives, x, strict=True)]
    return _union(pair_ec_witnesses(g.arena, specs, g.vertices if U is None else U, exact=exact))


def rabin_ec(g: Game, x: Sequence[int], U: Iterable | None = None, exact: bool = True) -> frozenset:
    _uniform(g, "rabin")
    # a Rabin winner is a loser of the dual Streett condition
    specs = [(o.pairs, not b) for o, b in zip(g.objectives, x, strict=True)]
    return _union(pair_ec_witnesses(g.arena, specs, g.vertices if U is None else U, exact=exact))
