"""Command-line front end.  Every subcommand prints a JSON report on stdout.

Exit codes: 0 yes/accept, 1 no/reject, 2 usage or input error, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import random
import sys
import time
from fractions import Fraction
from itertools import product
from pathlib import Path

from . import nash, oracles
from .endcomponents import generic_ec_union, maximal_end_components
from .game import Game, GameError, GameFormatError, format_rational, game_from_json, parse_game, \
    serialize_game, validate_smg
from .markov import induce_mdp, mdp_max_reach_value, mdp_omega_value
from .objectives import ObjectiveError
from .random_games import KIND_CHOICES, random_cnf, random_game, random_mdp
from .smt import SolverUnavailable
from .strategy import StrategyError

YES, NO, USAGE, INCONCLUSIVE = 0, 1, 2, 3


class InputError(Exception):
    pass


class Inconclusive(Exception):
    pass


# -- argument helpers ---------------------------------------------------------

def parse_vector(text: str) -> tuple[Fraction, ...]:
    """Either a binary string such as "101" or comma-separated rationals such as "1/2,1,0"."""
    text = text.strip()
    try:
        if "," not in text and "/" not in text and set(text) <= {"0", "1"} and text:
            return tuple(Fraction(int(c)) for c in text)
        out = tuple(Fraction(t.strip()) for t in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad payoff vector {text!r}") from None
    if any(not 0 <= q <= 1 for q in out):
        raise InputError(f"payoff vector {text!r} leaves [0, 1]")
    return out


def parse_binary(text: str) -> tuple[int, ...]:
    vec = parse_vector(text)
    if any(q not in (0, 1) for q in vec):
        raise InputError("this command needs a binary payoff")
    return tuple(int(q) for q in vec)


def parse_support(text: str) -> list[tuple[str, str]]:
    out = []
    for item in filter(None, (t.strip() for t in text.split(","))):
        v, sep, w = item.partition("->")
        if not sep or not v or not w:
            raise InputError(f"support entries look like v->w, got {item!r}")
        out.append((v.strip(), w.strip()))
    return out


def parse_cnf(text: str) -> list[list[int]]:
    """DIMACS clauses; the problem line and comments are optional."""
    clauses, cur = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line or line[0] in "cp%":
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise InputError(f"bad literal {tok!r}") from None
            if lit == 0:
                if not cur:
                    raise InputError("empty clause")
                clauses.append(cur)
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(cur)
    if not clauses:
        raise InputError("no clauses")
    return clauses


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _json_file(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: JSON syntax error at line {e.lineno}: {e.msg}") from None


def _load_game(args) -> tuple[Game, str]:
    text = _read(args.game)
    g = parse_game(text)
    v0 = getattr(args, "initial", None) or g.initial
    if v0 is None:
        raise InputError("no initial vertex: add 'initial' to the game or pass --initial")
    if v0 not in g.owner:
        raise InputError(f"unknown initial vertex {v0}")
    return g, v0


def _digest(args) -> str | None:
    path = getattr(args, "game", None)
    if not path or path == "-":
        return None
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _query(g: Game, args) -> nash.ThresholdQuery:
    x = parse_vector(args.min) if args.min else (Fraction(0),) * g.players
    y = parse_vector(args.max) if args.max else (Fraction(1),) * g.players
    if len(x) != g.players or len(y) != g.players:
        raise InputError(f"thresholds need {g.players} components")
    try:
        return nash.ThresholdQuery(x, y)
    except ValueError as e:
        raise InputError(str(e)) from None


def _rats(xs) -> list[str]:
    return [format_rational(x) for x in xs]


# -- subcommands --------------------------------------------------------------

def cmd_validate(args):
    try:
        g = game_from_json(json.loads(_read(args.game)))
    except json.JSONDecodeError as e:
        raise InputError(f"JSON syntax error at line {e.lineno}: {e.msg}") from None
    problems = validate_smg(g)
    rep = {"verdict": "valid" if not problems else "invalid", "problems": problems,
           "vertices": len(g.owner), "players": g.players}
    return (YES if not problems else NO), rep


def cmd_mec(args):
    g = parse_game(_read(args.game))
    mecs = maximal_end_components(g)
    rep = {"verdict": "done", "mecs": [sorted(c) for c in mecs]}
    if args.payoff:
        x = parse_binary(args.payoff)
        _need_len(g, x)
        rep["ec_union"] = sorted(generic_ec_union(g, x))
    return YES, rep


def _need_len(g, x):
    if len(x) != g.players:
        raise InputError(f"payoff needs {g.players} components")


def cmd_qualne(args):
    g, v0 = _load_game(args)
    x = parse_binary(args.payoff)
    _need_len(g, x)
    res = nash.solve_qualne(g, v0, x, synthesize=not args.no_witness)
    rep = {"verdict": res.accepted, "initial": v0, "payoff": list(x), "zone": sorted(res.zone),
           "target": sorted(res.target), "reasons": res.reasons}
    if res.witness is not None:
        rep["witness"] = res.witness.to_json()
        if args.recheck:
            cert = nash.verify_finite_state_profile(g, v0, res.witness)
            rep["recheck"] = cert.to_json()
            if not cert.accepted:
                return NO, rep
    return (YES if res.accepted else NO), rep


def cmd_synthesize(args):
    g, v0 = _load_game(args)
    x = parse_binary(args.payoff)
    _need_len(g, x)
    res = nash.solve_qualne(g, v0, x, synthesize=True)
    rep = {"verdict": res.accepted, "initial": v0, "payoff": list(x), "reasons": res.reasons}
    if not res.accepted:
        return NO, rep
    rep["witness"] = res.witness.to_json()
    if args.out:
        Path(args.out).write_text(json.dumps(res.witness.to_json(), sort_keys=True, indent=1) + "\n")
    if args.recheck:
        cert = nash.verify_finite_state_profile(g, v0, res.witness)
        rep["recheck"] = cert.to_json()
        if not cert.accepted:
            return NO, rep
    return YES, rep


def cmd_verify(args):
    g, v0 = _load_game(args)
    data = _json_file(args.witness)
    if isinstance(data, dict) and "witness" in data:
        data = data["witness"]
    try:
        w = nash.EquilibriumWitness.from_json(data)
    except (KeyError, TypeError, ValueError, StrategyError) as e:
        raise InputError(f"malformed witness: {e}") from None
    if args.initial is None:
        v0 = w.initial
    cert = nash.verify_finite_state_profile(g, v0, w)
    rep = {"verdict": "accept" if cert.accepted else "reject", "initial": v0, "certificate": cert.to_json()}
    return (YES if cert.accepted else NO), rep


def cmd_posne(args):
    g, v0 = _load_game(args)
    q = _query(g, args)
    try:
        p = nash.solve_posne(g, v0, q, cap=args.cap)
    except nash.SearchSpaceExceeded as e:
        raise Inconclusive(str(e)) from None
    rep = {"verdict": p is not None, "initial": v0, "min": _rats(q.x), "max": _rats(q.y),
           "profiles": nash.profile_count(g)}
    if p is not None:
        cert = nash.certify_positional(g, v0, p, q)
        rep["profile"] = dict(sorted(p.items()))
        rep["certificate"] = cert.to_json()
        if args.recheck and not cert.accepted:
            return NO, rep
    return (YES if p is not None else NO), rep


def _load_profile(path: str) -> dict:
    data = _json_file(path)
    if isinstance(data, dict) and "profile" in data and isinstance(data["profile"], dict):
        data = data["profile"]
    if not isinstance(data, dict):
        raise InputError("profile must be a JSON object mapping vertices to choices")
    out = {}
    for v, c in data.items():
        if isinstance(c, str):
            out[v] = c
        elif isinstance(c, dict):
            try:
                out[v] = {w: Fraction(p) for w, p in c.items()}
            except (ValueError, TypeError, ZeroDivisionError):
                raise InputError(f"bad probability in profile at {v}") from None
        else:
            raise InputError(f"bad choice at {v}")
    return out


def cmd_certify(args):
    g, v0 = _load_game(args)
    q = _query(g, args)
    p = _load_profile(args.profile)
    if all(isinstance(c, str) for c in p.values()):
        cert = nash.certify_positional(g, v0, p, q)
        kind = "positional"
    else:
        cert = nash.certify_stationary(g, v0, p, q)
        kind = "stationary"
    rep = {"verdict": "accept" if cert.accepted else "reject", "initial": v0, "kind": kind,
           "min": _rats(q.x), "max": _rats(q.y), "certificate": cert.to_json()}
    return (YES if cert.accepted else NO), rep


def cmd_statne_emit(args):
    g, v0 = _load_game(args)
    q = _query(g, args)
    S = set(parse_support(args.support))
    for v in g.vertices:
        if g.owner[v] is None:
            S.update((v, w) for w in g.succ[v])
    script = nash.emit_statne_smt(g, v0, q, S)
    text = script.text()
    if args.out:
        Path(args.out).write_text(text)
    rep = {"verdict": "emitted", "initial": v0, "support": [f"{v}->{w}" for v, w in sorted(S)],
           "manifest": {k: list(script.manifest[k]) for k in script.variables},
           "constraints": len(script.constraints)}
    if not args.out:
        rep["script"] = text
    return YES, rep


def cmd_statne(args):
    g, v0 = _load_game(args)
    q = _query(g, args)
    try:
        res = nash.solve_statne(g, v0, q, solver=args.solver, limit=args.limit, timeout=args.timeout)
    except SolverUnavailable as e:
        raise Inconclusive(f"{e}; use statne-emit to produce scripts") from None
    rep = {"verdict": res.status, "initial": v0, "supports_tried": res.supports_tried,
           "inconclusive_supports": res.inconclusive}
    if res.profile is not None:
        rep["profile"] = nash._profile_json(res.profile)
        rep["certificate"] = res.certificate.to_json()
        return YES, rep
    return (NO if res.status == "none" else INCONCLUSIVE), rep


def cmd_gen_hardness(args):
    cnf = parse_cnf(_read(args.cnf))
    g = nash.gen_rabin_hardness_game(cnf)
    text = serialize_game(g)
    if args.out:
        Path(args.out).write_text(text)
    rep = {"verdict": "generated", "clauses": len(cnf), "vertices": len(g.owner), "initial": g.initial}
    if not args.out:
        rep["game"] = json.loads(text)
    return YES, rep


def cmd_oracle(args):
    rng = random.Random(args.seed)
    results = {}
    suites = [args.suite] if args.suite != "all" else ["ec", "mdp", "posne", "hardness"]
    for suite in suites:
        agree = total = 0
        for _ in range(args.count):
            seed = rng.randrange(2**32)
            ok = ORACLE_SUITES[suite](random.Random(seed))
            total += 1
            agree += ok
            if not ok:
                logging.getLogger(__name__).warning("%s disagreement at seed %d", suite, seed)
        results[suite] = {"agree": agree, "total": total}
    ok = all(r["agree"] == r["total"] for r in results.values())
    return (YES if ok else NO), {"verdict": ok, "seed": args.seed, "suites": results}


def _oracle_ec(rng):
    g = random_game(rng, rng.randint(2, 7), rng.randint(1, 3), KIND_CHOICES)
    return all(generic_ec_union(g, x) == oracles.brute_force_ec_union(g, x)
               for x in product((0, 1), repeat=g.players))


def _oracle_mdp(rng):
    g = random_mdp(rng, rng.randint(2, 7), rng.choice(KIND_CHOICES))
    m = induce_mdp(g, {}, 0)
    T = {v for v in g.vertices if rng.random() < 0.3}
    return (mdp_max_reach_value(m, T)[0] == oracles.enumerate_mdp_reach(m, T)
            and mdp_omega_value(m, g.objectives[0]) == oracles.enumerate_mdp_omega(m, g.objectives[0]))


def _oracle_posne(rng):
    g = random_game(rng, rng.randint(2, 5), rng.randint(1, 2), ("parity", "buchi"))
    q = nash.ThresholdQuery((0,) * g.players, (1,) * g.players)
    found = nash.solve_posne(g, g.initial, q)
    sweep = any(nash.certify_positional(g, g.initial, p, q).accepted for p in nash.positional_profiles(g))
    return (found is not None) == sweep


def _oracle_hardness(rng):
    cnf = random_cnf(rng)
    g = nash.gen_rabin_hardness_game(cnf)
    return nash.solve_qualne(g, g.initial, (0, 1), synthesize=False).accepted != oracles.sat_truth_table(cnf)


ORACLE_SUITES = {"ec": _oracle_ec, "mdp": _oracle_mdp, "posne": _oracle_posne, "hardness": _oracle_hardness}


# -- driver -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="smgnash", description="Nash equilibria in stochastic multiplayer games")
    p.add_argument("--quiet", action="store_true", help="no summary on stderr")
    p.add_argument("--no-timing", action="store_true", help="omit the timing field from reports")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--no-timing", action="store_true", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    def game_cmd(name, fn, help, initial=True):
        sp = add(name, help)
        sp.add_argument("game", help="game file (JSON), or - for stdin")
        if initial:
            sp.add_argument("--initial", help="initial vertex (overrides the file)")
        sp.set_defaults(fn=fn)
        return sp

    def thresholds(sp):
        sp.add_argument("--min", help='lower payoff bounds, "101" or "1/2,1,0"')
        sp.add_argument("--max", help="upper payoff bounds")

    game_cmd("validate", cmd_validate, "check model invariants", initial=False)
    sp = game_cmd("mec", cmd_mec, "maximal end components", initial=False)
    sp.add_argument("--payoff", help="also print the union of end components with this binary payoff")
    sp = game_cmd("qualne", cmd_qualne, "decide an equilibrium with a binary payoff")
    sp.add_argument("--payoff", required=True)
    sp.add_argument("--no-witness", action="store_true")
    sp.add_argument("--recheck", action="store_true")
    sp = game_cmd("synthesize", cmd_synthesize, "finite-state equilibrium with a binary payoff")
    sp.add_argument("--payoff", required=True)
    sp.add_argument("--out", help="write the witness here as well")
    sp.add_argument("--recheck", action="store_true")
    sp = game_cmd("verify", cmd_verify, "check a finite-state witness")
    sp.add_argument("--witness", required=True)
    sp = game_cmd("posne", cmd_posne, "search positional equilibria")
    thresholds(sp)
    sp.add_argument("--cap", type=int, default=1_000_000, help="maximum number of profiles")
    sp.add_argument("--recheck", action="store_true")
    sp = game_cmd("certify", cmd_certify, "certify a positional or stationary profile")
    thresholds(sp)
    sp.add_argument("--profile", required=True)
    sp = game_cmd("statne-emit", cmd_statne_emit, "emit the real-arithmetic query for one support")
    thresholds(sp)
    sp.add_argument("--support", required=True, help="comma-separated v->w edges of controlled vertices")
    sp.add_argument("--out")
    sp = game_cmd("statne", cmd_statne, "search stationary equilibria with an external solver")
    thresholds(sp)
    sp.add_argument("--solver", help=f"solver command reading the script on stdin (default ${nash.SOLVER_ENV})")
    sp.add_argument("--limit", type=int, help="maximum number of supports")
    sp.add_argument("--timeout", type=float, default=30.0)
    sp = add("gen-hardness", "Rabin hardness game from a DIMACS CNF")
    sp.add_argument("--cnf", required=True)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_gen_hardness)
    sp = add("oracle", "randomised cross-checks against brute force")
    sp.add_argument("--suite", choices=["all", *ORACLE_SUITES], default="all")
    sp.add_argument("--count", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_oracle)
    return p


def _summary(code: int, rep: dict) -> str:
    status = {YES: "yes", NO: "no", INCONCLUSIVE: "inconclusive", USAGE: "error"}[code]
    return f"{rep.get('command', ['?'])[0]}: {status} ({rep.get('verdict')})"


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else YES
    start = time.perf_counter()
    try:
        code, rep = args.fn(args)
    except Inconclusive as e:
        code, rep = INCONCLUSIVE, {"verdict": "inconclusive", "reasons": [str(e)]}
    except (InputError, GameFormatError, GameError, ObjectiveError, StrategyError, ValueError) as e:
        print(f"error: {e}", file=err)
        return USAGE
    rep = {"command": argv, **rep}
    digest = _digest(args)
    if digest:
        rep["input_digest"] = digest
    if not args.no_timing:
        rep["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    out.write(json.dumps(rep, sort_keys=True, indent=1) + "\n")
    if not args.quiet:
        print(_summary(code, rep), file=err)
    return code


def main() -> None:
    sys.exit(run())
