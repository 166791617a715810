"""Command-line front end.

Exit status: 0 on success, 1 when a derivation is rejected or a pipeline
bound fails, 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import calculus as C
from . import ordinals as O
from .generate import DerivationSampler, random_sentence, true_one
from .hf import Universe, enumerate_transitive, parse_hf, rank, transitive_closure, von_neumann
from .index import IndexShapeError, bullet, parse_vec, star, tower, vec_lt
from .logic import FormulaError, parse_formula
from .refl import Iteration, MahloTable, ReflConfig, ReflectionError, m_op, ordinal_order

USAGE_ERRORS = (O.ParseError, IndexShapeError, FormulaError, ReflectionError, C.CalculusError, ValueError)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


# -- ord / vec / tower / hf ----------------------------------------------------

def cmd_ord(args) -> int:
    if args.op != "exp" and args.b is None:
        raise O.ParseError(f"ord {args.op} takes two arguments")
    if args.op == "tower":
        if not args.a.isdigit():
            raise O.ParseError("tower height must be a natural number")
        print(O.omega_tower(int(args.a), O.parse(args.b)))
        return 0
    a = O.parse(args.a)
    if args.op == "cmp":
        print(O.cmp(a, O.parse(args.b)))
    elif args.op == "add":
        print(O.add(a, O.parse(args.b)))
    elif args.op == "mul":
        print(O.mul(a, O.parse(args.b)))
    else:
        print(O.omega_pow(a))
    return 0


def cmd_vec(args) -> int:
    if args.op == "star":
        print(star(O.parse(args.b), parse_vec(args.a)))
        return 0
    b, a = parse_vec(args.b), parse_vec(args.a)
    print(str(vec_lt(b, a)).lower() if args.op == "lt" else bullet(b, a))
    return 0


def cmd_tower(args) -> int:
    print(tower(parse_vec(args.vector)))
    return 0


def cmd_hf(args) -> int:
    if args.op == "enum":
        for u in enumerate_transitive(int(args.value)):
            print(u.carrier)
        return 0
    a = parse_hf(args.value)
    print(rank(a) if args.op == "rank" else transitive_closure(a))
    return 0


# -- refl ---------------------------------------------------------------------------

def _print_family(fam) -> None:
    for u in sorted(fam, key=lambda u: u.carrier):
        print(u.carrier)


def cmd_refl(args) -> int:
    cfg = ReflConfig.from_json(json.loads(Path(args.config).read_text()))
    if args.op == "m":
        xs = [Universe(parse_hf(t)) for t in args.x]
        _print_family(m_op(args.k, xs, cfg.pool, cfg.family))
    elif args.op == "iter":
        it = Iteration(args.k, ordinal_order(cfg.max_entry), cfg.pool, cfg.family)
        _print_family(it(von_neumann(args.a)))
    else:
        table = MahloTable(cfg.n, cfg.pool, cfg.family, cfg.top, cfg.max_entry)
        _print_family(table(args.k, parse_vec(args.vector)))
    return 0


# -- proof --------------------------------------------------------------------------

def _config(args) -> C.CalcConfig:
    if args.config:
        data = json.loads(Path(args.config).read_text())
    else:
        data = {"N": 3, "k": 1, "alpha": "[1]", "root": "#2"}
    if args.root:
        data["root"] = args.root
    if args.world:
        data["world"] = args.world
    if args.budget:
        data["budget"] = args.budget
    return C.CalcConfig.from_json(data)


def _load(args) -> tuple[C.CalcConfig, C.Derivation]:
    text = Path(args.file).read_text()
    if args.budget:
        data = json.loads(text)
        data.setdefault("config", {})["budget"] = args.budget
        text = json.dumps(data)
    return C.loads(text)


def cmd_check(args) -> int:
    cfg, d = _load(args)
    verdict = C.check(d, cfg)
    print(verdict.report())
    return 0 if verdict.ok else 1


def cmd_cutelim(args) -> int:
    cfg, d = _load(args)
    verdict = C.check(d, cfg)
    if not verdict.ok:
        print(verdict.report())
        return 1
    target = args.max_rank or 0
    while d.rank > target:
        d = C.cut_elim_once(d, cfg)
    _emit(C.dumps(cfg, d), args.out)
    return 0


def cmd_embed(args) -> int:
    cfg = _config(args)
    kind, items = args.kind, args.items
    need = {"taut": 1, "truth": 1, "foundation": 2, "pi2": 1, "mh": 2, "random": 0}[kind]
    if len(items) != need:
        raise O.ParseError(f"embed {kind} takes {need} argument(s), got {len(items)}")
    if kind == "taut":
        d = C.embed_tautology(parse_formula(items[0]), cfg)
    elif kind == "truth":
        d = C.embed_truth(parse_formula(items[0]), cfg)
    elif kind == "foundation":
        d = C.embed_foundation(parse_hf(items[0]), parse_formula(items[1]), cfg)
    elif kind == "pi2":
        d = C.embed_pi2(parse_formula(items[0]), cfg)
    elif kind == "mh":
        d = C.embed_mh_axiom(parse_vec(items[0]), parse_formula(items[1]), cfg)
    else:
        rng = random.Random(args.seed)
        c = args.max_rank if args.max_rank is not None else 1
        if c == 0:
            a = true_one(random_sentence(rng, list(cfg.root.carrier), 2), cfg)
            d = C.embed_truth(a, cfg)
        else:
            d = DerivationSampler(cfg, rng).rank_sample(c - 1)
    _emit(C.dumps(cfg, d), args.out)
    return 0


def cmd_pipeline(args) -> int:
    cfg = _config(args)
    beta = parse_vec(args.beta) if args.beta else None
    delta = parse_formula(args.delta) if args.delta else None
    runs = C.pipeline(parse_formula(args.theta), cfg, args.p, beta, delta)
    ok = True
    for r in runs:
        ok &= r.below and C.check(r.final, cfg).ok
        print(
            f"{r.name}: rank {r.rank}, start {r.start}, final {r.final.ordinal}, "
            f"bound {r.bound}, below {'yes' if r.below else 'no'}"
        )
    if args.out:
        Path(args.out).write_text(
            json.dumps([json.loads(C.dumps(cfg, r.final)) for r in runs], indent=1, sort_keys=True) + "\n"
        )
    return 0 if ok else 1


# -- parser ----------------------------------------------------------------------------

def _proof_options(p: argparse.ArgumentParser, config: bool) -> None:
    p.add_argument("--budget", help="ordinal budget: all, strict or strict:N")
    p.add_argument("--out", help="write the resulting derivation here")
    p.add_argument("--max-rank", type=int, dest="max_rank")
    p.add_argument("--seed", type=int, default=0)
    if config:
        p.add_argument("--config", help="JSON calculus configuration")
        p.add_argument("--root", help="root universe carrier literal")
        p.add_argument("--world", help="quantifier world carrier literal")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kpmahlo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ord", help="ordinal terms below L")
    p.add_argument("op", choices=["cmp", "add", "mul", "exp", "tower"])
    p.add_argument("a", help="term (height for tower)")
    p.add_argument("b", nargs="?", help="second term (base for tower)")
    p.set_defaults(func=cmd_ord)

    p = sub.add_parser("vec", help="ordinal vectors")
    p.add_argument("op", choices=["lt", "bullet", "star"])
    p.add_argument("b", help="left vector (head ordinal for star)")
    p.add_argument("a", help="right vector")
    p.set_defaults(func=cmd_vec)

    p = sub.add_parser("tower", help="vector encodings")
    p.add_argument("op", choices=["encode"])
    p.add_argument("vector")
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("hf", help="hereditarily finite sets")
    p.add_argument("op", choices=["rank", "tc", "enum"])
    p.add_argument("value", help="set literal, or n for enum")
    p.set_defaults(func=cmd_hf)

    p = sub.add_parser("refl", help="reflection operators over a family")
    p.add_argument("op", choices=["m", "iter", "mh"])
    p.add_argument("config", help="JSON reflection configuration")
    p.add_argument("--k", type=int, default=0, help="level")
    p.add_argument("--x", action="append", default=[], help="member of X (repeatable)")
    p.add_argument("--a", type=int, default=0, help="stage for iter")
    p.add_argument("--vector", default="[]", help="index for mh")
    p.set_defaults(func=cmd_refl)

    proof = sub.add_parser("proof", help="derivations").add_subparsers(dest="proof_command", required=True)
    p = proof.add_parser("check")
    p.add_argument("file")
    _proof_options(p, False)
    p.set_defaults(func=cmd_check)
    p = proof.add_parser("cutelim")
    p.add_argument("file")
    _proof_options(p, False)
    p.set_defaults(func=cmd_cutelim)
    p = proof.add_parser("embed")
    p.add_argument("kind", choices=["taut", "truth", "foundation", "pi2", "mh", "random"])
    p.add_argument("items", nargs="*")
    _proof_options(p, True)
    p.set_defaults(func=cmd_embed)
    p = proof.add_parser("pipeline")
    p.add_argument("theta", help="bounded formula in x, y, z")
    p.add_argument("--p", type=int, default=1, help="multiplier of K in the start bound")
    p.add_argument("--beta")
    p.add_argument("--delta")
    _proof_options(p, True)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
