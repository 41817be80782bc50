"""Command-line driver: ``delgame check|fold|solve|sample``."""

from __future__ import annotations

import argparse
import random
import sys

from .arena import LazyArena, arena_public, to_dot
from .dynamics import (PresentationError, check_h1, check_h2, check_h3,
                       classify_actions)
from .fold import (check_h3_exact, check_hierarchical, fold_propositional,
                   quotient_public)
from .formulas import classify, to_text
from .gamefile import GameFileError, format_game, load_game
from .generators import (random_announcement_presentation, random_fragment,
                         random_prop_presentation, random_public_presentation)
from .solve import (PreconditionError, oracle_solve, solve_announcement,
                    solve_reach_safe)

EXIT_WIN, EXIT_LOSE, EXIT_UNKNOWN, EXIT_REFUSED, EXIT_INPUT = 0, 1, 2, 3, 4


def _load(path):
    try:
        return load_game(path)
    except OSError as exc:
        raise GameFileError(f"cannot read {path}: {exc.strerror}")


def _yes(flag):
    return "yes" if flag else "no"


def cmd_check(args, out):
    game = _load(args.file)
    p = game.presentation
    ok = True
    out.write(f"agents: {' '.join(f'{a}({chr(8707) if a in p.team else chr(8704)})' for a in p.agents)}\n")
    out.write(f"worlds: {len(p.model.worlds)}  events: {len(p.actions.events)}  "
              f"initial: {' '.join(map(str, sorted(p.init, key=str)))}\n")
    for w in game.warnings:
        out.write(f"warning: {w}\n")
    for rep in (check_h1(p.model), check_h2(p.actions)):
        out.write(f"{rep}\n")
        ok = ok and rep.ok
    types = classify_actions(p.actions)
    public = [e for e in p.actions.events if types.public[e]]
    ann = [e for e in p.actions.events if types.announcement[e]]
    folded = None
    if ok:
        try:
            if types.propositional:
                folded = fold_propositional(p)
            elif len(public) == len(p.actions.events):
                folded = quotient_public(p)
        except PresentationError:
            folded = None
    if folded is not None:
        reports = [check_h3_exact(folded)]
    else:
        reports = check_h3(p, args.depth)
    for rep in reports:
        out.write(f"{rep}\n")
        ok = ok and rep.ok
    out.write(f"propositional: {_yes(types.propositional)}\n")
    out.write(f"public events: {', '.join(public) if public else '-'}\n")
    out.write(f"announcements: {', '.join(ann) if ann else '-'}\n")
    order = check_hierarchical(p)
    out.write("hierarchical: " + (" < ".join(order) if order is not None else "no") + "\n")
    if game.objective is not None:
        out.write(f"objective: {to_text(game.objective)} [{classify(game.objective).name}]\n")
    return 0 if ok else EXIT_REFUSED


def _require_hypotheses(p):
    for rep in (check_h1(p.model), check_h2(p.actions)):
        if not rep.ok:
            raise PreconditionError(str(rep))


def cmd_fold(args, out):
    game = _load(args.file)
    p = game.presentation
    _require_hypotheses(p)
    if args.kind == "prop":
        folded = fold_propositional(p)
        out.write(f"propositional fold: {len(folded)} positions (bound |M|+|E|*2^m = {folded.bound})\n")
    else:
        folded = quotient_public(p, key=args.key, exact=not args.literal)
        out.write(f"public quotient: {len(folded)} classes, "
                  f"{folded.details['distinct_models']} distinct attached models "
                  f"(bound m(2^p+1)^m = {folded.bound})\n")
        pub = arena_public(folded.arena)
        out.write(f"only public actions: {_yes(pub.ok)}\n")
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(to_dot(folded.arena))
        with open(args.dot + ".classes.txt", "w", encoding="utf-8") as fh:
            for v, prov in folded.provenance.items():
                fh.write(f"{v!r}\t{prov!r}\n")
        out.write(f"wrote {args.dot} and {args.dot}.classes.txt\n")
    return 0


def _show(h):
    return repr(h[-1]) if isinstance(h, tuple) and h else repr(h)


def cmd_solve(args, out):
    game = _load(args.file)
    p = game.presentation
    if game.objective is None:
        raise GameFileError("the game file has no [objective] section")
    _require_hypotheses(p)
    phi = game.objective
    mode = args.mode or game.mode
    if mode == "subjective" and game.mode != "subjective":
        from .dynamics import Presentation, subjective_init
        if len(game.declared_init) != 1:
            raise PreconditionError("subjective mode needs exactly one declared initial world")
        (w0,) = game.declared_init
        p = Presentation(p.model, p.actions, subjective_init(p.model, w0, p.team), p.team,
                         p.agents, check=False)
    horizon = args.horizon or game.options.get("horizon")
    if args.engine == "announce":
        if len(p.init) != 1:
            raise PreconditionError("the announcement engine needs a unique initial world; "
                                    f"this game has {len(p.init)} (use --engine oracle)")
        res = solve_announcement(p, phi, strict=args.strict_leaves)
    elif args.engine == "reach":
        types = classify_actions(p.actions)
        bad = [e for e in p.actions.events if not types.public[e]]
        if bad:
            raise PreconditionError(f"event {bad[0]!r} is not public: the reach engine needs "
                                    "an arena with only public actions")
        folded = quotient_public(p)
        if len(p.init) != 1 and not args.perfect_info:
            raise PreconditionError("several initial worlds: the reach engine ignores "
                                    "uniformity across them (pass --perfect-info to accept)")
        res = solve_reach_safe(folded.arena, phi, p.team, perfect_info=args.perfect_info)
    else:
        arena = LazyArena(p)
        if horizon is None:
            horizon = len(p.agents) * len(p.model.worlds) + len(p.agents)
        res = oracle_solve(arena, phi, p.team, horizon=horizon, k_scope=args.k_scope)
    out.write(res.report(_show))
    return {"WIN": EXIT_WIN, "LOSE": EXIT_LOSE}.get(res.verdict.kind, EXIT_UNKNOWN)


def cmd_sample(args, out):
    rng = random.Random(args.seed)
    if args.kind == "announce":
        p = random_announcement_presentation(rng)
    elif args.kind == "public":
        p = random_public_presentation(rng)
    else:
        p = random_prop_presentation(rng)
    atoms = sorted(p.atoms()) or ["p0"]
    phi = random_fragment(rng, atoms, p.agents)
    text = format_game(p, phi)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="delgame", description="DEL game toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check hypotheses and classify actions")
    c.add_argument("file", help="game file")
    c.add_argument("--depth", type=int, default=4, help="history depth for the H3 check")
    c.set_defaults(run=cmd_check)

    f = sub.add_parser("fold", help="build a finite equivalent arena")
    f.add_argument("file")
    f.add_argument("--kind", choices=("prop", "public"), required=True,
                   help="propositional folding or public-action quotient")
    f.add_argument("--key", choices=("origin", "pointed"), default="origin",
                   help="compare attached models through origin worlds or up to isomorphism")
    f.add_argument("--literal", action="store_true",
                   help="merge classes without remembering the last event")
    f.add_argument("--dot", metavar="PATH", help="write the arena as DOT plus a class list")
    f.set_defaults(run=cmd_fold)

    s = sub.add_parser("solve", help="decide whether the team wins")
    s.add_argument("file")
    s.add_argument("--engine", choices=("reach", "announce", "oracle"), default="oracle",
                   help="attractors on the public quotient, announcement search, "
                        "or bounded brute force")
    s.add_argument("--mode", choices=("objective", "subjective"),
                   help="override the mode given in the game file")
    s.add_argument("--horizon", type=int, help="oracle play length in positions")
    s.add_argument("--strict-leaves", action="store_true",
                   help="announcement search: only the global depth bound makes leaves")
    s.add_argument("--k-scope", choices=("all", "init"), default="all",
                   help="oracle: histories that K quantifies over")
    s.add_argument("--perfect-info", action="store_true",
                   help="reach engine: accept several initial worlds, ignoring uniformity")
    s.set_defaults(run=cmd_solve)

    g = sub.add_parser("sample", help="write a random game file")
    g.add_argument("--kind", choices=("announce", "public", "prop"), default="announce",
                   help="family of random presentation")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", help="write to a file instead of standard output")
    g.set_defaults(run=cmd_sample)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.run(args, out)
    except GameFileError as exc:
        out.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except (PreconditionError, PresentationError) as exc:
        out.write(f"refused: {exc}\n")
        return EXIT_REFUSED


if __name__ == "__main__":
    sys.exit(main())
