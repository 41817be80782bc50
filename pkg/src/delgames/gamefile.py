"""Line-oriented text format for DEL game presentations.

    [agents]
    a exists          # team tag: exists | forall
    b forall
    [model]
    world w p q       # world name followed by its true atoms
    world v
    turn * a          # turn owner of every world (or: turn w a)
    rel a w v         # the listed worlds are indistinguishable for a
    [actions]
    event e next a pre p & K[a] q
    post e p false    # new value of atom p after e
    rel b e f
    [init]
    w
    [objective]
    F K[a] p
    [options]
    mode subjective
    horizon 8
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field

from .dynamics import ActionModel, Presentation, subjective_init
from .formulas import FormulaSyntaxError, RESERVED, parse_formula, to_text
from .kripke import ClosureWarning, EpistemicModel, ModelError

SECTIONS = ("agents", "model", "actions", "init", "objective", "options")
NAME = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_']*$")
IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*$")


class GameFileError(ValueError):
    def __init__(self, message, line=0, column=0):
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass
class GameFile:
    presentation: Presentation
    objective: object = None
    options: dict = field(default_factory=dict)
    declared_init: frozenset = frozenset()
    warnings: list = field(default_factory=list)

    @property
    def mode(self):
        return self.options.get("mode", "objective")


class _Reader:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.agents = {}
        self.worlds = {}
        self.turn = {}
        self.mrel = {}
        self.events = {}
        self.post = {}
        self.erel = {}
        self.init = []
        self.objective = []
        self.options = {}
        self.default_turn = None

    def fail(self, msg, lineno, col=1):
        raise GameFileError(msg, lineno, col)

    def name(self, tok, lineno, col, what):
        pattern = IDENT if what in ("atom", "agent") else NAME
        if not pattern.match(tok) or tok in RESERVED:
            self.fail(f"invalid {what} name {tok!r}", lineno, col)
        return tok

    def agent(self, tok, lineno, col):
        if tok not in self.agents:
            self.fail(f"unknown agent {tok!r}", lineno, col)
        return tok

    def formula(self, text, lineno, col):
        try:
            return parse_formula(text, self.agents)
        except FormulaSyntaxError as exc:
            c = col + exc.column - 1 if exc.line == 1 else exc.column
            raise GameFileError(str(exc).rsplit(" at line", 1)[0], lineno + exc.line - 1, c)

    def read(self):
        section = None
        seen_any = False
        for lineno, raw in enumerate(self.lines, 1):
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            seen_any = True
            stripped = line.strip()
            indent = len(line) - len(line.lstrip())
            m = re.fullmatch(r"\[(\w+)\]", stripped)
            if m:
                section = m.group(1)
                if section not in SECTIONS:
                    self.fail(f"unknown section [{section}]", lineno, indent + 1)
                continue
            if section is None:
                self.fail("content before the first [section]", lineno, indent + 1)
            getattr(self, "line_" + section)(stripped, lineno, indent + 1)
        if not seen_any:
            raise GameFileError("empty game file", 1, 1)

    @staticmethod
    def tokens(line, col):
        out = []
        for m in re.finditer(r"\S+", line):
            out.append((m.group(0), col + m.start()))
        return out

    def line_agents(self, line, lineno, col):
        toks = self.tokens(line, col)
        if len(toks) != 2 or toks[1][0] not in ("exists", "forall"):
            self.fail("expected '<agent> exists|forall'", lineno, col)
        a = self.name(toks[0][0], lineno, toks[0][1], "agent")
        if a in self.agents:
            self.fail(f"agent {a!r} declared twice", lineno, toks[0][1])
        self.agents[a] = toks[1][0]

    def line_model(self, line, lineno, col):
        toks = self.tokens(line, col)
        kw = toks[0][0]
        if kw == "world":
            if len(toks) < 2:
                self.fail("expected 'world <name> <atoms>'", lineno, col)
            w = self.name(toks[1][0], lineno, toks[1][1], "world")
            if w in self.worlds:
                self.fail(f"world {w!r} declared twice", lineno, toks[1][1])
            self.worlds[w] = [self.name(t, lineno, c, "atom") for t, c in toks[2:]]
        elif kw == "turn":
            if len(toks) != 3:
                self.fail("expected 'turn <world|*> <agent>'", lineno, col)
            a = self.agent(toks[2][0], lineno, toks[2][1])
            if toks[1][0] == "*":
                self.default_turn = a
            else:
                self.turn[self.world(toks[1], lineno)] = a
        elif kw == "rel":
            if len(toks) < 3:
                self.fail("expected 'rel <agent> <world> <world>...'", lineno, col)
            a = self.agent(toks[1][0], lineno, toks[1][1])
            ws = [self.world(t, lineno) for t in toks[2:]]
            self.mrel.setdefault(a, []).extend((u, v) for u in ws for v in ws if u != v)
        else:
            self.fail(f"unknown model directive {kw!r}", lineno, col)

    def world(self, tok, lineno):
        if tok[0] not in self.worlds:
            self.fail(f"unknown world {tok[0]!r}", lineno, tok[1])
        return tok[0]

    def event(self, tok, lineno):
        if tok[0] not in self.events:
            self.fail(f"unknown event {tok[0]!r}", lineno, tok[1])
        return tok[0]

    def line_actions(self, line, lineno, col):
        toks = self.tokens(line, col)
        kw = toks[0][0]
        if kw == "event":
            if len(toks) < 4 or toks[2][0] != "next":
                self.fail("expected 'event <name> next <agent> [pre <formula>]'", lineno, col)
            e = self.name(toks[1][0], lineno, toks[1][1], "event")
            if e in self.events:
                self.fail(f"event {e!r} declared twice", lineno, toks[1][1])
            nxt = self.agent(toks[3][0], lineno, toks[3][1])
            pre = parse_formula("true")
            if len(toks) > 4:
                if toks[4][0] != "pre" or len(toks) < 6:
                    self.fail("expected 'pre <formula>'", lineno, toks[4][1])
                start = toks[5][1]
                pre = self.formula(line[start - col:], lineno, start)
            self.events[e] = (nxt, pre)
        elif kw == "post":
            if len(toks) < 4:
                self.fail("expected 'post <event> <atom> <formula>'", lineno, col)
            e = self.event(toks[1], lineno)
            p = self.name(toks[2][0], lineno, toks[2][1], "atom")
            start = toks[3][1]
            self.post.setdefault(e, {})[p] = self.formula(line[start - col:], lineno, start)
        elif kw == "rel":
            if len(toks) < 3:
                self.fail("expected 'rel <agent> <event> <event>...'", lineno, col)
            a = self.agent(toks[1][0], lineno, toks[1][1])
            es = [self.event(t, lineno) for t in toks[2:]]
            self.erel.setdefault(a, []).extend((u, v) for u in es for v in es if u != v)
        else:
            self.fail(f"unknown actions directive {kw!r}", lineno, col)

    def line_init(self, line, lineno, col):
        for tok in self.tokens(line, col):
            self.init.append(self.world(tok, lineno))

    def line_objective(self, line, lineno, col):
        self.objective.append((line, lineno, col))

    def line_options(self, line, lineno, col):
        toks = self.tokens(line, col)
        if len(toks) != 2:
            self.fail("expected '<option> <value>'", lineno, col)
        key, val = toks[0][0], toks[1][0]
        if key == "mode":
            if val not in ("objective", "subjective"):
                self.fail("mode must be objective or subjective", lineno, toks[1][1])
            self.options[key] = val
        elif key in ("horizon", "depth"):
            if not val.isdigit():
                self.fail(f"{key} must be a natural number", lineno, toks[1][1])
            self.options[key] = int(val)
        else:
            self.fail(f"unknown option {key!r}", lineno, col)


def parse_game(text: str) -> GameFile:
    r = _Reader(text)
    r.read()
    if not r.agents:
        raise GameFileError("no agents declared")
    if not r.worlds:
        raise GameFileError("no worlds declared")
    if not r.events:
        raise GameFileError("no events declared")
    if not r.init:
        raise GameFileError("no initial world declared")
    if r.default_turn is not None:
        for w in r.worlds:
            r.turn.setdefault(w, r.default_turn)
    missing = [w for w in r.worlds if w not in r.turn]
    if missing:
        raise GameFileError(f"no turn owner for world(s) {missing}")
    agents = tuple(r.agents)
    caught = []
    with warnings.catch_warnings(record=True) as log:
        warnings.simplefilter("always", ClosureWarning)
        try:
            model = EpistemicModel.from_pairs(list(r.worlds), r.mrel, r.worlds, r.turn, agents)
            actions = ActionModel.from_pairs(
                list(r.events), r.erel, {e: pre for e, (_, pre) in r.events.items()},
                r.post, {e: nxt for e, (nxt, _) in r.events.items()}, agents)
        except ModelError as exc:
            raise GameFileError(str(exc))
        caught = [str(w.message) for w in log if issubclass(w.category, ClosureWarning)]
    team = frozenset(a for a, t in r.agents.items() if t == "exists")
    declared = frozenset(r.init)
    init = declared
    if r.options.get("mode") == "subjective":
        if len(declared) != 1:
            raise GameFileError("subjective mode needs exactly one declared initial world")
        (w0,) = declared
        init = subjective_init(model, w0, team)
    p = Presentation(model, actions, init, team, agents, check=False)
    objective = None
    if r.objective:
        text = "\n".join(line for line, _, _ in r.objective)
        line0, col0 = r.objective[0][1], r.objective[0][2]
        objective = r.formula(text, line0, col0)
    return GameFile(p, objective, dict(r.options), declared, caught)


def load_game(path) -> GameFile:
    with open(path, encoding="utf-8") as fh:
        return parse_game(fh.read())


def _rel_lines(agent, blocks):
    rows = sorted(sorted(map(str, b)) for b in blocks if len(b) > 1)
    return [f"rel {agent} " + " ".join(r) for r in rows]


def format_game(p: Presentation, objective=None, options=None, init=None) -> str:
    """Inverse of ``parse_game`` for presentations with string names."""
    out = ["[agents]"]
    for a in p.agents:
        out.append(f"{a} {'exists' if a in p.team else 'forall'}")
    m, act = p.model, p.actions
    out.append("[model]")
    for w in m.worlds:
        out.append(" ".join(["world", str(w)] + sorted(m.valuation[w])))
    for w in m.worlds:
        out.append(f"turn {w} {m.turn[w]}")
    for a in m.agents:
        out.extend(_rel_lines(a, m.blocks(a)))
    out.append("[actions]")
    for e in act.events:
        out.append(f"event {e} next {act.turn_after[e]} pre {to_text(act.pre[e])}")
    for e in act.events:
        for q, f in sorted(act.post[e].items()):
            out.append(f"post {e} {q} {to_text(f)}")
    for a in act.agents:
        out.extend(_rel_lines(a, act.blocks(a)))
    out.append("[init]")
    out.append(" ".join(str(w) for w in m.worlds if w in (p.init if init is None else init)))
    if objective is not None:
        out.append("[objective]")
        out.append(to_text(objective))
    if options:
        out.append("[options]")
        for k, v in options.items():
            out.append(f"{k} {v}")
    return "\n".join(out) + "\n"
