"""Turn-based game arenas with imperfect information.

Two implementations share one interface: ``GameArena`` is an explicit finite
arena, ``LazyArena`` expands the infinite arena induced by a DEL
presentation on demand. Positions of a ``LazyArena`` are tuples
``(w, e1, ..., en)``; histories of any arena are tuples of positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable

from .dynamics import CheckReport, Presentation, product
from .formulas import (Atom, Formula, Fragment, Know, Next, Not, Or, Top,
                       TurnIs, Until, classify, subformulas)
from .kripke import (EpistemicModel, ModelError, PointedModel, components,
                     eval_el, restrict)

Position = Hashable


@dataclass(frozen=True)
class Verdict:
    kind: str
    horizon: int | None = None
    reason: str = ""

    def __str__(self):
        if self.kind != "UNKNOWN":
            return self.kind
        return f"UNKNOWN({self.reason or 'horizon'}={self.horizon})"

    @property
    def definite(self):
        return self.kind != "UNKNOWN"


WIN = Verdict("WIN")
LOSE = Verdict("LOSE")


def Unknown(horizon, reason="horizon"):
    return Verdict("UNKNOWN", horizon, reason)


class GameArena:
    """Explicit arena. ``trans`` maps ``(position, action)`` to a position.

    ``starts`` are the positions histories may begin at when knowledge is
    evaluated (defaults to ``init``). ``models`` optionally attaches a pointed
    epistemic model to each position; ``k_local`` states that knowledge over
    histories coincides with knowledge in those models.
    """

    def __init__(self, positions, init, trans, turn, valuation, relations=None,
                 agents=(), starts=None, models=None, frontier=(), k_local=False):
        self.positions = tuple(dict.fromkeys(positions))
        pset = set(self.positions)
        self.init = tuple(v for v in self.positions if v in set(init))
        if not self.init:
            raise ModelError("an arena needs at least one initial position")
        self.starts = self.init if starts is None else tuple(
            v for v in self.positions if v in set(starts))
        self._moves = {v: [] for v in self.positions}
        for (v, c), x in trans.items():
            if v not in pset or x not in pset:
                raise ModelError(f"transition {v!r} -{c!r}-> {x!r} leaves the arena")
            self._moves[v].append((c, x))
        self.turn = {v: turn[v] for v in self.positions}
        self.valuation = {v: frozenset(valuation.get(v, ())) for v in self.positions}
        relations = relations or {}
        self.agents = tuple(sorted(set(agents) | set(relations) | set(self.turn.values())))
        self._cls = {}
        for a in self.agents:
            cls = {}
            for i, block in enumerate(relations.get(a, ())):
                for v in block:
                    cls[v] = i
            for v in self.positions:
                if v not in cls:
                    cls[v] = ("own", v)
            self._cls[a] = cls
        self.models = dict(models or {})
        self.frontier = frozenset(frontier)
        self.k_local = k_local

    def __repr__(self):
        return f"GameArena({len(self.positions)} positions, {len(self.init)} initial)"

    def __len__(self):
        return len(self.positions)

    def initial(self):
        return self.init

    def roots(self, scope="all"):
        return self.init if scope == "init" else self.starts

    def moves(self, v):
        return self._moves[v]

    def enabled(self, v):
        return [c for c, _ in self._moves[v]]

    def step(self, v, c):
        for d, x in self._moves[v]:
            if d == c:
                return x
        return None

    def turn_of(self, v):
        return self.turn[v]

    def label(self, v):
        return self.valuation[v]

    def cls(self, agent, v):
        return self._cls[agent][v]

    def related(self, agent, u, v):
        return self._cls[agent][u] == self._cls[agent][v]

    def blocks(self, agent):
        groups = {}
        for v in self.positions:
            groups.setdefault(self._cls[agent][v], []).append(v)
        return list(groups.values())

    def attached_model(self, v):
        return self.models.get(v)

    def transitions(self):
        return [(v, c, x) for v in self.positions for c, x in self._moves[v]]

    def problems(self):
        """Violations of the arena well-formedness conditions."""
        out = []
        for v in self.positions:
            if not self._moves[v] and v not in self.frontier:
                out.append(f"position {v!r} has no enabled action")
        for a in self.agents:
            for block in self.blocks(a):
                owners = {self.turn[v] for v in block}
                if len(owners) > 1:
                    out.append(f"agent {a} cannot tell whose turn it is in {block!r}")
                    continue
                if owners == {a}:
                    live = [v for v in block if v not in self.frontier]
                    acts = {frozenset(self.enabled(v)) for v in live}
                    if len(acts) > 1:
                        out.append(f"agent {a} does not know its actions in {live!r}")
        return out


class LazyArena:
    """The infinite arena induced by a presentation, expanded on demand.

    Every position caches the connected component of the iterated product
    containing it; those components are its attached models.
    """

    k_local = True

    def __init__(self, p: Presentation):
        self.presentation = p
        self.agents = p.agents
        m, e = p.model, p.actions
        self.actions = e
        rename = {w: (w,) for w in m.worlds}
        base = EpistemicModel(
            [rename[w] for w in m.worlds],
            {a: [[rename[w] for w in b] for b in m.blocks(a)] for a in m.agents},
            {rename[w]: m.valuation[w] for w in m.worlds},
            {rename[w]: m.turn[w] for w in m.worlds}, p.agents)
        self._model = {}
        self._register(base)
        self._starts = tuple(rename[w] for w in m.worlds)
        self._init = tuple(rename[w] for w in m.worlds if w in p.init)
        self._moves = {}
        self._expanded = set()

    def _register(self, model):
        for comp in components(model):
            sub = model if len(comp) == len(model.worlds) else restrict(model, comp)
            for x in comp:
                self._model[x] = sub

    def _expand_component(self, m):
        if id(m) in self._expanded:
            return
        try:
            nxt = product(m, self.actions, lambda h, e: h + (e,))
        except ModelError:
            nxt = None
        if nxt is not None:
            self._register(nxt)
        self._expanded.add(id(m))
        for h in m.worlds:
            self._moves[h] = [(e, h + (e,)) for e in self.actions.events
                              if h + (e,) in self._model]

    def __repr__(self):
        return f"LazyArena({self.presentation.model!r}, {self.actions!r})"

    def initial(self):
        return self._init

    def roots(self, scope="all"):
        return self._init if scope == "init" else self._starts

    def _component(self, h):
        m = self._model.get(h)
        if m is None:
            if len(h) > 1:
                self.moves(h[:-1])
                m = self._model.get(h)
            if m is None:
                raise ModelError(f"{h!r} is not a history of the arena")
        return m

    def moves(self, h):
        if h not in self._moves:
            self._expand_component(self._component(h))
        return self._moves[h]

    def enabled(self, h):
        return [e for e, _ in self.moves(h)]

    def expand(self, h, e):
        """The history ``h`` extended by event ``e``, or None if not executable."""
        for f, x in self.moves(h):
            if f == e:
                return x
        return None

    step = expand

    def turn_of(self, h):
        return self._component(h).turn[h]

    def label(self, h):
        return self._component(h).valuation[h]

    def cls(self, agent, h):
        m, e = self.presentation.model, self.actions
        head = m.class_index(agent, h[0]) if agent in m.agents else h[0]
        if agent in e.agents:
            return (head,) + tuple(e.class_index(agent, x) for x in h[1:])
        return (head,) + h[1:]

    def related(self, agent, u, v):
        return len(u) == len(v) and self.cls(agent, u) == self.cls(agent, v)

    def attached_model(self, h) -> PointedModel:
        return PointedModel(self._component(h), h)


def lift_equiv(arena, h1, h2, agent) -> bool:
    """Synchronous perfect-recall indistinguishability of two histories."""
    return len(h1) == len(h2) and all(arena.cls(agent, u) == arena.cls(agent, v)
                                      for u, v in zip(h1, h2))


def histories(arena, length, scope="all"):
    """All histories with ``length`` positions, rooted at ``arena.roots(scope)``."""
    level = [(r,) for r in arena.roots(scope)]
    for _ in range(length - 1):
        level = list(dict.fromkeys(h + (x,) for h in level for _, x in arena.moves(h[-1])))
    return level


def unfold(arena, depth, scope="all") -> GameArena:
    """Tree arena over histories of at most ``depth`` moves."""
    init = set(arena.initial())
    level = [(r,) for r in arena.roots(scope)]
    positions, trans = list(level), {}
    for d in range(depth):
        nxt = []
        for h in level:
            for c, x in arena.moves(h[-1]):
                g = h + (x,)
                trans[(h, c)] = g
                nxt.append(g)
        nxt = list(dict.fromkeys(nxt))
        positions.extend(nxt)
        level = nxt
    positions = list(dict.fromkeys(positions))
    relations = {}
    for a in arena.agents:
        groups = {}
        for h in positions:
            groups.setdefault(tuple(arena.cls(a, v) for v in h), []).append(h)
        relations[a] = list(groups.values())
    models = {}
    for h in positions:
        pm = arena.attached_model(h[-1])
        if pm is not None:
            models[h] = pm
    return GameArena(positions, [h for h in positions if len(h) == 1 and h[0] in init],
                     trans, {h: arena.turn_of(h[-1]) for h in positions},
                     {h: arena.label(h[-1]) for h in positions}, relations, arena.agents,
                     starts=[h for h in positions if len(h) == 1], models=models,
                     frontier=[h for h in positions if len(h) == depth + 1],
                     k_local=getattr(arena, "k_local", False))


def arena_public(arena: GameArena) -> CheckReport:
    """No two distinct actions lead to positions some agent confuses."""
    for a in arena.agents:
        seen = {}
        for v, c, x in arena.transitions():
            key = arena.cls(a, x)
            if key in seen and seen[key][1] != c:
                u, d, y = seen[key]
                return CheckReport("public", False,
                                   f"agent {a} confuses {y!r} (via {d!r}) and {x!r} (via {c!r})",
                                   ((u, d, y), (v, c, x)))
            seen.setdefault(key, (v, c, x))
    return CheckReport("public", True)


class _Start:
    """The fresh initial position added by ``reduce_multi_init``."""

    def __repr__(self):
        return "<start>"


def reduce_multi_init(arena: GameArena, owner=None) -> GameArena:
    """Single fresh initial position with one move per old initial position.

    The fresh position is observed as a singleton by everyone and has an
    empty label. Plays of the result are evaluated on ``result.base`` after
    dropping the fresh position (``result.offset == 1``).
    """
    start = _Start()
    owner = arena.agents[0] if owner is None else owner
    trans = {(v, c): x for v, c, x in arena.transitions()}
    for v in arena.init:
        trans[(start, ("start", v))] = v
    positions = (start,) + arena.positions
    turn = dict(arena.turn)
    turn[start] = owner
    relations = {a: arena.blocks(a) for a in arena.agents}
    out = GameArena(positions, [start], trans, turn, arena.valuation, relations,
                    arena.agents, starts=(start,) + tuple(arena.starts),
                    models=arena.models, frontier=arena.frontier)
    out.base = arena
    out.offset = 1
    return out


# ------------------------------------------------------------ evaluation

def _not(x):
    return None if x is None else not x


def _or(x, y):
    if x is True or y is True:
        return True
    if x is None or y is None:
        return None
    return False


def _and(x, y):
    if x is False or y is False:
        return False
    if x is None or y is None:
        return None
    return True


class BoundedEvaluator:
    """Three-valued LTLK semantics on finite play prefixes.

    ``True``/``False`` are definite for every play extending the prefix;
    ``None`` means the horizon was too short to decide.
    """

    def __init__(self, arena, horizon, k_scope="all"):
        if k_scope not in ("all", "init"):
            raise ValueError(f"k_scope must be 'all' or 'init', not {k_scope!r}")
        self.arena = arena
        self.horizon = horizon
        self.scope = k_scope
        self._related = {}
        self._know = {}
        self._ext = {}

    def value(self, play, i, phi):
        if i >= len(play):
            return None
        if isinstance(phi, Top):
            return True
        if isinstance(phi, Atom):
            return phi.name in self.arena.label(play[i])
        if isinstance(phi, TurnIs):
            return self.arena.turn_of(play[i]) == phi.agent
        if isinstance(phi, Not):
            return _not(self.value(play, i, phi.sub))
        if isinstance(phi, Or):
            left = self.value(play, i, phi.left)
            return True if left is True else _or(left, self.value(play, i, phi.right))
        if isinstance(phi, Next):
            return self.value(play, i + 1, phi.sub)
        if isinstance(phi, Until):
            val = None
            for k in range(len(play) - 1, i - 1, -1):
                val = _or(self.value(play, k, phi.right),
                          _and(self.value(play, k, phi.left), val))
            return val
        if isinstance(phi, Know):
            return self.know(tuple(play[:i + 1]), phi)
        raise TypeError(f"not a formula: {phi!r}")

    def related(self, agent, h):
        key = (agent, h)
        hit = self._related.get(key)
        if hit is not None:
            return hit
        a = self.arena
        target = a.cls(agent, h[-1])
        if len(h) == 1:
            out = [(r,) for r in a.roots(self.scope) if a.cls(agent, r) == target]
        else:
            out = list(dict.fromkeys(g + (x,) for g in self.related(agent, h[:-1])
                                     for _, x in a.moves(g[-1])
                                     if a.cls(agent, x) == target))
        self._related[key] = out
        return out

    def extensions(self, h):
        hit = self._ext.get(h)
        if hit is not None:
            return hit
        out, stack = [], [h]
        while stack:
            g = stack.pop()
            nxt = self.arena.moves(g[-1]) if len(g) < self.horizon else ()
            if not nxt:
                out.append(g)
            for _, x in nxt:
                stack.append(g + (x,))
        out = list(dict.fromkeys(out))
        self._ext[h] = out
        return out

    def know(self, h, phi):
        key = (h, phi)
        if key in self._know:
            return self._know[key]
        body = phi.sub
        temporal = classify(body) > Fragment.EL
        pm = None
        if not temporal and self.scope == "all" and getattr(self.arena, "k_local", False):
            pm = self.arena.attached_model(h[-1])
        if pm is not None:
            result = eval_el(pm.model, pm.point, phi)
        else:
            result = True
            j = len(h) - 1
            for g in self.related(phi.agent, h):
                if temporal:
                    v = True
                    for ext in self.extensions(g):
                        v = _and(v, self.value(ext, j, body))
                        if v is False:
                            break
                else:
                    v = self.value(g, j, body)
                result = _and(result, v)
                if result is False:
                    break
        self._know[key] = result
        return result


def eval_ltlk_bounded(arena, prefix, i, phi: Formula, horizon, k_scope="all"):
    prefix = tuple(prefix)
    if not 0 <= i < len(prefix) <= horizon:
        raise ValueError(f"need 0 <= i < len(prefix) <= horizon, got i={i}, "
                         f"len={len(prefix)}, horizon={horizon}")
    return BoundedEvaluator(arena, horizon, k_scope).value(prefix, i, phi)


@dataclass(frozen=True)
class LassoPlay:
    stem: tuple
    loop: tuple

    def __post_init__(self):
        object.__setattr__(self, "stem", tuple(self.stem))
        object.__setattr__(self, "loop", tuple(self.loop))
        if not self.loop:
            raise ValueError("a lasso needs a nonempty loop")

    def positions(self):
        return self.stem + self.loop

    def prefix(self, n):
        out = list(self.stem)
        while len(out) < n:
            out.extend(self.loop)
        return tuple(out[:n])

    def __len__(self):
        return len(self.stem) + len(self.loop)


def _pointed_label(pm):
    return pm.model.valuation[pm.point], pm.model.turn[pm.point]


def eval_ltlk_lasso(arena, play: LassoPlay, phi: Formula) -> bool:
    """Exact truth of a formula without X and without temporal operators under K.

    Knowledge is evaluated locally in each position's attached model. With
    ``arena=None`` the positions are themselves ``PointedModel`` values.
    """
    if classify(phi) > Fragment.LTLK_NoX_NoKTemporal:
        raise ModelError(f"formula outside the lasso fragment: {phi}")
    seq = play.positions()
    n = len(seq)
    succ = [k + 1 if k + 1 < n else len(play.stem) for k in range(n)]
    if arena is None:
        pms = list(seq)
        labels = [_pointed_label(pm) for pm in pms]
    else:
        pms = [None] * n
        labels = [(arena.label(v), arena.turn_of(v)) for v in seq]
    table = {}
    for f in subformulas(phi):
        if isinstance(f, Top):
            row = [True] * n
        elif isinstance(f, Atom):
            row = [f.name in labels[k][0] for k in range(n)]
        elif isinstance(f, TurnIs):
            row = [labels[k][1] == f.agent for k in range(n)]
        elif isinstance(f, Not):
            row = [not x for x in table[f.sub]]
        elif isinstance(f, Or):
            row = [x or y for x, y in zip(table[f.left], table[f.right])]
        elif isinstance(f, Know):
            row = []
            for k in range(n):
                pm = pms[k] if arena is None else arena.attached_model(seq[k])
                if pm is None:
                    raise ModelError(f"position {seq[k]!r} has no attached model")
                row.append(eval_el(pm.model, pm.point, f))
        elif isinstance(f, Until):
            left, right = table[f.left], table[f.right]
            row = [False] * n
            changed = True
            while changed:
                changed = False
                for k in range(n - 1, -1, -1):
                    if not row[k] and (right[k] or (left[k] and row[succ[k]])):
                        row[k] = True
                        changed = True
        else:
            raise ModelError(f"unsupported operator in lasso evaluation: {f}")
        table[f] = row
    return table[phi][0]


# ------------------------------------------------------------ export

def _dot_id(v, ids):
    if v not in ids:
        ids[v] = f"n{len(ids)}"
    return ids[v]


def _q(text):
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(arena: GameArena, name="arena") -> str:
    ids = {}
    lines = [f"digraph {name} {{"]
    init = set(arena.init)
    for v in arena.positions:
        val = ",".join(sorted(arena.label(v)))
        shape = "doublecircle" if v in init else "circle"
        lines.append(f"  {_dot_id(v, ids)} [label={_q(f'{{{val}}} / {arena.turn_of(v)}')}, "
                     f"shape={shape}, tooltip={_q(repr(v))}];")
    for v, c, x in arena.transitions():
        lines.append(f"  {_dot_id(v, ids)} -> {_dot_id(x, ids)} [label={_q(c)}];")
    for a in arena.agents:
        for block in arena.blocks(a):
            block = list(block)
            for u, w in zip(block, block[1:]):
                lines.append(f"  {_dot_id(u, ids)} -> {_dot_id(w, ids)} "
                             f"[style=dashed, dir=none, label={_q(a)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
