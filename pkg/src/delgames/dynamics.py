"""Action models, the update product, DEL game presentations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping

from .formulas import (Atom, Formula, Fragment, TRUE, atoms as formula_atoms,
                       classify)
from .kripke import EpistemicModel, ModelError, eval_el, partition_from_pairs

Event = Hashable


class PresentationError(ValueError):
    pass


class ActionModel:
    """Events with EL preconditions, propositional postconditions and a turn assignment.

    ``post[e]`` maps an atom to its new-value formula; atoms not listed keep
    their value. ``turn_after[e]`` is the agent whose turn it is after ``e``.
    """

    def __init__(self, events: Iterable[Event], relations: Mapping[str, Iterable[Iterable[Event]]],
                 pre: Mapping[Event, Formula], post: Mapping[Event, Mapping[str, Formula]],
                 turn_after: Mapping[Event, str], agents: Iterable[str] = ()):
        self.events = tuple(dict.fromkeys(events))
        if not self.events:
            raise ModelError("an action model needs at least one event")
        eset = set(self.events)
        self.agents = tuple(sorted(set(agents) | set(relations)))
        self._cls = {}
        self._blocks = {}
        for a in self.agents:
            blocks = [frozenset(b) for b in relations.get(a, ())]
            cls = {}
            for i, b in enumerate(blocks):
                for e in b:
                    if e not in eset or e in cls:
                        raise ModelError(f"agent {a}: bad event block {sorted(map(str, b))}")
                    cls[e] = i
            for e in self.events:
                if e not in cls:
                    cls[e] = len(blocks)
                    blocks.append(frozenset([e]))
            self._cls[a] = cls
            self._blocks[a] = tuple(blocks)
        self.pre = {e: pre.get(e, TRUE) for e in self.events}
        self.post = {e: {p: f for p, f in post.get(e, {}).items() if f != Atom(p)}
                     for e in self.events}
        for e in self.events:
            if classify(self.pre[e]) > Fragment.EL:
                raise ModelError(f"precondition of {e!r} is not epistemic: {self.pre[e]}")
            for p, f in self.post[e].items():
                if classify(f) > Fragment.PROP:
                    raise ModelError(f"postcondition {e!r}/{p} is not propositional: {f}")
        missing = [e for e in self.events if e not in turn_after]
        if missing:
            raise ModelError(f"no turn assignment for event(s) {missing!r}")
        self.turn_after = {e: turn_after[e] for e in self.events}

    @classmethod
    def from_pairs(cls, events, pairs, pre, post, turn_after, agents=()):
        events = list(dict.fromkeys(events))
        relations = {a: partition_from_pairs(events, ps, f"events, agent {a}")
                     for a, ps in pairs.items()}
        return cls(events, relations, pre, post, turn_after, agents)

    def __repr__(self):
        return f"ActionModel({len(self.events)} events, agents={self.agents})"

    def blocks(self, agent):
        return self._blocks[agent]

    def block_of(self, agent, e):
        return self._blocks[agent][self._cls[agent][e]]

    def class_index(self, agent, e):
        return self._cls[agent][e]

    def related(self, agent, e, f):
        return self._cls[agent][e] == self._cls[agent][f]

    def atoms(self):
        out = set()
        for e in self.events:
            out |= formula_atoms(self.pre[e])
            for p, f in self.post[e].items():
                out.add(p)
                out |= formula_atoms(f)
        return frozenset(out)


def executable(m: EpistemicModel, w, actions: ActionModel, e) -> bool:
    return eval_el(m, w, actions.pre[e])


def post_val(m: EpistemicModel, w, actions: ActionModel, e) -> frozenset:
    if not executable(m, w, actions, e):
        raise ModelError(f"event {e!r} is not executable at {w!r}")
    changed = actions.post[e]
    kept = {p for p in m.valuation[w] if p not in changed}
    return frozenset(kept | {p for p, f in changed.items() if w in m.satisfying(f)})


def product(m: EpistemicModel, actions: ActionModel,
            name: Callable[[object, Event], object] = lambda w, e: (w, e)) -> EpistemicModel:
    """The update product; product worlds are named ``name(w, e)``."""
    pairs = [(w, e) for w in m.worlds for e in actions.events
             if w in m.satisfying(actions.pre[e])]
    if not pairs:
        raise ModelError("no executable event: the product is empty")
    agents = tuple(sorted(set(m.agents) | set(actions.agents)))
    worlds, valuation, turn = [], {}, {}
    groups = {a: {} for a in agents}
    for w, e in pairs:
        x = name(w, e)
        worlds.append(x)
        valuation[x] = post_val(m, w, actions, e)
        turn[x] = actions.turn_after[e]
        for a in agents:
            key = (m.class_index(a, w) if a in m.agents else w,
                   actions.class_index(a, e) if a in actions.agents else e)
            groups[a].setdefault(key, []).append(x)
    relations = {a: list(g.values()) for a, g in groups.items()}
    return EpistemicModel(worlds, relations, valuation, turn, agents)


@dataclass(frozen=True)
class ActionTypes:
    propositional: bool
    public: dict
    announcement: dict


def classify_actions(actions: ActionModel) -> ActionTypes:
    prop = all(classify(actions.pre[e]) == Fragment.PROP
               and all(classify(f) == Fragment.PROP for f in actions.post[e].values())
               for e in actions.events)
    public = {e: all(actions.block_of(a, e) == {e} for a in actions.agents)
              for e in actions.events}
    announcement = {e: public[e] and not actions.post[e] for e in actions.events}
    return ActionTypes(prop, public, announcement)


@dataclass
class CheckReport:
    name: str
    ok: bool
    detail: str = ""
    witness: object = None

    def __bool__(self):
        return bool(self.ok)

    def __str__(self):
        return f"{self.name}: {'pass' if self.ok else 'FAIL'}" + (f" ({self.detail})" if self.detail else "")


def check_h1(m: EpistemicModel) -> CheckReport:
    owners = sorted({str(m.turn[w]) for w in m.worlds})
    if len(owners) == 1:
        return CheckReport("H1", True, f"starting player {owners[0]}")
    return CheckReport("H1", False, f"several starting players {owners}", owners)


def check_h2(actions: ActionModel) -> CheckReport:
    for a in actions.agents:
        for block in actions.blocks(a):
            turns = {actions.turn_after[e] for e in block}
            if len(turns) > 1:
                pair = sorted(block, key=str)[:2]
                for e in block:
                    for f in block:
                        if actions.turn_after[e] != actions.turn_after[f]:
                            pair = (e, f)
                return CheckReport("H2", False,
                                   f"agent {a} confuses {pair[0]!r} and {pair[1]!r} "
                                   f"with different next turns", pair)
    return CheckReport("H2", True)


@dataclass
class Presentation:
    """A DEL game presentation: initial model, action model, initial worlds, team."""

    model: EpistemicModel
    actions: ActionModel
    init: frozenset
    team: frozenset
    agents: tuple = ()
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.init = frozenset(self.init)
        self.team = frozenset(self.team)
        if not self.agents:
            self.agents = tuple(sorted(set(self.model.agents) | set(self.actions.agents)
                                       | set(self.team)))
        self.agents = tuple(self.agents)
        if not self.init:
            raise PresentationError("the set of initial worlds is empty")
        unknown = [w for w in self.init if w not in self.model]
        if unknown:
            raise PresentationError(f"initial worlds not in the model: {unknown!r}")
        if not self.team <= set(self.agents):
            raise PresentationError(f"team mentions unknown agents {sorted(self.team - set(self.agents))}")
        for a in set(self.model.agents) | set(self.actions.agents):
            if a not in self.agents:
                raise PresentationError(f"undeclared agent {a!r}")
        if self.check:
            for rep in (check_h1(self.model), check_h2(self.actions)):
                if not rep.ok:
                    raise PresentationError(str(rep))

    @property
    def opponents(self):
        return frozenset(self.agents) - self.team

    def atoms(self):
        return self.model.atoms() | self.actions.atoms()

    def turn_values(self):
        return frozenset(self.model.turn.values()) | frozenset(self.actions.turn_after.values())


def subjective_init(m: EpistemicModel, w_init, team) -> frozenset:
    if w_init not in m:
        raise ModelError(f"unknown world {w_init!r}")
    return frozenset(w for w in m.worlds
                     if w == w_init or any(a in m.agents and m.related(a, w, w_init) for a in team))


def check_h3(p: Presentation, depth: int = 4) -> list:
    """Depth-bounded check of H3 and of action availability; returns two reports."""
    from .arena import LazyArena

    arena = LazyArena(p)
    level = list(arena.roots("all"))
    h3 = None
    avail = None
    for d in range(depth + 1):
        seen = {}
        nxt = []
        for pos in level:
            owner = arena.turn_of(pos)
            enabled = frozenset(arena.enabled(pos))
            if not enabled and avail is None:
                avail = CheckReport("availability", False,
                                    f"no executable event at history {pos!r}", pos)
            key = (owner, arena.cls(owner, pos)) if owner in arena.agents else (owner, pos)
            if key in seen and seen[key][1] != enabled and h3 is None:
                other = seen[key][0]
                h3 = CheckReport("H3", False,
                                 f"agent {owner} confuses {other!r} and {pos!r} "
                                 f"but available events differ", (other, pos))
            seen.setdefault(key, (pos, enabled))
            if d < depth:
                nxt.extend(q for _, q in arena.moves(pos))
        level = nxt
    if h3 is None:
        h3 = CheckReport("H3", True, f"verified to depth {depth}")
    if avail is None:
        avail = CheckReport("availability", True, f"verified to depth {depth}")
    return [h3, avail]
