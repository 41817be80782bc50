"""Epistemic models, epistemic-logic evaluation and pointed isomorphism."""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from .formulas import (Atom, Formula, Fragment, Know, Next, Not, Or, Top,
                       TurnIs, Until, classify)

World = Hashable
Agent = str


class ModelError(ValueError):
    pass


class ClosureWarning(UserWarning):
    """Declared indistinguishability pairs were not transitively closed."""


def _partition_from_pairs(worlds, pairs):
    parent = {w: w for w in worlds}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in pairs:
        if u not in parent or v not in parent:
            raise ModelError(f"relation mentions unknown element {u!r} or {v!r}")
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    groups = {}
    for w in worlds:
        groups.setdefault(find(w), []).append(w)
    return [frozenset(g) for g in groups.values()]


def partition_from_pairs(elements, pairs, what="relation"):
    """Close undirected pairs into an equivalence; warn if transitivity added pairs."""
    pairs = [tuple(p) for p in pairs]
    classes = _partition_from_pairs(list(elements), pairs)
    declared = {frozenset(p) for p in pairs if p[0] != p[1]}
    implied = sum(len(c) * (len(c) - 1) // 2 for c in classes)
    if implied > len(declared):
        warnings.warn(f"{what}: transitive closure added "
                      f"{implied - len(declared)} pair(s)", ClosureWarning,
                      stacklevel=3)
    return classes


class EpistemicModel:
    """Finite Kripke model with one equivalence relation per agent.

    ``relations`` maps each agent to a partition of the worlds (an iterable
    of blocks). Agents listed in ``agents`` but absent from ``relations`` get
    the identity relation. Every world carries a turn owner.
    """

    def __init__(self, worlds: Iterable[World], relations: Mapping[Agent, Iterable[Iterable[World]]],
                 valuation: Mapping[World, Iterable[str]], turn: Mapping[World, Agent],
                 agents: Iterable[Agent] = ()):
        self.worlds = tuple(dict.fromkeys(worlds))
        if not self.worlds:
            raise ModelError("an epistemic model needs at least one world")
        wset = set(self.worlds)
        self.agents = tuple(sorted(set(agents) | set(relations)))
        self._cls = {}
        self._blocks = {}
        for a in self.agents:
            blocks = [frozenset(b) for b in relations.get(a, ())]
            seen = {}
            for i, b in enumerate(blocks):
                for w in b:
                    if w not in wset:
                        raise ModelError(f"agent {a}: unknown world {w!r}")
                    if w in seen:
                        raise ModelError(f"agent {a}: world {w!r} in two blocks")
                    seen[w] = i
            for w in self.worlds:
                if w not in seen:
                    seen[w] = len(blocks)
                    blocks.append(frozenset([w]))
            self._cls[a] = seen
            self._blocks[a] = tuple(blocks)
        self.valuation = {w: frozenset(valuation.get(w, ())) for w in self.worlds}
        missing = [w for w in self.worlds if w not in turn]
        if missing:
            raise ModelError(f"no turn owner for world(s) {missing!r}")
        self.turn = {w: turn[w] for w in self.worlds}
        self._sat = {}

    @classmethod
    def from_pairs(cls, worlds, pairs: Mapping[Agent, Iterable[tuple]], valuation, turn, agents=()):
        worlds = list(dict.fromkeys(worlds))
        relations = {a: partition_from_pairs(worlds, ps, f"agent {a}")
                     for a, ps in pairs.items()}
        return cls(worlds, relations, valuation, turn, agents)

    def __repr__(self):
        return f"EpistemicModel({len(self.worlds)} worlds, agents={self.agents})"

    def __contains__(self, w):
        return w in self.valuation

    def __len__(self):
        return len(self.worlds)

    def blocks(self, agent):
        return self._blocks[agent]

    def block_of(self, agent, w):
        return self._blocks[agent][self._cls[agent][w]]

    def class_index(self, agent, w):
        return self._cls[agent][w]

    def related(self, agent, u, v):
        return self._cls[agent][u] == self._cls[agent][v]

    def relation_pairs(self, agent):
        return {(u, v) for b in self._blocks[agent] for u in b for v in b}

    def neighbours(self, w):
        out = set()
        for a in self.agents:
            out |= self.block_of(a, w)
        return out

    def size(self):
        return (len(self.worlds)
                + sum(len(self.relation_pairs(a)) for a in self.agents)
                + sum(len(v) for v in self.valuation.values()))

    def atoms(self):
        out = set()
        for v in self.valuation.values():
            out |= v
        return frozenset(out)

    def satisfying(self, phi: Formula) -> frozenset:
        """Worlds where the epistemic formula holds."""
        hit = self._sat.get(phi)
        if hit is not None:
            return hit
        if isinstance(phi, Top):
            out = frozenset(self.worlds)
        elif isinstance(phi, Atom):
            out = frozenset(w for w in self.worlds if phi.name in self.valuation[w])
        elif isinstance(phi, TurnIs):
            out = frozenset(w for w in self.worlds if self.turn[w] == phi.agent)
        elif isinstance(phi, Not):
            out = frozenset(self.worlds) - self.satisfying(phi.sub)
        elif isinstance(phi, Or):
            out = self.satisfying(phi.left) | self.satisfying(phi.right)
        elif isinstance(phi, Know):
            if phi.agent not in self._cls:
                raise ModelError(f"unknown agent {phi.agent!r}")
            inner = self.satisfying(phi.sub)
            out = frozenset(w for b in self._blocks[phi.agent] if b <= inner for w in b)
        elif isinstance(phi, (Next, Until)):
            raise ModelError(f"temporal operator in epistemic formula: {phi}")
        else:
            raise TypeError(f"not a formula: {phi!r}")
        self._sat[phi] = out
        return out


@dataclass(frozen=True)
class PointedModel:
    model: EpistemicModel
    point: World

    def __post_init__(self):
        if self.point not in self.model:
            raise ModelError(f"point {self.point!r} is not a world of the model")


def eval_el(model: EpistemicModel, world: World, phi: Formula) -> bool:
    if classify(phi) > Fragment.EL:
        raise ModelError(f"not an epistemic formula: {phi}")
    if world not in model:
        raise ModelError(f"unknown world {world!r}")
    return world in model.satisfying(phi)


def restrict(model: EpistemicModel, keep) -> EpistemicModel:
    keep = set(keep)
    if not keep:
        raise ModelError("cannot restrict to an empty set of worlds")
    if not keep <= set(model.worlds):
        raise ModelError(f"unknown worlds {keep - set(model.worlds)!r}")
    worlds = [w for w in model.worlds if w in keep]
    rel = {a: [b & keep for b in model.blocks(a) if b & keep] for a in model.agents}
    return EpistemicModel(worlds, rel, model.valuation, model.turn, model.agents)


def with_turn(model: EpistemicModel, agent) -> EpistemicModel:
    return EpistemicModel(model.worlds, {a: model.blocks(a) for a in model.agents},
                          model.valuation, {w: agent for w in model.worlds}, model.agents)


def component_worlds(model: EpistemicModel, world) -> list:
    seen = {world}
    order = [world]
    queue = deque([world])
    while queue:
        u = queue.popleft()
        for a in model.agents:
            for v in model.block_of(a, u):
                if v not in seen:
                    seen.add(v)
                    order.append(v)
                    queue.append(v)
    return order


def connected_component(model: EpistemicModel, world) -> PointedModel:
    if world not in model:
        raise ModelError(f"unknown world {world!r}")
    comp = component_worlds(model, world)
    if len(comp) == len(model.worlds):
        return PointedModel(model, world)
    return PointedModel(restrict(model, comp), world)


def components(model: EpistemicModel) -> list:
    seen = set()
    out = []
    for w in model.worlds:
        if w not in seen:
            comp = component_worlds(model, w)
            seen.update(comp)
            out.append(comp)
    return out


# ------------------------------------------------------------ isomorphism

def _local_label(model, w, ignore_turn):
    return (tuple(sorted(model.valuation[w])), None if ignore_turn else model.turn[w])


def pointed_isomorphic(p1: PointedModel, p2: PointedModel, ignore_turn=False):
    """Return a world bijection mapping p1 onto p2 (point to point), or None."""
    m1, m2 = p1.model, p2.model
    if len(m1.worlds) != len(m2.worlds) or m1.agents != m2.agents:
        return None
    if _local_label(m1, p1.point, ignore_turn) != _local_label(m2, p2.point, ignore_turn):
        return None
    agents = m1.agents
    order = component_worlds(m1, p1.point)
    order += [w for w in m1.worlds if w not in set(order)]
    by_label = {}
    for v in m2.worlds:
        by_label.setdefault(_local_label(m2, v, ignore_turn), []).append(v)
    sizes1 = {w: tuple(len(m1.block_of(a, w)) for a in agents) for w in m1.worlds}
    sizes2 = {v: tuple(len(m2.block_of(a, v)) for a in agents) for v in m2.worlds}
    fwd, used = {}, set()

    def consistent(w, v):
        for u, x in fwd.items():
            for a in agents:
                if m1.related(a, w, u) != m2.related(a, v, x):
                    return False
        return True

    def extend(i):
        if i == len(order):
            return True
        w = order[i]
        cands = [p2.point] if i == 0 else by_label.get(_local_label(m1, w, ignore_turn), [])
        for v in cands:
            if v in used or sizes1[w] != sizes2[v] or not consistent(w, v):
                continue
            fwd[w] = v
            used.add(v)
            if extend(i + 1):
                return True
            del fwd[w]
            used.discard(v)
        return False

    return dict(fwd) if extend(0) else None


def _refine(model, worlds, colour, agents):
    """Colour refinement to the coarsest stable colouring; colours are canonical ranks."""
    while True:
        sig = {}
        for w in worlds:
            nb = tuple(tuple(sorted(colour[v] for v in model.block_of(a, w))) for a in agents)
            sig[w] = (colour[w], nb)
        ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = {w: ranks[sig[w]] for w in worlds}
        if len(ranks) == len(set(colour.values())):
            return new
        colour = new


def _encode(model, order, point, agents, ignore_turn):
    idx = {w: i for i, w in enumerate(order)}
    rows = []
    for w in order:
        rows.append((tuple(sorted(model.valuation[w])),
                     "" if ignore_turn else str(model.turn[w])))
    rels = []
    for a in agents:
        blocks = sorted(tuple(sorted(idx[w] for w in b)) for b in model.blocks(a))
        rels.append((a, tuple(blocks)))
    return (len(order), idx[point], tuple(rows), tuple(rels))


def _twins(model, agents, u, v):
    pair = {u, v}
    return all(model.block_of(a, u) - pair == model.block_of(a, v) - pair for a in agents)


def canonical_form(p: PointedModel, ignore_turn=False) -> bytes:
    """Key equal for two pointed models exactly when they are pointed-isomorphic.

    Individualisation-refinement: refine by (point, valuation, turn) and
    neighbourhood multisets, then branch on every member of the first
    non-singleton cell and keep the least encoding over all leaves.
    """
    model = p.model
    agents = model.agents
    worlds = model.worlds
    init_sig = {w: (w != p.point, _local_label(model, w, ignore_turn)) for w in worlds}
    ranks = {s: i for i, s in enumerate(sorted(set(init_sig.values())))}
    colour = _refine(model, worlds, {w: ranks[init_sig[w]] for w in worlds}, agents)
    best = None

    def search(colour):
        nonlocal best
        cells = {}
        for w in worlds:
            cells.setdefault(colour[w], []).append(w)
        target = next((c for c in sorted(cells) if len(cells[c]) > 1), None)
        if target is None:
            order = sorted(worlds, key=colour.__getitem__)
            code = _encode(model, order, p.point, agents, ignore_turn)
            if best is None or code < best:
                best = code
            return
        tried = []
        for w in cells[target]:
            # swapping twins is an automorphism, so their subtrees give the same leaves
            if any(_twins(model, agents, w, t) for t in tried):
                continue
            tried.append(w)
            split = {v: (2 * colour[v] + (0 if v == w else 1)) if colour[v] == target
                     else 2 * colour[v] for v in worlds}
            # re-rank so colour values remain a canonical function of the cell structure
            r = {s: i for i, s in enumerate(sorted(set(split.values())))}
            search(_refine(model, worlds, {v: r[split[v]] for v in worlds}, agents))

    search(colour)
    return repr(best).encode()
