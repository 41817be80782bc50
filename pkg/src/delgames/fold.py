"""Finite arenas equivalent to the infinite arena of a presentation."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from .arena import GameArena, LazyArena
from .dynamics import CheckReport, Presentation, PresentationError, classify_actions
from .formulas import Atom, Fragment, Not, Or, Top, TurnIs, classify
from .kripke import ModelError, canonical_form


class InvariantError(RuntimeError):
    """An internal guarantee was broken; indicates a bug, not bad input."""


@dataclass
class FoldedArena:
    arena: GameArena
    provenance: dict
    bound: int
    kind: str
    details: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.arena)


def eval_prop(phi, valuation, turn):
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Atom):
        return phi.name in valuation
    if isinstance(phi, TurnIs):
        return phi.agent == turn
    if isinstance(phi, Not):
        return not eval_prop(phi.sub, valuation, turn)
    if isinstance(phi, Or):
        return eval_prop(phi.left, valuation, turn) or eval_prop(phi.right, valuation, turn)
    raise ModelError(f"not a propositional formula: {phi}")


def prop_bound(p: Presentation) -> int:
    return len(p.model.worlds) + len(p.actions.events) * 2 ** len(p.atoms())


def fold_propositional(p: Presentation) -> FoldedArena:
    """Positions: the worlds of the model, then (event, valuation, turn) triples."""
    types = classify_actions(p.actions)
    if not types.propositional:
        bad = next(e for e in p.actions.events
                   if not _is_prop_event(p.actions, e))
        raise PresentationError(f"event {bad!r} has a non-propositional pre- or postcondition")
    m, act = p.model, p.actions
    positions, trans, turn, valuation, provenance = [], {}, {}, {}, {}
    for w in m.worlds:
        v = ("world", w)
        positions.append(v)
        turn[v] = m.turn[w]
        valuation[v] = m.valuation[w]
        provenance[v] = w
    queue = list(positions)
    seen = set(positions)
    while queue:
        v = queue.pop(0)
        nu, t = valuation[v], turn[v]
        for e in act.events:
            if not eval_prop(act.pre[e], nu, t):
                continue
            post = act.post[e]
            new = frozenset({q for q in nu if q not in post}
                            | {q for q, f in post.items() if eval_prop(f, nu, t)})
            x = ("event", e, tuple(sorted(new)), act.turn_after[e])
            trans[(v, e)] = x
            if x not in seen:
                seen.add(x)
                positions.append(x)
                turn[x] = act.turn_after[e]
                valuation[x] = new
                provenance[x] = (e, new, act.turn_after[e])
                queue.append(x)
    relations = {}
    for a in p.agents:
        groups = {}
        for v in positions:
            if v[0] == "world":
                k = ("world", m.class_index(a, v[1]) if a in m.agents else v[1])
            else:
                k = ("event", act.class_index(a, v[1]) if a in act.agents else v[1])
            groups.setdefault(k, []).append(v)
        relations[a] = list(groups.values())
    arena = GameArena(positions, [("world", w) for w in p.init], trans, turn, valuation,
                      relations, p.agents, starts=[("world", w) for w in m.worlds])
    bound = prop_bound(p)
    if len(positions) > bound:
        raise InvariantError(f"propositional fold has {len(positions)} > {bound} positions")
    return FoldedArena(arena, provenance, bound, "prop")


def _is_prop_event(act, e):
    return (classify(act.pre[e]) == Fragment.PROP
            and all(classify(f) == Fragment.PROP for f in act.post[e].values()))


def public_bound(p: Presentation) -> int:
    """m(2^p+1)^m, counting each possible turn owner as one extra atom."""
    m = len(p.model.worlds)
    n_atoms = len(p.atoms()) + len(p.turn_values())
    return m * (2 ** n_atoms + 1) ** m


def _origin_key(pm):
    model, h = pm.model, pm.point
    return (h[0], frozenset((x[0], model.valuation[x], model.turn[x]) for x in model.worlds))


def _pointed_key(pm):
    return canonical_form(pm)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def quotient_public(p: Presentation, key="origin", exact=True) -> FoldedArena:
    """Merge positions of the induced arena whose attached models coincide.

    ``key="origin"`` compares attached models world by world through the
    original world each history starts from; ``key="pointed"`` compares them
    up to pointed isomorphism. With ``exact=True`` a class also records the
    last event, which keeps distinct actions apart and makes the unfolding
    of the result isomorphic to that of the induced arena.
    """
    types = classify_actions(p.actions)
    bad = [e for e, ok in types.public.items() if not ok]
    if bad:
        raise PresentationError(f"event {bad[0]!r} is not public")
    if key not in ("origin", "pointed"):
        raise ValueError(f"unknown key kind {key!r}")
    keyfun = _origin_key if key == "origin" else _pointed_key
    lazy = LazyArena(p)
    bound = public_bound(p)
    cap = bound * (len(p.actions.events) + 1) + len(p.model.worlds) if exact else bound
    classes, reps, queue = {}, [], []

    def class_of(h):
        k = keyfun(lazy.attached_model(h))
        if exact:
            k = (k, h[-1] if len(h) > 1 else None)
        c = classes.get(k)
        if c is None:
            c = len(reps)
            if c >= cap:
                raise InvariantError(f"public quotient exceeded {cap} classes")
            classes[k] = c
            reps.append((h, k))
            queue.append(c)
        return c

    roots = [class_of(r) for r in lazy.roots("all")]
    init = [class_of(r) for r in lazy.roots("init")]
    trans = {}
    uf = {a: _UnionFind() for a in p.agents}
    i = 0
    while i < len(queue):
        c = queue[i]
        i += 1
        h = reps[c][0]
        pm = lazy.attached_model(h)
        for a in p.agents:
            uf[a].add(c)
            for x in pm.model.worlds:
                if x != h and lazy.related(a, h, x):
                    d = class_of(x)
                    uf[a].add(d)
                    uf[a].union(c, d)
        for e, x in lazy.moves(h):
            trans[(c, e)] = class_of(x)
    positions = list(range(len(reps)))
    relations = {}
    for a in p.agents:
        groups = {}
        for c in positions:
            uf[a].add(c)
            groups.setdefault(uf[a].find(c), []).append(c)
        relations[a] = list(groups.values())
    models = {c: lazy.attached_model(reps[c][0]) for c in positions}
    arena = GameArena(positions, init, trans,
                      {c: lazy.turn_of(reps[c][0]) for c in positions},
                      {c: lazy.label(reps[c][0]) for c in positions},
                      relations, p.agents, starts=roots, models=models, k_local=True)
    provenance = {c: reps[c] for c in positions}
    n_keys = len({k[0] if exact else k for _, k in reps})
    return FoldedArena(arena, provenance, bound, "public",
                       {"key": key, "exact": exact, "distinct_models": n_keys})


# ------------------------------------------------------------ equivalence

@dataclass
class EquivalenceResult:
    ok: bool
    witness: object = None
    detail: str = ""

    def __bool__(self):
        return self.ok


class _Shape:
    """Relation-free shape of unfolding subtrees, interned to integers."""

    def __init__(self, arena):
        self.arena = arena
        self.memo = {}
        self.table = {}

    def children(self, h):
        groups = {}
        for c, x in self.arena.moves(h[-1]):
            groups.setdefault(x, []).append(c)
        return [(tuple(sorted(acts, key=repr)), h + (x,)) for x, acts in groups.items()]

    def of(self, v, depth):
        key = (v, depth)
        if key in self.memo:
            return self.memo[key]
        a = self.arena
        kids = ()
        if depth > 0:
            groups = {}
            for c, x in a.moves(v):
                groups.setdefault(x, []).append(c)
            kids = tuple(sorted(((tuple(sorted(acts, key=repr)), self.of(x, depth - 1))
                                 for x, acts in groups.items()), key=repr))
        sig = (tuple(sorted(a.label(v))), str(a.turn_of(v)), kids)
        out = self.table.setdefault(sig, len(self.table))
        self.memo[key] = out
        return out


def _match_trees(s1, s2, r1, r2, depth):
    """Pair up the nodes of two unfolding trees with equal shapes."""
    pairs = [((r1,), (r2,))]
    frontier = [((r1,), (r2,))]
    for _ in range(depth):
        nxt = []
        for h1, h2 in frontier:
            k2 = {acts: g for acts, g in s2.children(h2)}
            for acts, g1 in s1.children(h1):
                g2 = k2[acts]
                nxt.append((g1, g2))
        pairs.extend(nxt)
        frontier = nxt
    return pairs


def _relation_witness(a1, a2, pairs, agents):
    for a in agents:
        fwd, bwd = {}, {}
        for h1, h2 in pairs:
            c1 = tuple(a1.cls(a, v) for v in h1)
            c2 = tuple(a2.cls(a, v) for v in h2)
            if fwd.setdefault(c1, (c2, h1, h2))[0] != c2:
                return (a, fwd[c1][1], h1, "related in the first arena only")
            if bwd.setdefault(c2, (c1, h1, h2))[0] != c1:
                return (a, bwd[c2][1], h1, "related in the second arena only")
    return None


def check_equivalence(a1, a2, depth, scope="all") -> EquivalenceResult:
    """Whether the unfoldings of two arenas to ``depth`` moves are isomorphic.

    Trees are matched by action labels, so only root bijections are searched.
    """
    agents = tuple(sorted(set(a1.agents) | set(a2.agents)))
    if set(a1.agents) != set(a2.agents):
        return EquivalenceResult(False, None, f"agent sets differ: {a1.agents} vs {a2.agents}")
    roots1, roots2 = list(a1.roots(scope)), list(a2.roots(scope))
    if len(roots1) != len(roots2):
        return EquivalenceResult(False, (roots1, roots2),
                                 f"{len(roots1)} vs {len(roots2)} root positions")
    s1, s2 = _Shape(a1), _Shape(a2)
    s2.table = s1.table
    init1, init2 = set(a1.initial()), set(a2.initial())
    sig1 = {r: (s1.of(r, depth), r in init1) for r in roots1}
    sig2 = {r: (s2.of(r, depth), r in init2) for r in roots2}
    cands = {r: [q for q in roots2 if sig2[q] == sig1[r]] for r in roots1}
    for r in roots1:
        if not cands[r]:
            return EquivalenceResult(False, ((r,), None),
                                     f"root {r!r} has no counterpart with the same unfolding shape")
    tree_pairs = {}
    last = None
    for image in _bijections(roots1, cands):
        pairs = []
        for r, q in zip(roots1, image):
            if (r, q) not in tree_pairs:
                tree_pairs[(r, q)] = _match_trees(s1, s2, r, q, depth)
            pairs.extend(tree_pairs[(r, q)])
        w = _relation_witness(a1, a2, pairs, agents)
        if w is None:
            return EquivalenceResult(True)
        last = w
    a, h1, g1, why = last
    return EquivalenceResult(False, (h1, g1), f"agent {a}: histories {why}")


def _bijections(roots, cands):
    used = set()
    out = []

    def rec(i):
        if i == len(roots):
            yield tuple(out)
            return
        for q in cands[roots[i]]:
            if q in used:
                continue
            used.add(q)
            out.append(q)
            yield from rec(i + 1)
            out.pop()
            used.discard(q)

    yield from rec(0)


# ------------------------------------------------------------ hierarchy

def _finer(rel_blocks, coarse_cls):
    return all(len({coarse_cls(x) for x in b}) == 1 for b in rel_blocks)


def _leq(p: Presentation, a, b):
    """Agent a's indistinguishability is contained in agent b's (model and actions)."""
    m, act = p.model, p.actions

    def mblocks(x):
        return m.blocks(x) if x in m.agents else [frozenset([w]) for w in m.worlds]

    def mcls(x):
        return (lambda w: m.class_index(x, w)) if x in m.agents else (lambda w: w)

    def eblocks(x):
        return act.blocks(x) if x in act.agents else [frozenset([e]) for e in act.events]

    def ecls(x):
        return (lambda e: act.class_index(x, e)) if x in act.agents else (lambda e: e)

    return _finer(mblocks(a), mcls(b)) and _finer(eblocks(a), ecls(b))


def check_hierarchical(p: Presentation):
    """An ordering of the team in which relations grow along the order, or None."""
    team = sorted(p.team)
    if not team:
        return []

    def weight(a):
        m, act = p.model, p.actions
        mw = sum(len(b) ** 2 for b in m.blocks(a)) if a in m.agents else len(m.worlds)
        ew = sum(len(b) ** 2 for b in act.blocks(a)) if a in act.agents else len(act.events)
        return (mw, ew, a)

    order = sorted(team, key=weight)
    if all(_leq(p, x, y) for x, y in zip(order, order[1:])):
        return order
    return None


def check_hierarchical_bruteforce(p: Presentation):
    for order in permutations(sorted(p.team)):
        if all(_leq(p, x, y) for x, y in zip(order, order[1:])):
            return list(order)
    return None


def check_h3_exact(folded: FoldedArena) -> CheckReport:
    """H3 and action availability on a finite equivalent arena."""
    problems = folded.arena.problems()
    if problems:
        return CheckReport("H3", False, problems[0], problems)
    return CheckReport("H3", True, "exact on the folded arena")
