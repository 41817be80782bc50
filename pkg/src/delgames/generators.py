"""Random models, presentations and formulas for property tests and sampling."""

from __future__ import annotations

import random

from .dynamics import ActionModel, Presentation
from .formulas import (TRUE, And, Atom, Finally, Globally, Know, Next, Not, Or,
                       TurnIs, Until, size)
from .kripke import EpistemicModel


def random_partition(rng: random.Random, items, p_join=0.4):
    blocks = []
    for x in items:
        if blocks and rng.random() < p_join:
            rng.choice(blocks).append(x)
        else:
            blocks.append([x])
    return blocks


def random_model(rng, n_worlds, atoms, agents, turn=None, p_join=0.4) -> EpistemicModel:
    worlds = [f"w{i}" for i in range(n_worlds)]
    valuation = {w: {q for q in atoms if rng.random() < 0.5} for w in worlds}
    owner = turn if turn is not None else rng.choice(list(agents))
    relations = {a: random_partition(rng, worlds, p_join) for a in agents}
    return EpistemicModel(worlds, relations, valuation, {w: owner for w in worlds}, agents)


def random_prop(rng, atoms, depth=2):
    if depth == 0 or rng.random() < 0.35:
        r = rng.random()
        if r < 0.1:
            return TRUE
        if r < 0.15:
            return Not(TRUE)
        return Atom(rng.choice(atoms))
    k = rng.random()
    if k < 0.3:
        return Not(random_prop(rng, atoms, depth - 1))
    if k < 0.65:
        return Or(random_prop(rng, atoms, depth - 1), random_prop(rng, atoms, depth - 1))
    return And(random_prop(rng, atoms, depth - 1), random_prop(rng, atoms, depth - 1))


def random_el(rng, atoms, agents, depth=2, turn_atoms=False):
    if depth == 0 or rng.random() < 0.3:
        if turn_atoms and rng.random() < 0.1:
            return TurnIs(rng.choice(list(agents)))
        return Atom(rng.choice(atoms)) if rng.random() > 0.05 else TRUE
    k = rng.random()
    if k < 0.25:
        return Not(random_el(rng, atoms, agents, depth - 1, turn_atoms))
    if k < 0.5:
        return Or(random_el(rng, atoms, agents, depth - 1, turn_atoms),
                  random_el(rng, atoms, agents, depth - 1, turn_atoms))
    if k < 0.65:
        return And(random_el(rng, atoms, agents, depth - 1, turn_atoms),
                   random_el(rng, atoms, agents, depth - 1, turn_atoms))
    return Know(rng.choice(list(agents)), random_el(rng, atoms, agents, depth - 1, turn_atoms))


def random_fragment(rng, atoms, agents, max_size=8):
    """Formula without X and without temporal operators under K."""
    while True:
        phi = _fragment(rng, atoms, agents, 3)
        if size(phi) <= max_size:
            return phi


def _fragment(rng, atoms, agents, depth):
    if depth == 0 or rng.random() < 0.25:
        return random_el(rng, atoms, agents, 1)
    k = rng.random()
    if k < 0.2:
        return Finally(_fragment(rng, atoms, agents, depth - 1))
    if k < 0.35:
        return Globally(_fragment(rng, atoms, agents, depth - 1))
    if k < 0.55:
        return Until(_fragment(rng, atoms, agents, depth - 1), _fragment(rng, atoms, agents, depth - 1))
    if k < 0.7:
        return Not(_fragment(rng, atoms, agents, depth - 1))
    if k < 0.85:
        return Or(_fragment(rng, atoms, agents, depth - 1), _fragment(rng, atoms, agents, depth - 1))
    return And(_fragment(rng, atoms, agents, depth - 1), _fragment(rng, atoms, agents, depth - 1))


def random_objective(rng, atoms, agents, max_size=8):
    """Fragment formula with a temporal operator at the top, over EL bodies."""
    while True:
        body = random_el(rng, atoms, agents, 2)
        k = rng.random()
        if k < 0.35:
            phi = Finally(body)
        elif k < 0.6:
            phi = Globally(body)
        elif k < 0.8:
            phi = Until(random_el(rng, atoms, agents, 1), body)
        elif k < 0.9:
            phi = Finally(And(body, Finally(random_el(rng, atoms, agents, 1))))
        else:
            phi = Or(Finally(body), Globally(random_el(rng, atoms, agents, 1)))
        if size(phi) <= max_size:
            return phi


def random_announcement_objective(rng, p, max_size=8):
    """Objective about knowledge of something some agent can announce, else ``random_objective``."""
    says = [e for e in p.actions.events if e.startswith("say")]
    atoms = sorted(p.atoms()) or ["p0"]
    for _ in range(20):
        if not says:
            break
        pre = p.actions.pre[rng.choice(says)]
        chi = pre.sub.right.sub  # pre is turn=a & chi, stored as !(!turn=a | !chi)
        body = Know(rng.choice(p.agents), chi)
        k = rng.random()
        if k < 0.4:
            phi = Finally(body)
        elif k < 0.8:
            phi = Globally(Not(body))
        else:
            phi = Until(random_el(rng, atoms, p.agents, 0), body)
        if size(phi) <= max_size:
            return phi
    return random_objective(rng, atoms, p.agents, max_size)


def random_ltlk(rng, atoms, agents, depth=3):
    """Unrestricted LTLK, including X and temporal operators under K."""
    if depth == 0 or rng.random() < 0.25:
        return Atom(rng.choice(atoms)) if rng.random() > 0.1 else TurnIs(rng.choice(list(agents)))
    k = rng.random()
    sub = lambda: random_ltlk(rng, atoms, agents, depth - 1)
    if k < 0.15:
        return Not(sub())
    if k < 0.3:
        return Or(sub(), sub())
    if k < 0.45:
        return Next(sub())
    if k < 0.6:
        return Until(sub(), sub())
    if k < 0.7:
        return Finally(sub())
    if k < 0.8:
        return Globally(sub())
    return Know(rng.choice(list(agents)), sub())


def _agents(n):
    return tuple("abcdefgh"[:n])


def _event_relations(rng, events, turn_after, agents, p_join):
    """Random event partitions that never mix events with different next turns."""
    rel = {}
    for a in agents:
        blocks = []
        for t in sorted(set(turn_after.values())):
            group = [e for e in events if turn_after[e] == t]
            blocks.extend(random_partition(rng, group, p_join))
        rel[a] = blocks
    return rel


def random_prop_presentation(rng, max_worlds=4, max_events=4, max_atoms=3, n_agents=2,
                             p_join=0.3) -> Presentation:
    agents = _agents(n_agents)
    atoms = [f"p{i}" for i in range(rng.randint(1, max_atoms))]
    m = random_model(rng, rng.randint(1, max_worlds), atoms, agents, turn=agents[0])
    events = [f"e{i}" for i in range(rng.randint(1, max_events))]
    turn_after = {e: rng.choice(agents) for e in events}
    pre = {e: random_prop(rng, atoms) for e in events}
    pre[events[0]] = TRUE
    post = {e: {q: random_prop(rng, atoms, 1) for q in atoms if rng.random() < 0.4}
            for e in events}
    rel = _event_relations(rng, events, turn_after, agents, p_join)
    act = ActionModel(events, rel, pre, post, turn_after, agents)
    init = [w for w in m.worlds if rng.random() < 0.5] or [m.worlds[0]]
    return Presentation(m, act, init, {agents[0]}, agents)


def random_public_presentation(rng, max_worlds=3, max_events=3, max_atoms=2, n_agents=2,
                               singleton_init=False, team=None) -> Presentation:
    agents = _agents(n_agents)
    atoms = [f"p{i}" for i in range(rng.randint(1, max_atoms))]
    m = random_model(rng, rng.randint(1, max_worlds), atoms, agents, turn=agents[0])
    events = [f"e{i}" for i in range(rng.randint(1, max_events))]
    turn_after = {e: rng.choice(agents) for e in events}
    pre = {e: random_el(rng, atoms, agents) for e in events}
    pre[events[0]] = TRUE
    post = {e: {q: random_prop(rng, atoms, 1) for q in atoms if rng.random() < 0.3}
            for e in events}
    act = ActionModel(events, {}, pre, post, turn_after, agents)
    if singleton_init:
        init = [rng.choice(m.worlds)]
    else:
        init = [w for w in m.worlds if rng.random() < 0.5] or [m.worlds[0]]
    return Presentation(m, act, init, {agents[0]} if team is None else team, agents)


def random_announcement_presentation(rng, max_worlds=3, n_agents=2, max_announcements=3,
                                     max_atoms=2, team=None, p_join=0.7,
                                     min_worlds=1) -> Presentation:
    """Round-robin announcement game; every agent can always pass."""
    agents = _agents(n_agents)
    atoms = [f"p{i}" for i in range(rng.randint(1, max_atoms))]
    m = random_model(rng, rng.randint(min_worlds, max_worlds), atoms, agents, turn=agents[0],
                     p_join=p_join)
    nxt = {a: agents[(i + 1) % len(agents)] for i, a in enumerate(agents)}
    events, pre, turn_after = [], {}, {}
    for a in agents:
        e = f"pass_{a}"
        events.append(e)
        pre[e] = TurnIs(a)
        turn_after[e] = nxt[a]
    for i in range(rng.randint(1, max_announcements)):
        a = rng.choice(agents)
        e = f"say{i}_{a}"
        events.append(e)
        chi = random_el(rng, atoms, agents, rng.choice((0, 1)))
        if rng.random() < 0.6:
            chi = Know(a, chi)
        pre[e] = And(TurnIs(a), chi)
        turn_after[e] = nxt[a]
    act = ActionModel(events, {}, pre, {}, turn_after, agents)
    if team is None:
        team = rng.choice([{agents[0]}, {agents[-1]}, set(agents)])
    return Presentation(m, act, [rng.choice(m.worlds)], team, agents)
