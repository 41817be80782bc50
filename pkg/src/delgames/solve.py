"""Strategy synthesis for DEL games.

* ``solve_reach_safe``: attractor / safety fixpoints on finite public arenas.
* ``solve_announcement``: depth-bounded min-max search for announcement games.
* ``eagerize``: rewrite a strategy so informative announcements happen early.
* ``oracle_solve``: bounded brute force over uniform distributed strategies.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from math import lcm

from .arena import (LOSE, WIN, BoundedEvaluator, GameArena, LassoPlay, Unknown,
                    Verdict, arena_public, eval_ltlk_lasso)
from .dynamics import Presentation, classify_actions
from .formulas import (Atom, Formula, Fragment, Know, Not, Or, Top, Until, classify,
                       has_turn_atoms)
from .kripke import (EpistemicModel, PointedModel, canonical_form, component_worlds,
                     eval_el, restrict)


class PreconditionError(ValueError):
    """The chosen engine does not apply to this input."""


class StrategyError(LookupError):
    pass


class StrategyTree:
    """Per-agent decisions on histories.

    ``decisions[agent][history]`` is an action. ``rule(agent, history)``, if
    given, answers histories without an explicit entry.
    """

    def __init__(self, decisions=None, rule=None, note=""):
        self.decisions = {a: dict(d) for a, d in (decisions or {}).items()}
        self.rule = rule
        self.note = note

    def action(self, agent, history):
        d = self.decisions.get(agent, {})
        if history in d:
            return d[history]
        if self.rule is not None:
            return self.rule(agent, history)
        raise StrategyError(f"no decision for agent {agent} at {history!r}")

    def set(self, agent, history, action):
        self.decisions.setdefault(agent, {})[history] = action

    def __len__(self):
        return sum(len(d) for d in self.decisions.values())

    def render(self, show=repr):
        lines = []
        for a in sorted(self.decisions):
            lines.append(f"agent {a}:")
            for h, c in sorted(self.decisions[a].items(), key=lambda kv: (len(kv[0]), repr(kv[0]))):
                lines.append("  " * len(h) + f"{show(h)} -> {c}")
        if self.note:
            lines.append(self.note)
        return "\n".join(lines)


@dataclass
class SolveResult:
    verdict: Verdict
    strategy: StrategyTree | None = None
    certificate: object = None
    stats: dict = field(default_factory=dict)

    def report(self, show=repr):
        lines = [f"verdict: {self.verdict}"]
        for k in sorted(self.stats):
            lines.append(f"{k}: {self.stats[k]}")
        if self.strategy is not None:
            lines.append("strategy:")
            lines.extend("  " + x for x in self.strategy.render(show).splitlines())
        if self.certificate is not None:
            lines.append("certificate:")
            lines.extend("  " + x for x in _render_certificate(self.certificate, show))
        return "\n".join(lines) + "\n"


@dataclass
class Certificate:
    counter: StrategyTree | None
    play: LassoPlay | None
    note: str = ""


def _render_certificate(cert, show):
    if not isinstance(cert, Certificate):
        return [str(cert)]
    out = []
    if cert.note:
        out.append(cert.note)
    if cert.play is not None:
        out.append("play: " + " ".join(show(v) for v in cert.play.stem)
                   + " (" + " ".join(show(v) for v in cert.play.loop) + ")^w")
    if cert.counter is not None:
        out.extend(cert.counter.render(show).splitlines())
    return out


def _order(actions):
    return sorted(actions, key=lambda c: (str(c), repr(c)))


# ------------------------------------------------------------ attractors

def split_objective(phi: Formula):
    """Return ("F", body) or ("G", body) for reachability / safety objectives."""
    if isinstance(phi, Until) and isinstance(phi.left, Top):
        kind, body = "F", phi.right
    elif (isinstance(phi, Not) and isinstance(phi.sub, Until) and isinstance(phi.sub.left, Top)
          and isinstance(phi.sub.right, Not)):
        kind, body = "G", phi.sub.right.sub
    else:
        raise PreconditionError(f"objective is not of the form F phi or G phi: {phi}")
    if classify(body) > Fragment.EL:
        raise PreconditionError(f"objective body is not epistemic: {body}")
    return kind, body


def _holds(arena, v, body):
    if classify(body) == Fragment.PROP:
        from .fold import eval_prop
        return eval_prop(body, arena.label(v), arena.turn_of(v))
    pm = arena.attached_model(v)
    if pm is None:
        raise PreconditionError(f"position {v!r} has no attached model to evaluate {body}")
    return eval_el(pm.model, pm.point, body)


def solve_reach_safe(arena: GameArena, objective: Formula, team, init=None,
                     perfect_info=False) -> SolveResult:
    """Exact solving of F phi / G phi (phi epistemic) on a finite public arena."""
    kind, body = split_objective(objective)
    pub = arena_public(arena)
    if not pub:
        raise PreconditionError(f"arena does not have only public actions: {pub.detail}")
    init = tuple(arena.init if init is None else init)
    if len(init) != 1 and not perfect_info:
        raise PreconditionError("several initial positions: uniformity across them is not "
                                "handled; pass perfect_info=True to ignore it")
    team = frozenset(team)
    goal = {v for v in arena.positions if _holds(arena, v, body)}
    positional = {}
    if kind == "F":
        win = set(goal)
        changed = True
        while changed:
            changed = False
            for v in arena.positions:
                if v in win or not arena.moves(v):
                    continue
                if arena.turn_of(v) in team:
                    good = [c for c, x in arena.moves(v) if x in win]
                    if good:
                        positional[v] = _order(good)[0]
                        win.add(v)
                        changed = True
                elif all(x in win for _, x in arena.moves(v)):
                    win.add(v)
                    changed = True
        for v in goal:
            if arena.turn_of(v) in team and arena.moves(v):
                positional.setdefault(v, _order(arena.enabled(v))[0])
    else:
        win = set(goal)
        changed = True
        while changed:
            changed = False
            for v in list(win):
                moves = arena.moves(v)
                inside = [c for c, x in moves if x in win]
                if arena.turn_of(v) in team:
                    ok = bool(inside)
                else:
                    ok = bool(moves) and len(inside) == len(moves)
                if not ok:
                    win.discard(v)
                    changed = True
        for v in win:
            if arena.turn_of(v) in team:
                positional[v] = _order([c for c, x in arena.moves(v) if x in win])[0]
    stats = {"positions": len(arena.positions), "winning_region": len(win), "objective": kind}
    if all(v in win for v in init):
        tree = _lift_positional(arena, positional)
        return SolveResult(WIN, tree, None, stats)
    counter = _counter_positional(arena, win, team, kind, goal)
    start = next(v for v in init if v not in win)
    play = _play_lasso(arena, start, lambda v: (counter.get(v) if arena.turn_of(v) not in team
                                                else (_order(arena.enabled(v)) or [None])[0]))
    cert = Certificate(_lift_positional(arena, counter), play, f"losing from {start!r}")
    return SolveResult(LOSE, None, cert, stats)


def _lift_positional(arena, positional):
    tree = StrategyTree(note="positional: decisions depend on the last position only")
    for v, c in positional.items():
        tree.set(arena.turn_of(v), (v,), c)
    tree.rule = lambda agent, h: positional[h[-1]]
    return tree


def _counter_positional(arena, win, team, kind, goal):
    """Opponent moves keeping the play out of the team's winning region."""
    counter = {}
    if kind == "F":
        for v in arena.positions:
            if v not in win and arena.turn_of(v) not in team:
                bad = [c for c, x in arena.moves(v) if x not in win]
                if bad:
                    counter[v] = _order(bad)[0]
        return counter
    # safety: opponents attract the play to a position violating the body
    reached = set(v for v in arena.positions if v not in goal)
    for v in reached:
        if arena.turn_of(v) not in team and arena.moves(v):
            counter[v] = _order(arena.enabled(v))[0]
    changed = True
    while changed:
        changed = False
        for v in arena.positions:
            if v in reached or not arena.moves(v):
                continue
            if arena.turn_of(v) not in team:
                good = [c for c, x in arena.moves(v) if x in reached]
                if good:
                    counter[v] = _order(good)[0]
                    reached.add(v)
                    changed = True
            elif all(x in reached for _, x in arena.moves(v)):
                reached.add(v)
                changed = True
    return counter


def _play_lasso(arena, start, choose):
    seq, index = [], {}
    v = start
    while v not in index:
        index[v] = len(seq)
        seq.append(v)
        c = choose(v)
        if c is None:
            return LassoPlay(seq[:-1], seq[-1:])
        v = arena.step(v, c)
    k = index[v]
    return LassoPlay(seq[:k], seq[k:])


# ------------------------------------------------------------ announcements

def informative(s: PointedModel, e, actions) -> bool:
    """Whether announcing ``e`` at ``s`` removes some world of ``s``."""
    types = classify_actions(actions)
    if not types.announcement[e]:
        raise PreconditionError(f"event {e!r} is not an announcement")
    pre = actions.pre[e]
    if not eval_el(s.model, s.point, pre):
        raise PreconditionError(f"event {e!r} is not executable at {s.point!r}")
    return len(s.model.satisfying(pre)) < len(s.model.worlds)


@dataclass(frozen=True)
class AnnouncementState:
    worlds: frozenset
    point: object
    turn: str

    def __len__(self):
        return len(self.worlds)

    def __repr__(self):
        return "{" + ",".join(sorted(map(str, self.worlds))) + f"}}@{self.point}/{self.turn}"


class AnnouncementGame:
    """States of a public-announcement game: submodels of the initial model."""

    def __init__(self, p: Presentation):
        types = classify_actions(p.actions)
        bad = [e for e, ok in types.announcement.items() if not ok]
        if bad:
            raise PreconditionError(f"event {bad[0]!r} is not a public announcement")
        if len(p.init) != 1:
            raise PreconditionError(f"needs a unique initial world, got {len(p.init)}")
        self.presentation = p
        self.model = p.model
        self.actions = p.actions
        self.team = p.team
        self.agents = p.agents
        (w0,) = p.init
        self.root = AnnouncementState(frozenset(component_worlds(p.model, w0)), w0,
                                      p.model.turn[w0])
        self._models = {}
        self._moves = {}
        self.events = _order(p.actions.events)
        self.cycle = self._round_robin()

    def pointed(self, s: AnnouncementState) -> PointedModel:
        m = self._models.get(s)
        if m is None:
            base = restrict(self.model, s.worlds)
            m = EpistemicModel(base.worlds, {a: base.blocks(a) for a in base.agents},
                               base.valuation, {w: s.turn for w in base.worlds}, self.agents)
            self._models[s] = m
        return PointedModel(m, s.point)

    def moves(self, s):
        """``[(event, next_state, informative)]`` in event order."""
        hit = self._moves.get(s)
        if hit is not None:
            return hit
        pm = self.pointed(s)
        out = []
        for e in self.events:
            sat = pm.model.satisfying(self.actions.pre[e])
            if s.point not in sat:
                continue
            if len(sat) == len(s.worlds):
                nxt = AnnouncementState(s.worlds, s.point, self.actions.turn_after[e])
            else:
                sub = restrict(pm.model, sat)
                nxt = AnnouncementState(frozenset(component_worlds(sub, s.point)), s.point,
                                        self.actions.turn_after[e])
            out.append((e, nxt, len(sat) < len(s.worlds)))
        self._moves[s] = out
        return out

    def step(self, s, e):
        for f, x, _ in self.moves(s):
            if f == e:
                return x
        raise StrategyError(f"event {e!r} is not executable at {s!r}")

    def is_informative(self, s, e):
        for f, _, info in self.moves(s):
            if f == e:
                return info
        raise StrategyError(f"event {e!r} is not executable at {s!r}")

    def _round_robin(self):
        succ, seen, stack = {}, {self.root}, [self.root]
        while stack:
            s = stack.pop()
            for e, x, _ in self.moves(s):
                prev = succ.setdefault(s.turn, x.turn)
                if prev != x.turn:
                    raise PreconditionError(
                        f"turn structure is not round-robin: after {s.turn} comes "
                        f"both {prev} and {x.turn}")
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
        cycle = [self.root.turn]
        while len(cycle) <= len(self.agents):
            nxt = succ.get(cycle[-1])
            if nxt is None:
                break
            if nxt == cycle[0]:
                if sorted(cycle) == sorted(self.agents):
                    return tuple(cycle)
                break
            if nxt in cycle:
                break
            cycle.append(nxt)
        raise PreconditionError(f"turn structure is not a round-robin cycle over "
                                f"{list(self.agents)} (observed order {cycle})")

    def lasso(self, path):
        return LassoPlay([self.pointed(s) for s in path[:-1]], [self.pointed(path[-1])])


def _check_fragment(phi):
    if classify(phi) > Fragment.LTLK_NoX_NoKTemporal:
        raise PreconditionError(f"objective uses X or a temporal operator under K: {phi}")
    if has_turn_atoms(phi):
        raise PreconditionError("objective mentions turn=..; such formulas are not "
                                "invariant under stuttering")


def prefix_value(pms, phi):
    """Kleene value of a fragment formula on a finite sequence of pointed models.

    A definite answer holds for every infinite continuation of the sequence.
    """
    memo = {}

    def val(i, f):
        if i >= len(pms):
            return None
        key = (i, f)
        if key in memo:
            return memo[key]
        pm = pms[i]
        if isinstance(f, Top):
            out = True
        elif isinstance(f, Atom):
            out = f.name in pm.model.valuation[pm.point]
        elif isinstance(f, Not):
            out = _kleene_not(val(i, f.sub))
        elif isinstance(f, Or):
            out = _kleene_or(val(i, f.left), val(i, f.right))
        elif isinstance(f, Know):
            out = eval_el(pm.model, pm.point, f)
        elif isinstance(f, Until):
            out = None
            for k in range(len(pms) - 1, i - 1, -1):
                out = _kleene_or(val(k, f.right), _kleene_and(val(k, f.left), out))
        else:
            raise PreconditionError(f"unsupported operator {f!r}")
        memo[key] = out
        return out

    return val(0, phi)


def solve_announcement(p: Presentation, phi: Formula, strict=False) -> SolveResult:
    """Min-max search over announcement sequences of bounded length.

    A node is a leaf at depth |Ag|*|M|, when no event is executable, or
    (unless ``strict``) after |Ag| consecutive non-informative announcements.
    A leaf stands for the play that stays in its state forever.
    """
    game = AnnouncementGame(p)
    _check_fragment(phi)
    n_ag = len(game.agents)
    limit = n_ag * len(p.model.worlds)
    team = game.team
    memo, leaf_memo = {}, {}
    stats = {"nodes": 0, "leaves": 0, "depth_bound": limit}

    def destuttered(path):
        out = []
        for s in path:
            if not out or out[-1] != s.worlds:
                out.append(s.worlds)
        return tuple(out)

    def leaf_value(path):
        key = destuttered(path)
        if key not in leaf_memo:
            stats["leaves"] += 1
            leaf_memo[key] = eval_ltlk_lasso(None, game.lasso(path), phi)
        return leaf_memo[key]

    def is_leaf(path, silent):
        return (len(path) - 1 >= limit or not game.moves(path[-1])
                or (not strict and silent >= n_ag))

    decided = {}

    def early(path):
        """Objective value fixed by the path so far, or None."""
        key = destuttered(path)
        if key not in decided:
            states = [path[0]] + [y for x, y in zip(path, path[1:]) if y.worlds != x.worlds]
            decided[key] = prefix_value([game.pointed(x) for x in states], phi)
        return decided[key]

    def value(path, silent):
        s = path[-1]
        key = (destuttered(path), s.turn, silent, len(path))
        if key in memo:
            return memo[key]
        stats["nodes"] += 1
        known = early(path)
        if known is not None:
            stats["leaves"] += 1
            out = known
        elif is_leaf(path, silent):
            out = leaf_value(path)
        else:
            mine = s.turn in team
            out = not mine
            for e, x, info in game.moves(s):
                v = value(path + [x], 0 if info else silent + 1)
                if v == mine:
                    out = mine
                    break
        memo[key] = out
        return out

    def stop(path, silent):
        return early(path) is not None or is_leaf(path, silent)

    root = [game.root]
    won = value(root, 0)
    stats["cycle"] = "->".join(game.cycle)
    if won:
        tree = StrategyTree(note="beyond a leaf: repeat a non-informative announcement")
        _extract(game, root, 0, value, stop, True, tree, n_ag)
        return SolveResult(WIN, tree, None, stats)
    counter = StrategyTree()
    _extract(game, root, 0, value, stop, False, counter, n_ag)
    path, silent = root, 0
    while not stop(path, silent):
        s = path[-1]
        e = (counter.action(s.turn, tuple(path)) if s.turn not in team
             else game.moves(s)[0][0])
        info = game.is_informative(s, e)
        path = path + [game.step(s, e)]
        silent = 0 if info else silent + 1
    cert = Certificate(counter, LassoPlay(path[:-1], path[-1:]),
                       "opponent choices refuting every team strategy")
    return SolveResult(LOSE, None, cert, stats)


def _extract(game, path, silent, value, is_leaf, for_team, tree, n_ag):
    """Record the choices that realise the min-max value for one side."""
    s = path[-1]
    h = tuple(path)
    if is_leaf(path, silent):
        if (s.turn in game.team) == for_team:
            stay = [e for e, _, info in game.moves(s) if not info]
            if stay:
                tree.set(s.turn, h, stay[0])
        return
    mine = (s.turn in game.team) == for_team
    moves = game.moves(s)
    if mine:
        target = for_team
        for e, x, info in moves:
            if value(path + [x], 0 if info else silent + 1) == target:
                tree.set(s.turn, h, e)
                _extract(game, path + [x], 0 if info else silent + 1, value, is_leaf,
                         for_team, tree, n_ag)
                return
    else:
        for e, x, info in moves:
            _extract(game, path + [x], 0 if info else silent + 1, value, is_leaf,
                     for_team, tree, n_ag)


# ------------------------------------------------------------ stuttering

def state_key(x):
    """Identity of a state for stuttering: pointed models up to isomorphism, turn ignored."""
    if isinstance(x, PointedModel):
        return canonical_form(x, ignore_turn=True)
    if isinstance(x, AnnouncementState):
        return (x.worlds, x.point)
    return x


def destutter(seq, key=state_key):
    out, last = [], object()
    for x in seq:
        k = key(x)
        if not out or k != last:
            out.append(x)
            last = k
    return out


def _destuttered_keys(play: LassoPlay, n, key):
    loop_keys = {key(x) for x in play.loop}
    reps = n + 2 if len(loop_keys) > 1 else 1
    seq = [key(x) for x in play.stem] + [key(x) for x in play.loop] * reps
    out = destutter(seq, key=lambda k: k)
    return out, len(loop_keys) == 1


def stuttering_equivalent(p1: LassoPlay, p2: LassoPlay, key=state_key) -> bool:
    n = len(p1) + len(p2) + lcm(len(p1.loop), len(p2.loop))
    w1, const1 = _destuttered_keys(p1, n, key)
    w2, const2 = _destuttered_keys(p2, n, key)
    if const1 or const2:
        return const1 == const2 and w1 == w2
    return w1[:n] == w2[:n]


# ------------------------------------------------------------ eager strategies

def _runs(history):
    """Maximal runs of states with the same world set: [(first index, length)]."""
    out = []
    for i, s in enumerate(history):
        if out and history[out[-1][0]].worlds == s.worlds:
            out[-1][1] += 1
        else:
            out.append([i, 1])
    return [tuple(r) for r in out]


def _stutter(game, g, s, n):
    """``g`` followed by ``n`` copies of the world set of ``s`` with round-robin turns."""
    out = list(g)
    cyc = game.cycle
    start = cyc.index(game.root.turn)
    for _ in range(n):
        turn = cyc[(start + len(out)) % len(cyc)]
        out.append(AnnouncementState(s.worlds, s.point, turn))
    return tuple(out)


def look_ahead(game, sigma: StrategyTree, history, agent, depth):
    """The look-ahead history used by the eager version of ``sigma`` for ``agent``.

    Runs of repeated states are replayed one by one; for each run the shortest
    stretch that follows ``sigma`` and ends with ``agent`` about to make an
    informative announcement is used, or the run's own length if there is none.
    Stretches are searched while the look-ahead is shorter than ``depth``; past
    that, every run keeps its own length.
    """
    g = ()
    for start, k in _runs(history):
        s = history[start]
        chosen = None
        for ell in range(1, depth - len(g) + 1):
            cand = _stutter(game, g, s, ell)
            if ell >= 2:
                prev = cand[:-1]
                owner = prev[-1].turn
                if owner in game.team:
                    e = sigma.action(owner, prev)
                    if game.is_informative(prev[-1], e):
                        break
                elif all(info for _, _, info in game.moves(prev[-1])):
                    break
            last = cand[-1]
            if last.turn == agent and game.moves(last):
                e = sigma.action(agent, cand)
                if game.is_informative(last, e):
                    chosen = ell
                    break
        g = _stutter(game, g, s, chosen if chosen is not None else k)
    return g


def eagerize(sigma: StrategyTree, p, depth) -> StrategyTree:
    """The eager strategy: each team agent plays what ``sigma`` plays at the look-ahead."""
    game = p if isinstance(p, AnnouncementGame) else AnnouncementGame(p)
    memo = {}

    def rule(agent, history):
        key = (agent, history)
        if key not in memo:
            look = look_ahead(game, sigma, history, agent, depth)
            s = history[-1]
            enabled = {e: info for e, _, info in game.moves(s)}
            e = sigma.action(agent, look) if look and look[-1].turn == agent else None
            if e not in enabled:
                # look-ahead turn drifted; any silent move yields the same next state
                silent = sorted(x for x, info in enabled.items() if not info)
                e = silent[0] if silent else sigma.action(agent, history)
            memo[key] = e
        return memo[key]

    out = StrategyTree(rule=rule, note="eager rewrite")
    out.game = game
    return out


def outcomes(game: AnnouncementGame, strategy: StrategyTree, depth):
    """All state sequences of ``depth`` moves consistent with the team strategy."""
    done, level = [], [(game.root,)]
    for _ in range(depth):
        nxt = []
        for h in level:
            s = h[-1]
            moves = game.moves(s)
            if not moves:
                done.append(h)
            elif s.turn in game.team:
                nxt.append(h + (game.step(s, strategy.action(s.turn, h)),))
            else:
                nxt.extend(h + (x,) for _, x, _ in moves)
        level = list(dict.fromkeys(nxt))
    return done + level


def eager_shape_violations(game: AnnouncementGame, outcome):
    """Shape violations of an eager outcome.

    World counts must strictly decrease from run to run, and a run closed by
    an informative announcement of the team must contain fewer than |Ag|
    non-informative announcements.
    """
    out = []
    runs = _runs(outcome)
    for (i, k), (j, _) in zip(runs, runs[1:]):
        before, after = outcome[i], outcome[j]
        if not len(after) < len(before):
            out.append(f"world count does not decrease at index {j}")
        closer = outcome[j - 1]
        if closer.turn in game.team and k - 1 >= len(game.agents):
            out.append(f"run of {k} states before a team announcement at index {j}")
    return out


def has_stuttering_counterpart(game, sigma, outcome, depth):
    """Some ``sigma`` outcome of ``depth`` moves whose destuttered word extends the outcome's."""
    target = [s.worlds for s in destutter(outcome)]
    found = False

    def rec(h, word):
        nonlocal found
        if found:
            return
        if len(word) >= len(target):
            found = word[:len(target)] == target
            return
        if len(h) - 1 >= depth or not game.moves(h[-1]):
            return
        s = h[-1]
        if s.turn in game.team:
            succ = [game.step(s, sigma.action(s.turn, h))]
        else:
            succ = [x for _, x, _ in game.moves(s)]
        for x in succ:
            w = word if x.worlds == word[-1] else word + [x.worlds]
            if w != target[:len(w)]:
                continue
            rec(h + (x,), w)

    rec((game.root,), [game.root.worlds])
    return found


# ------------------------------------------------------------ bounded oracle

class BudgetExceeded(RuntimeError):
    pass


def default_budget():
    return int(os.environ.get("DELGAME_BUDGET", "2000000"))


def _kleene_not(x):
    return None if x is None else not x


def _kleene_and(x, y):
    return _kleene_not(_kleene_or(_kleene_not(x), _kleene_not(y)))


def _kleene_or(x, y):
    if x is True or y is True:
        return True
    if x is None or y is None:
        return None
    return False


class _Oracle:
    def __init__(self, arena, phi, team, horizon, k_scope, budget):
        self.arena = arena
        self.team = frozenset(team)
        self.horizon = horizon
        self.budget = budget
        self.spent = 0
        base = getattr(arena, "base", None)
        self.offset = getattr(arena, "offset", 0) if base is not None else 0
        self.eval_arena = base if base is not None else arena
        self.evaluator = BoundedEvaluator(self.eval_arena, horizon, k_scope)
        self.phi = phi
        self._val = {}

    def tick(self):
        self.spent += 1
        if self.spent > self.budget:
            raise BudgetExceeded

    def prefix_value(self, h):
        hit = self._val.get(h)
        if hit is None and h not in self._val:
            body = h[self.offset:]
            hit = self.evaluator.value(body, 0, self.phi) if body else None
            self._val[h] = hit
        return hit

    def terminal(self, h):
        v = self.prefix_value(h)
        if v is not None or len(h) >= self.horizon or not self.arena.moves(h[-1]):
            return True, v
        return False, None

    def info_set(self, h):
        a = self.arena.turn_of(h[-1])
        return (a, tuple(self.arena.cls(a, v) for v in h))

    def singleton_info_sets(self):
        groups = {}
        level = [(r,) for r in self.arena.initial()]
        while level:
            nxt = []
            for h in level:
                self.tick()
                done, _ = self.terminal(h)
                if done:
                    continue
                if self.arena.turn_of(h[-1]) in self.team:
                    key = self.info_set(h)
                    if groups.setdefault(key, h) != h:
                        return False
                nxt.extend(h + (x,) for _, x in self.arena.moves(h[-1]))
            level = list(dict.fromkeys(nxt))
        return True

    def minimax(self, h, choices):
        self.tick()
        done, v = self.terminal(h)
        if done:
            return v
        moves = self.arena.moves(h[-1])
        if self.arena.turn_of(h[-1]) in self.team:
            best, pick = False, moves[0][0]
            for c, x in moves:
                v = self.minimax(h + (x,), choices)
                if v is True:
                    best, pick = True, c
                    break
                if v is None and best is False:
                    best, pick = None, c
        else:
            best, pick = True, moves[0][0]
            for c, x in moves:
                v = self.minimax(h + (x,), choices)
                if v is False:
                    best, pick = False, c
                    break
                if v is None and best is True:
                    best, pick = None, c
        choices[h] = pick
        return best

    def search(self, frontier, assignment):
        """OR over completions of ``assignment`` of AND over pending outcomes."""
        frontier = list(frontier)
        unknown = False
        while frontier:
            h = frontier.pop()
            self.tick()
            done, v = self.terminal(h)
            if done:
                if v is False:
                    return False, None
                if v is None:
                    unknown = True
                continue
            moves = self.arena.moves(h[-1])
            if self.arena.turn_of(h[-1]) not in self.team:
                frontier.extend(h + (x,) for _, x in reversed(moves))
                continue
            key = self.info_set(h)
            if key in assignment:
                x = dict((c, x) for c, x in moves).get(assignment[key])
                if x is None:
                    return False, None
                frontier.append(h + (x,))
                continue
            best = False
            for c, x in moves:
                assignment[key] = c
                v, found = self.search(frontier + [h + (x,)], assignment)
                del assignment[key]
                if v is True:
                    return (None if unknown else True), found
                if v is None:
                    best = None
            return best, None
        return (None if unknown else True), dict(assignment)


def oracle_solve(arena, phi: Formula, team, init=None, horizon=6, k_scope="all",
                 uniform=True, budget=None, force_general=False) -> SolveResult:
    """Brute-force reference solver over plays of ``horizon`` positions.

    WIN: some uniform team strategy makes ``phi`` true on every outcome.
    LOSE: every uniform team strategy has an outcome where ``phi`` is false.
    UNKNOWN otherwise, or when the budget of explored nodes runs out.
    """
    if init is not None:
        arena = _with_init(arena, init)
    budget = default_budget() if budget is None else budget
    orc = _Oracle(arena, phi, team, horizon, k_scope, budget)
    roots = [(r,) for r in arena.initial()]
    stats = {"horizon": horizon}
    try:
        general = uniform and (force_general or not orc.singleton_info_sets())
        stats["search"] = "strategy enumeration" if general else "min-max"
        if general:
            value, found = orc.search(list(reversed(roots)), {})
            strategy = None
            if value is True:
                strategy = StrategyTree(note="decisions per information set")
                strategy.info_sets = found
                strategy.rule = lambda agent, h: found[orc.info_set(h)]
        else:
            choices = {}
            value = True
            for r in roots:
                v = orc.minimax(r, choices)
                value = False if v is False or value is False else (
                    None if v is None or value is None else True)
            strategy = None
            if value is True:
                strategy = StrategyTree()
                for h, c in choices.items():
                    if arena.turn_of(h[-1]) in orc.team and c is not None:
                        strategy.set(arena.turn_of(h[-1]), h, c)
    except BudgetExceeded:
        stats["explored"] = orc.spent
        return SolveResult(Unknown(budget, "budget"), None, None, stats)
    stats["explored"] = orc.spent
    if value is True:
        return SolveResult(WIN, strategy, None, stats)
    if value is False:
        note = ("every uniform team strategy has an outcome falsifying the objective "
                f"within {horizon} positions")
        counter = None
        if not general:
            counter = StrategyTree()
            for h, c in choices.items():
                if arena.turn_of(h[-1]) not in orc.team and c is not None:
                    counter.set(arena.turn_of(h[-1]), h, c)
        return SolveResult(LOSE, None, Certificate(counter, None, note), stats)
    return SolveResult(Unknown(horizon), None, None, stats)


class _InitView:
    """An arena seen with a different set of initial positions."""

    def __init__(self, arena, init):
        self._arena = arena
        self._init = tuple(init)

    def __getattr__(self, name):
        return getattr(self._arena, name)

    def initial(self):
        return self._init

    def roots(self, scope="all"):
        return self._init if scope == "init" else self._arena.roots("all")


def _with_init(arena, init):
    return _InitView(arena, init)
