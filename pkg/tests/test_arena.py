import random

import pytest

from delgames.arena import (GameArena, LassoPlay, LazyArena, arena_public, eval_ltlk_bounded,
                            eval_ltlk_lasso, histories, lift_equiv, reduce_multi_init, to_dot,
                            unfold)
from delgames.dynamics import Presentation
from delgames.formulas import TRUE, Atom, parse_formula
from delgames.generators import random_fragment, random_prop_presentation
from delgames.kripke import ModelError, PointedModel, pointed_isomorphic
from delgames.solve import oracle_solve

from .conftest import announcements, running_model, running_presentation, lasso_arena, random_lasso
from .oracles import iterated_products


def f(text):
    return parse_formula(text)


# ------------------------------------------------------------ lazy arena

def test_expand_running_example():
    lazy = LazyArena(running_presentation())
    h = lazy.expand(("w",), "e")
    assert h == ("w", "e")
    pm = lazy.attached_model(h)
    assert set(pm.model.worlds) == {("w", "e"), ("w", "f"), ("v", "f")}
    assert pm.model.valuation[("w", "f")] == {"p"}
    assert lazy.turn_of(h) == "b"
    assert lazy.expand(("v",), "e") is None
    assert lazy.enabled(("v",)) == ["f"]


def test_depth3_expansion_matches_iterated_products():
    rng = random.Random(8)
    for _ in range(15):
        p = random_prop_presentation(rng, max_worlds=3, max_events=3)
        lazy = LazyArena(p)
        levels = iterated_products(p, 3)
        for d, level in enumerate(levels):
            ours = set(histories(lazy, d + 1))
            ours = {h[-1] for h in ours}
            assert ours == set(level.worlds)
            for h in level.worlds:
                assert lazy.label(h) == level.valuation[h]
                assert lazy.turn_of(h) == level.turn[h]
                for a in p.agents:
                    for g in level.worlds:
                        assert lazy.related(a, h, g) == level.related(a, h, g)


def test_history_relation():
    lazy = LazyArena(running_presentation())
    h = ("w", "f", "f")
    assert lazy.related("a", h, h)
    assert not lazy.related("a", ("w",), ("w", "f"))
    for a in ("a", "b"):
        assert lazy.related(a, ("w", "f", "f"), ("v", "f", "f"))
    assert not lazy.related("a", ("w", "e"), ("w", "f"))
    assert lazy.related("b", ("w", "e"), ("v", "f"))


def test_attached_model_is_a_connected_component():
    lazy = LazyArena(running_presentation())
    pm = lazy.attached_model(("w", "e"))
    for x in pm.model.worlds:
        assert lazy.attached_model(x).model is pm.model


# ------------------------------------------------------------ unfolding

def _cycle_arena():
    return GameArena(["x", "y"], ["x"], {("x", "go"): "y", ("y", "go"): "x"},
                     {"x": "a", "y": "a"}, {"x": {"p"}, "y": set()}, agents=("a",))


def test_unfold_depth_zero():
    u = unfold(_cycle_arena(), 0)
    assert u.positions == (("x",),)
    assert u.transitions() == []
    assert u.frontier == {("x",)}


def test_unfold_cycle_is_a_path():
    u = unfold(_cycle_arena(), 3)
    assert len(u.positions) == 4
    assert len(u.transitions()) == 3
    assert [u.label(h) for h in u.positions] == [{"p"}, set(), {"p"}, set()]


def test_lift_equiv():
    lazy = LazyArena(running_presentation())
    assert lift_equiv(lazy, (("w",), ("w", "f")), (("v",), ("v", "f")), "a")
    assert not lift_equiv(lazy, (("w",),), (("w",), ("w", "f")), "a")


# ------------------------------------------------------------ bounded semantics

def test_bounded_atoms_and_finally():
    a = _cycle_arena()
    assert eval_ltlk_bounded(a, ["x"], 0, Atom("p"), 1) is True
    assert eval_ltlk_bounded(a, ["y"], 0, Atom("p"), 1) is False
    for horizon in (3, 5, 9):
        assert eval_ltlk_bounded(a, ["y", "x"], 0, f("F p"), horizon) is True
    assert eval_ltlk_bounded(a, ["y"], 0, f("F p"), 4) is None


def test_bounded_globally_is_unknown_without_violation():
    a = GameArena(["x"], ["x"], {("x", "go"): "x"}, {"x": "a"}, {"x": {"p"}}, agents=("a",))
    assert eval_ltlk_bounded(a, ["x", "x", "x"], 0, f("G p"), 3) is None
    assert eval_ltlk_bounded(a, ["x", "x", "x"], 0, f("G !p"), 3) is False


def test_bounded_knowledge_after_public_announcement():
    m = running_model()
    act = announcements(m, {"say_p": Atom("p"), "skip": TRUE})
    p = Presentation(m, act, ["w"], {"a"}, ("a", "b"))
    lazy = LazyArena(p)
    h = (("w",), ("w", "say_p"))
    for scope in ("all", "init"):
        assert eval_ltlk_bounded(lazy, h, 1, f("K[a] p"), 2, scope) is True
    assert eval_ltlk_bounded(lazy, h, 0, f("K[a] p"), 2, "all") is False
    # only w is initial, so with init scope a already knows p at the root
    assert eval_ltlk_bounded(lazy, h, 0, f("K[a] p"), 2, "init") is True
    # same-length histories a confuses with h all satisfy p at the end
    related = [g for g in histories(lazy, 2) if lift_equiv(lazy, g, h, "a")]
    assert related and all("p" in lazy.label(g[-1]) for g in related)


def test_bounded_argument_checks():
    with pytest.raises(ValueError):
        eval_ltlk_bounded(_cycle_arena(), ["x", "y"], 0, TRUE, 1)


# ------------------------------------------------------------ lassos

def test_lasso_simple_cases():
    m = running_model()
    w, v = PointedModel(m, "w"), PointedModel(m, "v")
    assert eval_ltlk_lasso(None, LassoPlay([v], [w]), f("G true"))
    assert not eval_ltlk_lasso(None, LassoPlay([v], [w]), f("G p"))
    assert eval_ltlk_lasso(None, LassoPlay([v], [w]), f("F G p"))
    assert not eval_ltlk_lasso(None, LassoPlay([v], [w]), f("F K[a] p"))
    single = PointedModel(m.__class__(["w"], {}, {"w": {"p"}}, {"w": "a"}, ("a", "b")), "w")
    assert eval_ltlk_lasso(None, LassoPlay([w, v], [single]), f("F K[a] p"))
    assert eval_ltlk_lasso(None, LassoPlay([], [w, v]), f("G F p & G F !p"))
    with pytest.raises(ModelError):
        eval_ltlk_lasso(None, LassoPlay([], [w]), f("X p"))


def test_lasso_agrees_with_bounded_evaluator():
    rng = random.Random(41)
    definite = 0
    for _ in range(100):
        play = random_lasso(rng)
        phi = random_fragment(rng, ["p", "q"], ("a", "b"))
        exact = eval_ltlk_lasso(None, play, phi)
        arena = lasso_arena(play)
        assert eval_ltlk_lasso(arena, LassoPlay(range(len(play.stem)),
                                                range(len(play.stem), len(play))), phi) == exact
        horizon = len(play.stem) + 3 * len(play.loop)
        idx = LassoPlay(range(len(play.stem)), range(len(play.stem), len(play)))
        bounded = eval_ltlk_bounded(arena, idx.prefix(horizon), 0, phi, horizon)
        if bounded is not None:
            definite += 1
            assert bounded == exact
    assert definite >= 50


# ------------------------------------------------------------ publicness, multi-init

def test_arena_public():
    assert arena_public(_cycle_arena())
    a = GameArena(["s", "x", "y"], ["s"], {("s", "l"): "x", ("s", "r"): "y"},
                  {"s": "a", "x": "a", "y": "a"}, {}, {"a": [["x", "y"]]}, ("a",))
    rep = arena_public(a)
    assert not rep
    (_, c1, _), (_, c2, _) = rep.witness
    assert {c1, c2} == {"l", "r"}


def test_reduce_multi_init_shapes():
    single = reduce_multi_init(_cycle_arena())
    assert len(single.initial()) == 1
    assert len(single.moves(single.initial()[0])) == 1
    three = GameArena(["x", "y", "z"], ["x", "y", "z"], {}, {v: "a" for v in "xyz"}, {},
                      agents=("a",))
    r = reduce_multi_init(three)
    assert len(r.moves(r.initial()[0])) == 3
    assert r.base is three and r.offset == 1


def test_reduce_multi_init_preserves_bounded_solving():
    rng = random.Random(12)
    for _ in range(15):
        n = rng.randint(2, 4)
        pos = list(range(n))
        trans = {(v, c): rng.choice(pos) for v in pos for c in ("l", "r") if rng.random() < .7}
        for v in pos:
            trans.setdefault((v, "l"), v)
        turn = {v: rng.choice("ab") for v in pos}
        val = {v: {"p"} if rng.random() < .4 else set() for v in pos}
        init = rng.sample(pos, 2)
        a = GameArena(pos, init, trans, turn, val, agents=("a", "b"))
        r = reduce_multi_init(a, owner="b")
        for h in (2, 3, 4):
            base = oracle_solve(a, f("F p"), {"a"}, horizon=h, uniform=False)
            red = oracle_solve(r, f("F p"), {"a"}, horizon=h + 1, uniform=False)
            assert base.verdict.kind == red.verdict.kind


def test_dot_export():
    text = to_dot(_cycle_arena())
    assert text.startswith("digraph") and "go" in text


def test_running_attached_models_match_product():
    from delgames.dynamics import product
    from .conftest import running_actions
    lazy = LazyArena(running_presentation())
    prod = product(running_model(), running_actions())
    ours = lazy.attached_model(("w", "e"))
    theirs = PointedModel(prod, ("w", "e"))
    assert pointed_isomorphic(ours, theirs) is not None
