import random

import pytest

from delgames.dynamics import (ActionModel, Presentation, PresentationError, check_h1, check_h2,
                               check_h3, classify_actions, executable, post_val, product,
                               subjective_init)
from delgames.formulas import FALSE, TRUE, Atom, Know, parse_formula
from delgames.generators import random_el, random_model, random_prop, random_prop_presentation
from delgames.kripke import EpistemicModel, ModelError, eval_el, pointed_isomorphic, PointedModel

from .conftest import running_actions, running_model, running_presentation
from .oracles import iterated_products, naive_el, naive_product, rel_pairs


def test_running_example_product():
    prod = product(running_model(), running_actions())
    assert set(prod.worlds) == {("w", "e"), ("w", "f"), ("v", "f")}
    assert prod.valuation[("w", "e")] == frozenset()
    assert prod.valuation[("w", "f")] == {"p"}
    assert prod.valuation[("v", "f")] == frozenset()
    blocks_a = {frozenset(b) for b in prod.blocks("a")}
    assert blocks_a == {frozenset({("w", "e")}), frozenset({("w", "f"), ("v", "f")})}
    assert {frozenset(b) for b in prod.blocks("b")} == {frozenset(prod.worlds)}
    assert eval_el(prod, ("w", "e"), parse_formula("K[a] !p"))
    assert eval_el(prod, ("w", "e"), parse_formula("!K[b] !p & !K[b] p"))


def test_executable_and_post_val():
    m, act = running_model(), running_actions()
    assert executable(m, "w", act, "e")
    assert not executable(m, "v", act, "e")
    assert executable(m, "v", act, "f")
    assert post_val(m, "w", act, "e") == frozenset()
    assert post_val(m, "w", act, "f") == {"p"}
    with pytest.raises(ModelError):
        post_val(m, "v", act, "e")
    k = ActionModel(["k"], {}, {"k": Know("a", Atom("p"))}, {}, {"k": "a"}, ("a", "b"))
    assert not executable(m, "w", k, "k")


def test_neutral_action_is_identity_up_to_turn():
    rng = random.Random(2)
    for _ in range(10):
        m = random_model(rng, 4, ["p", "q"], ("a", "b"))
        act = ActionModel(["n"], {}, {"n": TRUE}, {}, {"n": "b"}, ("a", "b"))
        prod = product(m, act, name=lambda w, e: w)
        for w in m.worlds:
            assert pointed_isomorphic(PointedModel(m, w), PointedModel(prod, w), ignore_turn=True)


def test_identity_posts_are_dropped():
    act = ActionModel(["e"], {}, {"e": TRUE}, {"e": {"p": Atom("p")}}, {"e": "a"}, ("a",))
    assert act.post["e"] == {}


def test_action_model_validation():
    with pytest.raises(ModelError):
        ActionModel(["e"], {}, {"e": parse_formula("F p")}, {}, {"e": "a"}, ("a",))
    with pytest.raises(ModelError):
        ActionModel(["e"], {}, {"e": TRUE}, {"e": {"p": parse_formula("K[a] q")}}, {"e": "a"},
                    ("a",))


def _check_against_reference(m, act):
    prod = product(m, act)
    worlds, val, turn, rel = naive_product(m, act)
    assert set(prod.worlds) == set(worlds)
    assert all(prod.valuation[x] == val[x] and prod.turn[x] == turn[x] for x in worlds)
    for a in m.agents:
        assert rel_pairs(prod, a) == rel[a]
    return prod


def test_iterated_product_matches_reference():
    rng = random.Random(9)
    agents = ("a", "b")
    for _ in range(25):
        m = random_model(rng, 3, ["p", "q"], agents, p_join=0.5)
        events = ["e0", "e1", "e2"]
        pre = {e: random_el(rng, ["p", "q"], agents) for e in events}
        pre["e0"] = TRUE
        post = {e: {"p": random_prop(rng, ["p", "q"], 1)} for e in events[1:]}
        rel = {a: [[e for e in events if rng.random() < .5]] for a in agents}
        rel = {a: [b for b in bs if b] for a, bs in rel.items()}
        act = ActionModel(events, rel, pre, post, {e: "a" for e in events}, agents)
        once = _check_against_reference(m, act)
        _check_against_reference(once, act)


def test_classification():
    t = classify_actions(running_actions())
    assert t.propositional
    assert not t.public["e"] and not t.public["f"]
    act = ActionModel(["ann", "flip"], {}, {"ann": Atom("p"), "flip": TRUE},
                      {"flip": {"q": FALSE}}, {"ann": "a", "flip": "a"}, ("a",))
    t = classify_actions(act)
    assert t.public == {"ann": True, "flip": True}
    assert t.announcement == {"ann": True, "flip": False}
    k = ActionModel(["k"], {}, {"k": Know("a", Atom("p"))}, {}, {"k": "a"}, ("a",))
    assert not classify_actions(k).propositional


def test_h1_and_h2():
    assert check_h1(running_model()).ok
    mixed = EpistemicModel(["w", "v"], {}, {}, {"w": "a", "v": "b"}, ("a", "b"))
    assert not check_h1(mixed)
    bad = ActionModel(["e", "f"], {"a": [["e", "f"]]}, {"e": TRUE, "f": TRUE}, {},
                      {"e": "a", "f": "b"}, ("a", "b"))
    rep = check_h2(bad)
    assert not rep.ok and set(rep.witness) == {"e", "f"}
    assert check_h2(running_actions()).ok
    with pytest.raises(PresentationError):
        Presentation(running_model(), bad, ["w"], {"a"}, ("a", "b"))


def test_presentation_validation():
    with pytest.raises(PresentationError):
        Presentation(running_model(), running_actions(), [], {"a"})
    with pytest.raises(PresentationError):
        Presentation(running_model(), running_actions(), ["zz"], {"a"})
    with pytest.raises(PresentationError):
        Presentation(running_model(), running_actions(), ["w"], {"c"}, ("a", "b"))


def test_h3_on_running_example():
    h3, avail = check_h3(running_presentation(), depth=2)
    assert not h3.ok
    assert set(h3.witness) == {("w",), ("v",)}
    assert avail.ok


def _brute_h3(p, depth):
    """Exhaustive scan of pairs of same-length histories for H3."""
    for level in iterated_products(p, depth):
        def enabled(h):
            return {e for e in p.actions.events if naive_el(level, h, p.actions.pre[e])}
        for h in level.worlds:
            owner = level.turn[h]
            for g in level.worlds:
                if level.related(owner, h, g) and enabled(g) != enabled(h):
                    return False
    return True


def test_h3_matches_exhaustive_scan():
    rng = random.Random(31)
    seen_fail = 0
    for _ in range(40):
        p = random_prop_presentation(rng, max_worlds=3, max_events=3)
        expected = _brute_h3(p, 2)
        seen_fail += not expected
        assert check_h3(p, depth=2)[0].ok == expected
    assert seen_fail > 0


def test_subjective_init():
    m = running_model()
    assert subjective_init(m, "w", {"a"}) == {"w", "v"}
    iso = EpistemicModel(["w", "v"], {}, {}, {"w": "a", "v": "a"}, ("a", "b"))
    assert subjective_init(iso, "w", {"a", "b"}) == {"w"}
    rng = random.Random(4)
    for _ in range(20):
        m = random_model(rng, 4, ["p"], ("a", "b", "c"))
        w0 = rng.choice(m.worlds)
        team = {"a", "c"}
        expected = {w0} | {w for a in team for w in m.worlds if (w0, w) in rel_pairs(m, a)}
        assert subjective_init(m, w0, team) == expected
