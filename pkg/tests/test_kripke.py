import random

import pytest

from delgames.formulas import parse_formula
from delgames.generators import random_model
from delgames.kripke import (EpistemicModel, ModelError, PointedModel, canonical_form,
                             components, connected_component, eval_el, partition_from_pairs,
                             pointed_isomorphic, restrict)

from .conftest import running_model
from .oracles import bfs_component, brute_isomorphic


def f(text):
    return parse_formula(text)


def test_eval_el_on_the_running_model():
    m = running_model()
    assert eval_el(m, "w", f("p"))
    assert not eval_el(m, "w", f("K[a] p"))
    assert eval_el(m, "v", f("!p | p"))
    assert eval_el(m, "w", f("!K[b] p & !K[b] !p"))


def test_tautology_everywhere():
    rng = random.Random(3)
    for _ in range(20):
        m = random_model(rng, 4, ["p", "q"], ("a", "b"))
        assert all(eval_el(m, w, f("!p | p")) for w in m.worlds)


def test_eval_el_rejects_temporal_formulas():
    with pytest.raises(ModelError):
        eval_el(running_model(), "w", f("F p"))


def test_model_validation():
    with pytest.raises(ModelError):
        EpistemicModel([], {}, {}, {})
    with pytest.raises(ModelError):
        EpistemicModel(["w"], {"a": [["w", "x"]]}, {}, {"w": "a"})
    with pytest.raises(ModelError):
        EpistemicModel(["w", "v"], {"a": [["w"], ["w", "v"]]}, {}, {"w": "a", "v": "a"})
    with pytest.raises(ModelError):
        EpistemicModel(["w"], {}, {}, {})


def test_partition_from_pairs_closes_relation():
    with pytest.warns(UserWarning):
        blocks = partition_from_pairs(["x", "y", "z"], [("x", "y"), ("y", "z")])
    assert sorted(map(sorted, blocks)) == [["x", "y", "z"]]


def test_connected_component_isolated_world():
    m = EpistemicModel(["u", "v"], {"a": []}, {"u": {"p"}, "v": {"p"}}, {"u": "a", "v": "a"})
    pm = connected_component(m, "u")
    assert pm.model.worlds == ("u",)
    assert pm.point == "u"


def test_connected_component_product_is_whole_model():
    from delgames.dynamics import product
    from .conftest import running_actions
    prod = product(running_model(), running_actions())
    pm = connected_component(prod, ("w", "e"))
    assert set(pm.model.worlds) == {("w", "e"), ("w", "f"), ("v", "f")}


def test_component_of_split_six_world_model():
    rng = random.Random(11)
    worlds = [f"x{i}" for i in range(6)]
    left, right = worlds[:3], worlds[3:]
    rel = {"a": [left[:2], [left[2]], right], "b": [[left[0]], left[1:], [right[0]], right[1:]]}
    m = EpistemicModel(worlds, rel, {w: {"p"} if rng.random() < .5 else set() for w in worlds},
                       {w: "a" for w in worlds})
    for w in worlds:
        comp = connected_component(m, w)
        assert set(comp.model.worlds) == bfs_component(m, w)
        assert len(comp.model.worlds) == 3
    assert sorted(map(sorted, components(m))) == [left, right]


def test_isomorphism_identity_and_renaming():
    m = running_model()
    assert pointed_isomorphic(PointedModel(m, "w"), PointedModel(m, "w")) == {"w": "w", "v": "v"}
    ren = {"w": "w2", "v": "v2"}
    m2 = EpistemicModel(["v2", "w2"], {"a": [["w2", "v2"]], "b": [["w2", "v2"]]},
                        {"w2": {"p"}, "v2": set()}, {"w2": "a", "v2": "a"}, ("a", "b"))
    assert pointed_isomorphic(PointedModel(m, "w"), PointedModel(m2, "w2")) == ren
    assert pointed_isomorphic(PointedModel(m, "w"), PointedModel(m2, "v2")) is None


def test_same_shape_different_valuation_not_isomorphic():
    worlds = ["1", "2", "3", "4"]
    rel = {"a": [["1", "2"], ["3", "4"]]}
    turn = {w: "a" for w in worlds}
    m1 = EpistemicModel(worlds, rel, {"1": {"p"}, "3": {"p"}}, turn)
    m2 = EpistemicModel(worlds, rel, {"1": {"p"}, "2": {"p"}}, turn)
    assert pointed_isomorphic(PointedModel(m1, "1"), PointedModel(m2, "1")) is None
    assert not brute_isomorphic(PointedModel(m1, "1"), PointedModel(m2, "1"))
    assert canonical_form(PointedModel(m1, "1")) != canonical_form(PointedModel(m2, "1"))


def test_turn_matters_unless_ignored():
    m1, m2 = running_model("a"), running_model("b")
    p1, p2 = PointedModel(m1, "w"), PointedModel(m2, "w")
    assert pointed_isomorphic(p1, p2) is None
    assert pointed_isomorphic(p1, p2, ignore_turn=True) is not None
    assert canonical_form(p1) != canonical_form(p2)
    assert canonical_form(p1, ignore_turn=True) == canonical_form(p2, ignore_turn=True)


def _relabelled(m, rng):
    names = {w: f"r{i}" for i, w in enumerate(rng.sample(list(m.worlds), len(m.worlds)))}
    return EpistemicModel([names[w] for w in reversed(m.worlds)],
                          {a: [[names[w] for w in b] for b in m.blocks(a)] for a in m.agents},
                          {names[w]: m.valuation[w] for w in m.worlds},
                          {names[w]: m.turn[w] for w in m.worlds}, m.agents), names


def test_canonical_form_invariant_under_renaming():
    rng = random.Random(5)
    for _ in range(50):
        m = random_model(rng, rng.randint(1, 6), ["p", "q"], ("a", "b"), p_join=0.5)
        w = rng.choice(m.worlds)
        m2, names = _relabelled(m, rng)
        assert canonical_form(PointedModel(m, w)) == canonical_form(PointedModel(m2, names[w]))
        iso = pointed_isomorphic(PointedModel(m, w), PointedModel(m2, names[w]))
        assert iso is not None and iso[w] == names[w]


def test_canonical_form_matches_exhaustive_isomorphism():
    rng = random.Random(17)
    agree = positives = 0
    for _ in range(200):
        n = rng.randint(1, 5)
        m1 = random_model(rng, n, ["p"], ("a", "b"), turn="a", p_join=0.5)
        m2 = random_model(rng, n, ["p"], ("a", "b"), turn="a", p_join=0.5)
        p1 = PointedModel(m1, rng.choice(m1.worlds))
        p2 = PointedModel(m2, rng.choice(m2.worlds))
        expected = brute_isomorphic(p1, p2)
        positives += expected
        assert (canonical_form(p1) == canonical_form(p2)) == expected
        assert (pointed_isomorphic(p1, p2) is not None) == expected
        agree += 1
    assert agree == 200 and positives > 5


def test_restrict():
    m = running_model()
    same = restrict(m, m.worlds)
    assert same.worlds == m.worlds
    assert all(same.blocks(a) == m.blocks(a) for a in m.agents)
    single = restrict(m, ["w"])
    assert single.worlds == ("w",) and single.valuation["w"] == {"p"}
    assert single.related("a", "w", "w") and single.related("b", "w", "w")
    with pytest.raises(ModelError):
        restrict(m, [])


def test_restrict_to_component_matches_connected_component():
    rng = random.Random(23)
    for _ in range(30):
        m = random_model(rng, 5, ["p"], ("a", "b"), p_join=0.3)
        w = rng.choice(m.worlds)
        comp = connected_component(m, w).model
        r = restrict(m, bfs_component(m, w))
        assert set(r.worlds) == set(comp.worlds)
        for a in m.agents:
            assert {frozenset(b) for b in r.blocks(a)} == {frozenset(b) for b in comp.blocks(a)}
