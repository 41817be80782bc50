import random

import pytest

from delgames.gamefile import GameFileError, format_game, load_game, parse_game
from delgames.formulas import parse_formula
from delgames.generators import random_prop_presentation, random_public_presentation
from delgames.kripke import pointed_isomorphic, PointedModel

from .conftest import DATA, running_presentation


def test_running_example_file_matches_builder():
    g = load_game(DATA / "running.game")
    p, ref = g.presentation, running_presentation()
    assert set(p.model.worlds) == set(ref.model.worlds)
    for w in p.model.worlds:
        assert pointed_isomorphic(PointedModel(p.model, w), PointedModel(ref.model, w))
    assert p.actions.pre == ref.actions.pre
    assert p.actions.post == ref.actions.post
    assert p.team == {"a"}
    assert g.objective == parse_formula("F K[a] !p")
    assert g.mode == "objective"


def test_empty_file():
    with pytest.raises(GameFileError, match="empty"):
        parse_game("")
    with pytest.raises(GameFileError, match="empty"):
        parse_game("# only a comment\n\n")


@pytest.mark.parametrize("text, line, column", [
    ("[agents]\na maybe\n", 2, 1),
    ("world w\n", 1, 1),
    ("[agents]\na exists\n[model]\nworld w\nturn w c\n", 5, 8),
    ("[agents]\na exists\n[model]\nworld w\nrel a w zz\n", 5, 9),
    ("[agents]\na exists\n[mdl]\n", 3, 1),
    ("[agents]\na exists\n[model]\nworld w\nworld w\n", 5, 7),
])
def test_errors_carry_positions(text, line, column):
    with pytest.raises(GameFileError) as info:
        parse_game(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert f"line {line}, column {column}" in str(info.value)


def test_formula_error_position_inside_line():
    with pytest.raises(GameFileError) as info:
        load_game(DATA / "bad_formula.game")
    assert info.value.line == 7
    assert info.value.column > len("event e next a pre ")


def test_missing_pieces():
    base = "[agents]\na exists\n[model]\nworld w\nturn * a\n[actions]\nevent e next a\n"
    with pytest.raises(GameFileError, match="initial"):
        parse_game(base)
    with pytest.raises(GameFileError, match="turn owner"):
        parse_game(base.replace("turn * a\n", "") + "[init]\nw\n")
    assert parse_game(base + "[init]\nw\n").objective is None


def test_options():
    g = load_game(DATA / "globally_tiny.game")
    assert g.options == {"horizon": 3}
    with pytest.raises(GameFileError, match="natural"):
        parse_game("[options]\nhorizon many\n")
    with pytest.raises(GameFileError, match="unknown option"):
        parse_game("[options]\ncolour red\n")


def test_subjective_mode_expands_init():
    g = load_game(DATA / "subjective.game")
    assert g.mode == "subjective"
    assert g.declared_init == {"w"}
    assert set(g.presentation.init) == {"w", "v"}


def test_round_trip_random_presentations():
    rng = random.Random(61)
    for k in range(30):
        gen = random_prop_presentation if k % 2 else random_public_presentation
        p = gen(rng)
        phi = parse_formula("F K[a] p0")
        text = format_game(p, phi, {"horizon": 7})
        g = parse_game(text)
        q = g.presentation
        assert q.agents == p.agents and q.team == p.team
        assert set(q.init) == set(p.init)
        assert list(q.model.worlds) == list(map(str, p.model.worlds))
        assert q.actions.pre == p.actions.pre and q.actions.post == p.actions.post
        assert q.actions.turn_after == p.actions.turn_after
        for a in p.agents:
            assert sorted(map(sorted, q.model.blocks(a))) == sorted(map(sorted, p.model.blocks(a)))
            assert sorted(map(sorted, q.actions.blocks(a))) == \
                sorted(map(sorted, p.actions.blocks(a)))
        assert g.objective == phi and g.options == {"horizon": 7}
        assert format_game(q, g.objective, g.options) == text
