import pathlib

from delgames.arena import GameArena, LassoPlay
from delgames.dynamics import ActionModel, Presentation
from delgames.formulas import TRUE, Atom, FALSE
from delgames.generators import random_model
from delgames.kripke import EpistemicModel, PointedModel

DATA = pathlib.Path(__file__).parent / "data"


def running_model(turn="a"):
    """w:{p}, v:{}, both agents confuse w and v."""
    return EpistemicModel(["w", "v"], {"a": [["w", "v"]], "b": [["w", "v"]]},
                          {"w": {"p"}, "v": set()}, {"w": turn, "v": turn}, ("a", "b"))


def running_actions(next_turn="b"):
    """e: pre p, sets p false; f: pre true; b confuses e and f, a does not."""
    return ActionModel(["e", "f"], {"a": [["e"], ["f"]], "b": [["e", "f"]]},
                       {"e": Atom("p"), "f": TRUE}, {"e": {"p": FALSE}},
                       {"e": next_turn, "f": next_turn}, ("a", "b"))


def running_presentation(init=("w",), team=("a",)):
    return Presentation(running_model(), running_actions(), list(init), set(team), ("a", "b"))


def announcements(model, pres, agents=None, next_turn=None):
    """Public announcement action model: ``pres`` maps event names to preconditions."""
    agents = tuple(agents or model.agents)
    events = list(pres)
    owner = next_turn or (lambda e: agents[0])
    return ActionModel(events, {}, pres, {}, {e: owner(e) for e in events}, agents)


def lasso_arena(play):
    seq = play.positions()
    n = len(seq)
    succ = {k: (k + 1 if k + 1 < n else len(play.stem)) for k in range(n)}
    return GameArena(range(n), [0], {(k, "go"): succ[k] for k in range(n)},
                     {k: seq[k].model.turn[seq[k].point] for k in range(n)},
                     {k: seq[k].model.valuation[seq[k].point] for k in range(n)},
                     agents=seq[0].model.agents, models={k: seq[k] for k in range(n)},
                     k_local=True)


def random_lasso(rng, agents=("a", "b")):
    m = random_model(rng, 4, ["p", "q"], agents, p_join=0.5)
    pool = [PointedModel(m, w) for w in m.worlds]
    stem = [rng.choice(pool) for _ in range(rng.randint(0, 3))]
    loop = [rng.choice(pool) for _ in range(rng.randint(1, 3))]
    return LassoPlay(stem, loop)
