"""Epistemic games on dynamic epistemic logic arenas."""

from .arena import (GameArena, LassoPlay, LazyArena, Unknown, Verdict, eval_ltlk_bounded,
                    eval_ltlk_lasso, unfold)
from .dynamics import (ActionModel, CheckReport, Presentation, PresentationError,
                       check_h1, check_h2, check_h3, classify_actions, product,
                       subjective_init)
from .fold import (FoldedArena, check_equivalence, check_hierarchical, fold_propositional,
                   quotient_public)
from .formulas import Fragment, classify, parse_formula, to_text
from .gamefile import GameFileError, load_game, parse_game
from .kripke import EpistemicModel, ModelError, PointedModel, canonical_form, pointed_isomorphic
from .solve import (PreconditionError, SolveResult, eagerize, oracle_solve, solve_announcement,
                    solve_reach_safe)

__all__ = [
    "ActionModel", "CheckReport", "EpistemicModel", "FoldedArena", "Fragment", "GameArena",
    "GameFileError", "LassoPlay", "LazyArena", "ModelError", "PointedModel", "PreconditionError",
    "Presentation", "PresentationError", "SolveResult", "Unknown", "Verdict", "canonical_form",
    "check_equivalence", "check_h1", "check_h2", "check_h3", "check_hierarchical", "classify",
    "classify_actions", "eagerize", "eval_ltlk_bounded", "eval_ltlk_lasso", "fold_propositional",
    "load_game", "oracle_solve", "parse_formula", "parse_game", "pointed_isomorphic", "product",
    "quotient_public", "solve_announcement", "solve_reach_safe", "subjective_init", "to_text",
    "unfold",
]
