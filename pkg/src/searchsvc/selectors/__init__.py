"""Selector evaluation, suggestion and generalization over parsed HTML."""

from .eval import check_expression, evaluate
from .suggest import SelectorSuggestion, default_rank_key, generalize, suggest_selectors

__all__ = [
    "SelectorSuggestion",
    "check_expression",
    "default_rank_key",
    "evaluate",
    "generalize",
    "suggest_selectors",
]
