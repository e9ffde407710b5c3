"""Named instances with expected verdicts, and the randomized counterexample search."""

from .registry import (Check, PaperScenario, ScenarioResult, get_scenario, list_scenarios,
                       match_scenarios, run_scenario)
from .search import SearchConfig, SearchResult, apportia_seed, search_counterexamples

__all__ = ["Check", "PaperScenario", "ScenarioResult", "SearchConfig", "SearchResult",
           "apportia_seed", "get_scenario", "list_scenarios", "match_scenarios",
           "run_scenario", "search_counterexamples"]
