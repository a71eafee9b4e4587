from .figures import FIGURES, reproduce
from .presets import PRESETS, preset
from .runs import (
    ModelComparison,
    RunResult,
    ScenarioRunError,
    SweepResult,
    compare_models,
    parse_tf_grid,
    run_scenario,
    sweep_tf,
)
from .scenario import Scenario, dump, dumps, load, loads

__all__ = [
    "FIGURES", "PRESETS", "ModelComparison", "RunResult", "Scenario", "ScenarioRunError",
    "SweepResult", "compare_models", "dump", "dumps", "load", "loads", "parse_tf_grid",
    "preset", "reproduce", "run_scenario", "sweep_tf",
]
