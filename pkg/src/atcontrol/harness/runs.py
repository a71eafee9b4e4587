"""Run scenarios, t_f sweeps and 3- vs 4-level comparisons."""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..counterdiabatic import hamiltonian_schedule
from ..errors import ATControlError
from ..model import dressed_basis
from ..propagator import Trajectory, basis_state, evolve, fidelity, measure_bare
from ..spectral import write_columns
from .scenario import Scenario

WORKERS_ENV = "ATCONTROL_WORKERS"


class ScenarioRunError(ATControlError):
    """A module error raised while running a named scenario."""

    def __init__(self, scenario_name, cause):
        super().__init__(f"[{scenario_name}] {type(cause).__name__}: {cause}")
        self.scenario_name = scenario_name
        self.cause = cause


def default_workers():
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(eq=False)
class RunResult:
    scenario: Scenario
    trajectory: Trajectory
    measured: Trajectory
    fidelity: float

    @property
    def infidelity(self):
        return 1.0 - self.fidelity

    @property
    def valid(self):
        return self.scenario.valid

    def summary(self):
        return {
            "fidelity": self.fidelity,
            "infidelity": self.infidelity,
            "validity_flag": self.valid,
            "params": self.scenario.params(),
        }


def run_scenario(s: Scenario, out=None, summary=None, n_out=501, tol=1e-10) -> RunResult:
    """Evolve a scenario from its initial state and score the target population.

    Dressed-frame runs are evolved in (|1>,|S>,|+>,|->) and projected back to
    the bare basis before scoring.  ``out``/``summary`` write the measured
    trajectory CSV and the JSON summary.
    """
    try:
        schedule, labels = hamiltonian_schedule(s.model, s.manifold, s.drive, s.protocol, s.cd)
        psi0 = basis_state(labels, s.initial)
        traj = evolve(schedule, psi0, s.t_f, n_out=n_out, tol=tol, labels=labels,
                      metadata=s.params())
        measured = traj
        if s.cd is not None and s.cd.frame == "dressed":
            measured = measure_bare(traj, dressed_basis(s.manifold, s.drive))
        # dressed labels (+, -) are scored on the unprojected trajectory
        scored = traj if s.target not in measured.labels else measured
        f = fidelity(scored, s.target)
    except ATControlError as e:
        raise ScenarioRunError(s.name, e) from e
    result = RunResult(s, traj, measured, f)
    if out is not None:
        measured.to_csv(out, target=s.target, header=dataset_header(s))
    if summary is not None:
        with open(summary, "w") as fh:
            json.dump(result.summary(), fh, indent=2)
    return result


def dataset_header(s: Scenario, **extra):
    head = dict(s.params())
    head["validity_flag"] = f"{s.valid} (t_f < 1/gamma_t)"
    head.update(extra)
    return head


@dataclass(eq=False)
class SweepResult:
    name: str
    t_f: np.ndarray
    fidelity: np.ndarray
    errors: dict = field(default_factory=dict)
    valid: np.ndarray = None

    @property
    def infidelity(self):
        return 1.0 - self.fidelity

    def columns(self):
        return (["t_f", "F", "I", "valid"],
                np.column_stack([self.t_f, self.fidelity, self.infidelity,
                                 self.valid.astype(float)]))

    def to_csv(self, path_or_file, header=None):
        names, rows = self.columns()
        write_columns(path_or_file, names, rows, header)


def _run_point(s: Scenario):
    try:
        return run_scenario(s, n_out=2).fidelity, None
    except ATControlError as e:
        return float("nan"), str(e)


def _map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def sweep_tf(s: Scenario, t_f_list, workers=None) -> SweepResult:
    """One run per final time; failed points are recorded as NaN with a message."""
    grid = np.asarray(list(t_f_list), dtype=float)
    if grid.size == 0:
        raise ValueError("t_f_list must not be empty")
    runs = [s.with_t_f(t) for t in grid]
    results = _map(_run_point, runs, default_workers() if workers is None else workers)
    fid = np.array([r[0] for r in results])
    errors = {float(t): msg for t, (_, msg) in zip(grid, results) if msg}
    valid = np.array([r.valid for r in runs])
    return SweepResult(s.name, grid, fid, errors, valid)


@dataclass(eq=False)
class ModelComparison:
    three: SweepResult
    four: SweepResult

    @property
    def max_abs_diff(self):
        return float(np.nanmax(np.abs(self.three.fidelity - self.four.fidelity)))

    def columns(self):
        return (["t_f", "F3", "F4", "dF", "valid"],
                np.column_stack([self.three.t_f, self.three.fidelity, self.four.fidelity,
                                 self.four.fidelity - self.three.fidelity,
                                 self.three.valid.astype(float)]))


def compare_models(s: Scenario, t_f_list, workers=None) -> ModelComparison:
    """Same protocol and parameters on the reduced and the full model."""
    return ModelComparison(sweep_tf(s.with_model(3), t_f_list, workers),
                           sweep_tf(s.with_model(4), t_f_list, workers))


def parse_tf_grid(text):
    """``a:b:n`` (linear) or ``a:b:nlog`` (logarithmic) into an array of t_f."""
    try:
        a, b, n = text.split(":")
        log = n.endswith("log")
        n = int(n[:-3] if log else n)
        a, b = float(a), float(b)
    except ValueError:
        raise ValueError(f"bad t_f grid {text!r}; expected a:b:n or a:b:nlog") from None
    if n < 1 or a <= 0 and log:
        raise ValueError(f"bad t_f grid {text!r}")
    return np.geomspace(a, b, n) if log else np.linspace(a, b, n)
