"""Time-dependent Schroedinger equation for few-level state vectors."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, IntegrationError, StiffnessError
from .model import BARE4, DRESSED4, DressedPair, dressing_matrix
from .spectral import write_columns

NORM_BUDGET = 1e-9
STEP_SAFETY = 0.1


def basis_state(labels, label="1"):
    labels = tuple(labels)
    if label not in labels:
        raise DomainError(f"unknown basis label {label!r}; basis is {labels}")
    psi = np.zeros(len(labels), dtype=complex)
    psi[labels.index(label)] = 1.0
    return psi


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    labels: tuple
    metadata: dict = field(default_factory=dict)

    @property
    def t_f(self):
        return float(self.times[-1])

    @property
    def populations(self):
        return np.abs(self.states) ** 2

    @property
    def final_state(self):
        return self.states[-1]

    @property
    def norm_drift(self):
        return float(np.max(np.abs(np.sum(self.populations, axis=1) - 1)))

    def population(self, label):
        return self.populations[:, self._index(label)]

    def _index(self, label):
        if label not in self.labels:
            raise DomainError(f"unknown basis label {label!r}; basis is {self.labels}")
        return self.labels.index(label)

    def columns(self, target=None):
        names = ["t"] + [f"P_{lab}" for lab in self.labels]
        cols = [self.times, *self.populations.T]
        if target is not None:
            names.append("F")
            cols.append(self.population(target))
        return names, np.column_stack(cols)

    def to_csv(self, path_or_file, target=None, header=None):
        names, rows = self.columns(target)
        write_columns(path_or_file, names, rows, header)


def evolve(schedule, psi0, t_f, n_out=501, tol=1e-10, labels=None, metadata=None,
           max_norm_drift=NORM_BUDGET):
    """Integrate i dpsi/dt = H(t / t_f) psi over [0, t_f].

    ``schedule(tau)`` returns the Hamiltonian (array-like) at rescaled time
    tau.  Adaptive 8th-order Dormand-Prince stepping; the embedded error
    estimate is held to ``tol / 10`` per step so that the drift accumulated
    over ~10^5 steps of a 1000 ns sweep stays inside the norm budget.  No
    renormalisation is applied: a norm drift above ``max_norm_drift`` raises
    IntegrationError.
    """
    if not t_f > 0:
        raise DomainError(f"t_f must be positive, got {t_f}")
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.vdot(psi0, psi0).real - 1) > 1e-9:
        raise DomainError("initial state is not normalised")
    if labels is None:
        labels = (getattr(schedule, "labels", None) or getattr(schedule(0.0), "labels", None)
                  or tuple(str(k) for k in range(len(psi0))))

    def rhs(t, y):
        return -1j * (np.asarray(schedule(t / t_f)) @ y)

    times = np.linspace(0.0, t_f, n_out)
    sol = solve_ivp(rhs, (0.0, t_f), psi0, method="DOP853", t_eval=times,
                    rtol=tol * STEP_SAFETY, atol=tol * STEP_SAFETY * 1e-4)
    if sol.status != 0:
        tau = float(sol.t[-1] / t_f) if sol.t.size else 0.0
        if "step size" in sol.message.lower():
            raise StiffnessError(f"step size underflow at tau = {tau:.6g}: {sol.message}", tau=tau)
        raise IntegrationError(f"integration failed at tau = {tau:.6g}: {sol.message}", tau=tau)
    traj = Trajectory(times, sol.y.T.copy(), tuple(labels), dict(metadata or {}))
    drift = traj.norm_drift
    if drift > max_norm_drift:
        raise IntegrationError(f"norm drift {drift:.3g} exceeds {max_norm_drift:.3g}")
    return traj


def fidelity(traj: Trajectory, target="T"):
    """Final population of the target basis state."""
    return float(traj.populations[-1, traj._index(target)])


def infidelity(traj: Trajectory, target="T"):
    return 1.0 - fidelity(traj, target)


def measure_bare(traj: Trajectory, dp: DressedPair) -> Trajectory:
    """Rotate dressed-basis amplitudes back to (|1>, |S>, |T>, |2>)."""
    if traj.labels != DRESSED4:
        raise DomainError(f"expected dressed basis {DRESSED4}, got {traj.labels}")
    states = traj.states @ dressing_matrix(dp).T
    return replace(traj, states=states, labels=BARE4)


def measure_dressed(traj: Trajectory, dp: DressedPair) -> Trajectory:
    if traj.labels != BARE4:
        raise DomainError(f"expected bare basis {BARE4}, got {traj.labels}")
    states = traj.states @ dressing_matrix(dp)
    return replace(traj, states=states, labels=DRESSED4)
