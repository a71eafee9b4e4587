import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atcontrol.counterdiabatic import CdScheme, hamiltonian_schedule
from atcontrol.errors import DomainError, IntegrationError, StiffnessError
from atcontrol.model import (
    BARE4,
    DRESSED4,
    DriveParams,
    dressed_basis,
    dressing_matrix,
    manifold_from_mixing,
)
from atcontrol.propagator import (
    Trajectory,
    basis_state,
    evolve,
    fidelity,
    infidelity,
    measure_bare,
    measure_dressed,
)
from atcontrol.protocols import Arctan, Linear

M = manifold_from_mixing(0.87, 4.71)
D1 = DriveParams(0.24, 3.8, 1.0)


def _final(states, labels=BARE4):
    s = np.asarray(states, dtype=complex)
    return Trajectory(np.array([0.0]), s[None, :], labels)


def test_zero_hamiltonian():
    psi0 = np.array([0.6, 0.8j])
    tr = evolve(lambda tau: np.zeros((2, 2)), psi0, 3.0, n_out=11)
    np.testing.assert_array_equal(tr.states, np.tile(psi0, (11, 1)))
    assert tr.labels == ("0", "1")


@pytest.mark.parametrize("omega,t_f", [(1.0, 10.0), (3.8, 4.0), (0.24, 60.0)])
def test_resonant_rabi(omega, t_f):
    h = 0.5 * omega * np.array([[0, 1], [1, 0]])
    tr = evolve(lambda tau: h, np.array([1, 0j]), t_f, n_out=301)
    np.testing.assert_allclose(tr.populations[:, 1], np.sin(omega * tr.times / 2) ** 2, atol=1e-8)
    assert tr.norm_drift < 1e-9


def test_self_convergence():
    sched, labels = hamiltonian_schedule(4, M, D1, Arctan(a=10, b=10, c=18, t_f=3.0))
    psi0 = basis_state(labels, "1")
    a = evolve(sched, psi0, 3.0, n_out=2, tol=1e-10).final_state
    b = evolve(sched, psi0, 3.0, n_out=2, tol=5e-11).final_state
    assert np.max(np.abs(a - b)) < 10 * 1e-10


def test_time_reversal():
    p = Arctan(a=10, b=10, c=18, t_f=2.0)
    sched, labels = hamiltonian_schedule(4, M, D1, p)
    psi0 = basis_state(labels, "1")
    fwd = evolve(sched, psi0, 2.0, n_out=2).final_state
    # conjugated state under the reversed (real) schedule runs the clock backwards
    back = evolve(lambda tau: sched(1 - tau), fwd.conj(), 2.0, n_out=2).final_state.conj()
    np.testing.assert_allclose(back, psi0, atol=1e-7)


def test_fidelity_examples():
    assert fidelity(_final([0, 0, 1, 0]), "T") == 1
    assert fidelity(_final([1, 0, 0, 0]), "T") == 0
    assert fidelity(_final([2**-0.5, 0, 2**-0.5, 0]), "T") == pytest.approx(0.5)
    assert infidelity(_final([0, 0, 1, 0]), "T") == 0
    assert infidelity(_final([1, 0, 0, 0]), "T") == 1
    assert infidelity(_final([2**-0.5, 0, 2**-0.5, 0]), "T") == pytest.approx(0.5)
    with pytest.raises(DomainError):
        fidelity(_final([1, 0, 0, 0]), "X")


def test_input_checks():
    with pytest.raises(DomainError):
        evolve(lambda tau: np.eye(2), np.array([1, 1]), 1.0)
    with pytest.raises(DomainError):
        evolve(lambda tau: np.eye(2), np.array([1, 0]), 0.0)
    with pytest.raises(DomainError):
        basis_state(BARE4, "+")


def test_norm_budget_is_enforced():
    # a non-Hermitian generator leaks norm and must be reported, not renormalised
    with pytest.raises(IntegrationError):
        evolve(lambda tau: np.array([[0, 0], [0, -0.1j]]), np.array([0, 1 + 0j]), 1.0)


def test_step_underflow_is_reported(monkeypatch):
    from types import SimpleNamespace

    import atcontrol.propagator as prop

    def stuck(fun, span, y0, **kw):
        return SimpleNamespace(status=-1, t=np.array([0.0, 0.3]), y=np.zeros((2, 2)),
                               message="Required step size is less than spacing between numbers.")

    monkeypatch.setattr(prop, "solve_ivp", stuck)
    with pytest.raises(StiffnessError) as exc:
        evolve(lambda tau: np.eye(2), np.array([1, 0j]), 2.0)
    assert exc.value.tau == pytest.approx(0.15)


def test_measure_pure_plus_at_resonance():
    dp = dressed_basis(M, DriveParams(0.24, 3.8, 0.0))
    tr = measure_bare(_final([0, 0, 1, 0], DRESSED4), dp)
    assert tr.labels == BARE4
    assert tr.population("T")[0] == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=30)
@given(st.lists(st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False),
                min_size=4, max_size=4).filter(lambda v: np.linalg.norm(v) > 0.1))
def test_measure_round_trip(v):
    psi = np.asarray(v) / np.linalg.norm(v)
    dp = dressed_basis(M, D1)
    tr = _final(psi, DRESSED4)
    back = measure_dressed(measure_bare(tr, dp), dp)
    np.testing.assert_allclose(back.states, tr.states, atol=1e-12)
    with pytest.raises(DomainError):
        measure_bare(measure_bare(tr, dp), dp)


def test_basis_covariance():
    """Dressed-frame evolution measured bare equals bare evolution of the same H."""
    p = Arctan(a=10, b=10, c=18, t_f=1.0)
    dp = dressed_basis(M, D1)
    r = dressing_matrix(dp)
    sched_d, labels = hamiltonian_schedule(4, M, D1, p, CdScheme("dressed"))
    tr_d = evolve(sched_d, basis_state(labels, "1"), 1.0, n_out=51, labels=labels)

    def bare_total(tau):
        return r @ sched_d(tau) @ r.T

    tr_b = evolve(bare_total, basis_state(BARE4, "1"), 1.0, n_out=51, labels=BARE4)
    np.testing.assert_allclose(measure_bare(tr_d, dp).states, tr_b.states, atol=1e-8)


def test_trajectory_columns(tmp_path):
    sched, labels = hamiltonian_schedule(4, M, D1, Linear(a=10, t_f=1.0))
    tr = evolve(sched, basis_state(labels), 1.0, n_out=5, labels=labels, metadata={"k": 1})
    names, rows = tr.columns("T")
    assert names == ["t", "P_1", "P_S", "P_T", "P_2", "F"]
    assert rows.shape == (5, 6)
    np.testing.assert_allclose(rows[:, 1:5].sum(axis=1), 1, atol=1e-9)
    tr.to_csv(tmp_path / "p.csv", target="T", header={"units": "ns^-1"})
    text = (tmp_path / "p.csv").read_text().splitlines()
    assert text[0] == "# units = ns^-1" and text[1] == "t,P_1,P_S,P_T,P_2,F"
    assert tr.metadata == {"k": 1}
