"""Counterdiabatic (transitionless) correction to a swept Hamiltonian.

For H0(t) = sum_k E_k |k><k| the correction is

    H_CD = i sum_{n != k} |n><n| dH0/dt |k><k| / (E_k - E_n)

Only the |1><1| entry of H0 depends on time, so dH0/dt = rate * P_11 in both
the bare and the dressed frame.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DegeneracyError, DomainError
from .model import Hamiltonian, build_h, dressed_basis, to_dressed_frame
from .protocols import SweepProtocol, sweep_rate, sweep_value

DEGENERACY_FLOOR = 1e-9


def all_pairs(n):
    return frozenset(combinations(range(1, n + 1), 2))


@dataclass(frozen=True)
class CdScheme:
    """How the CD term is applied.

    ``mask`` holds 1-based unordered level pairs (i, j) whose H_CD^(i,j)
    correction is kept; ``None`` keeps all of them.  ``tau_switch``, when
    given, overrides the protocol's own split point.
    """

    frame: str = "bare"
    mask: frozenset | None = None
    tau_switch: float | None = None

    def __post_init__(self):
        if self.frame not in ("bare", "dressed"):
            raise DomainError(f"frame must be 'bare' or 'dressed', got {self.frame!r}")
        if self.mask is not None:
            pairs = frozenset(tuple(sorted(p)) for p in self.mask)
            for i, j in pairs:
                if i == j or min(i, j) < 1:
                    raise DomainError(f"invalid mask pair {(i, j)}")
            object.__setattr__(self, "mask", pairs)

    def validate(self, n):
        if self.mask is not None and any(j > n for _, j in self.mask):
            raise DomainError(f"mask {sorted(self.mask)} exceeds dimension {n}")
        if self.frame == "dressed" and n != 4:
            raise DomainError("the dressed frame needs the four-level model")


def cd_term(h0, dh0, floor=DEGENERACY_FLOOR, tau=None):
    """Counterdiabatic matrix for Hamiltonian ``h0`` with time derivative ``dh0``."""
    h0 = np.asarray(h0, dtype=complex)
    energies, vecs = np.linalg.eigh(h0)
    gaps = energies[None, :] - energies[:, None]  # gaps[n, k] = E_k - E_n
    off = ~np.eye(len(energies), dtype=bool)
    small = np.abs(gaps) < floor
    if np.any(small & off):
        n, k = np.argwhere(small & off)[0]
        raise DegeneracyError(
            f"levels {n} and {k} are degenerate (gap {abs(gaps[n, k]):.3g} < {floor:g})",
            pair=(int(n), int(k)), tau=tau,
        )
    coupling = vecs.conj().T @ np.asarray(dh0, dtype=complex) @ vecs
    inner = np.where(off, coupling / np.where(off, gaps, 1.0), 0.0)
    out = 1j * vecs @ inner @ vecs.conj().T
    # exact Hermitian symmetrisation of round-off
    return 0.5 * (out + out.conj().T)


def mask_terms(h_cd, mask):
    """Zero every off-diagonal (i, j) correction not listed in ``mask`` (1-based)."""
    m = np.asarray(h_cd, dtype=complex)
    keep = np.eye(m.shape[0], dtype=bool)
    for i, j in mask:
        if not (1 <= i <= m.shape[0] and 1 <= j <= m.shape[0]):
            raise DomainError(f"mask pair {(i, j)} out of range")
        keep[i - 1, j - 1] = keep[j - 1, i - 1] = True
    out = np.where(keep, m, 0.0)
    if isinstance(h_cd, Hamiltonian):
        return Hamiltonian(out, h_cd.labels)
    return out


def bare_hamiltonian(model, m, d, p: SweepProtocol, tau, frame="bare"):
    """H0 at ``tau`` in the requested frame."""
    h = build_h(model, sweep_value(p, tau), m, d)
    if frame == "dressed":
        h = to_dressed_frame(h, dressed_basis(m, d))
    return h


def h_cd(model, m, d, p: SweepProtocol, tau, scheme: CdScheme | None = None) -> Hamiltonian:
    scheme = scheme or CdScheme()
    h0 = bare_hamiltonian(model, m, d, p, tau, scheme.frame)
    scheme.validate(h0.dimension)
    dh0 = np.zeros((h0.dimension, h0.dimension))
    dh0[0, 0] = sweep_rate(p, tau)
    out = Hamiltonian(cd_term(h0, dh0, tau=tau), h0.labels)
    if scheme.mask is not None:
        out = mask_terms(out, scheme.mask)
    return out


def cd_active(p: SweepProtocol, tau, scheme: CdScheme):
    switch = scheme.tau_switch if scheme.tau_switch is not None else p.tau_switch
    return tau >= switch


def total_hamiltonian(model, m, d, p: SweepProtocol, tau, scheme: CdScheme | None = None) -> Hamiltonian:
    """H0 + H_CD, with the correction off before the split point."""
    if scheme is None:
        return bare_hamiltonian(model, m, d, p, tau)
    h0 = bare_hamiltonian(model, m, d, p, tau, scheme.frame)
    if not cd_active(p, tau, scheme):
        return h0
    return Hamiltonian(h0.matrix + h_cd(model, m, d, p, tau, scheme).matrix, h0.labels)


@dataclass
class CdPulses:
    """Imaginary parts of the H_CD^(i,j) elements over a tau grid."""

    grid: np.ndarray
    pairs: list = field(default_factory=list)
    values: np.ndarray = None

    def peak(self, pair):
        k = self.pairs.index(tuple(sorted(pair)))
        return float(np.max(np.abs(self.values[:, k])))

    def columns(self):
        return ["tau"] + [f"ImHcd_{i}{j}" for i, j in self.pairs], np.column_stack([self.grid, self.values])


def cd_pulses(model, m, d, p: SweepProtocol, n_samples=1001, scheme: CdScheme | None = None):
    scheme = scheme or CdScheme()
    grid = np.linspace(0.0, 1.0, n_samples)
    n = 4 if scheme.frame == "dressed" else model
    pairs = sorted(all_pairs(n))
    vals = np.empty((n_samples, len(pairs)))
    for r, tau in enumerate(grid):
        c = h_cd(model, m, d, p, tau, scheme).matrix
        vals[r] = [c[i - 1, j - 1].imag for i, j in pairs]
    return CdPulses(grid, pairs, vals)


def hamiltonian_schedule(model, m, d, p: SweepProtocol, scheme: CdScheme | None = None):
    """Fast ``tau -> ndarray`` evaluation of ``total_hamiltonian``.

    The delta_p-independent part of H0 is built once; only the |1><1| entry
    is updated per call.  Returns (schedule, basis labels).
    """
    frame = scheme.frame if scheme is not None else "bare"
    base = bare_hamiltonian(model, m, d, p, 0.0, frame)
    if scheme is not None:
        scheme.validate(base.dimension)
    const = base.matrix.copy()
    const[0, 0] -= sweep_value(p, 0.0)
    n = base.dimension
    if scheme is not None:
        switch = scheme.tau_switch if scheme.tau_switch is not None else p.tau_switch
        keep = None
        if scheme.mask is not None:
            keep = np.eye(n, dtype=bool)
            for i, j in scheme.mask:
                keep[i - 1, j - 1] = keep[j - 1, i - 1] = True

    def schedule(tau):
        tau = min(max(tau, 0.0), 1.0)
        h = const.copy()
        h[0, 0] += p.value(tau)
        if scheme is None or tau < switch:
            return h
        dh = np.zeros((n, n))
        dh[0, 0] = p.derivative(tau) / p.t_f
        c = cd_term(h, dh, tau=tau)
        if keep is not None:
            c = np.where(keep, c, 0.0)
        return h + c

    schedule.labels = base.labels
    return schedule, base.labels
