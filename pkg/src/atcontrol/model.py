"""Hamiltonians of the singlet-triplet system driven by pump and control lasers.

All frequencies are angular, in ns^-1, with hbar = 1.  The bare basis of the
four-level system is (|1>, |S>, |T>, |2>) with the zero of energy at |T>.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContractViolation,
    DegenerateBasisError,
    DomainError,
    EliminationWarning,
    SingularReductionError,
)

BARE4 = ("1", "S", "T", "2")
BARE3 = ("1", "S", "T")
DRESSED4 = ("1", "S", "+", "-")

HERMITIAN_TOL = 1e-12
# |delta_c| below this multiple of omega_c triggers EliminationWarning
ELIMINATION_RATIO = 5.0


def to_ghz(omega):
    """Convert an angular frequency in ns^-1 to GHz."""
    return omega / (2 * math.pi)


def from_ghz(nu):
    return 2 * math.pi * nu


@dataclass(frozen=True)
class ManifoldParams:
    """Spin-orbit mixed (|S>, |T>) manifold.

    ``alpha`` and ``beta`` are the real mixing amplitudes of the singlet and
    triplet components, ``delta_so`` the effective S-T splitting.
    """

    alpha: float
    beta: float
    delta_so: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if abs(self.alpha**2 + self.beta**2 - 1) > 1e-12:
            raise DomainError("alpha^2 + beta^2 must equal 1")
        if not self.delta_so > 0:
            raise DomainError(f"delta_so must be positive, got {self.delta_so}")

    @property
    def delta0(self):
        """Unperturbed singlet-triplet separation."""
        return (self.alpha**2 - self.beta**2) * self.delta_so

    @property
    def coupling(self):
        """Spin-orbit matrix element V."""
        return self.alpha * self.beta * self.delta_so

    @classmethod
    def from_splitting(cls, delta0, coupling):
        """Recover the mixing amplitudes from (Delta_0, V)."""
        delta_so = math.hypot(delta0, 2 * coupling)
        alpha_sq = 0.5 * (1 + delta0 / delta_so)
        return manifold_from_mixing(alpha_sq, delta_so)


@dataclass(frozen=True)
class DriveParams:
    omega_p: float
    omega_c: float
    delta_c: float

    def __post_init__(self):
        if self.omega_p < 0 or self.omega_c < 0:
            raise DomainError("Rabi frequencies must be non-negative")


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """A Hermitian matrix together with the names of its basis states."""

    matrix: np.ndarray
    labels: tuple = field(default=BARE4)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ContractViolation(f"expected a square matrix, got shape {m.shape}")
        if len(self.labels) != m.shape[0]:
            raise ContractViolation("labels do not match the matrix dimension")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dimension(self):
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __getitem__(self, idx):
        return self.matrix[idx]

    def hermiticity_error(self):
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise DomainError(f"unknown basis label {label!r}; basis is {self.labels}") from None


@dataclass(frozen=True)
class DressedPair:
    """Eigenstates |+-> = a|T> + b|2> of the control-driven (|T>, |2>) block.

    ``|+>`` is the upper eigenvalue.  The pair is a proper rotation by
    ``theta`` so the dressed frame reduces to the identity for a weak,
    blue-detuned control laser.
    """

    lambda_plus: float
    lambda_minus: float
    a_plus: float
    b_plus: float
    a_minus: float
    b_minus: float

    @property
    def rotation(self):
        """Columns are |+> and |-> expressed in (|T>, |2>)."""
        return np.array([[self.a_plus, self.a_minus], [self.b_plus, self.b_minus]])


def manifold_from_mixing(alpha_sq, delta_so):
    if not 0 < alpha_sq < 1:
        raise DomainError(f"alpha_sq must lie in (0, 1), got {alpha_sq}")
    if not delta_so > 0:
        raise DomainError(f"delta_so must be positive, got {delta_so}")
    return ManifoldParams(math.sqrt(alpha_sq), math.sqrt(1 - alpha_sq), delta_so)


def build_h4(delta_p, m: ManifoldParams, d: DriveParams) -> Hamiltonian:
    a, b = m.alpha, m.beta
    h = np.zeros((4, 4))
    h[0, 0] = delta_p + m.delta_so
    h[1, 1] = m.delta_so
    h[3, 3] = -d.delta_c
    h[0, 1] = h[1, 0] = a * d.omega_p / 2
    h[0, 2] = h[2, 0] = -b * d.omega_p / 2
    h[1, 3] = h[3, 1] = b * d.omega_c / 2
    h[2, 3] = h[3, 2] = a * d.omega_c / 2
    return Hamiltonian(h, BARE4)


def light_shift(m: ManifoldParams, d: DriveParams):
    """AC Stark shift of |T> from the off-resonant control laser."""
    if d.delta_c == 0:
        raise DomainError("light shift is undefined at delta_c = 0")
    return m.alpha**2 * d.omega_c**2 / (4 * d.delta_c)


def build_h3(delta_p, m: ManifoldParams, d: DriveParams) -> Hamiltonian:
    """Three-level Hamiltonian with |2> adiabatically eliminated."""
    if d.delta_c == 0:
        raise SingularReductionError("cannot eliminate |2> at delta_c = 0")
    if abs(d.delta_c) < ELIMINATION_RATIO * d.omega_c:
        warnings.warn(
            f"|delta_c| = {abs(d.delta_c):g} < {ELIMINATION_RATIO:g} * omega_c; "
            "the three-level reduction is unreliable",
            EliminationWarning,
            stacklevel=2,
        )
    a, b = m.alpha, m.beta
    x = d.omega_c**2 / (4 * d.delta_c)
    h = np.zeros((3, 3))
    h[0, 0] = delta_p + m.delta_so
    h[1, 1] = m.delta_so + b * b * x
    h[2, 2] = a * a * x
    h[0, 1] = h[1, 0] = a * d.omega_p / 2
    h[0, 2] = h[2, 0] = -b * d.omega_p / 2
    h[1, 2] = h[2, 1] = a * b * x
    return Hamiltonian(h, BARE3)


def build_h(model, delta_p, m, d) -> Hamiltonian:
    if model == 4:
        return build_h4(delta_p, m, d)
    if model == 3:
        return build_h3(delta_p, m, d)
    raise DomainError(f"model must be 3 or 4, got {model!r}")


def dressed_basis(m: ManifoldParams, d: DriveParams) -> DressedPair:
    if d.omega_c <= 0:
        raise DegenerateBasisError("dressed states need omega_c > 0")
    g = m.alpha * d.omega_c
    root = math.hypot(d.delta_c, g)
    theta = 0.5 * math.atan2(g, d.delta_c)
    c, s = math.cos(theta), math.sin(theta)
    return DressedPair(
        lambda_plus=(-d.delta_c + root) / 2,
        lambda_minus=(-d.delta_c - root) / 2,
        a_plus=c,
        b_plus=s,
        a_minus=-s,
        b_minus=c,
    )


def dressing_matrix(dp: DressedPair):
    """Orthogonal map from dressed (|1>,|S>,|+>,|->) to bare amplitudes."""
    r = np.eye(4)
    r[2:, 2:] = dp.rotation
    return r


def to_dressed_frame(h4: Hamiltonian, dp: DressedPair) -> Hamiltonian:
    if h4.labels != BARE4:
        raise DomainError(f"expected bare basis {BARE4}, got {h4.labels}")
    r = dressing_matrix(dp)
    return Hamiltonian(r.T @ h4.matrix @ r, DRESSED4)


def from_dressed_frame(h: Hamiltonian, dp: DressedPair) -> Hamiltonian:
    if h.labels != DRESSED4:
        raise DomainError(f"expected dressed basis {DRESSED4}, got {h.labels}")
    r = dressing_matrix(dp)
    return Hamiltonian(r @ h.matrix @ r.T, BARE4)
