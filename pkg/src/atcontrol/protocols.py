"""Pump-detuning schedules delta_p(tau) on rescaled time tau = t / t_f.

Every protocol knows its value and its exact tau-derivative; ``sweep_rate``
divides by the duration to get d(delta_p)/dt.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

from .errors import DomainError

TAU_SLACK = 1e-12


def _check_tau(tau):
    if not -TAU_SLACK <= tau <= 1 + TAU_SLACK:
        raise DomainError(f"tau must lie in [0, 1], got {tau}")
    return min(max(tau, 0.0), 1.0)


@dataclass(frozen=True)
class SweepProtocol:
    t_f: float = 1.0

    kind = "abstract"
    # tau below which the counterdiabatic term is switched off
    tau_switch = 0.0

    def value(self, tau):
        raise NotImplementedError

    def derivative(self, tau):
        """d(delta_p)/d(tau)."""
        raise NotImplementedError

    def with_duration(self, t_f):
        return replace(self, t_f=t_f)

    def cd_active(self, tau):
        return tau >= self.tau_switch

    def params(self):
        """Flat parameter dict used by scenario files and dataset headers."""
        return {"kind": self.kind, "t_f": self.t_f}


@dataclass(frozen=True)
class Linear(SweepProtocol):
    a: float = 10.0
    kind = "linear"

    def value(self, tau):
        return self.a * (2 * tau - 1)

    def derivative(self, tau):
        return 2 * self.a

    def params(self):
        return {**super().params(), "a": self.a}


@dataclass(frozen=True)
class Arctan(SweepProtocol):
    a: float = 10.0
    b: float = 20.0
    c: float = 19.2
    kind = "arctan"

    def value(self, tau):
        return self.a * math.atan(self.b * tau) - self.c

    def derivative(self, tau):
        bt = self.b * tau
        return self.a * self.b / (1 + bt * bt)

    def params(self):
        return {**super().params(), "a": self.a, "b": self.b, "c": self.c}


@dataclass(frozen=True)
class RolandCerf(SweepProtocol):
    """Local-adiabatic sweep centred on -d, with half-width ``a`` at the ends.

    ``beta * omega_p`` is the |1>-|T> gap that sets the slow central region.
    """

    a: float = 10.0
    d: float = 4.68
    beta: float = math.sqrt(0.13)
    omega_p: float = 0.24
    kind = "roland_cerf"

    def __post_init__(self):
        if not self.omega_p > 0:
            raise DomainError("Roland-Cerf sweep needs omega_p > 0")
        if not self.beta > 0:
            raise DomainError("Roland-Cerf sweep needs beta > 0")

    @property
    def gap(self):
        return self.beta * self.omega_p

    def _denominator(self, tau):
        eps = self.gap / (2 * self.a)
        return 4 * tau * (1 - tau) + eps * eps

    def value(self, tau):
        return self.gap * (1 - 2 * tau) / (2 * math.sqrt(self._denominator(tau))) - self.d

    def derivative(self, tau):
        # d/dtau of g u / (2 sqrt(D)) with u = 1 - 2 tau, D + u^2 = 1 + eps^2
        eps = self.gap / (2 * self.a)
        return -self.gap * (1 + eps * eps) / self._denominator(tau) ** 1.5

    def params(self):
        return {**super().params(), "a": self.a, "d": self.d,
                "beta": self.beta, "omega_p": self.omega_p}


@dataclass(frozen=True)
class Scaled(SweepProtocol):
    """Generic ``delta_p = s * f(tau)`` with a user-supplied sweep function."""

    s: float = 1.0
    f: Callable[[float], float] = lambda tau: 2 * tau - 1
    df: Callable[[float], float] = lambda tau: 2.0
    kind = "scaled"

    def value(self, tau):
        return self.s * self.f(tau)

    def derivative(self, tau):
        return self.s * self.df(tau)

    def params(self):
        return {**super().params(), "s": self.s}


@dataclass(frozen=True)
class _Wrapper(SweepProtocol):
    inner: SweepProtocol = None

    def __post_init__(self):
        object.__setattr__(self, "t_f", self.inner.t_f)

    def with_duration(self, t_f):
        return replace(self, inner=self.inner.with_duration(t_f))

    def value(self, tau):
        return self.inner.value(tau)

    def derivative(self, tau):
        return self.inner.derivative(tau)

    @property
    def base(self):
        return self.inner.base if isinstance(self.inner, _Wrapper) else self.inner


@dataclass(frozen=True)
class Clamped(_Wrapper):
    tau_stop: float = 1.0
    kind = "clamped"

    @property
    def tau_switch(self):
        return self.inner.tau_switch

    def value(self, tau):
        return self.inner.value(min(tau, self.tau_stop))

    def derivative(self, tau):
        # one-sided: the active piece past the breakpoint is constant
        if tau >= self.tau_stop:
            return 0.0
        return self.inner.derivative(tau)

    def params(self):
        return {**self.inner.params(), "tau_stop": self.tau_stop}


@dataclass(frozen=True)
class Composite(_Wrapper):
    """Schedule unchanged; the CD term only acts for tau >= tau_switch."""

    switch: float = 0.0
    kind = "composite"

    @property
    def tau_switch(self):
        return self.switch

    def params(self):
        return {**self.inner.params(), "tau_switch": self.switch}


def sweep_value(p: SweepProtocol, tau):
    return p.value(_check_tau(tau))


def sweep_rate(p: SweepProtocol, tau):
    """d(delta_p)/dt in ns^-2."""
    return p.derivative(_check_tau(tau)) / p.t_f


def clamp_after(p: SweepProtocol, tau_stop):
    if not 0 < tau_stop < 1:
        raise DomainError(f"tau_stop must lie in (0, 1), got {tau_stop}")
    return Clamped(inner=p, tau_stop=tau_stop)


def split_diabatic_cd(p: SweepProtocol, tau_switch):
    if not 0 <= tau_switch <= 1:
        raise DomainError(f"tau_switch must lie in [0, 1], got {tau_switch}")
    return Composite(inner=p, switch=tau_switch)


def protocol_from_params(params: dict, beta=None, omega_p=None) -> SweepProtocol:
    """Inverse of ``SweepProtocol.params`` (plus defaults for RC coupling)."""
    params = dict(params)
    kind = params.pop("kind")
    t_f = float(params.pop("t_f", 1.0))
    tau_stop = params.pop("tau_stop", None)
    tau_switch = params.pop("tau_switch", None)
    if kind == "linear":
        p = Linear(t_f=t_f, a=float(params.get("a", 10.0)))
    elif kind == "arctan":
        p = Arctan(t_f=t_f, **{k: float(params[k]) for k in ("a", "b", "c") if k in params})
    elif kind == "roland_cerf":
        kw = {k: float(params[k]) for k in ("a", "d", "beta", "omega_p") if k in params}
        if beta is not None:
            kw.setdefault("beta", beta)
        if omega_p is not None:
            kw.setdefault("omega_p", omega_p)
        p = RolandCerf(t_f=t_f, **kw)
    else:
        raise DomainError(f"unknown protocol kind {kind!r}")
    if tau_stop is not None:
        p = clamp_after(p, float(tau_stop))
    if tau_switch is not None:
        p = split_diabatic_cd(p, float(tau_switch))
    return p
