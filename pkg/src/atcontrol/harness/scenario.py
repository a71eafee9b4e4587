"""Scenario definition and its flat key-value file format.

A scenario file is an INI file with a single ``[scenario]`` section::

    [scenario]
    units = ns^-1
    model = 3
    alpha_sq = 0.87
    delta_so = 4.71
    omega_p = 0.24
    omega_c = 3.8
    delta_c = 30
    kind = roland_cerf
    a = 10
    d = auto
    t_f = 50
    cd = none

``d = auto`` places the Roland-Cerf centre on the |1>-|T> avoided crossing.
"""
from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, replace

from ..counterdiabatic import CdScheme
from ..errors import ScenarioError
from ..model import DriveParams, ManifoldParams, manifold_from_mixing
from ..protocols import RolandCerf, SweepProtocol, protocol_from_params
from ..spectral import crossing_detuning

UNITS = "ns^-1"
SECTION = "scenario"


def roland_cerf_for(m, drive, a=10.0, d=None, model=3):
    """Roland-Cerf sweep for a system; the bias defaults to the |1>-|T> crossing."""
    if d is None:
        d = -crossing_detuning(model, m, drive, "T")
    return RolandCerf(a=a, d=d, beta=m.beta, omega_p=drive.omega_p)


@dataclass(frozen=True)
class Scenario:
    model: int
    manifold: ManifoldParams
    drive: DriveParams
    protocol: SweepProtocol
    t_f: float
    cd: CdScheme | None = None
    target: str = "T"
    initial: str = "1"
    gamma_s: float = 0.06
    gamma_t: float = 0.10
    name: str = "scenario"
    t_f_grid: tuple = field(default=())

    def __post_init__(self):
        if self.model not in (3, 4):
            raise ScenarioError(f"model must be 3 or 4, got {self.model!r}")
        if not self.t_f > 0:
            raise ScenarioError(f"t_f must be positive, got {self.t_f}")
        if self.cd is not None:
            self.cd.validate(self.model)
        if self.protocol.t_f != self.t_f:
            object.__setattr__(self, "protocol", self.protocol.with_duration(self.t_f))
        object.__setattr__(self, "t_f_grid", tuple(float(x) for x in self.t_f_grid))

    @property
    def valid(self):
        """Protocol finishes before the target state decays."""
        return self.t_f < 1.0 / self.gamma_t

    def with_t_f(self, t_f):
        return replace(self, t_f=float(t_f))

    def with_model(self, model):
        return replace(self, model=model)

    def params(self):
        out = {
            "name": self.name,
            "units": UNITS,
            "model": self.model,
            "alpha_sq": float(f"{self.manifold.alpha**2:.15g}"),
            "delta_so": self.manifold.delta_so,
            "omega_p": self.drive.omega_p,
            "omega_c": self.drive.omega_c,
            "delta_c": self.drive.delta_c,
        }
        proto = self.protocol.params()
        proto.pop("beta", None)
        proto.pop("omega_p", None)
        out.update(proto)
        out["t_f"] = self.t_f
        out["cd"] = self.cd.frame if self.cd else "none"
        if self.cd and self.cd.mask is not None:
            out["cd_mask"] = ", ".join(f"{i}-{j}" for i, j in sorted(self.cd.mask))
        if self.cd and self.cd.tau_switch is not None:
            out["cd_tau_switch"] = self.cd.tau_switch
        out.update(target=self.target, initial=self.initial,
                   gamma_s=self.gamma_s, gamma_t=self.gamma_t)
        if self.t_f_grid:
            out["t_f_grid"] = ", ".join(f"{x:g}" for x in self.t_f_grid)
        return out


def _floats(text):
    return tuple(float(x) for x in text.replace(",", " ").split())


def _mask(text):
    pairs = set()
    for item in text.replace(",", " ").split():
        try:
            i, j = item.split("-")
            pairs.add((int(i), int(j)))
        except ValueError:
            raise ScenarioError(f"bad cd_mask entry {item!r}; expected i-j") from None
    return frozenset(pairs)


def scenario_from_mapping(kv) -> Scenario:
    kv = {k.strip().lower(): str(v).strip() for k, v in kv.items()}
    if kv.get("units", UNITS) != UNITS:
        raise ScenarioError(f"only units = {UNITS} are supported, got {kv['units']!r}")
    try:
        model = int(kv.get("model", 3))
        m = manifold_from_mixing(float(kv.get("alpha_sq", 0.87)), float(kv.get("delta_so", 4.71)))
        drive = DriveParams(float(kv.get("omega_p", 0.24)), float(kv.get("omega_c", 3.8)),
                            float(kv.get("delta_c", 30.0)))
        t_f = float(kv["t_f"])
        proto = {"kind": kv.get("kind", "arctan"), "t_f": t_f}
        for key in ("a", "b", "c", "tau_stop", "tau_switch"):
            if kv.get(key):
                proto[key] = float(kv[key])
        if proto["kind"] == "roland_cerf":
            bias = kv.get("d", "auto")
            proto["d"] = (-crossing_detuning(model, m, drive, "T") if bias == "auto"
                          else float(bias))
        p = protocol_from_params(proto, beta=m.beta, omega_p=drive.omega_p)
        cd = None
        frame = kv.get("cd", "none")
        if frame != "none":
            mask = _mask(kv["cd_mask"]) if kv.get("cd_mask") else None
            switch = float(kv["cd_tau_switch"]) if kv.get("cd_tau_switch") else None
            cd = CdScheme(frame, mask=mask, tau_switch=switch)
        return Scenario(
            model=model, manifold=m, drive=drive, protocol=p, t_f=t_f, cd=cd,
            target=kv.get("target", "T"), initial=kv.get("initial", "1"),
            gamma_s=float(kv.get("gamma_s", 0.06)), gamma_t=float(kv.get("gamma_t", 0.10)),
            name=kv.get("name", "scenario"), t_f_grid=_floats(kv.get("t_f_grid", "")),
        )
    except KeyError as e:
        raise ScenarioError(f"missing scenario key {e.args[0]!r}") from None
    except ScenarioError:
        raise
    except (ValueError, TypeError) as e:
        raise ScenarioError(str(e)) from e


def loads(text) -> Scenario:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ScenarioError(f"unreadable scenario: {e}") from e
    if not cp.has_section(SECTION):
        raise ScenarioError(f"scenario file needs a [{SECTION}] section")
    return scenario_from_mapping(dict(cp[SECTION]))


def load(path) -> Scenario:
    with open(path) as fh:
        return loads(fh.read())


def dumps(s: Scenario) -> str:
    cp = configparser.ConfigParser()
    cp[SECTION] = {k: (f"{v!r}" if isinstance(v, float) else str(v)) for k, v in s.params().items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def dump(s: Scenario, path):
    with open(path, "w") as fh:
        fh.write(dumps(s))

