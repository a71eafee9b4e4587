"""Parameter sets of the lithium-dimer singlet-triplet experiment and the
named scenarios built from them."""
from __future__ import annotations

from ..counterdiabatic import CdScheme
from ..model import DriveParams, manifold_from_mixing
from ..protocols import Arctan, Linear, clamp_after, split_diabatic_cd
from .scenario import Scenario, roland_cerf_for

ALPHA_SQ = 0.87
DELTA_SO = 4.71
OMEGA_P = 0.24
OMEGA_C = 3.8
GAMMA_S = 0.06
GAMMA_T = 0.10

SWEEP_A = 10.0
LINEAR_TAU_STOP = 0.3
AT_SPLIT = 0.2

# arctan (b, c) and Roland-Cerf bias d for the flows at delta_c = 100 and 1
FIG2 = dict(delta_c=100.0, b=20.0, c=19.2, d=4.68)
FIG3 = dict(delta_c=1.0, b=10.0, c=18.0, d=3.41)


def manifold():
    return manifold_from_mixing(ALPHA_SQ, DELTA_SO)


def drive(delta_c, omega_p=OMEGA_P, omega_c=OMEGA_C):
    return DriveParams(omega_p, omega_c, delta_c)


def three_level(protocol_kind, delta_c=30.0, t_f=1000.0, model=3, name=None, d=None):
    """Adiabatic sweep scenarios without CD, for the 3- vs 4-level comparison."""
    m, dr = manifold(), drive(delta_c)
    if protocol_kind == "linear":
        p = clamp_after(Linear(a=SWEEP_A), LINEAR_TAU_STOP)
    elif protocol_kind == "arctan":
        p = Arctan(a=SWEEP_A, b=FIG2["b"], c=FIG2["c"])
    elif protocol_kind == "roland_cerf":
        p = roland_cerf_for(m, dr, a=SWEEP_A, d=d, model=model)
    else:
        raise ValueError(f"unknown protocol {protocol_kind!r}")
    return Scenario(model=model, manifold=m, drive=dr, protocol=p, t_f=t_f,
                    name=name or f"{protocol_kind}{model}")


def arctan_cd3(t_f=1.0, mask=None, delta_c=30.0):
    return Scenario(model=3, manifold=manifold(), drive=drive(delta_c),
                    protocol=Arctan(a=SWEEP_A, b=FIG2["b"], c=FIG2["c"]), t_f=t_f,
                    cd=CdScheme("bare", mask=mask), name="at3-cd" if mask is None else "at3-cd-masked")


def autler_townes(frame="bare", t_f=1.0):
    """Four-level arctan sweep at delta_c = 1: diabatic until tau = 0.2, then CD."""
    p = split_diabatic_cd(Arctan(a=SWEEP_A, b=FIG3["b"], c=FIG3["c"]), AT_SPLIT)
    return Scenario(model=4, manifold=manifold(), drive=drive(FIG3["delta_c"]), protocol=p,
                    t_f=t_f, cd=CdScheme(frame), name=f"at4-cd-{frame}")


_SWEEPS = {"lz": "linear", "at": "arctan", "rc": "roland_cerf"}

PRESETS = {
    **{f"{k}{n}": (lambda k=k, n=n: three_level(_SWEEPS[k], t_f=50.0 if k == "rc" else 1000.0,
                                                 model=n, name=f"{k}{n}"))
       for n in (3, 4) for k in _SWEEPS},
    "at3-cd": arctan_cd3,
    "at3-cd13": lambda: arctan_cd3(mask={(1, 3)}),
    "at4-cd-bare": lambda: autler_townes("bare"),
    "at4-cd-dressed": lambda: autler_townes("dressed"),
}


def preset(name):
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


