"""Columnar datasets behind each figure, with the published parameters baked in."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..counterdiabatic import cd_pulses
from ..errors import NotFoundError
from ..protocols import Arctan, Linear, RolandCerf
from ..spectral import spectral_flow, write_columns
from . import presets as P
from .runs import compare_models, dataset_header, run_scenario, sweep_tf

FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6")

# default t_f grids for the fidelity-vs-duration datasets
FIG4_GRID = np.geomspace(1.0, 1000.0, 20)
FIG6_GRID = np.linspace(0.5, 5.0, 10)

_NO_TF = "not applicable (instantaneous spectrum)"


def _flow_files(outdir, tag, model, delta_c, b, c, d, samples):
    m, dr = P.manifold(), P.drive(delta_c)
    protocols = {
        "linear": Linear(a=P.SWEEP_A),
        "arctan": Arctan(a=P.SWEEP_A, b=b, c=c),
        "roland_cerf": RolandCerf(a=P.SWEEP_A, d=d, beta=m.beta, omega_p=dr.omega_p),
    }
    paths = []
    for name, p in protocols.items():
        flow = spectral_flow(model, m, dr, p, n_samples=samples)
        head = {"figure": tag, "model": model, "units": "ns^-1", "alpha_sq": P.ALPHA_SQ,
                "delta_so": P.DELTA_SO, "omega_p": dr.omega_p, "omega_c": dr.omega_c,
                "delta_c": delta_c, **p.params(), "validity_flag": _NO_TF}
        head.pop("t_f", None)
        path = outdir / f"{tag}_{name}.csv"
        flow.to_csv(path, header=head)
        paths.append(path)
    return paths


def fig2(outdir, samples=2001):
    """Three-level instantaneous eigenvalues at delta_c = 100."""
    f = P.FIG2
    return _flow_files(outdir, "fig2", 3, f["delta_c"], f["b"], f["c"], f["d"], samples)


def fig3(outdir, samples=2001):
    """Four-level instantaneous eigenvalues at delta_c = 1."""
    f = P.FIG3
    return _flow_files(outdir, "fig3", 4, f["delta_c"], f["b"], f["c"], f["d"], samples)


def fig4(outdir, grid=FIG4_GRID, workers=None, population_t_f=1000.0):
    """Fidelity vs t_f for the three protocols in both models, plus the
    three-level populations at ``population_t_f``."""
    paths = []
    for kind in ("linear", "arctan", "roland_cerf"):
        s = P.three_level(kind)
        cmp = compare_models(s, grid, workers)
        names, rows = cmp.columns()
        path = outdir / f"fig4_fidelity_{kind}.csv"
        write_columns(path, names, rows, dataset_header(
            s, t_f="swept", max_abs_dF=cmp.max_abs_diff,
            validity_flag="per point, column valid (t_f < 1/gamma_t)"))
        paths.append(path)
        pop = s.with_t_f(population_t_f)
        path = outdir / f"fig4_populations_{kind}.csv"
        run_scenario(pop, out=path)
        paths.append(path)
    return paths


def fig5(outdir, t_f=1.0):
    """Autler-Townes regime populations: bare-frame CD, dressed-frame CD
    measured in the dressed basis, and the same measured in the bare basis."""
    bare = P.autler_townes("bare", t_f)
    dressed = P.autler_townes("dressed", t_f)
    paths = [outdir / "fig5a_bare_cd.csv", outdir / "fig5b_dressed_cd_dressed_basis.csv",
             outdir / "fig5c_dressed_cd_bare_basis.csv"]
    run_scenario(bare, out=paths[0])
    res = run_scenario(dressed)
    res.trajectory.to_csv(paths[1], header=dataset_header(dressed, measured_in="dressed"))
    res.measured.to_csv(paths[2], target="T", header=dataset_header(dressed, measured_in="bare"))
    return paths


def fig6(outdir, grid=FIG6_GRID, samples=1001, workers=None):
    """CD pulse shapes (imaginary parts) and infidelity under term truncation."""
    grid = np.asarray(grid, dtype=float)
    base = P.arctan_cd3(t_f=1.0)
    pulses = cd_pulses(3, base.manifold, base.drive, base.protocol, n_samples=samples)
    names, rows = pulses.columns()
    paths = [outdir / "fig6a_cd_pulses.csv"]
    write_columns(paths[0], names, rows, dataset_header(base))
    variants = {"full": None, "no23": {(1, 2), (1, 3)}, "only13": {(1, 3)}}
    cols, names = [grid], ["t_f"]
    for tag, mask in variants.items():
        res = sweep_tf(P.arctan_cd3(mask=mask), grid, workers)
        cols.append(res.infidelity)
        names.append(f"I_{tag}")
    paths.append(outdir / "fig6b_infidelity.csv")
    write_columns(paths[1], names, np.column_stack(cols),
                  dataset_header(base, t_f="swept", cd_mask="see columns",
                                 validity_flag=bool(np.all(grid < 1 / base.gamma_t))))
    return paths


def reproduce(figure_id, outdir=".", **kw):
    """Write the datasets of one figure into ``outdir``; returns the paths."""
    fn = {"fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5, "fig6": fig6}.get(figure_id)
    if fn is None:
        raise NotFoundError(f"unknown figure {figure_id!r}; choose from {FIGURES}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return fn(outdir, **kw)

