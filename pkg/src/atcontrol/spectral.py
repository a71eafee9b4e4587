"""Instantaneous eigensystems along a sweep, tracked continuously in tau."""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize_scalar

from .errors import ContractViolation, NotFoundError, ResolutionError
from .model import build_h
from .protocols import SweepProtocol

OVERLAP_MIN = 0.9
MAX_REFINE = 12


def eigensystem(h):
    """Ascending eigenvalues and eigenvectors (columns) of a Hermitian matrix.

    Each eigenvector is rotated so its largest-magnitude component is real
    and positive.
    """
    m = np.asarray(h, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > 1e-10 * scale:
        raise ContractViolation("eigensystem requires a Hermitian matrix")
    energies, vecs = np.linalg.eigh(m)
    idx = np.argmax(np.abs(vecs), axis=0)
    pivots = vecs[idx, np.arange(vecs.shape[1])]
    vecs = vecs * (np.abs(pivots) / pivots)
    return energies, vecs


def _align(prev, vecs):
    """Permute and rephase ``vecs`` to maximise overlap with ``prev``.

    Returns (permutation, aligned vectors, worst |overlap|).
    """
    ov = prev.conj().T @ vecs
    rows, cols = linear_sum_assignment(-np.abs(ov))
    perm = cols[np.argsort(rows)]
    aligned = vecs[:, perm]
    diag = ov[np.arange(len(perm)), perm]
    aligned = aligned * (np.abs(diag) / np.where(diag == 0, 1, diag))
    return perm, aligned, float(np.min(np.abs(diag)))


def gauge_fix(frames):
    """Sequential maximal-overlap phase alignment of a stack of eigenframes.

    ``frames`` has shape (n_samples, n, n) with eigenvectors in columns and a
    fixed branch ordering; returns the rephased stack.
    """
    out = np.array(frames, dtype=complex)
    for i in range(1, len(out)):
        ov = np.einsum("ij,ij->j", out[i - 1].conj(), out[i])
        out[i] = out[i] * (np.abs(ov) / np.where(ov == 0, 1, ov))
    return out


@dataclass(frozen=True, eq=False)
class SpectralFlow:
    """Eigenvalues/eigenvectors on a tau grid.

    ``energies[i]`` is ascending.  ``branches[i, k]`` is the continuity label
    of the k-th eigenvalue at sample i; ``frames[i][:, k]`` its eigenvector,
    gauge-fixed along its branch.
    """

    grid: np.ndarray
    energies: np.ndarray
    frames: np.ndarray
    branches: np.ndarray
    labels: tuple

    @property
    def n_levels(self):
        return self.energies.shape[1]

    def branch_energy(self, label):
        cols = np.argmax(self.branches == label, axis=1)
        return self.energies[np.arange(len(self.grid)), cols]

    def branch_vectors(self, label):
        cols = np.argmax(self.branches == label, axis=1)
        return self.frames[np.arange(len(self.grid)), :, cols]

    def character(self, basis_label):
        """Weight of a bare basis state in each ascending eigenvector."""
        j = self.labels.index(basis_label)
        return np.abs(self.frames[:, j, :]) ** 2

    def to_csv(self, path_or_file, header=None):
        rows = np.column_stack([self.grid, self.energies])
        names = ["tau"] + [f"E_{k + 1}" for k in range(self.n_levels)]
        write_columns(path_or_file, names, rows, header)


def write_columns(path_or_file, names, rows, header=None):
    """Comma-separated table, '#'-prefixed header lines, 12 significant digits."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        for key, val in (header or {}).items():
            fh.write(f"# {key} = {val}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in rows:
            w.writerow([f"{x:.12g}" for x in row])
    finally:
        if own:
            fh.close()


def spectral_flow(model, m, d, p: SweepProtocol, n_samples=2001, max_refine=MAX_REFINE,
                  hamiltonian=None):
    """Track the instantaneous spectrum of H(delta_p(tau)) over tau in [0, 1].

    ``hamiltonian(tau)`` overrides the default builder (e.g. a dressed-frame
    Hamiltonian).  Intervals whose consecutive-frame overlap drops below 0.9
    are bisected, up to ``max_refine`` levels.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    if hamiltonian is None:
        def hamiltonian(tau):
            return build_h(model, p.value(tau), m, d)
    h0 = hamiltonian(0.0)
    labels = getattr(h0, "labels", None) or tuple(str(k) for k in range(len(h0)))

    cache = {}

    def solve(tau):
        if tau not in cache:
            cache[tau] = eigensystem(hamiltonian(tau))
        return cache[tau]

    base = np.linspace(0.0, 1.0, n_samples)
    e0, v0 = solve(0.0)
    taus, energies, frames, branches = [0.0], [e0], [v0], [np.arange(len(e0))]

    def advance(t0, t1, vprev, depth):
        e1, v1 = solve(t1)
        perm, aligned, worst = _align(vprev, v1)
        if worst >= OVERLAP_MIN:
            return [(t1, e1, v1, perm, aligned)]
        if depth >= max_refine:
            raise ResolutionError(
                f"eigenframe tracking did not converge on tau in [{t0:.6g}, {t1:.6g}]",
                interval=(t0, t1),
            )
        mid = 0.5 * (t0 + t1)
        left = advance(t0, mid, vprev, depth + 1)
        return left + advance(mid, t1, left[-1][4], depth + 1)

    # vbranch columns are ordered by branch label
    vbranch = v0.copy()
    for t0, t1 in zip(base[:-1], base[1:]):
        for tau, e1, v1, perm, aligned in advance(t0, t1, vbranch, 0):
            # perm[label] is the ascending column carrying that branch
            lab = np.empty_like(perm)
            lab[perm] = np.arange(len(perm))
            fixed = np.empty_like(v1)
            fixed[:, perm] = aligned
            taus.append(tau)
            energies.append(e1)
            frames.append(fixed)
            branches.append(lab)
            vbranch = aligned
    return SpectralFlow(
        grid=np.array(taus),
        energies=np.array(energies),
        frames=np.array(frames),
        branches=np.array(branches),
        labels=tuple(labels),
    )


def _gap_between(flow, pair):
    lo, hi = pair
    if not (0 <= lo < flow.n_levels and 0 <= hi < flow.n_levels) or lo == hi:
        raise NotFoundError(f"invalid level pair {pair}")
    return np.abs(flow.energies[:, hi] - flow.energies[:, lo])


def min_gap(flow: SpectralFlow, branch_pair, hamiltonian=None):
    """Location and size of the smallest gap between two ascending levels.

    ``branch_pair`` indexes levels in ascending energy order (0-based).  If
    ``hamiltonian(tau)`` is supplied the grid minimum is polished with a
    bounded scalar search.
    """
    gap = _gap_between(flow, branch_pair)
    mid, left, right = gap[1:-1], gap[:-2], gap[2:]
    # a flat stretch is not a minimum
    interior = np.flatnonzero((mid <= left) & (mid <= right) & ((mid < left) | (mid < right))) + 1
    if interior.size == 0:
        raise NotFoundError(f"no local gap minimum between levels {branch_pair}")
    i = interior[np.argmin(gap[interior])]
    tau, g = float(flow.grid[i]), float(gap[i])
    if hamiltonian is not None:
        lo, hi = sorted(branch_pair)

        def f(t):
            e = np.linalg.eigvalsh(np.asarray(hamiltonian(t)))
            return e[hi] - e[lo]

        res = minimize_scalar(f, bounds=(flow.grid[i - 1], flow.grid[i + 1]),
                              method="bounded", options={"xatol": 1e-12})
        if res.fun < g:
            tau, g = float(res.x), float(res.fun)
    return tau, g


@dataclass(frozen=True)
class AvoidedCrossing:
    tau: float
    gap: float
    levels: tuple
    partner: str


def avoided_crossings(flow: SpectralFlow, state="1", min_transfer=0.5, widen=4.0):
    """Avoided crossings traversed by the diabatic ``state`` along the flow.

    A crossing is a local minimum of an adjacent-level gap across which the
    weight of ``state`` hands over between the two levels.  On both sides,
    where the gap has opened to ``widen`` times its minimum, one level must
    carry at least ``min_transfer`` more of ``state`` than the other, and the
    favoured level must swap.  The partner is the bare state that exchanges
    weight with ``state``.
    """
    w = flow.character(state)
    j = flow.labels.index(state)
    found = []
    for lo in range(flow.n_levels - 1):
        gap = flow.energies[:, lo + 1] - flow.energies[:, lo]
        n = len(gap)
        mins = [i for i in range(n) if (i == 0 or gap[i] < gap[i - 1])
                and (i == n - 1 or gap[i] <= gap[i + 1])]
        for i in mins:
            if i == 0 or i == n - 1:
                continue
            # walk out until the gap has opened to `widen` times its minimum
            # (or the basin ends); a real crossing hands the weight over there
            a = i
            while a > 0 and gap[a - 1] > gap[a] and gap[a] < widen * gap[i]:
                a -= 1
            b = i
            while b < n - 1 and gap[b + 1] >= gap[b] and gap[b] < widen * gap[i]:
                b += 1
            before = w[a, lo] - w[a, lo + 1]
            after = w[b, lo] - w[b, lo + 1]
            if min(abs(before), abs(after)) < min_transfer or before * after > 0:
                continue
            # the other bare state exchanged with `state` at this crossing
            other = np.abs(flow.frames[i][:, lo]) ** 2 + np.abs(flow.frames[i][:, lo + 1]) ** 2
            other[j] = -1
            partner = flow.labels[int(np.argmax(other))]
            found.append(AvoidedCrossing(float(flow.grid[i]), float(gap[i]), (lo, lo + 1), partner))
    return sorted(found, key=lambda c: c.tau)


def crossing_detuning(model, m, d, partner="T", window=0.5):
    """Pump detuning at which |1> has its avoided crossing with ``partner``.

    The diabatic partner energy comes from the pump-free Hamiltonian; the
    crossing is the minimum of the smallest level spacing within ``window``
    of that estimate.
    """
    bare = np.asarray(build_h(model, 0.0, m, replace(d, omega_p=0.0)))[1:, 1:]
    j = build_h(model, 0.0, m, d).index(partner) - 1
    e_part, v_part = np.linalg.eigh(bare)
    guess = e_part[int(np.argmax(np.abs(v_part[j, :])))] - m.delta_so

    def spacing(dp):
        return float(np.min(np.diff(np.linalg.eigvalsh(np.asarray(build_h(model, dp, m, d))))))

    res = minimize_scalar(spacing, bounds=(guess - window, guess + window),
                          method="bounded", options={"xatol": 1e-10})
    return float(res.x)
