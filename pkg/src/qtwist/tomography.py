"""Synthetic two-qubit tomography: seeded counts, linear inversion,
iterative maximum-likelihood reconstruction, Uhlmann fidelity.

Measurements are the 9 local Pauli-pair settings {Z,X,Y}x{Z,X,Y}, four joint
rank-1 projectors each (36 total). Counts per setting are a single
multinomial draw, matching coincidence counting on the two analyzer outputs.

The MLE is the RpR fixed point: R(rho) = sum_k (f_k / tr(rho Pi_k)) Pi_k,
rho <- normalize(R rho R), started from I/4. The plain iteration crawls when
the likelihood surface is nearly flat along some direction (exact pure-state
data does this), so each cycle takes two RpR steps and tries a quadratic
extrapolation through them (SQUAREM-style); the extrapolated point is kept
only if it does not lower the likelihood, so the sequence stays monotone.
Whenever a bare step would decrease the likelihood, a diluted step
(I + eps*R) rho (I + eps*R) with eps = 0.1 is taken instead.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .qcore import hermitian_eigen, psd_sqrt, tensor

BASES = ("Z", "X", "Y")
PROB_FLOOR = 1e-12
DILUTION_EPS = 0.1

_S2 = 1.0 / np.sqrt(2.0)
BASIS_KETS = {
    "Z": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
    "X": (np.array([_S2, _S2], dtype=complex), np.array([_S2, -_S2], dtype=complex)),
    "Y": (np.array([_S2, 1j * _S2], dtype=complex),
          np.array([_S2, -1j * _S2], dtype=complex)),
}
PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

COUNTS_HEADER = ["basis_a", "basis_b", "shots", "n00", "n01", "n10", "n11"]


@dataclass(frozen=True)
class MeasurementSetting:
    basis_a: str
    basis_b: str
    projectors: tuple  # 4 joint rank-1 projectors, outcome order 00,01,10,11


@dataclass(frozen=True)
class CountsRecord:
    setting: MeasurementSetting
    shots: float
    counts: tuple  # 4 non-negative values summing to shots


@dataclass(frozen=True)
class TomographyResult:
    rho: np.ndarray
    iterations: int
    log_likelihood: float
    converged: bool
    fidelity_vs_target: Optional[float] = None


def _setting(basis_a: str, basis_b: str) -> MeasurementSetting:
    projs = []
    for ka in BASIS_KETS[basis_a]:
        for kb in BASIS_KETS[basis_b]:
            ket = tensor(ka, kb)
            projs.append(np.outer(ket, ket.conj()))
    return MeasurementSetting(basis_a, basis_b, tuple(projs))


def setting_grid() -> list:
    """All 9 local Pauli-pair settings, in (Z,X,Y) x (Z,X,Y) order."""
    return [_setting(a, b) for a in BASES for b in BASES]


def rho_from_state(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())


def check_density_matrix(rho, herm_tol: float = 1e-10,
                         eig_floor: float = -1e-8) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > herm_tol:
        raise ValueError(f"trace is {np.trace(rho)}, expected 1")
    w, _ = hermitian_eigen(rho)
    if np.min(w) < eig_floor:
        raise ValueError(f"negative eigenvalue {np.min(w)}")
    return rho


def depolarize(rho: np.ndarray, p: float) -> np.ndarray:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing strength {p} outside [0, 1]")
    return (1.0 - p) * rho + p * np.eye(4, dtype=complex) / 4.0


def setting_probabilities(rho: np.ndarray, setting: MeasurementSetting) -> np.ndarray:
    p = np.array([np.trace(rho @ pi).real for pi in setting.projectors])
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def simulate_counts(rho, settings: Sequence[MeasurementSetting], shots: int,
                    seed: int, noise: float = 0.0) -> list:
    """One multinomial draw per setting; deterministic for a fixed seed.

    Per-setting generators are derived by seed splitting, so each setting's
    draw is independent of list length and of the other settings.
    """
    rho = check_density_matrix(rho)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rho_noisy = depolarize(rho, noise)
    children = np.random.SeedSequence(seed).spawn(len(settings))
    records = []
    for setting, child in zip(settings, children):
        rng = np.random.default_rng(child)
        p = setting_probabilities(rho_noisy, setting)
        counts = rng.multinomial(shots, p)
        records.append(CountsRecord(setting, float(shots),
                                    tuple(float(c) for c in counts)))
    return records


def exact_records(rho, settings: Sequence[MeasurementSetting],
                  shots: float = 1.0, noise: float = 0.0) -> list:
    """Infinite-statistics records: counts equal shots * probabilities."""
    rho = check_density_matrix(rho)
    rho_noisy = depolarize(rho, noise)
    return [CountsRecord(s, float(shots),
                         tuple(float(shots) * setting_probabilities(rho_noisy, s)))
            for s in settings]


def _require_all_settings(records: Sequence[CountsRecord]) -> dict:
    table = {(r.setting.basis_a, r.setting.basis_b): r for r in records}
    missing = [(a, b) for a in BASES for b in BASES if (a, b) not in table]
    if missing:
        raise ValueError(f"missing settings: {missing}")
    return table


def linear_inversion(records: Sequence[CountsRecord]) -> np.ndarray:
    """Pauli-expectation reconstruction: Hermitian and unit trace, but not
    necessarily PSD at finite statistics. Used as a diagnostic and oracle."""
    table = _require_all_settings(records)

    def freq(a, b):
        r = table[(a, b)]
        return np.asarray(r.counts) / r.shots

    # outcome eigenvalue products, outcome order 00,01,10,11
    eig_a = np.array([1, 1, -1, -1])
    eig_b = np.array([1, -1, 1, -1])
    rho = np.eye(4, dtype=complex) / 4.0
    for a in BASES:
        for b in BASES:
            f = freq(a, b)
            rho += float(f @ (eig_a * eig_b)) * tensor(PAULI[a], PAULI[b]) / 4.0
    for a in BASES:
        e = np.mean([freq(a, b) @ eig_a for b in BASES])
        rho += float(e) * tensor(PAULI[a], PAULI["I"]) / 4.0
    for b in BASES:
        e = np.mean([freq(a, b) @ eig_b for a in BASES])
        rho += float(e) * tensor(PAULI["I"], PAULI[b]) / 4.0
    return rho


def _log_likelihood(p: np.ndarray, n: np.ndarray) -> float:
    mask = n > 0
    return float(np.sum(n[mask] * np.log(p[mask])))


def mle_reconstruct(records: Sequence[CountsRecord], tol: float = 1e-12,
                    max_iter: int = 100000,
                    target: Optional[np.ndarray] = None) -> TomographyResult:
    """Maximum-likelihood density matrix from tomography counts.

    Each iteration is one acceleration cycle: two fixed-point steps plus an
    extrapolated candidate that is kept only if it does not lower the
    likelihood. Stops when the max-norm of the density-matrix update drops
    below tol, or at max_iter (flagged as not converged). The likelihood
    never decreases.
    """
    _require_all_settings(records)
    projs = np.stack([pi for r in records for pi in r.setting.projectors])
    n = np.array([c for r in records for c in r.counts], dtype=float)
    f = n / n.sum()

    def ll_of(rho):
        p = np.clip(np.einsum("kij,ji->k", projs, rho).real, PROB_FLOOR, None)
        return _log_likelihood(p, n)

    def fixed_point(rho, diluted=False):
        p = np.clip(np.einsum("kij,ji->k", projs, rho).real, PROB_FLOOR, None)
        r = np.einsum("k,kij->ij", f / p, projs)
        if diluted:
            r = np.eye(4, dtype=complex) + DILUTION_EPS * r
        cand = r @ rho @ r
        cand = (cand + cand.conj().T) / 2.0
        return cand / np.trace(cand).real

    def project_psd(m):
        m = (m + m.conj().T) / 2.0
        try:
            # cheap PSD certificate; the shift is far below working precision
            np.linalg.cholesky(m + 1e-14 * np.eye(4))
        except np.linalg.LinAlgError:
            w, v = hermitian_eigen(m)
            m = (v * np.clip(w, 0.0, None)) @ v.conj().T
        return m / np.trace(m).real

    rho = np.eye(4, dtype=complex) / 4.0
    ll = ll_of(rho)
    # near the fixed point the likelihood change sits below the rounding
    # noise of the sum, so tolerate decreases up to that scale
    ll_slack = 1e-12 * (1.0 + abs(ll))
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        f1 = fixed_point(rho)
        if ll_of(f1) < ll - ll_slack:
            f1 = fixed_point(rho, diluted=True)
            if ll_of(f1) < ll - ll_slack:
                raise RuntimeError("likelihood decreased under diluted step")
        f2 = fixed_point(f1)
        step1 = f1 - rho
        curvature = f2 - 2.0 * f1 + rho
        norm_c = float(np.linalg.norm(curvature))
        cand = f2
        if norm_c > 1e-15:
            alpha = -float(np.linalg.norm(step1)) / norm_c
            extra = project_psd(rho - 2.0 * alpha * step1
                                + alpha * alpha * curvature)
            extra = fixed_point(extra)
            if ll_of(extra) >= ll_of(f2):
                cand = extra
        update = float(np.max(np.abs(cand - rho)))
        rho = cand
        ll = max(ll, ll_of(rho))
        if update <= tol:
            converged = True
            break

    fid = None if target is None else uhlmann_fidelity(rho, target)
    return TomographyResult(rho, iterations, ll, converged, fid)


def uhlmann_fidelity(a, b) -> float:
    """[tr sqrt(sqrt(a) b sqrt(a))]^2, clamped into [0, 1]."""
    a = check_density_matrix(a)
    b = check_density_matrix(b)
    root_a = psd_sqrt(a)
    inner = root_a @ b @ root_a
    inner = (inner + inner.conj().T) / 2.0
    val = np.trace(psd_sqrt(inner)).real ** 2
    return float(min(max(val, 0.0), 1.0))


def write_counts_csv(path, records: Sequence[CountsRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COUNTS_HEADER)
        for r in records:
            row = [r.setting.basis_a, r.setting.basis_b, _fmt(r.shots)]
            row += [_fmt(c) for c in r.counts]
            writer.writerow(row)


def read_counts_csv(path) -> list:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != COUNTS_HEADER:
            raise ValueError(f"bad counts header: {reader.fieldnames}")
        for row in reader:
            setting = _setting(row["basis_a"], row["basis_b"])
            counts = tuple(float(row[k]) for k in ("n00", "n01", "n10", "n11"))
            shots = float(row["shots"])
            if abs(sum(counts) - shots) > 1e-9 * max(shots, 1.0):
                raise ValueError(f"counts {counts} do not sum to shots {shots}")
            records.append(CountsRecord(setting, shots, counts))
    return records


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else format(x, ".12g")
