"""Jones-calculus model of the polarization setup.

Conventions (the physical description leaves them open, so they are fixed
here and absorbed into phase calibration where they matter):

* Polarization basis (H, V) maps to the computational (|0>, |1>).
* HWP(phi) = [[cos 2phi, sin 2phi], [sin 2phi, -cos 2phi]] (global phase
  dropped). hwp(pi/8) is the Hadamard; hwp(theta/4) realizes G(theta).
* QWP(phi) is diag(1, i) conjugated by the frame rotation R(phi).
* The recombining 50:50 beam splitter is symmetric: transmission 1/sqrt(2),
  reflection i/sqrt(2); the kept output port takes the transmitted H-arm and
  the reflected V-arm. The resulting fixed i is soaked up by the calibrated
  interferometer phase exp(i*pi*delta_l/lambda).
* The pump rotation angle is twice the pump HWP plate angle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import circuit
from .qcore import check_normalized, tensor

KET_H = np.array([1, 0], dtype=complex)
KET_V = np.array([0, 1], dtype=complex)

HWP_INT_ANGLE = 3.0 * np.pi / 8.0   # in-arm plate: V -> (H+V)/sqrt(2)
HWP_HAD_ANGLE = np.pi / 8.0         # plate realizing the Hadamard on A

# exact pump rotation giving amplitudes (sqrt(1/3), sqrt(2/3)); the plate
# itself sits at half this, ~27.37 deg
VARTHETA_STAR = np.arccos(np.sqrt(1.0 / 3.0))


class PostSelectionError(ValueError):
    """The kept beam-splitter port carries (numerically) no amplitude."""


def rotation(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]], dtype=complex)


def hwp(angle: float) -> np.ndarray:
    two = 2.0 * angle
    c, s = np.cos(two), np.sin(two)
    return np.array([[c, s], [s, -c]], dtype=complex)


def qwp(angle: float) -> np.ndarray:
    r = rotation(angle)
    return r @ np.diag([1.0, 1j]).astype(complex) @ r.conj().T


def g_plate_angle(theta: float) -> float:
    """HWP rotation realizing G(theta): solve hwp(phi) == G(theta) -> phi = theta/4."""
    return theta / 4.0


def sagnac_source(vartheta: float, phi: float = 0.0,
                  swap_b: bool = False) -> np.ndarray:
    """Photon-pair state cos(vt)|HV> + e^{i phi} sin(vt)|VH>.

    With swap_b the in-line plate flips H<->V on photon B, giving
    cos(vt)|HH> + e^{i phi} sin(vt)|VV>.
    """
    c, s = np.cos(vartheta), np.sin(vartheta)
    if swap_b:
        return np.array([c, 0, 0, np.exp(1j * phi) * s], dtype=complex)
    return np.array([0, c, np.exp(1j * phi) * s, 0], dtype=complex)


@dataclass(frozen=True)
class PostselectedState:
    state: np.ndarray
    success_probability: float
    discarded_probability: float


def mach_zehnder_b(delta_l: float, lam: float, hwp_int_angle: float,
                   input_state: np.ndarray) -> PostselectedState:
    """Interferometer on photon B: PBS split, HWP + relative phase on the
    V arm, symmetric 50:50 recombination, one port kept and renormalized.
    """
    if lam <= 0:
        raise ValueError(f"wavelength must be positive, got {lam}")
    psi = check_normalized(input_state).reshape(2, 2)  # (A, B-pol)
    arm_h = np.zeros_like(psi)
    arm_h[:, 0] = psi[:, 0]
    arm_v = np.zeros_like(psi)
    arm_v[:, 1] = psi[:, 1]
    arm_v = arm_v @ hwp(hwp_int_angle).T
    arm_v = arm_v * np.exp(1j * np.pi * delta_l / lam)
    kept = (arm_h + 1j * arm_v) / np.sqrt(2.0)
    discarded = (1j * arm_h + arm_v) / np.sqrt(2.0)
    p_keep = float(np.sum(np.abs(kept) ** 2))
    p_drop = float(np.sum(np.abs(discarded) ** 2))
    if p_keep < 1e-12:
        raise PostSelectionError("fully destructive post-selection")
    return PostselectedState(kept.reshape(4) / np.sqrt(p_keep), p_keep, p_drop)


def _region_i_fidelity(delta_l: float, lam: float, target: np.ndarray) -> float:
    source = sagnac_source(VARTHETA_STAR, 0.0, swap_b=True)
    out = mach_zehnder_b(delta_l, lam, HWP_INT_ANGLE, source)
    return float(abs(np.vdot(target, out.state)) ** 2)


def phase_calibrate(target_sign: str, lam: float = 1.0) -> float:
    """Path mismatch delta_l whose region-I output best matches the target.

    Coarse scan over one phase period (delta_l in [0, 2*lambda)) followed by
    two zoom refinements; the achieved fidelity is >= 1 - 1e-9.
    """
    target = circuit.evolve_regions_sign(target_sign, np.pi / 2.0).region_i
    lo, hi = 0.0, 2.0 * lam
    best = lo
    for _ in range(3):
        grid = np.linspace(lo, hi, 2001)
        fids = [_region_i_fidelity(d, lam, target) for d in grid]
        best = float(grid[int(np.argmax(fids))])
        span = (hi - lo) / 2001.0
        lo, hi = best - 2 * span, best + 2 * span
    return best


_CALIBRATION_CACHE: dict = {}


def _calibrated_delta_l(sign: str, lam: float) -> float:
    key = (sign, lam)
    if key not in _CALIBRATION_CACHE:
        _CALIBRATION_CACHE[key] = phase_calibrate(sign, lam)
    return _CALIBRATION_CACHE[key]


def assemble_setup(sign: str, insert_h: bool, insert_g: bool,
                   theta: float = 0.0, lam: float = 1.0,
                   delta_l: float | None = None,
                   hwp_had_angle: float = HWP_HAD_ANGLE) -> PostselectedState:
    """Full pipeline: source -> interferometer -> optional H and G plates.

    With neither plate the output is the region-I state; the A-side plate
    advances it to region II and the B-side plate to region III.
    """
    if delta_l is None:
        delta_l = _calibrated_delta_l(sign, lam)
    source = sagnac_source(VARTHETA_STAR, 0.0, swap_b=True)
    out = mach_zehnder_b(delta_l, lam, HWP_INT_ANGLE, source)
    state = out.state
    if insert_h:
        state = tensor(hwp(hwp_had_angle), np.eye(2)) @ state
    if insert_g:
        state = tensor(np.eye(2), hwp(g_plate_angle(theta))) @ state
    return PostselectedState(state, out.success_probability,
                             out.discarded_probability)
