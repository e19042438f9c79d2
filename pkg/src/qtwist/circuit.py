"""Two-qubit circuit: U on A, controlled-H, H on A, G(theta) on B.

Basis ordering is qubit-A-major throughout: |q_A q_B> <-> index 2*q_A + q_B.
Region I is the state after the controlled-H, region II after the H on A,
region III after G(theta) on B.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .qcore import check_normalized, tensor

SQRT13 = np.sqrt(1.0 / 3.0)
SQRT23 = np.sqrt(2.0 / 3.0)

I2 = np.eye(2, dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)


class ImpossibleOutcomeError(ValueError):
    """Conditioning on an outcome whose probability is (numerically) zero."""


def build_u(alpha: complex, beta: complex) -> np.ndarray:
    """The initial single-qubit unitary [[alpha, -beta*], [beta, alpha*]]."""
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"|alpha|^2 + |beta|^2 = {norm}, expected 1")
    return np.array([[alpha, -np.conj(beta)], [beta, np.conj(alpha)]], dtype=complex)


def u_plus() -> np.ndarray:
    return build_u(SQRT13, SQRT23)


def u_minus() -> np.ndarray:
    return build_u(SQRT13, -SQRT23)


def unitary_for_sign(sign: str) -> np.ndarray:
    if sign == "+":
        return u_plus()
    if sign == "-":
        return u_minus()
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def trigger_outcome(sign: str) -> int:
    """The qubit-A outcome that anchors the deduction chain: 1 for '+', 0 for '-'."""
    if sign == "+":
        return 1
    if sign == "-":
        return 0
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def build_g(theta: float) -> np.ndarray:
    """G(theta) = [[c, s], [s, -c]] with c=cos(theta/2), s=sin(theta/2).

    Hermitian and involutory; G(0) is Pauli-Z, G(pi/2) is the Hadamard.
    The matrix is 4*pi-periodic in theta; values outside [0, pi] are folded
    back into [0, 4*pi) with a warning.
    """
    if theta < 0 or theta > np.pi:
        warnings.warn(f"theta={theta} outside [0, pi]; reducing modulo 4*pi",
                      stacklevel=2)
        theta = theta % (4.0 * np.pi)
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, s], [s, -c]], dtype=complex)


def controlled_h() -> np.ndarray:
    """Apply H to qubit B when qubit A is |1>: block-diag(I2, H)."""
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = HADAMARD
    return m


@dataclass(frozen=True)
class RegionStates:
    """The five circuit snapshots, each a normalized 4-amplitude ket."""
    input: np.ndarray
    post_u: np.ndarray
    region_i: np.ndarray
    region_ii: np.ndarray
    region_iii: np.ndarray

    def by_name(self, name: str) -> np.ndarray:
        key = {"input": "input", "post_u": "post_u",
               "I": "region_i", "II": "region_ii", "III": "region_iii"}[name]
        return getattr(self, key)


@dataclass(frozen=True)
class OutcomeTable:
    p00: float
    p01: float
    p10: float
    p11: float

    def as_tuple(self) -> tuple:
        return (self.p00, self.p01, self.p10, self.p11)

    def prob(self, a: int, b: int) -> float:
        return self.as_tuple()[2 * a + b]


def evolve_regions(alpha: complex, beta: complex, theta: float) -> RegionStates:
    """Evolve |00> through the circuit, snapshotting every region."""
    u = build_u(alpha, beta)
    g = build_g(theta)
    ket00 = np.array([1, 0, 0, 0], dtype=complex)
    post_u = tensor(u, I2) @ ket00
    region_i = controlled_h() @ post_u
    region_ii = tensor(HADAMARD, I2) @ region_i
    region_iii = tensor(I2, g) @ region_ii
    return RegionStates(ket00, post_u, region_i, region_ii, region_iii)


def evolve_regions_sign(sign: str, theta: float) -> RegionStates:
    u = unitary_for_sign(sign)
    return evolve_regions(u[0, 0], u[1, 0], theta)


def region_iii_closed_form(alpha: complex, beta: complex, theta: float) -> np.ndarray:
    """Closed-form region-III amplitudes, kept independent of the gate-product
    path as a transcription cross-check."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    a2, b2 = alpha / np.sqrt(2.0), beta / 2.0
    return np.array([
        c * a2 + (c + s) * b2,
        s * a2 + (s - c) * b2,
        c * a2 - (c + s) * b2,
        s * a2 + (c - s) * b2,
    ], dtype=complex)


def outcome_probabilities(state: np.ndarray) -> OutcomeTable:
    state = check_normalized(state)
    if state.shape != (4,):
        raise ValueError(f"expected a 4-amplitude ket, got shape {state.shape}")
    p = np.abs(state) ** 2
    return OutcomeTable(*(float(x) for x in p))


def conditional_state(state: np.ndarray, qubit: str, outcome: int):
    """Project onto a z-basis outcome of one qubit and renormalize.

    Returns (state, probability). Raises ImpossibleOutcomeError when the
    branch probability is below 1e-12.
    """
    state = check_normalized(state)
    if qubit not in ("A", "B"):
        raise ValueError(f"qubit must be 'A' or 'B', got {qubit!r}")
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")
    idx = np.arange(4)
    bit = idx // 2 if qubit == "A" else idx % 2
    mask = (bit == outcome)
    prob = float(np.sum(np.abs(state[mask]) ** 2))
    if prob <= 1e-12:
        raise ImpossibleOutcomeError(
            f"outcome {qubit}={outcome} has probability {prob}")
    projected = np.where(mask, state, 0.0)
    return projected / np.sqrt(prob), prob


def sweep_theta(alpha: complex, beta: complex, grid) -> list:
    """Outcome tables for region III over a theta grid, in grid order."""
    grid = list(grid)
    if not grid:
        raise ValueError("theta grid is empty")
    return [(float(t),
             outcome_probabilities(evolve_regions(alpha, beta, t).region_iii))
            for t in grid]
