"""Deduction-chain analysis for the circuit.

Individually, each inference about one qubit's z-basis value conditioned on
the other is sound; chaining them carries qubit A's value across the H gate,
which does not commute with the z-basis projectors. validate_chain detects
exactly that: a pivot qubit asserted in the same basis on both sides of a
non-commuting gate.

The classical joint model multiplies the (uncontested) quantum marginal of
the trigger A-outcome, 1/6, by the chain's conditional for B, which assumes
B enters G in the |+> state. For the non-trigger A outcome the chain makes
no claim; those table entries are copied from the quantum values and flagged.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import circuit
from .circuit import (HADAMARD, OutcomeTable, build_g, conditional_state,
                      evolve_regions_sign, outcome_probabilities,
                      trigger_outcome)
from .qcore import check_normalized

REGION_ORDER = ("I", "II", "III")
COMMUTATION_TOL = 1e-10

KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2.0)

BASIS_PROJECTORS = {
    "Z": (np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)),
    "X": (np.outer(KET_PLUS, KET_PLUS).astype(complex),
          np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)),
}


class UnsupportedConfigurationError(ValueError):
    """The initial unitary is not on one of the two special loci."""


@dataclass(frozen=True)
class Proposition:
    """'qubit Q has z/x-basis value v in region R'."""
    qubit: str   # "A" | "B"
    region: str  # "I" | "II" | "III"
    basis: str   # "Z" | "X"
    value: int   # 0 | 1

    def __post_init__(self):
        if self.qubit not in ("A", "B"):
            raise ValueError(f"bad qubit {self.qubit!r}")
        if self.region not in REGION_ORDER:
            raise ValueError(f"bad region {self.region!r}")
        if self.basis not in ("Z", "X"):
            raise ValueError(f"bad basis {self.basis!r}")
        if self.value not in (0, 1):
            raise ValueError(f"bad value {self.value!r}")


@dataclass(frozen=True)
class Deduction:
    premise: Proposition
    conclusion: Proposition
    justification: str = ""

    def __post_init__(self):
        if self.premise == self.conclusion:
            raise ValueError("premise and conclusion are identical")


@dataclass(frozen=True)
class GatePlacement:
    """A named gate acting on one qubit between two adjacent regions."""
    name: str
    qubit: str
    matrix: np.ndarray
    from_region: str
    to_region: str


@dataclass(frozen=True)
class ChainVerdict:
    valid: bool
    twist: Optional[tuple] = None  # (qubit, gate name, basis)

    def __post_init__(self):
        if self.valid == (self.twist is not None):
            raise ValueError("verdict must be valid XOR carry a twist")


def circuit_gates(theta: float) -> list:
    """The gate placements of this circuit between regions I-II and II-III."""
    return [
        GatePlacement("H", "A", HADAMARD, "I", "II"),
        GatePlacement("G", "B", build_g(theta), "II", "III"),
    ]


def sign_of_params(alpha: complex, beta: complex, tol: float = 1e-9) -> str:
    """Which special locus (alpha, beta) sits on, or raise."""
    if abs(alpha / np.sqrt(2.0) - beta / 2.0) <= tol:
        return "+"
    if abs(alpha / np.sqrt(2.0) + beta / 2.0) <= tol:
        return "-"
    raise UnsupportedConfigurationError(
        f"(alpha, beta)=({alpha}, {beta}) is on neither special locus")


def verify_single_deductions(alpha: complex, beta: complex):
    """Check the two individual inferences for the given initial unitary.

    d1: conditioning region II on the trigger A-outcome leaves B surely |1>.
    d2: conditioning region I on B=1 leaves A surely |1>.
    """
    sign = sign_of_params(alpha, beta)
    a_star = trigger_outcome(sign)
    states = circuit.evolve_regions(alpha, beta, np.pi / 2.0)
    cond_ii, _ = conditional_state(states.region_ii, "A", a_star)
    p_b1 = outcome_probabilities(cond_ii)
    d1 = abs(p_b1.prob(a_star, 1) - 1.0) <= 1e-12
    cond_i, _ = conditional_state(states.region_i, "B", 1)
    p_cond = outcome_probabilities(cond_i)
    d2 = abs(p_cond.prob(1, 1) - 1.0) <= 1e-12
    return d1, d2


def penrose_chain(sign: str) -> list:
    """The two-step inference chain anchored at the trigger A-outcome."""
    a_star = trigger_outcome(sign)
    return [
        Deduction(Proposition("A", "III", "Z", a_star),
                  Proposition("B", "II", "Z", 1),
                  "trigger outcome forces B=1 in region II"),
        Deduction(Proposition("B", "II", "Z", 1),
                  Proposition("A", "I", "Z", 1),
                  "B=1 in region II forces A=1 in region I"),
    ]


def validate_chain(deductions: list, gates: list) -> ChainVerdict:
    """Check whether the deductions compose.

    Composition is legitimate only if, for every qubit the chain pins down in
    more than one region, all intervening gates on that qubit commute with the
    projectors of the basis in which it is pinned. The first violation is
    reported as the twist.
    """
    if not deductions:
        raise ValueError("empty deduction chain")
    for cur, nxt in zip(deductions, deductions[1:]):
        if cur.conclusion != nxt.premise:
            raise ValueError(
                f"chain break: {cur.conclusion} does not match {nxt.premise}")
    props = [deductions[0].premise] + [d.conclusion for d in deductions]
    by_qubit: dict = {}
    for p in props:
        by_qubit.setdefault(p.qubit, []).append(p)
    for qubit, plist in by_qubit.items():
        plist = sorted(plist, key=lambda p: REGION_ORDER.index(p.region))
        lo = REGION_ORDER.index(plist[0].region)
        hi = REGION_ORDER.index(plist[-1].region)
        if lo == hi:
            continue
        basis = plist[0].basis
        projectors = BASIS_PROJECTORS[basis]
        for gate in gates:
            gi = REGION_ORDER.index(gate.from_region)
            if gate.qubit != qubit or not (lo <= gi < hi):
                continue
            for proj in projectors:
                comm = gate.matrix @ proj - proj @ gate.matrix
                if np.max(np.abs(comm)) > COMMUTATION_TOL:
                    return ChainVerdict(False, (qubit, gate.name, basis))
    return ChainVerdict(True)


@dataclass(frozen=True)
class ClassicalPrediction:
    theta: float
    sign: str
    table: OutcomeTable
    conditional_b: tuple          # (p(B=0 | A=a*), p(B=1 | A=a*))
    trigger: int                  # the A-outcome a* the chain is about
    non_trigger_from_quantum: bool = True  # those rows are not chain claims


def classical_prediction(sign: str, theta: float) -> ClassicalPrediction:
    """Joint table the deduction chain implies for the trigger row.

    The chain concludes B enters G as |+>, so p(B=b | A=a*) = |<b|G|+>|^2;
    the trigger-row joint uses the quantum marginal p(A=a*) = 1/6.
    """
    a_star = trigger_outcome(sign)
    g = build_g(theta)
    amp = g @ KET_PLUS
    cond = (float(abs(amp[0]) ** 2), float(abs(amp[1]) ** 2))
    quantum = outcome_probabilities(evolve_regions_sign(sign, theta).region_iii)
    p_marginal = quantum.prob(a_star, 0) + quantum.prob(a_star, 1)
    probs = list(quantum.as_tuple())
    probs[2 * a_star + 0] = p_marginal * cond[0]
    probs[2 * a_star + 1] = p_marginal * cond[1]
    return ClassicalPrediction(float(theta), sign, OutcomeTable(*probs),
                               cond, a_star)


@dataclass(frozen=True)
class PredictionComparison:
    theta: float
    quantum: OutcomeTable
    classical: ClassicalPrediction
    divergence: float


def compare_predictions(sign: str, grid) -> list:
    """Quantum vs classical trigger-row tables over a theta grid.

    Divergence is the max absolute difference over the two trigger-row
    entries.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("theta grid is empty")
    out = []
    a_star = trigger_outcome(sign)
    for theta in grid:
        quantum = outcome_probabilities(evolve_regions_sign(sign, theta).region_iii)
        classical = classical_prediction(sign, theta)
        div = max(abs(quantum.prob(a_star, b) - classical.table.prob(a_star, b))
                  for b in (0, 1))
        out.append(PredictionComparison(float(theta), quantum, classical, div))
    return out


def helstrom_bound(psi_a: np.ndarray, psi_b: np.ndarray) -> float:
    """Optimal single-shot discrimination probability for two pure states
    with equal priors: (1 + sqrt(1 - |<a|b>|^2)) / 2."""
    psi_a = check_normalized(psi_a)
    psi_b = check_normalized(psi_b)
    overlap = abs(np.vdot(psi_a, psi_b)) ** 2
    return 0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - overlap)))


@dataclass(frozen=True)
class DiscriminationReport:
    theta: float
    p_b0_plus: float          # P(B=0 | U+)
    p_b0_minus: float         # P(B=0 | U-)
    p_a1_given_b0_plus: float
    p_a0_given_b0_minus: float
    rule_success: float       # P(correct sign | B=0), equal priors
    helstrom: float
    rule_within_bound: bool


def discrimination_analysis(theta: float) -> DiscriminationReport:
    """The 'read the sign off qubit A when B=0' rule, quantified.

    Equal priors 1/2 over the two initial unitaries. The rule guesses '+'
    on A=1 and '-' on A=0; its success probability conditioned on B=0 is
    compared against the Helstrom bound for the two post-U single-qubit
    states.
    """
    qp = outcome_probabilities(evolve_regions_sign("+", theta).region_iii)
    qm = outcome_probabilities(evolve_regions_sign("-", theta).region_iii)
    p_b0_plus = qp.p00 + qp.p10
    p_b0_minus = qm.p00 + qm.p10
    p_b0 = 0.5 * (p_b0_plus + p_b0_minus)
    rule_success = (0.5 * qp.p10 + 0.5 * qm.p00) / p_b0
    psi_plus = np.array([circuit.SQRT13, circuit.SQRT23])
    psi_minus = np.array([circuit.SQRT13, -circuit.SQRT23])
    bound = helstrom_bound(psi_plus, psi_minus)
    return DiscriminationReport(
        theta=float(theta),
        p_b0_plus=float(p_b0_plus),
        p_b0_minus=float(p_b0_minus),
        p_a1_given_b0_plus=float(qp.p10 / p_b0_plus),
        p_a0_given_b0_minus=float(qm.p00 / p_b0_minus),
        rule_success=float(rule_success),
        helstrom=float(bound),
        rule_within_bound=bool(rule_success <= bound + 1e-12),
    )
