"""Remote preparation of a two-qubit state over two shared entangled pairs.

Particles 1 and 3 belong to the sender, 2 and 4 to the receiver.  Pair (1,2)
is ``a|00> + b|11>`` and pair (3,4) is ``c|00> + d|11>``; the maximally
entangled channel is the special case ``a = b = c = d = 1/sqrt(2)`` and runs
through exactly the same code.

Register layouts used throughout:

* channel state: qubits ordered (1, 3, 2, 4), sender's qubits most significant
* receiver state: (2, 4)
* auxiliary stage: (2, 4, aux)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from remote_prep.qstate import (
    StateVector,
    apply_unitary,
    check_unitary,
    fidelity_up_to_phase,
    permute_qubits,
    project_subsystem,
    tensor,
)

INPUT_TOL = 1e-9
RENORM_TOL = 1e-6
SUCCESS_FIDELITY_TOL = 1e-9

SENDER_QUBITS = (0, 1)
RECEIVER_QUBITS = (2, 3)


class ValidationError(ValueError):
    """An input violates a named constraint (``.constraint``)."""

    def __init__(self, constraint: str, message: str):
        super().__init__(f"{constraint}: {message}")
        self.constraint = constraint


class DegenerateBranchError(ValueError):
    """A forced measurement outcome has zero probability."""


class Outcome(enum.Enum):
    """Sender's measurement result; ``bits`` is the 2-bit classical message."""

    PHI = 0
    PHI_PERP = 1
    PSI = 2
    PSI_PERP = 3

    @property
    def bits(self) -> str:
        return format(self.value, "02b")

    @property
    def correctable(self) -> bool:
        return self in (Outcome.PHI_PERP, Outcome.PSI_PERP)

    @property
    def slug(self) -> str:
        return self.name.lower().replace("_", "-")

    @classmethod
    def from_slug(cls, text: str) -> Outcome:
        return cls[text.strip().upper().replace("-", "_")]


class AuxOutcome(enum.IntEnum):
    AUX0 = 0
    AUX1 = 1


# --- inputs -----------------------------------------------------------------


@dataclass(frozen=True)
class TargetState:
    """``alpha|00> + beta|01> + gamma|10> + delta|11>`` with alpha, gamma real
    and conj(beta)*delta real."""

    alpha: float
    beta: complex
    gamma: float
    delta: complex

    @property
    def coefficients(self) -> tuple[complex, complex, complex, complex]:
        return (complex(self.alpha), self.beta, complex(self.gamma), self.delta)

    def vector(self) -> StateVector:
        return StateVector(np.array(self.coefficients))


def validate_target(alpha: complex, beta: complex, gamma: complex, delta: complex) -> TargetState:
    """Check the target constraints and return a ``TargetState``.

    A norm within ``RENORM_TOL`` of one is rescaled to unit norm; anything
    further out is rejected.
    """
    alpha, beta, gamma, delta = (complex(x) for x in (alpha, beta, gamma, delta))
    for name, value in (("alpha", alpha), ("gamma", gamma)):
        if abs(value.imag) > INPUT_TOL:
            raise ValidationError(f"{name}-real", f"{name} must be real, got {value}")
    norm_sq = abs(alpha) ** 2 + abs(beta) ** 2 + abs(gamma) ** 2 + abs(delta) ** 2
    if abs(norm_sq - 1.0) > RENORM_TOL:
        raise ValidationError("normalization", f"squared norm is {norm_sq!r}, expected 1")
    scale = 1.0 / math.sqrt(norm_sq)
    alpha, beta, gamma, delta = (x * scale for x in (alpha, beta, gamma, delta))
    overlap = beta.conjugate() * delta
    if abs(overlap.imag) > INPUT_TOL:
        raise ValidationError("beta-delta-real", f"conj(beta)*delta = {overlap} is not real")
    return TargetState(alpha.real, beta, gamma.real, delta)


@dataclass(frozen=True)
class ChannelPair:
    """Real coefficients of the two shared pairs, ``a|00>+b|11>`` and ``c|00>+d|11>``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in "abcd":
            if not math.isfinite(getattr(self, name)):
                raise ValidationError("finite", f"{name} must be finite")
        if abs(self.a**2 + self.b**2 - 1.0) > INPUT_TOL:
            raise ValidationError("pair-12-normalization", f"a^2 + b^2 = {self.a**2 + self.b**2!r}")
        if abs(self.c**2 + self.d**2 - 1.0) > INPUT_TOL:
            raise ValidationError("pair-34-normalization", f"c^2 + d^2 = {self.c**2 + self.d**2!r}")
        if self.b <= 0 or self.d <= 0:
            raise ValidationError("b-d-positive", "b and d must be positive")
        if abs(self.a) > self.b + INPUT_TOL:
            raise ValidationError("a-le-b", f"|a| = {abs(self.a)!r} exceeds b = {self.b!r}")
        if abs(self.c) > self.d + INPUT_TOL:
            raise ValidationError("c-le-d", f"|c| = {abs(self.c)!r} exceeds d = {self.d!r}")

    @classmethod
    def from_ac(cls, a: float, c: float) -> ChannelPair:
        """Channel with ``b = sqrt(1-a^2)`` and ``d = sqrt(1-c^2)``."""
        limit = 1 / math.sqrt(2)
        for name, value in (("a", a), ("c", c)):
            if not math.isfinite(value) or abs(value) > limit + INPUT_TOL:
                raise ValidationError(f"{name}-range", f"|{name}| = {abs(value)!r} exceeds 1/sqrt(2)")
        return cls(a, math.sqrt(1 - a * a), c, math.sqrt(1 - c * c))

    @classmethod
    def epr(cls) -> ChannelPair:
        h = 1 / math.sqrt(2)
        return cls(h, h, h, h)

    @property
    def success_amplitude(self) -> float:
        return self.a * self.c


def random_target(rng: np.random.Generator) -> TargetState:
    """Target drawn from a spread of the valid family (beta, delta share a phase up to sign)."""
    x = rng.standard_normal(4)
    x /= np.linalg.norm(x)
    phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
    return TargetState(float(x[0]), complex(x[1] * phase), float(x[2]), complex(x[3] * phase))


def random_channel(rng: np.random.Generator) -> ChannelPair:
    t1, t2 = rng.uniform(-np.pi / 4, np.pi / 4, size=2)
    return ChannelPair(math.sin(t1), math.cos(t1), math.sin(t2), math.cos(t2))


# --- sender side ------------------------------------------------------------


@dataclass(frozen=True)
class MeasurementBasis:
    phi: StateVector
    phi_perp: StateVector
    psi: StateVector
    psi_perp: StateVector

    def __getitem__(self, outcome: Outcome) -> StateVector:
        return (self.phi, self.phi_perp, self.psi, self.psi_perp)[outcome.value]

    def gram(self) -> np.ndarray:
        rows = np.array([self[o].amps for o in Outcome])
        return rows.conj() @ rows.T


def build_measurement_basis(t: TargetState) -> MeasurementBasis:
    al, be, ga, de = t.coefficients
    vecs = (
        (al, be, ga, de),
        (-de.conjugate(), ga, -be.conjugate(), al),
        (ga, de, -al, -be),
        (be.conjugate(), -al, -de.conjugate(), ga),
    )
    return MeasurementBasis(*(StateVector(np.array(v)) for v in vecs))


def build_channel_state(ch: ChannelPair) -> StateVector:
    """Both pairs as one 4-qubit state in (1, 3, 2, 4) order."""
    pair12 = StateVector(np.array([ch.a, 0, 0, ch.b]))
    pair34 = StateVector(np.array([ch.c, 0, 0, ch.d]))
    return permute_qubits(tensor(pair12, pair34), [0, 2, 1, 3])


Choice = Union[Outcome, float, np.random.Generator, None]


def _draw(probs: np.ndarray, u: float) -> int:
    """Inverse-CDF pick; never lands on a zero-probability entry."""
    cdf = np.cumsum(probs)
    k = int(np.searchsorted(cdf, u, side="right"))
    return min(k, int(np.flatnonzero(probs > 0)[-1]))


def _as_uniform(choice: Union[float, np.random.Generator, None]) -> float:
    if choice is None:
        raise ValueError("a random choice needs a Generator or a pre-drawn uniform")
    if isinstance(choice, np.random.Generator):
        return float(choice.random())
    u = float(choice)
    if not 0.0 <= u < 1.0:
        raise ValueError(f"uniform draw must lie in [0, 1), got {u}")
    return u


def branch_residuals(channel_state: StateVector, basis: MeasurementBasis) -> dict[Outcome, tuple[StateVector, float]]:
    """Unnormalized receiver state and probability for every outcome."""
    return {o: project_subsystem(channel_state, basis[o], SENDER_QUBITS) for o in Outcome}


def alice_measure(
    channel_state: StateVector, basis: MeasurementBasis, choice: Choice
) -> tuple[Outcome, StateVector, float]:
    """Measure the sender's qubits in ``basis``.

    ``choice`` forces an ``Outcome``, or supplies randomness as a Generator or
    a uniform in [0, 1).  Outcomes are ordered PHI, PHI_PERP, PSI, PSI_PERP
    for the inverse-CDF draw.
    """
    if channel_state.n_qubits != 4:
        raise ValueError("channel state must have 4 qubits")
    if isinstance(choice, Outcome):
        outcome = choice
        residual, prob = project_subsystem(channel_state, basis[outcome], SENDER_QUBITS)
    else:
        branches = branch_residuals(channel_state, basis)
        probs = np.array([branches[o][1] for o in Outcome])
        outcome = Outcome(_draw(probs, _as_uniform(choice)))
        residual, prob = branches[outcome]
    if prob == 0.0:
        raise DegenerateBranchError(f"outcome {outcome.slug} has zero probability")
    return outcome, residual.normalize(), prob


# --- receiver side ----------------------------------------------------------

_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
# |0><1| - |1><0|
_J = np.array([[0, 1], [-1, 0]], dtype=np.complex128)

FLIP_CORRECTION = np.kron(_X, _J)
PHASE_CORRECTION = np.kron(_Z, -_J)
# Same operator with the opposite sign on the second factor; recovers the
# target only up to a global -1.
PHASE_CORRECTION_ALT = np.kron(_Z, _J)


@dataclass(frozen=True)
class Uncorrectable:
    """Returned instead of an operator when the receiver cannot recover the target."""

    outcome: Outcome
    reason: str = "state depends on conjugated coefficients unknown to the receiver"


def bob_primary_correction(outcome: Outcome) -> Union[np.ndarray, Uncorrectable]:
    if outcome is Outcome.PHI_PERP:
        return FLIP_CORRECTION
    if outcome is Outcome.PSI_PERP:
        return PHASE_CORRECTION
    return Uncorrectable(outcome)


def _reflection(r: float) -> list[list[float]]:
    return [[r, math.sqrt(max(0.0, 1 - r * r))], [math.sqrt(max(0.0, 1 - r * r)), -r]]


def build_aux_unitary(ch: ChannelPair, outcome: Outcome) -> np.ndarray:
    """8x8 block-diagonal operator on (2, 4, aux) that equalizes amplitudes.

    Each 2x2 block is a real reflection ``[[r, s], [s, -r]]`` with
    ``s = sqrt(1 - r^2)``; the ratios ``r`` scale every receiver amplitude
    down to ``a*c`` times the target coefficient on the ``aux = 0`` branch.
    """
    both, first, second = ch.a * ch.c / (ch.b * ch.d), ch.a / ch.b, ch.c / ch.d
    if outcome is Outcome.PHI_PERP:
        ratios = (both, first, second, 1.0)
    elif outcome is Outcome.PSI_PERP:
        ratios = (second, 1.0, both, first)
    else:
        raise ValueError(f"no auxiliary stage for outcome {outcome.slug}")
    u = np.zeros((8, 8), dtype=np.complex128)
    for k, r in enumerate(ratios):
        u[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = _reflection(r)
    return u


def aux_probabilities(corrected: StateVector, ch: ChannelPair, outcome: Outcome) -> tuple[StateVector, tuple[float, float]]:
    """Joint (2, 4, aux) state after the auxiliary unitary, plus P(aux=0), P(aux=1)."""
    if not outcome.correctable:
        raise ValueError(f"no auxiliary stage for outcome {outcome.slug}")
    joint = apply_unitary(tensor(corrected, StateVector.basis("0")), build_aux_unitary(ch, outcome), [0, 1, 2])
    p0 = float(np.sum(np.abs(joint.amps[0::2]) ** 2))
    p1 = float(np.sum(np.abs(joint.amps[1::2]) ** 2))
    return joint, (p0, p1)


def bob_aux_stage(
    corrected: StateVector,
    ch: ChannelPair,
    outcome: Outcome,
    aux_choice: Union[AuxOutcome, float, np.random.Generator, None],
) -> tuple[AuxOutcome, StateVector, float]:
    """Attach |0>_aux, apply the auxiliary unitary and measure the ancilla.

    Returns the ancilla result, the normalized receiver state left on (2, 4)
    and the conditional probability of that result.
    """
    joint, probs = aux_probabilities(corrected, ch, outcome)
    if isinstance(aux_choice, AuxOutcome):
        aux = aux_choice
    else:
        aux = AuxOutcome(_draw(np.array(probs), _as_uniform(aux_choice)))
    if probs[aux] == 0.0:
        raise DegenerateBranchError(f"ancilla outcome {int(aux)} has zero probability")
    residual, _ = project_subsystem(joint, StateVector.basis(str(int(aux))), [2])
    return aux, residual.normalize(), probs[aux]


# --- full run ---------------------------------------------------------------


@dataclass(frozen=True)
class ProtocolResult:
    alice_outcome: Outcome
    alice_probability: float
    corrected: bool
    aux_outcome: Optional[AuxOutcome]
    aux_probability: Optional[float]
    final_bob_state: StateVector
    fidelity_to_target: float
    success: bool

    @property
    def probability(self) -> float:
        """Probability of this exact trace."""
        return self.alice_probability * (1.0 if self.aux_probability is None else self.aux_probability)


def run_protocol(
    t: TargetState,
    ch: ChannelPair,
    rng: Optional[np.random.Generator] = None,
    *,
    alice: Choice = None,
    aux: Union[AuxOutcome, float, None] = None,
) -> ProtocolResult:
    """One complete run.

    Each stage is forced by ``alice`` / ``aux`` (an outcome or a pre-drawn
    uniform) and otherwise draws from ``rng``.
    """
    target = t.vector()
    basis = build_measurement_basis(t)
    outcome, bob_state, p_alice = alice_measure(build_channel_state(ch), basis, rng if alice is None else alice)
    correction = bob_primary_correction(outcome)
    if isinstance(correction, Uncorrectable):
        fid = fidelity_up_to_phase(bob_state, target)
        return ProtocolResult(outcome, p_alice, False, None, None, bob_state, fid, False)
    corrected = apply_unitary(bob_state, correction, [0, 1])
    aux_outcome, final, p_aux = bob_aux_stage(corrected, ch, outcome, rng if aux is None else aux)
    fid = fidelity_up_to_phase(final, target)
    success = aux_outcome is AuxOutcome.AUX0
    if success and fid < 1 - SUCCESS_FIDELITY_TOL:
        raise RuntimeError(f"post-selected state has fidelity {fid!r} with the target")
    return ProtocolResult(outcome, p_alice, True, aux_outcome, p_aux, final, fid, success)


def check_protocol_unitaries(ch: ChannelPair, tol: float = 1e-12) -> dict[str, bool]:
    """Unitarity of every operator the receiver may apply for channel ``ch``."""
    return {
        "flip_correction": check_unitary(FLIP_CORRECTION, tol),
        "phase_correction": check_unitary(PHASE_CORRECTION, tol),
        "phase_correction_alt": check_unitary(PHASE_CORRECTION_ALT, tol),
        "aux_phi_perp": check_unitary(build_aux_unitary(ch, Outcome.PHI_PERP), tol),
        "aux_psi_perp": check_unitary(build_aux_unitary(ch, Outcome.PSI_PERP), tol),
    }
