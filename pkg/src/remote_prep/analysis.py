"""Exact branch probabilities, the closed-form success rate, and Monte Carlo."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from remote_prep.protocol import (
    ChannelPair,
    Outcome,
    TargetState,
    alice_measure,
    aux_probabilities,
    bob_primary_correction,
    branch_residuals,
    build_channel_state,
    build_measurement_basis,
    run_protocol,
)
from remote_prep.qstate import apply_unitary, tensor

IDENTITY_TOL = 1e-10


@dataclass(frozen=True)
class BranchReport:
    probabilities: dict[Outcome, float]
    success: dict[Outcome, float]
    total_success: float


def closed_form_success(ch: ChannelPair) -> float:
    return 2.0 * (ch.a * ch.c) ** 2


def _branch_tree(t: TargetState, ch: ChannelPair) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sender-outcome probabilities and, per correctable branch, P(aux=0) and P(aux=1)."""
    state = build_channel_state(ch)
    basis = build_measurement_basis(t)
    probs = np.array([p for _, p in branch_residuals(state, basis).values()])
    aux = np.zeros((2, 4))
    for o in Outcome:
        if not o.correctable or probs[o.value] == 0.0:
            continue
        _, bob_state, _ = alice_measure(state, basis, o)
        corrected = apply_unitary(bob_state, bob_primary_correction(o), [0, 1])
        _, aux[:, o.value] = aux_probabilities(corrected, ch, o)
    return probs, aux[0], aux[1]


def exact_branch_report(t: TargetState, ch: ChannelPair) -> BranchReport:
    probs, aux0, _ = _branch_tree(t, ch)
    success = {o: float(probs[o.value] * aux0[o.value]) for o in Outcome}
    total = sum(success.values())
    expected = closed_form_success(ch)
    if abs(total - expected) > IDENTITY_TOL:
        raise RuntimeError(f"total success {total!r} disagrees with closed form {expected!r}")
    return BranchReport({o: float(probs[o.value]) for o in Outcome}, success, total)


def printed_branch_probabilities(t: TargetState, ch: ChannelPair) -> dict[Outcome, float]:
    """Branch probabilities written directly as sums of squared coefficients."""
    a, b, c, d = ch.a, ch.b, ch.c, ch.d
    al, be, ga, de = (abs(x) ** 2 for x in t.coefficients)
    return {
        Outcome.PHI: (a * c) ** 2 * al + (a * d) ** 2 * be + (b * c) ** 2 * ga + (b * d) ** 2 * de,
        Outcome.PHI_PERP: (b * d) ** 2 * al + (b * c) ** 2 * be + (a * d) ** 2 * ga + (a * c) ** 2 * de,
        Outcome.PSI: (b * c) ** 2 * al + (b * d) ** 2 * be + (a * c) ** 2 * ga + (a * d) ** 2 * de,
        Outcome.PSI_PERP: (a * d) ** 2 * al + (a * c) ** 2 * be + (b * d) ** 2 * ga + (b * c) ** 2 * de,
    }


def oracle_reconstruct(t: TargetState, ch: ChannelPair) -> float:
    """Max entrywise gap between the channel state and sum_k |basis_k> (x) residual_k."""
    state = build_channel_state(ch)
    basis = build_measurement_basis(t)
    branches = branch_residuals(state, basis)
    rebuilt = sum(tensor(basis[o], branches[o][0]).amps for o in Outcome)
    return float(np.max(np.abs(rebuilt - state.amps)))


# --- Monte Carlo ------------------------------------------------------------

_WORDS_PER_COUNTER = 4
_WORDS_PER_TRIAL = 2


def trial_uniforms(seed: int, start: int, stop: int) -> np.ndarray:
    """Uniforms in [0, 1) for trials ``start..stop-1``, shape ``(n, 2)``.

    Trial ``i`` always reads raw words ``2i`` and ``2i+1`` of a Philox stream
    keyed by ``seed``, so any slice can be regenerated on its own.
    """
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    if not 0 <= start <= stop:
        raise ValueError(f"bad trial range [{start}, {stop})")
    first_word = _WORDS_PER_TRIAL * start
    skip = first_word % _WORDS_PER_COUNTER
    bitgen = np.random.Philox(key=seed)
    bitgen.advance(first_word // _WORDS_PER_COUNTER)
    raw = bitgen.random_raw(skip + _WORDS_PER_TRIAL * (stop - start))[skip:]
    return ((raw >> np.uint64(11)) * 2.0**-53).reshape(-1, _WORDS_PER_TRIAL)


@dataclass(frozen=True)
class MonteCarloSummary:
    trials: int
    successes: int
    estimated_rate: float
    standard_error: float
    seed: int


def _count_successes(probs: np.ndarray, aux0_threshold: np.ndarray, u: np.ndarray) -> int:
    # vectorised twin of the draws inside run_protocol
    k = np.minimum(np.searchsorted(np.cumsum(probs), u[:, 0], side="right"), np.flatnonzero(probs > 0)[-1])
    return int(np.count_nonzero(u[:, 1] < aux0_threshold[k]))


def monte_carlo(
    t: TargetState,
    ch: ChannelPair,
    trials: int,
    seed: int,
    chunk_size: int = 65536,
) -> MonteCarloSummary:
    """Sample ``trials`` protocol runs.

    Trial ``i`` consumes ``trial_uniforms(seed, i, i+1)``: the first uniform
    picks the sender's outcome, the second the ancilla result, exactly as
    ``run_protocol(t, ch, alice=u0, aux=u1)`` would.  The result depends only
    on (seed, trials, inputs), never on ``chunk_size``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    probs, aux0, aux1 = _branch_tree(t, ch)
    # an ancilla draw with P(aux=1) == 0 always lands on aux=0
    threshold = np.where(aux1 > 0.0, aux0, np.inf)
    threshold[aux0 == 0.0] = 0.0
    successes = 0
    for start in range(0, trials, chunk_size):
        stop = min(trials, start + chunk_size)
        successes += _count_successes(probs, threshold, trial_uniforms(seed, start, stop))
    rate = successes / trials
    return MonteCarloSummary(trials, successes, rate, math.sqrt(rate * (1 - rate) / trials), seed)


def replay_trial(t: TargetState, ch: ChannelPair, seed: int, index: int):
    """The full ``ProtocolResult`` for one Monte Carlo trial."""
    u0, u1 = trial_uniforms(seed, index, index + 1)[0]
    return run_protocol(t, ch, alice=float(u0), aux=float(u1))
