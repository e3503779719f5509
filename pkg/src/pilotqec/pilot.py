"""Pilot-state error correction protocol.

The sender interleaves probe ("pilot") qubits with the data qubits.  Every
qubit picks up the same unknown rotation in transit, so the pilots arrive
carrying the rotation angle and can be spent to undo it on the data.  This
module implements the receiver side:

* SWAP-test comparison of a received pilot against the agreed reference,
  to decide whether the link rotated at all;
* the probabilistic single-shot corrector: a two-qubit circuit that maps a
  damaged qubit to either the fixed state (rotate back) or a doubly-damaged
  one (rotate forward), each with probability 1/2;
* the doubling circuit that turns two angle-a pilots into one angle-2a
  pilot (again probability 1/2, the failure branch yielding an angle-0
  pilot);
* generation of the power-of-two pilot string {a, 2a, 4a, ...} from raw
  pilots under per-stage budgets, with a consumption ledger;
* the correction cascade over that string (success probability 1 - 2^-l)
  and its block form where one outcome path corrects any number of data
  qubits simultaneously;
* the counting formulas tying string length to raw-pilot cost.

All circuits assume the phase-generator convention: pilots are held in the
equatorial "working form" (e^{i a/2}|0> + e^{-i a/2}|1>)/sqrt(2), which is
what the link produces from a (|0>+|1>)/sqrt(2) input.  Under that form the
doubling identity U_a|a> = |2a> and the corrector branch identities are
exact linear algebra; the amplitude form cos(a/2)|0> + i sin(a/2)|1> is one
Hadamard away.  Every operation exists in two modes: exact enumeration of
all measurement branches with their probabilities (authoritative for the
acceptance numbers) and single-path sampling from an explicit random
source.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from pilotqec import qcore
from pilotqec.channel import ChannelParams, RotationConvention, rotation_unitary
from pilotqec.qcore import MeasurementRecord, PureState


@dataclass(frozen=True)
class PilotState:
    """A working-form pilot qubit tagged with its nominal angle.

    The angle is bookkeeping only; no circuit reads it.  ``working_pilot``
    is the canonical constructor; ``amplitude_pilot`` gives the
    Hadamard-conjugate form used when a pilot is described by amplitudes
    rather than phases.
    """

    nominal_angle: float
    state: PureState

    def __post_init__(self) -> None:
        if self.state.qubits != 1:
            raise ValueError("pilot states are single qubits")


def working_pilot(angle: float) -> PilotState:
    """Equatorial pilot (e^{i a/2}|0> + e^{-i a/2}|1>)/sqrt(2)."""
    half = angle / 2.0
    amps = np.array([np.exp(1j * half), np.exp(-1j * half)]) / np.sqrt(2.0)
    return PilotState(angle, PureState.from_amplitudes(amps))


def amplitude_pilot(angle: float) -> PilotState:
    """Amplitude-form pilot cos(a/2)|0> + i sin(a/2)|1>."""
    half = angle / 2.0
    amps = np.array([np.cos(half), 1j * np.sin(half)])
    return PilotState(angle, PureState.from_amplitudes(amps))


def to_working_form(pilot: PilotState) -> PilotState:
    """Hadamard an amplitude-form pilot into working form."""
    return PilotState(pilot.nominal_angle, qcore.apply(qcore.HADAMARD, pilot.state, [0]))


# --------------------------------------------------------------------------
# noise detection (SWAP test)
# --------------------------------------------------------------------------


def _swap_test_circuit(candidate: PureState, reference: PureState) -> PureState:
    if candidate.qubits != 1 or reference.qubits != 1:
        raise ValueError("swap test compares single qubits")
    register = qcore.tensor(qcore.tensor(PureState.basis(1, 0), candidate), reference)
    register = qcore.apply(qcore.HADAMARD, register, [0])
    register = qcore.apply(qcore.controlled(qcore.SWAP, 1), register, [0, 1, 2])
    return qcore.apply(qcore.HADAMARD, register, [0])


def swap_test(candidate: PureState, reference: PureState) -> float:
    """Exact ancilla-0 probability of the three-qubit SWAP-test circuit.

    Equals 1/2 + |<reference|candidate>|^2 / 2: identical inputs always
    give 0, orthogonal inputs give 0 with probability 1/2.
    """
    branch0, _ = qcore.measure(_swap_test_circuit(candidate, reference), 0)
    return branch0.probability


def sample_swap_test(
    candidate: PureState, reference: PureState, rng: np.random.Generator
) -> int:
    """Run the SWAP-test circuit once and return the sampled ancilla bit."""
    return qcore.sample_measure(_swap_test_circuit(candidate, reference), 0, rng).outcome


@dataclass(frozen=True)
class NoiseVerdict:
    """Outcome of a repeated SWAP-test noise check."""

    clean: bool
    outcomes: tuple[int, ...]

    @property
    def error_bound(self) -> float:
        """Worst-case probability of declaring a noisy link clean."""
        return 0.5 ** len(self.outcomes)


def noise_detect(
    candidate_copies: list[PureState],
    reference: PureState,
    rng: np.random.Generator,
) -> NoiseVerdict:
    """Declare the link clean iff k sampled SWAP tests all return 0.

    For a candidate orthogonal to the reference each test passes with
    probability 1/2, so the false-clean probability is 2^-k.
    """
    if len(candidate_copies) == 0:
        raise ValueError("need at least one candidate copy")
    outcomes = tuple(sample_swap_test(copy, reference, rng) for copy in candidate_copies)
    return NoiseVerdict(clean=all(bit == 0 for bit in outcomes), outcomes=outcomes)


def false_clean_probability(candidate: PureState, reference: PureState, k: int) -> float:
    """Exact probability that k independent SWAP tests all return 0."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return swap_test(candidate, reference) ** k


# --------------------------------------------------------------------------
# counting
# --------------------------------------------------------------------------


def required_pilot_count(length: int) -> int:
    """Raw pilots needed to generate a power-of-two string of this length.

    Closed form l + 1 + (l - 2) * 2^(l - 1); a single raw pilot is itself
    the length-1 string.
    """
    if length < 1:
        raise ValueError("string length must be >= 1")
    if length == 1:
        return 1
    return length + 1 + (length - 2) * (1 << (length - 1))


def pilot_count_term_sum(length: int) -> int:
    """Same count as a stage-by-stage sum: sum_i i*2^(i-1), plus the kept
    base pilot and one seed per doubling stage."""
    if length < 1:
        raise ValueError("string length must be >= 1")
    if length == 1:
        return 1
    return sum(i * (1 << (i - 1)) for i in range(1, length)) + 1 + (length - 1)


def stage_budgets(length: int) -> list[int]:
    """Raw-pilot budget of each doubling stage i = 1 .. l-1.

    Stage i produces the string element at angle 2^i * base and may consume
    i * 2^(i-1) fuel pilots plus its one seed.  Together with the single
    raw pilot kept as the base element the budgets sum to
    required_pilot_count(l).
    """
    return [i * (1 << (i - 1)) + 1 for i in range(1, length)]


def success_probability(length: int) -> float:
    """Cascade success probability 1 - 2^-l for an l-element string."""
    if length < 1:
        raise ValueError("string length must be >= 1")
    return 1.0 - 0.5**length


# --------------------------------------------------------------------------
# single-shot correction and doubling circuits
# --------------------------------------------------------------------------


_EXCHANGE_GATE = {
    0: qcore.controlled(qcore.PAULI_X, 0),
    1: qcore.controlled(qcore.PAULI_X, 1),
}


def _exchange_circuit(kept: PureState, consumed: PureState, control_value: int) -> PureState:
    register = qcore.tensor(kept, consumed)
    return qcore.apply(_EXCHANGE_GATE[control_value], register, [0, 1])


def _pilot_exchange(
    kept: PureState, consumed: PureState, control_value: int
) -> tuple[MeasurementRecord, MeasurementRecord]:
    """Two-qubit primitive underlying both correction and doubling.

    The kept qubit controls a NOT on the consumed (working-form pilot)
    qubit; the pilot is then measured out.  Each branch applies a diagonal
    rotation to the kept qubit: with a 0-valued control the outcome-0
    branch rotates back by the pilot angle and outcome-1 rotates forward;
    a 1-valued control swaps the roles.  Branch records carry the factored
    one-qubit post states.
    """
    register = _exchange_circuit(kept, consumed, control_value)
    branch0, branch1 = qcore.measure(register, 1)
    out = []
    for record in (branch0, branch1):
        post = None if record.degenerate else qcore.factor_out(record.post_state, 1, record.outcome)
        out.append(MeasurementRecord(record.outcome, record.probability, post, record.degenerate))
    return out[0], out[1]


def _sample_pilot_exchange(
    kept: PureState, consumed: PureState, control_value: int, rng: np.random.Generator
) -> MeasurementRecord:
    """One sampled shot of the exchange primitive (single branch collapsed)."""
    register = _exchange_circuit(kept, consumed, control_value)
    record = qcore.sample_measure(register, 1, rng)
    post = None if record.degenerate else qcore.factor_out(record.post_state, 1, record.outcome)
    return MeasurementRecord(record.outcome, record.probability, post, record.degenerate)


@dataclass(frozen=True)
class SingleCorrection:
    """Both branches of one corrector shot.

    ``right`` (pilot measured 0) holds the backward-rotated data qubit,
    ``wrong`` (pilot measured 1) the forward-rotated one.
    """

    right: MeasurementRecord
    wrong: MeasurementRecord


def correct_single(damaged: PureState, pilot: PilotState) -> SingleCorrection:
    """One corrector shot: data qubit controls a 0-controlled NOT on the
    working-form pilot, which is then measured.

    If the damage was a forward rotation by the pilot angle, the right
    branch restores the original state exactly and the wrong branch doubles
    the rotation; both branches occur with probability 1/2.
    """
    if damaged.qubits != 1:
        raise ValueError("corrector acts on single data qubits")
    right, wrong = _pilot_exchange(damaged, pilot.state, control_value=0)
    return SingleCorrection(right=right, wrong=wrong)


def sample_correct_single(
    damaged: PureState, pilot: PilotState, rng: np.random.Generator
) -> MeasurementRecord:
    """Draw one corrector branch (outcome 0 = right, 1 = wrong)."""
    return _sample_pilot_exchange(damaged, pilot.state, 0, rng)


@dataclass(frozen=True)
class DoublingShot:
    """Both branches of a pilot-doubling attempt.

    ``doubled`` (fuel measured 0) is the source pilot pushed to twice its
    angle; ``reset`` (fuel measured 1) is the source pulled back to angle
    zero, kept as an auditable byproduct rather than discarded.
    """

    doubled: MeasurementRecord
    reset: MeasurementRecord
    angle: float

    def branch_pilot(self, record: MeasurementRecord) -> PilotState:
        new_angle = 2.0 * self.angle if record.outcome == 0 else 0.0
        return PilotState(new_angle, record.post_state)


def double_pilot(source: PilotState, fuel: PilotState) -> DoublingShot:
    """Double a pilot's angle by burning a second pilot at the same angle.

    The source controls a 1-controlled NOT on the fuel, which is measured:
    outcome 0 leaves the source rotated forward (angle doubled), outcome 1
    rotated backward (angle zero), each with probability 1/2.
    """
    if source.nominal_angle != fuel.nominal_angle:
        raise ValueError(
            f"doubling needs equal pilot angles, got {source.nominal_angle} and {fuel.nominal_angle}"
        )
    doubled, reset = _pilot_exchange(source.state, fuel.state, control_value=1)
    return DoublingShot(doubled=doubled, reset=reset, angle=source.nominal_angle)


def sample_double_pilot(
    source: PilotState, fuel: PilotState, rng: np.random.Generator
) -> tuple[bool, PilotState]:
    """Attempt one doubling; returns (succeeded, resulting pilot)."""
    if source.nominal_angle != fuel.nominal_angle:
        raise ValueError(
            f"doubling needs equal pilot angles, got {source.nominal_angle} and {fuel.nominal_angle}"
        )
    record = _sample_pilot_exchange(source.state, fuel.state, 1, rng)
    if record.outcome == 0:
        return True, PilotState(2.0 * source.nominal_angle, record.post_state)
    return False, PilotState(0.0, record.post_state)


# --------------------------------------------------------------------------
# pilot string generation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PilotString:
    """The power-of-two ladder of working pilots used by the cascade."""

    base_angle: float
    states: list[PilotState]
    consumed_raw: int

    def __post_init__(self) -> None:
        if len(self.states) < 1:
            raise ValueError("pilot string must have length >= 1")
        for i, pilot in enumerate(self.states):
            expected = self.base_angle * (1 << i)
            if pilot.nominal_angle != expected:
                raise ValueError(
                    f"string element {i} has angle {pilot.nominal_angle}, expected {expected}"
                )
        if self.consumed_raw > required_pilot_count(len(self.states)):
            raise ValueError("consumption ledger exceeds the required pilot count")

    @property
    def length(self) -> int:
        return len(self.states)

    @classmethod
    def ideal(cls, base_angle: float, length: int) -> "PilotString":
        """String with exact ladder pilots, bypassing the generation game."""
        states = [working_pilot(base_angle * (1 << i)) for i in range(length)]
        return cls(base_angle, states, required_pilot_count(length))


@dataclass(frozen=True)
class GenerationReport:
    """Result of one attempt to generate a pilot string from raw pilots."""

    string: PilotString | None
    consumed_raw: int
    failed_stage: int | None
    stage_budgets: list[int]
    reset_pilots: int

    @property
    def succeeded(self) -> bool:
        return self.string is not None


class _RawSupply:
    """Per-stage budgeted draw from the raw pilot list."""

    def __init__(self, raw: list[PilotState]):
        self.raw = raw
        self.cursor = 0
        self.stage_left = 0

    def open_stage(self, budget: int) -> None:
        self.stage_left = budget

    def take(self) -> PilotState | None:
        if self.stage_left == 0 or self.cursor >= len(self.raw):
            return None
        self.stage_left -= 1
        self.cursor += 1
        return self.raw[self.cursor - 1]


def generate_pilot_string(
    raw: list[PilotState], target_l: int, rng: np.random.Generator
) -> GenerationReport:
    """Generate the power-of-two string from raw pilots by budgeted doubling.

    The first raw pilot is kept as the base element.  Stage i then grows
    the element at angle 2^i * base with a recursive doubling ladder:
    build a register at 2^(i-1), build fuel at 2^(i-1), attempt to double;
    a failed attempt resets the register to angle zero (the reset pilot is
    retired to the ledger) and the register is rebuilt.  Each stage draws
    from its own budget (`stage_budgets`); exhausting a budget aborts the
    whole generation with a report naming the stage.
    """
    if target_l < 1:
        raise ValueError("target string length must be >= 1")
    if len(raw) == 0:
        raise ValueError("raw pilot list is empty")
    base = raw[0].nominal_angle
    for pilot in raw:
        if pilot.nominal_angle != base:
            raise ValueError("raw pilots must share one nominal angle")
    required = required_pilot_count(target_l)
    if len(raw) < required:
        raise ValueError(
            f"insufficient raw pilots: have {len(raw)}, string of length "
            f"{target_l} requires {required}"
        )

    budgets = stage_budgets(target_l)
    supply = _RawSupply(raw)
    resets = 0

    supply.open_stage(1)
    elements = [supply.take()]  # base element is a raw pilot as-is

    def climb(level: int) -> PilotState | None:
        nonlocal resets
        if level == 0:
            return supply.take()
        register = climb(level - 1)
        if register is None:
            return None
        while True:
            fuel = climb(level - 1)
            if fuel is None:
                return None
            succeeded, register = sample_double_pilot(register, fuel, rng)
            if succeeded:
                return register
            resets += 1
            register = climb(level - 1)
            if register is None:
                return None

    for stage, budget in enumerate(budgets, start=1):
        supply.open_stage(budget)
        element = climb(stage)
        if element is None:
            return GenerationReport(
                string=None,
                consumed_raw=supply.cursor,
                failed_stage=stage,
                stage_budgets=budgets,
                reset_pilots=resets,
            )
        elements.append(element)

    string = PilotString(base, elements, supply.cursor)
    return GenerationReport(
        string=string,
        consumed_raw=supply.cursor,
        failed_stage=None,
        stage_budgets=budgets,
        reset_pilots=resets,
    )


@functools.cache
def _climb_outcomes(level: int, budget: int) -> tuple[tuple[tuple[int, float], ...], float]:
    """Exact cost distribution of one `climb` call.

    Returns ((cost, probability), ...) over successful completions plus the
    probability of exhausting the budget.  Mirrors the sampled policy in
    generate_pilot_string exactly.
    """
    if level == 0:
        if budget >= 1:
            return ((1, 1.0),), 0.0
        return (), 1.0

    success: dict[int, float] = {}
    fail = 0.0
    reg_success, reg_fail = _climb_outcomes(level - 1, budget)
    fail += reg_fail
    for reg_cost, reg_p in reg_success:
        attempt_success, attempt_fail = _attempt_outcomes(level, budget - reg_cost)
        for cost, p in attempt_success:
            total = reg_cost + cost
            success[total] = success.get(total, 0.0) + reg_p * p
        fail += reg_p * attempt_fail
    return tuple(sorted(success.items())), fail


@functools.cache
def _attempt_outcomes(level: int, budget: int) -> tuple[tuple[tuple[int, float], ...], float]:
    """Exact cost distribution of the fuel-build / coin / rebuild loop."""
    success: dict[int, float] = {}
    fail = 0.0
    fuel_success, fuel_fail = _climb_outcomes(level - 1, budget)
    fail += fuel_fail
    for fuel_cost, fuel_p in fuel_success:
        success[fuel_cost] = success.get(fuel_cost, 0.0) + fuel_p * 0.5
        rebuild_success, rebuild_fail = _climb_outcomes(level - 1, budget - fuel_cost)
        fail += fuel_p * 0.5 * rebuild_fail
        for rebuild_cost, rebuild_p in rebuild_success:
            next_success, next_fail = _attempt_outcomes(level, budget - fuel_cost - rebuild_cost)
            for cost, p in next_success:
                total = fuel_cost + rebuild_cost + cost
                success[total] = success.get(total, 0.0) + fuel_p * 0.5 * rebuild_p * p
            fail += fuel_p * 0.5 * rebuild_p * next_fail
    return tuple(sorted(success.items())), fail


def stage_success_probability(stage: int) -> float:
    """Exact success probability of doubling stage i under its budget."""
    if stage < 1:
        raise ValueError("stages are numbered from 1")
    budget = stage * (1 << (stage - 1)) + 1
    outcomes, _ = _climb_outcomes(stage, budget)
    return float(sum(p for _, p in outcomes))


def generation_success_probability(target_l: int) -> float:
    """Exact probability that generate_pilot_string builds the full string.

    Product of the per-stage success probabilities; enumerated from the
    same budgeted policy the sampler runs, not from any closed form.
    """
    if target_l < 1:
        raise ValueError("target string length must be >= 1")
    result = 1.0
    for stage in range(1, target_l):
        result *= stage_success_probability(stage)
    return result


# --------------------------------------------------------------------------
# cascade and block correction
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CorrectionOutcome:
    """Result of one correction cascade on one data qubit."""

    success: bool
    attempts_used: int
    residual_angle: float
    final_state: PureState
    fidelity: float | None = None

    def csv_row(self, trial_id: int) -> list:
        fid = "" if self.fidelity is None else self.fidelity
        return [trial_id, int(self.success), self.attempts_used, self.residual_angle, fid]


CORRECTION_CSV_HEADER = ["trial_id", "success", "attempts_used", "residual_angle_rad", "fidelity"]


def _check_string_angle(string: PilotString, channel_angle: float | None) -> None:
    if channel_angle is not None and string.base_angle != channel_angle:
        raise ValueError(
            f"pilot string base angle {string.base_angle} does not match "
            f"channel rotation {channel_angle}"
        )


def _outcome(
    success: bool,
    attempts: int,
    string: PilotString,
    state: PureState,
    original: PureState | None,
) -> CorrectionOutcome:
    residual = 0.0 if success else string.base_angle * (1 << string.length)
    fid = None
    if original is not None:
        fid = qcore.fidelity(original, state.density_matrix())
    return CorrectionOutcome(success, attempts, residual, state, fid)


def correct_cascade(
    damaged: PureState,
    string: PilotString,
    rng: np.random.Generator,
    original: PureState | None = None,
    channel_angle: float | None = None,
) -> CorrectionOutcome:
    """Run the correction ladder, drawing one outcome path.

    Attempt j fires the corrector with the string's j-th pilot; a right
    branch ends the cascade with the damage undone, a wrong branch doubles
    the residual rotation, which is exactly what the next pilot up the
    ladder corrects.  Failing all l attempts leaves a residual rotation of
    2^l times the base angle.
    """
    _check_string_angle(string, channel_angle)
    state = damaged
    for attempt, pilot in enumerate(string.states, start=1):
        record = sample_correct_single(state, pilot, rng)
        state = record.post_state
        if record.outcome == 0:
            return _outcome(True, attempt, string, state, original)
    return _outcome(False, string.length, string, state, original)


def enumerate_cascade(
    damaged: PureState,
    string: PilotString,
    original: PureState | None = None,
    channel_angle: float | None = None,
) -> list[tuple[float, CorrectionOutcome]]:
    """All l+1 outcome paths of the cascade with their exact probabilities."""
    _check_string_angle(string, channel_angle)
    paths: list[tuple[float, CorrectionOutcome]] = []
    prefix = 1.0
    state = damaged
    for attempt, pilot in enumerate(string.states, start=1):
        shot = correct_single(state, pilot)
        paths.append(
            (
                prefix * shot.right.probability,
                _outcome(True, attempt, string, shot.right.post_state, original),
            )
        )
        prefix *= shot.wrong.probability
        state = shot.wrong.post_state
    paths.append((prefix, _outcome(False, string.length, string, state, original)))
    return paths


def cascade_success_probability(string: PilotString, damaged: PureState | None = None) -> float:
    """Exact success probability of the cascade, summed over its branches."""
    if damaged is None:
        damaged = qcore.apply(
            rotation_unitary(string.base_angle, RotationConvention.Z_PHASE),
            PureState.basis(1, 0),
            [0],
        )
    paths = enumerate_cascade(damaged, string)
    return float(sum(p for p, outcome in paths if outcome.success))


def correct_block(
    block: list[PureState],
    string: PilotString,
    rng: np.random.Generator,
    originals: list[PureState] | None = None,
    channel_angle: float | None = None,
) -> list[CorrectionOutcome]:
    """Correct a whole damaged block along one shared outcome path.

    The pilot measurements are drawn once (from the first qubit's circuit)
    and every block qubit follows the same branch, so all qubits succeed or
    fail together and the joint success probability does not depend on the
    block length.
    """
    _check_string_angle(string, channel_angle)
    if len(block) == 0:
        raise ValueError("block must be nonempty")
    if originals is not None and len(originals) != len(block):
        raise ValueError("originals must match the block length")

    states = list(block)
    attempts = 0
    succeeded = False
    for pilot in string.states:
        attempts += 1
        lead = correct_single(states[0], pilot)
        outcome = 0 if rng.random() < lead.right.probability else 1
        chosen = [lead.right if outcome == 0 else lead.wrong]
        for state in states[1:]:
            shot = correct_single(state, pilot)
            chosen.append(shot.right if outcome == 0 else shot.wrong)
        states = [record.post_state for record in chosen]
        if outcome == 0:
            succeeded = True
            break

    return [
        _outcome(succeeded, attempts, string, state, originals[i] if originals else None)
        for i, state in enumerate(states)
    ]


def enumerate_block(
    block: list[PureState],
    string: PilotString,
    originals: list[PureState] | None = None,
    channel_angle: float | None = None,
) -> list[tuple[float, list[CorrectionOutcome]]]:
    """All shared outcome paths of a block correction with probabilities.

    Path probabilities come from the first qubit's pilot measurements; the
    remaining qubits ride the same branches (their branch norms are 1, so
    they do not alter the path probability).
    """
    _check_string_angle(string, channel_angle)
    if len(block) == 0:
        raise ValueError("block must be nonempty")

    paths: list[tuple[float, list[CorrectionOutcome]]] = []
    prefix = 1.0
    states = list(block)
    for attempt, pilot in enumerate(string.states, start=1):
        shots = [correct_single(state, pilot) for state in states]
        success_states = [shot.right.post_state for shot in shots]
        paths.append(
            (
                prefix * shots[0].right.probability,
                [
                    _outcome(True, attempt, string, s, originals[i] if originals else None)
                    for i, s in enumerate(success_states)
                ],
            )
        )
        prefix *= shots[0].wrong.probability
        states = [shot.wrong.post_state for shot in shots]
    paths.append(
        (
            prefix,
            [
                _outcome(False, string.length, string, s, originals[i] if originals else None)
                for i, s in enumerate(states)
            ],
        )
    )
    return paths


# --------------------------------------------------------------------------
# protocol-level parameters
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ProtocolParams:
    """Full parameterisation of one protocol run."""

    l: int
    n: int
    r: int
    theta: float
    channel: ChannelParams

    def __post_init__(self) -> None:
        if self.l < 1:
            raise ValueError("pilot string length l must be >= 1")
        if self.n < 1:
            raise ValueError("data block size n must be >= 1")
        if self.r < 0:
            raise ValueError("raw pilot count r must be >= 0")
        if self.theta != self.channel.theta:
            raise ValueError(
                f"protocol angle {self.theta} differs from channel rotation {self.channel.theta}"
            )

    def require_generation_feasible(self) -> None:
        needed = required_pilot_count(self.l)
        if self.r < needed:
            raise ValueError(
                f"r={self.r} raw pilots cannot generate an l={self.l} string; "
                f"required r={needed}"
            )

    def require_protocol_convention(self) -> None:
        if self.channel.convention is not RotationConvention.Z_PHASE:
            raise ValueError(
                "correction circuits require the z_phase rotation convention"
            )

    def to_json_dict(self) -> dict:
        return {
            "l": self.l,
            "n": self.n,
            "r": self.r,
            "theta_rad": self.theta,
            "channel": self.channel.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ProtocolParams":
        return cls(
            l=int(data["l"]),
            n=int(data["n"]),
            r=int(data["r"]),
            theta=float(data["theta_rad"]),
            channel=ChannelParams.from_json_dict(data["channel"]),
        )
