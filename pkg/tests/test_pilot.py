"""Protocol circuit tests: SWAP test, corrector, doubling, generation, cascade."""

import math

import numpy as np
import pytest

from pilotqec import pilot, qcore
from pilotqec.channel import ChannelParams, RotationConvention
from pilotqec.pilot import (
    PilotString,
    ProtocolParams,
    amplitude_pilot,
    cascade_success_probability,
    correct_block,
    correct_cascade,
    correct_single,
    double_pilot,
    enumerate_block,
    enumerate_cascade,
    false_clean_probability,
    generate_pilot_string,
    generation_success_probability,
    noise_detect,
    pilot_count_term_sum,
    required_pilot_count,
    stage_budgets,
    stage_success_probability,
    success_probability,
    swap_test,
    to_working_form,
    working_pilot,
)
from pilotqec.qcore import PureState

RNG = np.random.default_rng(2024)


def phase_rotation_matrix(theta: float) -> np.ndarray:
    """Oracle rotation diag(e^{i t/2}, e^{-i t/2}), built independently."""
    return np.diag([np.exp(1j * theta / 2), np.exp(-1j * theta / 2)])


def overlap_defect(expected: np.ndarray, got: PureState) -> float:
    """1 - |<expected|got>| with expected given as a plain vector."""
    return 1.0 - abs(np.vdot(expected, got.amplitudes))


# -- pilot forms -----------------------------------------------------------------


def test_working_form_is_hadamard_of_amplitude_form():
    for theta in RNG.uniform(-np.pi, np.pi, size=10):
        h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        expected = h @ amplitude_pilot(theta).state.amplitudes
        assert overlap_defect(expected, working_pilot(theta).state) < 1e-12
        converted = to_working_form(amplitude_pilot(theta))
        assert overlap_defect(expected, converted.state) < 1e-12


def test_pilot_state_must_be_single_qubit():
    with pytest.raises(ValueError):
        pilot.PilotState(0.0, PureState.basis(2, 0))


# -- swap test --------------------------------------------------------------------


def oracle_swap_test_probability(candidate: np.ndarray, reference: np.ndarray) -> float:
    """Independent full 8x8 simulation with explicit matrices."""
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    h_on_ancilla = np.kron(h, np.eye(4))
    cswap = np.eye(8, dtype=complex)
    # swap the two target qubits when the ancilla (MSB) is 1
    cswap[[5, 6], :] = cswap[[6, 5], :]
    state = np.kron(np.array([1.0, 0.0]), np.kron(candidate, reference))
    state = h_on_ancilla @ cswap @ h_on_ancilla @ state
    return float(np.sum(np.abs(state[:4]) ** 2))


def test_swap_test_identical_states():
    s = PureState.random(1, RNG)
    assert swap_test(s, s) == 1.0


def test_swap_test_orthogonal_states():
    assert swap_test(PureState.basis(1, 0), PureState.basis(1, 1)) == 0.5


def test_swap_test_half_overlap():
    # |<0|+>|^2 = 1/2, so the ancilla-0 probability is 3/4
    p = swap_test(qcore.plus_state(), PureState.basis(1, 0))
    assert abs(p - 0.75) < 1e-12
    oracle = oracle_swap_test_probability(
        qcore.plus_state().amplitudes, PureState.basis(1, 0).amplitudes
    )
    assert abs(p - oracle) < 1e-12


def test_swap_test_closed_form_random_pairs():
    for _ in range(100):
        a = PureState.random(1, RNG)
        b = PureState.random(1, RNG)
        closed = 0.5 + 0.5 * abs(qcore.overlap(b, a)) ** 2
        circuit = swap_test(a, b)
        assert abs(circuit - closed) < 1e-12
        assert abs(circuit - oracle_swap_test_probability(a.amplitudes, b.amplitudes)) < 1e-12


def test_noise_detect_identical_always_clean():
    rng = np.random.default_rng(8)
    s = working_pilot(0.4).state
    for _ in range(50):
        assert noise_detect([s, s, s], s, rng).clean


def test_noise_detect_orthogonal_false_clean_rate():
    rng = np.random.default_rng(9)
    z0, z1 = PureState.basis(1, 0), PureState.basis(1, 1)
    hits = sum(noise_detect([z1], z0, rng).clean for _ in range(2000))
    assert 880 < hits < 1120  # fair coin, ~N(1000, 11)


def test_noise_detect_empty_list():
    with pytest.raises(ValueError):
        noise_detect([], PureState.basis(1, 0), np.random.default_rng(0))


def test_false_clean_probability_exact_powers_of_two():
    z0, z1 = PureState.basis(1, 0), PureState.basis(1, 1)
    plus = PureState.from_amplitudes([1.0, 1.0])
    minus = PureState.from_amplitudes([1.0, -1.0])
    for k in range(1, 11):
        assert false_clean_probability(z1, z0, k) == 2.0**-k
        assert false_clean_probability(minus, plus, k) == 2.0**-k


def test_false_clean_probability_identical_is_one():
    s = working_pilot(1.1).state
    assert false_clean_probability(s, s, 4) == 1.0


# -- counting ---------------------------------------------------------------------


def test_required_pilot_count_table():
    assert [required_pilot_count(l) for l in range(2, 7)] == [3, 8, 21, 54, 135]


def test_required_pilot_count_degenerate_and_errors():
    assert required_pilot_count(1) == 1
    with pytest.raises(ValueError):
        required_pilot_count(0)


def test_closed_form_matches_term_sum():
    for l in range(2, 17):
        assert required_pilot_count(l) == pilot_count_term_sum(l)


def test_required_pilot_count_l8():
    # 8 + 1 + 6 * 2^7
    assert required_pilot_count(8) == 777


def test_stage_budgets_sum_to_required():
    for l in range(2, 10):
        assert 1 + sum(stage_budgets(l)) == required_pilot_count(l)


def test_success_probability_values():
    assert success_probability(1) == 0.5
    assert success_probability(5) == 0.96875
    assert success_probability(6) == 0.984375
    with pytest.raises(ValueError):
        success_probability(0)


# -- single-shot corrector ----------------------------------------------------------


def oracle_corrector_branches(damaged: np.ndarray, theta: float):
    """Independent 4x4 simulation of the corrector circuit.

    Explicit zero-controlled NOT (data = MSB) on the working pilot, then
    projection of the pilot qubit; returns (p0, state0, p1, state1) with the
    renormalised one-qubit data states.
    """
    working = np.array([np.exp(1j * theta / 2), np.exp(-1j * theta / 2)]) / np.sqrt(2)
    reg = np.kron(damaged, working)
    cnot0 = np.array(
        [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=complex
    )
    reg = cnot0 @ reg
    out = []
    for outcome in (0, 1):
        branch = reg[outcome::2]
        weight = float(np.sum(np.abs(branch) ** 2))
        out.extend([weight, branch / np.sqrt(weight)])
    return out


def test_correct_single_zero_angle_is_noop():
    s = PureState.random(1, RNG)
    shot = correct_single(s, working_pilot(0.0))
    assert overlap_defect(s.amplitudes, shot.right.post_state) < 1e-12
    assert overlap_defect(s.amplitudes, shot.wrong.post_state) < 1e-12


def test_correct_single_right_branch_restores():
    for _ in range(20):
        theta = float(RNG.uniform(-2 * np.pi, 2 * np.pi))
        original = PureState.random(1, RNG)
        damaged = PureState(phase_rotation_matrix(theta) @ original.amplitudes)
        shot = correct_single(damaged, working_pilot(theta))
        fid = qcore.fidelity(original, shot.right.post_state.density_matrix())
        assert abs(fid - 1.0) < 1e-10


def test_correct_single_wrong_branch_doubles():
    for _ in range(20):
        theta = float(RNG.uniform(-2 * np.pi, 2 * np.pi))
        original = PureState.random(1, RNG)
        damaged = PureState(phase_rotation_matrix(theta) @ original.amplitudes)
        shot = correct_single(damaged, working_pilot(theta))
        expected = phase_rotation_matrix(2 * theta) @ original.amplitudes
        assert overlap_defect(expected, shot.wrong.post_state) < 1e-10


def test_correct_single_against_circuit_oracle():
    for _ in range(30):
        theta = float(RNG.uniform(-2 * np.pi, 2 * np.pi))
        damaged = PureState.random(1, RNG)
        shot = correct_single(damaged, working_pilot(theta))
        p0, state0, p1, state1 = oracle_corrector_branches(damaged.amplitudes, theta)
        assert abs(shot.right.probability - p0 / (p0 + p1)) < 1e-12
        assert overlap_defect(state0, shot.right.post_state) < 1e-12
        assert overlap_defect(state1, shot.wrong.post_state) < 1e-12


def test_correct_single_branch_probabilities_half():
    for _ in range(20):
        theta = float(RNG.uniform(-2 * np.pi, 2 * np.pi))
        shot = correct_single(PureState.random(1, RNG), working_pilot(theta))
        assert abs(shot.right.probability - 0.5) < 1e-12
        assert abs(shot.wrong.probability - 0.5) < 1e-12
        assert abs(shot.right.probability + shot.wrong.probability - 1.0) < 1e-12


# -- doubling -------------------------------------------------------------------------


def test_double_pilot_zero_angle():
    shot = double_pilot(working_pilot(0.0), working_pilot(0.0))
    for record in (shot.doubled, shot.reset):
        assert overlap_defect(working_pilot(0.0).state.amplitudes, record.post_state) < 1e-12


def test_double_pilot_identity_against_rotation_oracle():
    for _ in range(100):
        angle = float(RNG.uniform(-2 * np.pi, 2 * np.pi))
        shot = double_pilot(working_pilot(angle), working_pilot(angle))
        # oracle: rotating the working pilot forward by its own angle
        expected = phase_rotation_matrix(angle) @ working_pilot(angle).state.amplitudes
        assert overlap_defect(expected, shot.doubled.post_state) < 1e-10
        assert overlap_defect(working_pilot(2 * angle).state.amplitudes, shot.doubled.post_state) < 1e-10
        assert overlap_defect(working_pilot(0.0).state.amplitudes, shot.reset.post_state) < 1e-10


def test_double_pilot_probabilities():
    for _ in range(20):
        angle = float(RNG.uniform(-2 * np.pi, 2 * np.pi))
        shot = double_pilot(working_pilot(angle), working_pilot(angle))
        assert abs(shot.doubled.probability - 0.5) < 1e-12
        assert abs(shot.reset.probability - 0.5) < 1e-12


def test_double_pilot_angle_mismatch():
    with pytest.raises(ValueError):
        double_pilot(working_pilot(0.3), working_pilot(0.4))


# -- pilot string and generation -------------------------------------------------------


def test_pilot_string_validates_ladder():
    good = [working_pilot(0.2), working_pilot(0.4), working_pilot(0.8)]
    PilotString(0.2, good, 8)
    bad = [working_pilot(0.2), working_pilot(0.5)]
    with pytest.raises(ValueError):
        PilotString(0.2, bad, 3)
    with pytest.raises(ValueError):
        PilotString(0.2, good, 9)  # ledger above the required count


def test_generate_length_one_is_first_raw():
    raw = [working_pilot(0.3)]
    report = generate_pilot_string(raw, 1, np.random.default_rng(0))
    assert report.succeeded
    assert report.consumed_raw == 1
    assert report.string.states[0] is raw[0]


def test_generate_insufficient_raw():
    raw = [working_pilot(0.3)] * 20
    with pytest.raises(ValueError, match="54"):
        generate_pilot_string(raw, 5, np.random.default_rng(0))


def test_generate_mixed_angles_rejected():
    raw = [working_pilot(0.3), working_pilot(0.4), working_pilot(0.3)]
    with pytest.raises(ValueError):
        generate_pilot_string(raw, 2, np.random.default_rng(0))


def test_generate_consumption_never_exceeds_budget():
    theta = 0.37
    raw = [working_pilot(theta) for _ in range(54)]
    for seed in range(40):
        report = generate_pilot_string(raw, 5, np.random.default_rng(seed))
        assert report.consumed_raw <= 54
        if report.succeeded:
            angles = [p.nominal_angle for p in report.string.states]
            assert angles == [theta * (1 << i) for i in range(5)]
        else:
            assert 1 <= report.failed_stage <= 4


def test_generated_states_match_ideal_ladder():
    theta = 0.61
    raw = [working_pilot(theta) for _ in range(required_pilot_count(3))]
    for seed in range(200):
        report = generate_pilot_string(raw, 3, np.random.default_rng(seed))
        if report.succeeded:
            for i, state in enumerate(report.string.states):
                ideal = working_pilot(theta * (1 << i)).state.amplitudes
                assert overlap_defect(ideal, state.state) < 1e-10
            break
    else:
        pytest.fail("no successful generation in 200 seeds")


def test_stage_success_probabilities_enumerated():
    # stage 1: seed + one fuel in a budget of 2, one coin flip
    assert stage_success_probability(1) == 0.5
    # stage 2: hand enumeration over the budget-5 policy gives 1/8
    assert stage_success_probability(2) == 0.125
    # regression freeze of the enumerator (dyadic: 23/512 and 23/8192)
    assert stage_success_probability(3) == 23 / 512
    assert generation_success_probability(4) == 23 / 8192
    assert generation_success_probability(1) == 1.0
    assert generation_success_probability(2) == 0.5


def test_generation_monte_carlo_matches_enumeration():
    trials = 3000
    exact = generation_success_probability(3)
    wins = 0
    raw = [working_pilot(0.7) for _ in range(required_pilot_count(3))]
    for seed in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([3, seed]))
        wins += generate_pilot_string(raw, 3, rng).succeeded
    sigma = math.sqrt(exact * (1 - exact) / trials)
    assert abs(wins / trials - exact) < 4 * sigma


# -- cascade ---------------------------------------------------------------------------


def damaged_state(theta: float, original: PureState) -> PureState:
    return PureState(phase_rotation_matrix(theta) @ original.amplitudes)


def test_cascade_success_probability_exact():
    for length in range(1, 9):
        string = PilotString.ideal(0.7, length)
        assert abs(cascade_success_probability(string) - (1 - 0.5**length)) < 1e-12


def test_cascade_enumeration_branch_states():
    theta = 0.9
    length = 3
    original = PureState.random(1, RNG)
    string = PilotString.ideal(theta, length)
    paths = enumerate_cascade(damaged_state(theta, original), string, original, theta)
    assert len(paths) == length + 1
    total = sum(p for p, _ in paths)
    assert abs(total - 1.0) < 1e-12
    for probability, outcome in paths:
        if outcome.success:
            assert outcome.residual_angle == 0.0
            assert abs(outcome.fidelity - 1.0) < 1e-10
            assert abs(probability - 0.5**outcome.attempts_used) < 1e-12
        else:
            # oracle: the failure branch composes every wrong rotation
            expected = phase_rotation_matrix(theta * (1 << length)) @ original.amplitudes
            assert overlap_defect(expected, outcome.final_state) < 1e-10
            assert outcome.residual_angle == theta * (1 << length)
            assert outcome.attempts_used == length


def test_cascade_sampled_statistics():
    trials = 2000
    theta = 0.8
    string = PilotString.ideal(theta, 1)
    rng = np.random.default_rng(12)
    wins = 0
    for _ in range(trials):
        original = PureState.random(1, rng)
        outcome = correct_cascade(damaged_state(theta, original), string, rng, original, theta)
        wins += outcome.success
        if outcome.success:
            assert abs(outcome.fidelity - 1.0) < 1e-10
    sigma = math.sqrt(0.25 / trials)
    assert abs(wins / trials - 0.5) < 4 * sigma


def test_cascade_base_angle_mismatch():
    string = PilotString.ideal(0.7, 2)
    with pytest.raises(ValueError):
        correct_cascade(PureState.basis(1, 0), string, np.random.default_rng(0), channel_angle=0.8)


def test_cascade_deterministic_given_seed():
    theta = 0.5
    string = PilotString.ideal(theta, 4)
    original = PureState.basis(1, 0)
    runs = []
    for _ in range(2):
        rng = np.random.default_rng(77)
        outcome = correct_cascade(damaged_state(theta, original), string, rng, original, theta)
        runs.append((outcome.success, outcome.attempts_used, outcome.residual_angle))
    assert runs[0] == runs[1]


# -- block correction ---------------------------------------------------------------------


def test_block_of_one_matches_cascade():
    theta = 0.6
    string = PilotString.ideal(theta, 3)
    original = PureState.random(1, RNG)
    block_paths = enumerate_block([damaged_state(theta, original)], string, [original], theta)
    joint = sum(p for p, outcomes in block_paths if outcomes[0].success)
    single = cascade_success_probability(string, damaged_state(theta, original))
    assert abs(joint - single) < 1e-12


def test_block_joint_success_and_all_or_nothing():
    theta = 0.45
    string = PilotString.ideal(theta, 5)
    originals = [PureState.random(1, RNG) for _ in range(8)]
    block = [damaged_state(theta, s) for s in originals]
    paths = enumerate_block(block, string, originals, theta)
    joint = sum(p for p, outcomes in paths if outcomes[0].success)
    assert abs(joint - 0.96875) < 1e-12
    for _, outcomes in paths:
        flags = {o.success for o in outcomes}
        assert len(flags) == 1  # every qubit shares the path outcome
        if outcomes[0].success:
            for o in outcomes:
                assert abs(o.fidelity - 1.0) < 1e-10


def test_block_independence_of_length():
    theta = 0.9
    string = PilotString.ideal(theta, 4)
    values = []
    for n in (1, 2, 4, 8):
        originals = [PureState.random(1, RNG) for _ in range(n)]
        block = [damaged_state(theta, s) for s in originals]
        paths = enumerate_block(block, string, originals, theta)
        values.append(sum(p for p, outcomes in paths if outcomes[0].success))
    assert max(values) - min(values) < 1e-12


def test_block_sampled_shares_outcome():
    theta = 0.3
    string = PilotString.ideal(theta, 2)
    rng = np.random.default_rng(21)
    originals = [PureState.random(1, rng) for _ in range(4)]
    block = [damaged_state(theta, s) for s in originals]
    outcomes = correct_block(block, string, rng, originals, theta)
    assert len({o.success for o in outcomes}) == 1
    assert len({o.attempts_used for o in outcomes}) == 1


def test_block_empty_error():
    with pytest.raises(ValueError):
        correct_block([], PilotString.ideal(0.1, 1), np.random.default_rng(0))


# -- protocol params ------------------------------------------------------------------------


def test_protocol_params_round_trip():
    params = ProtocolParams(5, 100, 54, 0.7, ChannelParams(0.7, 0.05, 0.5))
    data = params.to_json_dict()
    assert data["l"] == 5 and data["theta_rad"] == 0.7
    assert ProtocolParams.from_json_dict(data) == params


def test_protocol_params_theta_consistency():
    with pytest.raises(ValueError):
        ProtocolParams(5, 100, 54, 0.7, ChannelParams(0.8, 0.05, 0.5))


def test_protocol_params_feasibility():
    params = ProtocolParams(5, 100, 20, 0.7, ChannelParams(0.7, 0.05, 0.5))
    with pytest.raises(ValueError, match="54"):
        params.require_generation_feasible()


def test_protocol_params_convention_gate():
    params = ProtocolParams(
        2, 10, 3, 0.7, ChannelParams(0.7, 0.05, 0.5, RotationConvention.X_AMPLITUDE)
    )
    with pytest.raises(ValueError):
        params.require_protocol_convention()


def test_correction_csv_row():
    outcome = enumerate_cascade(
        damaged_state(0.4, PureState.basis(1, 0)), PilotString.ideal(0.4, 1)
    )[0][1]
    row = outcome.csv_row(7)
    assert row[0] == 7 and row[1] == 1 and row[2] == 1 and row[3] == 0.0
