"""Experiment campaigns: determinism, exact/sampled agreement, sweeps."""

import json
import math

import numpy as np
import pytest

from pilotqec import pilot
from pilotqec.channel import ChannelParams
from pilotqec.harness import (
    ExperimentConfig,
    ExperimentKind,
    InfeasibleConfig,
    Mode,
    run,
    sweep,
    trial_seed,
    write_run_directory,
)
from pilotqec.pilot import ProtocolParams


def make_config(kind, l=5, n=1, r=None, trials=100, seed=7, mode=Mode.EXACT, p=0.05, t_s=0.0):
    if r is None:
        r = pilot.required_pilot_count(l)
    protocol = ProtocolParams(l, n, r, 0.7, ChannelParams(0.7, p, 0.5))
    return ExperimentConfig(kind, protocol, trials, seed, mode, t_s)


# -- seeding ------------------------------------------------------------------


def test_trial_seed_deterministic():
    assert trial_seed(42, 0) == trial_seed(42, 0)
    assert trial_seed(42, 0) != trial_seed(42, 1)
    assert trial_seed(42, 0) != trial_seed(43, 0)


def test_trial_seed_spread():
    seeds = {trial_seed(0, i) for i in range(10000)}
    assert len(seeds) == 10000
    assert all(0 <= s < 2**64 for s in seeds)


# -- exact mode ----------------------------------------------------------------


def test_cascade_exact():
    result = run(make_config(ExperimentKind.CASCADE_SUCCESS, l=5))
    assert abs(result.summary.estimate - 0.96875) < 1e-12
    assert result.summary.stderr == 0.0
    assert result.summary.analytic == 0.96875
    assert result.summary.trials_run == 0
    assert len(result.trial_rows) == 6  # l + 1 outcome paths


def test_block_exact_matches_cascade():
    block = run(make_config(ExperimentKind.BLOCK_SUCCESS, l=4, n=4)).summary
    cascade = run(make_config(ExperimentKind.CASCADE_SUCCESS, l=4)).summary
    assert abs(block.estimate - cascade.estimate) < 1e-12
    assert block.analytic == 0.9375


def test_swap_error_exact_is_dyadic():
    result = run(make_config(ExperimentKind.SWAP_TEST_ERROR, l=3, trials=1))
    assert result.summary.estimate == 0.125
    assert result.summary.analytic == 0.125


def test_generation_exact_carries_candidates():
    result = run(make_config(ExperimentKind.STRING_GENERATION, l=4))
    assert result.summary.estimate == pilot.generation_success_probability(4)
    candidates = result.extras["closed_form_candidates"]
    assert candidates["one_minus_2^-(l-2)"] == 0.75
    assert candidates["one_minus_2^-l"] == 0.9375


def test_fidelity_exact():
    result = run(make_config(ExperimentKind.FIDELITY_VS_P, p=0.05))
    assert abs(result.summary.estimate - 0.975) < 1e-12
    assert result.summary.analytic == 1.0 - 0.05 / 2.0


def test_fidelity_past_window():
    result = run(make_config(ExperimentKind.FIDELITY_VS_P, p=0.05, t_s=0.9))
    assert abs(result.summary.estimate - 0.5) < 1e-12
    assert result.summary.analytic == 0.5


# -- sampled mode ---------------------------------------------------------------


def within_4_sigma(summary, p, trials):
    sigma = max(math.sqrt(p * (1 - p) / trials), 1e-9)
    return abs(summary.estimate - p) < 4 * sigma


def test_cascade_sampled_agrees():
    trials = 3000
    config = make_config(ExperimentKind.CASCADE_SUCCESS, l=1, trials=trials, mode=Mode.SAMPLED)
    result = run(config)
    assert within_4_sigma(result.summary, 0.5, trials)
    assert result.summary.trials_run == trials
    assert result.summary.ci95_low <= result.summary.estimate <= result.summary.ci95_high
    assert len(result.trial_rows) == trials


def test_block_sampled_agrees():
    trials = 1500
    config = make_config(ExperimentKind.BLOCK_SUCCESS, l=2, n=3, trials=trials, mode=Mode.SAMPLED)
    assert within_4_sigma(run(config).summary, 0.75, trials)


def test_swap_error_sampled_agrees():
    trials = 2000
    config = make_config(ExperimentKind.SWAP_TEST_ERROR, l=2, trials=trials, mode=Mode.SAMPLED)
    assert within_4_sigma(run(config).summary, 0.25, trials)


def test_generation_sampled_agrees():
    trials = 1500
    config = make_config(ExperimentKind.STRING_GENERATION, l=3, trials=trials, mode=Mode.SAMPLED)
    result = run(config)
    assert within_4_sigma(result.summary, pilot.generation_success_probability(3), trials)
    header = result.trial_header
    assert header == ["trial_id", "success", "consumed_raw", "failed_stage", "reset_pilots"]
    for row in result.trial_rows:
        assert row[2] <= pilot.required_pilot_count(3)


def test_fidelity_sampled_agrees():
    trials = 1500
    config = make_config(ExperimentKind.FIDELITY_VS_P, p=0.2, trials=trials, mode=Mode.SAMPLED)
    result = run(config)
    assert abs(result.summary.estimate - 0.9) < 0.03


def test_stderr_floor_near_extremes():
    trials = 500
    config = make_config(ExperimentKind.CASCADE_SUCCESS, l=8, trials=trials, mode=Mode.SAMPLED)
    summary = run(config).summary
    assert summary.stderr >= 10.0 / trials


# -- determinism ------------------------------------------------------------------


def test_run_is_deterministic():
    config = make_config(ExperimentKind.CASCADE_SUCCESS, l=3, trials=300, mode=Mode.SAMPLED)
    first = run(config)
    second = run(config)
    assert first.summary == second.summary
    assert first.trial_rows == second.trial_rows


def test_run_directory_bytes_identical(tmp_path):
    config = make_config(ExperimentKind.CASCADE_SUCCESS, l=2, trials=200, mode=Mode.SAMPLED)
    dir_a = write_run_directory(config, run(config), tmp_path / "a")
    dir_b = write_run_directory(config, run(config), tmp_path / "b")
    assert (dir_a / "summary.json").read_bytes() == (dir_b / "summary.json").read_bytes()
    assert (dir_a / "trials.csv").read_bytes() == (dir_b / "trials.csv").read_bytes()
    assert dir_a.name == f"cascade_success-{config.config_hash()}"


def test_aggregation_is_order_invariant():
    config = make_config(ExperimentKind.CASCADE_SUCCESS, l=2, trials=400, mode=Mode.SAMPLED)
    result = run(config)
    successes = [row[1] for row in result.trial_rows]
    shuffled = list(successes)
    np.random.default_rng(1).shuffle(shuffled)
    assert sum(shuffled) / len(shuffled) == result.summary.estimate


# -- config handling -----------------------------------------------------------------


def test_config_json_round_trip():
    config = make_config(ExperimentKind.BLOCK_SUCCESS, l=4, n=8, trials=10, mode=Mode.SAMPLED)
    data = json.loads(json.dumps(config.to_json_dict()))
    assert ExperimentConfig.from_json_dict(data) == config


def test_infeasible_raises():
    config = make_config(ExperimentKind.CASCADE_SUCCESS, l=5, r=20)
    with pytest.raises(InfeasibleConfig, match="54"):
        run(config)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        ExperimentConfig.from_json_dict(
            {
                "kind": "nonsense",
                "mode": "exact",
                "trials": 1,
                "seed": 0,
                "protocol": make_config(ExperimentKind.CASCADE_SUCCESS).protocol.to_json_dict(),
            }
        )


def test_sampled_requires_trials():
    with pytest.raises(ValueError):
        make_config(ExperimentKind.CASCADE_SUCCESS, trials=0, mode=Mode.SAMPLED)


# -- sweeps ---------------------------------------------------------------------------


def test_sweep_l_matches_closed_form():
    config = make_config(ExperimentKind.CASCADE_SUCCESS, l=6)
    results = sweep(config, "l", [1, 2, 3, 4, 5, 6])
    for value, summary in results:
        assert abs(summary.estimate - (1.0 - 0.5**value)) < 1e-12
        assert summary.analytic == 1.0 - 0.5**value


def test_sweep_k_on_swap_error():
    config = make_config(ExperimentKind.SWAP_TEST_ERROR, l=1)
    results = sweep(config, "k", [1, 2, 3, 4])
    for value, summary in results:
        assert summary.estimate == 0.5**value


def test_sweep_t_steps_past_window():
    config = make_config(ExperimentKind.FIDELITY_VS_P, p=0.05)
    results = sweep(config, "t", [0.0, 0.4, 0.5, 0.6])
    estimates = [s.estimate for _, s in results]
    assert abs(estimates[0] - 0.975) < 1e-12
    assert abs(estimates[2] - 0.975) < 1e-12  # boundary is inside the window
    assert abs(estimates[3] - 0.5) < 1e-12


def test_sweep_p_depol():
    config = make_config(ExperimentKind.FIDELITY_VS_P)
    results = sweep(config, "p_depol", [0.0, 0.1, 0.2])
    for value, summary in results:
        assert abs(summary.estimate - (1.0 - value / 2.0)) < 1e-12


def test_sweep_rejects_unknown_parameter():
    config = make_config(ExperimentKind.CASCADE_SUCCESS)
    with pytest.raises(ValueError):
        sweep(config, "theta", [0.1])
