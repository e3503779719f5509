"""Reproducible experiment campaigns over the protocol.

An experiment is a (kind, protocol, trials, seed, mode) bundle.  Exact mode
enumerates every measurement branch and reports the resulting probability
with zero standard error; sampled mode runs seeded Monte Carlo trials.
Per-trial random sources are derived from the master seed by a counter
hash, so trials are independent, order-insensitive and safe to parallelise.
Aggregation uses integer counters and exactly-rounded float sums only,
which makes the result independent of trial completion order.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from pilotqec import pilot, qcore
from pilotqec.channel import (
    apply_channel,
    depolarization_parameter,
    rotation_unitary,
    sample_physical_output,
)
from pilotqec.pilot import (
    CORRECTION_CSV_HEADER,
    PilotString,
    ProtocolParams,
    working_pilot,
)
from pilotqec.qcore import PureState


class InfeasibleConfig(ValueError):
    """Protocol parameters that cannot run (e.g. too few raw pilots)."""


class ExperimentKind(enum.Enum):
    CASCADE_SUCCESS = "cascade_success"
    BLOCK_SUCCESS = "block_success"
    SWAP_TEST_ERROR = "swap_test_error"
    STRING_GENERATION = "string_generation"
    FIDELITY_VS_P = "fidelity_vs_p"


class Mode(enum.Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


#: kinds that spend the generated pilot string and therefore need r raw pilots
_STRING_CONSUMING = {
    ExperimentKind.CASCADE_SUCCESS,
    ExperimentKind.BLOCK_SUCCESS,
    ExperimentKind.STRING_GENERATION,
}


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Counter-based per-trial seed: splitmix64 of master + golden * index."""
    mask = (1 << 64) - 1
    z = (master_seed + 0x9E3779B97F4A7C15 * (trial_index + 1)) & mask
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    return z ^ (z >> 31)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: what to run, how often, from which seed.

    ``t_s`` is the elapsed time at which the channel is evaluated (time
    sweeps move it across t_crit).  For swap_test_error the protocol's
    ``l`` doubles as the repetition count k.
    """

    kind: ExperimentKind
    protocol: ProtocolParams
    trials: int
    seed: int
    mode: Mode
    t_s: float = 0.0

    def __post_init__(self) -> None:
        if self.mode is Mode.SAMPLED and self.trials < 1:
            raise ValueError("sampled mode needs trials >= 1")
        if self.t_s < 0:
            raise ValueError("t_s must be nonnegative")

    def validate_feasible(self) -> None:
        if self.kind in _STRING_CONSUMING:
            try:
                self.protocol.require_generation_feasible()
            except ValueError as exc:
                raise InfeasibleConfig(str(exc)) from exc
            self.protocol.require_protocol_convention()

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "mode": self.mode.value,
            "trials": self.trials,
            "seed": self.seed,
            "t_s": self.t_s,
            "protocol": self.protocol.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(
            kind=ExperimentKind(data["kind"]),
            protocol=ProtocolParams.from_json_dict(data["protocol"]),
            trials=int(data["trials"]),
            seed=int(data["seed"]),
            mode=Mode(data["mode"]),
            t_s=float(data.get("t_s", 0.0)),
        )

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_json_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class Summary:
    """Estimate with uncertainty and its closed-form reference."""

    estimate: float
    stderr: float
    ci95_low: float
    ci95_high: float
    analytic: float
    trials_run: int

    def to_json_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "ci95_low": self.ci95_low,
            "ci95_high": self.ci95_high,
            "analytic": self.analytic,
            "trials_run": self.trials_run,
        }


@dataclass(frozen=True)
class RunResult:
    summary: Summary
    trial_header: list[str]
    trial_rows: list[list]
    extras: dict


def _exact_summary(estimate: float, analytic: float) -> Summary:
    return Summary(estimate, 0.0, estimate, estimate, analytic, 0)


def _sampled_summary(estimate: float, spread: float, trials: int, analytic: float) -> Summary:
    # stderr floor keeps the interval honest when the estimate sits at 0 or 1
    stderr = max(spread, 10.0 / trials)
    low = max(0.0, estimate - 1.96 * stderr)
    high = min(1.0, estimate + 1.96 * stderr)
    return Summary(estimate, stderr, low, high, analytic, trials)


def _binomial_summary(successes: int, trials: int, analytic: float) -> Summary:
    estimate = successes / trials
    spread = math.sqrt(estimate * (1.0 - estimate) / trials)
    return _sampled_summary(estimate, spread, trials, analytic)


def _damaged_pair(
    u: qcore.UnitaryOperator, rng: np.random.Generator
) -> tuple[PureState, PureState]:
    original = PureState.random(1, rng)
    return original, qcore.apply(u, original, [0])


def _run_cascade(config: ExperimentConfig) -> RunResult:
    protocol = config.protocol
    string = PilotString.ideal(protocol.theta, protocol.l)
    analytic = pilot.success_probability(protocol.l)
    u = rotation_unitary(protocol.theta, protocol.channel.convention)
    if config.mode is Mode.EXACT:
        original, damaged = _damaged_pair(u, np.random.default_rng(config.seed))
        paths = pilot.enumerate_cascade(damaged, string, original, protocol.theta)
        estimate = math.fsum(p for p, outcome in paths if outcome.success)
        rows = [outcome.csv_row(i) for i, (_, outcome) in enumerate(paths)]
        return RunResult(_exact_summary(estimate, analytic), CORRECTION_CSV_HEADER, rows, {})
    successes = 0
    rows = []
    for index in range(config.trials):
        rng = np.random.default_rng(trial_seed(config.seed, index))
        original, damaged = _damaged_pair(u, rng)
        outcome = pilot.correct_cascade(damaged, string, rng, original, protocol.theta)
        successes += int(outcome.success)
        rows.append(outcome.csv_row(index))
    return RunResult(
        _binomial_summary(successes, config.trials, analytic),
        CORRECTION_CSV_HEADER,
        rows,
        {},
    )


def _run_block(config: ExperimentConfig) -> RunResult:
    protocol = config.protocol
    string = PilotString.ideal(protocol.theta, protocol.l)
    analytic = pilot.success_probability(protocol.l)
    u = rotation_unitary(protocol.theta, protocol.channel.convention)

    def damaged_block(rng):
        originals = [PureState.random(1, rng) for _ in range(protocol.n)]
        return originals, [qcore.apply(u, s, [0]) for s in originals]

    if config.mode is Mode.EXACT:
        originals, block = damaged_block(np.random.default_rng(config.seed))
        paths = pilot.enumerate_block(block, string, originals, protocol.theta)
        estimate = math.fsum(p for p, outcomes in paths if outcomes[0].success)
        rows = []
        for i, (_, outcomes) in enumerate(paths):
            worst = min(o.fidelity for o in outcomes)
            rows.append([i, int(outcomes[0].success), outcomes[0].attempts_used,
                         outcomes[0].residual_angle, worst])
        return RunResult(_exact_summary(estimate, analytic), CORRECTION_CSV_HEADER, rows, {})
    successes = 0
    rows = []
    for index in range(config.trials):
        rng = np.random.default_rng(trial_seed(config.seed, index))
        originals, block = damaged_block(rng)
        outcomes = pilot.correct_block(block, string, rng, originals, protocol.theta)
        successes += int(outcomes[0].success)
        worst = min(o.fidelity for o in outcomes)
        rows.append([index, int(outcomes[0].success), outcomes[0].attempts_used,
                     outcomes[0].residual_angle, worst])
    return RunResult(
        _binomial_summary(successes, config.trials, analytic),
        CORRECTION_CSV_HEADER,
        rows,
        {},
    )


_SWAP_CSV_HEADER = ["trial_id", "declared_clean", "num_tests"]


def _run_swap_error(config: ExperimentConfig) -> RunResult:
    """False-clean rate of the repeated SWAP test on an orthogonal pair."""
    k = config.protocol.l
    reference = PureState.basis(1, 0)
    candidate = PureState.basis(1, 1)
    analytic = 0.5**k
    if config.mode is Mode.EXACT:
        estimate = pilot.false_clean_probability(candidate, reference, k)
        return RunResult(_exact_summary(estimate, analytic), _SWAP_CSV_HEADER, [], {})
    false_cleans = 0
    rows = []
    for index in range(config.trials):
        rng = np.random.default_rng(trial_seed(config.seed, index))
        verdict = pilot.noise_detect([candidate] * k, reference, rng)
        false_cleans += int(verdict.clean)
        rows.append([index, int(verdict.clean), k])
    return RunResult(
        _binomial_summary(false_cleans, config.trials, analytic),
        _SWAP_CSV_HEADER,
        rows,
        {},
    )


_GENERATION_CSV_HEADER = ["trial_id", "success", "consumed_raw", "failed_stage", "reset_pilots"]


def _run_generation(config: ExperimentConfig) -> RunResult:
    protocol = config.protocol
    enumerated = pilot.generation_success_probability(protocol.l)
    extras = {
        "closed_form_candidates": {
            "one_minus_2^-(l-2)": 1.0 - 0.5 ** (protocol.l - 2) if protocol.l >= 2 else None,
            "one_minus_2^-l": 1.0 - 0.5**protocol.l,
        },
        "enumerated_success": enumerated,
    }
    if config.mode is Mode.EXACT:
        return RunResult(
            _exact_summary(enumerated, enumerated), _GENERATION_CSV_HEADER, [], extras
        )
    successes = 0
    rows = []
    for index in range(config.trials):
        rng = np.random.default_rng(trial_seed(config.seed, index))
        raw = [working_pilot(protocol.theta) for _ in range(protocol.r)]
        report = pilot.generate_pilot_string(raw, protocol.l, rng)
        successes += int(report.succeeded)
        rows.append([
            index,
            int(report.succeeded),
            report.consumed_raw,
            "" if report.failed_stage is None else report.failed_stage,
            report.reset_pilots,
        ])
    return RunResult(
        _binomial_summary(successes, config.trials, enumerated),
        _GENERATION_CSV_HEADER,
        rows,
        extras,
    )


_FIDELITY_CSV_HEADER = ["trial_id", "fidelity"]


def _run_fidelity(config: ExperimentConfig) -> RunResult:
    """Fidelity cost of trusting the pure rotated state.

    The data qubit goes through the physical channel; the decoder applies
    the perfect inverse rotation and the result is compared to the input.
    Closed form: 1 - p/2.
    """
    protocol = config.protocol
    params = protocol.channel
    p_eff = depolarization_parameter(params, config.t_s)
    analytic = 1.0 - p_eff / 2.0
    inverse = rotation_unitary(protocol.theta, params.convention).dagger()
    if config.mode is Mode.EXACT:
        original = PureState.random(1, np.random.default_rng(config.seed))
        out = apply_channel(original.density_matrix(), params, config.t_s)
        corrected = inverse.matrix @ out.entries @ inverse.matrix.conj().T
        estimate = qcore.fidelity(original, qcore.DensityMatrix(corrected))
        return RunResult(_exact_summary(estimate, analytic), _FIDELITY_CSV_HEADER, [], {})
    values = []
    rows = []
    for index in range(config.trials):
        rng = np.random.default_rng(trial_seed(config.seed, index))
        original = PureState.random(1, rng)
        out = sample_physical_output(original, params, config.t_s, rng)
        corrected = qcore.apply(inverse, out, [0])
        value = abs(qcore.overlap(original, corrected)) ** 2
        values.append(value)
        rows.append([index, value])
    trials = config.trials
    estimate = math.fsum(values) / trials
    variance = math.fsum((v - estimate) ** 2 for v in values) / max(trials - 1, 1)
    spread = math.sqrt(variance / trials)
    return RunResult(
        _sampled_summary(estimate, spread, trials, analytic),
        _FIDELITY_CSV_HEADER,
        rows,
        {},
    )


_RUNNERS = {
    ExperimentKind.CASCADE_SUCCESS: _run_cascade,
    ExperimentKind.BLOCK_SUCCESS: _run_block,
    ExperimentKind.SWAP_TEST_ERROR: _run_swap_error,
    ExperimentKind.STRING_GENERATION: _run_generation,
    ExperimentKind.FIDELITY_VS_P: _run_fidelity,
}


def run(config: ExperimentConfig) -> RunResult:
    """Execute one experiment; deterministic given (config, seed)."""
    config.validate_feasible()
    return _RUNNERS[config.kind](config)


def sweep(config: ExperimentConfig, parameter: str, values: list) -> list[tuple[float, Summary]]:
    """Re-run the experiment across one parameter, same base seed throughout.

    Supported parameters: l, k (repetition count, stored in l), p_depol,
    n, t.
    """
    results = []
    for value in values:
        results.append((value, run(_with_parameter(config, parameter, value)).summary))
    return results


def _with_parameter(config: ExperimentConfig, parameter: str, value) -> ExperimentConfig:
    protocol = config.protocol
    if parameter in ("l", "k"):
        new_protocol = replace(protocol, l=int(value))
        return replace(config, protocol=new_protocol)
    if parameter == "n":
        return replace(config, protocol=replace(protocol, n=int(value)))
    if parameter == "p_depol":
        new_channel = replace(protocol.channel, p_depol=float(value))
        return replace(config, protocol=replace(protocol, channel=new_channel))
    if parameter == "t":
        return replace(config, t_s=float(value))
    raise ValueError(f"unsupported sweep parameter {parameter!r}")


def write_run_directory(config: ExperimentConfig, result: RunResult, base_dir) -> Path:
    """Write summary.json and trials.csv into <base>/<kind>-<confighash>/."""
    run_dir = Path(base_dir) / f"{config.kind.value}-{config.config_hash()}"
    run_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "kind": config.kind.value,
        "mode": config.mode.value,
        **result.summary.to_json_dict(),
    }
    if result.extras:
        payload["extras"] = result.extras
    (run_dir / "summary.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    lines = [",".join(result.trial_header)]
    for row in result.trial_rows:
        lines.append(",".join(str(cell) for cell in row))
    (run_dir / "trials.csv").write_text("\n".join(lines) + "\n")
    return run_dir
