"""Self-check suite behind the `verify` subcommand.

Each check re-derives one of the protocol's load-bearing identities from
the circuit simulator and compares it against the corresponding closed
form or pinned reference value.  The corrector check accepts an injectable
control polarity so the suite can demonstrate that it actually catches a
miswired gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from pilotqec import capacity, pilot, qcore
from pilotqec.channel import (
    ChannelParams,
    RotationConvention,
    apply_channel,
    bloch_vector,
    rotation_unitary,
)
from pilotqec.pilot import PilotString, working_pilot
from pilotqec.qcore import DensityMatrix, PureState


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_swap_test_closed_form() -> CheckResult:
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        a = PureState.random(1, rng)
        b = PureState.random(1, rng)
        circuit = pilot.swap_test(a, b)
        closed = 0.5 + 0.5 * abs(qcore.overlap(b, a)) ** 2
        worst = max(worst, abs(circuit - closed))
    return CheckResult(
        "swap-test circuit matches 1/2 + |overlap|^2 / 2",
        worst <= 1e-12,
        f"max deviation {worst:.2e} over 100 random pairs",
    )


def _check_repeated_swap_error() -> CheckResult:
    zero = PureState.basis(1, 0)
    one = PureState.basis(1, 1)
    exact = all(
        pilot.false_clean_probability(one, zero, k) == 0.5**k for k in range(1, 11)
    )
    return CheckResult(
        "repeated swap-test false-clean rate is 2^-k",
        exact,
        "k = 1..10 on an orthogonal basis pair, exact equality",
    )


def _check_corrector_branches(control_value: int = 0) -> CheckResult:
    rng = np.random.default_rng(13)
    worst_fid = 0.0
    worst_double = 0.0
    worst_prob = 0.0
    for _ in range(100):
        theta = rng.uniform(-2 * math.pi, 2 * math.pi)
        original = PureState.random(1, rng)
        u = rotation_unitary(theta, RotationConvention.Z_PHASE)
        damaged = qcore.apply(u, original, [0])
        right, wrong = pilot._pilot_exchange(
            damaged, working_pilot(theta).state, control_value
        )
        worst_prob = max(worst_prob, abs(right.probability - 0.5))
        worst_fid = max(
            worst_fid, 1.0 - qcore.fidelity(original, right.post_state.density_matrix())
        )
        doubled = qcore.apply(rotation_unitary(2 * theta, RotationConvention.Z_PHASE), original, [0])
        worst_double = max(worst_double, 1.0 - abs(qcore.overlap(doubled, wrong.post_state)))
    ok = worst_fid <= 1e-10 and worst_double <= 1e-10 and worst_prob <= 1e-12
    return CheckResult(
        "corrector branches restore / double the rotation at probability 1/2",
        ok,
        f"restore defect {worst_fid:.2e}, double defect {worst_double:.2e}, "
        f"probability defect {worst_prob:.2e}",
    )


def _check_doubling_identity() -> CheckResult:
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(100):
        angle = rng.uniform(-2 * math.pi, 2 * math.pi)
        shot = pilot.double_pilot(working_pilot(angle), working_pilot(angle))
        target = working_pilot(2 * angle).state
        worst = max(worst, 1.0 - abs(qcore.overlap(target, shot.doubled.post_state)))
    return CheckResult(
        "doubling circuit maps two angle-a pilots to one angle-2a pilot",
        worst <= 1e-10,
        f"max overlap defect {worst:.2e} over 100 random angles",
    )


def _check_cascade_probabilities() -> CheckResult:
    worst = 0.0
    for length in range(1, 9):
        string = PilotString.ideal(0.7, length)
        exact = pilot.cascade_success_probability(string)
        worst = max(worst, abs(exact - (1.0 - 0.5**length)))
    return CheckResult(
        "cascade success probability is 1 - 2^-l (l = 1..8)",
        worst <= 1e-12,
        f"max deviation {worst:.2e}",
    )


def _check_block_independence() -> CheckResult:
    rng = np.random.default_rng(19)
    theta = 0.9
    u = rotation_unitary(theta, RotationConvention.Z_PHASE)
    string = PilotString.ideal(theta, 4)
    values = []
    for n in (1, 2, 4, 8):
        block = [qcore.apply(u, PureState.random(1, rng), [0]) for _ in range(n)]
        paths = pilot.enumerate_block(block, string)
        values.append(math.fsum(p for p, outcomes in paths if outcomes[0].success))
    spread = max(values) - min(values)
    return CheckResult(
        "block correction success is independent of block length",
        spread < 1e-12,
        f"joint success spread {spread:.2e} across n in (1, 2, 4, 8)",
    )


def _check_pilot_counting() -> CheckResult:
    table = {2: 3, 3: 8, 4: 21, 5: 54, 6: 135}
    table_ok = all(pilot.required_pilot_count(l) == r for l, r in table.items())
    forms_ok = all(
        pilot.required_pilot_count(l) == pilot.pilot_count_term_sum(l) for l in range(2, 17)
    )
    return CheckResult(
        "pilot counting: table values and closed form vs stagewise sum",
        table_ok and forms_ok,
        "l = 2..6 table, l = 2..16 closed form",
    )


def _check_link_budget() -> CheckResult:
    expected = {
        100e6: (2500, 2446),
        500e6: (12500, 12446),
        1e9: (25000, 24946),
        5e9: (125000, 124946),
        10e9: (250000, 249946),
    }
    ok = True
    for f, (total, data) in expected.items():
        b = capacity.link_budget(f, 0.5, 5e-5, 54)
        ok = ok and b.total_n_plus_r == total and b.data_n == data
    b = capacity.link_budget(100e6, 0.5, 5e-5, 54)
    ok = ok and abs(b.redundancy - 0.0216) < 1e-12
    return CheckResult(
        "link budget reproduces the reference qubit counts",
        ok,
        "five source rates at t_crit = 0.5 s, attenuation 5e-5, r = 54",
    )


def _check_capacity_values() -> CheckResult:
    c = capacity.classical_capacity(0.05)
    q = capacity.quantum_capacity_bound(0.05)
    budget = capacity.link_budget(100e6, 0.5, 5e-5, 54)
    report = capacity.code_rates(0.05, 0.0, 0.5, budget)
    ok = (
        abs(c - 0.83134) < 1e-5
        and q == 0.8
        and abs(report.rate_classical - 0.80974) < 1e-5
        and abs(report.rate_quantum - 0.7784) < 1e-5
    )
    return CheckResult(
        "capacity and code-rate values at p = 0.05",
        ok,
        f"C={c:.6f}, Q_bound={q}, R_C={report.rate_classical:.6f}, R_Q={report.rate_quantum:.6f}",
    )


def _check_channel_properties() -> CheckResult:
    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(100):
        theta = rng.uniform(-math.pi, math.pi)
        p = rng.uniform(0.0, 1.0)
        params = ChannelParams(theta, p, 0.5)
        rho = PureState.random(1, rng).density_matrix()
        # unital: the maximally mixed state is a fixed point
        mixed = DensityMatrix.maximally_mixed(1)
        worst = max(worst, np.max(np.abs(apply_channel(mixed, params, 0.1).entries - mixed.entries)))
        # Bloch vector shrinks by exactly 1 - p
        shrink = np.linalg.norm(bloch_vector(apply_channel(rho, params, 0.1)))
        worst = max(worst, abs(shrink - (1.0 - p) * np.linalg.norm(bloch_vector(rho))))
        # past the window everything is maximally mixed and capacities vanish
        late = apply_channel(rho, params, 0.7)
        worst = max(worst, np.max(np.abs(late.entries - mixed.entries)))
    cutoff_ok = (
        capacity.classical_capacity(0.05, t=0.7, t_crit=0.5) == 0.0
        and capacity.quantum_capacity_bound(0.05, t=0.7, t_crit=0.5) == 0.0
    )
    return CheckResult(
        "channel is unital, shrinks Bloch vectors by 1 - p, dies past the window",
        worst <= 1e-12 and cutoff_ok,
        f"max deviation {worst:.2e} over 100 random channels",
    )


def run_all(corrector_control: int = 0) -> list[CheckResult]:
    """Run every check; ``corrector_control=1`` miswires the corrector on
    purpose, which the branch check must catch."""
    return [
        _check_swap_test_closed_form(),
        _check_repeated_swap_error(),
        _check_corrector_branches(corrector_control),
        _check_doubling_identity(),
        _check_cascade_probabilities(),
        _check_block_independence(),
        _check_pilot_counting(),
        _check_link_budget(),
        _check_capacity_values(),
        _check_channel_properties(),
    ]
