"""Entropies, channel capacities, link budgets and code rates.

All logarithms are base 2; entropies and capacities are in bits (per
channel use).  For the depolarizing link inside its stationary window the
classical capacity is 1 - H(p/2) and the quantum capacity is bounded above
by 1 - 4p (the bound is vacuous past p = 0.25); past the window both drop
to zero.  The link budget chains source rate -> qubits per window ->
surviving qubits and splits them into pilots and data, whose ratio is the
code's redundancy; code rates are capacity minus redundancy.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from pilotqec.qcore import DensityMatrix

#: largest depolarization probability with a nonvacuous quantum bound
NO_CLONING_LIMIT = 0.25

#: eigenvalues below this are treated as exact zeros in entropy sums
EIGENVALUE_FLOOR = 1e-15


def binary_entropy(x: float) -> float:
    """Shannon entropy -x log2 x - (1-x) log2 (1-x), with 0 log 0 = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"probability {x} outside [0, 1]")
    result = 0.0
    if x > 0.0:
        result -= x * math.log2(x)
    if x < 1.0:
        result -= (1.0 - x) * math.log2(1.0 - x)
    return result


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-sum(lambda log2 lambda) over the eigenvalues of rho."""
    result = 0.0
    for value in rho.eigenvalues():
        if value > EIGENVALUE_FLOOR:
            result -= value * math.log2(value)
    return result


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Tr(rho log2 rho) - Tr(rho log2 sigma); infinite outside sigma's support."""
    if rho.qubits != sigma.qubits:
        raise ValueError("density matrices have different dimensions")
    sig_vals, sig_vecs = np.linalg.eigh(sigma.entries)
    null = sig_vecs[:, sig_vals <= EIGENVALUE_FLOOR]
    if null.shape[1] > 0:
        leakage = float(np.trace(null.conj().T @ rho.entries @ null).real)
        if leakage > 1e-12:
            return math.inf
    first = -von_neumann_entropy(rho)
    log_sigma = sum(
        math.log2(v) * np.outer(sig_vecs[:, i], sig_vecs[:, i].conj())
        for i, v in enumerate(sig_vals)
        if v > EIGENVALUE_FLOOR
    )
    second = float(np.trace(rho.entries @ log_sigma).real)
    return first - second


def classical_capacity(p_depol: float, t: float = 0.0, t_crit: float = math.inf) -> float:
    """Classical capacity in bits per use: 1 - H(p/2) inside the window, 0 past it."""
    if not 0.0 <= p_depol <= 1.0:
        raise ValueError(f"p_depol {p_depol} outside [0, 1]")
    if t > t_crit:
        return 0.0
    return 1.0 - binary_entropy(p_depol / 2.0)


def quantum_capacity_bound(p_depol: float, t: float = 0.0, t_crit: float = math.inf) -> float:
    """Upper bound 1 - 4p on the quantum capacity (not an achievable rate).

    The bound holds for p <= NO_CLONING_LIMIT; beyond that it is clamped to
    zero and a warning is emitted.
    """
    if not 0.0 <= p_depol <= 1.0:
        raise ValueError(f"p_depol {p_depol} outside [0, 1]")
    if t > t_crit:
        return 0.0
    if p_depol > NO_CLONING_LIMIT:
        warnings.warn(
            f"p_depol={p_depol} exceeds the cloning-limited range (>{NO_CLONING_LIMIT}); "
            "the quantum bound is vacuous and reported as 0"
        )
    return max(0.0, 1.0 - 4.0 * p_depol)


@dataclass(frozen=True)
class LinkBudget:
    """Qubit accounting for one stationary window of the link."""

    f_source: float
    t_crit: float
    attenuation: float
    sigma: float
    total_n_plus_r: int
    pilot_r: int
    data_n: int
    redundancy: float


def link_budget(f_source: float, t_crit: float, attenuation: float, pilot_r: int) -> LinkBudget:
    """Source rate and attenuation -> usable qubits and redundancy.

    sigma = f * t_crit qubits enter the link per window; N = round(sigma *
    attenuation) survive; r of them are pilots, the remaining n = N - r
    carry data; redundancy is r / N.
    """
    if f_source <= 0 or t_crit <= 0 or attenuation <= 0:
        raise ValueError("f_source, t_crit and attenuation must be positive")
    if pilot_r < 0:
        raise ValueError("pilot count must be nonnegative")
    sigma = f_source * t_crit
    total = round(sigma * attenuation)
    if pilot_r >= total:
        raise ValueError(
            f"window admits only {total} qubits, cannot spend {pilot_r} on pilots"
        )
    return LinkBudget(
        f_source=f_source,
        t_crit=t_crit,
        attenuation=attenuation,
        sigma=sigma,
        total_n_plus_r=total,
        pilot_r=pilot_r,
        data_n=total - pilot_r,
        redundancy=pilot_r / total,
    )


@dataclass(frozen=True)
class CapacityReport:
    """Capacities and pilot-code rates at one operating point."""

    p_effective: float
    classical_capacity: float
    quantum_capacity_bound: float
    rate_classical: float
    rate_quantum: float

    def __post_init__(self) -> None:
        if self.rate_classical > self.classical_capacity + 1e-12:
            raise ValueError("classical rate exceeds the classical capacity")
        if self.rate_quantum > self.quantum_capacity_bound + 1e-12:
            raise ValueError("quantum rate exceeds the quantum bound")


def code_rates(p_depol: float, t: float, t_crit: float, budget: LinkBudget) -> CapacityReport:
    """Achievable pilot-code rates: capacity minus the redundancy r/N."""
    p_eff = p_depol if t <= t_crit else 1.0
    classical = classical_capacity(p_depol, t, t_crit)
    quantum = quantum_capacity_bound(p_depol, t, t_crit)
    return CapacityReport(
        p_effective=p_eff,
        classical_capacity=classical,
        quantum_capacity_bound=quantum,
        rate_classical=classical - budget.redundancy,
        rate_quantum=quantum - budget.redundancy,
    )


def redundancy_limit(pilot_r: int, n_sequence: list[int]) -> list[float]:
    """Redundancy r/(r+n) along an increasing data-block sequence.

    Strictly decreasing and vanishing as n grows, which is what makes the
    pilot code capacity-achieving.
    """
    if any(b <= a for a, b in zip(n_sequence, n_sequence[1:])):
        raise ValueError("n_sequence must be strictly increasing")
    return [pilot_r / (pilot_r + n) for n in n_sequence]


# --------------------------------------------------------------------------
# CSV emitters
# --------------------------------------------------------------------------


def format_number(value) -> str:
    """Up to 6 significant digits; integers render plainly."""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float) and value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return f"{value:.6g}"


def render_csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(cell) for cell in row))
    return "\n".join(lines) + "\n"


def table1_rows(max_l: int = 6) -> list[list]:
    """(l, required raw pilots, cascade success probability) for l = 2..max_l."""
    from pilotqec import pilot

    if max_l < 2:
        raise ValueError("max_l must be >= 2")
    return [
        [l, pilot.required_pilot_count(l), pilot.success_probability(l)]
        for l in range(2, max_l + 1)
    ]


def table1_csv(max_l: int = 6) -> str:
    return render_csv(["l", "required_r", "success_probability"], table1_rows(max_l))


def table2_rows(
    rates_hz: list[float], t_crit: float, attenuation: float, pilot_r: int
) -> list[list]:
    """One link-budget row per source rate; infeasible rows carry blanks."""
    rows = []
    for f in rates_hz:
        try:
            b = link_budget(f, t_crit, attenuation, pilot_r)
            rows.append([f, b.sigma, b.total_n_plus_r, b.data_n, b.redundancy])
        except ValueError:
            rows.append([f, f * t_crit, round(f * t_crit * attenuation), "", ""])
    return rows


def table2_csv(rates_hz: list[float], t_crit: float, attenuation: float, pilot_r: int) -> str:
    return render_csv(
        ["f_source_hz", "sigma", "N", "n", "redundancy"],
        table2_rows(rates_hz, t_crit, attenuation, pilot_r),
    )


def capacity_curve_csv(p_values: list[float], t: float = 0.0, t_crit: float = math.inf) -> str:
    rows = [
        [p, classical_capacity(p, t, t_crit), quantum_capacity_bound(p, t, t_crit)]
        for p in p_values
    ]
    return render_csv(["p_depol", "classical_capacity", "quantum_capacity_bound"], rows)


def rate_convergence_csv(
    p_depol: float, pilot_r: int, n_values: list[int], t: float = 0.0, t_crit: float = math.inf
) -> str:
    classical = classical_capacity(p_depol, t, t_crit)
    quantum = quantum_capacity_bound(p_depol, t, t_crit)
    rows = []
    for n in n_values:
        d = pilot_r / (pilot_r + n)
        rows.append([n, d, classical - d, quantum - d])
    return render_csv(["n", "redundancy", "rate_classical", "rate_quantum"], rows)
