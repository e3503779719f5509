#!/usr/bin/env python3
"""Benchmark: compiled kernels vs the pure-numpy fallback.

Times the three kernel entry points on registers from 2 to 12 qubits and a
realistic protocol workload (repeated corrector shots, as the Monte Carlo
harness issues them).  Run after building the extension in place:

    python setup.py build_ext --inplace
    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from pilotqec._kernels import _fallback

try:
    from pilotqec._kernels import _statevec
except ImportError:
    _statevec = None

RNG = np.random.default_rng(0)


def random_state(n):
    amps = RNG.standard_normal(1 << n) + 1j * RNG.standard_normal(1 << n)
    return amps / np.linalg.norm(amps)


def random_gate(k):
    dim = 1 << k
    m = RNG.standard_normal((dim, dim)) + 1j * RNG.standard_normal((dim, dim))
    q, _ = np.linalg.qr(m)
    return np.ascontiguousarray(q)


def time_call(fn, repeats):
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def bench_apply(backend, n, k, repeats):
    state = random_state(n)
    gate = random_gate(k)
    shifts = np.arange(k, dtype=np.int64)
    return time_call(lambda: backend.apply_gate(state, gate, shifts), repeats)


def bench_measure_cycle(backend, n, repeats):
    state = random_state(n)

    def cycle():
        w0, w1 = backend.branch_weights(state, 0)
        backend.collapse_qubit(state, 0, 0, 1.0 / np.sqrt(w0))

    return time_call(cycle, repeats)


def bench_corrector_workload(repeats):
    """Full protocol shot through the public API (gate + measure + collapse)."""
    from pilotqec import qcore
    from pilotqec.pilot import correct_single, working_pilot

    damaged = qcore.PureState.random(1, RNG)
    pilot = working_pilot(0.7)
    return time_call(lambda: correct_single(damaged, pilot), repeats)


def main():
    if _statevec is None:
        print("compiled kernels not built; run `python setup.py build_ext --inplace` first")
        backends = [("python", _fallback)]
    else:
        backends = [("python", _fallback), ("compiled", _statevec)]

    print(f"{'workload':<28}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    rows = []
    for n, k, repeats in [(2, 2, 3000), (3, 3, 3000), (6, 2, 2000), (10, 2, 500), (12, 1, 300)]:
        rows.append((f"apply {k}q gate, {n}q register",
                     [bench_apply(b, n, k, repeats) for _, b in backends]))
    for n, repeats in [(2, 5000), (8, 1000), (12, 200)]:
        rows.append((f"measure+collapse, {n}q", [bench_measure_cycle(b, n, repeats) for _, b in backends]))

    for label, times in rows:
        cells = "".join(f"{t * 1e6:>10.1f}us" for t in times)
        speedup = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else f"{'n/a':>10}"
        print(f"{label:<28}{cells}{speedup}")

    per_shot = bench_corrector_workload(5000)
    from pilotqec._kernels import backend_name

    print(f"\ncorrector shot via public API ({backend_name()} backend): {per_shot * 1e6:.1f} us")
    print(f"=> {1e5 * 2 * per_shot:.1f} s for a 1e5-trial cascade campaign (~2 shots/trial)")


if __name__ == "__main__":
    main()
