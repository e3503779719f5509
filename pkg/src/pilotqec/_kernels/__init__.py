"""Kernel backend selection.

Prefers the compiled extension, falls back to the numpy implementation when
the extension was not built (or when PILOTQEC_PURE_PYTHON=1 is set, which is
how the benchmark pins the slow path).  Both backends expose the same three
functions with identical semantics; ``tests/test_kernels.py`` asserts they
agree and ``benchmarks/bench_kernels.py`` compares their speed.
"""

import os

if os.environ.get("PILOTQEC_PURE_PYTHON") == "1":
    from pilotqec._kernels._fallback import (  # noqa: F401
        BACKEND_NAME,
        apply_gate,
        branch_weights,
        collapse_qubit,
    )
else:
    try:
        from pilotqec._kernels._statevec import (  # noqa: F401
            BACKEND_NAME,
            apply_gate,
            branch_weights,
            collapse_qubit,
        )
    except ImportError:
        from pilotqec._kernels._fallback import (  # noqa: F401
            BACKEND_NAME,
            apply_gate,
            branch_weights,
            collapse_qubit,
        )


def backend_name() -> str:
    """Name of the kernel backend selected at import time."""
    return BACKEND_NAME
