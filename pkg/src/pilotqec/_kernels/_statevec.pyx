# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled state-vector kernels.

Hot inner loops of the simulator: embedding a small unitary into a dense
register, outcome weights of one qubit, and branch collapse.  The registers
in the protocol circuits are tiny (2-3 qubits) but the Monte Carlo harness
invokes these kernels millions of times, so per-call overhead dominates;
hence the compiled path.  Index convention matches the fallback module:
qubit q of an n-qubit register sits at bit shift n - 1 - q.
"""

import numpy as np

from libc.stdlib cimport free, malloc

BACKEND_NAME = "compiled"


def apply_gate(state, gate, shifts):
    cdef const double complex[::1] psi = np.ascontiguousarray(state, dtype=np.complex128)
    cdef const double complex[:, ::1] g = np.ascontiguousarray(gate, dtype=np.complex128)
    cdef const long[::1] sh = np.ascontiguousarray(shifts, dtype=np.int64)

    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t k = sh.shape[0]
    cdef Py_ssize_t block = 1 << k
    cdef Py_ssize_t outer_count = dim >> k

    out_arr = np.empty(dim, dtype=np.complex128)
    cdef double complex[::1] out = out_arr

    cdef long *sorted_sh = <long *> malloc(k * sizeof(long))
    cdef Py_ssize_t *idx = <Py_ssize_t *> malloc(block * sizeof(Py_ssize_t))
    cdef double complex *buf = <double complex *> malloc(block * sizeof(double complex))
    if sorted_sh == NULL or idx == NULL or buf == NULL:
        free(sorted_sh); free(idx); free(buf)
        raise MemoryError()

    cdef Py_ssize_t i, j, outer, c, d, base
    cdef long tmp
    cdef double complex acc

    try:
        for i in range(k):
            sorted_sh[i] = sh[i]
        # insertion sort ascending; expansion below needs increasing shifts
        for i in range(1, k):
            tmp = sorted_sh[i]
            j = i
            while j > 0 and sorted_sh[j - 1] > tmp:
                sorted_sh[j] = sorted_sh[j - 1]
                j -= 1
            sorted_sh[j] = tmp

        for outer in range(outer_count):
            base = outer
            for i in range(k):
                base = ((base >> sorted_sh[i]) << (sorted_sh[i] + 1)) | (base & ((1 << sorted_sh[i]) - 1))
            for c in range(block):
                idx[c] = base
                for j in range(k):
                    if (c >> j) & 1:
                        idx[c] |= 1 << sh[j]
            for c in range(block):
                acc = 0
                for d in range(block):
                    acc += g[c, d] * psi[idx[d]]
                buf[c] = acc
            for c in range(block):
                out[idx[c]] = buf[c]
    finally:
        free(sorted_sh)
        free(idx)
        free(buf)
    return out_arr


def branch_weights(state, shift):
    cdef const double complex[::1] psi = np.ascontiguousarray(state, dtype=np.complex128)
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t s = shift
    cdef double w0 = 0.0, w1 = 0.0, re, im
    cdef Py_ssize_t i
    for i in range(dim):
        re = psi[i].real
        im = psi[i].imag
        if (i >> s) & 1:
            w1 += re * re + im * im
        else:
            w0 += re * re + im * im
    return w0, w1


def collapse_qubit(state, shift, outcome, scale):
    cdef const double complex[::1] psi = np.ascontiguousarray(state, dtype=np.complex128)
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t s = shift
    cdef Py_ssize_t keep = outcome
    cdef double c = scale
    out_arr = np.zeros(dim, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t i
    for i in range(dim):
        if ((i >> s) & 1) == keep:
            out[i] = psi[i] * c
    return out_arr
