# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline int _parity(uint64_t x) nogil:
    return __builtin_popcountll(x) & 1


def pauli_apply(const double complex[::1] amps, uint64_t xmask, uint64_t zmask, int n_y):
    cdef Py_ssize_t n = amps.shape[0]
    cdef Py_ssize_t j
    cdef double complex phase
    cdef int r = n_y % 4
    if r == 0:
        phase = 1.0
    elif r == 1:
        phase = 1.0j
    elif r == 2:
        phase = -1.0
    else:
        phase = -1.0j
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    with nogil:
        for j in range(n):
            if _parity(<uint64_t>j & zmask):
                o[<uint64_t>j ^ xmask] = -phase * amps[j]
            else:
                o[<uint64_t>j ^ xmask] = phase * amps[j]
    return out


def scan_equations(const uint64_t[::1] masks, const unsigned char[::1] rhs_bits,
                   int n_vars, Py_ssize_t max_witnesses):
    cdef Py_ssize_t n_eq = masks.shape[0]
    cdef uint64_t a, total = (<uint64_t>1) << n_vars
    cdef Py_ssize_t e, count = 0, stored = 0
    cdef bint ok
    wit = np.empty(max_witnesses, dtype=np.int64)
    cdef int64_t[::1] w = wit
    with nogil:
        for a in range(total):
            ok = True
            for e in range(n_eq):
                if _parity(a & masks[e]) != rhs_bits[e]:
                    ok = False
                    break
            if ok:
                if stored < max_witnesses:
                    w[stored] = <int64_t>a
                    stored += 1
                count += 1
    return int(count), wit[:stored].copy()


def scan_bound(const uint64_t[::1] term_masks, const int64_t[::1] term_signs,
               int n_vars, uint64_t constraint_mask, int constraint_bit):
    cdef Py_ssize_t n_terms = term_masks.shape[0]
    cdef uint64_t a, total = (<uint64_t>1) << n_vars
    cdef Py_ssize_t t
    cdef int64_t value, best = 0, best_idx = -1
    with nogil:
        for a in range(total):
            if constraint_bit >= 0 and _parity(a & constraint_mask) != constraint_bit:
                continue
            value = 0
            for t in range(n_terms):
                if _parity(a & term_masks[t]):
                    value -= term_signs[t]
                else:
                    value += term_signs[t]
            if best_idx < 0 or value > best:
                best = value
                best_idx = <int64_t>a
    return int(best), int(best_idx)


cdef inline Py_ssize_t _search(const double[::1] cdf, double u) nogil:
    cdef Py_ssize_t k = 0, last = cdf.shape[0] - 1
    while k < last and u >= cdf[k]:
        k += 1
    return k


def sample_outcomes(const int64_t[::1] settings, const double[::1] u_first,
                    const double[::1] u_second, const double[::1] cdf_first,
                    int accept_upto, const double[:, :, ::1] cdf_second):
    cdef Py_ssize_t n = settings.shape[0]
    cdef Py_ssize_t i, g, k, last = cdf_second.shape[2] - 1
    cdef double u
    first = np.empty(n, dtype=np.int64)
    second = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] f = first
    cdef int64_t[::1] s = second
    with nogil:
        for i in range(n):
            g = _search(cdf_first, u_first[i])
            f[i] = g
            if g < accept_upto:
                u = u_second[i]
                k = 0
                while k < last and u >= cdf_second[settings[i], g, k]:
                    k += 1
                s[i] = k
            else:
                s[i] = -1
    return first, second
