# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: segment marking and compensated log-weighted summation.

Must stay operation-for-operation equivalent to ``_pykernel`` so the two
backends produce bit-identical results.
"""

from libc.math cimport fabs, log

import numpy as np

cimport numpy as cnp

cnp.import_array()


def sieve_odd_flags(unsigned long long lo, Py_ssize_t n_odd, cnp.uint64_t[::1] primes):
    """Flags over the odd values lo, lo+2, ...: 1 where no base prime divides."""
    out = np.ones(n_odd, dtype=np.uint8)
    if n_odd == 0:
        return out
    cdef unsigned char[::1] flags = out
    cdef Py_ssize_t i, j, n = n_odd, n_primes = primes.shape[0]
    cdef unsigned long long p, pp, start
    cdef unsigned long long hi = lo + 2 * <unsigned long long> n_odd
    with nogil:
        for i in range(n_primes):
            p = primes[i]
            pp = p * p
            if pp >= hi:
                break
            if pp >= lo:
                start = pp
            else:
                start = lo + (p - lo % p) % p
                if (start & 1) == 0:
                    start += p
            if start >= hi:
                continue
            j = <Py_ssize_t> ((start - lo) >> 1)
            while j < n:
                flags[j] = 0
                j += <Py_ssize_t> p
    return out


def log_weighted_sum(cnp.uint64_t[::1] ps, double value, double compensation):
    """Advance a Neumaier-compensated sum by log(p)*log(p+2) for each p."""
    cdef Py_ssize_t i, n = ps.shape[0]
    cdef unsigned long long p
    cdef double term, t
    with nogil:
        for i in range(n):
            p = ps[i]
            term = log(<double> p) * log(<double> (p + 2))
            t = value + term
            if fabs(value) >= fabs(term):
                compensation = compensation + ((value - t) + term)
            else:
                compensation = compensation + ((term - t) + value)
            value = t
    return value, compensation
