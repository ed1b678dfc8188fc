# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled statevector kernels; same contracts as numpy_backend.

Bit layout matches numpy_backend: qubit 0 is the most significant bit.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx


cdef inline Py_ssize_t _insert_two_zero_bits(Py_ssize_t r, int lo, int hi):
    # Spread the bits of r so that bit positions lo < hi come out zero.
    cdef Py_ssize_t low = r & ((1 << lo) - 1)
    cdef Py_ssize_t mid = (r >> lo) & ((1 << (hi - lo - 1)) - 1)
    cdef Py_ssize_t high = r >> (hi - 1)
    return low | (mid << (lo + 1)) | (high << (hi + 1))


cdef inline Py_ssize_t _insert_one_zero_bit(Py_ssize_t r, int pos):
    cdef Py_ssize_t low = r & ((1 << pos) - 1)
    return low | ((r >> pos) << (pos + 1))


def apply_two_qubit(const cplx[::1] psi, const cplx[:, ::1] u, int q0, int q1):
    cdef Py_ssize_t size = psi.shape[0]
    cdef int n = 0
    while (1 << n) < size:
        n += 1
    cdef int p0 = n - 1 - q0
    cdef int p1 = n - 1 - q1
    cdef int lo = p0 if p0 < p1 else p1
    cdef int hi = p1 if p0 < p1 else p0
    cdef cnp.ndarray out_arr = np.empty(size, dtype=np.complex128)
    cdef cplx[::1] out = out_arr
    cdef Py_ssize_t r, base, i0, i1, i2, i3
    cdef cplx a0, a1, a2, a3
    for r in range(size >> 2):
        base = _insert_two_zero_bits(r, lo, hi)
        i0 = base
        i1 = base | (1 << p1)
        i2 = base | (1 << p0)
        i3 = base | (1 << p0) | (1 << p1)
        a0 = psi[i0]
        a1 = psi[i1]
        a2 = psi[i2]
        a3 = psi[i3]
        out[i0] = u[0, 0] * a0 + u[0, 1] * a1 + u[0, 2] * a2 + u[0, 3] * a3
        out[i1] = u[1, 0] * a0 + u[1, 1] * a1 + u[1, 2] * a2 + u[1, 3] * a3
        out[i2] = u[2, 0] * a0 + u[2, 1] * a1 + u[2, 2] * a2 + u[2, 3] * a3
        out[i3] = u[3, 0] * a0 + u[3, 1] * a1 + u[3, 2] * a2 + u[3, 3] * a3
    return out_arr


def reduced_density_1(const cplx[::1] psi, int j):
    cdef Py_ssize_t size = psi.shape[0]
    cdef int n = 0
    while (1 << n) < size:
        n += 1
    cdef int p = n - 1 - j
    cdef cnp.ndarray rho_arr = np.zeros((2, 2), dtype=np.complex128)
    cdef cplx[:, ::1] rho = rho_arr
    cdef Py_ssize_t r, i0, i1
    cdef cplx a0, a1
    for r in range(size >> 1):
        i0 = _insert_one_zero_bit(r, p)
        i1 = i0 | (1 << p)
        a0 = psi[i0]
        a1 = psi[i1]
        rho[0, 0] = rho[0, 0] + a0 * a0.conjugate()
        rho[0, 1] = rho[0, 1] + a0 * a1.conjugate()
        rho[1, 1] = rho[1, 1] + a1 * a1.conjugate()
    rho[1, 0] = rho[0, 1].conjugate()
    return rho_arr


def reduced_density_2(const cplx[::1] psi, int j, int k):
    cdef Py_ssize_t size = psi.shape[0]
    cdef int n = 0
    while (1 << n) < size:
        n += 1
    cdef int pj = n - 1 - j
    cdef int pk = n - 1 - k
    cdef int lo = pj if pj < pk else pk
    cdef int hi = pk if pj < pk else pj
    cdef cnp.ndarray rho_arr = np.zeros((4, 4), dtype=np.complex128)
    cdef cplx[:, ::1] rho = rho_arr
    cdef Py_ssize_t r, base
    cdef Py_ssize_t idx[4]
    cdef cplx amp[4]
    cdef int a, b
    for r in range(size >> 2):
        base = _insert_two_zero_bits(r, lo, hi)
        idx[0] = base
        idx[1] = base | (1 << pk)
        idx[2] = base | (1 << pj)
        idx[3] = base | (1 << pj) | (1 << pk)
        for a in range(4):
            amp[a] = psi[idx[a]]
        for a in range(4):
            for b in range(a, 4):
                rho[a, b] = rho[a, b] + amp[a] * amp[b].conjugate()
    for a in range(4):
        for b in range(a + 1, 4):
            rho[b, a] = rho[a, b].conjugate()
    return rho_arr
