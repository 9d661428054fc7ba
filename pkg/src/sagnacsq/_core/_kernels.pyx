# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner kernels of the split-step solver.

Both functions work in place on C-contiguous complex128 arrays and mirror
``_fallback.py`` exactly.
"""
from libc.math cimport cos, sin, isfinite
cimport numpy as cnp
import numpy as np

cnp.import_array()


def spm_phase(cnp.ndarray arr, double gamma_dz):
    """a <- a * exp(i gamma_dz |a|^2); return False if a non-finite sample was seen."""
    if not arr.flags.c_contiguous:
        raise ValueError("spm_phase needs a C-contiguous array")
    cdef double complex[::1] a = arr.reshape(-1)
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double re, im, ph, c, s
    cdef bint finite = True
    with nogil:
        for i in range(n):
            re = a[i].real
            im = a[i].imag
            ph = gamma_dz * (re * re + im * im)
            if not isfinite(ph):
                finite = False
            c = cos(ph)
            s = sin(ph)
            a[i] = (re * c - im * s) + 1j * (re * s + im * c)
    return finite


def apply_spectral(cnp.ndarray arr, cnp.ndarray factor):
    """Multiply every row of ``arr`` (shape (..., n)) by ``factor`` (shape (n,))."""
    if not arr.flags.c_contiguous:
        raise ValueError("apply_spectral needs a C-contiguous array")
    if arr.dtype != np.complex128:
        raise TypeError("apply_spectral needs a complex128 array")
    f_arr = np.ascontiguousarray(factor, dtype=np.complex128)
    cdef Py_ssize_t n = f_arr.shape[0]
    if n == 0 or arr.size % n:
        raise ValueError("factor length does not divide the array")
    cdef Py_ssize_t rows = arr.size // n
    # raw interleaved (re, im) doubles; the plain loop vectorises
    cdef double* a = <double*> cnp.PyArray_DATA(arr)
    cdef const double* f = <const double*> cnp.PyArray_DATA(f_arr)
    cdef Py_ssize_t r, j
    cdef double* row
    cdef double ar, ai
    with nogil:
        for r in range(rows):
            row = a + 2 * r * n
            for j in range(n):
                ar = row[2 * j]
                ai = row[2 * j + 1]
                row[2 * j] = ar * f[2 * j] - ai * f[2 * j + 1]
                row[2 * j + 1] = ar * f[2 * j + 1] + ai * f[2 * j]
