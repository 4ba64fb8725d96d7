# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled tensor-grid integrand sum.

Same contract as ``_gridref.grid_sum`` but evaluated in one fused pass over
the flattened grid: no intermediate arrays, per-term partial products are
cached over the outer axes and only the innermost axis runs in the hot loop.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, log, sin

cnp.import_array()


def grid_sum(
    cnp.ndarray[cnp.float64_t, ndim=1] exp_scales,
    list exp_factors,
    list add_real,
    list add_imag,
    cnp.ndarray[cnp.complex128_t, ndim=1] lse_coeffs,
    cnp.ndarray[cnp.float64_t, ndim=1] lse_a_scales,
    list lse_a_factors,
    cnp.ndarray[cnp.float64_t, ndim=1] lse_b_scales,
    list lse_b_factors,
    double const_re,
    double const_im,
):
    cdef Py_ssize_t m = len(add_real)
    cdef Py_ssize_t K = exp_scales.shape[0]
    cdef Py_ssize_t T = lse_coeffs.shape[0]
    cdef Py_ssize_t j, k, t, n, outer_total, o

    cdef cnp.ndarray[cnp.float64_t, ndim=2] ef_all, la_all, lb_all
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ar_last, ai_last

    shape = [a.shape[0] for a in add_real]
    cdef Py_ssize_t n_last = shape[m - 1]

    # Per-axis tables stacked as contiguous 2-D arrays for typed access.
    ef_list = [np.ascontiguousarray(f, dtype=np.float64) for f in exp_factors]
    la_list = [np.ascontiguousarray(f, dtype=np.float64) for f in lse_a_factors]
    lb_list = [np.ascontiguousarray(f, dtype=np.float64) for f in lse_b_factors]
    ar_list = [np.ascontiguousarray(a, dtype=np.float64) for a in add_real]
    ai_list = [np.ascontiguousarray(a, dtype=np.float64) for a in add_imag]

    outer_total = 1
    for j in range(m - 1):
        outer_total *= shape[j]

    cdef cnp.ndarray[cnp.int64_t, ndim=1] odo = np.zeros(m - 1 if m > 1 else 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pref = np.empty(K, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pref_a = np.empty(T if T else 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pref_b = np.empty(T if T else 1, dtype=np.float64)

    ar_last = ar_list[m - 1]
    ai_last = ai_list[m - 1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ef_last = ef_list[m - 1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] la_last = la_list[m - 1] if T else np.zeros((1, 1))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] lb_last = lb_list[m - 1] if T else np.zeros((1, 1))

    cdef double acc_re = 0.0, acc_im = 0.0
    cdef double c_re_k = 0.0, c_im_k = 0.0  # Kahan compensations
    cdef double base_re, base_im, re, im, term, lnv, ev
    cdef double y, tmp
    cdef double qa_re, qa_im
    cdef cnp.ndarray[cnp.float64_t, ndim=2] tbl

    for o in range(outer_total):
        # outer partial state
        base_re = const_re
        base_im = const_im
        for k in range(K):
            pref[k] = exp_scales[k]
        for t in range(T):
            pref_a[t] = lse_a_scales[t]
            pref_b[t] = lse_b_scales[t]
        for j in range(m - 1):
            n = odo[j]
            base_re += ar_list[j][n]
            base_im += ai_list[j][n]
            tbl = ef_list[j]
            for k in range(K):
                pref[k] *= tbl[k, n]
            if T:
                tbl = la_list[j]
                for t in range(T):
                    pref_a[t] *= tbl[t, n]
                tbl = lb_list[j]
                for t in range(T):
                    pref_b[t] *= tbl[t, n]

        for n in range(n_last):
            re = base_re + ar_last[n]
            im = base_im + ai_last[n]
            for k in range(K):
                re -= pref[k] * ef_last[k, n]
            for t in range(T):
                lnv = log(pref_a[t] * la_last[t, n] + pref_b[t] * lb_last[t, n])
                re += lse_coeffs[t].real * lnv
                im += lse_coeffs[t].imag * lnv
            ev = exp(re)
            # Kahan-compensated accumulation in fixed index order.
            y = ev * cos(im) - c_re_k
            tmp = acc_re + y
            c_re_k = (tmp - acc_re) - y
            acc_re = tmp
            y = ev * sin(im) - c_im_k
            tmp = acc_im + y
            c_im_k = (tmp - acc_im) - y
            acc_im = tmp

        # advance odometer
        for j in range(m - 2, -1, -1):
            odo[j] += 1
            if odo[j] < shape[j]:
                break
            odo[j] = 0

    return complex(acc_re, acc_im)
