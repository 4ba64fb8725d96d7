"""NumPy reference implementation of the tensor-grid integrand sum.

Evaluates

    S = sum_idx exp( c + sum_j AR_j[idx_j] + i AI_j[idx_j]
                     - sum_k s_k prod_j EF_j[k, idx_j]
                     + sum_t q_t log( sa_t prod_j LA_j[t, idx_j]
                                    + sb_t prod_j LB_j[t, idx_j] ) )

over the full tensor grid.  Per-axis quadrature weights are folded into the
additive real tables by the caller.  All exponential scales are positive, so
the real part of the exponent is bounded above and the sum never overflows.
"""

from __future__ import annotations

import numpy as np


def grid_sum(
    exp_scales: np.ndarray,
    exp_factors: list[np.ndarray],
    add_real: list[np.ndarray],
    add_imag: list[np.ndarray],
    lse_coeffs: np.ndarray,
    lse_a_scales: np.ndarray,
    lse_a_factors: list[np.ndarray],
    lse_b_scales: np.ndarray,
    lse_b_factors: list[np.ndarray],
    const_re: float,
    const_im: float,
) -> complex:
    m = len(add_real)
    shape = tuple(a.shape[0] for a in add_real)

    def _bcast(vec: np.ndarray, axis: int) -> np.ndarray:
        sh = [1] * m
        sh[axis] = vec.shape[0]
        return vec.reshape(sh)

    re = np.full(shape, const_re, dtype=np.float64)
    im = np.full(shape, const_im, dtype=np.float64)
    for j in range(m):
        re = re + _bcast(add_real[j], j)
        im = im + _bcast(add_imag[j], j)

    for k in range(exp_scales.shape[0]):
        term = np.full(shape, exp_scales[k], dtype=np.float64)
        for j in range(m):
            term = term * _bcast(exp_factors[j][k], j)
        re -= term

    for t in range(lse_coeffs.shape[0]):
        a = np.full(shape, lse_a_scales[t], dtype=np.float64)
        b = np.full(shape, lse_b_scales[t], dtype=np.float64)
        for j in range(m):
            a = a * _bcast(lse_a_factors[j][t], j)
            b = b * _bcast(lse_b_factors[j][t], j)
        ln = np.log(a + b)
        q = lse_coeffs[t]
        re += q.real * ln
        im += q.imag * ln

    vals = np.exp(re) * (np.cos(im) + 1j * np.sin(im))
    return complex(vals.sum())
