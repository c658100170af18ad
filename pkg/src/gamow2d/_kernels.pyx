# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled pair-sum kernels: the O(n^2) inner loops of the interaction sums."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, pow, sqrt

BACKEND = "cython"


cdef inline double kernel_value(int fam, double a1, double a2, double d) noexcept nogil:
    if fam == 0:  # power: d**alpha, fast paths for the common exponents
        if a1 == -0.5:
            return 1.0 / sqrt(d)
        if a1 == -1.0:
            return 1.0 / d
        if a1 == -1.5:
            return 1.0 / (d * sqrt(d))
        if a1 == 0.0:
            return 1.0
        return pow(d, a1)
    if fam == 1:  # gauss_power: exp(-kappa d^2) d^(-alpha)
        return exp(-a2 * d * d) * pow(d, -a1)
    if fam == 2:  # indicator of radius a1
        return 1.0 if d <= a1 else 0.0
    return 1.0    # constant


def pair_sum(double[:, ::1] p1, double[::1] w1,
             double[:, ::1] p2, double[::1] w2,
             int fam, double a1, double a2,
             double rc, double phi_rc):
    """Weighted double sum of g(|x - y|) with a near-field continuum patch.

    Pairs closer than rc are dropped from the discrete sum; instead every node
    receives phi_rc (= 2 pi H(rc)) scaled by the locally sampled area fraction
    of its rc-disk.  rc = 0 reduces to the plain sum over nonzero distances.
    """
    cdef Py_ssize_t n = p1.shape[0], m = p2.shape[0]
    cdef Py_ssize_t i, j
    cdef double far = 0.0, dx, dy, d2, d, rc2 = rc * rc
    cdef double near_i, patch = 0.0, frac
    cdef double inv_disk = 0.0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] near2_arr = np.zeros(m)
    cdef double[::1] near2 = near2_arr
    if rc > 0.0:
        inv_disk = 1.0 / (3.141592653589793 * rc2)
    with nogil:
        for i in range(n):
            near_i = 0.0
            for j in range(m):
                dx = p1[i, 0] - p2[j, 0]
                dy = p1[i, 1] - p2[j, 1]
                d2 = dx * dx + dy * dy
                if d2 < rc2 or d2 == 0.0:
                    near_i += w2[j]
                    near2[j] += w1[i]
                else:
                    d = sqrt(d2)
                    far += w1[i] * w2[j] * kernel_value(fam, a1, a2, d)
            if rc > 0.0:
                frac = near_i * inv_disk
                if frac > 1.0:
                    frac = 1.0
                patch += w1[i] * phi_rc * frac
    cdef double patch2 = 0.0
    if rc > 0.0:
        for j in range(m):
            frac = near2[j] * inv_disk
            if frac > 1.0:
                frac = 1.0
            patch2 += w2[j] * phi_rc * frac
    return far + 0.5 * (patch + patch2)


def raster_sum(double[:, ::1] c1, double[:, ::1] c2,
               double w_pair, double[::1] table, double step, double g_diag):
    """Cell-centre pair sum with a quantized radial lookup table.

    Coincident cells contribute the cell-averaged value g_diag; all other
    pairs interpolate the table linearly at their centre distance.
    """
    cdef Py_ssize_t n = c1.shape[0], m = c2.shape[0]
    cdef Py_ssize_t i, j, k, last = table.shape[0] - 2
    cdef double total = 0.0, dx, dy, d, u
    with nogil:
        for i in range(n):
            for j in range(m):
                dx = c1[i, 0] - c2[j, 0]
                dy = c1[i, 1] - c2[j, 1]
                d = sqrt(dx * dx + dy * dy)
                if d == 0.0:
                    total += g_diag
                else:
                    u = d / step
                    k = <Py_ssize_t> u
                    if k > last:
                        k = last
                    total += table[k] + (u - k) * (table[k + 1] - table[k])
    return total * w_pair
