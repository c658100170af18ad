"""Pure-numpy twin of the compiled pair-sum kernels.

Selected at import time when the extension is unavailable; must agree with it
to floating-point noise.  Large inputs are processed in row blocks to bound
the live memory of the distance matrices.
"""

import numpy as np

BACKEND = "numpy"

_BLOCK = 2048


def _kernel_value(fam, a1, a2, d):
    if fam == 0:
        return d**a1
    if fam == 1:
        return np.exp(-a2 * d * d) * d ** (-a1)
    if fam == 2:
        return (d <= a1).astype(float)
    return np.ones_like(d)


def pair_sum(p1, w1, p2, w2, fam, a1, a2, rc, phi_rc):
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    rc2 = rc * rc
    far = 0.0
    near1 = np.zeros(len(w1))
    near2 = np.zeros(len(w2))
    for lo in range(0, len(w1), _BLOCK):
        hi = min(lo + _BLOCK, len(w1))
        dx = p1[lo:hi, 0, None] - p2[None, :, 0]
        dy = p1[lo:hi, 1, None] - p2[None, :, 1]
        d2 = dx * dx + dy * dy
        near = (d2 < rc2) | (d2 == 0.0)
        if near.any():
            near1[lo:hi] += near @ w2
            near2 += w1[lo:hi] @ near
        d = np.sqrt(np.where(near, 1.0, d2))
        vals = np.where(near, 0.0, _kernel_value(fam, a1, a2, d))
        far += float(w1[lo:hi] @ vals @ w2)
    if rc <= 0.0:
        return far
    inv_disk = 1.0 / (np.pi * rc2)
    frac1 = np.minimum(near1 * inv_disk, 1.0)
    frac2 = np.minimum(near2 * inv_disk, 1.0)
    patch = float(w1 @ frac1) * phi_rc
    patch2 = float(w2 @ frac2) * phi_rc
    return far + 0.5 * (patch + patch2)


def raster_sum(c1, c2, w_pair, table, step, g_diag):
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    table = np.asarray(table, dtype=float)
    last = len(table) - 2
    total = 0.0
    for lo in range(0, len(c1), _BLOCK):
        hi = min(lo + _BLOCK, len(c1))
        dx = c1[lo:hi, 0, None] - c2[None, :, 0]
        dy = c1[lo:hi, 1, None] - c2[None, :, 1]
        d = np.sqrt(dx * dx + dy * dy)
        zero = d == 0.0
        u = d / step
        k = np.minimum(u.astype(np.int64), last)
        vals = table[k] + (u - k) * (table[k + 1] - table[k])
        vals = np.where(zero, g_diag, vals)
        total += float(vals.sum())
    return total * w_pair
