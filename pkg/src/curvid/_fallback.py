"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``."""

from __future__ import annotations

import numpy as np

CHUNK_TERMS = 1 << 21


def pfaffian_sum(R, tuples, perms, signs, tail):
    R = np.ascontiguousarray(R, dtype=np.float64)
    m = R.shape[0]
    tuples = np.asarray(tuples, dtype=np.int64)
    perms = np.asarray(perms, dtype=np.int64)
    signs = np.asarray(signs, dtype=np.float64)
    L = tuples.shape[1]
    nfac = (L - 1) // 2 if tail else L // 2
    flat = R.ravel()
    out = np.zeros(m * m)
    total = 0.0
    step = max(1, CHUNK_TERMS // max(1, len(perms)))
    for start in range(0, len(tuples), step):
        I = tuples[start : start + step]
        J = I[:, perms]  # (chunk, nperm, L)
        prod = np.broadcast_to(signs, J.shape[:2]).copy()
        for k in range(nfac):
            a = I[:, 2 * k, None]
            b = I[:, 2 * k + 1, None]
            idx = ((a * m + b) * m + J[..., 2 * k + 1]) * m + J[..., 2 * k]
            prod *= flat[idx]
        if tail:
            cell = I[:, L - 1, None] * m + J[..., L - 1]
            out += np.bincount(cell.ravel(), weights=prod.ravel(), minlength=m * m)
        else:
            total += float(prod.sum())
    if tail:
        return out.reshape(m, m)
    return total
