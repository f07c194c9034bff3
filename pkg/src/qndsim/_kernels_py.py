"""Pure numpy kernels; used when the compiled extension is unavailable.

Must stay call-compatible with ``_kernels.pyx``.
"""

import numpy as np

P_FLOOR = 1e-15
TIE_TOL = 1e-12


def first_max(res):
    """Flat index of the first entry within TIE_TOL of the maximum."""
    flat = res.reshape(-1)
    return int(np.argmax(flat >= flat.max() - TIE_TOL))


def joint_amplitudes(u, a, b):
    d_s, d_p = a.shape[0], b.shape[0]
    return (u @ np.kron(a, b)).reshape(d_s, d_p)


def weak_residual(u, a, b):
    c = joint_amplitudes(u, a, b)
    post = np.sum(np.abs(c) ** 2, axis=1)
    res = np.abs(post - np.abs(a) ** 2)
    i = first_max(res)
    return float(res.max()), i


def moderate_residual(u, b, d_s):
    d_p = b.shape[0]
    t = u.reshape(d_s, d_p, d_s, d_p)
    m = t @ b  # m[i, j, k] = sum_l t[i, j, k, l] b[l]
    # gram[i, k, k'] = sum_j conj(m[i, j, k]) m[i, j, k']
    gram = np.einsum("ijk,ijl->ikl", m.conj(), m)
    target = np.zeros((d_s, d_s, d_s))
    idx = np.arange(d_s)
    target[idx, idx, idx] = 1.0
    res = np.abs(gram - target)
    i, k, k2 = np.unravel_index(first_max(res), res.shape)
    return float(res.max()), int(k), int(k2), int(i)


def mutual_information(p):
    rows = p.sum(axis=1)
    cols = p.sum(axis=0)
    mask = p > P_FLOOR
    outer = np.outer(rows, cols)
    return float(np.sum(p[mask] * np.log(p[mask] / outer[mask])))
