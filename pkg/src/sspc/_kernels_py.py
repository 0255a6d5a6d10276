"""Pure NumPy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def fwht(data):
    """Unnormalised Walsh-Hadamard transform of every row, in place."""
    rows, n = data.shape
    if n & (n - 1):
        raise ValueError("row length must be a power of two")
    h = 1
    while h < n:
        view = data.reshape(rows, n // (2 * h), 2, h)
        x = view[:, :, 0, :].copy()
        y = view[:, :, 1, :]
        view[:, :, 0, :] += y
        view[:, :, 1, :] = x - y
        h *= 2


def xor_convolve(a, b):
    """out[s] = sum_t a[t] * b[s ^ t], summed in ascending t."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    n = a.shape[0]
    if b.shape[0] != n:
        raise ValueError("length mismatch")
    idx = np.arange(n)
    table = b[np.bitwise_xor.outer(idx, idx)]
    out = np.empty(n)
    for s in range(n):
        acc = 0.0
        for t, w in zip(a.tolist(), table[s].tolist()):
            acc += t * w
        out[s] = acc
    return out


def prefix_products(mats):
    """out[j] = mats[j] @ mats[j-1] @ ... @ mats[0]."""
    out = np.empty_like(mats, dtype=np.complex128)
    if len(mats) == 0:
        return out
    out[0] = mats[0]
    for j in range(1, len(mats)):
        np.matmul(mats[j], out[j - 1], out=out[j])
    return out


def suffix_products(mats):
    """out[j] = mats[n-1] @ ... @ mats[j+1] @ mats[j]."""
    out = np.empty_like(mats, dtype=np.complex128)
    n = len(mats)
    if n == 0:
        return out
    out[n - 1] = mats[n - 1]
    for j in range(n - 2, -1, -1):
        np.matmul(out[j + 1], mats[j], out=out[j])
    return out
