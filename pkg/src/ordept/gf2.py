"""Dense linear algebra over GF(2) on uint8 numpy matrices."""

import numpy as np


def rref(mat):
    """Reduced row echelon form of a binary matrix.

    Returns ``(reduced, pivots)`` where ``pivots`` lists the pivot column of
    each nonzero row, in row order.
    """
    a = (np.array(mat, dtype=np.uint8) & 1).copy()
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        a[others] ^= a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(mat):
    return len(rref(mat)[1])


def row_basis(mat):
    """Independent rows spanning the row space of ``mat`` (in RREF)."""
    reduced, pivots = rref(mat)
    return reduced[: len(pivots)]


def nullspace(mat):
    """Basis of {x : mat @ x = 0} as rows, systematic on the free columns.

    Each basis row has a single 1 among the free (non-pivot) columns, so the
    returned matrix is a systematic generator when ``mat`` is a parity-check
    matrix.
    """
    reduced, pivots = rref(mat)
    cols = reduced.shape[1]
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = reduced[r, f]
    return basis


def matmul(a, b):
    """Matrix product over GF(2)."""
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64) % 2).astype(np.uint8)


def pack_bits(bits):
    """Pack a bit sequence into an int with element ``i`` at bit ``i``."""
    value = 0
    for i in np.flatnonzero(np.asarray(bits)):
        value |= 1 << int(i)
    return value


def unpack_bits(value, width):
    return np.array([(value >> i) & 1 for i in range(width)], dtype=np.uint8)
