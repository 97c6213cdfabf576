"""Pure-Python twins of the compiled kernels.

Used when the extension is not built, when ``SECURENC_PURE_PYTHON=1``, and
for fields too large for dense q-by-q tables (the tables are then lazy
objects supporting ``table[a][b]``).
"""
import numpy as np


def rref(a, add, sub, mul, inv):
    """Reduce the list-of-lists ``a`` in place; return pivot columns."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    r = 0
    pivots = []
    for c in range(cols):
        if r >= rows:
            break
        piv = next((i for i in range(r, rows) if a[i][c] != 0), -1)
        if piv < 0:
            continue
        a[r], a[piv] = a[piv], a[r]
        s = inv[a[r][c]]
        if s != 1:
            mrow = mul[s]
            a[r] = [mrow[x] for x in a[r]]
        pr = a[r]
        for i in range(rows):
            if i == r:
                continue
            f = a[i][c]
            if f == 0:
                continue
            mrow = mul[f]
            row = a[i]
            for j in range(c, cols):
                if pr[j]:
                    row[j] = sub[row[j]][mrow[pr[j]]]
        pivots.append(c)
        r += 1
    return pivots


def matmul(a, b, add, mul):
    """Field product of two int64 arrays.

    Dense ndarray tables take a vectorised path; lazy tables fall back to
    scalar loops.
    """
    n, inner = a.shape
    p = b.shape[1]
    if isinstance(mul, np.ndarray):
        out = np.zeros((n, p), dtype=np.int64)
        for k in range(inner):
            out = add[out, mul[a[:, k, None], b[None, k, :]]]
        return out
    out = [[0] * p for _ in range(n)]
    al, bl = a.tolist(), b.tolist()
    for i in range(n):
        row = out[i]
        for k in range(inner):
            x = al[i][k]
            if x == 0:
                continue
            mrow = mul[x]
            bk = bl[k]
            for j in range(p):
                if bk[j]:
                    row[j] = add[row[j]][mrow[bk[j]]]
    return np.array(out, dtype=np.int64).reshape(n, p)


def max_pair_collisions(images):
    """See the compiled version; returns ``(max_count, pairs_checked)``."""
    nx = images.shape[1]
    best = 0
    for x1 in range(nx - 1):
        eq = images[:, x1 + 1:] == images[:, x1, None]
        counts = eq.sum(axis=0)
        if counts.size:
            best = max(best, int(counts.max()))
    return best, nx * (nx - 1) // 2
