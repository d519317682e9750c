"""Small exact linear algebra over the rationals.

Matrices here are tiny (rank at most 8), so plain Gaussian elimination on
lists of Fractions is fast enough and keeps everything exact.
"""

from fractions import Fraction


def to_fractions(m):
    return [[Fraction(x) for x in row] for row in m]


def transpose(m):
    return [list(col) for col in zip(*m)]


def mat_vec(m, v):
    return [sum(a * b for a, b in zip(row, v)) for row in m]


def vec_mat(v, m):
    n = len(m[0]) if m else 0
    return [sum(v[i] * m[i][j] for i in range(len(v))) for j in range(n)]


def mat_mul(a, b):
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def inverse(m):
    n = len(m)
    a = [list(row) + e for row, e in zip(to_fractions(m), identity(n))]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def rank(m):
    a = to_fractions(m)
    if not a:
        return 0
    rows, cols = len(a), len(a[0])
    r = 0
    for col in range(cols):
        piv = next((i for i in range(r, rows) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, rows):
            if a[i][col] != 0:
                f = a[i][col] / a[r][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return r


def kernel_dim(m):
    """Dimension of the null space of a square matrix."""
    return len(m) - rank(m)
