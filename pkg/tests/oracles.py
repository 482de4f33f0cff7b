"""Independent reference computations used by the tests.

These avoid the package's Smith normal form entirely.  For a nonsingular
symmetric linking matrix Q, v lies in the relation lattice iff Q^{-1} v is
integral; solves use exact rationals.
"""

from fractions import Fraction


def solve(matrix, v):
    """y with Q y = v, by Gaussian elimination over the rationals.

    Rows are kept sparse, so banded matrices such as plumbing chains cost
    linear time.
    """
    k = len(matrix)
    rows = [{j: Fraction(x) for j, x in enumerate(r) if x} for r in matrix]
    rhs = [Fraction(x) for x in v]
    for c in range(k):
        piv = next(r for r in range(c, k) if rows[r].get(c))
        rows[c], rows[piv] = rows[piv], rows[c]
        rhs[c], rhs[piv] = rhs[piv], rhs[c]
        pr, pv = rows[c], rows[c][c]
        for r in range(c + 1, k):
            f = rows[r].get(c)
            if not f:
                continue
            f = f / pv
            for j, x in pr.items():
                y = rows[r].get(j, 0) - f * x
                if y:
                    rows[r][j] = y
                else:
                    rows[r].pop(j, None)
            rhs[r] -= f * rhs[c]
    y = [Fraction(0)] * k
    for c in range(k - 1, -1, -1):
        acc = rhs[c] - sum(x * y[j] for j, x in rows[c].items() if j > c)
        y[c] = acc / rows[c][c]
    return y


def in_lattice(matrix, v):
    return all(x.denominator == 1 for x in solve(matrix, v))


def coefficient(matrix, v, index, order):
    """The c in [0, order) with v = c * e_index modulo the rows of Q, or None."""
    w = solve(matrix, v)
    e = [0] * len(matrix)
    e[index] = 1
    u = solve(matrix, e)
    for c in range(order):
        if all((x - c * y).denominator == 1 for x, y in zip(w, u)):
            return c
    return None


def rho(matrix, rots, l0, members):
    """(rot_i + lk(K_i, L0 + S)) / 2 with the diagonal as self-linking."""
    out = []
    for i, row in enumerate(matrix):
        total = rots[i] + sum(row[j] for j in l0) + sum(row[j] for j in members)
        assert total % 2 == 0
        out.append(total // 2)
    return out


def char_sublinks_bruteforce(matrix):
    k = len(matrix)
    out = []
    for mask in range(1 << k):
        x = [(mask >> (k - 1 - i)) & 1 for i in range(k)]
        if all((sum(matrix[i][j] * x[j] for j in range(k)) - matrix[i][i]) % 2 == 0 for i in range(k)):
            out.append(tuple(x))
    return sorted(out)
