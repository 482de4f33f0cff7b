from math import gcd
from itertools import combinations

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from ratblowup.homology import (
    GeneratorMap,
    H1Presentation,
    boundary_h1,
    reduce_element,
    smith_normal_form,
    solve_left,
    verify_iso,
)
from ratblowup.links import FramedLink, chain_to_link


def matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def det(M):
    """Integer determinant by Bareiss elimination."""
    a = [list(r) for r in M]
    k, sign, prev = len(a), 1, 1
    for c in range(k - 1):
        piv = next((r for r in range(c, k) if a[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        for r in range(c + 1, k):
            for j in range(c + 1, k):
                a[r][j] = (a[r][j] * a[c][c] - a[r][c] * a[c][j]) // prev
        prev = a[c][c]
    return sign * a[-1][-1] if k else 1


def determinantal_factors(A):
    """Invariant factors from gcds of k x k minors (independent of any elimination)."""
    m, n = len(A), len(A[0])
    ds = [1]
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                g = gcd(g, det([[A[r][c] for c in cols] for r in rows]))
        if g == 0:
            break
        out.append(g // ds[-1])
        ds.append(g)
    return out


def test_snf_identity():
    assert smith_normal_form([[1, 0], [0, 1]]).diagonal == (1, 1)


def test_snf_cn3():
    assert smith_normal_form([[-5, 1], [1, -2]]).diagonal == (1, 9)


def test_snf_bn2():
    assert smith_normal_form([[0, -2], [-2, -3]]).diagonal == (1, 4)


def test_snf_deterministic():
    A = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    assert smith_normal_form(A) == smith_normal_form(A)
    assert smith_normal_form(A).diagonal == (2, 6, 12)


@st.composite
def int_matrices(draw):
    m = draw(st.integers(1, 6))
    n = draw(st.integers(1, 6))
    return [[draw(st.integers(-9, 9)) for _ in range(n)] for _ in range(m)]


@settings(max_examples=150, deadline=None)
@given(int_matrices())
def test_snf_property(A):
    s = smith_normal_form(A)
    U, D, V = [list(map(list, M)) for M in (s.U, s.D, s.V)]
    assert matmul(matmul(U, A), V) == D
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    assert matmul(V, [list(r) for r in s.V_inv]) == [[int(i == j) for j in range(len(V))] for i in range(len(V))]
    m, n = len(A), len(A[0])
    for i in range(m):
        for j in range(n):
            if i != j:
                assert D[i][j] == 0
    diag = s.diagonal
    nonzero = [d for d in diag if d]
    assert all(d > 0 for d in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    assert diag[: len(nonzero)] == tuple(nonzero)
    assert list(nonzero) == determinantal_factors(A)


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_snf_matches_sympy(A):
    from sympy.matrices.normalforms import smith_normal_form as sympy_snf

    ref = sympy_snf(sympy.Matrix(A), domain=sympy.ZZ)
    ref_diag = sorted(abs(int(ref[i, i])) for i in range(min(ref.shape)) if ref[i, i] != 0)
    ours = sorted(d for d in smith_normal_form(A).diagonal if d)
    assert ours == ref_diag


def test_boundary_h1_cn3():
    p = boundary_h1(chain_to_link([-5, -2]))
    assert p.invariant_factors == (9,)
    assert p.order == 9


def test_boundary_h1_bn3():
    link = FramedLink(("K1", "K2"), ((0, -3), (-3, -4)))
    p = boundary_h1(link)
    assert p.order == 9 and p.is_cyclic


def test_lens_n2():
    p = boundary_h1(chain_to_link([1, -1, -2, -2]))
    assert p.invariant_factors == (4,)
    assert p.gen("K4") == p.gen("K2") * 3  # nu_3 = 3 nu_1


def test_reduce_bn3():
    link = FramedLink(("K1", "K2"), ((0, -3), (-3, -4)))
    p = boundary_h1(link, {"K1": "μ1", "K2": "μ2"})
    mu2 = reduce_element(p, [0, 1])
    assert mu2 == p.gen("K1") * 6
    assert mu2 == p.gen("K1") * -3
    assert mu2.coefficient("K1") == 6
    assert reduce_element(p, [0, 0]).is_zero()


def test_reduce_lens3():
    p = boundary_h1(chain_to_link([1, -1, -2, -2, -3], [f"U{i}" for i in range(5)]))
    assert p.gen("U4").coefficient("U1") == 4


def test_reduce_dimension_mismatch():
    p = boundary_h1(chain_to_link([-4]))
    with pytest.raises(ValueError):
        reduce_element(p, [1, 2])


def test_free_part():
    p = H1Presentation(["a", "b"], [[2, 0]])
    assert p.invariant_factors == (2, 0)
    assert p.order is None
    assert p.element([0, 5]) != p.element([0, 3])
    assert p.element([4, 1]) == p.element([0, 1])


def lens(n):
    return boundary_h1(chain_to_link([1, -1] + [-2] * (n - 1) + [-n], [f"U{i}" for i in range(n + 2)]))


def bn(n):
    return boundary_h1(FramedLink(("K1", "K2"), ((0, -n), (-n, -n - 1))))


def test_munu_iso_n3():
    src, dst = bn(3), lens(3)
    gmap = GeneratorMap(src, dst, {"K1": {"U4": 1}, "K2": {"U1": 1, "U4": -1}})
    assert verify_iso(gmap).kind == "iso"


def test_identity_iso():
    p = boundary_h1(chain_to_link([-5, -2]))
    assert verify_iso(GeneratorMap(p, p, [[1, 0], [0, 1]])).ok


def test_not_bijective():
    p = H1Presentation(["g"], [[4]])
    v = verify_iso(GeneratorMap(p, p, [[2]]))
    assert v.kind == "not-bijective"
    assert v.witness is not None


def test_not_well_defined():
    a = H1Presentation(["g"], [[4]])
    b = H1Presentation(["h"], [[3]])
    v = verify_iso(GeneratorMap(a, b, [[1]]))
    assert v.kind == "not-well-defined"
    assert v.witness == 0


def test_not_injective_witness():
    a = H1Presentation(["g"], [[4]])
    b = H1Presentation(["h"], [[2]])
    v = verify_iso(GeneratorMap(a, b, [[1]]))
    assert v.kind == "not-bijective"
    assert not v.witness.is_zero()
    assert GeneratorMap(a, b, [[1]]).apply(v.witness).is_zero()


def test_inverse_round_trip():
    for n in range(2, 9):
        src, dst = bn(n), lens(n)
        last = f"U{n + 1}"
        gmap = GeneratorMap(src, dst, {"K1": {last: 1}, "K2": {"U1": 1, last: -1}})
        inv = gmap.inverse()
        assert inv.verify().ok
        for g in src.generators:
            assert inv.apply(gmap.apply(src.gen(g))) == src.gen(g)


def test_solve_left():
    B = [[2, 0], [0, 3]]
    assert solve_left(B, [4, 9]) == [2, 3]
    assert solve_left(B, [1, 0]) is None


@pytest.mark.parametrize("n", range(2, 51))
def test_orders(n):
    assert bn(n).invariant_factors == (n * n,)
    assert lens(n).invariant_factors == (n * n,)
    cn = boundary_h1(chain_to_link([-(n + 2)] + [-2] * (n - 2)))
    assert cn.invariant_factors == (n * n,)


def test_order_matches_determinant():
    for link in (chain_to_link([-7, -2, -3]), FramedLink(("a", "b"), ((2, 3), (3, -1)))):
        assert boundary_h1(link).order == abs(link.determinant())
