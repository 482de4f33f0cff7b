import pytest
from hypothesis import given, strategies as st

from ratblowup import fixtures
from ratblowup.kirby import (
    BlowDown,
    BlowUp,
    MoveError,
    Relabel,
    Slide,
    TrackedLink,
    blow_down,
    blow_up,
    parse_script,
    run_script,
    slide,
)
from ratblowup.links import FramedLink, chain_to_link, parse_link


def test_blow_down_chain():
    link = chain_to_link([3, -1, 2], ["A", "B", "C"])
    assert blow_down(link, "B") == parse_link("comp A 4\ncomp C 3\nlk A C 1")


def test_blow_down_needs_unit():
    with pytest.raises(MoveError):
        blow_down(chain_to_link([2]), "K1")


def test_blow_up_unlinked():
    link = blow_up(chain_to_link([-3], ["A"]), "E", 1)
    assert link.matrix == ((-3, 0), (0, 1))


def test_blow_up_linking():
    link = blow_up(chain_to_link([-3], ["A"]), "E", -1, {"A": 2})
    assert link.matrix == ((-7, 2), (2, -1))


def test_slide_framing():
    link = chain_to_link([-5, -2], ["a", "b"])
    assert slide(link, "a", "b", 1).matrix == ((-5, -1), (-1, -2))
    assert slide(link, "a", "b", -1).matrix == ((-9, 3), (3, -2))


def test_slide_self():
    with pytest.raises(MoveError):
        slide(chain_to_link([1, 1]), "K1", "K1", 1)


@st.composite
def sym(draw):
    k = draw(st.integers(2, 5))
    m = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            m[i][j] = m[j][i] = draw(st.integers(-6, 6))
    return FramedLink(tuple(f"K{i}" for i in range(k)), tuple(map(tuple, m)))


@given(sym(), st.data())
def test_slide_is_congruence(link, data):
    k = len(link)
    i = data.draw(st.integers(0, k - 1))
    j = data.draw(st.integers(0, k - 1).filter(lambda x: x != i))
    s = data.draw(st.sampled_from([1, -1]))
    # row/column operation Q' = P Q P^T with P = I + s e_i e_j^T
    P = [[int(a == b) for b in range(k)] for a in range(k)]
    P[i][j] += s
    Q = link.matrix
    want = [[sum(P[a][x] * Q[x][y] * P[b][y] for x in range(k) for y in range(k)) for b in range(k)] for a in range(k)]
    assert [list(r) for r in slide(link, link.labels[i], link.labels[j], s).matrix] == want


@given(sym(), st.data())
def test_blow_down_inverts_blow_up(link, data):
    sign = data.draw(st.sampled_from([1, -1]))
    targets = {lab: data.draw(st.integers(-2, 2)) for lab in link.labels}
    assert blow_down(blow_up(link, "E", sign, targets), "E") == link


@given(sym(), st.data())
def test_tracked_moves_keep_group(link, data):
    if link.determinant() == 0:
        return
    tl = TrackedLink.start(link)
    sign = data.draw(st.sampled_from([1, -1]))
    a, b = link.labels[0], link.labels[1]
    moves = [BlowUp("E", sign, ((a, 1), (b, data.draw(st.integers(-2, 2))))), Slide(a, "E", sign), Slide("E", b, -sign), BlowDown("E")]
    try:
        end = run_script(tl, moves)
    except MoveError as exc:
        # only the final blow-down may be illegal, when E's framing drifted from +-1
        assert exc.step == 4
        return
    assert end.presentation().invariant_factors == tl.origin.invariant_factors


def test_empty_script():
    tl = TrackedLink.start(chain_to_link([-5, -2]))
    assert run_script(tl, []) is tl


def test_error_reports_step():
    tl = TrackedLink.start(chain_to_link([-5, -2], ["a", "b"]))
    with pytest.raises(MoveError) as err:
        run_script(tl, [Relabel("a", "c"), BlowDown("b")])
    assert err.value.step == 2


def test_parse_script_round_trip():
    text = "comp A 0\ndot A\ncomp B -3\nlk A B 2\nsurger A\nblowup E - A:1 B:-1\nslide E A +\nrelabel E F\n"
    sc = parse_script(text)
    assert [str(m) for m in sc.moves] == ["surger A", "blowup E - A:1 B:-1", "slide E A +", "relabel E F"]
    end = run_script(sc)
    assert end.link.labels == ("A", "B", "F")


def test_bad_sign():
    with pytest.raises(Exception) as err:
        parse_script("comp A 1\nslide A A x\n")
    assert "expected + or -" in str(err.value)


def test_tracked_class_bn_to_cn_n3():
    end = run_script(fixtures.load_script("bn_to_cn", 3))
    assert end.describe_class("W1") == "μ1 + μ2"
    assert end.describe_class("W2") == "2μ1 + μ2"


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_bn_to_lens_endpoint(n):
    end = run_script(fixtures.load_script("bn_to_lens", n))
    order = [f"U{n + 1}"] + [f"U{k}" for k in range(n, 0, -1)]
    assert end.link.reorder(order) == chain_to_link([n] + [2] * n, order, link_sign=-1)
