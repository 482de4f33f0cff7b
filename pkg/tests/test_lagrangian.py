import math

import pytest
from scipy.integrate import quad

from ratblowup import lagrangian as lg

PI = math.pi


def close(p, want, tol=1e-12):
    return lg.Point4(*want).distance(p) < tol


def test_point4_wraps():
    p = lg.Point4(3 * PI, 0, -PI / 2, 0)
    assert p.theta == pytest.approx(PI)
    assert p.tau == pytest.approx(3 * PI / 2)
    assert lg.Point4(0, 0, 0, 0).distance(lg.Point4(2 * PI - 1e-14, 0, 0, 0)) < 1e-13


@pytest.mark.parametrize(
    "n, q, t, I, want",
    [
        (3, 1, 0.0, 0.0, (0, 0, 0, 0)),
        (3, 1, PI / 2, 0.1, (3 * PI / 2, -0.1 / 3, PI / 2, 0.1)),
        (2, 1, PI, 0.2, (0, -0.1, PI, 0.2)),
    ],
)
def test_sigma_sharp(n, q, t, I, want):
    assert close(lg.sigma_sharp(n, q)(t, I), want)


def test_sigma_sharp_domain():
    with pytest.raises(lg.DomainError):
        lg.sigma_sharp(3, 1)(0.0, 0.3)
    with pytest.raises(lg.DomainError):
        lg.sigma_sharp(3, 1)(2 * PI, 0.1)


def test_sigma_general_linear_is_sharp():
    for n in (2, 3, 5):
        s = lg.sigma_general(lg.ImmersionModel(n, 1, "linear"))
        for t, I in [(0.3, 0.05), (4.0, 0.2)]:
            assert s(t, I).distance(lg.sigma_sharp(n, 1)(t, I)) < 1e-14


def test_sigma_general_isin():
    s = lg.sigma_general(lg.ImmersionModel(2, 1, "isin"))
    assert s(PI / 2, 0.1).x == pytest.approx(-0.05, abs=1e-12)


def test_sigma_general_isin_antiderivative():
    # closed form: x = -(1/n) I (1 + I cos t) + (1/n) (I^2/2) cos t
    n, t, I = 3, 1.1, 0.17
    s = lg.sigma_general(lg.ImmersionModel(n, 1, "isin"))
    want = -(I * (1 + I * math.cos(t))) / n + (I * I / 2) * math.cos(t) / n
    assert s(t, I).x == pytest.approx(want, abs=1e-12)


def test_sigma_general_at_zero():
    s = lg.sigma_general(lg.ImmersionModel(3, 1, "isin"))
    assert close(s(1.0, 0.0), (3.0, 0, 1.0, 0))


def test_winding_condition():
    with pytest.raises(ValueError):
        lg.ImmersionModel(3, 1, lg.Psi("bad", lambda bk, t, I, q: 0.5 * t, None, None))


def test_lagrangian_sharp():
    worst = max(lg.lagrangian_defect(lg.sigma_sharp(n, q)) for n in range(2, 7) for q in range(1, n))
    assert worst < 1e-9


def test_lagrangian_general():
    assert lg.lagrangian_defect(lg.sigma_general(lg.ImmersionModel(2, 1, "isin"))) < 1e-6


def test_lagrangian_control():
    assert abs(lg.lagrangian_defect(lg.control_surface()) - 2) < 1e-9


def test_q2_needs_reciprocal_form():
    m = lg.ImmersionModel(3, 2, "isin", grid=lg.SurfaceGrid(8, 4))
    assert lg.lagrangian_defect(lg.sigma_general(m, "lagrangian"), m.grid) < 1e-6
    assert lg.lagrangian_defect(lg.sigma_general(m, "scaled"), m.grid) > 1e-3


def test_flow_alpha_zero_identity():
    F = lg.flow_phi(lg.FlowModel("rsin"), 0.0)
    p = (1.0, 0.3, 2.0, 0.1)
    assert lg.Point4(*p).distance(F(p)) == 0


def test_flow_const():
    F = lg.flow_phi(lg.FlowModel("const"), 0.5)
    assert close(F((1.0, 0.3, 2.0, 0.1)), (1.0, 0.3, 2.35, 0.1))


def test_flow_rsin_hand_value():
    F = lg.flow_phi(lg.FlowModel("rsin"), 1.0)
    assert close(F((0, 0, 0, 1)), (0, -0.5, 0, 1))


def test_ham_H_against_scipy():
    H = lg.ham_H(lg.FlowModel("r2cos"))
    th, r = 0.7, 0.15
    want = quad(lambda s: s * s * math.cos(th), 0, r)[0]
    assert H((th, 0, 0, r)) == pytest.approx(want, abs=1e-14)
    assert want == pytest.approx(r**3 / 3 * math.cos(th))


def test_identity_symplecto():
    # finite differences of the identity are exact up to roundoff
    assert lg.symplecto_defect(lg.identity_map()) < 1e-9


def test_scaling_control():
    assert abs(lg.symplecto_defect(lg.scaling_control()) - 1) < 1e-6


@pytest.mark.parametrize("name", ["const", "rsin", "r2cos"])
def test_flow_defects(name):
    fm = lg.FlowModel(name)
    assert lg.symplecto_defect(lg.flow_phi(fm)) < 1e-6
    assert lg.flow_eq_defect(fm) < 1e-6


def test_flow_halving_mp():
    fm = lg.FlowModel("rsin")
    g = lg.PhaseGrid(3, 3, 0.2, (0.1,), (0.5,))
    c = lg.fd_convergence(lambda bk, h: lg.symplecto_defect(lg.flow_phi(fm), g, h, bk))
    assert c.ok
    c = lg.fd_convergence(lambda bk, h: lg.flow_eq_defect(fm, g, h, (0.5,), bk))
    assert c.ok and not c.exact and c.ratio > 3.5


def test_lagrangian_halving_mp():
    m = lg.ImmersionModel(2, 1, "isin")
    c = lg.fd_convergence(lambda bk, h: lg.lagrangian_defect(lg.sigma_general(m), lg.SurfaceGrid(4, 3), h, bk))
    assert c.ok


def test_convergence_logic():
    assert lg.Convergence(1e-5, 4e-10, 1e-10, 1e-30).ok
    assert not lg.Convergence(1e-5, 2e-10, 1e-10, 1e-30).ok
    assert lg.Convergence(1e-5, 0.0, 0.0, 1e-30).exact


@pytest.mark.parametrize("psi", ["linear", "isin", "sin"])
@pytest.mark.parametrize("n", [2, 3, 5])
def test_cover_identity(psi, n):
    m = lg.ImmersionModel(n, 1, psi, grid=lg.SurfaceGrid(16, 8))
    assert lg.cover_identity_defect(m) < 1e-6


@pytest.mark.parametrize("alpha", [0, 0.25, 0.5, 0.75, 1])
def test_tau_winding(alpha):
    assert lg.tau_winding(lg.ImmersionModel(3, 1, "isin"), alpha) == pytest.approx(1.0, abs=1e-9)


def test_legendrian():
    assert lg.legendrian_defect(3, 0.01) < 1e-12
    with pytest.raises(ValueError):
        lg.legendrian_defect(3, 0)


def test_legendrian_tangent_by_differences():
    n, a, h = 4, 0.02, 1e-6
    K = lg.knot_k(n, a)
    for t in (0.1, 1.3, 5.0):
        p0, p1, p = K(t - h), K(t + h), K(t)
        dth = math.remainder(p1.theta - p0.theta, 2 * PI) / (2 * h)
        dtau = math.remainder(p1.tau - p0.tau, 2 * PI) / (2 * h)
        assert abs(-p.x * dth - p.rho * dtau) < 1e-9


def _fd_pullback(a, r, h=1e-6):
    """alpha/rho pulled back along the stereographic change, by differences."""
    change = lg.stereo_change(a)
    th, w = 0.4, 0.9
    _, x, _, rho = change(th, r, w)

    def d(axis):
        args = [th, r, w]
        lo, hi = list(args), list(args)
        lo[axis] -= h
        hi[axis] += h
        return [(u - v) / (2 * h) for u, v in zip(change(*hi), change(*lo))]

    out = []
    for axis in range(3):
        dth, _, dtau, _ = d(axis)
        out.append((-x * dth - rho * dtau) / rho)
    return out


@pytest.mark.parametrize("r", [0.1, 0.5, 1.0, 3.0, 10.0])
def test_stereo_against_differences(r):
    a = 1.0
    want = [(1 - r**4) / (2 * a * r * r), 0.0, 1.0]
    assert _fd_pullback(a, r) == pytest.approx(want, abs=1e-6)


def test_stereo_identity():
    assert lg.stereo_identity_defect(1.0) < 1e-10
    assert lg.sphere_constraint_defect(1.0) < 1e-12


def test_stereo_plus_one_denominator_fails():
    assert lg.sphere_constraint_defect(1.0, "plus_one") > 1.0
