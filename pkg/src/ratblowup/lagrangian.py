"""Numeric checks of the collar model of the Lagrangian core.

Coordinates are (theta, x, tau, rho) with omega = dtheta^dx + dtau^drho and
contact form alpha = -x dtheta - rho dtau.  Everything here is a
floating-point verification of identities that hold exactly; the defects
returned are maxima over sample grids.

Two numeric backends are available: ``FLOAT`` (math + scipy quadrature) and
``MP`` (mpmath at 40 digits with Gauss-Legendre quadrature).  The second one
exists for finite-difference convergence studies, where double precision
roundoff swamps the O(h^2) truncation error long before h = 1e-5.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy import integrate

__all__ = [
    "FLOAT",
    "MP",
    "QuadratureError",
    "DomainError",
    "Point4",
    "SurfaceGrid",
    "PhaseGrid",
    "Psi",
    "PSI_CATALOG",
    "FlowFunction",
    "FLOW_CATALOG",
    "ImmersionModel",
    "FlowModel",
    "Surface",
    "Map4",
    "sigma_sharp",
    "sigma_general",
    "control_surface",
    "omega",
    "lagrangian_defect",
    "flow_phi",
    "ham_H",
    "identity_map",
    "scaling_control",
    "symplecto_defect",
    "flow_eq_defect",
    "cover_identity_defect",
    "tau_winding",
    "knot_k",
    "legendrian_defect",
    "knot_level_set",
    "stereo_change",
    "stereo_identity_defect",
    "sphere_constraint_defect",
    "Convergence",
    "fd_convergence",
]

TWO_PI = 2 * math.pi


class QuadratureError(ArithmeticError):
    pass


class DomainError(ValueError):
    pass


# --------------------------------------------------------------------------
# Backends
# --------------------------------------------------------------------------


class _FloatBackend:
    name = "float"
    sin = staticmethod(math.sin)
    cos = staticmethod(math.cos)
    pi = math.pi

    @staticmethod
    def num(v):
        return float(v)

    @staticmethod
    def quad(f, a, b, epsabs=1e-10):
        if a == b:
            return 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, err = integrate.quad(f, a, b, epsabs=epsabs, epsrel=1e-12, limit=200)
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {exc}") from None
        if err > 10 * epsabs:
            raise QuadratureError(f"quadrature error estimate {err:.3g} above tolerance")
        return val


class _MPBackend:
    name = "mp"
    sin = staticmethod(mpmath.sin)
    cos = staticmethod(mpmath.cos)
    dps = 40

    @property
    def pi(self):
        return mpmath.mp.pi

    @staticmethod
    def num(v):
        return mpmath.mpf(v) if not isinstance(v, str) else mpmath.mpf(v)

    @staticmethod
    def quad(f, a, b, epsabs=None):
        if a == b:
            return mpmath.mpf(0)
        return mpmath.quad(f, [a, b], method="gauss-legendre")


FLOAT = _FloatBackend()
MP = _MPBackend()


# --------------------------------------------------------------------------
# Points and grids
# --------------------------------------------------------------------------


def _wrap(a: float) -> float:
    r = math.fmod(a, TWO_PI)
    if r < 0:
        r += TWO_PI
    # fmod can return exactly 2*pi after the correction for tiny negatives
    return 0.0 if r >= TWO_PI else r


def _angle_diff(a: float, b: float) -> float:
    """a - b reduced to (-pi, pi]."""
    d = math.remainder(a - b, TWO_PI)
    return d


@dataclass(frozen=True)
class Point4:
    theta: float
    x: float
    tau: float
    rho: float

    def __post_init__(self):
        object.__setattr__(self, "theta", _wrap(float(self.theta)))
        object.__setattr__(self, "tau", _wrap(float(self.tau)))
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "rho", float(self.rho))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.theta, self.x, self.tau, self.rho)

    def distance(self, other: "Point4") -> float:
        return max(
            abs(_angle_diff(self.theta, other.theta)),
            abs(self.x - other.x),
            abs(_angle_diff(self.tau, other.tau)),
            abs(self.rho - other.rho),
        )


@dataclass(frozen=True)
class SurfaceGrid:
    """Samples t in [0, 2pi) and I in [0, eps]."""

    nt: int = 64
    nI: int = 32
    eps: float = 0.2

    def points(self, bk=FLOAT):
        two_pi = 2 * bk.pi
        for i in range(self.nt):
            t = two_pi * bk.num(i) / self.nt
            for j in range(self.nI):
                yield t, bk.num(self.eps) * j / max(self.nI - 1, 1)


@dataclass(frozen=True)
class PhaseGrid:
    """Samples of (theta, x, tau, rho) with rho in [0, rho_max]."""

    ntheta: int = 16
    nrho: int = 8
    rho_max: float = 0.2
    xs: tuple[float, ...] = (-0.1, 0.1)
    taus: tuple[float, ...] = (0.0, 1.0)

    def points(self, bk=FLOAT):
        for i in range(self.ntheta):
            th = 2 * bk.pi * bk.num(i) / self.ntheta
            for j in range(self.nrho):
                rho = bk.num(self.rho_max) * j / max(self.nrho - 1, 1)
                for x in self.xs:
                    for tau in self.taus:
                        yield (th, bk.num(x), bk.num(tau), rho)


# --------------------------------------------------------------------------
# Catalogs: psi(t, I) with psi(2pi, I) - psi(0, I) = 2pi q, and flow functions f(theta, rho)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Psi:
    """psi and the two partials the collar formula needs; callables take (bk, t, I, q)."""

    name: str
    psi: Callable
    psi_t: Callable
    psi_tI: Callable
    doc: str = ""


PSI_CATALOG = {
    "linear": Psi(
        "linear",
        lambda bk, t, I, q: q * t,
        lambda bk, t, I, q: q + 0 * t,
        lambda bk, t, I, q: 0 * t,
        "q t",
    ),
    "isin": Psi(
        "isin",
        lambda bk, t, I, q: q * t + I * bk.sin(t),
        lambda bk, t, I, q: q + I * bk.cos(t),
        lambda bk, t, I, q: bk.cos(t),
        "q t + I sin t",
    ),
    "sin": Psi(
        "sin",
        lambda bk, t, I, q: q * t + bk.num("0.3") * bk.sin(t),
        lambda bk, t, I, q: q + bk.num("0.3") * bk.cos(t),
        lambda bk, t, I, q: 0 * t,
        "q t + 0.3 sin t",
    ),
    "i2sin2": Psi(
        "i2sin2",
        lambda bk, t, I, q: q * t + I * I * bk.sin(2 * t),
        lambda bk, t, I, q: q + 2 * I * I * bk.cos(2 * t),
        lambda bk, t, I, q: 4 * I * bk.cos(2 * t),
        "q t + I^2 sin 2t",
    ),
}


@dataclass(frozen=True)
class FlowFunction:
    """f(theta, rho) with f_theta and f_theta_rho; callables take (bk, theta, rho)."""

    name: str
    f: Callable
    f_th: Callable
    f_thr: Callable
    doc: str = ""


FLOW_CATALOG = {
    "const": FlowFunction(
        "const",
        lambda bk, th, r: bk.num("0.7") + 0 * r,
        lambda bk, th, r: 0 * r,
        lambda bk, th, r: 0 * r,
        "0.7",
    ),
    "rsin": FlowFunction(
        "rsin",
        lambda bk, th, r: r * bk.sin(th),
        lambda bk, th, r: r * bk.cos(th),
        lambda bk, th, r: bk.cos(th),
        "rho sin theta",
    ),
    "r2cos": FlowFunction(
        "r2cos",
        lambda bk, th, r: r * r * bk.cos(th),
        lambda bk, th, r: -r * r * bk.sin(th),
        lambda bk, th, r: -2 * r * bk.sin(th),
        "rho^2 cos theta",
    ),
}


def _lookup(catalog, key, what):
    if not isinstance(key, str):
        return key
    try:
        return catalog[key]
    except KeyError:
        raise ValueError(f"unknown {what} {key!r}; choose from {', '.join(catalog)}") from None


# --------------------------------------------------------------------------
# Models
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ImmersionModel:
    n: int
    q: int = 1
    psi: Psi | str = "linear"
    eps: float = 0.2
    grid: SurfaceGrid = field(default_factory=SurfaceGrid)

    def __post_init__(self):
        object.__setattr__(self, "psi", _lookup(PSI_CATALOG, self.psi, "psi"))
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        for j in range(5):
            I = self.eps * j / 4
            wind = self.psi.psi(FLOAT, TWO_PI, I, self.q) - self.psi.psi(FLOAT, 0.0, I, self.q)
            if abs(wind - TWO_PI * self.q) > 1e-9:
                raise ValueError(f"psi {self.psi.name} winds {wind / TWO_PI:.6g} times, expected {self.q}")


@dataclass(frozen=True)
class FlowModel:
    f: FlowFunction | str
    alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "f", _lookup(FLOW_CATALOG, self.f, "flow function"))

    @classmethod
    def from_psi(cls, model: ImmersionModel, alpha: float = 1.0) -> "FlowModel":
        """f(theta, rho) = psi(theta/n, rho) - q theta/n, living on the n-fold cover."""
        n, q, psi = model.n, model.q, model.psi
        ff = FlowFunction(
            f"cover[{psi.name}]",
            lambda bk, th, r: psi.psi(bk, th / n, r, q) - q * th / n,
            lambda bk, th, r: (psi.psi_t(bk, th / n, r, q) - q) / n,
            lambda bk, th, r: psi.psi_tI(bk, th / n, r, q) / n,
        )
        return cls(ff, alpha)


class Surface:
    """(t, I) -> Point4.  ``raw`` skips the domain check and angle wrapping."""

    def __init__(self, raw: Callable, eps: float = 0.2, name: str = ""):
        self._raw = raw
        self.eps = eps
        self.name = name

    def raw(self, t, I, bk=FLOAT):
        return self._raw(bk, t, I)

    def __call__(self, t: float, I: float) -> Point4:
        if not (0 <= t < TWO_PI):
            raise DomainError(f"t = {t} outside [0, 2pi)")
        if not (0 <= I <= self.eps):
            raise DomainError(f"I = {I} outside [0, {self.eps}]")
        return Point4(*self._raw(FLOAT, t, I))


class Map4:
    """(theta, x, tau, rho) -> (theta, x, tau, rho)."""

    def __init__(self, raw: Callable, name: str = ""):
        self._raw = raw
        self.name = name

    def raw(self, p, bk=FLOAT):
        return self._raw(bk, p)

    def __call__(self, p: Point4 | Sequence[float]) -> Point4:
        if isinstance(p, Point4):
            p = p.as_tuple()
        return Point4(*self._raw(FLOAT, tuple(p)))


def sigma_sharp(n: int, q: int, eps: float = 0.2) -> Surface:
    return Surface(lambda bk, t, I: (n * t, -q * I / n, q * t, I), eps, f"sigma_sharp({n},{q})")


def sigma_general(model: ImmersionModel, form: str = "scaled") -> Surface:
    """The collar Sigma_{n,q}.

    form="scaled":     x = -(q/n) I psi_t + int_0^I (q/n) s psi_tI(t, s) ds
    form="lagrangian": x = -(1/n) I psi_t + int_0^I (1/n) s psi_tI(t, s) ds
    The two agree for q = 1; only the second is Lagrangian for q > 1.
    """
    if form not in ("scaled", "lagrangian"):
        raise ValueError("form must be 'scaled' or 'lagrangian'")
    n, q, psi = model.n, model.q, model.psi

    def raw(bk, t, I):
        c = q if form == "scaled" else 1
        integral = bk.quad(lambda s: s * psi.psi_tI(bk, t, s, q), 0, I)
        x = c * (-I * psi.psi_t(bk, t, I, q) + integral) / n
        return (n * t, x, psi.psi(bk, t, I, q), I)

    return Surface(raw, model.eps, f"sigma[{psi.name}, {form}]")


def control_surface(eps: float = 0.2) -> Surface:
    """(t, I, t, I): omega(d_t, d_I) = 2 everywhere."""
    return Surface(lambda bk, t, I: (t, I, t, I), eps, "control")


# --------------------------------------------------------------------------
# Defects
# --------------------------------------------------------------------------


def omega(u, v):
    return u[0] * v[1] - u[1] * v[0] + u[2] * v[3] - u[3] * v[2]


def _num(v) -> float:
    return float(v)


def lagrangian_defect(surface: Surface, grid: SurfaceGrid | None = None, h: float = 1e-5, bk=FLOAT) -> float:
    """max |omega(d_t Sigma, d_I Sigma)| over the grid, by central differences."""
    grid = grid or SurfaceGrid(eps=surface.eps)
    h = bk.num(h)
    worst = 0.0
    for t, I in grid.points(bk):
        a, b = surface.raw(t + h, I, bk), surface.raw(t - h, I, bk)
        c, d = surface.raw(t, I + h, bk), surface.raw(t, I - h, bk)
        dt = [(x - y) / (2 * h) for x, y in zip(a, b)]
        dI = [(x - y) / (2 * h) for x, y in zip(c, d)]
        worst = max(worst, abs(_num(omega(dt, dI))))
    return worst


def _x_shift(bk, fm: FlowFunction, th, r):
    """f_theta(theta, rho) rho - int_0^rho f_theta_rho(theta, s) s ds."""
    return fm.f_th(bk, th, r) * r - bk.quad(lambda s: fm.f_thr(bk, th, s) * s, 0, r)


def flow_phi(model: FlowModel, alpha: float | None = None) -> Map4:
    fm = model.f
    a = model.alpha if alpha is None else alpha

    def raw(bk, p):
        th, x, tau, r = p
        al = bk.num(a)
        return (th, x - al * _x_shift(bk, fm, th, r), tau + al * fm.f(bk, th, r), r)

    return Map4(raw, f"phi[{fm.name}, alpha={a}]")


def ham_H(model: FlowModel) -> Callable:
    """H(theta, x, tau, rho) = int_0^rho f(theta, s) ds."""
    fm = model.f

    def H(p, bk=FLOAT):
        if isinstance(p, Point4):
            p = p.as_tuple()
        th, _, _, r = p
        return bk.quad(lambda s: fm.f(bk, th, s), 0, r)

    return H


def identity_map() -> Map4:
    return Map4(lambda bk, p: tuple(p), "identity")


def scaling_control() -> Map4:
    """(theta, 2x, tau, rho): the pullback doubles dtheta^dx."""
    return Map4(lambda bk, p: (p[0], 2 * p[1], p[2], p[3]), "scaling")


def _jacobian(F: Map4, p, h, bk):
    cols = []
    for k in range(4):
        up = list(p)
        dn = list(p)
        up[k] += h
        dn[k] -= h
        a, b = F.raw(tuple(up), bk), F.raw(tuple(dn), bk)
        cols.append([(x - y) / (2 * h) for x, y in zip(a, b)])
    return cols  # cols[k] = dF/dp_k


def symplecto_defect(F: Map4, grid: PhaseGrid | None = None, h: float = 1e-5, bk=FLOAT) -> float:
    """max |F^*omega - omega| over the grid, entrywise on coordinate pairs."""
    grid = grid or PhaseGrid()
    h = bk.num(h)
    std = [[omega(e_i, e_j) for e_j in np.eye(4)] for e_i in np.eye(4)]
    worst = 0.0
    for p in grid.points(bk):
        J = _jacobian(F, p, h, bk)
        for i in range(4):
            for j in range(i + 1, 4):
                worst = max(worst, abs(_num(omega(J[i], J[j])) - std[i][j]))
    return worst


def flow_eq_defect(
    model: FlowModel,
    grid: PhaseGrid | None = None,
    h: float = 1e-5,
    alphas: Sequence[float] = (0.25, 0.5, 0.75),
    bk=FLOAT,
) -> float:
    """max |d/dalpha phi_alpha - X_H(phi_alpha)| with X_H = (H_x, -H_theta, H_rho, -H_tau)."""
    grid = grid or PhaseGrid()
    h = bk.num(h)
    H = ham_H(model)
    worst = 0.0
    for p in grid.points(bk):
        for al in alphas:
            al = bk.num(al)
            a = flow_phi(model, al + h).raw(p, bk)
            b = flow_phi(model, al - h).raw(p, bk)
            dphi = [(u - v) / (2 * h) for u, v in zip(a, b)]
            q = flow_phi(model, al).raw(p, bk)
            grad = []
            for k in range(4):
                up = list(q)
                dn = list(q)
                up[k] += h
                dn[k] -= h
                grad.append((H(tuple(up), bk) - H(tuple(dn), bk)) / (2 * h))
            X = (grad[1], -grad[0], grad[3], -grad[2])
            worst = max(worst, max(abs(_num(u - v)) for u, v in zip(dphi, X)))
    return worst


def _cover_lift(model: ImmersionModel, bk, t, I):
    """Sigma_sharp on the n-fold cover: theta = n t is not reduced."""
    n, q = model.n, model.q
    return (n * t, -q * I / n, q * t, I)


def cover_identity_defect(model: ImmersionModel, form: str = "scaled", grid: SurfaceGrid | None = None) -> float:
    """max distance between p_n(phi_1(lifted Sigma_sharp)) and Sigma_{n,q}."""
    grid = grid or model.grid
    phi = flow_phi(FlowModel.from_psi(model), 1.0)
    target = sigma_general(model, form)
    worst = 0.0
    for t, I in grid.points():
        lhs = Point4(*phi.raw(_cover_lift(model, FLOAT, t, I)))
        rhs = Point4(*target.raw(t, I))
        worst = max(worst, lhs.distance(rhs))
    return worst


def tau_winding(model: ImmersionModel, alpha: float, I: float | None = None, samples: int = 512) -> float:
    """Winding of the tau-component of p_n phi_alpha (lifted Sigma_sharp) over t in [0, 2pi], in turns."""
    I = model.eps / 2 if I is None else I
    phi = flow_phi(FlowModel.from_psi(model), alpha)
    total = 0.0
    prev = None
    for k in range(samples + 1):
        t = TWO_PI * k / samples
        tau = _wrap(phi.raw(_cover_lift(model, FLOAT, t, I))[2])
        if prev is not None:
            total += _angle_diff(tau, prev)
        prev = tau
    return total / TWO_PI


# --------------------------------------------------------------------------
# Legendrian knot and stereographic coordinates
# --------------------------------------------------------------------------


def knot_k(n: int, a: float) -> Callable[[float], Point4]:
    """K_{n,1}(t) = (n t, -a/n, t, a)."""
    return lambda t: Point4(n * t, -a / n, t, a)


def legendrian_defect(n: int, a: float, samples: int = 256) -> float:
    """max |alpha(K')| along K_{n,1}, alpha = -x dtheta - rho dtau."""
    if a <= 0:
        raise ValueError("a must be positive")
    K = knot_k(n, a)
    tangent = (n, 0.0, 1.0, 0.0)
    worst = 0.0
    for k in range(samples):
        p = K(TWO_PI * k / samples)
        worst = max(worst, abs(-p.x * tangent[0] - p.rho * tangent[2]))
    return worst


def knot_level_set(n: int, a: float) -> float:
    """x^2 + 2 rho on K_{n,1} (constant)."""
    return (a / n) ** 2 + 2 * a


def stereo_change(a: float, variant: str = "corrected") -> Callable:
    """(theta, r, varpi) -> (theta, x, tau, rho).

    variant="plus_one" uses (r + 1)^2 in the denominator of rho.
    """
    if variant not in ("corrected", "plus_one"):
        raise ValueError("variant must be 'corrected' or 'plus_one'")

    def change(th, r, w):
        x = a * (r * r - 1) / (r * r + 1)
        den = (r * r + 1) ** 2 if variant == "corrected" else (r + 1) ** 2
        rho = 2 * a * a * r * r / den
        return (th, x, -w, rho)

    return change


def _radii(rs):
    return np.geomspace(0.1, 10.0, 201) if rs is None else np.asarray(rs, dtype=float)


def stereo_identity_defect(a: float, rs: Sequence[float] | None = None, variant: str = "corrected") -> float:
    """max deviation of alpha/rho, pulled back to (theta, r, varpi), from
    dvarpi + (1 - r^4)/(2 a r^2) dtheta."""
    change = stereo_change(a, variant)
    worst = 0.0
    for r in _radii(rs):
        _, x, _, rho = change(0.0, r, 0.0)
        # Jacobian columns of the change in the (theta, r, varpi) directions
        # paired with alpha = -x dtheta - rho dtau; x and rho depend on r only,
        # and alpha has no dx or drho part, so the r-coefficient vanishes.
        coeff = (-x * 1.0, 0.0, -rho * -1.0)
        pulled = tuple(c / rho for c in coeff)
        expected = ((1 - r**4) / (2 * a * r * r), 0.0, 1.0)
        worst = max(worst, max(abs(u - v) for u, v in zip(pulled, expected)))
    return worst


def sphere_constraint_defect(a: float, variant: str = "corrected", rs: Sequence[float] | None = None) -> float:
    """max |x^2 + 2 rho - a^2| on the grid."""
    change = stereo_change(a, variant)
    worst = 0.0
    for r in _radii(rs):
        _, x, _, rho = change(0.0, r, 0.0)
        worst = max(worst, abs(x * x + 2 * rho - a * a))
    return worst


# --------------------------------------------------------------------------
# Finite-difference convergence
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Convergence:
    h: float
    d_h: float
    d_half: float
    floor: float

    @property
    def exact(self) -> bool:
        return self.d_h < self.floor and self.d_half < self.floor

    @property
    def ratio(self) -> float:
        return self.d_h / self.d_half if self.d_half else math.inf

    @property
    def ok(self) -> bool:
        return self.exact or self.ratio >= 3.0


def fd_convergence(defect: Callable, h: float = 1e-5, floor: float = 1e-30, dps: int = 40) -> Convergence:
    """Evaluate ``defect(bk, h)`` at h and h/2 in extended precision."""
    with mpmath.workdps(dps):
        d1 = float(defect(MP, mpmath.mpf(h)))
        d2 = float(defect(MP, mpmath.mpf(h) / 2))
    return Convergence(h, d1, d2, floor)
