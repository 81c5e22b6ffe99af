"""Closed-form vortex solutions built from rational maps.

For an integrable pattern of order ``n`` (``C0`` and a single ``C_{2n}``) on
the chart with ``K0 = n C0``,

    |phi|^2 = |1 + n C0 |z|^2|^{2/n} |f'|^{2/n} / |1 + n C_{2n} |f|^2|^{2/n}

so that ``Omega_{2n} = Omega0 |phi|^{2n}`` has constant curvature ``n C_{2n}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P

from .catalog import EquationSpec, integrable_order
from .mapstring import parse_map
from .surface import DEFAULT_EXCLUSION, DEFAULT_SPACING, SurfaceChart, sample_field


class IntegrabilityError(ValueError):
    """Equation or chart does not match an integrable closed-form family."""


class PoleError(ValueError):
    """Evaluation on the curve where ``1 + n C_{2n} |f|^2`` vanishes."""


class DivergenceError(ValueError):
    """Evaluation of a singular metric at one of its singular points."""


class RootFindingError(RuntimeError):
    pass


def _trim(c, rel=1e-14) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0:
        return np.zeros(1, complex)
    keep = np.nonzero(np.abs(c) > rel * scale)[0]
    return c[: keep[-1] + 1]


def _degree(c) -> int:
    c = _trim(c)
    return 0 if (c.size == 1) else c.size - 1


def _cancel_common_roots(p, q, tol):
    if _degree(p) == 0 or _degree(q) == 0:
        return p, q
    rp = list(P.polyroots(p))
    rq = list(P.polyroots(q))
    cancelled = False
    for r in list(rq):
        hit = [s for s in rp if abs(s - r) <= tol * max(1.0, abs(r))]
        if hit:
            rp.remove(hit[0])
            rq.remove(r)
            cancelled = True
    if not cancelled:
        return p, q
    newp = p[-1] * (P.polyfromroots(rp) if rp else np.ones(1))
    newq = q[-1] * (P.polyfromroots(rq) if rq else np.ones(1))
    return np.asarray(newp, complex), np.asarray(newq, complex)


class RationalMap:
    """``f(z) = p(z) / q(z)`` in reduced form, coefficients lowest degree first."""

    def __init__(self, numerator, denominator=(1.0,), cancel_tol: float = 1e-8):
        p = _trim(numerator)
        q = _trim(denominator)
        if not np.any(q):
            raise ValueError("denominator polynomial is identically zero")
        p, q = _cancel_common_roots(p, q, cancel_tol)
        self.p = _trim(p)
        self.q = _trim(q)
        self.degree = max(_degree(self.p), _degree(self.q))
        if self.degree < 1:
            raise ValueError("rational map must be non-constant (degree >= 1)")
        self.dp = P.polyder(self.p) if self.p.size > 1 else np.zeros(1, complex)
        self.dq = P.polyder(self.q) if self.q.size > 1 else np.zeros(1, complex)
        self.d2p = P.polyder(self.dp) if self.dp.size > 1 else np.zeros(1, complex)
        self.d2q = P.polyder(self.dq) if self.dq.size > 1 else np.zeros(1, complex)

    @classmethod
    def parse(cls, text: str) -> "RationalMap":
        num, den = parse_map(text)
        return cls(num, den)

    @classmethod
    def monomial(cls, k: int) -> "RationalMap":
        c = np.zeros(k + 1, complex)
        c[k] = 1.0
        return cls(c)

    @property
    def is_polynomial(self) -> bool:
        return _degree(self.q) == 0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            return P.polyval(z, self.p) / P.polyval(z, self.q)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        q = P.polyval(z, self.q)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (P.polyval(z, self.dp) * q - P.polyval(z, self.p) * P.polyval(z, self.dq)) / q**2

    def second_derivative(self, z):
        z = np.asarray(z, dtype=complex)
        p, q = P.polyval(z, self.p), P.polyval(z, self.q)
        dp, dq = P.polyval(z, self.dp), P.polyval(z, self.dq)
        d2p, d2q = P.polyval(z, self.d2p), P.polyval(z, self.d2q)
        w = dp * q - p * dq
        with np.errstate(divide="ignore", invalid="ignore"):
            return (d2p * q - p * d2q) / q**2 - 2.0 * dq * w / q**3

    def wronskian(self) -> np.ndarray:
        """Coefficients of ``p' q - p q'``, whose roots are the finite ramification points."""
        return _trim(P.polysub(P.polymul(self.dp, self.q), P.polymul(self.p, self.dq)))

    def rotated(self, theta: float) -> "RationalMap":
        return RationalMap(np.exp(1j * theta) * self.p, self.q)

    def to_dict(self) -> dict:
        return {"numerator": {"re": self.p.real.tolist(), "im": self.p.imag.tolist()},
                "denominator": {"re": self.q.real.tolist(), "im": self.q.imag.tolist()},
                "degree": self.degree}

    @classmethod
    def from_dict(cls, d: dict) -> "RationalMap":
        num = np.asarray(d["numerator"]["re"]) + 1j * np.asarray(d["numerator"]["im"])
        den = np.asarray(d["denominator"]["re"]) + 1j * np.asarray(d["denominator"]["im"])
        return cls(num, den)

    def __repr__(self):
        return f"RationalMap(p={self.p.tolist()}, q={self.q.tolist()})"


@dataclass(frozen=True)
class Divisor:
    """Distinct points ``z_k`` with multiplicities ``N_k`` plus a multiplicity at infinity."""

    points: tuple = ()
    infinity: object = 0

    def __post_init__(self):
        pts = tuple((complex(z), n) for z, n in self.points)
        for i, (z, n) in enumerate(pts):
            if n <= 0:
                raise ValueError(f"multiplicity at {z} must be positive")
            for w, _ in pts[i + 1:]:
                if z == w:
                    raise ValueError(f"divisor point {z} listed twice")
        if self.infinity < 0:
            raise ValueError("multiplicity at infinity must be non-negative")
        object.__setattr__(self, "points", pts)

    @property
    def finite_degree(self):
        return sum((n for _, n in self.points), 0)

    @property
    def degree(self):
        return self.finite_degree + self.infinity

    @property
    def support(self) -> list:
        return [z for z, _ in self.points]

    def multiplicity(self, z, tol: float = 1e-8):
        for w, n in self.points:
            if abs(w - z) <= tol:
                return n
        return 0

    def scaled(self, factor) -> "Divisor":
        f = Fraction(factor)
        return Divisor(tuple((z, Fraction(n) * f) for z, n in self.points),
                       Fraction(self.infinity) * f)

    def to_dict(self) -> dict:
        def num(n):
            return int(n) if Fraction(n).denominator == 1 else float(n)
        return {"points": [{"re": z.real, "im": z.imag, "N": num(n)} for z, n in self.points],
                "infinity": num(self.infinity), "degree": num(self.degree)}


def _wronskian_scale(W, z) -> float:
    return float(np.sum(np.abs(W) * max(1.0, abs(z)) ** np.arange(W.size)))


def _cluster_roots(W, roots, cluster_tol):
    remaining = sorted(roots, key=lambda r: (r.real, r.imag))
    groups = []
    while remaining:
        r = remaining.pop(0)
        grp = [r]
        loose = 1e-4 * max(1.0, abs(r))
        for s in list(remaining):
            if abs(s - r) < loose:
                grp.append(s)
                remaining.remove(s)
        groups.append(grp)
    out = []
    for grp in groups:
        k = len(grp)
        c = complex(np.mean(grp))
        if k > 1:
            # the centroid of a perturbed k-fold root is accurate; polish on W^{(k-1)}
            dk = P.polyder(W, k - 1)
            dk1 = P.polyder(dk)
            for _ in range(5):
                d = P.polyval(c, dk1)
                if d == 0:
                    break
                c -= P.polyval(c, dk) / d
            scale = _wronskian_scale(W, c)
            ok = all(abs(P.polyval(c, P.polyder(W, j))) <= 1e-6 * scale * math.factorial(j) * 10 ** j
                     for j in range(k))
            if not ok:
                # genuinely distinct nearby roots: cluster only at the tight tolerance
                tight = []
                for s in grp:
                    for t in tight:
                        if abs(t[0] - s) <= cluster_tol:
                            t[1] += 1
                            break
                    else:
                        tight.append([s, 1])
                out.extend((complex(s), m) for s, m in tight)
                continue
        out.append((c, k))
    return out


def ramification_divisor(f: RationalMap, include_infinity: bool = False,
                         cluster_tol: float = 1e-8) -> Divisor:
    """Points where ``f' = 0`` (and multiple poles), with multiplicities.

    With ``include_infinity`` the ramification at ``z = infinity`` is read off
    in the chart ``w = 1/z`` and the Riemann-Hurwitz total ``2d - 2`` is checked.
    """
    W = f.wronskian()
    pts = []
    if _degree(W) > 0:
        roots = P.polyroots(W)
        for z, k in _cluster_roots(W, roots, cluster_tol):
            res = abs(P.polyval(z, W)) / _wronskian_scale(W, z)
            if res > 1e-6:
                raise RootFindingError(
                    f"ramification root {z:.6g} did not converge (relative residual {res:.2e})")
            if abs(z.imag) < 1e-13 * max(1.0, abs(z)):
                z = complex(z.real, 0.0)
            if abs(z.real) < 1e-13 * max(1.0, abs(z)):
                z = complex(0.0, z.imag)
            pts.append((z, k))
    merged: list = []
    for z, k in pts:
        for item in merged:
            if abs(item[0] - z) <= cluster_tol:
                item[1] += k
                break
        else:
            merged.append([z, k])
    div_pts = tuple((z, k) for z, k in merged)
    if not include_infinity:
        return Divisor(div_pts)
    inf = _ramification_at_infinity(f)
    div = Divisor(div_pts, inf)
    if div.degree != 2 * f.degree - 2:
        raise RootFindingError(
            f"Riemann-Hurwitz check failed: total ramification {div.degree} != {2 * f.degree - 2}")
    return div


def _ramification_at_infinity(f: RationalMap) -> int:
    dp, dq = _degree(f.p), _degree(f.q)
    if dp != dq:
        return abs(dp - dq) - 1
    d = f.degree
    p = np.zeros(d + 1, complex)
    q = np.zeros(d + 1, complex)
    p[: f.p.size] = f.p
    q[: f.q.size] = f.q
    a = p[d] / q[d]
    rev = (p - a * q)[::-1]  # coefficients of w^d (p - a q)(1/w), lowest first
    scale = np.max(np.abs(p)) + abs(a) * np.max(np.abs(q))
    nz = np.nonzero(np.abs(rev) > 1e-12 * scale)[0]
    return int(nz[0]) - 1


@dataclass(frozen=True, eq=False)
class ClosedFormSolution:
    """Integrable solution ``(equation, f, n)`` on the chart ``K0 = n C0``."""

    equation: EquationSpec
    map: RationalMap
    order: int
    chart: SurfaceChart
    divisor: Divisor

    @property
    def C0(self) -> float:
        return self.equation.C0

    @property
    def C(self) -> float:
        """The single higher coefficient ``C_{2n}`` (zero for Laplace and Bradlow)."""
        return self.equation.coefficient(self.order)

    @property
    def vortex_divisor(self) -> Divisor:
        """Zeros of the Higgs field: ramification multiplicities divided by ``n``."""
        return self.divisor.scaled(Fraction(1, self.order))

    @property
    def singularities(self) -> tuple:
        return tuple((z, float(n)) for z, n in self.vortex_divisor.points)

    def _parts(self, z):
        n = self.order
        f = self.map(z)
        A = 1.0 + n * self.C0 * np.abs(z) ** 2
        B = 1.0 + n * self.C * np.abs(f) ** 2
        return f, A, B

    def _check(self, z):
        z = self.chart.check(z)
        f, A, B = self._parts(z)
        scale = 1.0 + abs(self.order * self.C) * np.abs(f) ** 2
        if np.any(np.abs(B) <= 1e-12 * scale):
            bad = np.asarray(z)[np.abs(B) <= 1e-12 * scale].flat[0]
            raise PoleError(f"1 + n C_2n |f|^2 vanishes at z={bad:.6g}")
        return z

    def higgs_squared(self, z):
        z = self._check(z)
        out = self._higgs(z)
        return float(out) if np.ndim(out) == 0 else out

    def _higgs(self, z):
        n = self.order
        f, A, B = self._parts(z)
        df = self.map.derivative(z)
        with np.errstate(all="ignore"):
            return (np.abs(A) * np.abs(df) / np.abs(B)) ** (2.0 / n)

    def u(self, z):
        with np.errstate(divide="ignore"):
            return 0.5 * np.log(self._higgs(np.asarray(z, complex)))

    def u_jet(self, z):
        """``u`` with exact gradient and flat Laplacian."""
        z = np.asarray(z, complex)
        n = self.order
        f, A, B = self._parts(z)
        df = self.map.derivative(z)
        d2f = self.map.second_derivative(z)
        with np.errstate(all="ignore"):
            u = 0.5 * np.log(self._higgs(z))
            dz = (d2f / (2 * df) - n * self.C * df * np.conj(f) / B
                  + n * self.C0 * np.conj(z) / A) / n
            lap = 4.0 * (-self.C * np.abs(df) ** 2 / B**2 + self.C0 / A**2)
        return u, 2 * dz.real, -2 * dz.imag, lap

    def omega0(self, z):
        return self.chart.omega(np.asarray(z, complex))

    def omega(self, z, k: int | None = None):
        """Order-``k`` Baptista factor ``Omega0 |phi|^{2k}`` (default ``k = n``)."""
        k = self.order if k is None else k
        z = np.asarray(z, complex)
        return self.chart.omega(z) * self._higgs(z) ** k

    def pole_distance_ok(self, z, margin: float = 0.2):
        f, A, B = self._parts(np.asarray(z, complex))
        return np.abs(B) >= margin

    def u_field(self, points, spacing: float = DEFAULT_SPACING,
                exclusion_radius: float = DEFAULT_EXCLUSION):
        return sample_field(self.u, points, self.chart, spacing, jet=self.u_jet,
                            exclusion=self.divisor.support, exclusion_radius=exclusion_radius,
                            log_singularities=self.singularities)

    def to_dict(self) -> dict:
        return {"equation": self.equation.to_dict(), "map": self.map.to_dict(),
                "n": self.order, "K0": self.chart.curvature,
                "divisor": self.vortex_divisor.to_dict(),
                "ramification_divisor": self.divisor.to_dict()}


def closed_form(equation: EquationSpec, f, chart: SurfaceChart | None = None) -> ClosedFormSolution:
    """Build the closed-form solution, enforcing the curvature pairing ``K0 = n C0``."""
    if isinstance(f, str):
        f = RationalMap.parse(f)
    n = integrable_order(equation)
    if n is None:
        raise IntegrabilityError(f"equation {equation.coefficients} has no closed-form family")
    K0 = n * equation.C0
    if chart is None:
        chart = SurfaceChart(K0)
    elif not math.isclose(chart.curvature, K0, rel_tol=1e-12, abs_tol=1e-12):
        raise IntegrabilityError(
            f"chart curvature K0={chart.curvature:g} but integrability requires "
            f"K0 = n C0 = {K0:g} (n={n})")
    return ClosedFormSolution(equation, f, n, chart, ramification_divisor(f))


def set_c2_zero_bradlow(f, chart: SurfaceChart | None = None) -> ClosedFormSolution:
    """Bradlow solution ``e^{2u} = (1 - |z|^2)^2 |f'|^2`` on the hyperbolic chart."""
    chart = SurfaceChart(-1.0) if chart is None else chart
    if chart.curvature >= 0:
        raise IntegrabilityError("Bradlow closed forms live on a hyperbolic chart")
    return closed_form(EquationSpec.of(-1.0, 0.0, 0.0, canonical=True), f, chart)


def laplace_solution(points, weights) -> Callable:
    """``u(z) = sum_i c_i log|z - z_i|`` with positive weights."""
    pts = [complex(z) for z in points]
    cs = [float(c) for c in weights]
    if len(pts) != len(cs):
        raise ValueError("points and weights differ in length")
    if any(c <= 0 for c in cs):
        raise ValueError("Laplace-vortex weights must be positive")

    def u(z):
        z = np.asarray(z, complex)
        out = np.zeros(z.shape)
        with np.errstate(divide="ignore"):
            for zi, c in zip(pts, cs):
                out = out + c * np.log(np.abs(z - zi))
        return out

    u.singularities = tuple(zip(pts, cs))
    return u


@dataclass(frozen=True, eq=False)
class SingularBackground:
    """Singular ``Omega0`` on which the II_24 closed form holds.

    ``e^{2u} = (1 - C2|z|^2)^2 |f'|^2 / (1 + C4|f|^2)^2`` and
    ``Omega0 = 4 (1 + C4|f|^2)^2 / ((1 - C2|z|^2)^4 |f'|^2)``.
    """

    map: RationalMap
    C2: float
    C4: float

    @property
    def chart(self) -> SurfaceChart:
        # Omega0 e^{2u} is the constant-curvature (-C2) metric of this chart
        return SurfaceChart(-self.C2)

    @property
    def equation(self) -> EquationSpec:
        return EquationSpec.of(0.0, self.C2, self.C4)

    @property
    def divisor(self) -> Divisor:
        return ramification_divisor(self.map)

    def omega0(self, z, strict: bool = True):
        z = np.asarray(z, complex)
        f = self.map(z)
        df = self.map.derivative(z)
        if strict and np.any(np.abs(df) < 1e-14):
            bad = z[np.abs(df) < 1e-14].flat[0] if z.ndim else z
            raise DivergenceError(f"singular background diverges at ramification point z={complex(bad):.6g}")
        with np.errstate(all="ignore"):
            out = 4 * (1 + self.C4 * np.abs(f) ** 2) ** 2 / (
                (1 - self.C2 * np.abs(z) ** 2) ** 4 * np.abs(df) ** 2)
        return float(out) if out.ndim == 0 else out

    def higgs_squared(self, z):
        z = np.asarray(z, complex)
        f = self.map(z)
        df = self.map.derivative(z)
        with np.errstate(all="ignore"):
            return (1 - self.C2 * np.abs(z) ** 2) ** 2 * np.abs(df) ** 2 / (1 + self.C4 * np.abs(f) ** 2) ** 2

    def u(self, z):
        with np.errstate(divide="ignore"):
            return 0.5 * np.log(self.higgs_squared(z))

    def u_jet(self, z):
        z = np.asarray(z, complex)
        f = self.map(z)
        df = self.map.derivative(z)
        d2f = self.map.second_derivative(z)
        A = 1 - self.C2 * np.abs(z) ** 2
        B = 1 + self.C4 * np.abs(f) ** 2
        with np.errstate(all="ignore"):
            u = self.u(z)
            dz = -self.C2 * np.conj(z) / A + d2f / (2 * df) - self.C4 * df * np.conj(f) / B
            lap = 4.0 * (-self.C2 / A**2 - self.C4 * np.abs(df) ** 2 / B**2)
        return u, 2 * dz.real, -2 * dz.imag, lap

    def u_field(self, points, spacing: float = DEFAULT_SPACING,
                exclusion_radius: float = DEFAULT_EXCLUSION):
        div = self.divisor
        return sample_field(self.u, points, self.chart, spacing, jet=self.u_jet,
                            exclusion=div.support, exclusion_radius=exclusion_radius,
                            log_singularities=tuple((z, float(n)) for z, n in div.points))

    def omega0_field(self, points, spacing: float = DEFAULT_SPACING,
                     exclusion_radius: float = DEFAULT_EXCLUSION):
        div = self.divisor
        return sample_field(lambda z: self.omega0(z, strict=False), points, self.chart, spacing,
                            exclusion=div.support, exclusion_radius=exclusion_radius,
                            log_singularities=tuple((z, -2.0 * float(n)) for z, n in div.points))


def singular_background(f, C2: float, C4: float) -> SingularBackground:
    if isinstance(f, str):
        f = RationalMap.parse(f)
    if C2 == 0 or C4 == 0 or (C2 < 0 and C4 < 0):
        raise IntegrabilityError(f"(C2, C4) = ({C2}, {C4}) is not a type II_24 sign pattern")
    return SingularBackground(f, float(C2), float(C4))
