"""Radial Newton solves, residual evaluation, superposition and the type III transform.

Radial problems put all ``m`` vortices at the origin and write
``u = m log r + v`` with ``v`` smooth.  On a stretched coordinate ``r = r(xi)``
the equation ``-lap u = Omega P(e^{2u})`` becomes

    d/dxi (a dv/dxi) + r r' Omega P(e^{2u}) = 0,    a = r / r',

which is discretised with second-order fluxes on a uniform ``xi`` grid and
solved by damped Newton on the tridiagonal Jacobian.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import solve_banded

from .catalog import EquationSpec, integrable_order
from .liouville import ClosedFormSolution, Divisor
from .surface import (DomainError, ScalarField, SurfaceChart,
                      chart_field, exclusion_flags, laplace_beltrami)


class UnsupportedEquationError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


# ----------------------------------------------------------------------------
# residuals on sampled fields


def _p_of_field(equation: EquationSpec, u: ScalarField):
    with np.errstate(all="ignore"):
        return equation.P_of_u(u.values)


def residual_field(equation: EquationSpec, u: ScalarField, omega, divisor: Divisor | None = None,
                   mode: str = "auto") -> ScalarField:
    """``Delta_g u - P(e^{2u})`` with ``Delta_g`` built from ``omega``.

    ``omega`` is a chart or any sampled conformal factor on the grid of ``u``
    (a Baptista factor included).  Points within the exclusion radius of the
    divisor are flagged.
    """
    lb = laplace_beltrami(omega, u, mode=mode)
    vals = lb.values - _p_of_field(equation, u)
    flags = lb.flags | ~np.isfinite(vals)
    if divisor is not None:
        flags = flags | exclusion_flags(u.points, divisor.support, u.exclusion_radius)
    return u.with_values(vals, flags=flags)


def reinterpret_baptista(equation: EquationSpec) -> EquationSpec:
    """Coefficients of a ``C0 = 0`` equation read on its own Baptista metric ``Omega_2``.

    Dividing ``Delta_0 u = C2 e^{2u} + C4 e^{4u} + ...`` by ``e^{2u}`` gives
    ``Delta_2 u = -C0' + C2' e^{2u} + ...`` with ``C0' = -C2`` and ``C_{2k}' = C_{2k+2}``.
    """
    c = equation.coefficients
    if not c or c[0] != 0.0:
        raise PreconditionError("the Baptista reinterpretation needs C0 = 0")
    if len(c) < 2:
        raise PreconditionError("equation has no C2 term")
    return EquationSpec((-c[1],) + tuple(c[2:]))


def reinterpretation_identity(equation: EquationSpec, u: ScalarField, omega0,
                              mode: str = "auto") -> dict:
    """Compare ``Omega0 R0`` and ``Omega2 R2`` pointwise.

    ``R0`` is the residual on ``Omega0`` and ``R2`` the residual of the
    reinterpreted equation on ``Omega2 = Omega0 e^{2u}``.  The residuals are
    related by ``R2 = e^{-2u} R0``, so the weighted forms agree exactly.
    """
    if isinstance(omega0, SurfaceChart):
        om0 = chart_field(omega0, u)
    else:
        om0 = omega0
    e2u = u.map(lambda v: np.exp(2 * v), lambda v: 2 * np.exp(2 * v),
                lambda v: 4 * np.exp(2 * v),
                log_singularities=tuple((z, 2 * c) for z, c in u.log_singularities))
    om2 = om0 * e2u
    r0 = residual_field(equation, u, om0, mode=mode)
    r2 = residual_field(reinterpret_baptista(equation), u, om2, mode=mode)
    with np.errstate(invalid="ignore"):
        w0 = om0.values * r0.values
        w2 = om2.values * r2.values
    live = r0.mask & r2.mask
    diff = np.abs(w0 - w2)[live]
    scale = max(1.0, float(np.max(np.abs(w0[live])))) if np.any(live) else 1.0
    return {"max_abs_difference": float(diff.max()) if diff.size else 0.0,
            "max_relative_difference": float(diff.max() / scale) if diff.size else 0.0,
            "residual_original": float(np.max(np.abs(r0.values[live]))) if np.any(live) else 0.0,
            "residual_reinterpreted": float(np.max(np.abs(r2.values[live]))) if np.any(live) else 0.0,
            "equation_reinterpreted": list(reinterpret_baptista(equation).coefficients),
            "points": int(live.sum())}


# ----------------------------------------------------------------------------
# radial problems


@dataclass(frozen=True, eq=False)
class RadialBackground:
    """Radial conformal factor ``Omega(r)``; ``cone_exponent`` a means ``Omega ~ r^{2a}`` at 0."""

    omega: Callable
    valid_radius: float = math.inf
    cone_exponent: float = 0.0
    label: str = ""
    curvature: float | None = None  # set for constant-curvature charts

    @classmethod
    def from_chart(cls, chart: SurfaceChart) -> "RadialBackground":
        return cls(chart.omega, chart.valid_radius, 0.0, f"K0={chart.curvature:g}", chart.curvature)

    @property
    def hyperbolic(self) -> bool:
        return math.isfinite(self.valid_radius)


class _SampledBackground:
    """``Omega`` known on a fixed grid; exact there, log-log interpolated elsewhere."""

    def __init__(self, r, values):
        self.r = np.asarray(r, float)
        self.values = np.asarray(values, float)

    def __call__(self, r):
        r = np.asarray(r, float)
        if r.shape == self.r.shape and np.array_equal(r, self.r):
            return self.values.copy()
        return np.exp(np.interp(np.log(r), np.log(self.r), np.log(self.values)))


BOUNDARY_CONDITIONS = ("decay", "dirichlet", "neumann")


@dataclass(frozen=True, eq=False)
class RadialProblem:
    """Coincident vortices of multiplicity ``m`` at the origin on a radial background."""

    equation: EquationSpec
    multiplicity: int
    background: RadialBackground
    radius: float
    bc: str = "decay"
    boundary_value: float | None = None
    r_min_ratio: float = 1e-6

    def __post_init__(self):
        if self.multiplicity < 0 or int(self.multiplicity) != self.multiplicity:
            raise ValueError("multiplicity must be a non-negative integer")
        if self.bc not in BOUNDARY_CONDITIONS:
            raise ValueError(f"unknown boundary condition {self.bc!r}")
        if not (0 < self.radius < self.background.valid_radius):
            raise DomainError(f"domain radius {self.radius} must lie in (0, {self.background.valid_radius})")
        if self.bc == "dirichlet" and self.boundary_value is None:
            raise ValueError("Dirichlet boundary condition needs a boundary value")

    @property
    def vacuum(self) -> float | None:
        vac = self.equation.vacuum_values()
        return vac[0] if vac else None

    def boundary_u(self) -> float | None:
        if self.bc == "dirichlet":
            return float(self.boundary_value)
        if self.bc == "decay":
            if self.vacuum is None:
                raise PreconditionError(
                    f"equation {self.equation.coefficients} has no vacuum; use a Dirichlet value")
            return self.vacuum
        return None

    def to_dict(self) -> dict:
        return {"equation": self.equation.to_dict(), "m": self.multiplicity,
                "background": self.background.label, "cone_exponent": self.background.cone_exponent,
                "R": self.radius, "bc": self.bc, "boundary_value": self.boundary_value}


@dataclass(frozen=True)
class RadialGrid:
    """Uniform ``xi`` grid with ``r(xi)``, ``a = r / r'`` and the Liouville term ``c``."""

    xi: np.ndarray
    r: np.ndarray
    dr: np.ndarray  # dr/dxi
    a: np.ndarray
    c: np.ndarray

    @property
    def step(self) -> float:
        return float(self.xi[1] - self.xi[0])

    @property
    def weight(self) -> np.ndarray:
        return self.r * self.dr

    @property
    def sqrt_a(self) -> np.ndarray:
        return np.sqrt(self.a)


def radial_grid(R: float, n_points: int, valid_radius: float = math.inf,
                r_min_ratio: float = 1e-6) -> RadialGrid:
    """Logarithmic grid near 0; logistic stretching toward a finite chart boundary.

    On the logistic map ``r = Rv s(xi)`` one has ``a = 1 + e^xi``; on the
    logarithmic map ``a = 1``.
    """
    if n_points < 8:
        raise ValueError("need at least 8 radial points")
    r0 = r_min_ratio * R
    if math.isfinite(valid_radius):
        Rv = valid_radius
        xi = np.linspace(math.log(r0 / (Rv - r0)), math.log(R / (Rv - R)), n_points)
        s = 0.5 * (1 + np.tanh(0.5 * xi))
        r, dr = Rv * s, Rv * s * (1 - s)
        e = np.exp(xi)
        a = 1 + e
        # (a' a^{-1/2})' / (2 sqrt a)
        c = e * (1 + 0.5 * e) / (2 * a**2)
    else:
        xi = np.linspace(math.log(r0), math.log(R), n_points)
        r = np.exp(xi)
        dr = r.copy()
        a = np.ones_like(xi)
        c = np.zeros_like(xi)
    return RadialGrid(xi, r, dr, a, c)


@dataclass(eq=False)
class SolveReport:
    converged: bool
    iterations: int
    residual: float
    r: np.ndarray
    u: np.ndarray
    residual_profile: np.ndarray
    flux: float
    wall_time: float
    tol: float
    trace: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    problem: RadialProblem | None = None
    n_points: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def phisq(self) -> np.ndarray:
        return np.exp(2 * self.u)

    @property
    def v(self) -> np.ndarray:
        return self.u - self.problem.multiplicity * np.log(self.r)

    def u_at(self, r):
        """Profile at arbitrary radii (``m log r`` plus interpolated smooth part)."""
        r = np.asarray(r, float)
        m = self.problem.multiplicity
        v = np.interp(np.log(np.maximum(r, self.r[0])), np.log(self.r), self.v)
        with np.errstate(divide="ignore"):
            return m * np.log(r) + v

    def to_dict(self, include_profile: bool = True, include_time: bool = True) -> dict:
        extra = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.extra.items()}
        d = {"converged": self.converged, "iterations": self.iterations,
             "residual": self.residual, "tol": self.tol, "flux": self.flux,
             "n_points": self.n_points, "trace": list(self.trace),
             "warnings": list(self.warnings),
             "problem": self.problem.to_dict() if self.problem else None,
             "extra": extra}
        if include_time:
            d["wall_time"] = self.wall_time
        if include_profile:
            d["profile"] = {"r": self.r.tolist(), "u": self.u.tolist(),
                            "phisq": self.phisq.tolist(), "residual": self.residual_profile.tolist()}
        return d


def linearization(equation: EquationSpec) -> dict | None:
    """Sign of ``dP/du`` at the vacuum: positive means oscillatory small fluctuations.

    With the positive Laplacian, ``-lap w = Omega dP/du(u_vac) w``: a negative
    derivative gives exponential decay toward the vacuum.
    """
    vac = equation.vacuum_values()
    if not vac:
        return None
    u0 = vac[0]
    lam = float(equation.dP_du(u0))
    return {"u_vac": u0, "dP_du": lam, "behaviour": "oscillatory" if lam > 0 else "decaying"}


def _residual(problem: RadialProblem, grid: RadialGrid, om, w, ub):
    """Numerov residual for ``w = sqrt(a) v`` and its tridiagonal Jacobian.

    ``w'' = G`` with ``G = -r r' Omega P / sqrt(a) + c w``; rows are divided by
    ``sqrt(a)`` so that they carry the units of ``(a v')'/a``.
    """
    eq = problem.equation
    m = problem.multiplicity
    h = grid.step
    sa = grid.sqrt_a
    logr = np.log(grid.r)
    u = m * logr + w / sa
    with np.errstate(all="ignore"):
        S = grid.weight * om * eq.P_of_u(u)
        dS = grid.weight * om * eq.dP_du(u)
        G = -S / sa + grid.c * w
        dG = -dS / grid.a + grid.c
        N = w.size
        F = np.empty(N)
        ab = np.zeros((3, N))  # banded Jacobian rows: super, diag, sub
        s = sa[1:-1]
        F[1:-1] = ((w[2:] - 2 * w[1:-1] + w[:-2]) / h**2
                   - (G[2:] + 10 * G[1:-1] + G[:-2]) / 12) / s
        ab[1, 1:-1] = (-2 / h**2 - 10 * dG[1:-1] / 12) / s
        ab[0, 2:] = (1 / h**2 - dG[2:] / 12) / s
        ab[2, :-2] = (1 / h**2 - dG[:-2] / 12) / s
    # regularity at the inner node: v_0 = v_1
    F[0] = w[0] / sa[0] - w[1] / sa[1]
    ab[1, 0], ab[0, 1] = 1 / sa[0], -1 / sa[1]
    if problem.bc == "neumann":
        # half-cell balance with boundary flux a v' = -m (zero radial derivative of u)
        a_mid = 0.5 * (grid.a[-1] + grid.a[-2])
        vN, vN1 = w[-1] / sa[-1], w[-2] / sa[-2]
        F[-1] = ((-m - a_mid * (vN - vN1) / h) / (0.5 * h) + S[-1]) / grid.a[-1]
        ab[1, -1] = (-a_mid / h / (0.5 * h) + dS[-1]) / grid.a[-1] / sa[-1]
        ab[2, -2] = (a_mid / h / (0.5 * h)) / grid.a[-1] / sa[-2]
    else:
        F[-1] = w[-1] / sa[-1] - (ub - m * logr[-1])
        ab[1, -1] = 1 / sa[-1]
        ab[2, -2] = 0.0
    return F, ab


def solve_radial(problem: RadialProblem, n_points: int = 4000, tol: float = 1e-10,
                 max_iter: int = 200, max_halvings: int = 60,
                 initial_u: np.ndarray | None = None) -> SolveReport:
    """Damped Newton solve of the radial problem; never raises on divergence."""
    t0 = time.perf_counter()
    bg = problem.background
    grid = radial_grid(problem.radius, n_points, bg.valid_radius, problem.r_min_ratio)
    om = np.asarray(bg.omega(grid.r), float)
    if np.any(~np.isfinite(om)) or np.any(om <= 0):
        raise DomainError("background conformal factor must be positive on (0, R)")
    m = problem.multiplicity
    ub = problem.boundary_u()
    R = problem.radius
    if initial_u is None:
        a2 = (0.3 * min(R, 1.0)) ** 2
        base = ub if ub is not None else (problem.vacuum or 0.0)
        v = -0.5 * m * np.log(grid.r**2 + a2) + base + 0.5 * m * math.log(R**2 + a2)
    else:
        v = np.asarray(initial_u, float) - m * np.log(grid.r)
    w = grid.sqrt_a * v
    warnings = []
    lin = linearization(problem.equation)
    if lin and lin["behaviour"] == "oscillatory":
        warnings.append(f"oscillatory linearization about u_vac={lin['u_vac']:.6g} "
                        f"(dP/du={lin['dP_du']:.6g} > 0)")
    trace = []
    converged = False
    it = 0
    F, J = _residual(problem, grid, om, w, ub)
    norm = float(np.max(np.abs(F)))
    for it in range(1, max_iter + 1):
        trace.append(norm)
        if norm < tol:
            converged = True
            break
        if not np.isfinite(norm):
            warnings.append("residual became non-finite")
            break
        try:
            step = solve_banded((1, 1), J, -F)
        except (np.linalg.LinAlgError, ValueError) as exc:
            warnings.append(f"linear solve failed: {exc}")
            break
        lam = 1.0
        for _ in range(max_halvings + 1):
            w_try = w + lam * step
            F_try, J_try = _residual(problem, grid, om, w_try, ub)
            n_try = float(np.max(np.abs(F_try)))
            if np.isfinite(n_try) and n_try < norm:
                break
            lam *= 0.5
        else:
            warnings.append("line search failed to reduce the residual")
            break
        w, F, J, norm = w_try, F_try, J_try, n_try
    else:
        warnings.append(f"no convergence in {max_iter} iterations")
    u = m * np.log(grid.r) + w / grid.sqrt_a
    flux = radial_flux(problem.equation, grid, om, u, bg.cone_exponent)
    return SolveReport(converged, it, norm, grid.r, u, F, flux, time.perf_counter() - t0, tol,
                       trace, warnings, problem, n_points,
                       {"linearization": lin} if lin else {})


def radial_flux(equation: EquationSpec, grid: RadialGrid, om, u, cone_exponent: float = 0.0) -> float:
    """``int_0^R P(e^{2u}) Omega r dr`` (the flux divided by 2 pi)."""
    with np.errstate(all="ignore"):
        dens = om * equation.P_of_u(u)
    core = dens[0] * grid.r[0] ** 2 / (2 + 2 * cone_exponent)
    return float(simpson(dens * grid.weight, x=grid.xi) + core)


def radial_residual(problem: RadialProblem, u, n_points: int) -> np.ndarray:
    """Discrete residual of a given profile ``u`` on the problem's grid."""
    bg = problem.background
    grid = radial_grid(problem.radius, n_points, bg.valid_radius, problem.r_min_ratio)
    v = np.asarray(u, float) - problem.multiplicity * np.log(grid.r)
    F, _ = _residual(problem, grid, np.asarray(bg.omega(grid.r), float),
                     grid.sqrt_a * v, problem.boundary_u())
    return F


# ----------------------------------------------------------------------------
# superposition on Baptista backgrounds


def superposition_equation(equation: EquationSpec) -> EquationSpec:
    """Equation for the added vortices on the Baptista background ``Omega0 e^{2n u1}``.

    For ``(C0, C_{2n})`` the new pattern is ``(C_{2n}, C_{2n})`` at the same order.
    """
    n = integrable_order(equation)
    if n is None:
        raise UnsupportedEquationError(f"no superposition rule for {equation.coefficients}")
    C = equation.coefficient(n)
    coeffs = [0.0] * (max(equation.order, n) + 1)
    coeffs[0] = C
    coeffs[n] = C
    return EquationSpec(tuple(coeffs), canonical=equation.canonical)


def _radial_closed_form_multiplicity(sol: ClosedFormSolution) -> int:
    p, q = sol.map.p, sol.map.q
    nzp = np.nonzero(np.abs(p) > 0)[0]
    if q.size != 1 or nzp.size != 1:
        raise PreconditionError("u1 must be radial: use a monomial map c z^d")
    N = Fraction(int(nzp[0]) - 1, sol.order)
    if N.denominator != 1:
        raise PreconditionError("radial superposition needs an integer vortex number at the origin")
    return int(N)


def solve_superposed(u1, k: int, equation: EquationSpec | None = None, n_points: int = 4000,
                     radius: float | None = None, composite_boundary=None,
                     tol: float = 1e-10) -> SolveReport:
    """Add ``k`` vortices at the origin to a radial solution ``u1``.

    ``u1`` is a :class:`SolveReport` from :func:`solve_radial` or a radial
    :class:`ClosedFormSolution`.  The added part solves the mapped equation on
    the Baptista background; the composite ``u1 + u2`` is then checked with the
    same discrete operator against the original equation with multiplicity
    ``m1 + k`` and the result is stored in ``extra``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if isinstance(u1, ClosedFormSolution):
        equation = u1.equation if equation is None else equation
        chart = u1.chart
        m1 = _radial_closed_form_multiplicity(u1)
        R = radius if radius is not None else (0.999 * chart.valid_radius
                                               if math.isfinite(chart.valid_radius) else 2.0)
        bg0 = RadialBackground.from_chart(chart)
        r_min_ratio = 1e-6
        grid = radial_grid(R, n_points, bg0.valid_radius, r_min_ratio)
        u1_vals = np.asarray(u1.u(grid.r.astype(complex)), float)
    elif isinstance(u1, SolveReport):
        prob = u1.problem
        equation = prob.equation if equation is None else equation
        m1 = prob.multiplicity
        R = prob.radius
        bg0 = prob.background
        r_min_ratio = prob.r_min_ratio
        n_points = u1.n_points
        grid = radial_grid(R, n_points, bg0.valid_radius, r_min_ratio)
        u1_vals = u1.u
    else:
        raise TypeError("u1 must be a SolveReport or a ClosedFormSolution")
    n = integrable_order(equation)
    new_eq = superposition_equation(equation)
    om0 = np.asarray(bg0.omega(grid.r), float)
    om_b = om0 * np.exp(2 * n * u1_vals)
    bg = RadialBackground(_SampledBackground(grid.r, om_b), bg0.valid_radius,
                          bg0.cone_exponent + n * m1, f"Baptista(n={n}, m1={m1})")
    if composite_boundary is None:
        vac = equation.vacuum_values()
        if not vac:
            raise PreconditionError("original equation has no vacuum; pass composite_boundary")
        target = vac[0]
    else:
        target = composite_boundary(R) if callable(composite_boundary) else float(composite_boundary)
    prob2 = RadialProblem(new_eq, k, bg, R, "dirichlet", target - float(u1_vals[-1]), r_min_ratio)
    rep = solve_radial(prob2, n_points, tol)
    u = u1_vals + rep.u
    comp_prob = RadialProblem(equation, m1 + k, bg0, R, "dirichlet", target, r_min_ratio)
    comp = radial_residual(comp_prob, u, n_points)
    rep.extra.update({
        "mapped_equation": list(new_eq.coefficients),
        "composite_multiplicity": m1 + k,
        "composite_residual": float(np.max(np.abs(comp))),
        "composite_u": u,
        "u1": u1_vals,
    })
    return rep


# ----------------------------------------------------------------------------
# type III transform


@dataclass(frozen=True, eq=False)
class TypeIIITransform:
    """``u = u' - (x/2) log Omega0`` removes ``C0`` when ``x K0 = C0``.

    In metric form the transformed coefficients are ``C_{2k} / Omega0^{k x}``;
    in flat form (``-lap u' = sum c_k e^{2k u'}``) they are ``Omega0^{1 - k x} C_{2k}``.
    """

    equation: EquationSpec
    x: float
    chart: SurfaceChart

    def metric_coefficients(self, z) -> list:
        om = self.chart.omega(np.asarray(z, complex))
        return [np.zeros_like(om)] + [c * om ** (-k * self.x)
                                      for k, c in enumerate(self.equation.coefficients) if k > 0]

    def flat_coefficients(self, z) -> list:
        om = self.chart.omega(np.asarray(z, complex))
        return [np.zeros_like(om)] + [c * om ** (1 - k * self.x)
                                      for k, c in enumerate(self.equation.coefficients) if k > 0]

    def pattern(self) -> list:
        """Symbolic flat-form pattern, e.g. ``['0', 'Omega0^(1/2)*C2', 'C4']``."""
        out = ["0"]
        for k in range(1, self.equation.order + 1):
            e = 1 - k * self.x
            name = f"C{2 * k}"
            if e == 0:
                out.append(name)
            elif e == 1:
                out.append(f"Omega0*{name}")
            else:
                out.append(f"Omega0^({Fraction(e).limit_denominator(100)})*{name}")
        return out

    def log_omega(self, like: ScalarField) -> ScalarField:
        om = chart_field(self.chart, like)
        return om.map(np.log, lambda v: 1 / v, lambda v: -1 / v**2)

    def to_original(self, u_prime: ScalarField) -> ScalarField:
        return u_prime - self.log_omega(u_prime) * (0.5 * self.x)

    def to_transformed(self, u: ScalarField) -> ScalarField:
        return u + self.log_omega(u) * (0.5 * self.x)

    def residual(self, u_prime: ScalarField, form: str = "metric", mode: str = "auto") -> ScalarField:
        """Residual of the transformed equation for ``u'``."""
        lap = laplace_beltrami(self.chart, u_prime, mode=mode)
        cs = self.metric_coefficients(u_prime.points)
        with np.errstate(all="ignore"):
            rhs = sum(cs[k] * np.exp(2 * k * u_prime.values) for k in range(1, len(cs)))
            vals = lap.values - rhs
            if form == "flat":
                vals = vals * self.chart.omega(u_prime.points)
            elif form != "metric":
                raise ValueError(f"unknown residual form {form!r}")
        return u_prime.with_values(vals, flags=lap.flags | ~np.isfinite(vals))

    def to_dict(self) -> dict:
        return {"equation": self.equation.to_dict(), "x": self.x, "K0": self.chart.curvature,
                "substitution": f"u = u' - ({self.x:g}/2) log Omega0",
                "flat_pattern": self.pattern()}


def transform_typeIII(spec: EquationSpec, x: float, K0: float) -> TypeIIITransform:
    if spec.C0 == 0:
        raise PreconditionError("transform needs C0 != 0")
    if not math.isclose(x * K0, spec.C0, rel_tol=1e-12, abs_tol=1e-12):
        raise PreconditionError(f"x K0 = {x * K0:g} must equal C0 = {spec.C0:g}")
    return TypeIIITransform(spec, float(x), SurfaceChart(K0))

