"""Constant-curvature charts, conformal factors and finite-difference geometry.

Conventions
-----------
A chart carries the metric ``g0 = Omega0 dz dzbar`` with
``Omega0 = 4 / (1 + K0 |z|^2)^2``.  The Laplacian is the positive (Hodge)
one, ``Delta_g u = -(4/Omega) d_z d_zbar u = -(u_xx + u_yy) / Omega``.

Sampled fields are :class:`ScalarField` objects.  Each field stores the
value at a set of centre points together with the four 5-point stencil
neighbours at spacing ``h`` and, when available, the exact gradient and flat
Laplacian.  Pointwise maps (``exp``, ``log``, products) propagate all three,
so the same field can be differentiated either by central differences or
exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

DEFAULT_SPACING = 1e-3
DEFAULT_EXCLUSION = 0.05

# +x, -x, +iy, -iy
STENCIL_OFFSETS = np.array([1.0, -1.0, 1.0j, -1.0j])


class DomainError(ValueError):
    """A point or sample lies outside the region where a quantity is defined."""


class GridMismatchError(ValueError):
    """Two fields were combined that are not sampled on the same points."""


@dataclass(frozen=True)
class SurfaceChart:
    """Local complex coordinate on a surface of constant Gauss curvature."""

    curvature: float = 0.0
    kind: str = ""

    def __post_init__(self):
        k = float(self.curvature)
        object.__setattr__(self, "curvature", k)
        if not self.kind:
            kind = "disc" if k < 0 else ("plane" if k == 0 else "sphere-chart")
            object.__setattr__(self, "kind", kind)
        if self.kind not in ("plane", "disc", "sphere-chart"):
            raise ValueError(f"unknown chart kind {self.kind!r}")

    @property
    def valid_radius(self) -> float:
        if self.curvature >= 0:
            return math.inf
        return 1.0 / math.sqrt(-self.curvature)

    def contains(self, z) -> np.ndarray:
        return np.abs(z) < self.valid_radius

    def check(self, z):
        z = np.asarray(z, dtype=complex)
        bad = ~self.contains(z)
        if np.any(bad):
            first = z[bad].flat[0]
            raise DomainError(
                f"point z={first:.6g} lies outside the chart "
                f"(|z| must be < {self.valid_radius:.6g} for K0={self.curvature:g})"
            )
        return z

    def omega(self, z):
        """Conformal factor without domain checks (vectorised)."""
        return 4.0 / (1.0 + self.curvature * np.abs(z) ** 2) ** 2

    def log_omega_jet(self, z):
        """``log Omega0`` with its exact gradient and flat Laplacian."""
        z = np.asarray(z, dtype=complex)
        k = self.curvature
        a = 1.0 + k * np.abs(z) ** 2
        val = math.log(4.0) - 2.0 * np.log(a)
        dz = -2.0 * k * np.conj(z) / a
        lap = -8.0 * k / a**2
        return val, 2.0 * dz.real, -2.0 * dz.imag, lap

    def to_dict(self) -> dict:
        r = self.valid_radius
        return {"K0": self.curvature, "kind": self.kind,
                "valid_radius": None if math.isinf(r) else r}


def conformal_factor(chart: SurfaceChart, z):
    """Return ``4 / (1 + K0 |z|^2)^2``, rejecting points outside the chart."""
    z = chart.check(z)
    out = chart.omega(z)
    return float(out) if out.ndim == 0 else out


def _as_points(points) -> np.ndarray:
    return np.atleast_1d(np.asarray(points, dtype=complex))


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real samples at complex points, with stencil neighbours and optional exact jet.

    ``log_singularities`` lists ``(z_k, c_k)`` pairs describing a known
    harmonic singular part.  For potential-like fields (``u``) the values
    contain ``sum c_k log|z - z_k|``; for metric-like fields (``Omega``) the
    logarithm of the values does.  Stencil derivatives subtract this part and
    use its exact (zero) Laplacian.
    """

    points: np.ndarray
    values: np.ndarray
    chart: SurfaceChart
    spacing: float = DEFAULT_SPACING
    neighbors: np.ndarray | None = None
    grad: np.ndarray | None = None
    flat_laplacian: np.ndarray | None = None
    flags: np.ndarray | None = None
    exclusion_radius: float = DEFAULT_EXCLUSION
    log_singularities: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        vals = np.asarray(self.values, dtype=float)
        if pts.shape != vals.shape:
            raise GridMismatchError(f"points {pts.shape} and values {vals.shape} differ")
        if np.any(~self.chart.contains(pts)):
            raise DomainError("sample point outside the chart's valid radius")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)
        flags = np.zeros(pts.shape, bool) if self.flags is None else np.asarray(self.flags, bool)
        flags = flags | ~np.isfinite(vals)
        if self.neighbors is not None:
            flags = flags | ~np.all(np.isfinite(self.neighbors), axis=0)
        object.__setattr__(self, "flags", flags)

    @property
    def shape(self):
        return self.points.shape

    @property
    def mask(self) -> np.ndarray:
        """True at points that take part in norms."""
        return ~self.flags

    def sup(self) -> float:
        v = np.abs(self.values[self.mask])
        return float(v.max()) if v.size else 0.0

    def same_grid(self, other: "ScalarField"):
        if self.shape != other.shape or not np.array_equal(self.points, other.points):
            raise GridMismatchError("fields are sampled on different points")
        if self.spacing != other.spacing:
            raise GridMismatchError(
                f"stencil spacings differ ({self.spacing} vs {other.spacing})")

    def map(self, g: Callable, dg: Callable | None = None, d2g: Callable | None = None,
            log_singularities: tuple = ()) -> "ScalarField":
        """Apply ``g`` pointwise; the exact jet survives when ``dg`` and ``d2g`` are given."""
        with np.errstate(all="ignore"):
            vals = g(self.values)
            nbs = None if self.neighbors is None else g(self.neighbors)
            grad = lap = None
            if self.grad is not None and dg is not None and d2g is not None:
                d1 = dg(self.values)
                grad = d1 * self.grad
                if self.flat_laplacian is not None:
                    lap = d1 * self.flat_laplacian + d2g(self.values) * np.sum(self.grad**2, axis=0)
        return replace(self, values=vals, neighbors=nbs, grad=grad, flat_laplacian=lap,
                       flags=self.flags.copy(), log_singularities=tuple(log_singularities))

    def _binary(self, other, op: str) -> "ScalarField":
        if not isinstance(other, ScalarField):
            c = float(other)
            if op == "add":
                return replace(self, values=self.values + c,
                               neighbors=None if self.neighbors is None else self.neighbors + c,
                               flags=self.flags.copy())
            return replace(self, values=self.values * c,
                           neighbors=None if self.neighbors is None else self.neighbors * c,
                           grad=None if self.grad is None else self.grad * c,
                           flat_laplacian=None if self.flat_laplacian is None else self.flat_laplacian * c,
                           flags=self.flags.copy(), log_singularities=())
        self.same_grid(other)
        a, b = self, other
        with np.errstate(all="ignore"):
            if op == "add":
                vals = a.values + b.values
                nbs = (a.neighbors + b.neighbors
                       if a.neighbors is not None and b.neighbors is not None else None)
                grad = a.grad + b.grad if a.grad is not None and b.grad is not None else None
                lap = (a.flat_laplacian + b.flat_laplacian
                       if a.flat_laplacian is not None and b.flat_laplacian is not None else None)
                sing = _merge_singularities(a.log_singularities, b.log_singularities, 1.0)
            else:
                vals = a.values * b.values
                nbs = (a.neighbors * b.neighbors
                       if a.neighbors is not None and b.neighbors is not None else None)
                grad = lap = None
                if a.grad is not None and b.grad is not None:
                    grad = a.values * b.grad + b.values * a.grad
                    if a.flat_laplacian is not None and b.flat_laplacian is not None:
                        lap = (a.values * b.flat_laplacian + b.values * a.flat_laplacian
                               + 2.0 * np.sum(a.grad * b.grad, axis=0))
                sing = _merge_singularities(a.log_singularities, b.log_singularities, 1.0)
        return replace(a, values=vals, neighbors=nbs, grad=grad, flat_laplacian=lap,
                       flags=a.flags | b.flags, log_singularities=sing,
                       exclusion_radius=max(a.exclusion_radius, b.exclusion_radius))

    def __add__(self, other):
        return self._binary(other, "add")

    __radd__ = __add__

    def __mul__(self, other):
        return self._binary(other, "mul")

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other if isinstance(other, ScalarField) else -float(other))

    def with_values(self, values, flags=None) -> "ScalarField":
        """Derived field on the same points carrying no derivative data."""
        return replace(self, values=np.asarray(values, float), neighbors=None, grad=None,
                       flat_laplacian=None, log_singularities=(),
                       flags=self.flags.copy() if flags is None else flags)


def _merge_singularities(a: tuple, b: tuple, scale: float) -> tuple:
    out: dict = {}
    for z, c in a:
        out[complex(z)] = out.get(complex(z), 0.0) + c
    for z, c in b:
        out[complex(z)] = out.get(complex(z), 0.0) + scale * c
    return tuple((z, c) for z, c in out.items() if c != 0.0)


def exclusion_flags(points, exclusion: Iterable, radius: float) -> np.ndarray:
    pts = np.asarray(points, dtype=complex)
    flags = np.zeros(pts.shape, bool)
    for zk in exclusion:
        flags |= np.abs(pts - complex(zk)) <= radius
    return flags


def sample_field(func: Callable, points, chart: SurfaceChart, spacing: float = DEFAULT_SPACING,
                 jet: Callable | None = None, exclusion: Sequence = (),
                 exclusion_radius: float = DEFAULT_EXCLUSION,
                 log_singularities: Sequence = ()) -> ScalarField:
    """Sample ``func`` at ``points`` and at their four stencil neighbours.

    ``jet(points)`` may return ``(values, u_x, u_y, flat_laplacian)`` with exact
    derivatives.  Points within ``exclusion_radius`` of an ``exclusion`` point,
    and points whose stencil leaves the chart, are flagged.
    """
    pts = chart.check(_as_points(points))
    nb_pts = pts[None, ...] + spacing * STENCIL_OFFSETS.reshape((4,) + (1,) * pts.ndim)
    inside = chart.contains(nb_pts)
    with np.errstate(all="ignore"):
        if jet is not None:
            vals, gx, gy, lap = jet(pts)
            grad = np.stack([np.asarray(gx, float), np.asarray(gy, float)])
            lap = np.asarray(lap, float)
        else:
            vals = func(pts)
            grad = lap = None
        nbs = np.full(nb_pts.shape, np.nan)
        if np.any(inside):
            nbs[inside] = func(nb_pts[inside])
    flags = exclusion_flags(pts, exclusion, exclusion_radius) | ~np.all(inside, axis=0)
    return ScalarField(pts, np.asarray(vals, float), chart, spacing, nbs, grad, lap, flags,
                       exclusion_radius, tuple((complex(z), float(c)) for z, c in log_singularities))


def grid_field(values, x, y, chart: SurfaceChart, exclusion: Sequence = (),
               exclusion_radius: float = DEFAULT_EXCLUSION) -> ScalarField:
    """Wrap data on a uniform Cartesian grid ``values[j, i]`` at ``(x[i], y[j])``.

    Neighbours come from the grid itself; the two outermost layers are flagged.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    vals = np.asarray(values, float)
    if vals.shape != (y.size, x.size):
        raise GridMismatchError(f"values {vals.shape} do not match grid ({y.size}, {x.size})")
    hx = np.diff(x)
    hy = np.diff(y)
    h = float(hx[0])
    if not (np.allclose(hx, h, rtol=1e-9) and np.allclose(hy, h, rtol=1e-9)):
        raise GridMismatchError("grid must be uniform with equal spacing in x and y")
    X, Y = np.meshgrid(x, y)
    pts = X + 1j * Y
    nbs = np.full((4,) + vals.shape, np.nan)
    nbs[0][:, :-1] = vals[:, 1:]
    nbs[1][:, 1:] = vals[:, :-1]
    nbs[2][:-1, :] = vals[1:, :]
    nbs[3][1:, :] = vals[:-1, :]
    flags = np.zeros(vals.shape, bool)
    flags[:2, :] = flags[-2:, :] = True
    flags[:, :2] = flags[:, -2:] = True
    flags |= exclusion_flags(pts, exclusion, exclusion_radius)
    return ScalarField(pts, vals, chart, h, nbs, None, None, flags, exclusion_radius)


def square_points(center: complex = 0.0, half_width: float = 1.0, step: float = 0.05) -> np.ndarray:
    """Cartesian lattice of centre points in a square."""
    n = int(round(2 * half_width / step)) + 1
    t = np.linspace(-half_width, half_width, n)
    X, Y = np.meshgrid(t, t)
    return complex(center) + X + 1j * Y


def polar_points(center: complex = 0.0, radii=(0.5,), n_theta: int = 32) -> np.ndarray:
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    r = np.asarray(radii, float)
    return complex(center) + r[:, None] * np.exp(1j * theta)[None, :]


def chart_field(chart: SurfaceChart, like: ScalarField) -> ScalarField:
    """``Omega0`` sampled like ``like`` (same points and spacing), with exact jet."""
    pts = like.points
    h = like.spacing
    nb_pts = pts[None, ...] + h * STENCIL_OFFSETS.reshape((4,) + (1,) * pts.ndim)
    with np.errstate(all="ignore"):
        nbs = np.where(chart.contains(nb_pts), chart.omega(nb_pts), np.nan)
    lv, lx, ly, llap = chart.log_omega_jet(pts)
    om = np.exp(lv)
    grad = np.stack([om * lx, om * ly])
    lap = om * llap + om * (lx**2 + ly**2)
    return ScalarField(pts, om, chart, h, nbs, grad, lap, like.flags.copy(),
                       like.exclusion_radius)


def baptista_factor(chart: SurfaceChart, u, n: int, points=None,
                    spacing: float = DEFAULT_SPACING) -> ScalarField:
    """``Omega_{2n} = Omega0 exp(2 n u)`` on the points of ``u``.

    ``u`` is a :class:`ScalarField`, or a callable evaluated at ``points``.
    """
    if n < 0 or int(n) != n:
        raise ValueError("Baptista order must be a non-negative integer")
    n = int(n)
    if not isinstance(u, ScalarField):
        if points is None:
            raise ValueError("points are required when u is a callable")
        u = sample_field(u, points, chart, spacing)
    elif points is not None:
        pts = _as_points(points)
        if pts.shape != u.shape or not np.array_equal(pts, u.points):
            raise GridMismatchError("requested points differ from the grid of u")
    om0 = chart_field(chart, u)
    om0 = replace(om0, flags=u.flags.copy())
    if n == 0:
        return om0
    c = 2.0 * n
    e = u.map(lambda v: np.exp(c * v), lambda v: c * np.exp(c * v),
              lambda v: c * c * np.exp(c * v),
              log_singularities=tuple((z, c * w) for z, w in u.log_singularities))
    return om0 * e


def _harmonic_part(sing: tuple, pts: np.ndarray):
    vals = np.zeros(pts.shape)
    for zk, c in sing:
        with np.errstate(all="ignore"):
            vals = vals + c * np.log(np.abs(pts - zk))
    return vals


def stencil_flat_laplacian(f: ScalarField) -> np.ndarray:
    """Five-point ``u_xx + u_yy`` with the declared harmonic singular part removed."""
    if f.neighbors is None:
        raise ValueError("field carries no stencil neighbours")
    h = f.spacing
    vals, nbs = f.values, f.neighbors
    if f.log_singularities:
        nb_pts = f.points[None, ...] + h * STENCIL_OFFSETS.reshape((4,) + (1,) * f.points.ndim)
        with np.errstate(invalid="ignore"):
            vals = vals - _harmonic_part(f.log_singularities, f.points)
            nbs = nbs - _harmonic_part(f.log_singularities, nb_pts)
    with np.errstate(all="ignore"):
        return (nbs.sum(axis=0) - 4.0 * vals) / (h * h)


def flat_laplacian(f: ScalarField, mode: str = "auto") -> np.ndarray:
    if mode not in ("auto", "exact", "stencil"):
        raise ValueError(f"unknown derivative mode {mode!r}")
    if mode == "exact" or (mode == "auto" and f.flat_laplacian is not None):
        if f.flat_laplacian is None:
            raise ValueError("field carries no exact Laplacian")
        return f.flat_laplacian
    return stencil_flat_laplacian(f)


def _omega_values(omega, u: ScalarField):
    if isinstance(omega, SurfaceChart):
        return omega.omega(u.points), u.flags
    if isinstance(omega, ScalarField):
        u.same_grid(omega)
        return omega.values, omega.flags
    om = np.asarray(omega, float)
    if om.shape != u.shape:
        raise GridMismatchError("conformal factor array does not match the grid")
    return om, np.zeros(u.shape, bool)


def laplace_beltrami(omega, u: ScalarField, stencil_spacing: float | None = None,
                     mode: str = "auto") -> ScalarField:
    """Positive Laplacian ``-(4/Omega) d_z d_zbar u`` of ``u``.

    ``omega`` is a chart or any conformal-factor field on the grid of ``u``
    (Baptista backgrounds included).
    """
    if stencil_spacing is not None and not math.isclose(stencil_spacing, u.spacing):
        raise GridMismatchError(
            f"field was sampled at spacing {u.spacing}, not {stencil_spacing}")
    om, oflags = _omega_values(omega, u)
    lap = flat_laplacian(u, mode)
    with np.errstate(all="ignore"):
        vals = -lap / om
    return u.with_values(vals, flags=u.flags | oflags | ~np.isfinite(vals))


def gauss_curvature(omega: ScalarField, stencil_spacing: float | None = None,
                    mode: str = "auto") -> ScalarField:
    """``K = -(2/Omega) d_z d_zbar log Omega`` of a sampled conformal factor."""
    if stencil_spacing is not None and not math.isclose(stencil_spacing, omega.spacing):
        raise GridMismatchError(
            f"field was sampled at spacing {omega.spacing}, not {stencil_spacing}")
    live = omega.mask
    if np.any(omega.values[live] <= 0):
        bad = omega.points[live][omega.values[live] <= 0][0]
        raise DomainError(f"conformal factor is not positive at z={bad:.6g}")
    logf = omega.map(np.log, lambda v: 1.0 / v, lambda v: -1.0 / v**2,
                     log_singularities=omega.log_singularities)
    lap = flat_laplacian(logf, mode)
    with np.errstate(all="ignore"):
        vals = -0.5 * lap / omega.values
    return omega.with_values(vals, flags=omega.flags | ~np.isfinite(vals))
