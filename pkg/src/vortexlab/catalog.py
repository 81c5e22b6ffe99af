"""Enumeration, classification and normalisation of Taubes-form vortex equations.

An equation of order ``L`` is

    Delta_g0 u + delta_D / Omega0 = -C0 + C2 e^{2u} + ... + C_{2L} e^{2Lu}

and is identified by the sign pattern of ``(C0, C2, ..., C_{2L})``.
"""
from __future__ import annotations

import difflib
import itertools
import math
from dataclasses import dataclass, field
from math import comb

import numpy as np


class ClassificationError(ValueError):
    """Coefficient pattern violates the positive flux condition."""


NAMED_PATTERNS = {
    (): "Laplace",
    ((0, -1),): "Bradlow",
    ((1, 1),): "Jackiw-Pi",
    ((0, -1), (1, -1)): "Taubes",
    ((0, 1), (1, 1)): "Popov",
    ((0, -1), (1, 1)): "Ambjørn-Olesen",
    ((1, 1), (2, -1)): "Chern-Simons",
}

NAME_ALIASES = {
    "laplace": "Laplace", "bradlow": "Bradlow", "jackiw-pi": "Jackiw-Pi",
    "jackiwpi": "Jackiw-Pi", "jp": "Jackiw-Pi", "taubes": "Taubes", "hyperbolic": "Taubes",
    "popov": "Popov", "ambjorn-olesen": "Ambjørn-Olesen", "ambjørn-olesen": "Ambjørn-Olesen",
    "ao": "Ambjørn-Olesen", "chern-simons": "Chern-Simons", "cs": "Chern-Simons",
}

# Row order of the L = 2 classification table (signs of C0, C2, C4).
TABLE1_ORDER = (
    (0, 0, 0),
    (-1, 0, 0), (0, 1, 0), (0, 0, 1),
    (-1, -1, 0), (1, 1, 0), (-1, 1, 0),
    (-1, 0, -1), (1, 0, 1), (-1, 0, 1),
    (0, 1, -1), (0, -1, 1), (0, 1, 1),
    (-1, -1, 1), (-1, 1, 1), (1, -1, 1), (1, 1, 1),
    (-1, -1, -1), (-1, 1, -1), (1, 1, -1),
)

ROMAN = ("0", "I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X",
         "XI", "XII", "XIII", "XIV")


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class EquationSpec:
    """Vortex coefficients ``(C0, C2, ..., C_{2L})``; the empty tuple is ``L = -1``."""

    coefficients: tuple = ()
    canonical: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))

    @classmethod
    def of(cls, *coeffs, canonical=False) -> "EquationSpec":
        return cls(tuple(coeffs), canonical)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, k: int) -> float:
        """``C_{2k}`` (zero beyond the stored order)."""
        return self.coefficients[k] if 0 <= k < len(self.coefficients) else 0.0

    @property
    def C0(self) -> float:
        return self.coefficient(0)

    @property
    def nonzero(self) -> tuple:
        return tuple(k for k, c in enumerate(self.coefficients) if c != 0.0)

    @property
    def signs(self) -> tuple:
        return tuple(_sign(c) for c in self.coefficients)

    @property
    def flux_signs(self) -> tuple:
        """Signs of ``(-C0, C2, ..., C_{2L})``."""
        s = self.signs
        return ((-s[0],) + s[1:]) if s else ()

    @property
    def admissible(self) -> bool:
        s = self.flux_signs
        return all(x == 0 for x in s) or any(x > 0 for x in s)

    def padded(self, L: int) -> "EquationSpec":
        if L < self.order:
            if any(self.coefficients[L + 1:]):
                raise ValueError(f"cannot truncate {self.coefficients} to order {L}")
            return EquationSpec(self.coefficients[:L + 1], self.canonical)
        return EquationSpec(self.coefficients + (0.0,) * (L - self.order), self.canonical)

    def P(self, t):
        """Vortex polynomial ``-C0 + sum_k C_{2k} t^k`` at ``t = e^{2u}``."""
        out = -self.C0 + np.zeros_like(np.asarray(t, float))
        for k in range(1, len(self.coefficients)):
            if self.coefficients[k]:
                out = out + self.coefficients[k] * np.asarray(t, float) ** k
        return out

    def P_of_u(self, u):
        u = np.asarray(u, float)
        out = -self.C0 + np.zeros_like(u)
        for k in range(1, len(self.coefficients)):
            if self.coefficients[k]:
                out = out + self.coefficients[k] * np.exp(2 * k * u)
        return out

    def dP_du(self, u):
        u = np.asarray(u, float)
        out = np.zeros_like(u)
        for k in range(1, len(self.coefficients)):
            if self.coefficients[k]:
                out = out + 2 * k * self.coefficients[k] * np.exp(2 * k * u)
        return out

    def vacuum_values(self) -> list:
        """Real ``u`` with ``P(e^{2u}) = 0``, most stable (most negative dP/du) first."""
        if not self.coefficients or not any(self.coefficients[1:]):
            return []
        poly = np.array([-self.C0] + list(self.coefficients[1:]))
        roots = np.polynomial.polynomial.polyroots(poly)
        out = []
        for r in roots:
            if abs(r.imag) < 1e-12 * max(1.0, abs(r)) and r.real > 0:
                out.append(0.5 * math.log(r.real))
        out.sort(key=lambda u: float(self.dP_du(u)))
        return out

    @classmethod
    def from_name(cls, name: str, L: int = 2) -> "EquationSpec":
        key = name.strip().lower().replace("_", "-").replace(" ", "-")
        canon = NAME_ALIASES.get(key)
        if canon is None:
            for pat, nm in NAMED_PATTERNS.items():
                if nm.lower() == key:
                    canon = nm
        if canon is None:
            pool = sorted(set(NAME_ALIASES) | {n.lower() for n in NAMED_PATTERNS.values()})
            near = difflib.get_close_matches(key, pool, n=3, cutoff=0.5)
            hint = f"; did you mean {', '.join(near)}?" if near else ""
            raise KeyError(f"unknown equation name {name!r}{hint}")
        pat = next(p for p, n in NAMED_PATTERNS.items() if n == canon)
        coeffs = [0.0] * (L + 1)
        for k, s in pat:
            if k > L:
                raise ValueError(f"{canon} needs order L >= {k}")
            coeffs[k] = float(s)
        return cls(tuple(coeffs), canonical=True)

    def to_dict(self) -> dict:
        return {"coefficients": list(self.coefficients), "L": self.order,
                "canonical": self.canonical}


@dataclass(frozen=True)
class TypeLabel:
    type_class: int
    subscript: tuple
    sign_string: str
    name: str | None = None

    @property
    def type_name(self) -> str:
        return "type" + ROMAN[self.type_class] if self.type_class < len(ROMAN) else f"type{self.type_class}"

    @property
    def subscript_string(self) -> str:
        return "".join(str(2 * k) if 2 * k < 10 else f"({2 * k})" for k in self.subscript)

    def __str__(self) -> str:
        if self.type_class == 0:
            return "type 0"
        rn = ROMAN[self.type_class] if self.type_class < len(ROMAN) else str(self.type_class)
        return f"{rn}_{self.subscript_string}^{self.sign_string}"

    def to_dict(self) -> dict:
        return {"type": str(self), "type_class": self.type_class,
                "subscript": [2 * k for k in self.subscript],
                "signs": self.sign_string, "name": self.name}


def hilbert_function(L: int) -> int:
    """Number of admissible equations of order ``L`` (Laplace included)."""
    if L < -1:
        raise ValueError("L must be >= -1")
    return 3 ** (L + 1) - 2 ** (L + 1) + 1


def type_count(L: int, m: int) -> int:
    """Closed-form count of type-``m`` equations at order ``L``."""
    if m == 0:
        return 1
    return comb(L + 1, m) * (2 ** m - 1)


def classify(spec: EquationSpec) -> TypeLabel:
    if not spec.admissible:
        raise ClassificationError(
            f"coefficients {spec.coefficients} violate the positive flux condition: "
            "the signs of (-C0, C2, ..., C2L) are all non-positive, so no positive "
            "vortex number is possible")
    nz = spec.nonzero
    signs = "".join("+" if spec.coefficients[k] > 0 else "-" for k in nz)
    key = tuple((k, _sign(spec.coefficients[k])) for k in nz)
    return TypeLabel(len(nz), nz, signs, NAMED_PATTERNS.get(key))


def _sort_key(L: int):
    def key(signs):
        if L == 2 and signs in TABLE1_ORDER:
            return (0, TABLE1_ORDER.index(signs))
        nz = tuple(k for k, s in enumerate(signs) if s)
        # positive flux signs first, then lexicographic
        return (1, len(nz), nz, tuple(-s for s in signs))
    return key


def enumerate_equations(L: int) -> list:
    """All admissible sign patterns of order ``L`` with their labels."""
    if L < -1:
        raise ValueError("L must be >= -1")
    if L == -1:
        spec = EquationSpec((), canonical=True)
        return [(spec, classify(spec))]
    patterns = [p for p in itertools.product((-1, 0, 1), repeat=L + 1)
                if EquationSpec(p).admissible]
    patterns.sort(key=_sort_key(L))
    out = []
    for p in patterns:
        spec = EquationSpec(p, canonical=True)
        out.append((spec, classify(spec)))
    return out


def integrable_order(spec: EquationSpec) -> int | None:
    """Order ``n`` of the closed-form family the pattern belongs to, else ``None``.

    Laplace and Bradlow use ``n = 1``.
    """
    nz = spec.nonzero
    higher = [k for k in nz if k > 0]
    if not spec.admissible:
        return None
    if len(higher) == 0:
        return 1
    if len(higher) == 1:
        k = higher[0]
        if 0 not in nz:
            return k if spec.coefficients[k] > 0 else None
        return k
    return None


def is_integrable(spec: EquationSpec) -> bool:
    return integrable_order(spec) is not None


def _geometry_label(K: float) -> str:
    return "H^2" if K < 0 else ("R^2" if K == 0 else "S^2")


def geometry_columns(spec: EquationSpec, L: int | None = None) -> dict | None:
    """Constant-curvature geometry of ``M_0, M_2, ...`` for integrable patterns.

    ``"--"`` marks a Baptista manifold without constant curvature.
    """
    n = integrable_order(spec)
    if n is None:
        return None
    L = spec.order if L is None else L
    s = spec.padded(L).signs
    cols = {"M_0": _geometry_label(n * s[0])}
    higher = [k for k in spec.nonzero if k > 0]
    for k in range(1, L + 1):
        if not higher:
            # Laplace and Bradlow: listed as flat for every order
            cols[f"M_{2 * k}"] = "R^2"
        elif k == n:
            cols[f"M_{2 * k}"] = _geometry_label(s[k])
        else:
            cols[f"M_{2 * k}"] = "--"
    return cols


@dataclass(frozen=True)
class Rescaling:
    """``u = u_canonical + u_shift`` and ``z = z_scale * z_canonical``."""

    u_shift: float = 0.0
    z_scale: float = 1.0
    residual_coefficients: dict = field(default_factory=dict)

    @property
    def metric_scale(self) -> float:
        return self.z_scale ** -2

    def apply(self, canonical: EquationSpec) -> EquationSpec:
        """Recover the original coefficients from canonical ones."""
        mu = self.metric_scale
        return EquationSpec(tuple(c * mu * math.exp(-2 * k * self.u_shift)
                                  for k, c in enumerate(canonical.coefficients)))

    def rescale_curvature(self, K0: float) -> float:
        return K0 * self.z_scale ** 2

    def to_dict(self) -> dict:
        return {"u_shift": self.u_shift, "z_scale": self.z_scale,
                "residual_coefficients": {f"C_{2 * k}": v
                                          for k, v in sorted(self.residual_coefficients.items())}}


def normalize(spec: EquationSpec) -> tuple:
    """Scale the two lowest nonzero coefficients to unit magnitude.

    Uses the shift ``u -> u + s`` and the coordinate scaling ``z -> z_scale z``
    (a constant metric rescaling by ``mu = z_scale^-2``).  Remaining nonzero
    coefficients are family parameters and are reported in the rescaling.
    """
    c = spec.coefficients
    nz = spec.nonzero
    if not nz:
        return EquationSpec(c, canonical=True), Rescaling()
    if len(nz) == 1:
        k = nz[0]
        if k == 0:
            s, mu = 0.0, abs(c[0])
        else:
            s, mu = -math.log(abs(c[k])) / (2 * k), 1.0
    else:
        i, j = nz[0], nz[1]
        s = math.log(abs(c[i]) / abs(c[j])) / (2 * (j - i))
        mu = abs(c[i]) * math.exp(2 * i * s)
    new = [ck * math.exp(2 * k * s) / mu for k, ck in enumerate(c)]
    fixed = nz[:2]
    for k in fixed:
        new[k] = float(_sign(new[k]))
    residual = {k: new[k] for k in nz[2:]}
    return (EquationSpec(tuple(new), canonical=True),
            Rescaling(u_shift=s, z_scale=mu ** -0.5, residual_coefficients=residual))


def catalog_rows(L: int) -> list:
    """Catalogue entries as plain dictionaries (the JSON export format)."""
    rows = []
    for spec, label in enumerate_equations(L):
        rows.append({
            "coefficients": [int(x) for x in spec.coefficients],
            "type": str(label),
            "name": label.name,
            "integrable": is_integrable(spec),
            "geometry": geometry_columns(spec, L),
        })
    return rows


def format_table(L: int, integrable_only: bool = False) -> str:
    """Aligned text table; with ``integrable_only`` the geometry columns are added."""
    rows = catalog_rows(L)
    if integrable_only:
        rows = [r for r in rows if r["integrable"]]
    cols = [f"C_{2 * k}" for k in range(L + 1)]
    geo = [f"M_{2 * k}" for k in range(L + 1)] if integrable_only else []
    header = ["type", "name"] + cols + geo
    body = []
    for r in rows:
        line = [r["type"], r["name"] or "--"]
        line += [f"{c:+d}" if c else "0" for c in r["coefficients"]]
        if integrable_only:
            line += [r["geometry"][g] for g in geo]
        body.append(line)
    widths = [max(len(x[i]) for x in [header] + body) for i in range(len(header))]
    out = []
    for line in [header] + body:
        cells = [line[i].ljust(widths[i]) if i < 2 else line[i].rjust(widths[i])
                 for i in range(len(line))]
        out.append("  ".join(cells).rstrip())
    return "\n".join(out) + "\n"
