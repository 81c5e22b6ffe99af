"""CSV export with JSON sidecars.

Fields are written as ``x,y,value,flag`` and radial profiles as
``r,u,phisq,residual``.  Floats use ``repr`` so that every value round-trips
exactly; files are UTF-8 with ``\\n`` line endings and the sidecar JSON is
written with sorted keys, so repeated exports are byte-identical.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .surface import ScalarField, SurfaceChart

FIELD_HEADER = ("x", "y", "value", "flag")
PROFILE_HEADER = ("r", "u", "phisq", "residual")


class ExportError(OSError):
    pass


def _fmt(v) -> str:
    return repr(float(v))


def sidecar_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.name + ".json")


def _write(path, header, rows, meta):
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        with open(sidecar_path(path), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(meta, fh, sort_keys=True, indent=2, allow_nan=True)
            fh.write("\n")
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc


def export_field(f: ScalarField, path, meta: dict | None = None) -> None:
    if f.values.size == 0:
        raise ValueError("field is empty")
    pts = f.points.ravel()
    vals = f.values.ravel()
    flags = f.flags.ravel()
    rows = ((_fmt(z.real), _fmt(z.imag), _fmt(v), str(int(fl))) for z, v, fl in zip(pts, vals, flags))
    side = {"kind": "field", "shape": list(f.shape), "chart": f.chart.to_dict(),
            "spacing": f.spacing, "exclusion_radius": f.exclusion_radius,
            "singularities": [{"re": z.real, "im": z.imag, "weight": c} for z, c in f.log_singularities],
            "columns": list(FIELD_HEADER)}
    side.update(f.meta)
    side.update(meta or {})
    _write(path, FIELD_HEADER, rows, side)


def export_profile(report, path, meta: dict | None = None) -> None:
    """Radial profile of a :class:`~vortexlab.solver.SolveReport`."""
    if report.r.size == 0:
        raise ValueError("profile is empty")
    rows = ((_fmt(r), _fmt(u), _fmt(p), _fmt(res))
            for r, u, p, res in zip(report.r, report.u, report.phisq, report.residual_profile))
    side = {"kind": "profile", "columns": list(PROFILE_HEADER)}
    side.update(report.to_dict(include_profile=False, include_time=False))
    side.update(meta or {})
    _write(path, PROFILE_HEADER, rows, side)


def _read_rows(path, header):
    with open(path, encoding="utf-8", newline="") as fh:
        rd = csv.reader(fh)
        head = tuple(next(rd))
        if head != header:
            raise ValueError(f"{path}: expected header {','.join(header)}, found {','.join(head)}")
        return [row for row in rd]


def read_sidecar(path) -> dict:
    with open(sidecar_path(path), encoding="utf-8") as fh:
        return json.load(fh)


def read_field(path) -> ScalarField:
    rows = _read_rows(path, FIELD_HEADER)
    side = read_sidecar(path)
    shape = tuple(side.get("shape", (len(rows),)))
    x = np.array([float(r[0]) for r in rows])
    y = np.array([float(r[1]) for r in rows])
    v = np.array([float(r[2]) for r in rows]).reshape(shape)
    flags = np.array([r[3] == "1" for r in rows]).reshape(shape)
    c = side["chart"]
    chart = SurfaceChart(c["K0"], c["kind"])
    sing = tuple((complex(s["re"], s["im"]), s["weight"]) for s in side.get("singularities", []))
    return ScalarField((x + 1j * y).reshape(shape), v, chart, side.get("spacing", 1e-3),
                       flags=flags, exclusion_radius=side.get("exclusion_radius", 0.05),
                       log_singularities=sing)


def read_profile(path) -> dict:
    rows = _read_rows(path, PROFILE_HEADER)
    cols = np.array([[float(x) for x in r] for r in rows]).T
    return dict(zip(PROFILE_HEADER, cols))
