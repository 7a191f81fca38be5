"""Deterministic serialization: series and snapshot CSVs, sidecar metadata,
plain-text summaries.

Numbers are written with 17 significant digits so float64 values round-trip
exactly; rebuilding diagnostics from stored snapshots therefore reproduces
the series file byte for byte.  Every emitted file names the hash of the
configuration that produced it in a leading `#` comment.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .diagnostics import RESIDUAL_KEYS, TRACKED_KEYS
from .grid import Field, Grid
from .params import ModelParams
from .reformulate import effective_velocity, log_slope_variable, pressure_variable
from .state import FluidState

SERIES_COLUMNS = (
    ["t", "m", "p_mom", "e_kin", "e_tot", "bd", "diss_energy", "diss_bd", "u_inf", "nondecay_floor"]
    + ["bflux_mass", "bflux_momentum", "clamp_count"]
    + list(TRACKED_KEYS)
    + [f"res_{k}" for k in RESIDUAL_KEYS]
)

SNAPSHOT_COLUMNS = ("x", "rho", "u", "phi", "psi", "v")


def fmt(x: float) -> str:
    return "%.17g" % x


def series_rows(series) -> list:
    rows = []
    for rec in series.records:
        row = [
            rec.t,
            rec.m,
            rec.p_mom,
            rec.e_kin,
            rec.e_tot,
            rec.bd,
            rec.diss_energy,
            rec.diss_bd,
            rec.u_inf,
            rec.nondecay_floor,
            rec.boundary_flux.get("mass", 0.0),
            rec.boundary_flux.get("momentum", 0.0),
            float(rec.clamp_count),
        ]
        row.extend(rec.tracked_norms[k] for k in TRACKED_KEYS)
        row.extend(rec.residuals.get(k, 0.0) for k in RESIDUAL_KEYS)
        rows.append(row)
    return rows


def write_series_csv(path, series, config_hash: str) -> None:
    lines = [f"# config_hash: {config_hash}", ",".join(SERIES_COLUMNS)]
    for row in series_rows(series):
        lines.append(",".join(fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_snapshot_csv(path, state: FluidState, p: ModelParams, config_hash: str) -> None:
    g = state.grid
    phi = pressure_variable(p, state.rho.values)
    psi = log_slope_variable(p, state.rho).values
    v = effective_velocity(state, p).values
    cols = (g.x, state.rho.values, state.u.values, phi, psi, v)
    lines = [f"# config_hash: {config_hash}", ",".join(SNAPSHOT_COLUMNS)]
    for i in range(g.n):
        lines.append(",".join(fmt(c[i]) for c in cols))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv_columns(path) -> dict:
    """Read a comment-headed CSV into {column: float array}."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    names = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return {name: data[:, j] for j, name in enumerate(names)}


def read_snapshot_csv(path, t: float = 0.0) -> FluidState:
    """Rebuild a FluidState from a snapshot file (x, rho, u columns)."""
    cols = read_csv_columns(path)
    x = cols["x"]
    g = Grid(half_width=float(x[-1]), n=len(x))
    if not np.array_equal(g.x, x):
        raise ValueError(f"snapshot nodes in {path} are not a uniform symmetric grid")
    return FluidState(rho=Field(g, cols["rho"]), u=Field(g, cols["u"]), t=t)


META_COLUMNS = ("index", "t", "bflux_mass", "bflux_momentum", "clamp_count")


def write_meta_csv(path, series, config_hash: str) -> None:
    """Sidecar for quantities accumulated by the stepper (not recomputable
    from field snapshots): boundary fluxes and the clamp counter."""
    lines = [f"# config_hash: {config_hash}", ",".join(META_COLUMNS)]
    for i, rec in enumerate(series.records):
        lines.append(
            ",".join(
                [
                    str(i),
                    fmt(rec.t),
                    fmt(rec.boundary_flux.get("mass", 0.0)),
                    fmt(rec.boundary_flux.get("momentum", 0.0)),
                    str(rec.clamp_count),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_meta_csv(path) -> list:
    rows = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#") or line.startswith("index") or not line.strip():
            continue
        idx, t, bm, bp, cc = line.split(",")
        rows.append(
            {
                "index": int(idx),
                "t": float(t),
                "bflux_mass": float(bm),
                "bflux_momentum": float(bp),
                "clamp_count": int(cc),
            }
        )
    return rows


def snapshot_name(index: int) -> str:
    return f"t_{index:05d}.csv"


def write_run_outputs(outdir, series, cfg, config_hash: str) -> None:
    """series.csv, snapshots/, meta.csv and config.echo for one run."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    write_series_csv(out / "series.csv", series, config_hash)
    write_meta_csv(out / "meta.csv", series, config_hash)
    (out / "config.echo").write_text(
        cfg.canonical_text() + f"\n# config_hash: {config_hash}\n"
    )
    if series.snapshots is not None:
        snapdir = out / "snapshots"
        snapdir.mkdir(exist_ok=True)
        for i, snap in enumerate(series.snapshots):
            write_snapshot_csv(snapdir / snapshot_name(i), snap, series.params, config_hash)


def write_failures(outdir, payload: dict) -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "failures.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def aligned_table(headers, rows) -> str:
    """Plain-text table with right-aligned numeric columns."""
    cells = [[str(h) for h in headers]] + [[c if isinstance(c, str) else fmt(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = []
    for j, r in enumerate(cells):
        lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
        if j == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)
