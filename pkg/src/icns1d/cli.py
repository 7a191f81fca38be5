"""Command-line surface: simulate, verify, diagnose, sweep.

All outputs are deterministic for a given configuration and kernel backend:
no timestamps or wall-clock content is ever written, and every file names
the config hash that produced it.  Failures produce a machine-readable
failures.json and a nonzero exit status.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import diagnostics as diag
from . import io as out_io
from . import verification as verif
from .config import RunConfig, parse_config, sweep_combinations
from .errors import ConfigError, SolverError, VerificationError
from .grid import Grid
from .initdata import InitFamilySpec, build_initial_state, check_compatibility, sigma_window
from .kernels import BACKEND
from .params import derived_constants, make_params
from .solver import SolverConfig, TimeSeries, run


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


def run_command(argv) -> int:
    parser = argparse.ArgumentParser(prog="icns1d", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one configuration")
    p_sim.add_argument("--config", type=Path, default=None, help="config file (default: reference run)")
    p_sim.add_argument("--out", type=Path, default=None, help="output directory (overrides config)")
    p_sim.add_argument("--seed-snapshots", type=Path, default=None, help="start from a stored snapshot file")

    p_ver = sub.add_parser("verify", help="run verification studies")
    p_ver.add_argument("--suite", choices=["mms", "cross", "floor", "all"], default="all")
    p_ver.add_argument("--out", type=Path, default=Path("verify_out"))

    p_diag = sub.add_parser("diagnose", help="recompute diagnostics from stored snapshots")
    p_diag.add_argument("--from", dest="src", type=Path, required=True, help="run directory")
    p_diag.add_argument("--out", type=Path, default=None, help="where to write series.csv (default: run dir)")

    p_sweep = sub.add_parser("sweep", help="cartesian parameter sweep")
    p_sweep.add_argument("--config", type=Path, required=True, help="config file with a [sweep] section")
    p_sweep.add_argument("--out", type=Path, default=None, help="output directory (overrides config)")
    p_sweep.add_argument("--workers", type=int, default=1)

    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "diagnose":
            return _cmd_diagnose(args)
        return _cmd_sweep(args)
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        outdir = getattr(args, "out", None)
        if outdir is not None:
            out_io.write_failures(outdir, {"command": args.command, "error": type(err).__name__, "message": str(err)})
        return 2


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _load_config(path) -> RunConfig:
    text = Path(path).read_text() if path is not None else ""
    return parse_config(text)


def simulate_to_dir(cfg: RunConfig, outdir: Path, seed_snapshot=None) -> TimeSeries:
    """Run one configuration and write all artifacts into outdir."""
    chash = cfg.config_hash()
    if seed_snapshot is not None:
        initial = out_io.read_snapshot_csv(seed_snapshot)
        if initial.grid.n != cfg.grid.n or initial.grid.half_width != cfg.grid.half_width:
            raise ValueError(
                f"seed snapshot grid ({initial.grid.n} nodes) does not match config grid"
            )
    else:
        initial = build_initial_state(cfg.init, cfg.model, cfg.grid, vacuum_floor=cfg.solver.vacuum_floor)
    try:
        series = run(initial, cfg.model, cfg.solver, keep_snapshots=cfg.write_snapshots)
    except SolverError as err:
        out_io.write_failures(
            outdir,
            {
                "command": "simulate",
                "error": "SolverError",
                "message": str(err),
                "step_index": err.step_index,
                "time": err.time,
                "config_hash": chash,
            },
        )
        if err.partial_series is not None:
            out_io.write_run_outputs(outdir, err.partial_series, cfg, chash)
        raise
    out_io.write_run_outputs(outdir, series, cfg, chash)
    _write_summary(Path(outdir) / "summary.txt", series, cfg, chash)
    return series


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    outdir = args.out if args.out is not None else Path(cfg.output_dir)
    try:
        simulate_to_dir(cfg, outdir, seed_snapshot=args.seed_snapshots)
    except SolverError as err:
        print(f"solver failure at step {err.step_index}: {err}", file=sys.stderr)
        return 1
    print(f"wrote {outdir}/series.csv ({cfg.config_hash()})")
    return 0


def _write_summary(path, series: TimeSeries, cfg: RunConfig, chash: str) -> None:
    p = cfg.model
    d = derived_constants(p)
    win = sigma_window(p)
    comp = check_compatibility(series.snapshots[0] if series.snapshots else
                               build_initial_state(cfg.init, p, cfg.grid, cfg.solver.vacuum_floor), p)
    r0, rT = series.records[0], series.records[-1]
    nd = diag.nondecay_check(series)
    ledger = diag.boundedness_ledger(series)
    g = cfg.grid
    rho_edge = 1.0 / (1.0 + g.half_width ** (2 * cfg.init.sigma))
    tail_mass = 2.0 * rho_edge * g.half_width / max(2.0 * cfg.init.sigma - 1.0, 1e-3)

    lines = [
        f"config_hash: {chash}",
        f"kernel_backend: {BACKEND}",
        "",
        f"model: A={p.A} gamma={p.gamma} delta={p.delta} alpha={p.alpha} "
        f"admissible={p.admissible()} a={out_io.fmt(d.a)} e={out_io.fmt(d.e)}",
        f"init: sigma={cfg.init.sigma} window=({out_io.fmt(win.lo)}, {out_io.fmt(win.hi)}) "
        f"in_window={win.contains(cfg.init.sigma)} profile={cfg.init.velocity_profile}",
        f"compatibility: g1_norm={out_io.fmt(comp.g1_norm)} g2_norm={out_io.fmt(comp.g2_norm)} "
        f"finite={comp.norms_finite}",
        f"grid: L={g.half_width} n={g.n} dx={out_io.fmt(g.dx)}",
        f"solver: {cfg.solver.formulation} cfl={cfg.solver.cfl} floor={cfg.solver.vacuum_floor} "
        f"t_end={cfg.solver.t_end} blend={cfg.solver.flux_blend}",
        "",
        f"records: {len(series.records)}  final_t: {out_io.fmt(rT.t)}",
        f"mass: m0={out_io.fmt(r0.m)} mT={out_io.fmt(rT.m)} "
        f"rel_drift={out_io.fmt((rT.m - r0.m) / r0.m)} accounting_residual={out_io.fmt(rT.residuals['mass_account'])}",
        f"momentum: p0={out_io.fmt(r0.p_mom)} pT={out_io.fmt(rT.p_mom)} "
        f"accounting_residual={out_io.fmt(rT.residuals['mom_account'])}",
        f"energy: E0={out_io.fmt(r0.e_tot)} ET={out_io.fmt(rT.e_tot)}",
        f"bd_entropy: bd0={out_io.fmt(r0.bd)} bdT={out_io.fmt(rT.bd)}",
        f"clamp_events: {rT.clamp_count}",
        f"boundary_flux: mass={out_io.fmt(rT.boundary_flux['mass'])} "
        f"momentum={out_io.fmt(rT.boundary_flux['momentum'])}",
        f"truncation: rho_edge={out_io.fmt(rho_edge)} est_tail_mass={out_io.fmt(tail_mass)} "
        "(domain-truncation estimate, reported not bounded)",
        f"nondecay: C_u={out_io.fmt(nd.c_u)} min_u_inf={out_io.fmt(nd.min_u_inf)} "
        f"satisfied={nd.satisfied} vacuous={nd.vacuous}",
        "",
        "boundedness ledger (running max / initial):",
    ]
    for key in sorted(ledger):
        e = ledger[key]
        lines.append(
            f"  {key}: init={out_io.fmt(e.initial)} max={out_io.fmt(e.running_max)} ratio={out_io.fmt(e.ratio)}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _cmd_verify(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    failures = []
    tables = []

    if args.suite in ("mms", "all"):
        failures += _verify_mms(outdir, tables)
    if args.suite in ("cross", "all"):
        failures += _verify_cross(outdir, tables)
    if args.suite in ("floor", "all"):
        failures += _verify_floor(outdir, tables)

    (outdir / "verify_report.txt").write_text("\n\n".join(tables) + "\n")
    if failures:
        out_io.write_failures(outdir, {"command": "verify", "suite": args.suite, "failures": failures})
        for f in failures:
            print(f"FAIL {f}", file=sys.stderr)
        return 1
    print(f"verify suite {args.suite!r}: all contracts hold")
    return 0


def _write_level_table(path, headers, rows):
    lines = [",".join(str(h) for h in headers)]
    for r in rows:
        lines.append(",".join(out_io.fmt(c) if isinstance(c, float) else str(c) for c in r))
    Path(path).write_text("\n".join(lines) + "\n")


def _verify_mms(outdir, tables) -> list:
    failures = []
    p = make_params(1.0, 2.0, 1.0, 1.0)
    case = verif.default_case()

    dcheck = case.derivative_check(points=[-5.5, -2.2, -0.7, 0.0, 0.4, 1.3, 3.8], times=[0.0, 0.7, 1.9])
    if dcheck > 1e-6:
        failures.append(f"mms: derivative self-check {dcheck:.2e} > 1e-6")

    res_s = verif.mms_convergence(case, p, verif.RefinementLadder.spatial(101, 8e-3, 3), t_end=0.25)
    rows = [
        (n, dt, er, eu)
        for (n, dt), er, eu in zip(res_s.levels, res_s.errors_rho, res_s.errors_u)
    ]
    _write_level_table(outdir / "mms_spatial.csv", ("n", "dt", "err_rho", "err_u"), rows)
    tables.append(
        "MMS spatial (dt ~ dx^2):\n"
        + out_io.aligned_table(("n", "dt", "err_rho", "err_u"), rows)
        + f"\norders rho={['%.2f' % o for o in res_s.orders_rho]} u={['%.2f' % o for o in res_s.orders_u]}"
    )
    for o in res_s.orders_rho + res_s.orders_u:
        if not 1.8 <= o <= 2.2:
            failures.append(f"mms: spatial order {o:.2f} outside [1.8, 2.2]")

    res_t = verif.mms_convergence(case, p, verif.RefinementLadder.temporal(801, 0.012, 3), t_end=0.5)
    rows = [
        (n, dt, er, eu)
        for (n, dt), er, eu in zip(res_t.levels, res_t.errors_rho, res_t.errors_u)
    ]
    _write_level_table(outdir / "mms_temporal.csv", ("n", "dt", "err_rho", "err_u"), rows)
    tables.append(
        "MMS temporal (fixed dx, floor-cancelling estimator):\n"
        + out_io.aligned_table(("n", "dt", "err_rho", "err_u"), rows)
        + f"\norder u={res_t.orders_u[0]:.2f}"
    )
    if not (math.isfinite(res_t.orders_u[0]) and res_t.orders_u[0] >= 0.9):
        failures.append(f"mms: temporal order {res_t.orders_u[0]:.2f} < 0.9")
    return failures


def _cross_config() -> SolverConfig:
    return SolverConfig(cfl=0.5, vacuum_floor=1e-8, t_end=1.0, output_stride=5, flux_blend=0.0)


def _verify_cross(outdir, tables) -> list:
    failures = []
    ladder = verif.RefinementLadder.spatial(401, 0.02, 3)
    for tag, delta, sigma in (("linear", 1.0, 1.0), ("sublinear", 0.75, 0.9)):
        p = make_params(1.0, 2.0, delta, 1.0)
        spec = InitFamilySpec(sigma=sigma, velocity_profile="lorentz")
        try:
            res = verif.cross_formulation_study(spec, p, _cross_config(), ladder)
        except VerificationError as err:
            failures.append(f"cross[{tag}]: {err}")
            continue
        rows = [(n, dt, g) for (n, dt), g in zip(res.levels, res.gaps)]
        _write_level_table(outdir / f"cross_{tag}.csv", ("n", "dt", "sup_gap"), rows)
        tables.append(
            f"cross-formulation [{tag}] delta={delta} sigma={sigma}:\n"
            + out_io.aligned_table(("n", "dt", "sup_gap"), rows)
            + f"\nfactors={['%.2f' % f for f in res.factors]}"
        )
        if not res.passed:
            failures.append(f"cross[{tag}]: gap factors {res.factors} below 3x")
    return failures


def _verify_floor(outdir, tables) -> list:
    failures = []
    p = make_params(1.0, 2.0, 1.0, 1.0)
    spec = InitFamilySpec(sigma=1.0, velocity_profile="lorentz")
    cfg = SolverConfig(cfl=0.5, t_end=1.0, output_stride=50)
    res = verif.floor_sensitivity(spec, p, cfg, floors=[1e-6, 1e-7, 1e-8], grid=Grid(50.0, 2001))
    rows = [(r["floor"], r["m"], r["p_mom"], r["e_tot"], r["bd"]) for r in res.table]
    _write_level_table(outdir / "floor.csv", ("floor", "m", "p_mom", "e_tot", "bd"), rows)
    tables.append(
        "floor sensitivity:\n"
        + out_io.aligned_table(("floor", "m", "p_mom", "e_tot", "bd"), rows)
        + f"\nconsecutive max changes={['%.3e' % c for c in res.max_changes]}"
    )
    if not res.monotone:
        failures.append(f"floor: changes {res.max_changes} not monotonically decreasing")
    if res.max_changes[-1] > 1e-4:
        failures.append(f"floor: finest-pair change {res.max_changes[-1]:.2e} > 1e-4")
    return failures


# ---------------------------------------------------------------------------
# diagnose
# ---------------------------------------------------------------------------


def _cmd_diagnose(args) -> int:
    src = Path(args.src)
    rundir = src if (src / "config.echo").exists() else src.parent
    snapdir = rundir / "snapshots" if (rundir / "snapshots").is_dir() else src
    if not (rundir / "config.echo").exists():
        raise ConfigError(f"no config.echo found near {src}")
    cfg = parse_config((rundir / "config.echo").read_text())
    chash = cfg.config_hash()
    if not (rundir / "meta.csv").exists():
        raise ConfigError(f"no meta.csv in {rundir}")
    if not snapdir.is_dir() or not any(snapdir.glob("t_*.csv")):
        raise ConfigError(
            f"no snapshots under {rundir}; rerun simulate with `snapshots = true`"
        )
    meta = out_io.read_meta_csv(rundir / "meta.csv")

    series = TimeSeries(params=cfg.model, config=cfg.solver, grid=cfg.grid, records=[], snapshots=[])
    for row in meta:
        state = out_io.read_snapshot_csv(snapdir / out_io.snapshot_name(row["index"]), t=row["t"])
        baseline = series.records[0] if series.records else None
        rec = diag.record(
            state,
            cfg.model,
            baseline=baseline,
            boundary_flux={"mass": row["bflux_mass"], "momentum": row["bflux_momentum"]},
            clamp_count=row["clamp_count"],
        )
        series.records.append(rec)
        series.snapshots.append(state)
    diag.attach_interval_residuals(series, cfg.model, floor=cfg.solver.vacuum_floor)

    outdir = Path(args.out) if args.out is not None else rundir
    outdir.mkdir(parents=True, exist_ok=True)
    out_io.write_series_csv(outdir / "series.csv", series, chash)
    print(f"wrote {outdir}/series.csv ({chash})")
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _sweep_worker(payload):
    label, text, outdir = payload
    cfg = parse_config(text)
    try:
        series = simulate_to_dir(cfg, Path(outdir))
        rT = series.records[-1]
        return {
            "label": label,
            "status": "ok",
            "m": rT.m,
            "p_mom": rT.p_mom,
            "e_tot": rT.e_tot,
            "bd": rT.bd,
            "clamps": rT.clamp_count,
        }
    except SolverError as err:
        return {"label": label, "status": f"failed@step{err.step_index}"}


def _cmd_sweep(args) -> int:
    cfg = parse_config(Path(args.config).read_text())
    combos = sweep_combinations(cfg)
    if not combos:
        raise ConfigError("sweep requires a [sweep] section with at least one key")
    outroot = Path(args.out) if args.out is not None else Path(cfg.output_dir)
    outroot.mkdir(parents=True, exist_ok=True)
    jobs = [
        (label, text, str(outroot / f"run_{i:03d}_{label}"))
        for i, (label, text) in enumerate(combos)
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_sweep_worker, jobs))
    else:
        results = [_sweep_worker(j) for j in jobs]

    headers = ("label", "status", "m", "p_mom", "e_tot", "bd", "clamps")
    lines = [",".join(headers)]
    for r in sorted(results, key=lambda r: r["label"]):
        lines.append(
            ",".join(
                [
                    r["label"],
                    r["status"],
                    out_io.fmt(r.get("m", math.nan)),
                    out_io.fmt(r.get("p_mom", math.nan)),
                    out_io.fmt(r.get("e_tot", math.nan)),
                    out_io.fmt(r.get("bd", math.nan)),
                    str(r.get("clamps", -1)),
                ]
            )
        )
    (outroot / "sweep_summary.csv").write_text("\n".join(lines) + "\n")
    bad = [r for r in results if r["status"] != "ok"]
    print(f"sweep: {len(results) - len(bad)}/{len(results)} runs ok")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
