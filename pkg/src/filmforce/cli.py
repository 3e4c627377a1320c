"""Command-line front end.

Usage::

    filmforce --config run.yaml [--out DIR] [--format csv|csv+svg] [--threads N]
    filmforce reproduce-figure 3 --config configs/fig03.yaml

Exit codes: 0 success, 1 validation error, 2 non-convergence, 3 I/O error.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from typing import List, Optional, Sequence

from .config import COMMANDS, FORMATS, ConfigError, RunConfig, config_from_dict, load_yaml
from .core import ForceResult, default_engine_spec
from .engine import force_film_boundaries, force_film_substrate, force_three_layer
from .figures import reproduce
from .output import emit_csv, emit_svg_lineplot, format_number
from .qse import FilmTooThinError, pib_force_free_film, pib_spectrum, pib_static_eps_normal
from .sweeps import NotFoundError, SweepSpec, find_extremum, loglog_fit, run_sweep

EXIT_OK, EXIT_VALIDATION, EXIT_NONCONVERGED, EXIT_IO = 0, 1, 2, 3

UNITS = {
    "film_plasma": "rad_s",
    "substrate_plasma": "rad_s",
    "film_thickness": "m",
    "spacer_distance": "m",
}


@dataclasses.dataclass
class Outcome:
    """Tables, plots and a summary line produced by one command."""

    summary: str
    converged: bool
    tables: List[tuple]  # (stem, header, rows)
    plots: List[tuple]  # (stem, series, xscale, yscale, xlabel, ylabel, title)


def _f(x) -> str:
    return format_number(x)


def _force_row(r: ForceResult):
    return [r.force, r.est_error, r.matsubara_terms_used, r.converged]


FORCE_COLS = ["force_N_m2", "est_error_N_m2", "matsubara_terms", "converged"]


def _sweep_spec(cfg: RunConfig) -> SweepSpec:
    s = cfg.sweep
    return SweepSpec(s.variable, s.grid, cfg.stack, cfg.engine or default_engine_spec(), s.quantity, cfg.threads)


def _cmd_force3(cfg: RunConfig) -> Outcome:
    r = force_three_layer(cfg.stack, cfg.engine)
    table = ("force3", ["d_m"] + FORCE_COLS, [[cfg.stack.d] + _force_row(r)])
    summary = f"force3 F={_f(r.force)} N/m2 est_error={_f(r.est_error)} converged={r.converged}"
    return Outcome(summary, r.converged, [table], [])


def _cmd_force5(cfg: RunConfig) -> Outcome:
    st = cfg.stack
    f = force_film_boundaries(st, cfg.engine)
    fp = force_film_substrate(st, cfg.engine)
    header = ["d_m", "d1_m", "d2_m", "force_film_N_m2", "est_error_film_N_m2",
              "force_substrate_N_m2", "est_error_substrate_N_m2", "converged"]
    rows = [[st.d, st.d1, st.d2, f.force, f.est_error, fp.force, fp.est_error, f.converged and fp.converged]]
    summary = f"force5 F={_f(f.force)} N/m2 F'={_f(fp.force)} N/m2 converged={f.converged and fp.converged}"
    return Outcome(summary, f.converged and fp.converged, [("force5", header, rows)], [])


def _sweep_table(cfg, results):
    xname = f"{cfg.sweep.variable}_{UNITS[cfg.sweep.variable]}"
    rows = [[x] + _force_row(r) for x, r in results]
    return ("sweep", [xname] + FORCE_COLS, rows)


def _sweep_plot(cfg, results):
    xs = [x for x, _ in results]
    ys = [r.force for _, r in results]
    xname = f"{cfg.sweep.variable} ({UNITS[cfg.sweep.variable].replace('_', '/')})"
    return ("sweep", [("force", xs, ys)], "log", "linear", xname, "F (N/m^2)", cfg.sweep.variable)


def _cmd_sweep(cfg: RunConfig) -> Outcome:
    results = run_sweep(_sweep_spec(cfg))
    ok = all(r.converged for _, r in results)
    bad = sum(not r.converged for _, r in results)
    summary = f"sweep {len(results)} points over {cfg.sweep.variable}, {bad} unconverged"
    return Outcome(summary, ok, [_sweep_table(cfg, results)], [_sweep_plot(cfg, results)])


def _cmd_extremum(cfg: RunConfig) -> Outcome:
    ext = find_extremum(_sweep_spec(cfg), cfg.extremum.tolerance, cfg.extremum.kind)
    unit = UNITS[cfg.sweep.variable]
    header = [f"location_{unit}", "force_N_m2", "refined"]
    summary = (
        f"extremum {ext.kind} at {cfg.sweep.variable}={_f(ext.location)} "
        f"F={_f(ext.value)} N/m2 refined={ext.refined}"
    )
    return Outcome(summary, ext.refined, [("extremum", header, [[ext.location, ext.value, ext.refined]])], [])


def _cmd_fit(cfg: RunConfig) -> Outcome:
    tables, plots, ok = [], [], True
    if cfg.fit.points is not None:
        points = list(cfg.fit.points)
    else:
        results = run_sweep(_sweep_spec(cfg))
        ok = all(r.converged for _, r in results)
        points = [(x, r.force) for x, r in results]
        tables.append(_sweep_table(cfg, results))
        plots.append(_sweep_plot(cfg, results))
    fit = loglog_fit(points)
    tables.append(("fit", ["slope", "intercept", "r_squared"], [[fit.slope, fit.intercept, fit.r_squared]]))
    summary = f"fit slope={fit.slope:.6f} intercept={fit.intercept:.6f} r2={fit.r_squared:.8f}"
    return Outcome(summary, ok, tables, plots)


def _cmd_qse(cfg: RunConfig) -> Outcome:
    q = cfg.qse
    spec = pib_spectrum(q.fermi_energy, q.thickness)
    from .dielectric import UniaxialPIB

    model = UniaxialPIB(q.fermi_energy, q.thickness, q.intersubband, q.n_max_transitions)
    eps_zz0 = pib_static_eps_normal(model) if q.intersubband else float("inf")
    f = pib_force_free_film(q.fermi_energy, q.thickness, cfg.engine, q.intersubband)
    f_plasma = pib_force_free_film(q.fermi_energy, q.thickness, cfg.engine, intersubband=False)
    header = ["thickness_m", "fermi_energy_J", "e0_J", "n_occupied", "omega_p_eff_rad_s",
              "eps_zz_static", "force_N_m2", "force_no_transitions_N_m2", "converged"]
    ok = f.converged and f_plasma.converged
    rows = [[q.thickness, q.fermi_energy, spec.e0, spec.n_occupied, spec.omega_p_eff,
             eps_zz0, f.force, f_plasma.force, ok]]
    summary = (
        f"qse n_occupied={spec.n_occupied} omega_p_eff={_f(spec.omega_p_eff)} rad/s "
        f"F={_f(f.force)} N/m2 (no transitions {_f(f_plasma.force)} N/m2)"
    )
    return Outcome(summary, ok, [("qse", header, rows)], [])


def _cmd_figure(cfg: RunConfig) -> Outcome:
    res = reproduce(cfg.figure, cfg.engine, cfg.threads)
    stem = f"fig{res.number:02d}"
    plots = [(p.name, p.series, p.xscale, p.yscale, p.xlabel, p.ylabel, p.title) for p in res.plots]
    return Outcome(res.summary, res.converged, [(stem, res.header, res.rows)], plots)


HANDLERS = {
    "force3": _cmd_force3,
    "force5": _cmd_force5,
    "sweep": _cmd_sweep,
    "extremum": _cmd_extremum,
    "fit": _cmd_fit,
    "qse": _cmd_qse,
    "reproduce-figure": _cmd_figure,
}


def run(cfg: RunConfig, out_dir: str, fmt: str, stdout=None) -> int:
    """Execute a validated configuration and write its outputs."""
    stdout = stdout or sys.stdout
    try:
        outcome = HANDLERS[cfg.command](cfg)
    except (NotFoundError, FilmTooThinError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        os.makedirs(out_dir, exist_ok=True)
        for stem, header, rows in outcome.tables:
            emit_csv(header, rows, os.path.join(out_dir, f"{stem}.csv"))
        if fmt == "csv+svg":
            for stem, series, xs, ys, xl, yl, title in outcome.plots:
                emit_svg_lineplot(series, os.path.join(out_dir, f"{stem}.svg"), xs, ys, xl, yl, title)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    print(outcome.summary, file=stdout)
    if not outcome.converged:
        print("error: computation did not converge to the requested tolerance", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="filmforce", description="Fluctuation-induced forces on metal films.")
    p.add_argument("command", nargs="?", choices=COMMANDS, help="override the command in the config")
    p.add_argument("figure", nargs="?", type=int, help="figure number for reproduce-figure")
    p.add_argument("--config", required=True, help="YAML run configuration")
    p.add_argument("--out", help="output directory (default: config output.dir or .)")
    p.add_argument("--format", choices=FORMATS, help="output format")
    p.add_argument("--threads", type=int, help="sweep parallelism")
    p.add_argument("--seed-free", action="store_true", help="accepted for compatibility; every computation is deterministic")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        doc = load_yaml(text)
        if isinstance(doc, dict):
            if args.command:
                doc = {**doc, "command": args.command}
            if args.figure is not None:
                doc = {**doc, "figure": {"number": args.figure}}
        cfg = config_from_dict(doc)
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("threads", f"must be >= 1, got {args.threads}")
            cfg = dataclasses.replace(cfg, threads=args.threads)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    out_dir = args.out or cfg.output.dir
    fmt = args.format or cfg.output.format
    return run(cfg, out_dir, fmt)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
