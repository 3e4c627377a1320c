"""Canonical recipes reproducing the published figures (numbering 2-13).

Each recipe returns a :class:`FigureResult` holding a CSV table, one or more
plots and a one-line summary. The same recipes back the acceptance tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import EngineSpec, default_engine_spec
from .dielectric import PerfectConductor, Plasma, UniaxialPIB, Vacuum
from .qse import fermi_energy_for_plasma
from .stack import LayerStack3, LayerStack5
from .sweeps import (
    ExtremumResult,
    FitResult,
    SweepSpec,
    find_extremum,
    log_grid,
    loglog_fit,
    run_sweep,
)

NM = 1e-9
THICKNESSES = (10 * NM, 20 * NM, 50 * NM, 100 * NM)
PLASMA_RANGE = (1e14, 1e17)
PER_DECADE = 40
SPACER_RANGE = (10 * NM, 100 * NM)
WIDE_SPACER_RANGE = (10 * NM, 1000 * NM)
FILM_PLASMA = 5e15
SUBSTRATE_PLASMA = 5e15
EXTREMUM_TOL = 1e-4
# F(d1) crosses zero, so a pure relative target is unreachable there
CROSSING_ABS_TOL = 1e-8


@dataclass
class Plot:
    name: str
    series: List[Tuple[str, Sequence[float], Sequence[float]]]
    xscale: str
    yscale: str
    xlabel: str
    ylabel: str
    title: str


@dataclass
class FigureResult:
    number: int
    header: List[str]
    rows: List[list]
    plots: List[Plot]
    summary: str
    converged: bool
    data: Dict[str, object] = field(default_factory=dict)


def _nm(d: float) -> str:
    return f"{d / NM:g}nm"


def _free_film(omega, d):
    return LayerStack3(Vacuum(), Vacuum(), Plasma(omega), d)


def _on_substrate_5(substrate, omega, d, d1=WIDE_SPACER_RANGE[1]):
    return LayerStack5(substrate, Vacuum(), Plasma(omega), Vacuum(), Vacuum(), d, d1, math.inf)


def _sweep_columns(specs: Sequence[SweepSpec]):
    """Run sweeps sharing one grid; returns (grid, forces per sweep, all converged)."""
    grid = np.asarray(specs[0].grid)
    cols, ok = [], True
    for spec in specs:
        res = run_sweep(spec)
        cols.append(np.array([r.force for _, r in res]))
        ok = ok and all(r.converged for _, r in res)
    return grid, cols, ok


def _wide(x_name, grid, names, cols):
    header = [x_name] + list(names)
    rows = [[float(x)] + [float(c[i]) for c in cols] for i, x in enumerate(grid)]
    return header, rows


def _fit_text(label: str, fit: FitResult) -> str:
    return f"{label} slope={fit.slope:.4f} intercept={fit.intercept:.4f} r2={fit.r_squared:.6f}"


# ----------------------------------------------------------------- figures


def figure2(engine: Optional[EngineSpec] = None, threads: int = 1) -> FigureResult:
    """Free-film force versus film plasma frequency for several thicknesses."""
    engine = engine or default_engine_spec()
    grid = log_grid(*PLASMA_RANGE, PER_DECADE)
    specs = [SweepSpec("film_plasma", grid, _free_film(1e15, d), engine, threads=threads) for d in THICKNESSES]
    grid, cols, ok = _sweep_columns(specs)
    names = [f"force_d{_nm(d)}_N_m2" for d in THICKNESSES]
    header, rows = _wide("omega_p_rad_s", grid, names, cols)
    plot = Plot(
        "fig02", [(f"d = {_nm(d)}", grid, -c) for d, c in zip(THICKNESSES, cols)],
        "log", "log", "film plasma frequency (rad/s)", "-F (N/m^2)", "Free-standing film",
    )
    peak = [float(grid[np.argmin(c)]) for c in cols]
    summary = "fig2 " + " ".join(f"d={_nm(d)}:peak_omega~{p:.3e}" for d, p in zip(THICKNESSES, peak))
    return FigureResult(2, header, rows, [plot], summary, ok, {"grid": grid, "forces": cols})


def _extrema_vs_thickness(stack_for: Callable[[float], LayerStack3], kind, engine, threads):
    grid = log_grid(*PLASMA_RANGE, PER_DECADE)
    out: List[ExtremumResult] = []
    for d in THICKNESSES:
        spec = SweepSpec("film_plasma", grid, stack_for(d), engine, threads=threads)
        out.append(find_extremum(spec, EXTREMUM_TOL, kind))
    return out


def figure3(engine: Optional[EngineSpec] = None, threads: int = 1) -> FigureResult:
    """Position and height of the free-film force maximum versus thickness."""
    engine = engine or default_engine_spec()
    ext = _extrema_vs_thickness(lambda d: _free_film(1e15, d), "maximum_magnitude_attractive", engine, threads)
    d = np.array(THICKNESSES)
    f = np.array([e.value for e in ext])
    w = np.array([e.location for e in ext])
    fit_f = loglog_fit(list(zip(d, f)))
    fit_w = loglog_fit(list(zip(d, w)))
    header = ["d_m", "omega_max_rad_s", "f_max_N_m2"]
    rows = [[float(a), float(b), float(c)] for a, b, c in zip(d, w, f)]
    plots = [
        Plot("fig03_force", [("|F|max", d, np.abs(f))], "log", "log", "d (m)", "|F|max (N/m^2)", "Force maximum"),
        Plot("fig03_frequency", [("omega_max", d, w)], "log", "log", "d (m)", "omega_max (rad/s)", "Frequency of the maximum"),
    ]
    summary = "fig3 " + _fit_text("|F|max", fit_f) + "; " + _fit_text("omega_max", fit_w)
    ok = all(e.refined for e in ext)
    return FigureResult(3, header, rows, plots, summary, ok, {"extrema": ext, "fit_force": fit_f, "fit_omega": fit_w})


def figure4(engine: Optional[EngineSpec] = None, threads: int = 1) -> FigureResult:
    """100 nm film: free-standing versus on a perfectly reflecting substrate."""
    engine = engine or default_engine_spec()
    d = 100 * NM
    grid = log_grid(*PLASMA_RANGE, PER_DECADE)
    specs = [
        SweepSpec("film_plasma", grid, _free_film(1e15, d), engine, threads=threads),
        SweepSpec("film_plasma", grid, LayerStack3(PerfectConductor(), Vacuum(), Plasma(1e15), d), engine, threads=threads),
    ]
    grid, cols, ok = _sweep_columns(specs)
    header, rows = _wide("omega_p_rad_s", grid, ["force_free_N_m2", "force_ideal_substrate_N_m2"], cols)
    plot = Plot(
        "fig04", [("free film", grid, cols[0]), ("on ideal metal", grid, cols[1])],
        "log", "linear", "film plasma frequency (rad/s)", "F (N/m^2)", "100 nm film",
    )
    summary = f"fig4 free: max|F|={np.max(np.abs(cols[0])):.4g} N/m2; ideal substrate: max F={np.max(cols[1]):.4g} N/m2"
    return FigureResult(4, header, rows, [plot], summary, ok, {"grid": grid, "forces": cols})


def figure6(engine: Optional[EngineSpec] = None, threads: int = 1) -> FigureResult:
    """Force on the boundaries of a 100 nm film versus distance to an ideal substrate."""
    engine = engine or EngineSpec(abs_tol=CROSSING_ABS_TOL)
    grid = log_grid(*WIDE_SPACER_RANGE, PER_DECADE // 2)
    spec = SweepSpec("spacer_distance", grid, _on_substrate_5(PerfectConductor(), FILM_PLASMA, 100 * NM), engine, threads=threads)
    grid, cols, ok = _sweep_columns([spec])
    header, rows = _wide("d1_m", grid, ["force_N_m2"], cols)
    plot = Plot("fig06", [("F, 100 nm film", grid, cols[0])], "log", "linear", "d1 (m)", "F (N/m^2)", "Film on ideal substrate")
    summary = f"fig6 F(d1={grid[0]:.3g})={cols[0][0]:.4g} N/m2, F(d1={grid[-1]:.3g})={cols[0][-1]:.4g} N/m2"
    return FigureResult(6, header, rows, [plot], summary, ok, {"grid": grid, "forces": cols})


def _film_substrate_figure(number, substrate, bulk, engine, threads, title):
    grid = log_grid(*SPACER_RANGE, PER_DECADE)
    films = (100 * NM, 10 * NM)
    specs = [
        SweepSpec("spacer_distance", grid, _on_substrate_5(substrate, FILM_PLASMA, d), engine, quantity="substrate", threads=threads)
        for d in films
    ]
    specs.append(SweepSpec("film_thickness", grid, bulk, engine, threads=threads))
    grid, cols, ok = _sweep_columns(specs)
    fits = [loglog_fit(list(zip(grid, c))) for c in cols[:2]]
    deviation = float(np.max(np.abs(cols[0] / cols[2] - 1.0)))
    header, rows = _wide(
        "d1_m", grid, ["force_film100nm_N_m2", "force_film10nm_N_m2", "force_bulk_N_m2"], cols
    )
    plot = Plot(
        f"fig{number:02d}",
        [("100 nm film", grid, -cols[0]), ("10 nm film", grid, -cols[1]), ("semi-infinite", grid, -cols[2])],
        "log", "log", "d1 (m)", "-F' (N/m^2)", title,
    )
    summary = (
        f"fig{number} " + _fit_text("100nm", fits[0]) + "; " + _fit_text("10nm", fits[1])
        + f"; max deviation 100nm vs bulk={deviation:.4f}"
    )
    data = {"grid": grid, "forces": cols, "fit_100nm": fits[0], "fit_10nm": fits[1], "bulk_deviation": deviation}
    return FigureResult(number, header, rows, [plot], summary, ok, data)


def figure7(engine: Optional[EngineSpec] = None, threads: int = 1) -> FigureResult:
    """Film-substrate force versus distance to an ideal substrate, with the bulk curve."""
    engine = engine or default_engine_spec()
    # bulk: semi-infinite metal across a vacuum gap from the ideal substrate
    bulk = LayerStack3(PerfectConductor(), Plasma(FILM_PLASMA), Vacuum(), SPACER_RANGE[0])
    return _film_substrate_figure(7, PerfectConductor(), bulk, engine, threads, "Film on ideal substrate")


def figure12(engine: Optional[EngineSpec] = None, threads: int = 1) -> FigureResult:
    """Film-substrate force for a plasma substrate, with the bulk-bulk curve."""
    engine = engine or default_engine_spec()
    bulk = LayerStack3(Plasma(SUBSTRATE_PLASMA), Plasma(FILM_PLASMA), Vacuum(), SPACER_RANGE[0])
    return _film_substrate_figure(12, Plasma(SUBSTRATE_PLASMA), bulk, engine, threads, "Film on plasma substrate")


def figure8(engine: Optional[EngineSpec] = None, threads: int = 1) -> FigureResult:
    """100 nm film on a plasma substrate: force versus substrate plasma frequency."""
    engine = engine or default_engine_spec()
    d = 100 * NM
    films = (1e15, 5e15, 1e16)
    grid = log_grid(*PLASMA_RANGE, PER_DECADE)
    specs = [
        SweepSpec("substrate_plasma", grid, LayerStack3(Plasma(1e15), Vacuum(), Plasma(w3), d), engine, threads=threads)
        for w3 in films
    ]
    grid, cols, ok = _sweep_columns(specs)
    header, rows = _wide("omega1_rad_s", grid, [f"force_omega3_{w:.0e}_N_m2".replace("+", "") for w in films], cols)
    plot = Plot(
        "fig08", [(f"omega3 = {w:.0e}", grid, c) for w, c in zip(films, cols)],
        "log", "linear", "substrate plasma frequency (rad/s)", "F (N/m^2)", "100 nm film on plasma substrate",
    )
    summary = "fig8 sign changes at omega1 ~ " + ", ".join(
        f"{_sign_change(grid, c):.3e}" for c in cols
    )
    return FigureResult(8, header, rows, [plot], summary, ok, {"grid": grid, "forces": cols})


def figure9(engine: Optional[EngineSpec] = None, threads: int = 1) -> FigureResult:
    """100 nm film on a plasma substrate: force versus film plasma frequency."""
    engine = engine or default_engine_spec()
    d = 100 * NM
    substrates = (1e15, 5e15, 1e16)
    grid = log_grid(*PLASMA_RANGE, PER_DECADE)
    specs = [
        SweepSpec("film_plasma", grid, LayerStack3(Plasma(w1), Vacuum(), Plasma(1e15), d), engine, threads=threads)
        for w1 in substrates
    ]
    grid, cols, ok = _sweep_columns(specs)
    header, rows = _wide("omega3_rad_s", grid, [f"force_omega1_{w:.0e}_N_m2".replace("+", "") for w in substrates], cols)
    plot = Plot(
        "fig09", [(f"omega1 = {w:.0e}", grid, c) for w, c in zip(substrates, cols)],
        "log", "linear", "film plasma frequency (rad/s)", "F (N/m^2)", "100 nm film on plasma substrate",
    )
    summary = "fig9 extrema (max, min) " + ", ".join(f"({np.max(c):.4g}, {np.min(c):.4g})" for c in cols)
    return FigureResult(9, header, rows, [plot], summary, ok, {"grid": grid, "forces": cols})


def figure10(engine: Optional[EngineSpec] = None, threads: int = 1) -> FigureResult:
    """Attractive minimum and repulsive maximum of F(omega3) versus thickness."""
    engine = engine or default_engine_spec()

    def stack(d):
        return LayerStack3(Plasma(SUBSTRATE_PLASMA), Vacuum(), Plasma(1e15), d)

    att = _extrema_vs_thickness(stack, "maximum_magnitude_attractive", engine, threads)
    rep = _extrema_vs_thickness(stack, "maximum_repulsive", engine, threads)
    d = np.array(THICKNESSES)
    fmin = np.array([e.value for e in att])
    fmax = np.array([e.value for e in rep])
    fit_min = loglog_fit(list(zip(d, fmin)))
    fit_max = loglog_fit(list(zip(d, fmax)))
    header = ["d_m", "f_min_N_m2", "omega_min_rad_s", "f_max_N_m2", "omega_max_rad_s"]
    rows = [
        [float(a), e1.value, e1.location, e2.value, e2.location] for a, e1, e2 in zip(d, att, rep)
    ]
    plot = Plot(
        "fig10", [("|F| attractive minimum", d, np.abs(fmin)), ("F repulsive maximum", d, fmax)],
        "log", "log", "d (m)", "|F| (N/m^2)", "Extrema on a plasma substrate",
    )
    summary = "fig10 " + _fit_text("minimum", fit_min) + "; " + _fit_text("maximum", fit_max)
    ok = all(e.refined for e in att + rep)
    data = {"attractive": att, "repulsive": rep, "fit_min": fit_min, "fit_max": fit_max}
    return FigureResult(10, header, rows, [plot], summary, ok, data)


def figure11(engine: Optional[EngineSpec] = None, threads: int = 1) -> FigureResult:
    """Force on a 100 nm film versus distance for ideal and plasma substrates."""
    engine = engine or EngineSpec(abs_tol=CROSSING_ABS_TOL)
    grid = log_grid(*WIDE_SPACER_RANGE, PER_DECADE // 2)
    subs = [("ideal", PerfectConductor()), ("omega1 = 1e16", Plasma(1e16)), ("omega1 = 1e15", Plasma(1e15))]
    specs = [
        SweepSpec("spacer_distance", grid, _on_substrate_5(s, FILM_PLASMA, 100 * NM), engine, threads=threads)
        for _, s in subs
    ]
    grid, cols, ok = _sweep_columns(specs)
    header, rows = _wide("d1_m", grid, ["force_ideal_N_m2", "force_omega1_1e16_N_m2", "force_omega1_1e15_N_m2"], cols)
    plot = Plot(
        "fig11", [(name, grid, c) for (name, _), c in zip(subs, cols)],
        "log", "linear", "d1 (m)", "F (N/m^2)", "100 nm film, various substrates",
    )
    summary = "fig11 F at smallest d1: " + ", ".join(f"{name}={c[0]:.4g}" for (name, _), c in zip(subs, cols))
    return FigureResult(11, header, rows, [plot], summary, ok, {"grid": grid, "forces": cols})


def figure13(engine: Optional[EngineSpec] = None, threads: int = 1) -> FigureResult:
    """50 nm film: particle-in-a-box model against the plasma model.

    The abscissa is the bulk plasma frequency of the electron gas; the box
    model uses the Fermi energy of that gas.
    """
    engine = engine or default_engine_spec()
    d = 50 * NM
    grid = log_grid(*PLASMA_RANGE, PER_DECADE)
    pib = UniaxialPIB(fermi_energy_for_plasma(1e15), d)
    specs = [
        SweepSpec("film_plasma", grid, LayerStack3(Vacuum(), Vacuum(), pib, d), engine, threads=threads),
        SweepSpec("film_plasma", grid, _free_film(1e15, d), engine, threads=threads),
    ]
    grid, cols, ok = _sweep_columns(specs)
    header, rows = _wide("omega_p_rad_s", grid, ["force_pib_N_m2", "force_plasma_N_m2"], cols)
    plot = Plot(
        "fig13", [("particle in a box", grid, -cols[0]), ("plasma model", grid, -cols[1])],
        "log", "log", "bulk plasma frequency (rad/s)", "-F (N/m^2)", "50 nm film",
    )
    i = int(np.argmin(cols[0]))
    summary = f"fig13 box model peak |F|={-cols[0][i]:.4g} N/m2 at omega={grid[i]:.3e}; plasma peak |F|={-np.min(cols[1]):.4g}"
    return FigureResult(13, header, rows, [plot], summary, ok, {"grid": grid, "forces": cols})


def _sign_change(grid, values) -> float:
    s = np.sign(values)
    zero = np.nonzero(s == 0)[0]
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    if zero.size and (idx.size == 0 or zero[0] <= idx[0]):
        return float(grid[zero[0]])
    if idx.size == 0:
        return float("nan")
    i = int(idx[0])
    return float(math.sqrt(grid[i] * grid[i + 1]))


FIGURES: Dict[int, Callable[..., FigureResult]] = {
    2: figure2,
    3: figure3,
    4: figure4,
    6: figure6,
    7: figure7,
    8: figure8,
    9: figure9,
    10: figure10,
    11: figure11,
    12: figure12,
    13: figure13,
}


def reproduce(number: int, engine: Optional[EngineSpec] = None, threads: int = 1) -> FigureResult:
    if number not in FIGURES:
        raise ValueError(f"figure must be one of {sorted(FIGURES)}, got {number!r}")
    return FIGURES[number](engine, threads)
