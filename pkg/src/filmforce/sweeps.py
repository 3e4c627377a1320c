"""Parameter sweeps, extremum location and power-law fits."""
from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import EngineSpec, ForceResult, default_engine_spec
from .dielectric import Drude, Plasma, UniaxialPIB
from .engine import force_film_boundaries, force_film_substrate, force_three_layer
from .qse import fermi_energy_for_plasma
from .stack import LayerStack3, LayerStack5

VARIABLES = ("film_plasma", "substrate_plasma", "film_thickness", "spacer_distance")
QUANTITIES = ("film", "substrate")
EXTREMUM_KINDS = ("maximum_magnitude_attractive", "maximum_repulsive")
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

Stack = Union[LayerStack3, LayerStack5]


class NotFoundError(ValueError):
    """The swept quantity has no interior extremum of the requested kind."""


class SweepPointError(ValueError):
    """A grid value produced an invalid stack or failed to evaluate."""


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional sweep of a stack parameter.

    ``quantity`` selects the force on the film boundaries (``film``) or the
    film-substrate force across spacer d1 (``substrate``, 5-layer only).
    """

    variable: str
    grid: Tuple[float, ...]
    stack: Stack
    engine: EngineSpec = dataclasses.field(default_factory=default_engine_spec)
    quantity: str = "film"
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(x) for x in self.grid))
        if self.variable not in VARIABLES:
            raise ValueError(f"variable must be one of {VARIABLES}, got {self.variable!r}")
        if self.quantity not in QUANTITIES:
            raise ValueError(f"quantity must be one of {QUANTITIES}, got {self.quantity!r}")
        if len(self.grid) < 2:
            raise ValueError("grid needs at least 2 values")
        if any(not b > a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")
        if not isinstance(self.stack, (LayerStack3, LayerStack5)):
            raise TypeError("stack must be a LayerStack3 or LayerStack5")
        if isinstance(self.stack, LayerStack3):
            if self.quantity == "substrate":
                raise ValueError("quantity 'substrate' requires a 5-layer stack")
            if self.variable == "spacer_distance":
                raise ValueError("spacer_distance sweeps require a 5-layer stack")
        if int(self.threads) != self.threads or self.threads < 1:
            raise ValueError(f"threads must be a positive integer, got {self.threads!r}")


@dataclass(frozen=True)
class ExtremumResult:
    location: float
    value: float
    kind: str
    refined: bool


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float


def log_grid(lo: float, hi: float, per_decade: int = 40) -> np.ndarray:
    """Log-spaced grid with ``per_decade`` intervals per decade, end points included."""
    n = max(1, int(round(per_decade * math.log10(hi / lo))))
    return np.logspace(math.log10(lo), math.log10(hi), n + 1)


def _with_plasma(model, omega):
    if isinstance(model, Drude):
        return Drude(omega, model.tau)
    if isinstance(model, Plasma):
        return Plasma(omega)
    if isinstance(model, UniaxialPIB):
        # x is the bulk plasma frequency of the electron gas
        return dataclasses.replace(model, fermi_energy=fermi_energy_for_plasma(omega))
    raise ValueError(f"cannot set a plasma frequency on {type(model).__name__}")


def stack_at(spec: SweepSpec, x: float) -> Stack:
    """The stack with the swept parameter set to ``x``."""
    st = spec.stack
    if spec.variable == "film_plasma":
        return dataclasses.replace(st, eps3=_with_plasma(st.eps3, x))
    if spec.variable == "substrate_plasma":
        if isinstance(st, LayerStack3):
            return dataclasses.replace(st, eps1=_with_plasma(st.eps1, x))
        return dataclasses.replace(st, eps4=_with_plasma(st.eps4, x))
    if spec.variable == "film_thickness":
        if isinstance(st.eps3, UniaxialPIB):
            return dataclasses.replace(st, d=x, eps3=dataclasses.replace(st.eps3, thickness=x))
        return dataclasses.replace(st, d=x)
    return dataclasses.replace(st, d1=x)


def evaluate(stack: Stack, engine: EngineSpec, quantity: str = "film") -> ForceResult:
    if isinstance(stack, LayerStack3):
        return force_three_layer(stack, engine)
    if quantity == "substrate":
        return force_film_substrate(stack, engine)
    return force_film_boundaries(stack, engine)


def _point(spec: SweepSpec, x: float) -> ForceResult:
    try:
        stack = stack_at(spec, x)
    except ValueError as exc:
        raise SweepPointError(f"{spec.variable} = {x!r}: {exc}") from exc
    return evaluate(stack, spec.engine, spec.quantity)


def run_sweep(spec: SweepSpec) -> List[Tuple[float, ForceResult]]:
    """Evaluate the force at every grid value, preserving grid order."""
    # validate every point before spending time on any force
    for x in spec.grid:
        try:
            stack_at(spec, x)
        except ValueError as exc:
            raise SweepPointError(f"{spec.variable} = {x!r}: {exc}") from exc
    if spec.threads == 1:
        results = [_point(spec, x) for x in spec.grid]
    else:
        with ThreadPoolExecutor(max_workers=int(spec.threads)) as pool:
            results = list(pool.map(lambda x: _point(spec, x), spec.grid))
    return list(zip(spec.grid, results))


def _golden_max(func: Callable[[float], float], lo: float, hi: float, tolerance: float, max_iter: int = 200):
    """Maximise func(exp(u)) on [ln lo, ln hi]; returns (x, f, met)."""
    a, b = math.log(lo), math.log(hi)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = func(math.exp(c)), func(math.exp(d))
    log_tol = math.log1p(tolerance)
    for _ in range(max_iter):
        if b - a <= log_tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = func(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = func(math.exp(d))
    met = b - a <= log_tol
    if fc >= fd:
        return math.exp(c), fc, met
    return math.exp(d), fd, met


def extremum_of(
    func: Callable[[float], float],
    grid: Sequence[float],
    tolerance: float = 1e-3,
    kind: str = "maximum_magnitude_attractive",
    values: Optional[Sequence[float]] = None,
) -> ExtremumResult:
    """Locate an interior extremum of a signed scalar function on a positive grid.

    ``maximum_magnitude_attractive`` maximises -f, ``maximum_repulsive``
    maximises f. A coarse scan over ``grid`` brackets the extremum, then a
    golden-section search in ln x refines it inside the bracket. Ties go to the
    smallest location.
    """
    if kind not in EXTREMUM_KINDS:
        raise ValueError(f"kind must be one of {EXTREMUM_KINDS}, got {kind!r}")
    if not tolerance > 0.0:
        raise ValueError(f"tolerance must be > 0, got {tolerance!r}")
    grid = np.asarray(grid, dtype=float)
    if grid.size < 3 or np.any(grid <= 0.0) or np.any(np.diff(grid) <= 0.0):
        raise ValueError("grid must be positive, strictly increasing and have >= 3 points")
    sign = -1.0 if kind == "maximum_magnitude_attractive" else 1.0
    vals = np.array([func(x) for x in grid] if values is None else values, dtype=float)
    score = sign * vals
    i = int(np.argmax(score))
    if i == 0 or i == grid.size - 1 or not score[i] > 0.0:
        raise NotFoundError(f"no interior {kind.replace('_', ' ')} on [{grid[0]:.4g}, {grid[-1]:.4g}]")
    if not (score[i] > score[0] and score[i] > score[-1]):
        raise NotFoundError(f"no interior {kind.replace('_', ' ')}")
    x, s, met = _golden_max(lambda x: sign * func(x), grid[i - 1], grid[i + 1], tolerance)
    if s < score[i]:
        return ExtremumResult(float(grid[i]), float(vals[i]), kind, False)
    return ExtremumResult(float(x), float(sign * s), kind, bool(met))


def find_extremum(
    spec: SweepSpec, tolerance: float = 1e-3, kind: str = "maximum_magnitude_attractive"
) -> ExtremumResult:
    """Extremum of the swept force: coarse scan of ``spec.grid`` then golden-section refinement."""
    coarse = run_sweep(spec)
    values = [r.force for _, r in coarse]
    return extremum_of(lambda x: _point(spec, x).force, spec.grid, tolerance, kind, values=values)


def loglog_fit(points: Sequence[Tuple[float, float]]) -> FitResult:
    """Least squares of ln|y| against ln x."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ValueError("need at least 2 (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    if np.any(~(x > 0.0)):
        raise ValueError("all x must be > 0")
    if np.any(~(y != 0.0)) or np.any(~np.isfinite(y)):
        raise ValueError("all y must be finite and non-zero")
    lx, ly = np.log(x), np.log(np.abs(y))
    if np.ptp(lx) == 0.0:
        raise ValueError("x values must not all be equal")
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - float(np.sum(resid**2)) / ss_tot)
    return FitResult(float(slope), float(intercept), float(min(r2, 1.0)))
