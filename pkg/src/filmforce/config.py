"""YAML run configuration: schema validation and round-trip serialisation.

A configuration is a YAML mapping. Top-level keys:

``command``
    force3, force5, sweep, extremum, fit, qse or reproduce-figure.
``stack``
    ``layers`` (3 or 5 model mappings, outermost first) plus thicknesses
    ``d`` (film) and, for 5 layers, ``d1`` and ``d2`` (``.inf`` allowed).
    3 layers are [eps1, film, eps2]; 5 layers are [eps4, eps1, film, eps2, eps5].
``engine``
    Any field of :class:`filmforce.core.EngineSpec`.
``sweep``
    ``variable``, ``grid`` (list, or mapping with start/stop/per_decade) and
    ``quantity`` (film or substrate).
``extremum``
    ``kind`` and ``tolerance``.
``fit``
    Optional ``points``; without them the sweep is run and fitted.
``qse``
    ``fermi_energy``, ``thickness``, ``intersubband``, ``n_max_transitions``.
``figure``
    ``number``.
``output``
    ``dir`` and ``format`` (csv or csv+svg).
``threads``
    Sweep parallelism.

All quantities are SI (energies in J, frequencies in rad/s, lengths in m).
"""
from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple, Union

import yaml

from .core import EngineSpec
from .dielectric import MODEL_NAMES, Drude, PerfectConductor, Plasma, UniaxialPIB, Vacuum
from .stack import LayerStack3, LayerStack5
from .sweeps import EXTREMUM_KINDS, QUANTITIES, VARIABLES, log_grid

COMMANDS = ("force3", "force5", "sweep", "extremum", "fit", "qse", "reproduce-figure")
FORMATS = ("csv", "csv+svg")

# (allowed sections, required sections) per command
SECTIONS = {
    "force3": ({"stack"}, {"stack"}),
    "force5": ({"stack"}, {"stack"}),
    "sweep": ({"stack", "sweep"}, {"stack", "sweep"}),
    "extremum": ({"stack", "sweep", "extremum"}, {"stack", "sweep"}),
    "fit": ({"stack", "sweep", "fit"}, set()),
    "qse": ({"qse"}, {"qse"}),
    "reproduce-figure": ({"figure"}, {"figure"}),
}
ALWAYS = {"command", "engine", "output", "threads"}

MODEL_PARAMS = {
    "vacuum": {},
    "plasma": {"omega_p": True},
    "drude": {"omega_p": True, "tau": True},
    "perfect_conductor": {},
    "uniaxial_pib": {"fermi_energy": True, "intersubband": False, "n_max_transitions": False},
}


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key path."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}" if field_name else message)


class ConfigParseError(ConfigError):
    """Malformed YAML; carries 1-based line and column when known."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line, self.column = line, column
        where = f"line {line}, column {column}: " if line is not None else ""
        ValueError.__init__(self, f"parse error: {where}{message}")
        self.field = ""


@dataclass(frozen=True)
class SweepConfig:
    variable: str
    grid: Tuple[float, ...]
    quantity: str = "film"


@dataclass(frozen=True)
class ExtremumConfig:
    kind: str = "maximum_magnitude_attractive"
    tolerance: float = 1e-4


@dataclass(frozen=True)
class FitConfig:
    points: Optional[Tuple[Tuple[float, float], ...]] = None


@dataclass(frozen=True)
class QSEConfig:
    fermi_energy: float
    thickness: float
    intersubband: bool = True
    n_max_transitions: Optional[int] = None


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "."
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    command: str
    stack: Optional[Union[LayerStack3, LayerStack5]] = None
    engine: Optional[EngineSpec] = None  # None: the command's default
    sweep: Optional[SweepConfig] = None
    extremum: Optional[ExtremumConfig] = None
    fit: Optional[FitConfig] = None
    qse: Optional[QSEConfig] = None
    figure: Optional[int] = None
    output: OutputConfig = field(default_factory=OutputConfig)
    threads: int = 1


# ------------------------------------------------------------------ helpers


def _mapping(value, path) -> Dict[str, Any]:
    if not isinstance(value, dict):
        raise ConfigError(path, f"expected a mapping, got {type(value).__name__}")
    return value


def _keys(mapping, path, allowed, required=()):
    for key in mapping:
        if key not in allowed:
            raise ConfigError(_join(path, str(key)), f"unknown key; allowed keys are {sorted(allowed)}")
    for key in required:
        if key not in mapping:
            raise ConfigError(_join(path, key), "missing required key")


def _join(path, key):
    return f"{path}.{key}" if path else key


def _number(value, path, positive=False, allow_inf=False, minimum=None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    value = float(value)
    if math.isnan(value) or (math.isinf(value) and not allow_inf):
        raise ConfigError(path, f"must be finite, got {value!r}")
    if positive and not value > 0.0:
        raise ConfigError(path, f"must be > 0, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value!r}")
    return value


def _integer(value, path, minimum=1) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value!r}")
    return int(value)


def _boolean(value, path) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(path, f"expected true or false, got {value!r}")
    return value


def _choice(value, path, choices):
    if value not in choices:
        raise ConfigError(path, f"must be one of {list(choices)}, got {value!r}")
    return value


# ------------------------------------------------------------------ sections


def _model(raw, path, film_thickness):
    raw = _mapping(raw, path)
    if "model" not in raw:
        raise ConfigError(_join(path, "model"), f"missing required key; allowed models are {sorted(MODEL_NAMES)}")
    name = raw["model"]
    if name not in MODEL_NAMES:
        raise ConfigError(_join(path, "model"), f"unknown model {name!r}; allowed models are {sorted(MODEL_NAMES)}")
    params = MODEL_PARAMS[name]
    _keys(raw, path, {"model", *params}, [k for k, req in params.items() if req])
    if name == "vacuum":
        return Vacuum()
    if name == "perfect_conductor":
        return PerfectConductor()
    if name == "plasma":
        return Plasma(_number(raw["omega_p"], _join(path, "omega_p"), positive=True))
    if name == "drude":
        return Drude(
            _number(raw["omega_p"], _join(path, "omega_p"), positive=True),
            _number(raw["tau"], _join(path, "tau"), positive=True),
        )
    if film_thickness is None:
        raise ConfigError(path, "uniaxial_pib is only allowed as the film of a 3-layer stack")
    n_max = raw.get("n_max_transitions")
    return UniaxialPIB(
        _number(raw["fermi_energy"], _join(path, "fermi_energy"), positive=True),
        film_thickness,
        _boolean(raw.get("intersubband", True), _join(path, "intersubband")),
        None if n_max is None else _integer(n_max, _join(path, "n_max_transitions")),
    )


def _stack(raw):
    raw = _mapping(raw, "stack")
    layers = raw.get("layers")
    if not isinstance(layers, list) or len(layers) not in (3, 5):
        raise ConfigError("stack.layers", "expected a list of 3 or 5 layer models")
    five = len(layers) == 5
    _keys(raw, "stack", {"layers", "d", "d1", "d2"} if five else {"layers", "d"},
          ["layers", "d", "d1", "d2"] if five else ["layers", "d"])
    d = _number(raw["d"], "stack.d", positive=True)
    film_index = 2 if five else 1
    models = [
        _model(m, f"stack.layers[{i}]", d if (i == film_index and not five) else None)
        for i, m in enumerate(layers)
    ]
    try:
        if five:
            d1 = _number(raw["d1"], "stack.d1", positive=True, allow_inf=True)
            d2 = _number(raw["d2"], "stack.d2", positive=True, allow_inf=True)
            return LayerStack5(*models, d, d1, d2)
        return LayerStack3(models[0], models[2], models[1], d)
    except ValueError as exc:
        raise ConfigError("stack", str(exc)) from exc


def _grid(raw, path):
    if isinstance(raw, list):
        values = tuple(_number(v, f"{path}[{i}]", positive=True) for i, v in enumerate(raw))
    else:
        raw = _mapping(raw, path)
        _keys(raw, path, {"start", "stop", "per_decade"}, ["start", "stop"])
        start = _number(raw["start"], _join(path, "start"), positive=True)
        stop = _number(raw["stop"], _join(path, "stop"), positive=True)
        per = _integer(raw.get("per_decade", 40), _join(path, "per_decade"))
        if not stop > start:
            raise ConfigError(path, "stop must exceed start")
        values = tuple(float(v) for v in log_grid(start, stop, per))
    if len(values) < 2:
        raise ConfigError(path, "needs at least 2 values")
    if any(not b > a for a, b in zip(values, values[1:])):
        raise ConfigError(path, "must be strictly increasing")
    return values


def _sweep(raw):
    raw = _mapping(raw, "sweep")
    _keys(raw, "sweep", {"variable", "grid", "quantity"}, ["variable", "grid"])
    return SweepConfig(
        _choice(raw["variable"], "sweep.variable", VARIABLES),
        _grid(raw["grid"], "sweep.grid"),
        _choice(raw.get("quantity", "film"), "sweep.quantity", QUANTITIES),
    )


def _engine(raw):
    raw = _mapping(raw, "engine")
    names = {f.name for f in dataclasses.fields(EngineSpec)}
    _keys(raw, "engine", names)
    kwargs = {}
    for key, value in raw.items():
        path = f"engine.{key}"
        if key in ("zero_temperature_mode", "matsubara_tail_check"):
            kwargs[key] = _boolean(value, path)
        elif key == "max_matsubara_terms":
            kwargs[key] = _integer(value, path)
        else:
            kwargs[key] = _number(value, path, minimum=0.0)
    try:
        return EngineSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError("engine", str(exc)) from exc


def _extremum(raw):
    raw = _mapping(raw if raw is not None else {}, "extremum")
    _keys(raw, "extremum", {"kind", "tolerance"})
    return ExtremumConfig(
        _choice(raw.get("kind", "maximum_magnitude_attractive"), "extremum.kind", EXTREMUM_KINDS),
        _number(raw.get("tolerance", 1e-4), "extremum.tolerance", positive=True),
    )


def _fit(raw):
    raw = _mapping(raw if raw is not None else {}, "fit")
    _keys(raw, "fit", {"points"})
    if "points" not in raw:
        return FitConfig(None)
    pts = raw["points"]
    if not isinstance(pts, list) or len(pts) < 2:
        raise ConfigError("fit.points", "expected a list of at least 2 [x, y] pairs")
    out = []
    for i, p in enumerate(pts):
        path = f"fit.points[{i}]"
        if not isinstance(p, list) or len(p) != 2:
            raise ConfigError(path, "expected an [x, y] pair")
        x = _number(p[0], path + "[0]", positive=True)
        y = _number(p[1], path + "[1]")
        if y == 0.0:
            raise ConfigError(path + "[1]", "must be non-zero")
        out.append((x, y))
    return FitConfig(tuple(out))


def _qse(raw):
    raw = _mapping(raw, "qse")
    _keys(raw, "qse", {"fermi_energy", "thickness", "intersubband", "n_max_transitions"},
          ["fermi_energy", "thickness"])
    n_max = raw.get("n_max_transitions")
    return QSEConfig(
        _number(raw["fermi_energy"], "qse.fermi_energy", positive=True),
        _number(raw["thickness"], "qse.thickness", positive=True),
        _boolean(raw.get("intersubband", True), "qse.intersubband"),
        None if n_max is None else _integer(n_max, "qse.n_max_transitions"),
    )


def _figure(raw):
    from .figures import FIGURES

    raw = _mapping(raw, "figure")
    _keys(raw, "figure", {"number"}, ["number"])
    return _choice(_integer(raw["number"], "figure.number"), "figure.number", sorted(FIGURES))


def _output(raw):
    raw = _mapping(raw, "output")
    _keys(raw, "output", {"dir", "format"})
    out_dir = raw.get("dir", ".")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("output.dir", "expected a non-empty path string")
    return OutputConfig(out_dir, _choice(raw.get("format", "csv"), "output.format", FORMATS))


# ------------------------------------------------------------------ public


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads 1e-7 and 5e15 as floats."""


_Loader.yaml_implicit_resolvers = {
    k: [r for r in v if r[0] != "tag:yaml.org,2002:float"]
    for k, v in yaml.SafeLoader.yaml_implicit_resolvers.items()
}
_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)


def load_yaml(text: str):
    try:
        return yaml.load(text, Loader=_Loader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        raise ConfigParseError(exc.problem or str(exc), line, col) from exc
    except yaml.YAMLError as exc:
        raise ConfigParseError(str(exc)) from exc


def config_from_dict(doc) -> RunConfig:
    doc = _mapping(doc, "")
    command = _choice(doc.get("command"), "command", COMMANDS)
    allowed, required = SECTIONS[command]
    _keys(doc, "", ALWAYS | allowed)
    for key in sorted(required):
        if key not in doc:
            raise ConfigError(key, f"required by command {command!r}")
    if command == "fit" and not (isinstance(doc.get("fit"), dict) and "points" in doc["fit"]):
        for key in ("stack", "sweep"):
            if key not in doc:
                raise ConfigError(key, "fit without points needs both stack and sweep")
    kwargs: Dict[str, Any] = {"command": command}
    if "stack" in doc:
        kwargs["stack"] = _stack(doc["stack"])
        n = 5 if isinstance(kwargs["stack"], LayerStack5) else 3
        if command == "force3" and n != 3:
            raise ConfigError("stack.layers", "force3 needs 3 layers")
        if command == "force5" and n != 5:
            raise ConfigError("stack.layers", "force5 needs 5 layers")
    if "engine" in doc:
        kwargs["engine"] = _engine(doc["engine"])
    if "sweep" in doc:
        kwargs["sweep"] = _sweep(doc["sweep"])
    if command == "extremum":
        kwargs["extremum"] = _extremum(doc.get("extremum"))
    if command == "fit":
        kwargs["fit"] = _fit(doc.get("fit"))
    if "qse" in doc:
        kwargs["qse"] = _qse(doc["qse"])
    if "figure" in doc:
        kwargs["figure"] = _figure(doc["figure"])
    if "output" in doc:
        kwargs["output"] = _output(doc["output"])
    if "threads" in doc:
        kwargs["threads"] = _integer(doc["threads"], "threads")
    cfg = RunConfig(**kwargs)
    if cfg.sweep is not None and cfg.stack is not None:
        _check_sweep(cfg)
    return cfg


def _check_sweep(cfg: RunConfig):
    from .sweeps import SweepPointError, SweepSpec, stack_at

    try:
        spec = SweepSpec(
            cfg.sweep.variable, cfg.sweep.grid, cfg.stack, cfg.engine or EngineSpec(), cfg.sweep.quantity, cfg.threads
        )
        for x in spec.grid:
            stack_at(spec, x)
    except ValueError as exc:
        raise ConfigError("sweep", str(exc)) from exc


def parse_config(text: str) -> RunConfig:
    """Parse and validate a YAML configuration document."""
    return config_from_dict(load_yaml(text))


# ------------------------------------------------------------------ serialise


def _model_dict(model) -> Dict[str, Any]:
    name = {v: k for k, v in MODEL_NAMES.items()}[type(model)]
    out: Dict[str, Any] = {"model": name}
    if isinstance(model, (Plasma, Drude)):
        out["omega_p"] = model.omega_p
    if isinstance(model, Drude):
        out["tau"] = model.tau
    if isinstance(model, UniaxialPIB):
        out["fermi_energy"] = model.fermi_energy
        out["intersubband"] = model.intersubband
        if model.n_max_transitions is not None:
            out["n_max_transitions"] = model.n_max_transitions
    return out


def config_to_dict(cfg: RunConfig) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"command": cfg.command}
    st = cfg.stack
    if isinstance(st, LayerStack3):
        doc["stack"] = {"layers": [_model_dict(m) for m in (st.eps1, st.eps3, st.eps2)], "d": st.d}
    elif isinstance(st, LayerStack5):
        doc["stack"] = {
            "layers": [_model_dict(m) for m in (st.eps4, st.eps1, st.eps3, st.eps2, st.eps5)],
            "d": st.d, "d1": st.d1, "d2": st.d2,
        }
    if cfg.engine is not None:
        doc["engine"] = dataclasses.asdict(cfg.engine)
    if cfg.sweep is not None:
        doc["sweep"] = {"variable": cfg.sweep.variable, "grid": list(cfg.sweep.grid), "quantity": cfg.sweep.quantity}
    if cfg.extremum is not None:
        doc["extremum"] = dataclasses.asdict(cfg.extremum)
    if cfg.fit is not None:
        doc["fit"] = {} if cfg.fit.points is None else {"points": [list(p) for p in cfg.fit.points]}
    if cfg.qse is not None:
        q = dataclasses.asdict(cfg.qse)
        if q["n_max_transitions"] is None:
            del q["n_max_transitions"]
        doc["qse"] = q
    if cfg.figure is not None:
        doc["figure"] = {"number": cfg.figure}
    doc["output"] = dataclasses.asdict(cfg.output)
    doc["threads"] = cfg.threads
    return doc


def serialize_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)
