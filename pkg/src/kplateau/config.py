"""Plain-text scenario configuration: parser, serializer, presets, builders.

The format is sectioned `key = value` text. Scalars are ints or floats,
vectors are whitespace-separated floats, and `#` starts a comment anywhere on
a line. Density channels are Fourier coefficient lists in the column order
constant, cos, sin, cos2, sin2, ... so a single number means a constant
density. Parsing is strict: unknown sections or keys, bad types, duplicate
keys, and invariant violations all fail with the offending line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .energy import ElasticDensity, fourier_columns
from .errors import ConfigError
from .rod import CrossSection, DensityField, Frame, LinkConfig, Placement
from .solver import PenaltyWeights, SolveOptions

__all__ = [
    "RodSpec",
    "ScenarioConfig",
    "parse_config",
    "serialize_config",
    "preset_names",
    "load_preset",
    "build_link",
    "build_elastics",
    "build_options",
]

PRESETS = ("ring", "hopf", "clamped-plus-free")


@dataclass(frozen=True)
class RodSpec:
    length: float
    nodes: int
    radius: float
    stiffness: tuple[float, float, float]
    origin: tuple[float, float, float]
    frame_u: tuple[float, float, float]
    frame_v: tuple[float, float, float]
    frame_w: tuple[float, float, float]
    max_thickness: float | None = None
    mass_density: float = 0.0
    kappa1: tuple[float, ...] = (0.0,)
    kappa2: tuple[float, ...] = (0.0,)
    twist: tuple[float, ...] = (0.0,)


@dataclass(frozen=True)
class ScenarioConfig:
    rod1: RodSpec
    rod2: RodSpec | None = None
    sigma: float = 0.0
    gravity: tuple[float, float, float] = (0.0, 0.0, 0.0)
    outer_iters: int = 40
    film_steps_per_outer: int = 200
    growth: float = 4.0
    harmonics: int = 1
    margin_eps: float = 0.05
    fd_step: float = 1e-5
    grad_tol: float = 1e-8
    outer_tol: float = 1e-10
    step_clamp: float | None = None
    energy_bound: float | None = None
    seed: int = 0
    w_closure: float = 1.0
    w_margin: float = 1.0
    w_cn: float = 1.0
    w_gap: float = 1.0
    mesh_stations: int = 48
    mesh_rings: int = 8
    voxel: float | None = None
    output_dir: str = "out"


_ROD_KEYS = {
    "length": "float",
    "nodes": "int",
    "radius": "float",
    "max_thickness": "float",
    "stiffness": "vec3",
    "mass_density": "float",
    "kappa1": "floats",
    "kappa2": "floats",
    "twist": "floats",
    "origin": "vec3",
    "frame_u": "vec3",
    "frame_v": "vec3",
    "frame_w": "vec3",
}

_SCHEMA = {
    "rod1": _ROD_KEYS,
    "rod2": _ROD_KEYS,
    "problem": {"sigma": "float", "gravity": "vec3"},
    "solver": {
        "outer_iters": "int",
        "film_steps_per_outer": "int",
        "growth": "float",
        "harmonics": "int",
        "margin_eps": "float",
        "fd_step": "float",
        "grad_tol": "float",
        "outer_tol": "float",
        "step_clamp": "float",
        "energy_bound": "float",
        "seed": "int",
        "w_closure": "float",
        "w_margin": "float",
        "w_cn": "float",
        "w_gap": "float",
    },
    "mesh": {"stations": "int", "rings": "int", "voxel": "float"},
    "output": {"dir": "str"},
}

_ROD_REQUIRED = ("length", "nodes", "radius", "stiffness", "origin", "frame_u", "frame_v", "frame_w")


def _parse_value(kind: str, raw: str, lineno: int, key: str):
    if kind == "str":
        return raw
    parts = raw.split()
    try:
        if kind == "int":
            if len(parts) != 1:
                raise ValueError
            return int(parts[0])
        values = tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{key} expects a {kind} value, got {raw!r}", lineno) from None
    if kind == "float":
        if len(values) != 1:
            raise ConfigError(f"{key} expects a single number, got {len(values)}", lineno)
        return values[0]
    if kind == "vec3":
        if len(values) != 3:
            raise ConfigError(f"{key} expects three numbers, got {len(values)}", lineno)
        return values
    if kind == "floats":
        if not values:
            raise ConfigError(f"{key} expects at least one number", lineno)
        if len(values) % 2 == 0:
            raise ConfigError(
                f"{key} expects an odd coefficient count (constant, then cos/sin pairs)",
                lineno,
            )
        return values
    raise AssertionError(kind)


def _scan(text: str):
    """Raw pass: {(section, key): (value, lineno)} plus section header lines."""
    data: dict[tuple[str, str], tuple] = {}
    sections: dict[str, int] = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("[") and body.endswith("]"):
            name = body[1:-1].strip()
            if name not in _SCHEMA:
                raise ConfigError(f"unknown section [{name}]", lineno)
            if name in sections:
                raise ConfigError(f"duplicate section [{name}]", lineno)
            sections[name] = lineno
            current = name
            continue
        if "=" not in body:
            raise ConfigError("expected key = value", lineno)
        key, raw = (part.strip() for part in body.split("=", 1))
        if current is None:
            raise ConfigError(f"key {key!r} appears before any section", lineno)
        if key not in _SCHEMA[current]:
            raise ConfigError(f"unknown key {key!r} in section [{current}]", lineno)
        if (current, key) in data:
            raise ConfigError(f"duplicate key {key!r} in section [{current}]", lineno)
        data[(current, key)] = (_parse_value(_SCHEMA[current][key], raw, lineno, key), lineno)
    return data, sections


def _rod_spec(section: str, data, sections) -> RodSpec:
    header_line = sections[section]
    got = {key: val for (sec, key), (val, _) in data.items() if sec == section}
    lines = {key: ln for (sec, key), (_, ln) in data.items() if sec == section}
    missing = [key for key in _ROD_REQUIRED if key not in got]
    if missing:
        raise ConfigError(f"[{section}] missing required keys: {', '.join(missing)}", header_line)
    if got["length"] <= 0:
        raise ConfigError("length must be positive", lines["length"])
    if got["nodes"] < 8:
        raise ConfigError("nodes must be at least 8", lines["nodes"])
    if got["radius"] <= 0:
        raise ConfigError("radius must be positive", lines["radius"])
    if "max_thickness" in got and got["max_thickness"] < got["radius"]:
        raise ConfigError("max_thickness must be at least the radius", lines["max_thickness"])
    if any(a <= 0 for a in got["stiffness"]):
        raise ConfigError("stiffness entries must be positive", lines["stiffness"])
    if got.get("mass_density", 0.0) < 0:
        raise ConfigError("mass_density must be non-negative", lines["mass_density"])
    return RodSpec(
        length=got["length"],
        nodes=got["nodes"],
        radius=got["radius"],
        stiffness=got["stiffness"],
        origin=got["origin"],
        frame_u=got["frame_u"],
        frame_v=got["frame_v"],
        frame_w=got["frame_w"],
        max_thickness=got.get("max_thickness"),
        mass_density=got.get("mass_density", 0.0),
        kappa1=got.get("kappa1", (0.0,)),
        kappa2=got.get("kappa2", (0.0,)),
        twist=got.get("twist", (0.0,)),
    )


def parse_config(text: str) -> ScenarioConfig:
    """Parse scenario text; every failure names its line."""
    data, sections = _scan(text)
    if "rod1" not in sections:
        raise ConfigError("missing required section [rod1]", 1)
    rod1 = _rod_spec("rod1", data, sections)
    rod2 = _rod_spec("rod2", data, sections) if "rod2" in sections else None

    def lookup(section, key, default):
        entry = data.get((section, key))
        return entry[0] if entry is not None else default

    def line_of(section, key):
        return data[(section, key)][1]

    cfg = ScenarioConfig(
        rod1=rod1,
        rod2=rod2,
        sigma=lookup("problem", "sigma", 0.0),
        gravity=lookup("problem", "gravity", (0.0, 0.0, 0.0)),
        outer_iters=lookup("solver", "outer_iters", 40),
        film_steps_per_outer=lookup("solver", "film_steps_per_outer", 200),
        growth=lookup("solver", "growth", 4.0),
        harmonics=lookup("solver", "harmonics", 1),
        margin_eps=lookup("solver", "margin_eps", 0.05),
        fd_step=lookup("solver", "fd_step", 1e-5),
        grad_tol=lookup("solver", "grad_tol", 1e-8),
        outer_tol=lookup("solver", "outer_tol", 1e-10),
        step_clamp=lookup("solver", "step_clamp", None),
        energy_bound=lookup("solver", "energy_bound", None),
        seed=lookup("solver", "seed", 0),
        w_closure=lookup("solver", "w_closure", 1.0),
        w_margin=lookup("solver", "w_margin", 1.0),
        w_cn=lookup("solver", "w_cn", 1.0),
        w_gap=lookup("solver", "w_gap", 1.0),
        mesh_stations=lookup("mesh", "stations", 48),
        mesh_rings=lookup("mesh", "rings", 8),
        voxel=lookup("mesh", "voxel", None),
        output_dir=lookup("output", "dir", "out"),
    )
    if cfg.sigma < 0:
        raise ConfigError("sigma must be non-negative", line_of("problem", "sigma"))
    if cfg.outer_iters < 1:
        raise ConfigError("outer_iters must be at least 1", line_of("solver", "outer_iters"))
    if cfg.growth < 1.0:
        raise ConfigError("growth must be at least 1", line_of("solver", "growth"))
    if cfg.harmonics < 0:
        raise ConfigError("harmonics must be non-negative", line_of("solver", "harmonics"))
    if not (0.0 < cfg.margin_eps < 1.0):
        raise ConfigError("margin_eps must lie in (0, 1)", line_of("solver", "margin_eps"))
    if cfg.step_clamp is not None and cfg.step_clamp <= 0:
        raise ConfigError("step_clamp must be positive", line_of("solver", "step_clamp"))
    for name in ("w_closure", "w_margin", "w_cn", "w_gap"):
        if getattr(cfg, name) < 0:
            raise ConfigError(f"{name} must be non-negative", line_of("solver", name))
    if cfg.mesh_stations < 3:
        raise ConfigError("stations must be at least 3", line_of("mesh", "stations"))
    if cfg.mesh_rings < 1:
        raise ConfigError("rings must be at least 1", line_of("mesh", "rings"))
    if cfg.voxel is not None and cfg.voxel <= 0:
        raise ConfigError("voxel must be positive", line_of("mesh", "voxel"))
    return cfg


def _fmt(value) -> str:
    if isinstance(value, tuple):
        return " ".join(repr(float(v)) for v in value)
    if isinstance(value, bool):
        raise AssertionError("no boolean config values")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _rod_lines(spec: RodSpec) -> list[str]:
    lines = [
        f"length = {_fmt(spec.length)}",
        f"nodes = {spec.nodes}",
        f"radius = {_fmt(spec.radius)}",
    ]
    if spec.max_thickness is not None:
        lines.append(f"max_thickness = {_fmt(spec.max_thickness)}")
    lines += [
        f"stiffness = {_fmt(spec.stiffness)}",
        f"mass_density = {_fmt(spec.mass_density)}",
        f"kappa1 = {_fmt(spec.kappa1)}",
        f"kappa2 = {_fmt(spec.kappa2)}",
        f"twist = {_fmt(spec.twist)}",
        f"origin = {_fmt(spec.origin)}",
        f"frame_u = {_fmt(spec.frame_u)}",
        f"frame_v = {_fmt(spec.frame_v)}",
        f"frame_w = {_fmt(spec.frame_w)}",
    ]
    return lines


def serialize_config(cfg: ScenarioConfig) -> str:
    """Canonical text form; parse(serialize(cfg)) reproduces cfg exactly."""
    out = ["[rod1]"] + _rod_lines(cfg.rod1)
    if cfg.rod2 is not None:
        out += ["", "[rod2]"] + _rod_lines(cfg.rod2)
    out += [
        "",
        "[problem]",
        f"sigma = {_fmt(cfg.sigma)}",
        f"gravity = {_fmt(cfg.gravity)}",
        "",
        "[solver]",
        f"outer_iters = {cfg.outer_iters}",
        f"film_steps_per_outer = {cfg.film_steps_per_outer}",
        f"growth = {_fmt(cfg.growth)}",
        f"harmonics = {cfg.harmonics}",
        f"margin_eps = {_fmt(cfg.margin_eps)}",
        f"fd_step = {_fmt(cfg.fd_step)}",
        f"grad_tol = {_fmt(cfg.grad_tol)}",
        f"outer_tol = {_fmt(cfg.outer_tol)}",
    ]
    if cfg.step_clamp is not None:
        out.append(f"step_clamp = {_fmt(cfg.step_clamp)}")
    if cfg.energy_bound is not None:
        out.append(f"energy_bound = {_fmt(cfg.energy_bound)}")
    out += [
        f"seed = {cfg.seed}",
        f"w_closure = {_fmt(cfg.w_closure)}",
        f"w_margin = {_fmt(cfg.w_margin)}",
        f"w_cn = {_fmt(cfg.w_cn)}",
        f"w_gap = {_fmt(cfg.w_gap)}",
        "",
        "[mesh]",
        f"stations = {cfg.mesh_stations}",
        f"rings = {cfg.mesh_rings}",
    ]
    if cfg.voxel is not None:
        out.append(f"voxel = {_fmt(cfg.voxel)}")
    out += ["", "[output]", f"dir = {cfg.output_dir}", ""]
    return "\n".join(out)


def preset_names() -> tuple[str, ...]:
    return PRESETS


def load_preset(name: str) -> ScenarioConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    text = resources.files("kplateau").joinpath(f"presets/{name}.cfg").read_text()
    return parse_config(text)


def _density_samples(coeffs: tuple[float, ...], L: float, n: int) -> np.ndarray:
    harmonics = (len(coeffs) - 1) // 2
    return fourier_columns(L, n, harmonics) @ np.asarray(coeffs)


def _build_rod(spec: RodSpec):
    df = DensityField(
        spec.length,
        _density_samples(spec.kappa1, spec.length, spec.nodes),
        _density_samples(spec.kappa2, spec.length, spec.nodes),
        _density_samples(spec.twist, spec.length, spec.nodes),
    )
    frame = Frame(np.array(spec.frame_u), np.array(spec.frame_v), np.array(spec.frame_w))
    placement = Placement(np.array(spec.origin), frame)
    cs = CrossSection(spec.radius, spec.max_thickness)
    return df, placement, cs


def build_link(cfg: ScenarioConfig) -> LinkConfig:
    rod1 = _build_rod(cfg.rod1)
    rod2 = _build_rod(cfg.rod2) if cfg.rod2 is not None else None
    rho2 = cfg.rod2.mass_density if cfg.rod2 is not None else 0.0
    return LinkConfig(
        rod1=rod1,
        rod2=rod2,
        rho=(cfg.rod1.mass_density, rho2),
        gravity=np.array(cfg.gravity),
    )


def build_elastics(cfg: ScenarioConfig):
    ed1 = ElasticDensity(*cfg.rod1.stiffness)
    ed2 = ElasticDensity(*cfg.rod2.stiffness) if cfg.rod2 is not None else None
    return ed1, ed2


def build_options(cfg: ScenarioConfig) -> SolveOptions:
    return SolveOptions(
        outer_iters=cfg.outer_iters,
        film_steps_per_outer=cfg.film_steps_per_outer,
        weights=PenaltyWeights(cfg.w_closure, cfg.w_margin, cfg.w_cn, cfg.w_gap),
        growth=cfg.growth,
        step_clamp=cfg.step_clamp,
        grad_tol=cfg.grad_tol,
        outer_tol=cfg.outer_tol,
        margin_eps=cfg.margin_eps,
        fd_step=cfg.fd_step,
        harmonics=cfg.harmonics,
        mesh_stations=cfg.mesh_stations,
        mesh_rings=cfg.mesh_rings,
        voxel=cfg.voxel,
        energy_bound=cfg.energy_bound,
        seed=cfg.seed,
    )
