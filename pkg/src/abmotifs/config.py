"""Scenario configuration: an INI file with one section per concern.

Example::

    [geometry]
    kind = motif          ; motif | network | plaquette
    n = 4
    h = 1.0
    g = 0.3
    flux = 3.141592653589793
    gamma = 0.1

    [initial]
    kind = random         ; center | dark | random | amplitudes
    seed = 1

    [evolution]
    t_max = auto
    method = rk4
"""
from __future__ import annotations

import configparser
import io
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .lattice import MotifSpec, NetworkSpec, build_motif, build_network, build_plaquette


class ConfigError(ValueError):
    pass


@dataclass
class GeometryConfig:
    kind: str = "motif"
    n: int = 4
    h: float = 1.0
    g: float = 0.3
    flux: float = float(np.pi)
    gamma: float = 0.1
    motifs: int = 1
    edges: str = ""
    coupling: float = 0.27
    kappa: float = 0.0


@dataclass
class SectorConfig:
    k: int = 1


@dataclass
class InitialConfig:
    kind: str = "random"
    seed: int = 1
    b: float = 1.0
    amplitudes: str = ""


@dataclass
class EvolutionConfig:
    t_max: str = "auto"
    dt: str = "auto"
    method: str = "rk4"
    save_every: int = 10
    transient_eps: float = 1e-8


@dataclass
class ObservablesConfig:
    magnetization: bool = True
    concurrence: bool = True
    spectrum: bool = True
    sync: bool = True
    theory: bool = True
    plot: bool = True
    closed_control: bool = False


@dataclass
class DisorderConfig:
    kind: str = "on_site"
    epsilons: str = "0.001 0.00316 0.01 0.0316 0.1"
    seeds: str = "0 1 2 3 4"


@dataclass
class OutputConfig:
    dir: str = ""
    note: str = ""


SECTIONS = {
    "geometry": GeometryConfig,
    "sector": SectorConfig,
    "initial": InitialConfig,
    "evolution": EvolutionConfig,
    "observables": ObservablesConfig,
    "disorder": DisorderConfig,
    "output": OutputConfig,
}


@dataclass
class ScenarioConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    sector: SectorConfig = field(default_factory=SectorConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)
    observables: ObservablesConfig = field(default_factory=ObservablesConfig)
    disorder: DisorderConfig = field(default_factory=DisorderConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def build_graph(self):
        geo = self.geometry
        if geo.kind == "plaquette":
            return build_plaquette(geo.h, geo.g, geo.flux, geo.gamma)
        motif = MotifSpec(geo.n, geo.h, geo.g, geo.flux, geo.gamma)
        if geo.kind == "motif":
            return build_motif(motif)
        if geo.kind == "network":
            return build_network(NetworkSpec([motif] * geo.motifs, parse_edges(geo.edges),
                                             geo.coupling, geo.kappa))
        raise ConfigError(f"geometry.kind: unknown geometry {geo.kind!r}")

    def rates(self) -> list[float]:
        geo = self.geometry
        return [geo.h, geo.g, geo.gamma, geo.kappa]

    def to_ini(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        for name in SECTIONS:
            cp[name] = {k: _format(v) for k, v in asdict(getattr(self, name)).items()}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    def as_dict(self) -> dict:
        return {name: asdict(getattr(self, name)) for name in SECTIONS}


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(section: str, key: str, raw: str, typ):
    try:
        if typ is bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ is int:
            return int(raw)
        if typ is float:
            return float(raw)
        return raw.strip()
    except ValueError:
        raise ConfigError(f"{section}.{key}: cannot parse {raw!r} as {typ.__name__}") from None


def from_ini(text: str) -> ScenarioConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    cfg = ScenarioConfig()
    for section in cp.sections():
        if section not in SECTIONS:
            raise ConfigError(f"{section}: unknown section")
        target = getattr(cfg, section)
        types = {f.name: f.type for f in fields(target)}
        for key, raw in cp[section].items():
            if key not in types:
                raise ConfigError(f"{section}.{key}: unknown key")
            typ = {"int": int, "float": float, "bool": bool, "str": str}[types[key]]
            setattr(target, key, _parse(section, key, raw, typ))
    validate(cfg)
    return cfg


def load(path) -> ScenarioConfig:
    with open(path) as fh:
        return from_ini(fh.read())


def parse_edges(text: str) -> list[tuple[int, int]]:
    edges = []
    for chunk in text.replace(";", ",").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            a, b = chunk.split("-")
            edges.append((int(a), int(b)))
        except ValueError:
            raise ConfigError(f"geometry.edges: cannot parse edge {chunk!r} (use 'a-b')") from None
    return edges


def parse_numbers(text: str, typ=float) -> list:
    return [typ(x) for x in text.replace(",", " ").split()]


def parse_amplitudes(text: str) -> np.ndarray:
    try:
        return np.array([complex(x.replace(" ", "")) for x in text.split(",") if x.strip()])
    except ValueError:
        raise ConfigError(f"initial.amplitudes: cannot parse {text!r}") from None


def validate(cfg: ScenarioConfig) -> None:
    geo = cfg.geometry
    if geo.kind not in ("motif", "network", "plaquette"):
        raise ConfigError(f"geometry.kind: unknown geometry {geo.kind!r}")
    if geo.kind != "plaquette" and geo.n < 2:
        raise ConfigError("geometry.n: motif order must be >= 2")
    for key in ("gamma", "kappa"):
        if getattr(geo, key) < 0:
            raise ConfigError(f"geometry.{key}: rate must be non-negative")
    if cfg.initial.kind not in ("center", "dark", "random", "amplitudes"):
        raise ConfigError(f"initial.kind: unknown initial state {cfg.initial.kind!r}")
    if cfg.evolution.method not in ("rk4", "spectral"):
        raise ConfigError(f"evolution.method: unknown method {cfg.evolution.method!r}")
    for key in ("t_max", "dt"):
        raw = getattr(cfg.evolution, key)
        if raw != "auto":
            try:
                if float(raw) <= 0:
                    raise ValueError
            except ValueError:
                raise ConfigError(f"evolution.{key}: expected 'auto' or a positive number") from None
    if cfg.evolution.save_every < 1:
        raise ConfigError("evolution.save_every: must be >= 1")
    if not 0 < cfg.evolution.transient_eps < 1:
        raise ConfigError("evolution.transient_eps: must lie in (0, 1)")
    if cfg.sector.k < 0:
        raise ConfigError("sector.k: must be non-negative")
    if geo.kind == "network":
        parse_edges(geo.edges)
    if cfg.initial.kind == "amplitudes":
        parse_amplitudes(cfg.initial.amplitudes)


# Figure presets: (name, description, overrides)
PRESETS = {
    "fig1": dict(geometry=dict(kind="motif", n=4, h=1.0, g=0.3, flux=float(np.pi), gamma=0.1),
                 initial=dict(kind="random", seed=1),
                 observables=dict(closed_control=True)),
    "fig2": dict(geometry=dict(kind="motif", n=3, h=1.0, g=0.5, flux=float(np.pi), gamma=0.2),
                 initial=dict(kind="random", seed=1),
                 observables=dict(concurrence=True)),
    "fig3": dict(geometry=dict(kind="network", n=3, h=1.0, g=0.3, flux=float(np.pi), gamma=0.2,
                               motifs=3, edges="0-1,1-2", coupling=0.9 * 0.3, kappa=0.2),
                 initial=dict(kind="random", seed=1)),
    "fig4": dict(geometry=dict(kind="network", n=3, h=1.0, g=0.3, flux=float(np.pi), gamma=0.2,
                               motifs=3, edges="0-1,1-2", coupling=0.9 * 0.3, kappa=0.0),
                 initial=dict(kind="random", seed=1),
                 output=dict(note="fig4 runs without collective dissipation (kappa = 0, gamma = 0.2); "
                                  "the alternative listing kappa = 2 gamma = 0.4 contradicts the "
                                  "uncoupled-dissipation setup and is not used")),
}


def preset(name: str, n: int | None = None, seed: int | None = None) -> ScenarioConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    cfg = ScenarioConfig()
    for section, values in PRESETS[name].items():
        for key, value in values.items():
            setattr(getattr(cfg, section), key, value)
    if n is not None:
        cfg.geometry.n = n
    if seed is not None:
        cfg.initial.seed = seed
    validate(cfg)
    return cfg
