"""Scenario configuration: YAML schema, strict loading, presets and object construction."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .channel import RadarConfig, RisSetup
from .dsp import DspError, WindowSpec
from .geometry import CorridorLayout, GeometryError, Scene, WallSegment, unit_from_deg
from .kinematics import GaitParams, KinematicsError, TrajectoryParams, build_trajectory
from .ris import CodingMap, RisError, RisPanel, coding_for_angle

SCHEMA_VERSION = 1
KINDS = ("T1", "T2", "T3", "T4")
VARIANTS = ("bare", "ris30", "ris45", "ris60")


class ConfigError(ValueError):
    pass


@dataclass
class SceneConfig:
    layout: CorridorLayout = field(default_factory=CorridorLayout)
    walls: list | None = None          # explicit [{p0, p1, reflection_coeff?, thickness?}] overrides layout
    wall_reflection: float = 0.6
    wall_thickness: float = 0.3
    radar_position: tuple = (0.0, 0.0)
    radar_boresight_deg: float = 90.0
    ris_position: tuple = (0.0, 1.8)
    ris_normal_deg: float = 210.0
    mount_height: float = 1.1


@dataclass
class RisConfig:
    enabled: bool = False
    theta_r: float = 45.0
    theta_i: float | None = None       # None -> from radar/RIS geometry
    coding_file: str | None = None
    panel: RisPanel = field(default_factory=RisPanel)


@dataclass
class TargetConfig:
    trajectory: str = "T1"
    speed: float = 1.5
    standoff: float = 2.0
    start_distance_from_ris: float = 5.0
    clearance: float = 0.3
    turn_taper: float = 0.2
    radial_offset: float = 0.4
    waypoints: list = field(default_factory=list)
    gait: GaitParams = field(default_factory=GaitParams)


@dataclass
class DspConfig:
    window: WindowSpec = field(default_factory=WindowSpec)
    dynamic_range: float = 60.0
    band_lo: float = 10.0
    band_hi: float | None = None       # None -> fs/2
    dc_halfwidth: float = 10.0
    threshold_db: float = -40.0


@dataclass
class OutputConfig:
    dir: str | None = None
    formats: list = field(default_factory=lambda: ["csv", "pgm"])


@dataclass
class ScenarioConfig:
    schema_version: int = SCHEMA_VERSION
    name: str = ""
    seed: int = 0
    scene: SceneConfig = field(default_factory=SceneConfig)
    ris: RisConfig = field(default_factory=RisConfig)
    target: TargetConfig = field(default_factory=TargetConfig)
    radar: RadarConfig = field(default_factory=RadarConfig)
    dsp: DspConfig = field(default_factory=DspConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    # -- derived objects ---------------------------------------------------

    def build_scene(self) -> Scene:
        s = self.scene
        if s.walls:
            walls = [WallSegment(tuple(w["p0"]), tuple(w["p1"]),
                                 w.get("reflection_coeff", s.wall_reflection),
                                 w.get("thickness", s.wall_thickness), w.get("name", ""))
                     for w in s.walls]
            layout = None
        else:
            walls = s.layout.walls(s.wall_reflection, s.wall_thickness)
            layout = s.layout
        return Scene(walls, tuple(s.radar_position), tuple(unit_from_deg(s.radar_boresight_deg)),
                     self.radar.antenna_beamwidth, tuple(s.ris_position),
                     tuple(unit_from_deg(s.ris_normal_deg)), s.mount_height, layout)

    def incidence_deg(self, scene: Scene | None = None) -> float:
        if self.ris.theta_i is not None:
            return float(self.ris.theta_i)
        scene = scene or self.build_scene()
        return float(scene.ris_angle_deg(scene.radar_pos.xy - scene.ris_pos.xy))

    def build_ris(self, scene: Scene | None = None) -> RisSetup | None:
        if not self.ris.enabled:
            return None
        panel = self.ris.panel
        if self.ris.coding_file:
            coding = CodingMap.load(self.ris.coding_file)
        else:
            coding = coding_for_angle(panel, self.incidence_deg(scene), self.ris.theta_r)
        return RisSetup(panel, coding)

    def trajectory_params(self) -> TrajectoryParams:
        t = self.target
        return TrajectoryParams(t.speed, self.radar.duration, t.standoff, t.start_distance_from_ris,
                                t.clearance, t.turn_taper, t.radial_offset,
                                tuple((float(w[0]), tuple(w[1])) for w in t.waypoints))

    def window_band(self) -> tuple[float, float]:
        hi = self.dsp.band_hi if self.dsp.band_hi is not None else self.radar.fs / 2
        return self.dsp.band_lo, hi

    # -- serialisation -----------------------------------------------------

    def to_dict(self) -> dict:
        return _plain(dataclasses.asdict(self))

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)

    def provenance(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, float) and obj.is_integer() and abs(obj) < 1e15:
        return float(obj)
    return obj


# nested dataclass fields, per class
_NESTED = {
    ScenarioConfig: {"scene": SceneConfig, "ris": RisConfig, "target": TargetConfig,
                     "radar": RadarConfig, "dsp": DspConfig, "output": OutputConfig},
    SceneConfig: {"layout": CorridorLayout},
    RisConfig: {"panel": RisPanel},
    TargetConfig: {"gait": GaitParams},
    DspConfig: {"window": WindowSpec},
}


def _build(cls, data, where: str):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{where or 'config'}: expected a mapping, got {type(data).__name__}")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where or 'config'}: unknown key(s) {', '.join(unknown)}")
    nested = _NESTED.get(cls, {})
    kwargs = {}
    for k, v in data.items():
        key = f"{where}.{k}" if where else k
        if k in nested:
            kwargs[k] = _build(nested[k], v, key)
        elif isinstance(v, list) and k in ("radar_position", "ris_position"):
            kwargs[k] = tuple(float(x) for x in v)
        else:
            kwargs[k] = v
    try:
        return cls(**kwargs)
    except (TypeError, GeometryError, RisError, KinematicsError, DspError, ValueError) as e:
        raise ConfigError(f"{where or 'config'}: {e}") from e


def from_dict(data: dict) -> ScenarioConfig:
    if data is None:
        data = {}
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version {version} not supported (expected {SCHEMA_VERSION})")
    cfg = _build(ScenarioConfig, data, "")
    validate(cfg)
    return cfg


def load_config(text: str) -> ScenarioConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        loc = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"config parse error{loc}: {getattr(e, 'problem', e)}") from e
    return from_dict(data or {})


def load_config_file(path) -> ScenarioConfig:
    return load_config(Path(path).read_text())


def validate(cfg: ScenarioConfig) -> None:
    """Cross-field checks plus re-construction of every physics object."""
    r = cfg.ris
    if not abs(r.theta_r) < 90:
        raise ConfigError(f"ris.theta_r = {r.theta_r}: reflection angle out of range")
    if r.theta_i is not None and not abs(r.theta_i) < 90:
        raise ConfigError(f"ris.theta_i = {r.theta_i}: incidence angle out of range")
    t = cfg.target
    if t.trajectory not in KINDS + ("custom",):
        raise ConfigError(f"target.trajectory: unknown kind {t.trajectory!r}")
    if t.trajectory == "T4" and not t.standoff > 0:
        raise ConfigError("target.standoff must be positive for T4")
    if t.trajectory == "T2" and not t.start_distance_from_ris > 0:
        raise ConfigError("target.start_distance_from_ris must be positive for T2")
    if t.trajectory == "custom" and len(t.waypoints) < 2:
        raise ConfigError("target.waypoints needs at least two entries for a custom trajectory")
    if t.speed <= 0 and t.trajectory != "custom":
        raise ConfigError("target.speed must be positive")
    if not set(cfg.output.formats) <= {"csv", "pgm"}:
        raise ConfigError("output.formats must be a subset of [csv, pgm]")
    if cfg.dsp.dynamic_range <= 0:
        raise ConfigError("dsp.dynamic_range must be positive")
    lo, hi = cfg.window_band()
    if not 0 <= lo < hi <= cfg.radar.fs / 2:
        raise ConfigError("dsp band must satisfy 0 <= band_lo < band_hi <= fs/2")
    try:
        scene = cfg.build_scene()
        cfg.build_ris(scene)
        cfg.dsp.window.length(cfg.radar.fs)
        t.gait.check_nyquist(cfg.radar.fs, cfg.radar.freq)
        if t.trajectory in KINDS and scene.layout is None:
            raise ConfigError(f"{t.trajectory} needs the corridor layout (scene.walls must be empty)")
        build_trajectory(t.trajectory, scene, cfg.trajectory_params())
    except (GeometryError, RisError, KinematicsError, DspError) as e:
        raise ConfigError(str(e)) from e


def preset_names() -> list[str]:
    return [f"{k}-{v}" for k in KINDS for v in VARIANTS]


def preset(kind: str, variant: str | None = None) -> ScenarioConfig:
    """Built-in scenario, e.g. preset("T2", "ris30") or preset("T2-ris30")."""
    if variant is None:
        if "-" not in kind:
            raise ConfigError(f"unknown preset {kind!r}")
        kind, variant = kind.split("-", 1)
    kind = kind.upper()
    if kind not in KINDS or variant not in VARIANTS:
        raise ConfigError(f"unknown preset {kind}-{variant}; choose from {', '.join(preset_names())}")
    cfg = ScenarioConfig(name=f"{kind}-{variant}")
    cfg.target.trajectory = kind
    if variant != "bare":
        cfg.ris.enabled = True
        cfg.ris.theta_r = float(variant[3:])
    validate(cfg)
    return cfg


def resolve(spec: str) -> ScenarioConfig:
    """A preset name or a path to a config file."""
    if spec in preset_names() or (not Path(spec).exists() and "-" in spec and spec.split("-")[0].upper() in KINDS):
        return preset(spec)
    p = Path(spec)
    if not p.exists():
        raise ConfigError(f"no preset or config file named {spec!r}")
    return load_config_file(p)


def with_overrides(cfg: ScenarioConfig, **changes) -> ScenarioConfig:
    """Copy with dotted-key overrides, e.g. with_overrides(c, **{"target.standoff": 3.0})."""
    data = cfg.to_dict()
    for dotted, value in changes.items():
        node = data
        *head, last = dotted.split(".")
        for k in head:
            node = node[k]
        if last not in node:
            raise ConfigError(f"unknown key {dotted}")
        node[last] = value
    return from_dict(data)

