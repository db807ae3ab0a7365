"""Simulation of micro-Doppler radar sensing around a corridor corner with a 1-bit reflecting surface."""

from .channel import BasebandSignal, PhysicsError, RadarConfig, RisSetup, path_amplitude, synthesize_baseband
from .config import ConfigError, ScenarioConfig, load_config, preset, preset_names
from .dsp import Spectrogram, WindowSpec, doppler_band_power, peak_doppler_track, stft, to_db
from .geometry import CorridorLayout, Scene, WallSegment, canonical_scene, trace_paths
from .kinematics import GaitParams, Trajectory, TrajectoryKind, build_trajectory
from .pipeline import SimulationOutput, compare, run
from .ris import CodingMap, RisPanel, coding_for_angle, pattern_metrics, reradiation_pattern

__version__ = "0.1.0"
