"""End-to-end run: config -> trajectory -> baseband -> spectrogram -> metrics and exports."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import BasebandSignal, synthesize_baseband
from .config import ScenarioConfig, load_config_file
from .dsp import DspError, Spectrogram, doppler_band_power, peak_doppler_track, stft, to_db
from .kinematics import build_trajectory
from .ris import pattern_metrics, reradiation_pattern


@dataclass
class SimulationOutput:
    config: ScenarioConfig
    signal: BasebandSignal | None
    spectrogram: Spectrogram            # dB, clipped to the dynamic range
    metrics: dict
    peak_track: list = field(default_factory=list)

    @property
    def provenance(self) -> str:
        return self.metrics["provenance"]

    @property
    def label(self) -> str:
        return self.config.name or self.metrics.get("provenance", "")[:8]


def _track_stats(track) -> tuple[float, float | None]:
    hits = [f for _, f in track if f is not None]
    cov = len(hits) / len(track) if track else 0.0
    med = statistics.median(abs(f) for f in hits) if hits else None
    return cov, med


def run(cfg: ScenarioConfig, out_dir=None, formats=None) -> SimulationOutput:
    scene = cfg.build_scene()
    ris = cfg.build_ris(scene)
    traj = build_trajectory(cfg.target.trajectory, scene, cfg.trajectory_params())
    sig = synthesize_baseband(scene, ris, traj, cfg.target.gait, cfg.radar, seed=cfg.seed)

    lin = stft(sig, cfg.dsp.window)
    lo, hi = cfg.window_band()
    power = doppler_band_power(lin, lo, hi, cfg.dsp.dc_halfwidth)
    db = to_db(lin, cfg.dsp.dynamic_range)
    track = peak_doppler_track(db, cfg.dsp.threshold_db, cfg.dsp.dc_halfwidth)
    cov, med = _track_stats(track)

    metrics = {
        "name": cfg.name,
        "provenance": cfg.provenance(),
        "seed": cfg.seed,
        "band_lo_hz": lo,
        "band_hi_hz": hi,
        "band_power_db": 10 * math.log10(power) if power > 0 else -math.inf,
        "track_coverage": cov,
        "track_median_hz": med,
        "n_frames": len(db.times),
        "n_freqs": len(db.freqs),
    }
    if ris is not None:
        pat = reradiation_pattern(ris.panel, ris.coding, cfg.incidence_deg(scene), cfg.radar.freq)
        for k, v in pattern_metrics(pat).as_dict().items():
            metrics[f"ris_{k}"] = v

    res = SimulationOutput(cfg, sig, db, metrics, track)
    out_dir = out_dir if out_dir is not None else cfg.output.dir
    if out_dir is not None:
        write_outputs(res, out_dir, formats or cfg.output.formats)
    return res


def write_outputs(res: SimulationOutput, out_dir, formats=("csv", "pgm")) -> Path:
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    if "csv" in formats:
        res.signal.to_csv(d / "signal.csv")
        res.spectrogram.to_csv(d / "spectrogram.csv")
    if "pgm" in formats:
        res.spectrogram.to_pgm(d / "spectrogram.pgm", res.config.dsp.dynamic_range)
    (d / "metrics.txt").write_text(format_metrics(res.metrics))
    (d / "config.resolved").write_text(res.config.to_yaml())
    return d


def format_metrics(m: dict) -> str:
    lines = []
    for k, v in m.items():
        if isinstance(v, float):
            v = f"{v:.6g}"
        lines.append(f"{k} = {'none' if v is None else v}")
    return "\n".join(lines) + "\n"


def parse_metrics(text: str) -> dict:
    out = {}
    for ln in text.splitlines():
        if "=" not in ln:
            continue
        k, v = (s.strip() for s in ln.split("=", 1))
        if v == "none":
            out[k] = None
            continue
        try:
            out[k] = int(v) if v.lstrip("-").isdigit() else float(v)
        except ValueError:
            out[k] = v
    return out


def load_run(path) -> SimulationOutput:
    """Rebuild a (signal-less) output from a run directory."""
    d = Path(path)
    if not (d / "metrics.txt").exists() or not (d / "config.resolved").exists():
        raise FileNotFoundError(f"{d} is not a run directory (metrics.txt / config.resolved missing)")
    cfg = load_config_file(d / "config.resolved")
    metrics = parse_metrics((d / "metrics.txt").read_text())
    spec_path = d / "spectrogram.csv"
    if spec_path.exists():
        spec = Spectrogram.from_csv(spec_path, "db")
    else:
        spec = Spectrogram(np.zeros(metrics.get("n_frames", 0)), np.zeros(metrics.get("n_freqs", 0)),
                           np.zeros((metrics.get("n_freqs", 0), metrics.get("n_frames", 0))), "db")
    return SimulationOutput(cfg, None, spec, metrics)


@dataclass
class Comparison:
    rows: list                  # (label, band_power_db, delta_db, coverage, median_hz)
    reference: str

    def to_text(self) -> str:
        head = f"{'run':<16}{'band dB':>10}{'rel dB':>9}{'coverage':>10}{'median Hz':>11}"
        out = [head, "-" * len(head)]
        for lab, p, d, c, m in self.rows:
            ms = f"{m:11.1f}" if m is not None else f"{'-':>11}"
            out.append(f"{lab:<16}{p:10.2f}{d:9.2f}{c:10.2f}{ms}")
        return "\n".join(out) + "\n"

    def to_csv(self) -> str:
        lines = ["run,band_power_db,relative_db,coverage,median_hz"]
        for lab, p, d, c, m in self.rows:
            lines.append(f"{lab},{p:.6g},{d:.6g},{c:.6g},{'' if m is None else f'{m:.6g}'}")
        return "\n".join(lines) + "\n"


def _dsp_key(o: SimulationOutput):
    c = o.config
    return (c.radar.fs, c.dsp.window, c.dsp.dc_halfwidth, c.window_band())


def compare(outputs: list[SimulationOutput]) -> Comparison:
    """Band power relative to the first run. All runs must share the STFT axes."""
    if len(outputs) < 2:
        raise ValueError("compare needs at least two runs")
    ref = outputs[0]
    for o in outputs[1:]:
        if _dsp_key(o) != _dsp_key(ref):
            raise DspError(f"{o.label}: DSP settings differ from {ref.label}")
        if o.spectrogram.mag.shape != ref.spectrogram.mag.shape or not (
                np.allclose(o.spectrogram.freqs, ref.spectrogram.freqs)
                and np.allclose(o.spectrogram.times, ref.spectrogram.times)):
            raise DspError(f"{o.label}: spectrogram axes differ from {ref.label}")
    p0 = ref.metrics["band_power_db"]
    rows = [(o.label, o.metrics["band_power_db"], o.metrics["band_power_db"] - p0,
             o.metrics["track_coverage"], o.metrics.get("track_median_hz")) for o in outputs]
    return Comparison(rows, ref.label)
