"""Command-line entry point: run, compare, pattern, presets."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .channel import PhysicsError
from .config import ConfigError, preset_names, resolve, with_overrides
from .dsp import DspError
from .geometry import GeometryError
from .kinematics import KinematicsError
from .pipeline import compare, format_metrics, load_run, run
from .ris import RisError, pattern_metrics, reradiation_pattern

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS = 0, 2, 3
_FORMATS = {"csv": ["csv"], "pgm": ["pgm"], "both": ["csv", "pgm"]}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--format", choices=sorted(_FORMATS), default="both",
                        help="which output files to write (run only)")
    common.add_argument("--quiet", action="store_true", help="suppress the summary on stdout")

    p = argparse.ArgumentParser(prog="corner-ris-sim",
                                description="Around-the-corner micro-Doppler radar simulator")
    sub = p.add_subparsers(dest="verb", required=True)
    r = sub.add_parser("run", parents=[common], help="run a config file or preset")
    r.add_argument("scenario", help="preset name (see `presets`) or YAML config path")
    c = sub.add_parser("compare", parents=[common], help="compare finished run directories")
    c.add_argument("dirs", nargs="+", help="two or more directories written by `run`; the first is the reference")
    pt = sub.add_parser("pattern", parents=[common], help="RIS reradiation pattern of a scenario")
    pt.add_argument("scenario", help="preset or YAML path with the RIS enabled")
    sub.add_parser("presets", parents=[common], help="list built-in presets")
    return p


def _say(args, text: str) -> None:
    if not args.quiet:
        sys.stdout.write(text)


def _load(args):
    cfg = resolve(args.scenario)
    if args.seed is not None:
        cfg = with_overrides(cfg, seed=args.seed)
    return cfg


def _cmd_run(args) -> int:
    cfg = _load(args)
    out = args.out if args.out is not None else (cfg.output.dir or Path("runs") / (cfg.name or "run"))
    res = run(cfg, out_dir=out, formats=_FORMATS[args.format])
    _say(args, format_metrics(res.metrics) + f"wrote {out}\n")
    return EXIT_OK


def _cmd_compare(args) -> int:
    try:
        outs = [load_run(d) for d in args.dirs]
    except FileNotFoundError as e:
        raise ConfigError(str(e)) from e
    try:
        rep = compare(outs)
    except (DspError, ValueError) as e:
        raise ConfigError(str(e)) from e
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        (d / "compare.csv").write_text(rep.to_csv())
        (d / "compare.txt").write_text(rep.to_text())
    _say(args, rep.to_text())
    return EXIT_OK


def _cmd_pattern(args) -> int:
    cfg = _load(args)
    if not cfg.ris.enabled:
        raise ConfigError(f"{args.scenario}: RIS is disabled, no pattern to compute")
    scene = cfg.build_scene()
    ris = cfg.build_ris(scene)
    pat = reradiation_pattern(ris.panel, ris.coding, cfg.incidence_deg(scene), cfg.radar.freq)
    m = pattern_metrics(pat)
    d = Path(args.out or ".")
    d.mkdir(parents=True, exist_ok=True)
    mag = np.abs(pat.gain)
    with np.errstate(divide="ignore"):
        rel = 20 * np.log10(mag / mag.max())
    rows = np.column_stack([pat.angles, pat.gain.real, pat.gain.imag, rel])
    np.savetxt(d / "pattern.csv", rows, delimiter=",", header="angle_deg,re,im,rel_db",
               comments="", fmt="%.9g")
    ris.coding.save(d / "coding.txt")
    (d / "pattern_metrics.txt").write_text(format_metrics(m.as_dict()))
    _say(args, format_metrics(m.as_dict()))
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.verb == "presets":
            _say(args, "\n".join(preset_names()) + "\n")
            return EXIT_OK
        return {"run": _cmd_run, "compare": _cmd_compare, "pattern": _cmd_pattern}[args.verb](args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (PhysicsError, GeometryError, KinematicsError, RisError, DspError) as e:
        print(f"physics error: {e}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
