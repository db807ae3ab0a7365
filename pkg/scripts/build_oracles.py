"""Recompute the reference numbers used by the test-suite, independently of the package.

Everything here is plain loops over the closed-form definitions (mpmath where
precision matters). Output is frozen to tests/fixtures/oracles.json.
"""

import json
import math
from pathlib import Path

import mpmath as mp

mp.mp.dps = 30
C = mp.mpf(299792458)
OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "oracles.json"


def k_of(f):
    return 2 * mp.pi * mp.mpf(f) / C


def cell_x(n, d):
    return [(m - (n - 1) / mp.mpf(2)) * d for m in range(n)]


def array_mag(phases, xs, theta_deg, theta_i_deg, f, q=1):
    k = k_of(f)
    s = mp.sin(mp.radians(theta_deg)) + mp.sin(mp.radians(theta_i_deg))
    acc = mp.mpc(0)
    for ph, x in zip(phases, xs):
        acc += mp.e ** (1j * (ph + k * x * s))
    el = max(mp.cos(mp.radians(theta_deg)), 0) ** q
    return abs(acc) * el


def wrap(p):
    return (p + mp.pi) % (2 * mp.pi) - mp.pi


def one_bit(theta_i, theta_r, n=16, d=0.016, f=5.45e9):
    k = k_of(f)
    s = mp.sin(mp.radians(theta_r)) + mp.sin(mp.radians(theta_i))
    out = []
    for x in cell_x(n, d):
        v = wrap(-k * x * s)
        d_off = abs(wrap(v))
        d_on = abs(wrap(v - mp.pi))
        out.append(1 if d_on < d_off - mp.mpf("1e-12") else 0)
    return out


def scan(phases, xs, theta_i, f, step=0.1):
    n = int(round(180 / step))
    return [(-90 + i * step, array_mag(phases, xs, -90 + i * step, theta_i, f)) for i in range(n + 1)]


def half_power_width(samples):
    ang = [a for a, _ in samples]
    mag = [float(m) for _, m in samples]
    i = max(range(len(mag)), key=mag.__getitem__)
    half = mag[i] / math.sqrt(2)
    lo = i
    while lo > 0 and mag[lo - 1] >= half:
        lo -= 1
    hi = i
    while hi < len(mag) - 1 and mag[hi + 1] >= half:
        hi += 1

    def cross(j0, j1):
        return ang[j0] + (half - mag[j0]) * (ang[j1] - ang[j0]) / (mag[j1] - mag[j0])

    return ang[i], cross(hi + 1, hi) - cross(lo - 1, lo), mag[i]


def main():
    o = {}
    # phase slope per cell for -60 -> 30 at the design frequency
    k = k_of(5.45e9)
    o["slope_rad_per_cell"] = float(-k * (mp.sin(mp.radians(30)) + mp.sin(mp.radians(-60))) * mp.mpf("0.016"))

    # uniform 16-cell broadside beamwidth
    xs = cell_x(16, mp.mpf("0.016"))
    _, bw, _ = half_power_width(scan([0] * 16, xs, 0, 5.45e9, 0.05))
    o["uniform16_broadside_bw_deg"] = bw
    lam = float(C / 5.45e9)
    o["uniform16_closed_form_bw_deg"] = math.degrees(0.886 * lam / (16 * 0.016))

    # 1-bit patterns at 5.5 GHz for the four commanded angles
    o["one_bit"] = {}
    for thr in (15, 30, 45, 60):
        bits = one_bit(-60, thr)
        ph = [mp.pi * b for b in bits]
        peak, bw, pk = half_power_width(scan(ph, xs, -60, 5.5e9, 0.1))
        kk = k_of(5.45e9)
        s = mp.sin(mp.radians(thr)) + mp.sin(mp.radians(-60))
        cont = [wrap(-kk * x * s) for x in xs]
        cpk = max(float(m) for _, m in scan(cont, xs, -60, 5.5e9, 0.1))
        o["one_bit"][str(thr)] = {"bits": "".join(map(str, bits)), "peak_deg": peak, "bw_deg": bw,
                                  "loss_db": 20 * math.log10(cpk / pk)}

    # uniform coding, -60 in, +60 out: |sum| * sqrt(cos*cos)
    o["uniform_link_gain"] = float(160 * mp.sqrt(mp.cos(mp.radians(60)) * mp.cos(mp.radians(60))))

    # monostatic Doppler of 1.5 m/s at 5.5 GHz
    o["doppler_hz"] = float(2 * mp.mpf("1.5") * mp.mpf("5.5e9") / C)

    # noise-only band power expectation for the default STFT: sigma^2 * sum(w^2)/n per bin
    n = 111
    w = [0.5 - 0.5 * math.cos(2 * math.pi * i / (n - 1)) for i in range(n)]
    o["hann111_mean_w2"] = sum(v * v for v in w) / n
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(o, indent=2, sort_keys=True) + "\n")
    print(json.dumps(o, indent=2))


if __name__ == "__main__":
    main()
