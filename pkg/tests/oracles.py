"""Brute-force ray launching, used as an oracle for the image-method tracer."""

import math

import numpy as np


def launch(walls, src, dst, max_bounces=2, n_rays=100_000, capture=2e-3):
    """Shoot n_rays uniformly in angle from src, bounce specularly off segment walls
    and record rays passing within `capture` of dst.

    walls: list of ((x0, y0), (x1, y1)). Returns {wall_sequence: path_length} keeping,
    per sequence, the ray of closest approach, as (length, vertices).
    """
    a = np.array([w[0] for w in walls], dtype=float)
    b = np.array([w[1] for w in walls], dtype=float)
    seg = b - a
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)

    phi = (np.arange(n_rays) + 0.5) * 2 * math.pi / n_rays
    org = np.tile(src, (n_rays, 1))
    d = np.column_stack([np.cos(phi), np.sin(phi)])
    travelled = np.zeros(n_rays)
    seqs = [()] * n_rays
    alive = np.ones(n_rays, dtype=bool)
    best = {}
    hits = []

    for bounce in range(max_bounces + 1):
        # nearest wall hit for every ray
        t_hit = np.full(n_rays, np.inf)
        w_hit = np.full(n_rays, -1)
        for j in range(len(walls)):
            den = d[:, 0] * seg[j, 1] - d[:, 1] * seg[j, 0]
            q = a[j] - org
            with np.errstate(divide="ignore", invalid="ignore"):
                t = (q[:, 0] * seg[j, 1] - q[:, 1] * seg[j, 0]) / den
                u = (q[:, 0] * d[:, 1] - q[:, 1] * d[:, 0]) / den
            ok = (np.abs(den) > 1e-15) & (t > 1e-9) & (u >= 0) & (u <= 1) & (t < t_hit)
            t_hit = np.where(ok, t, t_hit)
            w_hit = np.where(ok, j, w_hit)

        # closest approach to dst before the hit
        s = np.clip(((dst - org) * d).sum(axis=1), 0, t_hit)
        miss = np.linalg.norm(org + s[:, None] * d - dst, axis=1)
        got = np.flatnonzero(alive & (miss < capture))
        for i in got:
            key = seqs[i]
            verts = [tuple(src)] + [tuple(h[i]) for h in hits] + [tuple(org[i] + s[i] * d[i])]
            cand = (miss[i], travelled[i] + s[i], verts)
            if key not in best or cand[0] < best[key][0]:
                best[key] = cand

        if bounce == max_bounces:
            break
        alive &= np.isfinite(t_hit)
        hit = org + np.where(np.isfinite(t_hit), t_hit, 0)[:, None] * d
        n = np.column_stack([-seg[w_hit, 1], seg[w_hit, 0]])
        n /= np.linalg.norm(n, axis=1, keepdims=True)
        d = d - 2 * (d * n).sum(axis=1)[:, None] * n
        travelled = travelled + np.where(np.isfinite(t_hit), t_hit, 0)
        org = hit
        hits.append(hit)
        seqs = [seqs[i] + (int(w_hit[i]),) if alive[i] else seqs[i] for i in range(n_rays)]

    return {k: (v[1], v[2]) for k, v in best.items()}


def near_endpoint(walls, vertices, tol=0.01):
    """True if any leg between consecutive vertices passes within tol of a wall endpoint;
    such grazing configurations are ambiguous for a finite capture radius."""
    ends = [np.asarray(p, dtype=float) for w in walls for p in w]
    for p, q in zip(vertices, vertices[1:]):
        p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
        v = q - p
        L2 = float(v @ v)
        for e in ends:
            u = min(1.0, max(0.0, float((e - p) @ v) / L2))
            if np.linalg.norm(p + u * v - e) < tol:
                return True
    return False
