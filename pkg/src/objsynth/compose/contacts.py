"""Contact generation: hull-plane by vertex clipping, hull-hull by a
separating-axis test with a deepest-point manifold (up to 4 points)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stage import Stage

MAX_EDGE_AXIS_PAIRS = 4096   # beyond this, fall back to face + centerline axes
FEATURE_TOL = 5e-4           # support-set thickness when picking manifold points
MERGE_DIST = 1e-3            # contact points closer than this are merged


@dataclass
class Contact:
    body_a: int          # -1 = static stage
    body_b: int
    point: np.ndarray    # world
    normal: np.ndarray   # unit, from A to B
    depth: float         # penetration along normal, >= 0 at overlap


def hull_plane_contacts(body_index: int, verts_world: np.ndarray, stage: Stage,
                        margin: float, max_points: int = 8) -> list[Contact]:
    """Vertices below the stage plane (within `margin`) whose projections lie
    inside the stage polygon become contacts with the static stage."""
    signed = verts_world @ stage.normal - stage.offset
    below = np.flatnonzero(signed < margin)
    if len(below) == 0:
        return []
    below = below[np.argsort(signed[below], kind="stable")][:max_points]
    out = []
    for i in below:
        v = verts_world[i]
        if not stage.contains(v):
            continue
        out.append(Contact(body_a=-1, body_b=body_index, point=v.copy(),
                           normal=stage.normal.copy(), depth=float(-signed[i])))
    return out


def hull_hull_contacts(index_a: int, verts_a: np.ndarray, normals_a: np.ndarray,
                       edges_a: np.ndarray, index_b: int, verts_b: np.ndarray,
                       normals_b: np.ndarray, edges_b: np.ndarray,
                       margin: float) -> list[Contact]:
    """SAT over face normals of both hulls, edge-direction cross products
    (skipped above MAX_EDGE_AXIS_PAIRS), and the center line.  Returns up to
    4 deepest-point contacts along the minimum-penetration axis."""
    center_a = verts_a.mean(axis=0)
    center_b = verts_b.mean(axis=0)

    axes = [normals_a, normals_b]
    if len(edges_a) * len(edges_b) <= MAX_EDGE_AXIS_PAIRS:
        cross = np.cross(edges_a[:, None, :], edges_b[None, :, :]).reshape(-1, 3)
        lengths = np.linalg.norm(cross, axis=1)
        good = lengths > 1e-8
        if good.any():
            axes.append(cross[good] / lengths[good, None])
    line = center_b - center_a
    ll = np.linalg.norm(line)
    if ll > 1e-12:
        axes.append((line / ll)[None, :])
    all_axes = np.concatenate(axes, axis=0)

    pa = verts_a @ all_axes.T   # (Ka, X)
    pb = verts_b @ all_axes.T
    min_a, max_a = pa.min(axis=0), pa.max(axis=0)
    min_b, max_b = pb.min(axis=0), pb.max(axis=0)
    pen_pos = max_a - min_b     # push B along +axis
    pen_neg = max_b - min_a     # push B along -axis
    if pen_pos.min() < -margin or pen_neg.min() < -margin:
        return []  # separating axis found

    # minimum-penetration axis, oriented from A to B
    pen = np.where(pen_pos <= pen_neg, pen_pos, pen_neg)
    best = int(np.argmin(pen))
    depth = float(pen[best])
    axis = all_axes[best].copy()
    if pen_pos[best] > pen_neg[best]:
        axis = -axis
    # projections along the oriented axis
    qa = verts_a @ axis
    qb = verts_b @ axis
    top_a = qa.max()
    bot_b = qb.min()

    candidates: list[tuple[float, np.ndarray]] = []
    for i in np.flatnonzero(qa >= top_a - FEATURE_TOL):
        candidates.append((float(qa[i] - bot_b), verts_a[i]))   # A vertex into B
    for j in np.flatnonzero(qb <= bot_b + FEATURE_TOL):
        candidates.append((float(top_a - qb[j]), verts_b[j]))   # B vertex into A
    # deepest first, merge near-duplicates, cap at 4
    candidates.sort(key=lambda c: -c[0])
    out: list[Contact] = []
    for d, p in candidates:
        if any(np.linalg.norm(p - c.point) < MERGE_DIST for c in out):
            continue
        out.append(Contact(body_a=index_a, body_b=index_b, point=p.copy(),
                           normal=axis, depth=max(float(min(d, depth)), 0.0)))
        if len(out) == 4:
            break
    return out
