"""Compiled ray-casting kernels (numba).

Scalar Möller–Trumbore intersection plus stack-based BVH traversal; the
pure-numpy brute-force oracle lives in bvh.py and shares the same accept
rules so accelerated and brute-force hits are bit-identical.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

DET_EPS = 1e-14
NO_HIT = 1e30


@njit(cache=True, inline="always")
def ray_triangle(ox, oy, oz, dx, dy, dz, p0, p1, p2):
    """Möller–Trumbore; returns (t, u, v) with t = NO_HIT on miss.

    Accept rule: u >= 0, v >= 0, u + v <= 1, t > 0 — consistent for all
    triangles so a shared edge resolves by the caller's tie-break.
    """
    e1x = p1[0] - p0[0]
    e1y = p1[1] - p0[1]
    e1z = p1[2] - p0[2]
    e2x = p2[0] - p0[0]
    e2y = p2[1] - p0[1]
    e2z = p2[2] - p0[2]
    # pvec = d x e2
    px = dy * e2z - dz * e2y
    py = dz * e2x - dx * e2z
    pz = dx * e2y - dy * e2x
    det = e1x * px + e1y * py + e1z * pz
    if -DET_EPS < det < DET_EPS:
        return NO_HIT, 0.0, 0.0
    inv_det = 1.0 / det
    tx = ox - p0[0]
    ty = oy - p0[1]
    tz = oz - p0[2]
    u = (tx * px + ty * py + tz * pz) * inv_det
    if u < 0.0 or u > 1.0:
        return NO_HIT, 0.0, 0.0
    # qvec = tvec x e1
    qx = ty * e1z - tz * e1y
    qy = tz * e1x - tx * e1z
    qz = tx * e1y - ty * e1x
    v = (dx * qx + dy * qy + dz * qz) * inv_det
    if v < 0.0 or u + v > 1.0:
        return NO_HIT, 0.0, 0.0
    t = (e2x * qx + e2y * qy + e2z * qz) * inv_det
    if t <= 0.0:
        return NO_HIT, 0.0, 0.0
    return t, u, v


@njit(cache=True, inline="always")
def _aabb_hit(ox, oy, oz, idx, idy, idz, bmin, bmax, tmax):
    t1 = (bmin[0] - ox) * idx
    t2 = (bmax[0] - ox) * idx
    tlo = min(t1, t2)
    thi = max(t1, t2)
    t1 = (bmin[1] - oy) * idy
    t2 = (bmax[1] - oy) * idy
    tlo = max(tlo, min(t1, t2))
    thi = min(thi, max(t1, t2))
    t1 = (bmin[2] - oz) * idz
    t2 = (bmax[2] - oz) * idz
    tlo = max(tlo, min(t1, t2))
    thi = min(thi, max(t1, t2))
    return thi >= max(tlo, 0.0) and tlo <= tmax


@njit(cache=True)
def traverse(node_bmin, node_bmax, node_left, node_count,
             tri_p0, tri_p1, tri_p2, tri_inst, tri_gid, allowed,
             ox, oy, oz, dx, dy, dz, tmax):
    """Nearest hit along one ray.

    Returns (tri_index, t, u, v); tri_index == -1 on miss.  Ties in t break
    toward the lower original (instance, triangle) order via tri_gid.
    `allowed` is a per-instance uint8 mask (empty array = all allowed).
    """
    idx = 1.0 / dx if dx != 0.0 else np.inf
    idy = 1.0 / dy if dy != 0.0 else np.inf
    idz = 1.0 / dz if dz != 0.0 else np.inf
    check_mask = allowed.shape[0] > 0

    best_t = tmax
    best_tri = -1
    best_gid = 0x7FFFFFFF
    best_u = 0.0
    best_v = 0.0

    stack = np.empty(64, dtype=np.int32)
    sp = 0
    stack[0] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        node = stack[sp]
        if not _aabb_hit(ox, oy, oz, idx, idy, idz, node_bmin[node], node_bmax[node], best_t):
            continue
        count = node_count[node]
        if count > 0:
            start = node_left[node]
            for i in range(start, start + count):
                if check_mask and allowed[tri_inst[i]] == 0:
                    continue
                t, u, v = ray_triangle(ox, oy, oz, dx, dy, dz,
                                       tri_p0[i], tri_p1[i], tri_p2[i])
                if t >= NO_HIT:
                    continue
                if t < best_t or (t == best_t and tri_gid[i] < best_gid):
                    best_t = t
                    best_tri = i
                    best_gid = tri_gid[i]
                    best_u = u
                    best_v = v
        else:
            left = node_left[node]
            stack[sp] = left
            stack[sp + 1] = left + 1
            sp += 2
    if best_tri < 0:
        return -1, NO_HIT, 0.0, 0.0
    return best_tri, best_t, best_u, best_v


@njit(cache=True, parallel=True)
def raster_kernel(node_bmin, node_bmax, node_left, node_count,
                  tri_p0, tri_p1, tri_p2, tri_inst, tri_gid, allowed,
                  origin, dirs, out_inst, out_depth):
    """Primary-ray id/depth rasterization over every pixel center."""
    height, width = out_inst.shape
    for py in prange(height):
        for px in range(width):
            d = dirs[py, px]
            tri, t, _u, _v = traverse(node_bmin, node_bmax, node_left, node_count,
                                      tri_p0, tri_p1, tri_p2, tri_inst, tri_gid, allowed,
                                      origin[0], origin[1], origin[2],
                                      d[0], d[1], d[2], NO_HIT)
            if tri >= 0:
                out_inst[py, px] = tri_inst[tri]
                out_depth[py, px] = t
            else:
                out_inst[py, px] = -1
                out_depth[py, px] = np.inf


@njit(cache=True)
def ray_cast_batch(node_bmin, node_bmax, node_left, node_count,
                   tri_p0, tri_p1, tri_p2, tri_inst, tri_gid, allowed,
                   origins, dirs, out_tri, out_t, out_u, out_v):
    for i in range(origins.shape[0]):
        tri, t, u, v = traverse(node_bmin, node_bmax, node_left, node_count,
                                tri_p0, tri_p1, tri_p2, tri_inst, tri_gid, allowed,
                                origins[i, 0], origins[i, 1], origins[i, 2],
                                dirs[i, 0], dirs[i, 1], dirs[i, 2], NO_HIT)
        out_tri[i] = tri
        out_t[i] = t
        out_u[i] = u
        out_v[i] = v
