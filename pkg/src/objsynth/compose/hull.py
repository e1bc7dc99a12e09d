"""Convex collision proxies: hull geometry plus mass properties.

One convex hull per object mesh.  Mass properties come from the exact
polyhedral integrals (divergence-theorem accumulation over hull faces) at
uniform density; tests check them against analytic cube/sphere values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from ..geom.mesh import Mesh

DEFAULT_DENSITY = 500.0  # kg/m^3


@dataclass(frozen=True)
class HullProxy:
    vertices: np.ndarray        # (K,3) hull vertices, mesh frame
    face_normals: np.ndarray    # (F,3) unique outward face normals
    edge_dirs: np.ndarray       # (E,3) unique edge directions (canonical sign)
    volume: float
    com: np.ndarray             # (3,) center of mass, mesh frame
    inertia: np.ndarray         # (3,3) about com at the given density
    mass: float
    radius: float               # bounding-sphere radius about com


def build_hull(mesh: Mesh, density: float = DEFAULT_DENSITY) -> HullProxy:
    hull = ConvexHull(mesh.vertices)
    verts = np.ascontiguousarray(mesh.vertices[hull.vertices])

    # re-index simplices into the reduced vertex set, fix outward winding
    remap = {int(v): i for i, v in enumerate(hull.vertices)}
    tris = []
    for simplex, eq in zip(hull.simplices, hull.equations):
        a, b, c = (remap[int(i)] for i in simplex)
        p0, p1, p2 = verts[a], verts[b], verts[c]
        if np.dot(np.cross(p1 - p0, p2 - p0), eq[:3]) < 0:
            b, c = c, b
        tris.append((a, b, c))
    tris = np.array(tris, dtype=np.int64)

    volume, com, inertia_unit = _mass_properties(verts, tris)
    if volume <= 0:
        raise ValueError("hull has non-positive volume (degenerate mesh?)")

    normals = _unique_directions(hull.equations[:, :3], signed=True)
    edges = set()
    for a, b, c in tris:
        for e in ((a, b), (b, c), (c, a)):
            edges.add((min(e), max(e)))
    dirs = np.array([verts[j] - verts[i] for i, j in sorted(edges)])
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    edge_dirs = _unique_directions(dirs, signed=False)

    mass = density * volume
    radius = float(np.linalg.norm(verts - com, axis=1).max())
    return HullProxy(vertices=verts, face_normals=normals, edge_dirs=edge_dirs,
                     volume=float(volume), com=com, inertia=inertia_unit * density,
                     mass=mass, radius=radius)


def _unique_directions(dirs: np.ndarray, signed: bool, tol: float = 1e-6) -> np.ndarray:
    out: list[np.ndarray] = []
    for d in dirs:
        n = np.linalg.norm(d)
        if n < 1e-12:
            continue
        d = d / n
        if not signed:
            # canonical sign: first component with magnitude > tol positive
            for c in d:
                if abs(c) > tol:
                    if c < 0:
                        d = -d
                    break
        if not any(np.linalg.norm(d - e) < tol for e in out):
            out.append(d)
    return np.array(out)


def _mass_properties(verts: np.ndarray, tris: np.ndarray):
    """Volume, center of mass, and unit-density inertia about the com for a
    closed, outward-wound triangle surface (polyhedral integrals)."""
    intg = np.zeros(10)  # 1, x, y, z, x^2, y^2, z^2, xy, yz, zx

    def subexpr(w0, w1, w2):
        t0 = w0 + w1
        f1 = t0 + w2
        t1 = w0 * w0
        t2 = t1 + w1 * t0
        f2 = t2 + w2 * f1
        f3 = w0 * t1 + w1 * t2 + w2 * f2
        g0 = f2 + w0 * (f1 + w0)
        g1 = f2 + w1 * (f1 + w1)
        g2 = f2 + w2 * (f1 + w2)
        return f1, f2, f3, g0, g1, g2

    for a, b, c in tris:
        x0, y0, z0 = verts[a]
        x1, y1, z1 = verts[b]
        x2, y2, z2 = verts[c]
        a1, b1, c1 = x1 - x0, y1 - y0, z1 - z0
        a2, b2, c2 = x2 - x0, y2 - y0, z2 - z0
        d0 = b1 * c2 - b2 * c1
        d1 = a2 * c1 - a1 * c2
        d2 = a1 * b2 - a2 * b1
        f1x, f2x, f3x, g0x, g1x, g2x = subexpr(x0, x1, x2)
        f1y, f2y, f3y, g0y, g1y, g2y = subexpr(y0, y1, y2)
        f1z, f2z, f3z, g0z, g1z, g2z = subexpr(z0, z1, z2)
        intg[0] += d0 * f1x
        intg[1] += d0 * f2x
        intg[2] += d1 * f2y
        intg[3] += d2 * f2z
        intg[4] += d0 * f3x
        intg[5] += d1 * f3y
        intg[6] += d2 * f3z
        intg[7] += d0 * (y0 * g0x + y1 * g1x + y2 * g2x)
        intg[8] += d1 * (z0 * g0y + z1 * g1y + z2 * g2y)
        intg[9] += d2 * (x0 * g0z + x1 * g1z + x2 * g2z)

    intg *= np.array([1 / 6, 1 / 24, 1 / 24, 1 / 24, 1 / 60, 1 / 60, 1 / 60,
                      1 / 120, 1 / 120, 1 / 120])
    volume = intg[0]
    com = intg[1:4] / volume
    cx, cy, cz = com
    ixx = intg[5] + intg[6] - volume * (cy * cy + cz * cz)
    iyy = intg[4] + intg[6] - volume * (cz * cz + cx * cx)
    izz = intg[4] + intg[5] - volume * (cx * cx + cy * cy)
    ixy = -(intg[7] - volume * cx * cy)
    iyz = -(intg[8] - volume * cy * cz)
    izx = -(intg[9] - volume * cz * cx)
    inertia = np.array([[ixx, ixy, izx], [ixy, iyy, iyz], [izx, iyz, izz]])
    return volume, com, inertia
