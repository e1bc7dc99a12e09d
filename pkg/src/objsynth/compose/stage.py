"""Stages: planar polygons that object arrangements are generated on."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..rng import Pcg32

COPLANAR_TOL = 1e-6


class StageError(ValueError):
    pass


@dataclass
class Stage:
    """A simple planar polygon (>= 3 coplanar vertices, meters).

    Objects are placed on the +normal side; gravity acts along -normal.
    The normal follows the right-hand rule of the vertex winding.
    """

    polygon: np.ndarray
    stage_id: str = "stage"

    def __post_init__(self):
        self.polygon = np.asarray(self.polygon, dtype=np.float64).reshape(-1, 3)
        if len(self.polygon) < 3:
            raise StageError("stage polygon needs at least 3 vertices")
        self.normal = _newell_normal(self.polygon)
        if self.normal is None:
            raise StageError("degenerate stage polygon (zero area)")
        self.offset = float(np.dot(self.normal, self.polygon.mean(axis=0)))
        dists = self.polygon @ self.normal - self.offset
        if np.abs(dists).max() > COPLANAR_TOL:
            raise StageError(f"stage polygon not coplanar within {COPLANAR_TOL} m")
        # in-plane orthonormal basis
        edge = self.polygon[1] - self.polygon[0]
        u = edge - np.dot(edge, self.normal) * self.normal
        self.basis_u = u / np.linalg.norm(u)
        self.basis_v = np.cross(self.normal, self.basis_u)
        self._pts2d = self.to_plane(self.polygon)
        if _self_intersects(self._pts2d):
            raise StageError("stage polygon is self-intersecting")
        self._tris = _ear_clip(self._pts2d)
        corners = self.polygon[self._tris]
        self._areas = 0.5 * np.linalg.norm(
            np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0]), axis=1)
        total = self._areas.sum()
        if total <= 0:
            raise StageError("degenerate stage polygon (zero area)")
        self._cum = np.cumsum(self._areas) / total

    def to_plane(self, points: np.ndarray) -> np.ndarray:
        """3D points -> 2D in-plane coordinates."""
        rel = np.atleast_2d(points) - self.polygon[0]
        return np.stack([rel @ self.basis_u, rel @ self.basis_v], axis=1)

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        return np.atleast_2d(points) @ self.normal - self.offset

    def contains(self, point: np.ndarray) -> bool:
        """Is the projection of `point` inside the polygon (boundary counts)?"""
        return _point_in_polygon(self.to_plane(point)[0], self._pts2d)

    def area(self) -> float:
        return float(self._areas.sum())


def sample_point_in_polygon(stage: Stage, rng: Pcg32) -> np.ndarray:
    """Uniform point on the stage polygon: triangle chosen with probability
    proportional to area, then a uniform barycentric sample."""
    r = rng.uniform()
    tri_idx = int(np.searchsorted(stage._cum, r, side="right"))
    tri_idx = min(tri_idx, len(stage._tris) - 1)
    a, b, c = stage.polygon[stage._tris[tri_idx]]
    u1, u2 = rng.uniform(), rng.uniform()
    s = np.sqrt(u1)
    return (1 - s) * a + s * (1 - u2) * b + s * u2 * c


def _newell_normal(pts: np.ndarray) -> np.ndarray | None:
    n = np.zeros(3)
    for i in range(len(pts)):
        a, b = pts[i], pts[(i + 1) % len(pts)]
        n += np.cross(a, b)
    length = np.linalg.norm(n)
    if length < 1e-12:
        return None
    return n / length


def _seg_intersect(p1, p2, p3, p4) -> bool:
    """Proper 2D segment intersection (shared endpoints excluded by caller)."""
    d1 = np.cross(p4 - p3, p1 - p3)
    d2 = np.cross(p4 - p3, p2 - p3)
    d3 = np.cross(p2 - p1, p3 - p1)
    d4 = np.cross(p2 - p1, p4 - p1)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def _self_intersects(pts: np.ndarray) -> bool:
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(i - j) <= 1 or (i == 0 and j == n - 1):
                continue  # adjacent edges share a vertex
            if _seg_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]):
                return True
    return False


def _point_in_polygon(p: np.ndarray, poly: np.ndarray) -> bool:
    """Crossing-number test with an on-boundary tolerance."""
    n = len(poly)
    inside = False
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        # on-segment check
        ab = b - a
        ap = p - a
        cross = ab[0] * ap[1] - ab[1] * ap[0]
        if abs(cross) < 1e-9 and -1e-9 <= np.dot(ap, ab) <= np.dot(ab, ab) + 1e-9:
            return True
        if (a[1] > p[1]) != (b[1] > p[1]):
            x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0])
            if p[0] < x:
                inside = not inside
    return inside


def _ear_clip(pts: np.ndarray) -> np.ndarray:
    """Ear-clipping triangulation of a simple polygon; returns (T,3) indices."""
    n = len(pts)
    if n == 3:
        return np.array([[0, 1, 2]], dtype=np.int64)
    # ensure counter-clockwise
    signed = 0.0
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        signed += a[0] * b[1] - b[0] * a[1]
    idx = list(range(n)) if signed > 0 else list(range(n))[::-1]

    def is_convex(im, i0, ip):
        a, b, c = pts[im], pts[i0], pts[ip]
        return np.cross(b - a, c - b) > 1e-14

    def tri_contains(im, i0, ip, q):
        a, b, c = pts[im], pts[i0], pts[ip]
        d1 = np.cross(b - a, q - a)
        d2 = np.cross(c - b, q - b)
        d3 = np.cross(a - c, q - c)
        return d1 >= -1e-14 and d2 >= -1e-14 and d3 >= -1e-14

    tris = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10 * n * n:
            raise StageError("ear clipping failed (degenerate stage polygon)")
        m = len(idx)
        clipped = False
        for k in range(m):
            im, i0, ip = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
            if not is_convex(im, i0, ip):
                continue
            if any(tri_contains(im, i0, ip, pts[j])
                   for j in idx if j not in (im, i0, ip)):
                continue
            tris.append((im, i0, ip))
            idx.pop(k)
            clipped = True
            break
        if not clipped:
            raise StageError("ear clipping failed (degenerate stage polygon)")
    tris.append(tuple(idx))
    return np.array(tris, dtype=np.int64)
