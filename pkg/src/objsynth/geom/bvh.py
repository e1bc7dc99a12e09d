"""Scene acceleration structure: world-space triangle soup + BVH.

build_accel flattens posed mesh instances into contiguous triangle arrays
(ordered by instance id, then local triangle id) and builds a median-split
BVH over them.  ray_cast_brute is the all-triangle oracle; it applies the
same accept and tie-break rules as the compiled traversal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .camera import Camera
from .mesh import Mesh
from .pose import Pose

LEAF_SIZE = 4


@dataclass(frozen=True)
class Ray:
    origin: np.ndarray
    direction: np.ndarray  # unit length

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=np.float64).reshape(3))
        d = np.asarray(self.direction, dtype=np.float64).reshape(3)
        n = np.linalg.norm(d)
        if not np.isfinite(n) or abs(n - 1.0) > 1e-9:
            raise ValueError("ray direction must be unit length")
        object.__setattr__(self, "direction", d)

    def at(self, t: float) -> np.ndarray:
        return self.origin + t * self.direction


@dataclass(frozen=True)
class Hit:
    instance: int          # instance id within the accel
    triangle: int          # local triangle id within its mesh
    t: float               # distance along the ray, > 0
    u: float               # barycentric weight of vertex 1
    v: float               # barycentric weight of vertex 2
    normal: np.ndarray     # interpolated unit shading normal (world)


class SceneAccel:
    """Immutable after construction; ray queries are read-only."""

    def __init__(self, instances: list[tuple[Mesh, Pose]]):
        if not instances:
            raise ValueError("build_accel requires at least one instance")
        p0s, p1s, p2s = [], [], []
        n0s, n1s, n2s = [], [], []
        inst_ids, local_ids = [], []
        materials = []
        for inst_id, (mesh, pose) in enumerate(instances):
            mesh.validate()
            v = pose.apply(mesh.vertices)
            n = mesh.normals @ pose.rotation.T
            tri = mesh.triangles
            p0s.append(v[tri[:, 0]])
            p1s.append(v[tri[:, 1]])
            p2s.append(v[tri[:, 2]])
            n0s.append(n[tri[:, 0]])
            n1s.append(n[tri[:, 1]])
            n2s.append(n[tri[:, 2]])
            inst_ids.append(np.full(len(tri), inst_id, dtype=np.int32))
            local_ids.append(np.arange(len(tri), dtype=np.int32))
            materials.append(mesh.material)

        self.n_instances = len(instances)
        self.inst_material = np.array(materials, dtype=np.int32)
        tri_p0 = np.concatenate(p0s)
        tri_p1 = np.concatenate(p1s)
        tri_p2 = np.concatenate(p2s)
        tri_n0 = np.concatenate(n0s)
        tri_n1 = np.concatenate(n1s)
        tri_n2 = np.concatenate(n2s)
        tri_inst = np.concatenate(inst_ids)
        tri_local = np.concatenate(local_ids)
        gid = np.arange(len(tri_p0), dtype=np.int32)  # (instance, local) order

        order, bmin, bmax, left, count = _build_bvh(tri_p0, tri_p1, tri_p2)
        # permute triangles so leaves are contiguous
        self.tri_p0 = np.ascontiguousarray(tri_p0[order])
        self.tri_p1 = np.ascontiguousarray(tri_p1[order])
        self.tri_p2 = np.ascontiguousarray(tri_p2[order])
        self.tri_n0 = np.ascontiguousarray(tri_n0[order])
        self.tri_n1 = np.ascontiguousarray(tri_n1[order])
        self.tri_n2 = np.ascontiguousarray(tri_n2[order])
        self.tri_inst = np.ascontiguousarray(tri_inst[order])
        self.tri_local = np.ascontiguousarray(tri_local[order])
        self.tri_gid = np.ascontiguousarray(gid[order])
        self.node_bmin = bmin
        self.node_bmax = bmax
        self.node_left = left
        self.node_count = count
        self._no_mask = np.empty(0, dtype=np.uint8)

    @property
    def n_triangles(self) -> int:
        return len(self.tri_p0)

    def world_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.node_bmin[0].copy(), self.node_bmax[0].copy()

    def traversal_args(self, subset=None) -> tuple:
        """Arrays consumed by the compiled kernels, in positional order."""
        return (self.node_bmin, self.node_bmax, self.node_left, self.node_count,
                self.tri_p0, self.tri_p1, self.tri_p2, self.tri_inst, self.tri_gid,
                self.instance_mask(subset))

    def instance_mask(self, subset) -> np.ndarray:
        if subset is None:
            return self._no_mask
        mask = np.zeros(self.n_instances, dtype=np.uint8)
        for i in subset:
            mask[i] = 1
        return mask

    def shading_normal(self, tri_idx: int, u: float, v: float) -> np.ndarray:
        w = 1.0 - u - v
        n = (w * self.tri_n0[tri_idx] + u * self.tri_n1[tri_idx] + v * self.tri_n2[tri_idx])
        norm = np.linalg.norm(n)
        if norm < 1e-20:
            # degenerate interpolation; fall back to the geometric normal
            n = np.cross(self.tri_p1[tri_idx] - self.tri_p0[tri_idx],
                         self.tri_p2[tri_idx] - self.tri_p0[tri_idx])
            norm = np.linalg.norm(n)
        return n / norm

    def _hit_from(self, tri: int, t: float, u: float, v: float) -> Hit | None:
        if tri < 0:
            return None
        return Hit(instance=int(self.tri_inst[tri]), triangle=int(self.tri_local[tri]),
                   t=float(t), u=float(u), v=float(v),
                   normal=self.shading_normal(tri, u, v))


def build_accel(instances: list[tuple[Mesh, Pose]]) -> SceneAccel:
    return SceneAccel(instances)


def ray_cast(accel: SceneAccel, ray: Ray, subset=None) -> Hit | None:
    """Nearest positive-t intersection, or None."""
    o, d = ray.origin, ray.direction
    tri, t, u, v = kernels.traverse(*accel.traversal_args(subset),
                                    o[0], o[1], o[2], d[0], d[1], d[2], kernels.NO_HIT)
    return accel._hit_from(tri, t, u, v)


def ray_cast_many(accel: SceneAccel, origins: np.ndarray, dirs: np.ndarray, subset=None):
    """Batch nearest-hit query; returns (tri_array_index, t, u, v) arrays.

    tri index is the internal (permuted) index; use accel.tri_inst /
    tri_local to decode. -1 marks misses.
    """
    origins = np.ascontiguousarray(origins, dtype=np.float64).reshape(-1, 3)
    dirs = np.ascontiguousarray(dirs, dtype=np.float64).reshape(-1, 3)
    n = len(origins)
    out_tri = np.empty(n, dtype=np.int64)
    out_t = np.empty(n, dtype=np.float64)
    out_u = np.empty(n, dtype=np.float64)
    out_v = np.empty(n, dtype=np.float64)
    kernels.ray_cast_batch(*accel.traversal_args(subset), origins, dirs,
                           out_tri, out_t, out_u, out_v)
    return out_tri, out_t, out_u, out_v


def ray_cast_brute(accel: SceneAccel, ray: Ray, subset=None) -> Hit | None:
    """All-triangle reference intersector (the oracle for BVH equivalence).

    Vectorized numpy, same accept rules and tie-break as the kernel:
    smallest t wins, ties to the lowest original (instance, triangle) id.
    """
    o, d = ray.origin, ray.direction
    ox, oy, oz = o
    dx, dy, dz = d
    # component-wise to match the scalar kernel's operation order exactly
    e1x = accel.tri_p1[:, 0] - accel.tri_p0[:, 0]
    e1y = accel.tri_p1[:, 1] - accel.tri_p0[:, 1]
    e1z = accel.tri_p1[:, 2] - accel.tri_p0[:, 2]
    e2x = accel.tri_p2[:, 0] - accel.tri_p0[:, 0]
    e2y = accel.tri_p2[:, 1] - accel.tri_p0[:, 1]
    e2z = accel.tri_p2[:, 2] - accel.tri_p0[:, 2]
    px = dy * e2z - dz * e2y
    py = dz * e2x - dx * e2z
    pz = dx * e2y - dy * e2x
    det = e1x * px + e1y * py + e1z * pz
    ok = np.abs(det) >= kernels.DET_EPS
    inv_det = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    tx = ox - accel.tri_p0[:, 0]
    ty = oy - accel.tri_p0[:, 1]
    tz = oz - accel.tri_p0[:, 2]
    u = (tx * px + ty * py + tz * pz) * inv_det
    ok &= (u >= 0.0) & (u <= 1.0)
    qx = ty * e1z - tz * e1y
    qy = tz * e1x - tx * e1z
    qz = tx * e1y - ty * e1x
    v = (dx * qx + dy * qy + dz * qz) * inv_det
    ok &= (v >= 0.0) & (u + v <= 1.0)
    t = (e2x * qx + e2y * qy + e2z * qz) * inv_det
    ok &= t > 0.0
    if subset is not None:
        mask = accel.instance_mask(subset).astype(bool)
        ok &= mask[accel.tri_inst]
    if not ok.any():
        return None
    t_valid = np.where(ok, t, np.inf)
    tmin = t_valid.min()
    candidates = np.flatnonzero(t_valid == tmin)
    tri = candidates[np.argmin(accel.tri_gid[candidates])]
    return accel._hit_from(int(tri), t[tri], u[tri], v[tri])


def _build_bvh(p0: np.ndarray, p1: np.ndarray, p2: np.ndarray):
    """Median-split BVH over triangle centroids; returns flat arrays."""
    n_tris = len(p0)
    tri_bmin = np.minimum(np.minimum(p0, p1), p2)
    tri_bmax = np.maximum(np.maximum(p0, p1), p2)
    centroids = (tri_bmin + tri_bmax) * 0.5
    order = np.arange(n_tris, dtype=np.int64)

    bmins: list[np.ndarray] = []
    bmaxs: list[np.ndarray] = []
    lefts: list[int] = []
    counts: list[int] = []

    def new_node() -> int:
        bmins.append(np.zeros(3))
        bmaxs.append(np.zeros(3))
        lefts.append(0)
        counts.append(0)
        return len(bmins) - 1

    root = new_node()
    stack = [(root, 0, n_tris)]
    while stack:
        node, start, end = stack.pop()
        idx = order[start:end]
        bmins[node] = tri_bmin[idx].min(axis=0)
        bmaxs[node] = tri_bmax[idx].max(axis=0)
        count = end - start
        if count <= LEAF_SIZE:
            lefts[node] = start
            counts[node] = count
            continue
        cents = centroids[idx]
        extent = cents.max(axis=0) - cents.min(axis=0)
        axis = int(np.argmax(extent))
        mid = count // 2
        if extent[axis] <= 0.0:
            # all centroids coincide; arbitrary balanced split
            part = np.arange(count)
        else:
            part = np.argpartition(cents[:, axis], mid)
        order[start:end] = idx[part]
        left = new_node()
        right = new_node()
        assert right == left + 1
        lefts[node] = left
        counts[node] = 0
        stack.append((right, start + mid, end))
        stack.append((left, start, start + mid))

    return (order,
            np.ascontiguousarray(bmins, dtype=np.float64),
            np.ascontiguousarray(bmaxs, dtype=np.float64),
            np.array(lefts, dtype=np.int32),
            np.array(counts, dtype=np.int32))
