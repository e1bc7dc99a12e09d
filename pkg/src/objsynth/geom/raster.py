"""Per-pixel instance-id / depth rasterization via primary rays.

One ray through each pixel center; no antialiasing, so id buffers (and the
masks derived from them) are binary and reproducible.  Depth ties resolve
by ascending (instance id, triangle id) inside the traversal kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .bvh import SceneAccel
from .camera import Camera


@dataclass(frozen=True)
class IdDepthBuffer:
    instance: np.ndarray   # (H, W) int32, -1 = background
    depth: np.ndarray      # (H, W) float64, distance along the ray, inf = background

    def mask(self, instance_id: int) -> np.ndarray:
        return self.instance == instance_id

    def coverage(self, instance_id: int) -> int:
        return int(np.count_nonzero(self.instance == instance_id))


def rasterize_ids(accel: SceneAccel, camera: Camera, subset=None) -> IdDepthBuffer:
    """Rasterize instance ids and depths; `subset` restricts intersection to
    the listed instance ids (the "rendered alone" full-mask case)."""
    origin, dirs = camera.pixel_rays()
    height, width = dirs.shape[:2]
    out_inst = np.empty((height, width), dtype=np.int32)
    out_depth = np.empty((height, width), dtype=np.float64)
    kernels.raster_kernel(*accel.traversal_args(subset),
                          origin, np.ascontiguousarray(dirs), out_inst, out_depth)
    return IdDepthBuffer(out_inst, out_depth)
