"""Pinhole camera model.

Right-handed world frame with +Z up.  The camera looks down its local -Z
axis; +X is right in the image, +Y is up in camera space, image rows grow
downward.  Pixel (u, v) is sampled at its center (u + 0.5, v + 0.5).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pose import Pose


@dataclass(frozen=True)
class Intrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the image")

    @staticmethod
    def centered(focal: float, width: int, height: int) -> "Intrinsics":
        return Intrinsics(focal, focal, width / 2.0, height / 2.0, width, height)


@dataclass(frozen=True)
class Camera:
    """Intrinsics plus a world-from-camera pose."""

    intrinsics: Intrinsics
    pose: Pose = field(default_factory=Pose.identity)

    @property
    def width(self) -> int:
        return self.intrinsics.width

    @property
    def height(self) -> int:
        return self.intrinsics.height

    def project(self, points_world: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """World points -> (pixel coords (N,2), depths (N,)).

        Depth is the positive distance along the optical axis (-Z camera).
        Points at or behind the camera plane get depth <= 0 and NaN pixels.
        """
        p = np.atleast_2d(np.asarray(points_world, dtype=np.float64))
        pc = self.pose.inverse().apply(p)
        depth = -pc[:, 2]
        k = self.intrinsics
        with np.errstate(divide="ignore", invalid="ignore"):
            u = k.cx + k.fx * pc[:, 0] / depth
            v = k.cy - k.fy * pc[:, 1] / depth
        bad = depth <= 0
        u = np.where(bad, np.nan, u)
        v = np.where(bad, np.nan, v)
        return np.stack([u, v], axis=1), depth

    def unproject(self, pixels: np.ndarray, depths: np.ndarray) -> np.ndarray:
        """Pixel coords + optical-axis depths -> world points."""
        px = np.atleast_2d(np.asarray(pixels, dtype=np.float64))
        d = np.atleast_1d(np.asarray(depths, dtype=np.float64))
        k = self.intrinsics
        x = (px[:, 0] - k.cx) * d / k.fx
        y = -(px[:, 1] - k.cy) * d / k.fy
        z = -d
        return self.pose.apply(np.stack([x, y, z], axis=1))

    def pixel_rays(self) -> tuple[np.ndarray, np.ndarray]:
        """Origins and unit directions of rays through every pixel center.

        Returns (origin (3,), directions (H, W, 3)).
        """
        k = self.intrinsics
        u = np.arange(k.width) + 0.5
        v = np.arange(k.height) + 0.5
        uu, vv = np.meshgrid(u, v)
        x = (uu - k.cx) / k.fx
        y = -(vv - k.cy) / k.fy
        z = -np.ones_like(x)
        dirs = np.stack([x, y, z], axis=-1)
        dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
        dirs = dirs @ self.pose.rotation.T
        return self.pose.translation.copy(), dirs

    def ray_through(self, u: float, v: float) -> tuple[np.ndarray, np.ndarray]:
        """Origin and unit direction of the ray through pixel coords (u, v)."""
        k = self.intrinsics
        d = np.array([(u - k.cx) / k.fx, -(v - k.cy) / k.fy, -1.0])
        d /= np.linalg.norm(d)
        return self.pose.translation.copy(), self.pose.rotate(d)


def look_at(eye: np.ndarray, target: np.ndarray, up: np.ndarray = (0.0, 0.0, 1.0)) -> Pose:
    """World-from-camera pose at `eye` with the optical axis through `target`.

    Roll is fixed so the camera's +Y has maximal component along `up`
    (no-roll convention).  Falls back to +X world as the up hint when the
    view direction is parallel to `up`.
    """
    eye = np.asarray(eye, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    up = np.asarray(up, dtype=np.float64)
    fwd = target - eye
    n = np.linalg.norm(fwd)
    if n == 0:
        raise ValueError("look_at: eye and target coincide")
    fwd = fwd / n
    right = np.cross(fwd, up)
    rn = np.linalg.norm(right)
    if rn < 1e-12:
        right = np.cross(fwd, np.array([1.0, 0.0, 0.0]))
        rn = np.linalg.norm(right)
        if rn < 1e-12:
            right = np.cross(fwd, np.array([0.0, 1.0, 0.0]))
            rn = np.linalg.norm(right)
    right = right / rn
    z_axis = -fwd
    y_axis = np.cross(z_axis, right)
    return Pose(np.stack([right, y_axis, z_axis], axis=1), eye)
