"""Geometry kernel: meshes, rigid transforms, cameras, BVH ray casting,
and the id/depth rasterizer used for masks and visibility."""

from .bvh import Hit, Ray, SceneAccel, build_accel, ray_cast, ray_cast_brute, ray_cast_many
from .camera import Camera, Intrinsics, look_at
from .mesh import (Mesh, MeshError, compute_vertex_normals, load_mesh,
                   make_box, make_cube, make_icosphere, make_quad, make_triangle)
from .pose import Pose, axis_angle, quat_from_rotation, random_rotation, rotation_from_quat
from .raster import IdDepthBuffer, rasterize_ids

__all__ = [
    "Camera", "Hit", "IdDepthBuffer", "Intrinsics", "Mesh", "MeshError", "Pose",
    "Ray", "SceneAccel", "axis_angle", "build_accel", "compute_vertex_normals",
    "load_mesh", "look_at", "make_box", "make_cube", "make_icosphere", "make_quad",
    "make_triangle", "quat_from_rotation", "random_rotation", "rasterize_ids",
    "ray_cast", "ray_cast_brute", "ray_cast_many", "rotation_from_quat",
]
