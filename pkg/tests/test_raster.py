import numpy as np
import pytest

from objsynth.geom import (Camera, Intrinsics, Pose, Ray, build_accel, look_at,
                           make_cube, make_quad, rasterize_ids, ray_cast)
from objsynth.rng import Pcg32
from objsynth.geom.pose import random_rotation


def ortho_ish_camera(width=48, height=36, z=5.0, focal=400.0):
    # looking down -Z from above the origin
    return Camera(Intrinsics.centered(focal, width, height), Pose(np.eye(3), [0, 0, z]))


def test_empty_scene_all_background():
    # scene with one tiny triangle far outside the frustum
    quad = make_quad(center=(100, 100, 0), edge_u=(0.01, 0, 0), edge_v=(0, 0.01, 0))
    accel = build_accel([(quad, Pose.identity())])
    buf = rasterize_ids(accel, ortho_ish_camera())
    assert (buf.instance == -1).all()
    assert np.isinf(buf.depth).all()


def test_depth_ordering_two_squares():
    near = make_quad(center=(0, 0, 2.0), edge_u=(1, 0, 0), edge_v=(0, 1, 0))
    far = make_quad(center=(0, 0, 1.0), edge_u=(1, 0, 0), edge_v=(0, 1, 0))
    accel = build_accel([(far, Pose.identity()), (near, Pose.identity())])
    buf = rasterize_ids(accel, ortho_ish_camera(z=5.0))
    covered = buf.instance >= 0
    assert covered.any()
    # the nearer square (instance 1, z=2 -> distance 3) wins everywhere
    assert (buf.instance[covered] == 1).all()
    # depth is distance along the ray: 3.0 on the optical axis, slightly more off-axis
    assert buf.depth[covered].min() == pytest.approx(3.0, abs=1e-4)
    assert buf.depth[covered].max() < 3.02


def test_buffer_matches_per_pixel_ray_cast():
    rng = Pcg32(77)
    cubes = []
    for _ in range(4):
        pose = Pose(random_rotation(rng), [rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6),
                                           rng.uniform(-0.3, 0.3)])
        cubes.append((make_cube(0.4), pose))
    accel = build_accel(cubes)
    cam = Camera(Intrinsics.centered(60.0, 40, 30),
                 look_at([1.5, 1.2, 1.8], [0, 0, 0]))
    buf = rasterize_ids(accel, cam)
    origin, dirs = cam.pixel_rays()
    for py in range(0, 30, 3):
        for px in range(0, 40, 3):
            hit = ray_cast(accel, Ray(origin, dirs[py, px]))
            if hit is None:
                assert buf.instance[py, px] == -1
            else:
                assert buf.instance[py, px] == hit.instance
                assert buf.depth[py, px] == hit.t


def test_subset_superset_of_full_scene_mask():
    near = make_quad(center=(0, 0, 2.0), edge_u=(1, 0, 0), edge_v=(0, 1, 0))
    far = make_quad(center=(0, 0, 1.0), edge_u=(2, 0, 0), edge_v=(0, 2, 0))
    accel = build_accel([(far, Pose.identity()), (near, Pose.identity())])
    cam = ortho_ish_camera(z=5.0)
    full_scene = rasterize_ids(accel, cam)
    alone = rasterize_ids(accel, cam, subset=[0])
    visible = full_scene.mask(0)
    full = alone.mask(0)
    assert (full | visible).sum() == full.sum()  # visible ⊆ full
    assert full.sum() > visible.sum()  # actually occluded here
