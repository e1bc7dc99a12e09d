import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from objsynth.geom import Camera, Intrinsics, Pose, axis_angle, look_at, random_rotation
from objsynth.geom.pose import quat_from_rotation, rotation_from_quat
from objsynth.rng import Pcg32


def test_identity_pose():
    p = Pose.identity()
    pts = np.array([[1.0, 2.0, 3.0]])
    assert np.allclose(p.apply(pts), pts)
    assert p.orthonormality_error() < 1e-12


def test_compose_inverse():
    rng = Pcg32(1)
    a = Pose(random_rotation(rng), [0.1, -0.2, 0.3])
    b = Pose(random_rotation(rng), [1.0, 2.0, -3.0])
    pts = np.random.default_rng(0).normal(size=(10, 3))
    assert np.allclose(a.compose(b).apply(pts), a.apply(b.apply(pts)))
    assert np.allclose(a.compose(a.inverse()).apply(pts), pts, atol=1e-12)


def test_rotation_stays_orthonormal_through_composition():
    rng = Pcg32(2)
    p = Pose.identity()
    for _ in range(200):
        p = p.compose(Pose(random_rotation(rng), [0.0, 0.0, 0.0]))
    assert p.orthonormality_error() < 1e-9


def test_quat_round_trip():
    rng = Pcg32(5)
    for _ in range(50):
        r = random_rotation(rng)
        q = quat_from_rotation(r)
        assert np.allclose(rotation_from_quat(q), r, atol=1e-12)


def test_random_rotation_uniformity_smoke():
    # rotated +Z axes should average to ~0 over many draws
    rng = Pcg32(4)
    zs = np.array([random_rotation(rng) @ [0.0, 0.0, 1.0] for _ in range(4000)])
    assert np.linalg.norm(zs.mean(axis=0)) < 0.05
    # determinants all +1
    rng = Pcg32(4)
    for _ in range(20):
        assert np.isclose(np.linalg.det(random_rotation(rng)), 1.0, atol=1e-12)


def test_axis_angle():
    r = axis_angle([0, 0, 1], np.pi / 2)
    assert np.allclose(r @ [1, 0, 0], [0, 1, 0], atol=1e-12)


def test_intrinsics_validation():
    with pytest.raises(ValueError):
        Intrinsics(fx=-1, fy=1, cx=0, cy=0, width=10, height=10)
    with pytest.raises(ValueError):
        Intrinsics(fx=1, fy=1, cx=20, cy=0, width=10, height=10)


@settings(max_examples=50, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 10), st.integers(0, 10_000))
def test_project_unproject_round_trip(x, y, depth, seed):
    rng = Pcg32(seed)
    cam = Camera(Intrinsics.centered(300.0, 640, 480),
                 Pose(random_rotation(rng), [rng.uniform(-1, 1) for _ in range(3)]))
    # build a world point with positive camera-frame depth
    pc = np.array([x, y, -depth])
    pw = cam.pose.apply(pc[None, :])[0]
    px, d = cam.project(pw[None, :])
    assert d[0] == pytest.approx(depth, abs=1e-9)
    back = cam.unproject(px, d)[0]
    assert np.linalg.norm(back - pw) < 1e-6


def test_project_behind_camera_is_nan():
    cam = Camera(Intrinsics.centered(100.0, 64, 64))
    px, d = cam.project(np.array([[0.0, 0.0, 1.0]]))  # +Z is behind (-Z is view)
    assert d[0] < 0 and np.isnan(px[0, 0])


def test_look_at_points_axis_through_target():
    eye = np.array([1.0, 2.0, 3.0])
    target = np.array([-0.5, 0.4, 0.2])
    pose = look_at(eye, target)
    cam = Camera(Intrinsics.centered(250.0, 640, 480), pose)
    px, d = cam.project(target[None, :])
    assert d[0] > 0
    assert abs(px[0, 0] - 320.0) < 1e-6
    assert abs(px[0, 1] - 240.0) < 1e-6
    # no-roll: camera up has maximal world-up component -> right axis is horizontal
    assert abs(pose.rotation[2, 0]) < 1e-9  # world-z component of camera x-axis
    assert pose.orthonormality_error() < 1e-9


def test_look_at_straight_down_fallback():
    pose = look_at([0, 0, 1.0], [0, 0, 0.0])
    assert pose.orthonormality_error() < 1e-9
    d = pose.rotate(np.array([0.0, 0.0, -1.0]))
    assert np.allclose(d, [0, 0, -1], atol=1e-12)


def test_pixel_rays_match_ray_through():
    rng = Pcg32(11)
    cam = Camera(Intrinsics(200.0, 220.0, 31.0, 17.5, 64, 40),
                 Pose(random_rotation(rng), [0.3, -0.1, 0.8]))
    origin, dirs = cam.pixel_rays()
    for (px, py) in [(0, 0), (63, 39), (10, 20)]:
        o, d = cam.ray_through(px + 0.5, py + 0.5)
        assert np.allclose(origin, o)
        assert np.allclose(dirs[py, px], d, atol=1e-12)
