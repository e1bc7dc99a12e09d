import struct

import numpy as np
import pytest

from objsynth.geom import Mesh, MeshError, load_mesh, make_box, make_cube, make_icosphere


def write(path, text):
    path.write_text(text)
    return path


def test_load_obj_single_triangle(tmp_path):
    p = write(tmp_path / "tri.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
    mesh = load_mesh(p)
    assert len(mesh.vertices) == 3
    assert len(mesh.triangles) == 1
    assert np.allclose(mesh.normals, [[0, 0, 1]] * 3)


def test_load_obj_cube_fixture(tmp_path):
    cube = make_cube(1.0)
    lines = [f"v {x} {y} {z}" for x, y, z in cube.vertices]
    lines += [f"f {a+1} {b+1} {c+1}" for a, b, c in cube.triangles]
    p = write(tmp_path / "cube.obj", "\n".join(lines) + "\n")
    mesh = load_mesh(p)
    assert len(mesh.vertices) == 8
    assert len(mesh.triangles) == 12
    lo, hi = mesh.bounds()
    assert np.allclose(lo, [-0.5, -0.5, -0.5])
    assert np.allclose(hi, [0.5, 0.5, 0.5])


def test_load_obj_quad_face_error_and_triangulation(tmp_path):
    content = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n"
    p = write(tmp_path / "quad.obj", content)
    with pytest.raises(MeshError, match="non-triangle face"):
        load_mesh(p)
    mesh = load_mesh(p, triangulate=True)
    # fan-triangulation oracle: (0,1,2), (0,2,3)
    assert mesh.triangles.tolist() == [[0, 1, 2], [0, 2, 3]]


def test_load_obj_pentagon_matches_fan_oracle(tmp_path):
    angles = np.linspace(0, 2 * np.pi, 5, endpoint=False)
    verts = [(np.cos(a), np.sin(a), 0.0) for a in angles]
    content = "".join(f"v {x} {y} {z}\n" for x, y, z in verts)
    content += "f 1 2 3 4 5\n"
    p = write(tmp_path / "pent.obj", content)
    mesh = load_mesh(p, triangulate=True)
    oracle = [[0, i, i + 1] for i in range(1, 4)]
    assert mesh.triangles.tolist() == oracle


def test_load_obj_with_normals_and_slashes(tmp_path):
    content = ("v 0 0 0\nv 1 0 0\nv 0 1 0\n"
               "vn 0 0 1\nvn 0 0 1\nvn 0 0 1\n"
               "f 1//1 2//2 3//3\n")
    p = write(tmp_path / "n.obj", content)
    mesh = load_mesh(p)
    assert np.allclose(mesh.normals, [[0, 0, 1]] * 3)


def test_load_obj_empty_error(tmp_path):
    p = write(tmp_path / "empty.obj", "v 0 0 0\n")
    with pytest.raises(MeshError, match="empty geometry"):
        load_mesh(p)


def test_load_missing_file():
    with pytest.raises(MeshError, match="unreadable file"):
        load_mesh("/nonexistent/path/foo.obj")


def test_load_unsupported_extension(tmp_path):
    p = write(tmp_path / "m.stl", "solid\n")
    with pytest.raises(MeshError, match="unsupported mesh format"):
        load_mesh(p)


def _ply_ascii(verts, faces, with_normals=False):
    header = ["ply", "format ascii 1.0", f"element vertex {len(verts)}",
              "property float x", "property float y", "property float z"]
    if with_normals:
        header += ["property float nx", "property float ny", "property float nz"]
    header += [f"element face {len(faces)}",
               "property list uchar int vertex_indices", "end_header"]
    body = []
    for v in verts:
        body.append(" ".join(str(x) for x in v))
    for f in faces:
        body.append(f"{len(f)} " + " ".join(str(i) for i in f))
    return "\n".join(header + body) + "\n"


def test_load_ply_ascii(tmp_path):
    verts = [(0, 0, 0, 0, 0, 1), (1, 0, 0, 0, 0, 1), (0, 1, 0, 0, 0, 1)]
    p = write(tmp_path / "tri.ply", _ply_ascii(verts, [(0, 1, 2)], with_normals=True))
    mesh = load_mesh(p)
    assert len(mesh.triangles) == 1
    assert np.allclose(mesh.normals, [[0, 0, 1]] * 3)


def test_load_ply_binary(tmp_path):
    header = ("ply\nformat binary_little_endian 1.0\n"
              "element vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
              "element face 1\nproperty list uchar int vertex_indices\nend_header\n")
    body = b""
    for v in [(0, 0, 0), (1, 0, 0), (0, 1, 0)]:
        body += struct.pack("<fff", *v)
    body += struct.pack("<Biii", 3, 0, 1, 2)
    path = tmp_path / "tri_bin.ply"
    path.write_bytes(header.encode() + body)
    mesh = load_mesh(path)
    assert len(mesh.vertices) == 3
    assert len(mesh.triangles) == 1


def test_load_ply_quad_error(tmp_path):
    verts = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)]
    p = write(tmp_path / "quad.ply", _ply_ascii(verts, [(0, 1, 2, 3)]))
    with pytest.raises(MeshError, match="non-triangle face"):
        load_mesh(p)
    mesh = load_mesh(p, triangulate=True)
    assert len(mesh.triangles) == 2


def test_validate_bad_indices():
    mesh = Mesh(np.zeros((3, 3)), np.array([[0, 1, 5]]))
    with pytest.raises(MeshError, match="index out of range"):
        mesh.validate()


def test_computed_normals_unit_and_area_weighted():
    sphere = make_icosphere(radius=0.3, subdivisions=2)
    sphere.validate()
    # icosphere ships exact sphere normals
    assert np.allclose(np.linalg.norm(sphere.normals, axis=1), 1.0, atol=1e-9)
    box = make_box((1.0, 2.0, 3.0))
    box.validate()
    lo, hi = box.bounds()
    assert np.allclose(hi - lo, [1.0, 2.0, 3.0])
