"""Triangle meshes: loading (OBJ/PLY), validation, normals, primitives.

Units are meters.  OBJ materials are ignored; materials are assigned per
mesh from the scene configuration.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

NORMAL_UNIT_TOL = 1e-6


class MeshError(ValueError):
    """Raised for unreadable files, non-triangle faces, or empty geometry."""


@dataclass
class Mesh:
    vertices: np.ndarray                     # (V, 3) float64
    triangles: np.ndarray                    # (T, 3) int32 vertex indices
    normals: np.ndarray | None = None        # (V, 3) unit float64
    material: int = 0                        # index into the scene material table

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int32).reshape(-1, 3)
        if self.normals is None:
            in_range = (len(self.triangles) == 0
                        or (self.triangles.min() >= 0
                            and self.triangles.max() < len(self.vertices)))
            if in_range:
                self.normals = compute_vertex_normals(self.vertices, self.triangles)
            else:
                # leave invalid; validate() reports the bad indices
                self.normals = np.zeros_like(self.vertices)
        else:
            self.normals = np.ascontiguousarray(self.normals, dtype=np.float64).reshape(-1, 3)

    def validate(self) -> None:
        if self.triangles.shape[0] == 0:
            raise MeshError("empty geometry: mesh has no triangles")
        if self.vertices.shape[0] == 0:
            raise MeshError("empty geometry: mesh has no vertices")
        if self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices):
            raise MeshError("triangle index out of range")
        if self.normals.shape != self.vertices.shape:
            raise MeshError("normals shape does not match vertices")
        lengths = np.linalg.norm(self.normals, axis=1)
        if np.abs(lengths - 1.0).max() > NORMAL_UNIT_TOL:
            raise MeshError("normals are not unit length")

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def with_material(self, material: int) -> "Mesh":
        return Mesh(self.vertices, self.triangles, self.normals, material)


def compute_vertex_normals(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Per-vertex normals by area-weighted face-normal averaging."""
    normals = np.zeros_like(vertices, dtype=np.float64)
    if len(triangles):
        p0 = vertices[triangles[:, 0]]
        p1 = vertices[triangles[:, 1]]
        p2 = vertices[triangles[:, 2]]
        face = np.cross(p1 - p0, p2 - p0)  # magnitude = 2 * area
        for k in range(3):
            np.add.at(normals, triangles[:, k], face)
    lengths = np.linalg.norm(normals, axis=1, keepdims=True)
    zero = lengths[:, 0] < 1e-20
    lengths[zero] = 1.0
    normals = normals / lengths
    normals[zero] = (0.0, 0.0, 1.0)
    return normals


def load_mesh(path: str | Path, material: int = 0, triangulate: bool = False) -> Mesh:
    """Load a triangle mesh from an OBJ or PLY file (ASCII or binary PLY).

    Quad/polygon faces raise MeshError unless `triangulate` is set, in which
    case they are fan-triangulated.  Missing normals are computed.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise MeshError(f"unreadable file: {path}: {exc}") from exc
    suffix = path.suffix.lower()
    if suffix == ".obj":
        mesh = _parse_obj(raw, path, triangulate)
    elif suffix == ".ply":
        mesh = _parse_ply(raw, path, triangulate)
    else:
        raise MeshError(f"unsupported mesh format: {path.suffix!r} (expected .obj or .ply)")
    mesh.material = material
    mesh.validate()
    return mesh


def _fan_triangulate(indices: list[int]) -> list[tuple[int, int, int]]:
    return [(indices[0], indices[i], indices[i + 1]) for i in range(1, len(indices) - 1)]


def _parse_obj(raw: bytes, path: Path, triangulate: bool) -> Mesh:
    try:
        text = raw.decode("utf-8", errors="replace")
    except Exception as exc:  # pragma: no cover - decode with replace cannot fail
        raise MeshError(f"unreadable file: {path}: {exc}") from exc
    verts: list[list[float]] = []
    file_normals: list[list[float]] = []
    tri_v: list[tuple[int, int, int]] = []
    tri_vn: list[tuple[int, int, int]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        tag = parts[0]
        if tag == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif tag == "vn":
            file_normals.append([float(x) for x in parts[1:4]])
        elif tag == "f":
            corners = parts[1:]
            if len(corners) < 3:
                raise MeshError(f"{path}:{lineno}: face with fewer than 3 vertices")
            if len(corners) > 3 and not triangulate:
                raise MeshError(f"{path}:{lineno}: non-triangle face with {len(corners)} "
                                f"vertices (pass triangulate=True to fan-triangulate)")
            vi, ni = [], []
            for corner in corners:
                fields = corner.split("/")
                vi.append(_obj_index(fields[0], len(verts)))
                if len(fields) >= 3 and fields[2]:
                    ni.append(_obj_index(fields[2], len(file_normals)))
            for a, b, c in _fan_triangulate(list(range(len(vi)))):
                tri_v.append((vi[a], vi[b], vi[c]))
                if len(ni) == len(vi):
                    tri_vn.append((ni[a], ni[b], ni[c]))
    if not tri_v:
        raise MeshError(f"empty geometry: {path} contains no faces")
    vertices = np.array(verts, dtype=np.float64)
    triangles = np.array(tri_v, dtype=np.int32)
    normals = None
    if file_normals and len(tri_vn) == len(tri_v):
        normals = _per_vertex_normals_from_corners(
            vertices, triangles, np.array(file_normals), np.array(tri_vn, dtype=np.int64))
    return Mesh(vertices, triangles, normals)


def _obj_index(token: str, count: int) -> int:
    idx = int(token)
    return idx - 1 if idx > 0 else count + idx


def _per_vertex_normals_from_corners(vertices, triangles, normal_pool, corner_normals) -> np.ndarray:
    """Average file-specified corner normals down to one normal per vertex."""
    acc = np.zeros_like(vertices)
    for k in range(3):
        np.add.at(acc, triangles[:, k], normal_pool[corner_normals[:, k]])
    lengths = np.linalg.norm(acc, axis=1, keepdims=True)
    bad = lengths[:, 0] < 1e-20
    lengths[bad] = 1.0
    out = acc / lengths
    if bad.any():
        out[bad] = compute_vertex_normals(vertices, triangles)[bad]
    return out


_PLY_TYPES = {
    "char": "b", "int8": "b", "uchar": "B", "uint8": "B",
    "short": "h", "int16": "h", "ushort": "H", "uint16": "H",
    "int": "i", "int32": "i", "uint": "I", "uint32": "I",
    "float": "f", "float32": "f", "double": "d", "float64": "d",
}


def _parse_ply(raw: bytes, path: Path, triangulate: bool) -> Mesh:
    header_end = raw.find(b"end_header")
    if not raw.startswith(b"ply") or header_end < 0:
        raise MeshError(f"unreadable file: {path}: not a PLY file")
    header_end = raw.index(b"\n", header_end) + 1
    header = raw[:header_end].decode("ascii", errors="replace")

    fmt = None
    elements: list[tuple[str, int, list]] = []  # (name, count, [(prop_kind, ...)])
    for line in header.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "format":
            fmt = parts[1]
        elif parts[0] == "element":
            elements.append((parts[1], int(parts[2]), []))
        elif parts[0] == "property":
            if not elements:
                raise MeshError(f"unreadable file: {path}: property before element")
            if parts[1] == "list":
                elements[-1][2].append(("list", parts[2], parts[3], parts[4]))
            else:
                elements[-1][2].append(("scalar", parts[1], parts[2]))
    if fmt not in ("ascii", "binary_little_endian", "binary_big_endian"):
        raise MeshError(f"unreadable file: {path}: unsupported PLY format {fmt!r}")

    body = raw[header_end:]
    if fmt == "ascii":
        data = _ply_read_ascii(body, elements, path)
    else:
        endian = "<" if fmt == "binary_little_endian" else ">"
        data = _ply_read_binary(body, elements, endian, path)

    if "vertex" not in data:
        raise MeshError(f"empty geometry: {path} has no vertex element")
    vertex_rows = data["vertex"]
    vprops = [p for (name, _, props) in elements if name == "vertex" for p in props]
    names = [p[2] if p[0] == "scalar" else p[3] for p in vprops]

    def col(prop: str) -> np.ndarray | None:
        if prop not in names:
            return None
        i = names.index(prop)
        return np.array([row[i] for row in vertex_rows], dtype=np.float64)

    xs, ys, zs = col("x"), col("y"), col("z")
    if xs is None or ys is None or zs is None:
        raise MeshError(f"unreadable file: {path}: vertex element lacks x/y/z")
    vertices = np.stack([xs, ys, zs], axis=1)
    normals = None
    if all(col(c) is not None for c in ("nx", "ny", "nz")):
        normals = np.stack([col("nx"), col("ny"), col("nz")], axis=1)
        lengths = np.linalg.norm(normals, axis=1, keepdims=True)
        if (lengths[:, 0] < 1e-20).any():
            normals = None  # degenerate stored normals; recompute
        else:
            normals = normals / lengths

    faces = data.get("face", [])
    tri_list: list[tuple[int, int, int]] = []
    for row in faces:
        idx = [int(i) for i in row[0]]
        if len(idx) < 3:
            raise MeshError(f"{path}: face with fewer than 3 vertices")
        if len(idx) > 3 and not triangulate:
            raise MeshError(f"{path}: non-triangle face with {len(idx)} vertices "
                            f"(pass triangulate=True to fan-triangulate)")
        for a, b, c in _fan_triangulate(idx):
            tri_list.append((a, b, c))
    if not tri_list:
        raise MeshError(f"empty geometry: {path} contains no faces")
    return Mesh(vertices, np.array(tri_list, dtype=np.int32), normals)


def _ply_read_ascii(body: bytes, elements, path: Path):
    tokens = body.decode("ascii", errors="replace").split()
    pos = 0
    out: dict[str, list] = {}

    def take(n):
        nonlocal pos
        if pos + n > len(tokens):
            raise MeshError(f"unreadable file: {path}: truncated PLY body")
        vals = tokens[pos:pos + n]
        pos += n
        return vals

    for name, count, props in elements:
        rows = []
        for _ in range(count):
            row = []
            for p in props:
                if p[0] == "list":
                    n = int(take(1)[0])
                    row.append([float(t) for t in take(n)])
                else:
                    row.append(float(take(1)[0]))
            rows.append(row)
        out[name] = rows
    return out


def _ply_read_binary(body: bytes, elements, endian: str, path: Path):
    pos = 0
    out: dict[str, list] = {}
    for name, count, props in elements:
        rows = []
        for _ in range(count):
            row = []
            for p in props:
                try:
                    if p[0] == "list":
                        cfmt = endian + _PLY_TYPES[p[1]]
                        n = struct.unpack_from(cfmt, body, pos)[0]
                        pos += struct.calcsize(cfmt)
                        ifmt = endian + _PLY_TYPES[p[2]] * int(n)
                        row.append(list(struct.unpack_from(ifmt, body, pos)))
                        pos += struct.calcsize(ifmt)
                    else:
                        sfmt = endian + _PLY_TYPES[p[1]]
                        row.append(struct.unpack_from(sfmt, body, pos)[0])
                        pos += struct.calcsize(sfmt)
                except (struct.error, KeyError) as exc:
                    raise MeshError(f"unreadable file: {path}: truncated or bad PLY body") from exc
            rows.append(row)
        out[name] = rows
    return out


# ---------------------------------------------------------------------------
# Procedural primitives (test fixtures and built-in scene content)

def make_triangle(p0=(0, 0, 0), p1=(1, 0, 0), p2=(0, 1, 0), material: int = 0) -> Mesh:
    return Mesh(np.array([p0, p1, p2], dtype=np.float64),
                np.array([[0, 1, 2]], dtype=np.int32), material=material)


def make_quad(center=(0, 0, 0), edge_u=(1, 0, 0), edge_v=(0, 1, 0), material: int = 0) -> Mesh:
    """Two-triangle rectangle spanned by edge_u/edge_v around `center`."""
    c = np.asarray(center, dtype=np.float64)
    u = np.asarray(edge_u, dtype=np.float64) / 2.0
    v = np.asarray(edge_v, dtype=np.float64) / 2.0
    verts = np.array([c - u - v, c + u - v, c + u + v, c - u + v])
    tris = np.array([[0, 1, 2], [0, 2, 3]], dtype=np.int32)
    return Mesh(verts, tris, material=material)


def make_box(extents=(1.0, 1.0, 1.0), material: int = 0) -> Mesh:
    """Axis-aligned box centered at the origin; 12 triangles, flat normals
    are averaged at the 8 shared vertices."""
    ex, ey, ez = [e / 2.0 for e in extents]
    verts = np.array([[sx * ex, sy * ey, sz * ez]
                      for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)], dtype=np.float64)
    # vertex order: bit2=x, bit1=y, bit0=z
    quads = [
        (0, 1, 3, 2),  # -x
        (4, 6, 7, 5),  # +x
        (0, 4, 5, 1),  # -y
        (2, 3, 7, 6),  # +y
        (0, 2, 6, 4),  # -z
        (1, 5, 7, 3),  # +z
    ]
    tris = []
    for a, b, c, d in quads:
        tris.append((a, b, c))
        tris.append((a, c, d))
    return Mesh(verts, np.array(tris, dtype=np.int32), material=material)


def make_cube(size: float = 1.0, material: int = 0) -> Mesh:
    return make_box((size, size, size), material=material)


def make_icosphere(radius: float = 0.5, subdivisions: int = 2, material: int = 0) -> Mesh:
    """Unit icosahedron subdivided and projected to a sphere."""
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=np.float64)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [v for v in verts]
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            if key not in cache:
                m = verts[a] + verts[b]
                m /= np.linalg.norm(m)
                verts.append(m)
                cache[key] = len(verts) - 1
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    v = np.array(verts) * radius
    normals = np.array(verts)  # exact sphere normals
    return Mesh(v, np.array(faces, dtype=np.int32), normals, material=material)
