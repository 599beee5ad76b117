"""Triangle meshes of x-periodic grids, written as ASCII OBJ or PLY."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

FORMATS = ("obj", "ply")


@dataclass
class MeshOutput:
    vertices: np.ndarray   # (V, 3)
    triangles: np.ndarray  # (T, 3), 0-based


def grid_mesh(values: np.ndarray) -> MeshOutput:
    """Mesh of an (n_y + 1, n_x, 3) grid closed in x; the seam is welded."""
    ny1, nx = values.shape[:2]
    idx = np.arange(ny1 * nx).reshape(ny1, nx)
    a = idx[:-1, :]
    b = np.roll(idx, -1, axis=1)[:-1, :]
    c = idx[1:, :]
    d = np.roll(idx, -1, axis=1)[1:, :]
    tri = np.concatenate([
        np.stack([a, b, d], axis=-1).reshape(-1, 3),
        np.stack([a, d, c], axis=-1).reshape(-1, 3),
    ])
    return MeshOutput(values.reshape(-1, 3).astype(float), tri)


def _fmt(v: np.ndarray) -> list[str]:
    return [" ".join(f"{c:.10g}" for c in row) for row in v]


def to_obj(mesh: MeshOutput) -> str:
    lines = ["# corrugated surface"]
    lines += ["v " + s for s in _fmt(mesh.vertices)]
    lines += ["f {} {} {}".format(*(t + 1)) for t in mesh.triangles]
    return "\n".join(lines) + "\n"


def to_ply(mesh: MeshOutput) -> str:
    header = [
        "ply",
        "format ascii 1.0",
        f"element vertex {len(mesh.vertices)}",
        "property float x",
        "property float y",
        "property float z",
        f"element face {len(mesh.triangles)}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    body = _fmt(mesh.vertices) + ["3 {} {} {}".format(*t) for t in mesh.triangles]
    return "\n".join(header + body) + "\n"


def write_mesh(mesh: MeshOutput, path, fmt: str = "obj") -> None:
    if fmt not in FORMATS:
        raise ValueError(f"unknown mesh format {fmt!r}")
    text = to_obj(mesh) if fmt == "obj" else to_ply(mesh)
    with open(Path(path), "w", newline="\n") as fh:
        fh.write(text)


def read_obj(path) -> MeshOutput:
    verts, faces = [], []
    for line in Path(path).read_text().splitlines():
        if line.startswith("v "):
            verts.append([float(v) for v in line.split()[1:4]])
        elif line.startswith("f "):
            faces.append([int(v) - 1 for v in line.split()[1:4]])
    return MeshOutput(np.array(verts), np.array(faces, dtype=int))
