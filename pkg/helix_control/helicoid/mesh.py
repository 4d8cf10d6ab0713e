"""Triangle meshes of swept helicoids, written as Wavefront text.

Vertices are stored in embedded coordinates. A record reads
``v x1 x2 x3 x0`` so that Euclidean meshes (x0 = 1) load as ordinary
homogeneous OBJ vertices.
"""
import logging
from typing import NamedTuple

import numpy as np

from .exceptions import InvalidInput
from .lines import helicoid_point

logger = logging.getLogger(__name__)


class Mesh(NamedTuple):
    vertices: np.ndarray   # (n, 4) embedded coordinates
    triangles: np.ndarray  # (m, 3) zero-based vertex indices


def grid_triangles(s_count, t_count):
    """Two triangles per grid cell, counter-clockwise in the (s, t) plane"""
    ids = np.arange(s_count * t_count).reshape(s_count, t_count)
    corners = np.column_stack([
        ids[:-1, :-1].ravel(),
        ids[1:, :-1].ravel(),
        ids[1:, 1:].ravel(),
        ids[:-1, 1:].ravel(),
    ])
    return np.stack([corners[:, [0, 1, 2]], corners[:, [0, 2, 3]]], axis=1).reshape(-1, 3)


def sweep_mesh(piece, grid, s_extent):
    """Sample helicoid_point on s in [-S, S] x t in [0, duration], row-major in s then t"""
    s_count, t_count = grid
    if s_count < 2 or t_count < 2:
        raise InvalidInput(f"mesh grid needs at least 2x2 samples, got {s_count}x{t_count}")
    if not s_extent > 0:
        raise InvalidInput(f"s-extent must be positive, got {s_extent}")
    s_values = np.linspace(-s_extent, s_extent, s_count)
    t_values = np.linspace(0.0, piece.duration, t_count)
    vertices = np.array([
        helicoid_point(piece.frame, s, t).coords
        for s in s_values
        for t in t_values
    ])
    mesh = Mesh(vertices, grid_triangles(s_count, t_count))
    logger.debug('swept %d vertices, %d triangles', len(mesh.vertices), len(mesh.triangles))
    return mesh


def triangle_areas(mesh):
    """Areas of the spatial triangles, in the x1, x2, x3 coordinates"""
    xyz = mesh.vertices[:, 1:]
    a, b, c = (xyz[mesh.triangles[:, k]] for k in range(3))
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def write_obj(mesh, stream, comment=None):
    if comment:
        stream.write(f"# {comment}\n")
    for x0, x1, x2, x3 in mesh.vertices:
        stream.write(f"v {float(x1)!r} {float(x2)!r} {float(x3)!r} {float(x0)!r}\n")
    for a, b, c in mesh.triangles + 1:
        stream.write(f"f {a} {b} {c}\n")


def read_obj(text):
    """Inverse of write_obj; comment and unknown records are skipped"""
    vertices, triangles = [], []
    for number, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields or fields[0].startswith('#'):
            continue
        try:
            if fields[0] == 'v':
                x1, x2, x3, x0 = (float(v) for v in fields[1:5])
                vertices.append((x0, x1, x2, x3))
            elif fields[0] == 'f':
                triangles.append(tuple(int(v.split('/')[0]) - 1 for v in fields[1:4]))
        except ValueError:
            raise InvalidInput(f"malformed mesh record on line {number}: {line!r}")
    return Mesh(np.array(vertices, dtype=float).reshape(-1, 4), np.array(triangles, dtype=int).reshape(-1, 3))
