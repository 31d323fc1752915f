"""
Mesh Module - Closed Oriented Triangle Meshes with Halfedge Connectivity

Educational Focus: Every surface in Spinwright is a closed, oriented, manifold
triangle mesh. Validation happens once, at construction, so downstream
geometry (cotan weights, Dirac assembly, integration) can rely on:

- every edge has exactly two oppositely oriented halfedges (closed + oriented)
- every vertex link is a single fan (manifold vertices)
- no face has area <= zero_area_ratio * mean face area
- the Euler characteristic V - E + F is even

Halfedge layout: halfedge h = 3f + k runs from faces[f, k] to faces[f, (k+1) % 3].
next(h) and prev(h) stay inside the face; twin(h) is the opposite halfedge.

Positions are plain (n, 3) float arrays; ``positions`` exposes them as
imaginary quaternions for the spinor pipeline.
"""

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import List, Optional, Sequence
import hashlib
import logging
import sys

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

try:
    from src.utils.logger_factory import get_component_logger
    from src.utils.settings import get_setting
    logger = get_component_logger('mesh')
except ImportError:
    logger = logging.getLogger(__name__)

    def get_setting(section, path, default):
        return default

from src.quatnum.quaternion import imag


class MeshError(ValueError):
    """Invalid mesh input; ``line_number`` points into the OBJ source when known."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ObjParseError(MeshError):
    pass


class NonTriangleFaceError(MeshError):
    pass


class NonManifoldError(MeshError):
    pass


class OpenBoundaryError(MeshError):
    pass


class OrientationError(MeshError):
    pass


class DegenerateFaceError(MeshError):
    pass


@dataclass(frozen=True)
class NormalField:
    """
    One unit normal per vertex.

    Attributes:
        vectors: (n, 3) unit vectors, norm 1 to 1e-10
    """
    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[1] != 3:
            error_msg = f"NormalField needs shape (n, 3), got {vectors.shape}"
            logger.error(error_msg)
            raise ValueError(error_msg)
        if np.any(np.abs(np.linalg.norm(vectors, axis=1) - 1.0) > 1e-10):
            error_msg = "NormalField vectors must be unit length to 1e-10"
            logger.error(error_msg)
            raise ValueError(error_msg)
        object.__setattr__(self, 'vectors', vectors)

    @property
    def quaternions(self) -> np.ndarray:
        return imag(self.vectors)

    def __len__(self) -> int:
        return self.vectors.shape[0]


def _raise(error_cls, message: str, line_number: Optional[int] = None):
    error = error_cls(message, line_number)
    logger.error(str(error))
    raise error


class TriMesh:
    """
    Validated closed oriented manifold triangle mesh.

    Educational Note: Derived quantities (areas, normals, cotan weights) are
    ``cached_property`` values. A TriMesh is never mutated after
    construction; ``scaled`` and ``transformed`` return new meshes.

    Args:
        vertices: (n, 3) positions
        faces: (F, 3) vertex indices, counter-clockwise seen from outside
        face_lines: optional OBJ line number per face, used in error messages

    Raises:
        MeshError (or a subclass) when any invariant fails

    Example:
        >>> mesh = TriMesh(vertices, faces)
        >>> mesh.euler_characteristic
        2
    """

    def __init__(self, vertices, faces, face_lines: Optional[Sequence[int]] = None):
        self.vertices = np.ascontiguousarray(vertices, dtype=np.float64)
        self.faces = np.ascontiguousarray(faces, dtype=np.int64)
        self._face_lines = None if face_lines is None else list(face_lines)
        self._validate_arrays()
        self._build_halfedges()
        self._validate_geometry()
        logger.debug(f"TriMesh V={self.n_vertices} E={self.n_edges} F={self.n_faces} chi={self.euler_characteristic}")

    # === VALIDATION ===

    def _line(self, face: int) -> Optional[int]:
        return None if self._face_lines is None else self._face_lines[face]

    def _validate_arrays(self):
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            _raise(MeshError, f"vertices must have shape (n, 3), got {self.vertices.shape}")
        if self.faces.ndim != 2 or self.faces.shape[1] != 3 or self.faces.shape[0] == 0:
            _raise(MeshError, f"faces must have shape (F, 3) with F > 0, got {self.faces.shape}")
        if not np.all(np.isfinite(self.vertices)):
            _raise(MeshError, "vertex coordinates must be finite")
        n = self.vertices.shape[0]
        bad = np.nonzero((self.faces < 0).any(axis=1) | (self.faces >= n).any(axis=1))[0]
        if bad.size:
            _raise(MeshError, f"face {bad[0]} references a missing vertex", self._line(bad[0]))
        f = self.faces
        repeated = np.nonzero((f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 2] == f[:, 0]))[0]
        if repeated.size:
            _raise(DegenerateFaceError, f"face {repeated[0]} repeats a vertex", self._line(repeated[0]))
        unused = np.nonzero(np.bincount(f.reshape(-1), minlength=n) == 0)[0]
        if unused.size:
            _raise(MeshError, f"vertex {unused[0]} is not used by any face")

    def _build_halfedges(self):
        n = self.vertices.shape[0]
        F = self.faces.shape[0]
        self.he_tail = self.faces.reshape(-1).copy()
        self.he_head = self.faces[:, [1, 2, 0]].reshape(-1).copy()
        self.he_face = np.repeat(np.arange(F), 3)
        local = np.tile(np.arange(3), F)
        base = 3 * self.he_face
        self.he_next = base + (local + 1) % 3
        self.he_prev = base + (local + 2) % 3

        undirected = np.minimum(self.he_tail, self.he_head) * n + np.maximum(self.he_tail, self.he_head)
        edge_keys, he_edge, counts = np.unique(undirected, return_inverse=True, return_counts=True)
        per_he = counts[he_edge]
        if np.any(per_he > 2):
            h = int(np.nonzero(per_he > 2)[0][0])
            _raise(NonManifoldError,
                   f"edge ({self.he_tail[h]}, {self.he_head[h]}) is shared by {per_he[h]} faces",
                   self._line(self.he_face[h]))
        if np.any(per_he < 2):
            h = int(np.nonzero(per_he < 2)[0][0])
            _raise(OpenBoundaryError,
                   f"edge ({self.he_tail[h]}, {self.he_head[h]}) is a boundary edge",
                   self._line(self.he_face[h]))

        directed = self.he_tail * n + self.he_head
        order = np.argsort(directed, kind='stable')
        sorted_keys = directed[order]
        duplicate = np.nonzero(sorted_keys[1:] == sorted_keys[:-1])[0]
        if duplicate.size:
            h = int(order[duplicate[0] + 1])
            _raise(OrientationError,
                   f"halfedge ({self.he_tail[h]}, {self.he_head[h]}) appears twice; faces are not consistently oriented",
                   self._line(self.he_face[h]))
        reverse = self.he_head * n + self.he_tail
        self.he_twin = order[np.searchsorted(sorted_keys, reverse)]

        self.edges = np.stack([edge_keys // n, edge_keys % n], axis=1)
        self.he_edge = he_edge

        # rotation about the tail vertex: one cycle per vertex iff every link is a single fan
        rotation = self.he_twin[self.he_prev]
        n_he = 3 * F
        graph = sp.csr_matrix((np.ones(n_he), (np.arange(n_he), rotation)), shape=(n_he, n_he))
        n_cycles, labels = csgraph.connected_components(graph, directed=True, connection='weak')
        if n_cycles != n:
            per_vertex = np.zeros(n, dtype=np.int64)
            first_label = {}
            for h in range(n_he):
                first_label.setdefault(labels[h], self.he_tail[h])
            np.add.at(per_vertex, np.array(list(first_label.values())), 1)
            v = int(np.nonzero(per_vertex > 1)[0][0])
            _raise(NonManifoldError, f"vertex {v} has a link made of more than one fan")
        self.he_rotation = rotation
        # first outgoing halfedge per vertex
        _, self.vertex_halfedge = np.unique(self.he_tail, return_index=True)

    def _validate_geometry(self):
        areas = self.face_areas
        ratio = float(get_setting('mesh', 'validation.zero_area_ratio', 1e-12))
        threshold = ratio * float(areas.mean())
        small = np.nonzero(areas <= threshold)[0]
        if areas.mean() <= 0.0 or small.size:
            f = int(small[0]) if small.size else 0
            _raise(DegenerateFaceError, f"face {f} has (near) zero area {areas[f]:.3e}", self._line(f))
        if self.euler_characteristic % 2 != 0:
            _raise(MeshError, f"Euler characteristic {self.euler_characteristic} is odd")

    # === COUNTS AND TOPOLOGY ===

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_faces(self) -> int:
        return int(self.faces.shape[0])

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    @property
    def genus(self) -> int:
        return (2 - self.euler_characteristic) // 2

    @cached_property
    def identity(self) -> str:
        """Content hash tying derived fields (spinors, one-forms) to this mesh."""
        digest = hashlib.sha1()
        digest.update(self.vertices.tobytes())
        digest.update(self.faces.tobytes())
        return digest.hexdigest()[:16]

    def outgoing(self, vertex: int) -> List[int]:
        """Outgoing halfedges of ``vertex`` in counter-clockwise order."""
        start = int(self.vertex_halfedge[vertex])
        result = [start]
        h = int(self.he_rotation[start])
        while h != start:
            result.append(h)
            h = int(self.he_rotation[h])
        return result

    def one_ring(self, vertex: int) -> List[int]:
        """Neighbour vertices in counter-clockwise order."""
        return [int(self.he_head[h]) for h in self.outgoing(vertex)]

    def vertex_faces(self, vertex: int) -> List[int]:
        """Incident faces in counter-clockwise order."""
        return [int(self.he_face[h]) for h in self.outgoing(vertex)]

    @cached_property
    def valence(self) -> np.ndarray:
        return np.bincount(self.he_tail, minlength=self.n_vertices)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        n = self.n_vertices
        i, j = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * self.n_edges)
        return sp.csr_matrix((data, (np.concatenate([i, j]), np.concatenate([j, i]))), shape=(n, n))

    # === GEOMETRY ===

    @property
    def positions(self) -> np.ndarray:
        """Vertex positions as imaginary quaternions, shape (n, 4)."""
        return imag(self.vertices)

    @cached_property
    def face_area_vectors(self) -> np.ndarray:
        """Half the cross product of the face edges, pointing along the face normal."""
        p0, p1, p2 = (self.vertices[self.faces[:, k]] for k in range(3))
        return 0.5 * np.cross(p1 - p0, p2 - p0)

    @cached_property
    def face_areas(self) -> np.ndarray:
        return np.linalg.norm(self.face_area_vectors, axis=1)

    @cached_property
    def face_normals(self) -> np.ndarray:
        return self.face_area_vectors / self.face_areas[:, None]

    @cached_property
    def vertex_areas(self) -> np.ndarray:
        """Barycentric dual areas: one third of every incident face area."""
        return np.bincount(self.faces.reshape(-1), weights=np.repeat(self.face_areas / 3.0, 3),
                           minlength=self.n_vertices)

    @property
    def total_area(self) -> float:
        return float(self.face_areas.sum())

    @cached_property
    def vertex_normals(self) -> np.ndarray:
        """
        Unit vertex normals with Max's weights.

        Educational Note: Each incident face contributes e1 x e2 / (|e1|^2 |e2|^2)
        for the two edges leaving the vertex. The weighting is exact for
        vertices sampled from a sphere.
        """
        acc = np.zeros_like(self.vertices)
        for k in range(3):
            v = self.faces[:, k]
            e1 = self.vertices[self.faces[:, (k + 1) % 3]] - self.vertices[v]
            e2 = self.vertices[self.faces[:, (k + 2) % 3]] - self.vertices[v]
            contrib = np.cross(e1, e2) / (np.sum(e1 * e1, axis=1) * np.sum(e2 * e2, axis=1))[:, None]
            np.add.at(acc, v, contrib)
        return acc / np.linalg.norm(acc, axis=1)[:, None]

    def normal_field(self) -> NormalField:
        return NormalField(self.vertex_normals)

    @cached_property
    def halfedge_vectors(self) -> np.ndarray:
        return self.vertices[self.he_head] - self.vertices[self.he_tail]

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]], axis=1)

    @cached_property
    def corner_angles(self) -> np.ndarray:
        """(F, 3) interior angle at each face corner."""
        angles = np.empty(self.faces.shape)
        for k in range(3):
            a = self.vertices[self.faces[:, (k + 1) % 3]] - self.vertices[self.faces[:, k]]
            b = self.vertices[self.faces[:, (k + 2) % 3]] - self.vertices[self.faces[:, k]]
            angles[:, k] = np.arctan2(np.linalg.norm(np.cross(a, b), axis=1), np.sum(a * b, axis=1))
        return angles

    @cached_property
    def halfedge_cotangents(self) -> np.ndarray:
        """Cotangent of the angle opposite each halfedge inside its face."""
        opposite = self.vertices[self.he_tail[self.he_prev]]
        u = self.vertices[self.he_tail] - opposite
        v = self.vertices[self.he_head] - opposite
        return np.sum(u * v, axis=1) / np.linalg.norm(np.cross(u, v), axis=1)

    @cached_property
    def cotan_weights(self) -> np.ndarray:
        """w_ij = (cot alpha + cot beta) / 2 per undirected edge."""
        return np.bincount(self.he_edge, weights=0.5 * self.halfedge_cotangents, minlength=self.n_edges)

    def cotan_laplacian(self, weights: Optional[np.ndarray] = None) -> sp.csr_matrix:
        """
        Positive semi-definite cotan Laplacian, (L x)_i = sum_j w_ij (x_i - x_j).

        Args:
            weights: optional replacement edge weights (e.g. clamped cotan weights)
        """
        w = self.cotan_weights if weights is None else np.asarray(weights, dtype=float)
        n = self.n_vertices
        i, j = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([i, j, i, j])
        cols = np.concatenate([j, i, i, j])
        data = np.concatenate([-w, -w, w, w])
        return sp.csr_matrix((data, (rows, cols)), shape=(n, n))

    @cached_property
    def bounding_radius(self) -> float:
        """Largest distance from the area-weighted centroid."""
        centroid = self.area_centroid
        return float(np.linalg.norm(self.vertices - centroid, axis=1).max())

    @cached_property
    def area_centroid(self) -> np.ndarray:
        A = self.vertex_areas
        return (self.vertices * A[:, None]).sum(axis=0) / A.sum()

    # === DERIVED MESHES ===

    def with_vertices(self, vertices) -> 'TriMesh':
        return TriMesh(vertices, self.faces, self._face_lines)

    def scaled(self, factor: float) -> 'TriMesh':
        return self.with_vertices(float(factor) * self.vertices)

    def transformed(self, rotation, translation=None) -> 'TriMesh':
        """Apply x -> R x + t with a 3x3 matrix R."""
        R = np.asarray(rotation, dtype=float)
        t = np.zeros(3) if translation is None else np.asarray(translation, dtype=float)
        return self.with_vertices(self.vertices @ R.T + t)

    def __repr__(self) -> str:
        return f"TriMesh(V={self.n_vertices}, E={self.n_edges}, F={self.n_faces}, chi={self.euler_characteristic})"
