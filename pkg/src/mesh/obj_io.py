"""
Mesh Module - OBJ Reading and Writing

Educational Focus: Only the subset of Wavefront OBJ that describes a closed
triangle surface is accepted: ``v x y z`` and ``f a b c`` records with 1-based
(or negative, relative) indices. Tokens like ``7/3/7`` keep their position
index. Other record types (vn, vt, g, o, s, usemtl, mtllib) are skipped.

Every error names the OBJ line it comes from, including mesh-level
problems (non-manifold edges, open boundaries) detected after parsing.

Output coordinates use ``format(x, '.9g')`` so files are byte-for-byte
reproducible.
"""

from pathlib import Path
from typing import IO, List, Union
import io
import logging
import sys

import numpy as np

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

from src.mesh.trimesh import TriMesh, ObjParseError, NonTriangleFaceError

PathOrStream = Union[str, Path, IO[str]]

SKIPPED_RECORDS = {'vn', 'vt', 'vp', 'g', 'o', 's', 'usemtl', 'mtllib', 'l'}


def _parse_index(token: str, n_vertices: int, line_number: int) -> int:
    raw = token.split('/')[0]
    try:
        index = int(raw)
    except ValueError:
        error = ObjParseError(f"face index '{token}' is not an integer", line_number)
        logger.error(str(error))
        raise error
    if index < 0:
        index = n_vertices + index
    else:
        index -= 1
    if index < 0 or index >= n_vertices:
        error = ObjParseError(f"face index {token} refers to a vertex not yet defined", line_number)
        logger.error(str(error))
        raise error
    return index


def parse_obj(text: str) -> TriMesh:
    """
    Parse OBJ text into a validated TriMesh.

    Raises:
        ObjParseError: malformed record, bad index, no faces
        NonTriangleFaceError: a face with other than three vertices
        MeshError subclasses: topology or geometry invariant violations
    """
    vertices: List[List[float]] = []
    faces: List[List[int]] = []
    face_lines: List[int] = []

    for line_number, line in enumerate(text.splitlines(), 1):
        content = line.split('#', 1)[0].strip()
        if not content:
            continue
        tokens = content.split()
        record = tokens[0]
        if record == 'v':
            if len(tokens) < 4:
                error = ObjParseError("vertex record needs three coordinates", line_number)
                logger.error(str(error))
                raise error
            try:
                vertices.append([float(t) for t in tokens[1:4]])
            except ValueError:
                error = ObjParseError(f"cannot parse coordinates {tokens[1:4]}", line_number)
                logger.error(str(error))
                raise error
        elif record == 'f':
            if len(tokens) != 4:
                error = NonTriangleFaceError(f"face has {len(tokens) - 1} vertices, expected 3", line_number)
                logger.error(str(error))
                raise error
            faces.append([_parse_index(t, len(vertices), line_number) for t in tokens[1:]])
            face_lines.append(line_number)
        elif record in SKIPPED_RECORDS:
            continue
        else:
            error = ObjParseError(f"unknown record type '{record}'", line_number)
            logger.error(str(error))
            raise error

    if not faces:
        error = ObjParseError("no faces found")
        logger.error(str(error))
        raise error

    mesh = TriMesh(np.array(vertices, dtype=float), np.array(faces, dtype=np.int64), face_lines)
    logger.info(f"Loaded OBJ mesh {mesh!r}")
    return mesh


def load_obj(source: PathOrStream) -> TriMesh:
    """
    Load a TriMesh from a path or a text stream.

    Example:
        >>> mesh = load_obj("sphere.obj")
        >>> mesh.euler_characteristic
        2
    """
    if hasattr(source, 'read'):
        return parse_obj(source.read())
    path = Path(source)
    logger.debug(f"Reading OBJ file {path}")
    with open(path, 'r', encoding='utf-8') as f:
        return parse_obj(f.read())


def format_obj(mesh: TriMesh, precision: int = None) -> str:
    precision = int(get_setting('mesh', 'io.obj_precision', 9)) if precision is None else int(precision)
    spec = f'.{precision}g'
    out = io.StringIO()
    out.write(f"# spinwright mesh V={mesh.n_vertices} F={mesh.n_faces}\n")
    for x, y, z in mesh.vertices:
        out.write(f"v {format(x, spec)} {format(y, spec)} {format(z, spec)}\n")
    for a, b, c in mesh.faces + 1:
        out.write(f"f {a} {b} {c}\n")
    return out.getvalue()


def save_obj(mesh: TriMesh, target: PathOrStream, precision: int = None) -> None:
    """Write a TriMesh as OBJ to a path or a text stream."""
    text = format_obj(mesh, precision)
    if hasattr(target, 'write'):
        target.write(text)
        return
    path = Path(target)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)
    logger.info(f"Wrote OBJ mesh {mesh!r} to {path}")
