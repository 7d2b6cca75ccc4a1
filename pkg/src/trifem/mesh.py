"""Triangulations of the unit square and per-cell affine geometry.

Meshes are regular N x N grids split along the (i,j)-(i+1,j+1) diagonal,
optionally with interior vertices displaced by a deterministic sinusoidal
perturbation.  Edge endpoints are stored with the lower vertex index first;
that single convention drives tangent signs and the sign consistency of
shared derivative DoFs downstream.
"""

from dataclasses import dataclass

import numpy as np

from .refelem import EDGE_VERTICES, REF_VERTICES


@dataclass
class TriangleMesh:
    """Immutable triangulation with full edge connectivity.

    cells are vertex-index triples in counter-clockwise order.  For each
    cell, cell_edges[c, i] is the global index of the edge opposite local
    vertex i and cell_edge_signs[c, i] is +1 iff the cell's boundary
    traversal runs the edge in stored (low-to-high) order.
    """

    vertices: np.ndarray
    cells: np.ndarray
    edges: np.ndarray
    cell_edges: np.ndarray
    cell_edge_signs: np.ndarray
    edge_cells: list
    boundary_edges: np.ndarray
    boundary_vertices: np.ndarray

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_cells(self):
        return len(self.cells)

    @property
    def n_edges(self):
        return len(self.edges)


def signed_area(vertices, cell):
    a, b, c = vertices[cell]
    u, v = b - a, c - a
    return 0.5 * (u[0] * v[1] - u[1] * v[0])


def build_mesh(vertices, cells) -> TriangleMesh:
    """Assemble connectivity for given vertices and positively-oriented cells."""
    vertices = np.asarray(vertices, dtype=float)
    cells = np.asarray(cells, dtype=int)
    for c in range(len(cells)):
        if signed_area(vertices, cells[c]) <= 1e-14:
            raise ValueError(f"cell {c} is degenerate or negatively oriented")

    edge_index = {}
    edges = []
    edge_cells = []
    cell_edges = np.zeros((len(cells), 3), dtype=int)
    cell_edge_signs = np.zeros((len(cells), 3), dtype=int)
    for c, cell in enumerate(cells):
        for i, (a, b) in enumerate(EDGE_VERTICES):
            va, vb = cell[a], cell[b]
            key = (min(va, vb), max(va, vb))
            e = edge_index.get(key)
            if e is None:
                e = len(edges)
                edge_index[key] = e
                edges.append(key)
                edge_cells.append([])
            edge_cells[e].append(c)
            cell_edges[c, i] = e
            # CCW traversal of edge i runs v1->v2, v2->v0, v0->v1
            ccw = (va, vb) if i != 1 else (vb, va)
            cell_edge_signs[c, i] = 1 if ccw == key else -1

    edges = np.array(edges, dtype=int)
    boundary_edges = np.array(sorted(e for e, cs in enumerate(edge_cells)
                                     if len(cs) == 1), dtype=int)
    boundary_vertices = np.unique(edges[boundary_edges].ravel()) \
        if len(boundary_edges) else np.array([], dtype=int)
    return TriangleMesh(vertices=vertices, cells=cells, edges=edges,
                        cell_edges=cell_edges, cell_edge_signs=cell_edge_signs,
                        edge_cells=edge_cells, boundary_edges=boundary_edges,
                        boundary_vertices=boundary_vertices)


def build_unit_square_mesh(n: int, perturb: float = 0.0) -> TriangleMesh:
    """N x N unit-square grid split into 2N^2 triangles.

    Interior vertices are displaced by the deterministic field
    dx = (eps/N) sin(2 pi y) sin(pi x), dy = (eps/N) sin(2 pi x) sin(pi y);
    boundary vertices stay put.  Raises if the perturbation inverts a cell.
    """
    if n < 1:
        raise ValueError("mesh resolution must be >= 1")
    if not 0.0 <= perturb < 0.5:
        raise ValueError("perturbation amplitude must lie in [0, 0.5)")

    idx = lambda i, j: j * (n + 1) + i
    xs = np.linspace(0.0, 1.0, n + 1)
    xx, yy = np.meshgrid(xs, xs, indexing="ij")
    vertices = np.column_stack([xx.ravel(order="F"), yy.ravel(order="F")])

    if perturb > 0.0:
        x, y = vertices[:, 0].copy(), vertices[:, 1].copy()
        interior = (x > 0) & (x < 1) & (y > 0) & (y < 1)
        amp = perturb / n
        vertices[interior, 0] += amp * np.sin(2 * np.pi * y[interior]) * np.sin(np.pi * x[interior])
        vertices[interior, 1] += amp * np.sin(2 * np.pi * x[interior]) * np.sin(np.pi * y[interior])

    cells = []
    for j in range(n):
        for i in range(n):
            v00, v10 = idx(i, j), idx(i + 1, j)
            v01, v11 = idx(i, j + 1), idx(i + 1, j + 1)
            cells.append((v00, v10, v11))
            cells.append((v00, v11, v01))
    mesh = build_mesh(vertices, np.array(cells))
    return mesh


@dataclass
class CellGeometry:
    """Affine geometry of one cell.

    J is the Jacobian of the physical-to-reference map F: K -> Khat
    (entries d xhat_a / d x_b), so physical gradients obey
    grad = J^T refgrad.  normals are outward unit normals per local edge;
    tangents run from the lower- to the higher-numbered local endpoint.
    """

    cell: int
    vertices: np.ndarray
    J: np.ndarray
    Jinv: np.ndarray
    detJinv_abs: float
    normals: np.ndarray
    tangents: np.ndarray
    edge_lengths: np.ndarray
    diameter: float
    vertex_h: np.ndarray = None

    def ref_to_phys(self, points):
        pts = np.atleast_2d(points)
        return self.vertices[0] + pts @ self.Jinv.T

    def phys_to_ref(self, points):
        pts = np.atleast_2d(points)
        return (pts - self.vertices[0]) @ self.J.T


@dataclass(frozen=True)
class VertexSizeField:
    """Characteristic size at each vertex, agreed on by all incident cells."""

    h: np.ndarray


def cell_geometry(mesh: TriangleMesh, cell_index: int,
                  size_field: VertexSizeField = None) -> CellGeometry:
    """Geometric quantities of one cell (pure; safe to evaluate concurrently)."""
    cell = mesh.cells[cell_index]
    verts = mesh.vertices[cell]
    B = np.column_stack([verts[1] - verts[0], verts[2] - verts[0]])  # d x / d xhat
    det = B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]
    if abs(det) < 2e-14:
        raise ValueError(f"cell {cell_index} is degenerate")
    J = np.array([[B[1, 1], -B[0, 1]], [-B[1, 0], B[0, 0]]]) / det

    tangents = np.zeros((3, 2))
    normals = np.zeros((3, 2))
    lengths = np.zeros(3)
    for e, (a, b) in enumerate(EDGE_VERTICES):
        d = verts[b] - verts[a]
        lengths[e] = np.hypot(*d)
        t = d / lengths[e]
        tangents[e] = t
        nrm = np.array([t[1], -t[0]])
        mid = 0.5 * (verts[a] + verts[b])
        if np.dot(nrm, mid - verts[e]) < 0:
            nrm = -nrm
        normals[e] = nrm

    vertex_h = size_field.h[cell] if size_field is not None else None
    return CellGeometry(cell=cell_index, vertices=verts, J=J, Jinv=B,
                        detJinv_abs=abs(det), normals=normals,
                        tangents=tangents, edge_lengths=lengths,
                        diameter=lengths.max(), vertex_h=vertex_h)


def reference_cell_geometry() -> CellGeometry:
    """Geometry of the reference triangle itself (identity map)."""
    mesh = build_mesh(REF_VERTICES, np.array([[0, 1, 2]]))
    return cell_geometry(mesh, 0, vertex_size_field(mesh))


def vertex_size_field(mesh: TriangleMesh) -> VertexSizeField:
    """h(v) = arithmetic mean of the diameters of the cells incident to v."""
    sums = np.zeros(mesh.n_vertices)
    counts = np.zeros(mesh.n_vertices)
    for c in range(mesh.n_cells):
        verts = mesh.vertices[mesh.cells[c]]
        diam = max(np.hypot(*(verts[b] - verts[a])) for a, b in EDGE_VERTICES)
        np.add.at(sums, mesh.cells[c], diam)
        np.add.at(counts, mesh.cells[c], 1.0)
    return VertexSizeField(h=sums / counts)


def global_edge_normal(mesh: TriangleMesh, edge_index: int) -> np.ndarray:
    """Unit normal of an edge: the stored-edge direction rotated 90 deg CCW."""
    a, b = mesh.edges[edge_index]
    d = mesh.vertices[b] - mesh.vertices[a]
    d = d / np.hypot(*d)
    return np.array([-d[1], d[0]])


def export_text(mesh: TriangleMesh, path) -> None:
    """Plain-text export: lines 'v x y' then 'c i j k' (0-based)."""
    with open(path, "w") as fh:
        for x, y in mesh.vertices:
            fh.write(f"v {x:.17g} {y:.17g}\n")
        for i, j, k in mesh.cells:
            fh.write(f"c {i} {j} {k}\n")
