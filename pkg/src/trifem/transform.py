"""Per-cell transformation matrices relating physical nodal bases to pullbacks.

For each element family this module builds the matrix M with
psi_i = sum_j M_ij (psihat_j o F), where F maps the physical cell to the
reference cell and J = d xhat / d x is its Jacobian (as provided by
mesh.CellGeometry).  Affine-equivalent families (Lagrange) get the
identity; Hermite gets per-vertex Jacobian blocks; Morley and Argyris use
the three-step extended-node construction with edge blocks
B^i = Ghat_i J^{-T} G_i^T; Bell restricts a mapped enriched quintic.

All constructions are pinned by nodal duality: applying the physical
functionals to the transformed basis must give the identity.
"""

from dataclasses import dataclass

import numpy as np

from .mesh import CellGeometry
from .quadrature import interval_rule
from .refelem import (EDGE_VERTICES, REF_NORMALS, REF_TANGENTS, REF_VERTICES,
                      ReferenceElement, legendre4, tabulate_coeffs)


@dataclass
class TransformMatrix:
    """Transformation for one cell: matrix has shape (n_dofs, n_tab_basis).

    scaling records the diagonal applied by scale_M (None while unscaled).
    """

    matrix: np.ndarray
    family: str
    scaling: np.ndarray = None


@dataclass
class ThreeStepFactors:
    """Factors of V = E @ VC @ D and the per-edge 2x2 blocks B^i."""

    D: np.ndarray
    VC: np.ndarray
    E: np.ndarray
    B: np.ndarray


def edge_blocks(geom: CellGeometry) -> np.ndarray:
    """B^i = Ghat_i J^{-T} G_i^T coupling (normal, tangent) derivative pairs."""
    B = np.zeros((3, 2, 2))
    JinvT = geom.Jinv.T
    for e in range(3):
        Ghat = np.array([REF_NORMALS[e], REF_TANGENTS[e]])
        G = np.array([geom.normals[e], geom.tangents[e]])
        B[e] = Ghat @ JinvT @ G.T
    return B


def hessian_pushforward(J: np.ndarray) -> np.ndarray:
    """3x3 matrix T with voigt(J^T H J) = T voigt(H), Voigt order (xx, xy, yy)."""
    units = [np.array([[1.0, 0.0], [0.0, 0.0]]),
             np.array([[0.0, 1.0], [1.0, 0.0]]),
             np.array([[0.0, 0.0], [0.0, 1.0]])]
    cols = []
    for E in units:
        P = J.T @ E @ J
        cols.append([P[0, 0], P[0, 1], P[1, 1]])
    return np.array(cols).T


def hermite_M(geom: CellGeometry) -> TransformMatrix:
    """Cubic Hermite: value rows untouched, per-vertex gradient pairs mapped.

    The gradient block is the Jacobian of the reference-to-physical map
    (J^{-1}), which is what nodal duality requires: a unit physical slope
    needs a 1/slope-of-pullback coefficient.
    """
    M = np.eye(10)
    for v in range(3):
        M[3 * v + 1:3 * v + 3, 3 * v + 1:3 * v + 3] = geom.Jinv
    return TransformMatrix(matrix=M, family="hermite")


def _morley_V(geom: CellGeometry) -> np.ndarray:
    V = np.eye(6)
    B = edge_blocks(geom)
    for e, (a, b) in enumerate(EDGE_VERTICES):
        ell = geom.edge_lengths[e]
        V[3 + e, 3 + e] = B[e, 0, 0]
        V[3 + e, a] = -B[e, 0, 1] / ell
        V[3 + e, b] = B[e, 0, 1] / ell
    return V


def morley_M(geom: CellGeometry) -> TransformMatrix:
    """Morley: closed-form V with entries -+B^i_01/l_i and B^i_00; M = V^T."""
    return TransformMatrix(matrix=_morley_V(geom).T, family="morley")


def morley_three_step(geom: CellGeometry) -> ThreeStepFactors:
    """Morley V = E VC D via the extended node set (tangential midpoint derivatives).

    D computes the tangential derivative of a quadratic at each edge midpoint
    by differencing the endpoint values; VC is block diagonal with B^i on the
    extended derivative pairs; E selects the 6 Morley nodes.
    """
    B = edge_blocks(geom)
    D = np.zeros((9, 6))
    VC = np.eye(9)
    E = np.zeros((6, 9))
    D[:3, :3] = np.eye(3)
    E[:3, :3] = np.eye(3)
    for e, (a, b) in enumerate(EDGE_VERTICES):
        ell = geom.edge_lengths[e]
        D[3 + 2 * e, 3 + e] = 1.0
        D[4 + 2 * e, a] = -1.0 / ell
        D[4 + 2 * e, b] = 1.0 / ell
        VC[3 + 2 * e:5 + 2 * e, 3 + 2 * e:5 + 2 * e] = B[e]
        E[3 + e, 3 + 2 * e] = 1.0
    return ThreeStepFactors(D=D, VC=VC, E=E, B=B)


# midpoint first derivative of a 1D quintic from endpoint jets on [0, l]:
# p'(l/2) = 15/8 (p(b)-p(a))/l - 7/16 (p'(a)+p'(b)) - l/32 (p''(a)-p''(b))
_Q5_VALUE, _Q5_SLOPE, _Q5_CURV = 15.0 / 8.0, 7.0 / 16.0, 1.0 / 32.0


def argyris_three_step(geom: CellGeometry) -> ThreeStepFactors:
    """Argyris factors: vertex jets plus (normal, tangential) midpoint pairs."""
    B = edge_blocks(geom)
    JinvT = geom.Jinv.T
    Theta = np.linalg.inv(hessian_pushforward(geom.J))

    VC = np.eye(24)
    for v in range(3):
        VC[6 * v + 1:6 * v + 3, 6 * v + 1:6 * v + 3] = JinvT
        VC[6 * v + 3:6 * v + 6, 6 * v + 3:6 * v + 6] = Theta
    for e in range(3):
        VC[18 + 2 * e:20 + 2 * e, 18 + 2 * e:20 + 2 * e] = B[e]

    D = np.zeros((24, 21))
    D[:18, :18] = np.eye(18)
    for e, (a, b) in enumerate(EDGE_VERTICES):
        ell = geom.edge_lengths[e]
        t = geom.tangents[e]
        tt = np.array([t[0] ** 2, 2.0 * t[0] * t[1], t[1] ** 2])
        D[18 + 2 * e, 18 + e] = 1.0
        row = D[19 + 2 * e]
        row[6 * a] = -_Q5_VALUE / ell
        row[6 * b] = _Q5_VALUE / ell
        row[6 * a + 1:6 * a + 3] = -_Q5_SLOPE * t
        row[6 * b + 1:6 * b + 3] = -_Q5_SLOPE * t
        row[6 * a + 3:6 * a + 6] = -_Q5_CURV * ell * tt
        row[6 * b + 3:6 * b + 6] = _Q5_CURV * ell * tt

    E = np.zeros((21, 24))
    E[:18, :18] = np.eye(18)
    for e in range(3):
        E[18 + e, 18 + 2 * e] = 1.0
    return ThreeStepFactors(D=D, VC=VC, E=E, B=B)


def argyris_M(geom: CellGeometry) -> TransformMatrix:
    f = argyris_three_step(geom)
    V = f.E @ f.VC @ f.D
    return TransformMatrix(matrix=V.T, family="argyris")


def _bell_reference_data(element: ReferenceElement):
    """Geometry-independent tabulations for the Bell map, memoized on the
    element (idempotent, so sharing across threads stays safe)."""
    cached = getattr(element, "_bell_ref_data", None)
    if cached is not None:
        return cached
    coeffs = element.tabulation_coeffs()
    poly = element.poly
    vertex_tab = tabulate_coeffs(poly, coeffs, REF_VERTICES, 2)
    rule = interval_rule(2 * poly.degree)
    leg = rule.weights * legendre4(rule.points)
    edge_grads = []
    for a, b in EDGE_VERTICES:
        pts = (REF_VERTICES[a][None, :]
               + rule.points[:, None] * (REF_VERTICES[b] - REF_VERTICES[a])[None, :])
        etab = tabulate_coeffs(poly, coeffs, pts, 1)
        # weighted quartic-Legendre moments of the reference gradient
        edge_grads.append((etab[(1, 0)] @ leg, etab[(0, 1)] @ leg))
    data = (vertex_tab, edge_grads)
    element._bell_ref_data = data
    return data


def _bell_pushforward_matrix(element: ReferenceElement,
                             geom: CellGeometry) -> np.ndarray:
    """Physical Bell vertex jets and quartic edge modes applied to the
    pulled-back enriched quintic basis (21 x 21)."""
    vertex_tab, edge_grads = _bell_reference_data(element)
    J = geom.J
    T = hessian_pushforward(J)

    W = np.zeros((21, 21))
    tab = vertex_tab
    for v in range(3):
        W[6 * v] = tab[(0, 0)][:, v]
        ghat = np.array([tab[(1, 0)][:, v], tab[(0, 1)][:, v]])
        W[6 * v + 1:6 * v + 3] = J.T @ ghat
        hhat = np.array([tab[(2, 0)][:, v], tab[(1, 1)][:, v], tab[(0, 2)][:, v]])
        W[6 * v + 3:6 * v + 6] = T @ hhat

    for e in range(3):
        dvec = J @ geom.normals[e]  # n . grad_phys = (J n) . grad_ref
        W[18 + e] = dvec[0] * edge_grads[e][0] + dvec[1] * edge_grads[e][1]
    return W


def bell_M(geom: CellGeometry, element: ReferenceElement) -> TransformMatrix:
    """Bell: map the enriched quintic, keep the 18 combinations that match the
    vertex functionals and have vanishing quartic edge modes (18 x 21)."""
    if element.family != "bell":
        raise ValueError("bell_M needs a bell reference element")
    W = _bell_pushforward_matrix(element, geom)
    M_full = np.linalg.inv(W.T)
    return TransformMatrix(matrix=M_full[:18], family="bell")


def transform_matrix(element: ReferenceElement,
                     geom: CellGeometry) -> TransformMatrix:
    """Unscaled transformation for any supported family."""
    fam = element.family
    if fam == "lagrange":
        return TransformMatrix(matrix=np.eye(element.n_dofs), family="lagrange")
    if fam == "hermite":
        return hermite_M(geom)
    if fam == "morley":
        return morley_M(geom)
    if fam == "argyris":
        return argyris_M(geom)
    if fam == "bell":
        return bell_M(geom, element)
    raise ValueError(f"unsupported family {fam}")


def scaling_diagonal(family: str, geom: CellGeometry) -> np.ndarray:
    """Diagonal S equilibrating basis magnitudes across DoF kinds.

    Value DoFs keep 1; a DoF of derivative order k at vertex v gets
    h(v)^{-k} and an edge-normal derivative gets 1/l_i.  A unit-derivative
    basis function has magnitude O(h^k), so dividing by h^k levels the
    basis (equivalently, the scaled DoF values h^k d^k u behave like
    divided differences of u), which restores Lagrange-like conditioning.
    """
    if family == "lagrange":
        raise ValueError("lagrange has no derivative DoFs to scale")
    h = geom.vertex_h
    if h is None:
        raise ValueError("scaling requires vertex sizes in the cell geometry")
    inv_ell = 1.0 / geom.edge_lengths
    if family == "hermite":
        s = [([1.0, 1.0 / h[v], 1.0 / h[v]]) for v in range(3)]
        return np.array(sum(s, []) + [1.0])
    if family == "morley":
        return np.concatenate([np.ones(3), inv_ell])
    jets = [np.array([1.0, 1.0 / h[v], 1.0 / h[v],
                      1.0 / h[v] ** 2, 1.0 / h[v] ** 2, 1.0 / h[v] ** 2])
            for v in range(3)]
    if family == "argyris":
        return np.concatenate(jets + [inv_ell])
    if family == "bell":
        return np.concatenate(jets)
    raise ValueError(f"unsupported family {family}")


def scale_M(tm: TransformMatrix, geom: CellGeometry) -> TransformMatrix:
    """Rescale derivative basis functions by local mesh size to fix conditioning."""
    if tm.family == "lagrange":
        return TransformMatrix(matrix=tm.matrix, family=tm.family,
                               scaling=np.ones(tm.matrix.shape[0]))
    S = scaling_diagonal(tm.family, geom)
    return TransformMatrix(matrix=S[:, None] * tm.matrix, family=tm.family,
                           scaling=S)


def cell_transform(element: ReferenceElement, geom: CellGeometry,
                   scale: bool) -> TransformMatrix:
    tm = transform_matrix(element, geom)
    return scale_M(tm, geom) if scale else tm


def dump_M_csv(tm: TransformMatrix, path) -> None:
    """Dump M as CSV, 17 significant digits, for cross-implementation diffing."""
    with open(path, "w") as fh:
        for row in tm.matrix:
            fh.write(",".join(f"{c:.17g}" for c in row) + "\n")
