"""Reference-cell nodal bases for triangular scalar elements.

Supported families: Lagrange (degree 1-5), cubic Hermite, Morley, quintic
Argyris and Bell.  Nodal bases are represented by coefficient matrices over
an orthonormal polynomial basis of the reference triangle with vertices
(0,0), (1,0), (0,1); tabulation of values and derivatives is analytic.

Reference conventions: edge i is opposite vertex i, reference normals point
out of the triangle, reference tangents run from the lower-numbered to the
higher-numbered endpoint of each edge.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .quadrature import interval_rule

MAX_POLY_DEGREE = 6
_MAX_DERIV_ORDER = 3  # internal; the public tabulate API stops at 2

REF_VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
EDGE_VERTICES = ((1, 2), (0, 2), (0, 1))
REF_NORMALS = np.array([[1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
REF_NORMALS[0] /= np.sqrt(2.0)
REF_TANGENTS = np.array([[-1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
REF_TANGENTS[0] /= np.sqrt(2.0)
REF_EDGE_LENGTHS = np.array([np.sqrt(2.0), 1.0, 1.0])
REF_EDGE_MIDPOINTS = np.array([[0.5, 0.5], [0.0, 0.5], [0.5, 0.0]])
BARYCENTER = np.array([1.0 / 3.0, 1.0 / 3.0])

FAMILY_DEGREES = {"hermite": 3, "morley": 2, "argyris": 5, "bell": 5}
REPRODUCTION_DEGREES = {"hermite": 3, "morley": 2, "argyris": 5, "bell": 4}

_SECOND_DERIV_ALPHAS = {"xx": (2, 0), "xy": (1, 1), "yy": (0, 2)}


def derivative_alphas(order: int):
    """Multi-indices (ax, ay) with |alpha| = order, x-major."""
    return [(order - j, j) for j in range(order + 1)]


def _monomials(degree):
    return [(t - j, j) for t in range(degree + 1) for j in range(t + 1)]


def _exact_moment(a, b):
    # integral of x^a y^b over the reference triangle
    return Fraction(factorial(a) * factorial(b), factorial(a + b + 2))


class PolyBasis:
    """Orthonormal polynomial basis of total degree <= p on the reference triangle.

    Built by exact (rational) Gram-Schmidt on monomials, normalized w.r.t.
    the plain area measure, so the degree-0 member has value sqrt(2).
    Members are stored as monomial coefficient rows; evaluation and
    differentiation are exact for polynomials.
    """

    def __init__(self, degree: int):
        if not 0 <= degree <= MAX_POLY_DEGREE:
            raise ValueError(f"polynomial degree {degree} out of range "
                             f"[0, {MAX_POLY_DEGREE}]")
        self.degree = degree
        self.monomials = _monomials(degree)
        self.dim = len(self.monomials)
        self._index = {m: i for i, m in enumerate(self.monomials)}

        # moment matrix of monomial products, exact
        n = self.dim
        moments = [[_exact_moment(a1 + a2, b1 + b2)
                    for (a2, b2) in self.monomials]
                   for (a1, b1) in self.monomials]

        def dot(u, v):
            return sum(u[i] * moments[i][j] * v[j]
                       for i in range(n) for j in range(n) if u[i] and v[j])

        basis = []
        for k in range(n):
            v = [Fraction(0)] * n
            v[k] = Fraction(1)
            for u in basis:
                coef = dot(v, u) / dot(u, u)
                v = [vi - coef * ui for vi, ui in zip(v, u)]
            basis.append(v)
        coeffs = np.array([[float(c) for c in v] for v in basis])
        norms = np.sqrt([float(dot(v, v)) for v in basis])
        self.coeffs = coeffs / norms[:, None]

        # first-derivative operators on monomial coefficient vectors
        dx = np.zeros((n, n))
        dy = np.zeros((n, n))
        for (a, b), j in self._index.items():
            if a > 0:
                dx[self._index[(a - 1, b)], j] = a
            if b > 0:
                dy[self._index[(a, b - 1)], j] = b
        self._dx, self._dy = dx, dy

    def _alpha_coeffs(self, alpha):
        c = self.coeffs
        ax, ay = alpha
        for _ in range(ax):
            c = c @ self._dx.T
        for _ in range(ay):
            c = c @ self._dy.T
        return c

    def tabulate(self, points, max_order: int = 0):
        """Values and derivatives at points, as a dict alpha -> (dim, npts)."""
        if max_order > _MAX_DERIV_ORDER:
            raise ValueError(f"derivative order {max_order} unsupported")
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        vand = np.array([pts[:, 0] ** a * pts[:, 1] ** b
                         for (a, b) in self.monomials])
        out = {}
        for order in range(max_order + 1):
            for alpha in derivative_alphas(order):
                out[alpha] = self._alpha_coeffs(alpha) @ vand
        return out


def build_poly_basis(degree: int) -> PolyBasis:
    """Orthonormal basis spanning polynomials of total degree <= degree."""
    return PolyBasis(degree)


@dataclass(frozen=True)
class NodalFunctional:
    """One degree of freedom: a typed point functional on the reference cell.

    kind is one of "point_eval", "point_deriv" (with unit direction),
    "point_second_deriv" (with component "xx"/"xy"/"yy") or
    "edge_normal_deriv" (with the reference edge index).  entity is the
    (dimension, local index) the DoF attaches to.
    """

    kind: str
    point: tuple
    entity: tuple
    direction: tuple = None
    component: str = None
    edge: int = None

    def __post_init__(self):
        x, y = self.point
        if min(x, y) < -1e-14 or x + y > 1.0 + 1e-14:
            raise ValueError(f"functional point {self.point} outside reference triangle")
        if self.kind == "point_deriv":
            d = np.asarray(self.direction)
            if abs(np.hypot(d[0], d[1]) - 1.0) > 1e-14:
                raise ValueError("point_deriv direction must have unit norm")
        if self.kind == "point_second_deriv" and self.component not in _SECOND_DERIV_ALPHAS:
            raise ValueError(f"bad second-derivative component {self.component}")

    @property
    def derivative_order(self) -> int:
        return {"point_eval": 0, "point_deriv": 1,
                "edge_normal_deriv": 1, "point_second_deriv": 2}[self.kind]


def _apply_functionals_to_poly(functionals, poly: PolyBasis) -> np.ndarray:
    """Generalized Vandermonde: row k is functional k applied to each member."""
    rows = []
    for f in functionals:
        tab = poly.tabulate([f.point], max_order=f.derivative_order)
        if f.kind == "point_eval":
            rows.append(tab[(0, 0)][:, 0])
        elif f.kind == "point_deriv":
            dx, dy = f.direction
            rows.append(dx * tab[(1, 0)][:, 0] + dy * tab[(0, 1)][:, 0])
        elif f.kind == "edge_normal_deriv":
            nx, ny = REF_NORMALS[f.edge]
            rows.append(nx * tab[(1, 0)][:, 0] + ny * tab[(0, 1)][:, 0])
        elif f.kind == "point_second_deriv":
            rows.append(tab[_SECOND_DERIV_ALPHAS[f.component]][:, 0])
        else:
            raise ValueError(f"unknown functional kind {f.kind}")
    return np.array(rows)


def legendre4(sigma):
    """Degree-4 Legendre polynomial on [0, 1] (edge parameter coordinates)."""
    t = 2.0 * np.asarray(sigma) - 1.0
    return (35.0 * t ** 4 - 30.0 * t ** 2 + 3.0) / 8.0


def _edge_quartic_moment_rows(poly: PolyBasis) -> np.ndarray:
    """Moments of the normal derivative against the quartic Legendre mode.

    Row i is u -> integral over reference edge i of (n_i . grad u) P4(sigma)
    d sigma in the unit edge parametrization.  Used to constrain Bell's
    function space to cubic normal derivatives along each edge.
    """
    rule = interval_rule(2 * poly.degree)
    rows = np.zeros((3, poly.dim))
    for e, (a, b) in enumerate(EDGE_VERTICES):
        pts = (REF_VERTICES[a][None, :]
               + rule.points[:, None] * (REF_VERTICES[b] - REF_VERTICES[a])[None, :])
        tab = poly.tabulate(pts, max_order=1)
        dn = REF_NORMALS[e, 0] * tab[(1, 0)] + REF_NORMALS[e, 1] * tab[(0, 1)]
        rows[e] = dn @ (rule.weights * legendre4(rule.points))
    return rows


@dataclass
class ReferenceElement:
    """A nodal finite element on the reference triangle.

    coeffs has one row per nodal basis function, expressing it in the
    orthonormal PolyBasis.  For Bell, constraint_coeffs carries the three
    extra quintic basis functions dual to the quartic edge-mode constraints;
    together they span the full quintic space used when mapping Bell cells.
    Instances are immutable after construction and safe to share.
    """

    family: str
    degree: int
    functionals: tuple
    coeffs: np.ndarray
    poly: PolyBasis
    constraint_coeffs: np.ndarray = None
    lagrange_degree: int = None

    @property
    def n_dofs(self) -> int:
        return len(self.functionals)

    @property
    def reproduction_degree(self) -> int:
        if self.family == "lagrange":
            return self.lagrange_degree
        return REPRODUCTION_DEGREES[self.family]

    def tabulation_coeffs(self) -> np.ndarray:
        """Coefficient rows of the basis pulled back in assembly (enriched for Bell)."""
        if self.constraint_coeffs is not None:
            return np.vstack([self.coeffs, self.constraint_coeffs])
        return self.coeffs

    def entity_dofs(self):
        """dict dim -> {entity index -> list of local DoF indices}."""
        out = {0: {v: [] for v in range(3)},
               1: {e: [] for e in range(3)},
               2: {0: []}}
        for i, f in enumerate(self.functionals):
            dim, idx = f.entity
            out[dim][idx].append(i)
        return out

    def describe(self) -> str:
        if self.family == "lagrange":
            return f"lagrange:{self.lagrange_degree}"
        return self.family


def _lagrange_functionals(k):
    fns = [NodalFunctional("point_eval", tuple(REF_VERTICES[v]), (0, v))
           for v in range(3)]
    for e, (a, b) in enumerate(EDGE_VERTICES):
        for m in range(1, k):
            pt = REF_VERTICES[a] + (m / k) * (REF_VERTICES[b] - REF_VERTICES[a])
            fns.append(NodalFunctional("point_eval", tuple(pt), (1, e)))
    for i in range(1, k):
        for j in range(1, k - i):
            fns.append(NodalFunctional("point_eval", (i / k, j / k), (2, 0)))
    return fns


def _vertex_jet_functionals(v, order):
    pt = tuple(REF_VERTICES[v])
    fns = [NodalFunctional("point_eval", pt, (0, v)),
           NodalFunctional("point_deriv", pt, (0, v), direction=(1.0, 0.0)),
           NodalFunctional("point_deriv", pt, (0, v), direction=(0.0, 1.0))]
    if order == 2:
        fns += [NodalFunctional("point_second_deriv", pt, (0, v), component=c)
                for c in ("xx", "xy", "yy")]
    return fns


def _edge_normal_functionals():
    return [NodalFunctional("edge_normal_deriv", tuple(REF_EDGE_MIDPOINTS[e]),
                            (1, e), edge=e)
            for e in range(3)]


def build_reference_element(family: str, degree: int = None) -> ReferenceElement:
    """Construct the nodal basis of the requested element family.

    The coefficient matrix is obtained by inverting the generalized
    Vandermonde matrix of the nodal functionals; Bell additionally imposes
    the three quartic-edge-mode constraints to square up its 18x21 system.
    """
    family = family.lower()
    if family == "lagrange":
        if degree is None or not 1 <= degree <= 5:
            raise ValueError(f"lagrange degree {degree} out of range [1, 5]")
        k = degree
        fns = _lagrange_functionals(k)
    elif family in FAMILY_DEGREES:
        k = FAMILY_DEGREES[family]
        if degree is not None and degree != k:
            raise ValueError(f"{family} is fixed at degree {k}")
        if family == "hermite":
            fns = sum((_vertex_jet_functionals(v, 1) for v in range(3)), [])
            fns.append(NodalFunctional("point_eval", tuple(BARYCENTER), (2, 0)))
        elif family == "morley":
            fns = [NodalFunctional("point_eval", tuple(REF_VERTICES[v]), (0, v))
                   for v in range(3)]
            fns += _edge_normal_functionals()
        elif family == "argyris":
            fns = sum((_vertex_jet_functionals(v, 2) for v in range(3)), [])
            fns += _edge_normal_functionals()
        else:  # bell
            fns = sum((_vertex_jet_functionals(v, 2) for v in range(3)), [])
    else:
        raise ValueError(f"unsupported element family {family!r}")

    poly = build_poly_basis(k)
    B = _apply_functionals_to_poly(fns, poly)
    constraint_coeffs = None
    if family == "bell":
        B = np.vstack([B, _edge_quartic_moment_rows(poly)])
    if np.linalg.cond(B) > 1e12:
        raise ValueError(f"singular nodal system for {family}: "
                         "inconsistent functional set")
    C = np.linalg.inv(B.T)
    if family == "bell":
        constraint_coeffs = C[18:]
        C = C[:18]
    return ReferenceElement(family=family, degree=k, functionals=tuple(fns),
                            coeffs=C, poly=poly,
                            constraint_coeffs=constraint_coeffs,
                            lagrange_degree=degree if family == "lagrange" else None)


@dataclass(frozen=True)
class Tabulation:
    """Basis values/derivatives: values[alpha] has shape (n_basis, n_points)."""

    values: dict
    points: np.ndarray


def tabulate_coeffs(poly: PolyBasis, coeffs: np.ndarray, points,
                    max_order: int) -> dict:
    """Tabulate an arbitrary coefficient-row basis (internal, allows order 3)."""
    ptab = poly.tabulate(points, max_order=max_order)
    return {alpha: coeffs @ v for alpha, v in ptab.items()}


def tabulate(element: ReferenceElement, points, max_order: int = 0) -> Tabulation:
    """Tabulate nodal basis values and derivatives (orders 0..max_order <= 2).

    Derivatives are computed by differentiating the polynomial basis
    analytically and contracting with the nodal coefficients.
    """
    if max_order > 2:
        raise ValueError("tabulate supports derivative orders up to 2")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if (pts.min() < -1e-12 or (pts[:, 0] + pts[:, 1]).max() > 1.0 + 1e-12):
        raise ValueError("tabulation points must lie in the closed reference triangle")
    return Tabulation(values=tabulate_coeffs(element.poly, element.coeffs,
                                             pts, max_order),
                      points=pts)


def dump_coeffs_csv(element: ReferenceElement, path) -> None:
    """Dump coeffs as CSV (row = basis function) for cross-language diffing."""
    with open(path, "w") as fh:
        for row in element.coeffs:
            fh.write(",".join(f"{c:.17g}" for c in row) + "\n")
