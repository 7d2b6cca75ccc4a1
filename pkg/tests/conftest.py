"""Shared helpers: deterministic random cells, polynomial fields and the
independent chain-rule oracle used to check transformation duality."""

import numpy as np
import pytest
import sympy

from trifem import mesh, transform
from trifem.assembly import ScalarField
from trifem.refelem import tabulate_coeffs

X, Y = sympy.symbols("x y")


def make_rng(seed=20240817):
    return np.random.default_rng(seed)


def random_triangle(rng, min_quality=0.05):
    """Nondegenerate CCW triangle with area > min_quality * diameter^2."""
    while True:
        v = rng.uniform(-1.0, 1.0, (3, 2)) * rng.uniform(0.3, 3.0)
        u, w = v[1] - v[0], v[2] - v[0]
        area = 0.5 * (u[0] * w[1] - u[1] * w[0])
        if area < 0:
            v = v[[0, 2, 1]]
            area = -area
        diam = max(np.hypot(*(v[b] - v[a])) for a, b in ((1, 2), (0, 2), (0, 1)))
        if area > min_quality * diam * diam:
            return v


def triangle_geometry(verts, with_sizes=True):
    msh = mesh.build_mesh(np.asarray(verts, dtype=float), np.array([[0, 1, 2]]))
    field = mesh.vertex_size_field(msh) if with_sizes else None
    return mesh.cell_geometry(msh, 0, field)


def sample_points(degree=10):
    """Lattice on the closed reference triangle; degree 10 gives 66 points."""
    return np.array([(i / degree, j / degree)
                     for i in range(degree + 1) for j in range(degree + 1 - i)])


def poly_field(expr) -> ScalarField:
    """ScalarField with exact derivatives of a sympy expression in X, Y."""
    fns = {}
    for name, e in [("f", expr), ("fx", expr.diff(X)), ("fy", expr.diff(Y)),
                    ("fxx", expr.diff(X, 2)), ("fxy", expr.diff(X, Y)),
                    ("fyy", expr.diff(Y, 2))]:
        fns[name] = sympy.lambdify((X, Y), e, "numpy")
    return ScalarField(
        f=lambda x, y: np.broadcast_to(np.asarray(fns["f"](x, y), dtype=float),
                                       np.shape(x)).copy() if np.shape(x) else float(fns["f"](x, y)),
        grad=lambda x, y: np.array([fns["fx"](x, y), fns["fy"](x, y)], dtype=float),
        hess=lambda x, y: np.array([[fns["fxx"](x, y), fns["fxy"](x, y)],
                                    [fns["fxy"](x, y), fns["fyy"](x, y)]], dtype=float))


def physical_functional_matrix(element, geom):
    """Independent duality oracle: each physical nodal functional applied to
    every pulled-back basis function, via chain-rule tabulation."""
    coeffs = element.tabulation_coeffs()
    J = geom.J
    T = transform.hessian_pushforward(J)
    comp_index = {"xx": 0, "xy": 1, "yy": 2}
    rows = []
    for fn in element.functionals:
        pt = np.asarray(fn.point)[None, :]
        tab = tabulate_coeffs(element.poly, coeffs, pt, 2)
        if fn.kind == "point_eval":
            rows.append(tab[(0, 0)][:, 0])
            continue
        ghat = np.array([tab[(1, 0)][:, 0], tab[(0, 1)][:, 0]])
        if fn.kind == "point_deriv":
            rows.append((J @ np.asarray(fn.direction)) @ ghat)
        elif fn.kind == "edge_normal_deriv":
            rows.append((J @ geom.normals[fn.edge]) @ ghat)
        else:
            hhat = np.array([tab[(2, 0)][:, 0], tab[(1, 1)][:, 0], tab[(0, 2)][:, 0]])
            rows.append(T[comp_index[fn.component]] @ hhat)
    return np.array(rows)


def interpolate_on_cell(element, geom, field: ScalarField):
    """Local DoF values of a smooth field on one physical cell (unscaled)."""
    vals = np.zeros(element.n_dofs)
    for i, fn in enumerate(element.functionals):
        x = geom.ref_to_phys(np.asarray(fn.point)[None, :])[0]
        if fn.kind == "point_eval":
            vals[i] = field.f(x[0], x[1])
        elif fn.kind == "point_deriv":
            vals[i] = np.dot(fn.direction, field.grad(x[0], x[1]))
        elif fn.kind == "edge_normal_deriv":
            vals[i] = np.dot(geom.normals[fn.edge], field.grad(x[0], x[1]))
        else:
            comp = {"xx": (0, 0), "xy": (0, 1), "yy": (1, 1)}[fn.component]
            vals[i] = np.asarray(field.hess(x[0], x[1]))[comp]
    return vals


@pytest.fixture
def rng():
    return make_rng()
