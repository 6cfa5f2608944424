"""Collapsed-coordinate machinery on the reference triangle and tetrahedron:
the cube-to-simplex map, the orthogonal polynomial basis adapted to it,
analysis/synthesis of expansions, boundary traces, and the line-function
reduction behind the trace identities.

Convention: function callbacks are vectorized over points, taking an
(npts, dim) array of simplex coordinates and returning (npts,) values.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError, SingularityError
from .identities import _h2, _h3
from .jacobi import (
    JacobiWeight,
    _jacobi_table,
    _scaled_jacobi_table,
    gauss_jacobi_rule,
)

__all__ = [
    "SimplexIndex",
    "BasisSet",
    "DuffyPoint",
    "duffy_map",
    "enumerate_basis",
    "dubiner_eval",
    "dubiner_norm_sq",
    "analyze",
    "synthesize",
    "transformed_gradient",
    "line_functions",
    "trace_coefficient_sum",
    "boundary_trace_parseval",
]

_LEG = JacobiWeight(0.0, 0.0)


@lru_cache(maxsize=128)
def _gl_nodes(m: int):
    """Gauss-Legendre nodes/weights, cached; treat the arrays as read-only."""
    rule = gauss_jacobi_rule(m, _LEG)
    return rule.nodes, rule.weights


@dataclass(frozen=True)
class SimplexIndex:
    """Multi-index (p[, q[, r]]) of one basis function; trailing components
    are absent below the matching dimension."""

    p: int
    q: int | None = None
    r: int | None = None

    def __post_init__(self):
        parts = [c for c in (self.p, self.q, self.r) if c is not None]
        if self.r is not None and self.q is None:
            raise ParameterError("index cannot carry r without q")
        for c in parts:
            if isinstance(c, bool) or not isinstance(c, (int, np.integer)) or c < 0:
                raise ParameterError(f"index components must be nonnegative integers, got {self!r}")

    @property
    def dim(self) -> int:
        return 1 + (self.q is not None) + (self.r is not None)

    @property
    def degree(self) -> int:
        return self.p + (self.q or 0) + (self.r or 0)

    def components(self) -> tuple:
        return tuple(c for c in (self.p, self.q, self.r) if c is not None)


@dataclass(frozen=True, eq=False)
class BasisSet:
    """Graded-lex ordered basis of total degree <= N in the given dimension."""

    dim: int
    N: int
    indices: tuple
    cardinality: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ParameterError(f"dim must be 1, 2, or 3, got {self.dim}")
        if self.N < 0:
            raise ParameterError(f"N must be nonnegative, got {self.N}")
        n = self.N
        expected = {1: n + 1, 2: (n + 1) * (n + 2) // 2, 3: (n + 1) * (n + 2) * (n + 3) // 6}[self.dim]
        if self.cardinality != expected or len(self.indices) != expected:
            raise ParameterError("cardinality does not match the degree and dimension")

    def position(self, idx: SimplexIndex) -> int:
        return self.indices.index(idx)


def enumerate_basis(N: int, dim: int) -> BasisSet:
    """All indices of total degree <= N, graded, lexicographic within a grade."""
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 0:
        raise ParameterError(f"N must be a nonnegative integer, got {N!r}")
    if dim not in (1, 2, 3):
        raise ParameterError(f"dim must be 1, 2, or 3, got {dim}")
    indices = []
    for total in range(N + 1):
        if dim == 1:
            indices.append(SimplexIndex(total))
        elif dim == 2:
            for p in range(total + 1):
                indices.append(SimplexIndex(p, total - p))
        else:
            for p in range(total + 1):
                for q in range(total - p + 1):
                    indices.append(SimplexIndex(p, q, total - p - q))
    return BasisSet(dim=dim, N=int(N), indices=tuple(indices), cardinality=len(indices))


@dataclass(frozen=True, eq=False)
class DuffyPoint:
    """One cube point with its simplex image and transformation data."""

    eta: np.ndarray
    xi: np.ndarray
    jac_det: float
    _inv_jacobian: np.ndarray | None = None

    @property
    def inv_jacobian(self) -> np.ndarray:
        if self._inv_jacobian is None:
            raise SingularityError("inverse Jacobian is undefined at a collapsed point")
        return self._inv_jacobian


def duffy_map(eta, dim: int) -> DuffyPoint:
    """Map one cube point to the simplex; collapsed faces (eta2 = 1 or
    eta3 = 1) are allowed but leave the inverse Jacobian undefined."""
    if dim not in (2, 3):
        raise ParameterError(f"dim must be 2 or 3, got {dim}")
    e = np.asarray(eta, dtype=float)
    if e.shape != (dim,):
        raise ParameterError(f"eta must have shape ({dim},), got {e.shape}")
    if np.any(np.abs(e) > 1.0 + 1e-14):
        raise ParameterError("eta must lie in the closed cube [-1, 1]^d")
    if dim == 2:
        e1, e2 = e
        xi = np.array([(1.0 + e1) * (1.0 - e2) / 2.0 - 1.0, e2])
        det = (1.0 - e2) / 2.0
        collapsed = e2 == 1.0
        inv = None
        if not collapsed:
            inv = np.array([[2.0 / (1.0 - e2), (1.0 + e1) / (1.0 - e2)], [0.0, 1.0]])
        return DuffyPoint(eta=e, xi=xi, jac_det=float(det), _inv_jacobian=inv)
    e1, e2, e3 = e
    xi = np.array(
        [
            (1.0 + e1) * (1.0 - e2) * (1.0 - e3) / 4.0 - 1.0,
            (1.0 + e2) * (1.0 - e3) / 2.0 - 1.0,
            e3,
        ]
    )
    det = ((1.0 - e2) / 2.0) * ((1.0 - e3) / 2.0) ** 2
    collapsed = e2 == 1.0 or e3 == 1.0
    inv = None
    if not collapsed:
        s23 = (1.0 - e2) * (1.0 - e3)
        inv = np.array(
            [
                [4.0 / s23, 2.0 * (1.0 + e1) / s23, 2.0 * (1.0 + e1) / s23],
                [0.0, 2.0 / (1.0 - e3), (1.0 + e2) / (1.0 - e3)],
                [0.0, 0.0, 1.0],
            ]
        )
    return DuffyPoint(eta=e, xi=xi, jac_det=float(det), _inv_jacobian=inv)


def dubiner_norm_sq(idx: SimplexIndex, dim: int | None = None) -> float:
    """Squared L2 norm of the basis function at idx."""
    d = idx.dim if dim is None else dim
    if d != idx.dim:
        raise ParameterError(f"index {idx!r} is {idx.dim}-dimensional, not {d}")
    p = idx.p
    if d == 1:
        return 2.0 / (2.0 * p + 1.0)
    q = idx.q
    if d == 2:
        return (2.0 / (2.0 * p + 1.0)) * (2.0 / (2.0 * p + 2.0 * q + 2.0))
    r = idx.r
    return (
        (2.0 / (2.0 * p + 1.0))
        * (2.0 / (2.0 * p + 2.0 * q + 2.0))
        * (2.0 / (2.0 * p + 2.0 * q + 2.0 * r + 3.0))
    )


def _check_simplex_point(pts: np.ndarray, dim: int) -> None:
    tol = 1e-12
    if np.any(pts < -1.0 - tol) or np.any(np.sum(pts, axis=1) > (2.0 - dim) + tol):
        raise ParameterError("point outside the closed reference simplex")


def _dubiner_matrix(basis: BasisSet, pts) -> np.ndarray:
    """Values of every basis function at the given points, shape (card, npts).

    Works on the closed simplex: the collapsed coordinates are evaluated in
    homogenized form, never through the inverse map.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if pts.shape[1] != basis.dim:
        raise ParameterError(f"points must have shape (npts, {basis.dim})")
    N = basis.N
    out = np.empty((basis.cardinality, pts.shape[0]))
    pos = {idx: i for i, idx in enumerate(basis.indices)}
    if basis.dim == 1:
        tab = _jacobi_table(N, _LEG, pts[:, 0])
        for idx in basis.indices:
            out[pos[idx]] = tab[idx.p]
        return out
    if basis.dim == 2:
        x1, x2 = pts[:, 0], pts[:, 1]
        s_leg = _scaled_jacobi_table(N, _LEG, (1.0 + 2.0 * x1 + x2) / 2.0, (1.0 - x2) / 2.0)
        for p in range(N + 1):
            qtab = _jacobi_table(N - p, JacobiWeight(2.0 * p + 1.0, 0.0), x2)
            for q in range(N - p + 1):
                out[pos[SimplexIndex(p, q)]] = s_leg[p] * qtab[q]
        return out
    x1, x2, x3 = pts[:, 0], pts[:, 1], pts[:, 2]
    s_leg = _scaled_jacobi_table(N, _LEG, 1.0 + x1 + (x2 + x3) / 2.0, -(x2 + x3) / 2.0)
    a2, b2 = (1.0 + 2.0 * x2 + x3) / 2.0, (1.0 - x3) / 2.0
    for p in range(N + 1):
        s_q = _scaled_jacobi_table(N - p, JacobiWeight(2.0 * p + 1.0, 0.0), a2, b2)
        for q in range(N - p + 1):
            rtab = _jacobi_table(N - p - q, JacobiWeight(2.0 * p + 2.0 * q + 2.0, 0.0), x3)
            base = s_leg[p] * s_q[q]
            for r in range(N - p - q + 1):
                out[pos[SimplexIndex(p, q, r)]] = base * rtab[r]
    return out


def dubiner_eval(idx: SimplexIndex, xi, dim: int) -> float:
    """Value of the basis function at one point of the closed simplex."""
    if dim not in (2, 3):
        raise ParameterError(f"dim must be 2 or 3, got {dim}")
    if idx.dim != dim:
        raise ParameterError(f"index {idx!r} is {idx.dim}-dimensional, not {dim}")
    pt = np.asarray(xi, dtype=float).reshape(1, dim)
    _check_simplex_point(pt, dim)
    basis = enumerate_basis(idx.degree, dim)
    return float(_dubiner_matrix(basis, pt)[basis.position(idx), 0])


def _rule_size(N: int) -> int:
    # per-direction node count for degree-N bases; ample for every assembled
    # integrand and re-validated by the doubling tests
    return 2 * N + 6


def analyze(f, N: int, dim: int, nodes: int | None = None) -> np.ndarray:
    """Raw inner products of f against every basis function of degree <= N.

    Integration runs on the cube with the map's volume factor explicit;
    per-direction node count follows the degree (override with ``nodes``).
    """
    basis = enumerate_basis(N, dim)
    m = _rule_size(N) if nodes is None else int(nodes)
    t, w = _gl_nodes(m)
    out = np.empty(basis.cardinality)
    pos = {idx: i for i, idx in enumerate(basis.indices)}
    if dim == 1:
        vals = f(t[:, None])
        tab = _jacobi_table(N, _LEG, t)
        return tab @ (w * vals)
    if dim == 2:
        x1 = (1.0 + t[:, None]) * (1.0 - t[None, :]) / 2.0 - 1.0
        x2 = np.broadcast_to(t[None, :], x1.shape)
        pts = np.column_stack([x1.ravel(), x2.ravel()])
        vals = f(pts).reshape(m, m)
        wf = (w[:, None] * w[None, :]) * ((1.0 - t[None, :]) / 2.0) * vals
        contracted = _jacobi_table(N, _LEG, t) @ wf  # (N+1, m) over eta2
        half = (1.0 - t) / 2.0
        for p in range(N + 1):
            qtab = _jacobi_table(N - p, JacobiWeight(2.0 * p + 1.0, 0.0), t) * half**p
            row = qtab @ contracted[p]
            for q in range(N - p + 1):
                out[pos[SimplexIndex(p, q)]] = row[q]
        return out
    x1 = (1.0 + t[:, None, None]) * (1.0 - t[None, :, None]) * (1.0 - t[None, None, :]) / 4.0 - 1.0
    shape = x1.shape
    x2 = np.broadcast_to(((1.0 + t[:, None]) * (1.0 - t[None, :]) / 2.0 - 1.0)[None, :, :], shape)
    x3 = np.broadcast_to(t[None, None, :], shape)
    pts = np.column_stack([x1.ravel(), x2.ravel(), x3.ravel()])
    vals = f(pts).reshape(shape)
    det = ((1.0 - t[None, :, None]) / 2.0) * ((1.0 - t[None, None, :]) / 2.0) ** 2
    wf = (w[:, None, None] * w[None, :, None] * w[None, None, :]) * det * vals
    contracted = np.tensordot(_jacobi_table(N, _LEG, t), wf, axes=(1, 0))  # (N+1, m, m)
    half = (1.0 - t) / 2.0
    for p in range(N + 1):
        qtab = _jacobi_table(N - p, JacobiWeight(2.0 * p + 1.0, 0.0), t) * half**p
        plane = qtab @ contracted[p]  # (N-p+1, m) over eta3
        for q in range(N - p + 1):
            rtab = _jacobi_table(N - p - q, JacobiWeight(2.0 * p + 2.0 * q + 2.0, 0.0), t) * half ** (p + q)
            row = rtab @ plane[q]
            for r in range(N - p - q + 1):
                out[pos[SimplexIndex(p, q, r)]] = row[r]
    return out


def synthesize(coeffs, basis: BasisSet, xi) -> float:
    """Evaluate the expansion with raw inner-product coefficients at one point."""
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (basis.cardinality,):
        raise ParameterError(
            f"coefficient length {c.shape} does not match basis cardinality {basis.cardinality}"
        )
    pt = np.asarray(xi, dtype=float).reshape(1, basis.dim)
    scaled = c / np.array([dubiner_norm_sq(idx) for idx in basis.indices])
    return float(scaled @ _dubiner_matrix(basis, pt)[:, 0])


def transformed_gradient(u_grad, eta) -> np.ndarray:
    """Cube-coordinate partial derivatives of u composed with the map,
    from a callback giving the simplex gradient of u at one 3D point."""
    e = np.asarray(eta, dtype=float)
    if e.shape != (3,):
        raise ParameterError(f"eta must have shape (3,), got {e.shape}")
    pt = duffy_map(e, 3)
    g = np.asarray(u_grad(pt.xi), dtype=float)
    if g.shape != (3,):
        raise ParameterError("gradient callback must return 3 components")
    e1, e2, e3 = e
    return np.array(
        [
            (1.0 - e2) * (1.0 - e3) / 4.0 * g[0],
            -(1.0 + e1) * (1.0 - e3) / 4.0 * g[0] + (1.0 - e3) / 2.0 * g[1],
            -(1.0 + e1) * (1.0 - e2) / 4.0 * g[0] - (1.0 + e2) / 2.0 * g[1] + g[2],
        ]
    )


def line_functions(f, p: int, q: int, nodes: int = 40):
    """Callables for the eta3 line reduction of f at fixed (p, q).

    The first integrates f over cube cross-sections against the (p, q)
    factor pair; the second divides out (1 - eta3)^(p+q), which is singular
    at eta3 = 1 for (p, q) != (0, 0).
    """
    if p < 0 or q < 0:
        raise ParameterError("p and q must be nonnegative")
    m = int(nodes)
    t, w = _gl_nodes(m)
    phi1 = w * _jacobi_table(p, _LEG, t)[p]
    phi2 = w * _jacobi_table(q, JacobiWeight(2.0 * p + 1.0, 0.0), t)[q] * ((1.0 - t) / 2.0) ** (p + 1)

    def u_line(eta3):
        e3s = np.atleast_1d(np.asarray(eta3, dtype=float))
        vals = np.empty(e3s.shape)
        for i, e3 in enumerate(e3s):
            x1 = (1.0 + t[:, None]) * (1.0 - t[None, :]) * (1.0 - e3) / 4.0 - 1.0
            x2 = (1.0 + t[None, :]) * (1.0 - e3) / 2.0 - 1.0
            pts = np.column_stack(
                [x1.ravel(), np.broadcast_to(x2, x1.shape).ravel(), np.full(x1.size, e3)]
            )
            vals[i] = phi1 @ f(pts).reshape(m, m) @ phi2
        return vals if np.ndim(eta3) else float(vals[0])

    def u_line_scaled(eta3):
        e3s = np.atleast_1d(np.asarray(eta3, dtype=float))
        if np.any(e3s == 1.0) and (p, q) != (0, 0):
            raise SingularityError(f"scaled line function is singular at eta3 = 1 for (p, q) = ({p}, {q})")
        vals = u_line(e3s) / (1.0 - e3s) ** (p + q)
        return vals if np.ndim(eta3) else float(vals[0])

    return u_line, u_line_scaled


def _legendre_derivative_values(values: np.ndarray, t: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Derivative at the nodes of the polynomial interpolating the sampled
    values, via its Legendre expansion."""
    k_max = t.size - 1
    tab = _jacobi_table(k_max, _LEG, t)
    coeff = (np.arange(k_max + 1) + 0.5) * (tab @ (w * values))
    dtab = np.zeros_like(tab)
    if k_max >= 1:
        shifted = _jacobi_table(k_max - 1, JacobiWeight(1.0, 1.0), t)
        for k in range(1, k_max + 1):
            dtab[k] = 0.5 * (k + 1.0) * shifted[k - 1]
    return coeff @ dtab


def trace_coefficient_sum(f, p: int, q: int, N: int, nodes: int = 40):
    """Both sides of the alternating tail identity at fixed (p, q).

    Returns (tail_sum, short_form): the alternating series of scaled line
    coefficients from degree N up, truncated once three consecutive terms
    drop below 1e-14, and its closed three-term counterpart built from the
    derivative of the scaled line function.
    """
    if N < 1:
        raise ParameterError(f"N must be at least 1, got {N}")
    if p < 0 or q < 0:
        raise ParameterError("p and q must be nonnegative")
    n = 2.0 * p + 2.0 * q + 2.0
    m = int(nodes)
    t, w = _gl_nodes(m)
    u_line, _ = line_functions(f, p, q, nodes=m)
    u_vals = u_line(t)
    du_vals = _legendre_derivative_values(u_vals, t, w)

    r_cap = m - 1
    rtab = _jacobi_table(r_cap, JacobiWeight(n, 0.0), t)
    w_u = w * (1.0 - t) ** (p + q + 2)
    w_u_extra = w * (p + q) * (1.0 - t) ** (p + q + 1)
    u_tilde = rtab @ (w_u * u_vals)
    du_tilde = rtab @ (w_u * du_vals + w_u_extra * u_vals)

    # tail of the alternating series; 2^n / gamma_r reduces to (2r+n+1)/2
    scale = 2.0 ** -(p + q + 2)
    tail, below = 0.0, 0
    for r in range(N, r_cap + 1):
        term = (-1.0) ** r * (2.0 * r + n + 1.0) / 2.0 * scale * u_tilde[r]
        tail += term
        below = below + 1 if abs(term) < 1e-14 else 0
        if below >= 3:
            break

    short_scale = 2.0 ** -(p + q + 3)
    short = (-1.0) ** N * _h2(float(N), n) * (2.0 * N + n + 1.0) * short_scale * du_tilde[N]
    for r in (N - 1, N):
        short += (-1.0) ** (r + 1) * _h3(r + 1.0, n) * (2.0 * (r + 1.0) + n + 1.0) * short_scale * du_tilde[r]
    return tail, short


def _boundary_rule(dim: int, m: int):
    """Quadrature for the bottom edge (2D) or bottom face (3D): points on
    the boundary piece in simplex coordinates plus weights."""
    t, w = _gl_nodes(m)
    if dim == 2:
        pts = np.column_stack([t, np.full(m, -1.0)])
        return pts, w
    x1 = (1.0 + t[:, None]) * (1.0 - t[None, :]) / 2.0 - 1.0
    x2 = np.broadcast_to(t[None, :], x1.shape)
    pts = np.column_stack([x1.ravel(), x2.ravel(), np.full(m * m, -1.0)])
    wts = ((w[:, None] * w[None, :]) * ((1.0 - t[None, :]) / 2.0)).ravel()
    return pts, wts


def _boundary_norm_direct(f, dim: int, nodes: int = 40) -> float:
    """Squared boundary norm by direct quadrature on the boundary piece."""
    pts, wts = _boundary_rule(dim, nodes)
    vals = f(pts)
    return float(wts @ vals**2)


def boundary_trace_parseval(f, dim: int, gamma: str, N: int = 12) -> float:
    """Squared boundary norm from the coefficient side.

    Expands f to degree N, collapses the boundary-normal direction with the
    endpoint signs, and sums the squared collapsed coefficients against the
    boundary basis norms. Exact when f is a polynomial of degree <= N.
    """
    if dim == 2 and gamma != "edge":
        raise ParameterError(f"2D boundary piece must be 'edge', got {gamma!r}")
    if dim == 3 and gamma != "face":
        raise ParameterError(f"3D boundary piece must be 'face', got {gamma!r}")
    if dim not in (2, 3):
        raise ParameterError(f"dim must be 2 or 3, got {dim}")
    basis = enumerate_basis(N, dim)
    u = analyze(f, N, dim)
    pos = {idx: i for i, idx in enumerate(basis.indices)}
    total = 0.0
    if dim == 2:
        for p in range(N + 1):
            s = sum(
                (-1.0) ** q * u[pos[SimplexIndex(p, q)]] * (p + q + 1.0) for q in range(N - p + 1)
            )
            total += (2.0 * p + 1.0) / 2.0 * s * s
        return total
    for p in range(N + 1):
        for q in range(N - p + 1):
            n = 2.0 * p + 2.0 * q + 2.0
            s = sum(
                (-1.0) ** r * u[pos[SimplexIndex(p, q, r)]] * (2.0 * r + n + 1.0) / 2.0
                for r in range(N - p - q + 1)
            )
            total += (2.0 * p + 1.0) * (n / 2.0) / 2.0 * s * s
    return total
