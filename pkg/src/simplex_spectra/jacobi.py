"""Jacobi polynomials on [-1, 1] for the weight (1-x)^alpha (1+x)^beta:
evaluation, derivatives, squared norms, antiderivatives, Gauss rules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .errors import ParameterError

__all__ = [
    "JacobiWeight",
    "QuadratureRule",
    "jacobi_eval",
    "jacobi_deriv",
    "jacobi_norm_sq",
    "jacobi_antideriv",
    "gauss_jacobi_rule",
]


@dataclass(frozen=True)
class JacobiWeight:
    """Weight (1-x)^alpha * (1+x)^beta; both exponents must exceed -1."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1.0 and self.beta > -1.0):
            raise ParameterError(
                f"weight exponents must exceed -1, got alpha={self.alpha}, beta={self.beta}"
            )

    @property
    def zeroth_moment(self) -> float:
        """Integral of the weight over [-1, 1]."""
        a, b = self.alpha, self.beta
        log_m = (a + b + 1.0) * np.log(2.0) + gammaln(a + 1.0) + gammaln(b + 1.0) - gammaln(a + b + 2.0)
        return float(np.exp(log_m))


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive weights integrating weight * polynomial on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray
    weight_spec: JacobiWeight
    exact_degree: int

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise ParameterError("nodes and weights must be 1-d arrays of equal nonzero length")
        if not (np.all(np.diff(nodes) > 0.0) and nodes[0] > -1.0 and nodes[-1] < 1.0):
            raise ParameterError("nodes must be strictly increasing and interior to (-1, 1)")
        if np.any(weights <= 0.0):
            raise ParameterError("weights must be positive")
        if self.exact_degree < 0:
            raise ParameterError("exact_degree must be nonnegative")

    def integrate(self, values) -> float:
        """Weighted sum of integrand values sampled at the nodes."""
        return float(self.weights @ np.asarray(values, dtype=float))


def _check_degree(n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ParameterError(f"degree must be an integer, got {n!r}")
    return int(n)


def _recurrence_coeffs(n: float, alpha: float, beta: float):
    """Coefficients (c1, c2, c3, c4) with c1 P_{n+1} = (c2 + c3 x) P_n - c4 P_{n-1}."""
    ab = alpha + beta
    s = 2.0 * n + ab
    c1 = 2.0 * (n + 1.0) * (n + ab + 1.0) * s
    c2 = (s + 1.0) * (alpha * alpha - beta * beta)
    c3 = s * (s + 1.0) * (s + 2.0)
    c4 = 2.0 * (n + alpha) * (n + beta) * (s + 2.0)
    return c1, c2, c3, c4


def _degree_one(alpha: float, beta: float, x: np.ndarray) -> np.ndarray:
    # n = 0 instance of the recurrence with the common factor
    # (alpha+beta)(alpha+beta+1) struck out; the raw instance degenerates to
    # 0 = 0 at alpha + beta = 0.
    return 0.5 * ((alpha - beta) + (alpha + beta + 2.0) * x)


def jacobi_eval(n: int, weight: JacobiWeight, x) -> np.ndarray:
    """Value of the degree-n polynomial at x (scalar or array)."""
    n = _check_degree(n)
    if n < 0:
        raise ParameterError(f"degree must be nonnegative, got {n}")
    xs = np.asarray(x, dtype=float)
    a, b = weight.alpha, weight.beta
    p_prev = np.ones_like(xs)
    if n == 0:
        return p_prev
    p = _degree_one(a, b, xs)
    for k in range(1, n):
        c1, c2, c3, c4 = _recurrence_coeffs(k, a, b)
        p, p_prev = ((c2 + c3 * xs) * p - c4 * p_prev) / c1, p
    return p


def _jacobi_table(n: int, weight: JacobiWeight, x) -> np.ndarray:
    """All degrees 0..n at the points x; shape (n+1,) + x.shape."""
    xs = np.asarray(x, dtype=float)
    a, b = weight.alpha, weight.beta
    out = np.empty((n + 1,) + xs.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = _degree_one(a, b, xs)
    for k in range(1, n):
        c1, c2, c3, c4 = _recurrence_coeffs(k, a, b)
        out[k + 1] = ((c2 + c3 * xs) * out[k] - c4 * out[k - 1]) / c1
    return out


def _scaled_jacobi_table(n: int, weight: JacobiWeight, num, den) -> np.ndarray:
    """Homogenized rows S_k = den^k P_k(num/den); finite for den >= 0.

    The recurrence is cleared of denominators, so each row is a polynomial
    in (num, den) and the den = 0 boundary needs no special casing.
    """
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    num, den = np.broadcast_arrays(num, den)
    a, b = weight.alpha, weight.beta
    out = np.empty((n + 1,) + num.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = 0.5 * ((a - b) * den + (a + b + 2.0) * num)
    den2 = den * den
    for k in range(1, n):
        c1, c2, c3, c4 = _recurrence_coeffs(k, a, b)
        out[k + 1] = ((c2 * den + c3 * num) * out[k] - c4 * den2 * out[k - 1]) / c1
    return out


def jacobi_deriv(n: int, weight: JacobiWeight, x) -> np.ndarray:
    """First derivative of the degree-n polynomial at x."""
    n = _check_degree(n)
    if n < 0:
        raise ParameterError(f"degree must be nonnegative, got {n}")
    xs = np.asarray(x, dtype=float)
    if n == 0:
        return np.zeros_like(xs)
    shifted = JacobiWeight(weight.alpha + 1.0, weight.beta + 1.0)
    return 0.5 * (n + weight.alpha + weight.beta + 1.0) * jacobi_eval(n - 1, shifted, xs)


def jacobi_norm_sq(n: int, weight: JacobiWeight) -> float:
    """Squared weighted L2 norm of the degree-n polynomial."""
    n = _check_degree(n)
    if n < 0:
        raise ParameterError(f"degree must be nonnegative, got {n}")
    a, b = weight.alpha, weight.beta
    # one-sided weights have an exact closed form; keep it free of gammaln
    # roundoff because downstream scalings divide by these values
    if b == 0.0:
        return 2.0 ** (a + 1.0) / (2.0 * n + a + 1.0)
    if a == 0.0:
        return 2.0 ** (b + 1.0) / (2.0 * n + b + 1.0)
    log_v = (
        (a + b + 1.0) * np.log(2.0)
        + gammaln(n + a + 1.0)
        + gammaln(n + b + 1.0)
        - gammaln(n + 1.0)
        - gammaln(n + a + b + 1.0)
    )
    return float(np.exp(log_v)) / (2.0 * n + a + b + 1.0)


def jacobi_antideriv(n: int, alpha: float, x) -> np.ndarray:
    """Antiderivative from -1 of the degree-(n-1) polynomial, weight (alpha, 0).

    Returns the degree-n polynomial that vanishes at x = -1 and whose
    derivative is the degree-(n-1) one. Requires n >= 1.
    """
    n = _check_degree(n)
    if n <= 0:
        raise ParameterError(f"antiderivative needs degree n >= 1, got {n}")
    xs = np.asarray(x, dtype=float)
    if n == 1:
        return xs + 1.0
    q, a = float(n), float(alpha)
    g1 = (2.0 * q + 2.0 * a) / ((2.0 * q + a - 1.0) * (2.0 * q + a))
    g2 = 2.0 * a / ((2.0 * q + a - 2.0) * (2.0 * q + a))
    g3 = -(2.0 * q - 2.0) / ((2.0 * q + a - 1.0) * (2.0 * q + a - 2.0))
    table = _jacobi_table(n, JacobiWeight(a, 0.0), xs)
    return g1 * table[n] + g2 * table[n - 1] + g3 * table[n - 2]


def gauss_jacobi_rule(m: int, weight: JacobiWeight) -> QuadratureRule:
    """Gauss rule with m nodes for the weight; exact through degree 2m - 1.

    Nodes are the eigenvalues of the symmetric tridiagonal matrix built from
    the recurrence coefficients; weights are the squared first eigenvector
    components scaled by the zeroth moment.
    """
    m = _check_degree(m)
    if m < 1:
        raise ParameterError(f"rule needs at least one node, got m={m}")
    a, b = weight.alpha, weight.beta
    ab = a + b
    diag = np.empty(m)
    diag[0] = (b - a) / (ab + 2.0)
    if m > 1:
        n = np.arange(1, m, dtype=float)
        diag[1:] = (b * b - a * a) / ((2.0 * n + ab) * (2.0 * n + ab + 2.0))
    off = np.empty(m - 1)
    if m > 1:
        # first off-diagonal entry in cancelled form: the general product
        # formula below has a removable 0/0 at alpha + beta = -1
        off[0] = np.sqrt(4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) ** 2 * (3.0 + ab)))
    if m > 2:
        k = np.arange(2, m, dtype=float)
        s = 2.0 * k + ab
        off[1:] = np.sqrt(4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s * s - 1.0)))
    nodes, vecs = eigh_tridiagonal(diag, off)
    weights = weight.zeroth_moment * vecs[0, :] ** 2
    return QuadratureRule(nodes=nodes, weights=weights, weight_spec=weight, exact_degree=2 * m - 1)
