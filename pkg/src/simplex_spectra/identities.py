"""Scalar factors that relate weighted Jacobi polynomials to integrals and
derivatives of their neighbors, the coefficient connection formula built
from them, and quadrature-backed verification sweeps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .jacobi import (
    JacobiWeight,
    _jacobi_table,
    gauss_jacobi_rule,
    jacobi_antideriv,
    jacobi_deriv,
    jacobi_eval,
    jacobi_norm_sq,
)

__all__ = [
    "FactorTable",
    "CoefficientPair",
    "VerificationReport",
    "factors",
    "connect_coefficients",
    "expand_pair",
    "verify_factor_identities",
    "verify_connection",
    "verify_weighted_antiderivative",
    "verify_deriv_representation",
    "verify_deriv_norm_bound",
    "verify_hardy",
    "verify_coefficient_bound",
]


# The six factors as plain array-capable formulas. Callers below guarantee
# nonzero denominators; the public entry point validates instead.
def _h1(q, a):
    return -2.0 * (q + 1.0) / ((2.0 * q + a + 1.0) * (2.0 * q + a + 2.0))


def _h2(q, a):
    return 2.0 * a / ((2.0 * q + a + 2.0) * (2.0 * q + a))


def _h3(q, a):
    return 2.0 * (q + a) / ((2.0 * q + a + 1.0) * (2.0 * q + a))


def _g1(q, a):
    return (2.0 * q + 2.0 * a) / ((2.0 * q + a - 1.0) * (2.0 * q + a))


def _g2(q, a):
    return 2.0 * a / ((2.0 * q + a - 2.0) * (2.0 * q + a))


def _g3(q, a):
    return -(2.0 * q - 2.0) / ((2.0 * q + a - 1.0) * (2.0 * q + a - 2.0))


def _norms(q, a):
    """gamma_q for the weight (a, 0); array-capable closed form."""
    return 2.0 ** (a + 1.0) / (2.0 * q + a + 1.0)


@dataclass(frozen=True)
class FactorTable:
    """The six integration/differentiation factors at one (q, alpha)."""

    q: int
    alpha: int
    h1: float
    h2: float
    h3: float
    g1: float
    g2: float
    g3: float


@dataclass(frozen=True, eq=False)
class CoefficientPair:
    """Raw weighted expansion coefficients of a function (u) and its
    derivative (b) for the shared weight (alpha, 0)."""

    u: np.ndarray
    b: np.ndarray
    alpha: int

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "b", b)
        if u.ndim != 1 or u.shape != b.shape:
            raise ParameterError("coefficient sequences must be 1-d and share a truncation length")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(b))):
            raise ParameterError("coefficient sequences must be finite")
        if self.alpha < 0:
            raise ParameterError(f"alpha must be nonnegative, got {self.alpha}")


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """Outcome of one verification sweep.

    ``details`` maps a check name to its worst residual: an absolute
    residual for identity checks, a normalized violation (LHS-RHS)/scale
    for inequality checks (negative values mean satisfied with margin).
    """

    name: str
    n_checks: int
    tolerance: float
    details: dict = field(default_factory=dict)
    worst_case: str = ""

    @property
    def max_residual(self) -> float:
        return max(self.details.values()) if self.details else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


def _check_index(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    return int(value)


def _factor_or_raise(num: float, den: float, label: str, q: int, alpha: int) -> float:
    # a factor with identically vanishing numerator is zero no matter the
    # denominator; a true pole is a domain error
    if num == 0.0:
        return 0.0
    if den == 0.0:
        raise ParameterError(f"factor {label} has a vanishing denominator at q={q}, alpha={alpha}")
    return num / den


def factors(q: int, alpha: int) -> FactorTable:
    """All six factors at integer (q, alpha), both nonnegative."""
    q = _check_index(q, "q")
    alpha = _check_index(alpha, "alpha")
    if q < 0 or alpha < 0:
        raise ParameterError(f"factors need q >= 0 and alpha >= 0, got q={q}, alpha={alpha}")
    fq, fa = float(q), float(alpha)
    s = 2.0 * fq + fa
    h1 = _factor_or_raise(-2.0 * (fq + 1.0), (s + 1.0) * (s + 2.0), "h1", q, alpha)
    h2 = _factor_or_raise(2.0 * fa, (s + 2.0) * s, "h2", q, alpha)
    h3 = _factor_or_raise(2.0 * (fq + fa), (s + 1.0) * s, "h3", q, alpha)
    g1 = _factor_or_raise(2.0 * fq + 2.0 * fa, (s - 1.0) * s, "g1", q, alpha)
    g2 = _factor_or_raise(2.0 * fa, (s - 2.0) * s, "g2", q, alpha)
    g3 = _factor_or_raise(-(2.0 * fq - 2.0), (s - 1.0) * (s - 2.0), "g3", q, alpha)
    return FactorTable(q=q, alpha=alpha, h1=h1, h2=h2, h3=h3, g1=g1, g2=g2, g3=g3)


def connect_coefficients(b, alpha: int) -> np.ndarray:
    """Coefficients of U from the coefficients b of U' for the weight (alpha, 0).

    Returns u of length len(b) - 1 with u[q] filled for 1 <= q <= len(b) - 2;
    u[0] is NaN because the relation starts at q = 1.
    """
    bs = np.asarray(b, dtype=float)
    if bs.ndim != 1 or bs.size < 3:
        raise ParameterError("need at least 3 derivative coefficients")
    alpha = _check_index(alpha, "alpha")
    if alpha < 0:
        raise ParameterError(f"alpha must be nonnegative, got {alpha}")
    fa = float(alpha)
    qs = np.arange(1, bs.size - 1, dtype=float)
    u = np.full(bs.size - 1, np.nan)
    u[1:] = _h1(qs, fa) * bs[2:] + _h2(qs, fa) * bs[1:-1] + _h3(qs, fa) * bs[:-2]
    return u


def expand_pair(fn, dfn, alpha: int, n_terms: int, degree: int = 30) -> CoefficientPair:
    """Quadrature coefficients of fn and dfn against weight (alpha, 0).

    ``degree`` bounds the polynomial degree of fn so the rule can be chosen
    degree-exact.
    """
    alpha = _check_index(alpha, "alpha")
    n_terms = _check_index(n_terms, "n_terms")
    if n_terms < 1:
        raise ParameterError("n_terms must be positive")
    w = JacobiWeight(float(alpha), 0.0)
    m = (degree + n_terms) // 2 + 4
    rule = gauss_jacobi_rule(m, w)
    table = _jacobi_table(n_terms - 1, w, rule.nodes)
    u = table @ (rule.weights * fn(rule.nodes))
    b = table @ (rule.weights * dfn(rule.nodes))
    return CoefficientPair(u=u, b=b, alpha=alpha)


def verify_factor_identities(q_max: int, alpha_max: int, _h2_offset: float = 0.0) -> VerificationReport:
    """Sweep 1 <= q <= q_max, 0 <= alpha <= alpha_max over the exact factor
    relations: the three norm-ratio identities, the difference identity
    h2 - h1 = h3, and the alternating three-term cancellation.

    ``_h2_offset`` is a fault-injection hook for the verification harness:
    it shifts the h2 value used in the cancellation sum only.
    """
    q_max = _check_index(q_max, "q_max")
    alpha_max = _check_index(alpha_max, "alpha_max")
    if q_max < 2:
        raise ParameterError(f"q_max must be at least 2, got {q_max}")
    if alpha_max < 0:
        raise ParameterError(f"alpha_max must be nonnegative, got {alpha_max}")
    q = np.arange(1.0, q_max + 1.0)[:, None]
    a = np.arange(0.0, alpha_max + 1.0)[None, :]

    res = {
        "ratio-g1-h3": np.abs(_g1(q + 1, a) / _norms(q, a) - _h3(q + 1, a) / _norms(q + 1, a)),
        "ratio-g2-h2": np.abs(_g2(q + 1, a) - _h2(q, a)),
        "ratio-g3-h1": np.abs(_g3(q + 1, a) / _norms(q, a) - _h1(q - 1, a) / _norms(q - 1, a)),
        "difference": np.abs((_h2(q, a) - _h1(q, a)) - _h3(q, a)),
    }
    # the alternating (-1)^q prefactor is common to all three terms and
    # drops out of the absolute residual
    res["cancellation"] = np.abs(
        _h1(q, a) / _norms(q, a)
        - (_h2(q + 1, a) + _h2_offset) / _norms(q + 1, a)
        + _h3(q + 2, a) / _norms(q + 2, a)
    )

    details, worst_name, worst_val, worst_at = {}, "", -1.0, (0, 0)
    for name, grid in res.items():
        flat = int(np.argmax(grid))
        qi, ai = np.unravel_index(flat, grid.shape)
        val = float(grid[qi, ai])
        details[name] = val
        if val > worst_val:
            worst_name, worst_val, worst_at = name, val, (int(qi) + 1, int(ai))
    return VerificationReport(
        name="factor-identities",
        n_checks=sum(g.size for g in res.values()),
        tolerance=1e-12,
        details=details,
        worst_case=f"{worst_name} at q={worst_at[0]}, alpha={worst_at[1]}",
    )


def verify_connection(pairs) -> VerificationReport:
    """Check each quadrature-computed pair against connect_coefficients."""
    worst, worst_case, n = -1.0, "", 0
    for i, pair in enumerate(pairs):
        u = connect_coefficients(pair.b, pair.alpha)
        r = np.abs(u[1:] - pair.u[1 : u.size])
        n += r.size
        if r.size and float(r.max()) > worst:
            worst = float(r.max())
            worst_case = f"pair {i} (alpha={pair.alpha}) at q={1 + int(np.argmax(r))}"
    return VerificationReport(
        name="connection",
        n_checks=n,
        tolerance=1e-12,
        details={"connection": max(worst, 0.0)},
        worst_case=worst_case,
    )


def _segment_rule(x_lo: float, x_hi: float, m: int = 48):
    """Gauss-Legendre nodes/weights transplanted to (x_lo, x_hi)."""
    base = gauss_jacobi_rule(m, JacobiWeight(0.0, 0.0))
    half = 0.5 * (x_hi - x_lo)
    return x_lo + half * (base.nodes + 1.0), half * base.weights


def verify_weighted_antiderivative(q_max: int = 10, alpha_max: int = 6, n_points: int = 20) -> VerificationReport:
    """Check the closed three-term forms of the weighted antiderivative.

    Two checks per (q, alpha, x): the weighted integral of the degree-q
    polynomial from -1 to x against -(1-x)^alpha [h1 P_{q+1} + h2 P_q
    + h3 P_{q-1}](x), and jacobi_antideriv against the plain integral.
    """
    xs = np.linspace(-0.96, 0.98, n_points)
    worst = {"weighted-antiderivative": -1.0, "antiderivative": -1.0}
    worst_case, worst_val, n = "", -1.0, 0
    for alpha in range(alpha_max + 1):
        fa = float(alpha)
        w = JacobiWeight(fa, 0.0)
        for q in range(1, q_max + 1):
            h1, h2, h3 = _h1(q, fa), _h2(q, fa), _h3(q, fa)
            for x in xs:
                nodes, wts = _segment_rule(-1.0, float(x))
                tab = _jacobi_table(q + 1, w, nodes)
                lhs_w = float(wts @ ((1.0 - nodes) ** fa * tab[q]))
                rhs_w = -((1.0 - x) ** fa) * float(
                    h1 * jacobi_eval(q + 1, w, x) + h2 * jacobi_eval(q, w, x) + h3 * jacobi_eval(q - 1, w, x)
                )
                r1 = abs(lhs_w - rhs_w)
                lhs_p = float(wts @ tab[q])
                r2 = abs(lhs_p - float(jacobi_antideriv(q + 1, fa, x)))
                n += 2
                worst["weighted-antiderivative"] = max(worst["weighted-antiderivative"], r1)
                worst["antiderivative"] = max(worst["antiderivative"], r2)
                if max(r1, r2) > worst_val:
                    worst_val = max(r1, r2)
                    worst_case = f"q={q}, alpha={alpha}, x={x:.3f}"
    return VerificationReport(
        name="weighted-antiderivative",
        n_checks=n,
        tolerance=1e-10,
        details=worst,
        worst_case=worst_case,
    )


def verify_deriv_representation(q_max: int = 10, alpha_max: int = 6, n_points: int = 20) -> VerificationReport:
    """Check the three-term derivative representation of P_q/gamma_q."""
    xs = np.linspace(-1.0, 1.0, n_points)
    worst, worst_case, n = -1.0, "", 0
    for alpha in range(alpha_max + 1):
        fa = float(alpha)
        w = JacobiWeight(fa, 0.0)
        for q in range(1, q_max + 1):
            lhs = jacobi_eval(q, w, xs) / _norms(q, fa)
            rhs = (
                _h1(q - 1.0, fa) / _norms(q - 1.0, fa) * jacobi_deriv(q - 1, w, xs)
                + _h2(q, fa) / _norms(q, fa) * jacobi_deriv(q, w, xs)
                + _h3(q + 1.0, fa) / _norms(q + 1.0, fa) * jacobi_deriv(q + 1, w, xs)
            )
            r = np.abs(lhs - rhs)
            n += r.size
            if float(r.max()) > worst:
                worst = float(r.max())
                worst_case = f"q={q}, alpha={alpha}, x={xs[int(np.argmax(r))]:.3f}"
    return VerificationReport(
        name="deriv-representation",
        n_checks=n,
        tolerance=1e-10,
        details={"deriv-representation": worst},
        worst_case=worst_case,
    )


def verify_deriv_norm_bound(q_max: int, alpha_max: int) -> VerificationReport:
    """Weighted L2 norms of derivatives against the closed-form bound
    4 q (q+1+alpha)^2 gamma_q; values are reported as normalized violations
    (negative means the bound holds with margin)."""
    q_max = _check_index(q_max, "q_max")
    alpha_max = _check_index(alpha_max, "alpha_max")
    if q_max < 1:
        raise ParameterError(f"q_max must be at least 1, got {q_max}")
    worst, worst_case, n = -np.inf, "", 0
    for alpha in range(alpha_max + 1):
        fa = float(alpha)
        w = JacobiWeight(fa, 0.0)
        rule = gauss_jacobi_rule(q_max + 1, w)
        shifted = JacobiWeight(fa + 1.0, 1.0)
        tab = _jacobi_table(q_max - 1, shifted, rule.nodes)
        for q in range(1, q_max + 1):
            deriv = 0.5 * (q + fa + 1.0) * tab[q - 1]
            i_sq = float(rule.weights @ (deriv * deriv))
            bound = 4.0 * q * (q + 1.0 + fa) ** 2 * _norms(float(q), fa)
            violation = (i_sq - bound) / bound
            n += 1
            if violation > worst:
                worst, worst_case = violation, f"q={q}, alpha={alpha}"
    return VerificationReport(
        name="deriv-norm-bound",
        n_checks=n,
        tolerance=1e-10,
        details={"deriv-norm-bound": worst},
        worst_case=worst_case,
    )


def _unit_interval_rule(beta: float, m: int = 48):
    """Rule for integrals of x^beta * f(x) over (0, 1)."""
    rule = gauss_jacobi_rule(m, JacobiWeight(0.0, beta))
    x = 0.5 * (rule.nodes + 1.0)
    return x, rule.weights * 0.5 ** (beta + 1.0)


def verify_hardy(beta_list, test_functions) -> VerificationReport:
    """Weighted Hardy inequality on (0, 1) over a corpus of C^1 functions.

    ``test_functions`` holds (label, u, u_prime) triples or (u, u_prime)
    pairs; violations are normalized by the right-hand side.
    """
    worst, worst_case, n = -np.inf, "", 0
    for beta in beta_list:
        if beta <= -1.0:
            raise ParameterError(f"beta must exceed -1, got {beta}")
        fb = float(beta)
        x_l, w_l = _unit_interval_rule(fb)
        x_r, w_r = _unit_interval_rule(fb + 2.0)
        for i, item in enumerate(test_functions):
            label, u, du = item if len(item) == 3 else (f"fn{i}", item[0], item[1])
            lhs = float(w_l @ u(x_l) ** 2)
            rhs = (2.0 / (fb + 1.0)) ** 2 * float(w_r @ du(x_r) ** 2) + float(u(np.asarray(1.0))) ** 2 / (fb + 1.0)
            violation = (lhs - rhs) / rhs
            n += 1
            if violation > worst:
                worst, worst_case = violation, f"{label} at beta={beta}"
    return VerificationReport(
        name="hardy",
        n_checks=n,
        tolerance=1e-10,
        details={"hardy": worst},
        worst_case=worst_case,
    )


def verify_coefficient_bound(pairs) -> VerificationReport:
    """Sanity check of the product-of-sums coefficient bound with constant 10.

    Not a tight-constant claim; truncated tails only shrink the right-hand
    side, so passing is meaningful."""
    worst, worst_case, n = -np.inf, "", 0
    for i, pair in enumerate(pairs):
        fa = float(pair.alpha)
        j = np.arange(pair.u.size, dtype=float)
        inv_norm = 1.0 / _norms(j, fa)
        u_tail = np.cumsum((pair.u**2 * inv_norm)[::-1])[::-1]
        b_tail = np.cumsum((pair.b**2 * inv_norm)[::-1])[::-1]
        for q in range(1, pair.u.size - 1):
            lhs = pair.b[q - 1] ** 2 + pair.b[q] ** 2
            rhs = 10.0 * 2.0 ** (fa + 1.0) * np.sqrt(u_tail[q]) * np.sqrt(b_tail[q - 1])
            scale = max(rhs, 1e-300)
            violation = (lhs - rhs) / scale
            n += 1
            if violation > worst:
                worst, worst_case = violation, f"pair {i} (alpha={pair.alpha}) at q={q}"
    return VerificationReport(
        name="coefficient-bound",
        n_checks=n,
        tolerance=1e-10,
        details={"coefficient-bound": worst},
        worst_case=worst_case,
    )
