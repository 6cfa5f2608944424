import numpy as np
import pytest
from numpy.testing import assert_allclose

from simplex_spectra import (
    ConstantRecord,
    IterationError,
    NumericError,
    ParameterError,
    additive_constant,
    enumerate_basis,
    h1_form,
    mass_form,
    multiplicative_constant,
    point_eval_form,
    projection_form,
    rayleigh_sup,
    trace_error_rate,
    trace_form,
)
from simplex_spectra.extremal import _DensePencil, _FactoredPencil
from simplex_spectra.forms import SymmetricForm


def small_form(entries):
    n = len(entries)
    basis = enumerate_basis(n - 1, 1)
    return SymmetricForm(
        basis=basis, kind="mass", entries=np.asarray(entries, float), scaling=np.ones(n)
    )


def test_rayleigh_identity_pencil():
    G = small_form(np.diag([1.0, 2.0]))
    sol = rayleigh_sup(G, G)
    assert_allclose(sol.lambda_max, 1.0, rtol=1e-13)
    assert sol.ortho_residual < 1e-9
    assert_allclose(sol.vector @ G.entries @ sol.vector, 1.0, rtol=1e-12)


def test_rayleigh_diagonal_pencil():
    B = small_form(np.diag([3.0, 1.0]))
    G = small_form(np.diag([1.0, 2.0]))
    sol = rayleigh_sup(B, G)
    assert_allclose(sol.lambda_max, 3.0, rtol=1e-13)


def test_rayleigh_rank_one():
    v0 = np.array([1.0, 2.0])
    B = small_form(np.outer(v0, v0))
    G = small_form(np.diag([1.0, 2.0]))
    sol = rayleigh_sup(B, G)
    assert_allclose(sol.lambda_max, v0 @ np.linalg.solve(G.entries, v0), rtol=1e-13)


def test_rayleigh_rejects_indefinite_denominator():
    B = small_form(np.eye(2))
    G = small_form(np.diag([1.0, -0.5]))
    with pytest.raises(NumericError, match="eigenvalue range"):
        rayleigh_sup(B, G)


def test_rayleigh_rejects_mismatched_bases():
    B = small_form(np.eye(2))
    G = small_form(np.eye(3))
    with pytest.raises(ParameterError):
        rayleigh_sup(B, G)


def test_additive_interval_closed_form():
    # N=1: numerator u(1)^2 over P_1 truncation, denominator full H1 on P_2
    rec = additive_constant(1, 1, "point")
    assert_allclose(rec.value, 7.0 / 8.0, atol=1e-12)
    assert rec.kind == "add_h1_denominator"
    assert rec.dim == 1 and rec.N == 1


def test_additive_validation():
    with pytest.raises(ParameterError):
        additive_constant(2, 2, "point")
    with pytest.raises(ParameterError):
        additive_constant(2, 1, "trace")
    with pytest.raises(ParameterError):
        additive_constant(2, 1, "mass")
    with pytest.raises(ParameterError):
        additive_constant(0, 1, "point")
    with pytest.raises(ParameterError):
        additive_constant(2, 3, "h1_of_projection")


def test_constant_record_validation():
    good = dict(dim=1, N=2, kind="mult", value=1.5, iterations=3, residual=1e-14)
    ConstantRecord(**good)
    for field, bad in [
        ("dim", 3),
        ("N", 0),
        ("kind", "product"),
        ("value", -1.0),
        ("value", np.nan),
        ("iterations", 0),
        ("residual", -1e-3),
    ]:
        args = dict(good)
        args[field] = bad
        with pytest.raises(ParameterError):
            ConstantRecord(**args)


def test_multiplicative_interval_closed_form():
    # N=1 admits a two-coefficient closed form; its maximum is known exactly
    rec = multiplicative_constant(1, 1)
    assert_allclose(rec.value, 1.181849168039031, atol=1e-11)
    assert rec.kind == "mult"
    assert rec.residual <= 1e-12


def test_multiplicative_matches_exhaustive_sampling():
    N = 3
    rec = multiplicative_constant(N, 1)
    mass = mass_form(2 * N, 1)
    A = h1_form(2 * N, 1)
    B = projection_form(point_eval_form(2 * N), N)
    rng = np.random.default_rng(5)
    for _ in range(50):
        v = rng.standard_normal(mass.basis.cardinality)
        q = (v @ B.entries @ v) / np.sqrt(
            (v @ mass.entries @ v) * (v @ A.entries @ v)
        )
        assert q <= rec.value + 1e-10


def test_multiplicative_monotone_in_degree():
    vals = [multiplicative_constant(N, 1).value for N in (1, 2, 3, 4)]
    for lo, hi in zip(vals, vals[1:]):
        assert hi >= lo - 1e-6


def test_scale_invariance():
    # scaling u by any positive factor leaves the quotient unchanged, so the
    # computed constant must agree between (B, M, A) and (B, 4M, A/4)
    N = 2
    mass = mass_form(2 * N, 1)
    A = h1_form(2 * N, 1)
    B = projection_form(point_eval_form(2 * N), N)
    p1 = _DensePencil(B.entries, mass.entries, A.entries)
    p2 = _DensePencil(B.entries, 4.0 * mass.entries, 0.25 * A.entries)
    r1 = p1.initial()
    lam1, q1, rn1 = p1.step(r1)
    # r' M' + A'/r' reproduces r M + A/r at r' = r/4
    lam2, q2, rn2 = p2.step(r1 / 4.0)
    assert_allclose(lam2, lam1, rtol=1e-12)
    assert_allclose(q2, q1, rtol=1e-12)
    assert_allclose(rn2, rn1 / 4.0, rtol=1e-12)


def test_dense_and_factored_paths_agree():
    N = 4
    mass = mass_form(2 * N, 2)
    A = h1_form(2 * N, 2)
    B = projection_form(trace_form(2 * N, 2, "edge"), N)
    dense = _DensePencil(B.entries, mass.entries, A.entries)
    fact = _FactoredPencil(B.factor, A.entries, B.entries)
    r0d, r0f = dense.initial(), fact.initial()
    assert_allclose(r0f, r0d, rtol=1e-12)
    for r in (r0d, 1.7, 3.0):
        lam_d, q_d, rn_d = dense.step(r)
        lam_f, q_f, rn_f = fact.step(r)
        assert_allclose(lam_f, lam_d, rtol=1e-11)
        assert_allclose(q_f, q_d, rtol=1e-11)
        assert_allclose(rn_f, rn_d, rtol=1e-11)


def test_iteration_budget_exhaustion():
    with pytest.raises(IterationError) as info:
        multiplicative_constant(10, 1, max_iterations=3)
    best = info.value.best
    assert isinstance(best, ConstantRecord)
    assert best.iterations == 3
    assert best.value > 0


def test_multiplicative_validation():
    with pytest.raises(ParameterError):
        multiplicative_constant(0, 1)
    with pytest.raises(ParameterError):
        multiplicative_constant(2, 3)
    with pytest.raises(ParameterError):
        multiplicative_constant(2.5, 1)


def test_trace_rate_polynomial_exact():
    rows, slope = trace_error_rate(lambda x: x[:, 0] ** 3 + x[:, 1] ** 2, [4, 6, 8])
    for _, err in rows:
        assert err <= 1e-11


def test_trace_rate_analytic_decay():
    rows, slope = trace_error_rate(
        lambda x: np.exp(x[:, 0] + 0.5 * x[:, 1]), [4, 8, 12, 16]
    )
    assert slope <= -3.0
    errs = [e for _, e in rows]
    assert errs == sorted(errs, reverse=True)


def test_trace_rate_validation():
    f = lambda x: np.ones(len(x))
    with pytest.raises(ParameterError):
        trace_error_rate(f, [4])
    with pytest.raises(ParameterError):
        trace_error_rate(f, [4, 4])
    with pytest.raises(ParameterError):
        trace_error_rate(f, [4, 2])
    with pytest.raises(ParameterError):
        trace_error_rate(f, [0, 2])
