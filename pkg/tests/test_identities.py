import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from simplex_spectra import (
    CoefficientPair,
    ParameterError,
    VerificationReport,
    connect_coefficients,
    expand_pair,
    factors,
    verify_coefficient_bound,
    verify_connection,
    verify_deriv_norm_bound,
    verify_deriv_representation,
    verify_factor_identities,
    verify_hardy,
    verify_weighted_antiderivative,
)


def test_factors_frozen_values():
    f = factors(2, 1)
    assert_allclose(
        [f.h1, f.h2, f.h3, f.g1, f.g2, f.g3],
        [-1 / 7, 2 / 35, 1 / 5, 3 / 10, 2 / 15, -1 / 6],
        rtol=1e-15,
    )


def test_factors_zero_numerators_win():
    # q=1, alpha=0: g2 and g3 are 0/0 shapes that resolve to 0
    f = factors(1, 0)
    assert_allclose([f.h1, f.h2, f.h3], [-1 / 3, 0.0, 1 / 3], rtol=1e-15)
    assert f.g1 == 1.0
    assert f.g2 == 0.0
    assert f.g3 == 0.0


def test_factors_pole_raises():
    with pytest.raises(ParameterError):
        factors(0, 2)
    with pytest.raises(ParameterError):
        factors(-1, 0)
    with pytest.raises(ParameterError):
        factors(1.5, 0)


@settings(max_examples=80, deadline=None)
@given(q=st.integers(2, 60), alpha=st.integers(1, 40))
def test_difference_identity(q, alpha):
    f = factors(q, alpha)
    assert_allclose(f.h2 - f.h1, f.h3, rtol=1e-13, atol=1e-16)


def test_factor_identity_sweep():
    report = verify_factor_identities(50, 20)
    assert report.passed
    assert report.max_residual <= 1e-12
    assert set(report.details) == {
        "ratio-g1-h3",
        "ratio-g2-h2",
        "ratio-g3-h1",
        "difference",
        "cancellation",
    }


def test_factor_identity_sweep_detects_sabotage():
    report = verify_factor_identities(50, 20, _h2_offset=1e-6)
    assert not report.passed
    assert report.details["cancellation"] > 1e-8
    assert report.worst_case.startswith("cancellation")


def test_connect_matches_quadrature_coefficients():
    for alpha in (0, 1, 3):
        pair = expand_pair(np.exp, np.exp, alpha, 20)
        pred = connect_coefficients(pair.b, alpha)
        assert np.isnan(pred[0])
        assert_allclose(pred[1:], pair.u[1 : pred.size], rtol=0, atol=1e-12)


def test_connect_legendre_normalized_reduction():
    # for alpha=0 the normalized relation is b[q-1]/(2q-1) - b[q+1]/(2q+3)
    rng = np.random.default_rng(7)
    b = rng.standard_normal(9)
    u = connect_coefficients(b, 0)
    norms = 2.0 / (2.0 * np.arange(9) + 1.0)
    bhat = b / norms
    for q in range(1, 8):
        expect = (bhat[q - 1] / (2 * q - 1) - bhat[q + 1] / (2 * q + 3)) * norms[q]
        assert_allclose(u[q], expect, rtol=1e-13, atol=1e-15)


def test_connect_validation():
    with pytest.raises(ParameterError):
        connect_coefficients([1.0, 2.0], 0)
    with pytest.raises(ParameterError):
        connect_coefficients(np.ones(5), -1)


def test_coefficient_pair_validation():
    with pytest.raises(ParameterError):
        CoefficientPair(u=np.ones(3), b=np.ones(4), alpha=0)
    with pytest.raises(ParameterError):
        CoefficientPair(u=np.array([np.inf, 0.0]), b=np.zeros(2), alpha=0)
    with pytest.raises(ParameterError):
        CoefficientPair(u=np.ones(3), b=np.ones(3), alpha=-2)


def _corpus():
    return [
        expand_pair(np.exp, np.exp, 0, 24),
        expand_pair(lambda x: np.cos(2 * x), lambda x: -2 * np.sin(2 * x), 1, 24),
        expand_pair(lambda x: 1 / (2 + x), lambda x: -1 / (2 + x) ** 2, 2, 28),
        expand_pair(lambda x: np.sin(x) + x**3, lambda x: np.cos(x) + 3 * x**2, 3, 24),
    ]


def test_verify_connection_corpus():
    report = verify_connection(_corpus())
    assert report.passed
    assert report.max_residual <= 1e-12
    assert report.n_checks > 0


def test_weighted_antiderivative_sweep():
    report = verify_weighted_antiderivative()
    assert report.passed
    assert report.max_residual <= 1e-10


def test_deriv_representation_sweep():
    report = verify_deriv_representation()
    assert report.passed
    assert report.max_residual <= 1e-10


def test_deriv_norm_bound_wide_sweep():
    report = verify_deriv_norm_bound(60, 30)
    assert report.passed
    # violations are normalized (I^2 - bound)/bound, so margin is negative
    assert report.max_residual < 0.0


def test_hardy_corpus():
    corpus = [
        ("exp", np.exp, np.exp),
        ("cos", lambda x: np.cos(3 * x), lambda x: -3 * np.sin(3 * x)),
        ("cubic", lambda x: (x - 0.3) ** 3, lambda x: 3 * (x - 0.3) ** 2),
        ("sqrt", lambda x: np.sqrt(x + 0.5), lambda x: 0.5 / np.sqrt(x + 0.5)),
    ]
    report = verify_hardy([0.0, 0.5, 1.0, 2.0, 3.0], corpus)
    assert report.passed
    assert report.n_checks == 20


def test_coefficient_bound_corpus():
    report = verify_coefficient_bound(_corpus())
    assert report.passed
    assert report.max_residual < 0.0


def test_report_properties():
    report = VerificationReport(
        name="toy", n_checks=2, tolerance=1e-10, details={"a": 1e-12, "b": 5e-11}, worst_case="b"
    )
    assert report.max_residual == 5e-11
    assert report.passed
    bad = VerificationReport(
        name="toy", n_checks=1, tolerance=1e-12, details={"a": 1e-3}, worst_case="a"
    )
    assert not bad.passed
