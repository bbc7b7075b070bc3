import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hiermap import errors, priors
from hiermap.priors import (
    HyperDomain,
    SpectralPrior,
    eigenvalue,
    eigenvalues,
    kernel_value,
    limiting_ratio_g,
    log_eigenvalue_gradient,
)


def wm_prior(family="whittle_matern", free=("sigma", "ell", "nu"),
             fixed=None, lower=(0.05, 0.05, 0.2), upper=(20.0, 20.0, 5.0)):
    return SpectralPrior(
        spectrum=priors.neumann1d(),
        family=family,
        fixed=fixed or {},
        free=free,
        domain=HyperDomain(lower, upper),
    )


def ard_prior(d=2, sweep_axis=0):
    return SpectralPrior(
        spectrum=priors.dirichlet_box(d),
        family="ard",
        fixed={"sigma": 1.0},
        free=tuple(f"theta{k + 1}" for k in range(d)),
        domain=HyperDomain([0.05] * d, [5.0] * d),
        sweep_axis=sweep_axis,
    )


# ---------------------------------------------------------------------------
# Laplacian spectra


def test_neumann_eigenvalues_are_pi2_j2():
    lam = priors.neumann1d().eigenvalues(5)
    assert np.allclose(lam, np.pi**2 * np.arange(1, 6) ** 2, rtol=0, atol=0)


def test_periodic_eigenvalues_come_in_pairs():
    lam = priors.periodic1d().eigenvalues(6)
    expected = 4 * np.pi**2 * np.array([1, 1, 4, 4, 9, 9], dtype=float)
    assert np.array_equal(lam, expected)


@pytest.mark.parametrize("spec", [priors.neumann1d(), priors.periodic1d(),
                                  priors.dirichlet_box(2), priors.dirichlet_box(3)])
def test_spectrum_nondecreasing_and_growth_rate(spec):
    n = 600
    lam = spec.eigenvalues(n)
    assert np.all(np.diff(lam) >= 0)
    j = np.arange(1, n + 1)
    ratio = lam / j ** (2.0 / spec.d)
    # lambda_j ~ j^(2/d): the ratio stays within fixed bounds on the range
    assert ratio.max() / ratio.min() < 25


def test_dirichlet_box_d1_matches_interval():
    assert np.array_equal(priors.dirichlet_box(1).eigenvalues(10),
                          priors.dirichlet1d().eigenvalues(10))


def test_dirichlet_box_smallest_values():
    # sum of two squared positive integers, sorted: 2, 5, 5, 8, 10, 10, ...
    lam = priors.dirichlet_box(2).eigenvalues(6)
    assert np.allclose(lam / np.pi**2, [2, 5, 5, 8, 10, 10])


def test_bad_spectrum_args():
    with pytest.raises(errors.DomainError):
        priors.LaplacianSpectrum(d=2, kind="neumann1d")
    with pytest.raises(errors.DomainError):
        priors.neumann1d().eigenvalue(0)


# ---------------------------------------------------------------------------
# HyperDomain


def test_hyperdomain_validation():
    with pytest.raises(errors.DomainError):
        HyperDomain([0.0], [1.0])
    with pytest.raises(errors.DomainError):
        HyperDomain([2.0], [1.0])
    box = HyperDomain([0.5, 1.0], [2.0, 3.0])
    assert box.contains([0.5, 3.0])
    assert not box.contains([0.5, 3.0], strict=True)
    assert not box.contains([0.5])
    assert np.array_equal(box.clip([0.0, 10.0]), [0.5, 3.0])


# ---------------------------------------------------------------------------
# Eigenvalue families


def test_wm_frozen_value():
    # sigma = ell = 1, nu = 3/2, j = 1: (pi^2 + 1)^(-3/2)
    prior = wm_prior()
    got = eigenvalue(prior, [1.0, 1.0, 1.5], 1)
    assert got == pytest.approx((np.pi**2 + 1) ** -1.5, rel=1e-12)
    assert got == pytest.approx(0.0279049, rel=1e-5)


def test_wm_sigma_scaling():
    prior = wm_prior()
    base = eigenvalues(prior, [1.0, 0.7, 1.5], 20)
    doubled = eigenvalues(prior, [2.0, 0.7, 1.5], 20)
    assert np.allclose(doubled, 4.0 * base, rtol=1e-14)


def test_beta_family_matches_normalized_at_corresponding_point():
    nu = 1.5
    sig, ell = 1.3, 0.8
    beta = sig * ell**-nu
    p_norm = wm_prior("whittle_matern_normalized")
    p_beta = SpectralPrior(
        spectrum=priors.neumann1d(),
        family="whittle_matern_beta",
        fixed={"nu": nu},
        free=("sigma", "beta"),
        domain=HyperDomain([0.05, 0.05], [20.0, 20.0]),
    )
    mu_norm = eigenvalues(p_norm, [sig, ell, nu], 50)
    mu_beta = eigenvalues(p_beta, [sig, beta], 50)
    assert np.allclose(mu_beta, mu_norm, rtol=1e-12)


def test_kappa_constant_against_exact_values():
    # Gamma(2)(4 pi)^(1/2) / Gamma(3/2) = 2 sqrt(4 pi) / sqrt(pi) = 4
    assert priors.kappa(1.5, 1) == pytest.approx(4.0, rel=1e-13)
    grid = np.concatenate([np.linspace(0.1, 2, 41), np.linspace(2, 20, 41)])
    for nu in grid:
        exact = math.exp(math.lgamma(nu + 0.5) - math.lgamma(nu)) * math.sqrt(4 * math.pi)
        assert priors.kappa(float(nu), 1) == pytest.approx(exact, rel=1e-13)


def test_ell_inv_parameterization_agrees():
    p_ell = wm_prior()
    p_inv = wm_prior(free=("sigma", "ell_inv", "nu"))
    a = eigenvalues(p_ell, [1.1, 2.0, 1.5], 10)
    b = eigenvalues(p_inv, [1.1, 0.5, 1.5], 10)
    assert np.allclose(a, b, rtol=1e-14)


def test_eigenvalue_positivity_on_grid():
    prior = wm_prior()
    for sig in (0.05, 1.0, 20.0):
        for ell in (0.05, 1.0, 20.0):
            for nu in (0.2, 1.5, 5.0):
                mu = eigenvalues(prior, [sig, ell, nu], 100)
                assert np.all(mu > 0) and np.all(np.isfinite(mu))


def test_domain_errors():
    prior = wm_prior()
    with pytest.raises(errors.DomainError):
        eigenvalue(prior, [30.0, 1.0, 1.5], 1)  # sigma above the box
    with pytest.raises(errors.DomainError):
        eigenvalue(prior, [1.0, 1.0, 1.5], 0)
    with pytest.raises(errors.DomainError):
        log_eigenvalue_gradient(prior, [0.05, 1.0, 1.5], 1)  # on the boundary


def test_ard_eigenvalue_and_sweep():
    prior = ard_prior(d=2, sweep_axis=1)
    theta = [0.7, 0.3]
    # swept index j: multi-index (1, j)
    for j in (1, 2, 5):
        direct = priors.ard_eigenvalue(prior, theta, (1, j))
        assert eigenvalue(prior, theta, j) == pytest.approx(direct, rel=1e-14)


def test_ard_separability_matches_1d():
    # varying only coordinate k is, up to the fixed-theta factor, the d=1 family
    d = 3
    prior = ard_prior(d=d, sweep_axis=2)
    theta = [0.9, 0.4, 0.6]
    prior1 = SpectralPrior(
        spectrum=priors.dirichlet_box(1),
        family="ard",
        fixed={"sigma": 1.0},
        free=("theta1",),
        domain=HyperDomain([0.05], [5.0]),
    )
    js = np.arange(1, 30)
    full = eigenvalue(prior, theta, js)
    one_d = eigenvalue(prior1, [theta[2]], js)
    const = math.exp(-math.pi**2 * (theta[0] ** 2 + theta[1] ** 2))
    assert np.allclose(full, const * one_d, rtol=1e-12)


# ---------------------------------------------------------------------------
# Gradients


@pytest.mark.parametrize("family,free,theta", [
    ("whittle_matern", ("sigma", "ell", "nu"), [1.3, 0.6, 1.7]),
    ("whittle_matern", ("sigma", "ell_inv", "nu"), [0.8, 2.4, 0.9]),
    ("whittle_matern_normalized", ("sigma", "ell", "nu"), [1.1, 1.9, 2.2]),
])
def test_gradient_matches_central_difference(family, free, theta):
    prior = wm_prior(family, free=free)
    theta = np.asarray(theta)
    h = 1e-6
    for j in (1, 10, 100):
        grad = log_eigenvalue_gradient(prior, theta, j)
        for k in range(len(theta)):
            e = np.zeros(len(theta))
            e[k] = h
            fd = (math.log(eigenvalue(prior, theta + e, j))
                  - math.log(eigenvalue(prior, theta - e, j))) / (2 * h)
            assert grad[k] == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_gradient_beta_and_ard_match_central_difference():
    p_beta = SpectralPrior(
        spectrum=priors.neumann1d(),
        family="whittle_matern_beta",
        fixed={"nu": 1.5},
        free=("sigma", "beta"),
        domain=HyperDomain([0.05, 0.05], [20.0, 20.0]),
    )
    p_ard = ard_prior(d=2)
    h = 1e-6
    # ard indices kept small: mu_j = exp(-pi^2 theta1^2 j^2) underflows fast
    for prior, theta in ((p_beta, np.array([1.2, 0.7])), (p_ard, np.array([0.3, 0.25]))):
        for j in (1, 5, 20):
            grad = log_eigenvalue_gradient(prior, theta, j)
            for k in range(len(theta)):
                e = np.zeros(len(theta))
                e[k] = h
                fd = (math.log(eigenvalue(prior, theta + e, j))
                      - math.log(eigenvalue(prior, theta - e, j))) / (2 * h)
                assert grad[k] == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_gradient_sigma_component_closed_form():
    prior = wm_prior()
    for sig in (0.3, 1.0, 4.0):
        g = log_eigenvalue_gradient(prior, [sig, 1.0, 1.5], 7)
        assert g[0] == pytest.approx(2.0 / sig, rel=1e-13)


def test_gradient_ell_inv_bound():
    # |d/dt log mu_j| <= 2 nu / t for the inverse length-scale t
    prior = wm_prior(free=("sigma", "ell_inv", "nu"))
    for t in np.linspace(0.1, 15, 12):
        for nu in (0.5, 1.5, 3.0):
            g = log_eigenvalue_gradient(prior, [1.0, t, nu], np.arange(1, 200))
            assert np.all(np.abs(g[:, 1]) <= 2 * nu / t + 1e-12)


def test_gradient_vector_j_shape():
    prior = wm_prior()
    g = log_eigenvalue_gradient(prior, [1.0, 1.0, 1.5], np.arange(1, 6))
    assert g.shape == (5, 3)


# ---------------------------------------------------------------------------
# Kernels


def test_kernel_values():
    p = {"sigma": 1.7, "ell": 0.9}
    assert kernel_value("ou", p, 0.3, 0.3) == pytest.approx(1.7**2, rel=1e-14)
    pm = {"sigma": 1.0, "ell": 1.0, "nu": 1.5}
    assert kernel_value("matern", pm, 0.0, 1.0) == pytest.approx(2 * math.exp(-1), rel=1e-12)
    assert kernel_value("matern", pm, 0.0, 1.0) == pytest.approx(0.735759, rel=1e-6)


def test_matern_half_equals_ou():
    xs = np.linspace(0, 2, 17)
    for sig, ell in ((1.0, 1.0), (0.4, 2.3), (3.0, 0.2)):
        ou = kernel_value("ou", {"sigma": sig, "ell": ell}, xs, 0.25)
        m = kernel_value("matern", {"sigma": sig, "ell": ell, "nu": 0.5}, xs, 0.25)
        assert np.allclose(ou, m, rtol=1e-12, atol=1e-15)


def test_matern_unsupported_nu():
    with pytest.raises(errors.UnsupportedParameterError):
        kernel_value("matern", {"sigma": 1, "ell": 1, "nu": 1.0}, 0.0, 1.0)


def test_squared_exponential_value():
    got = kernel_value("squared_exponential", {"sigma": 1.0, "ell": 2.0}, 0.0, 2.0)
    assert got == pytest.approx(math.exp(-0.5), rel=1e-14)


# ---------------------------------------------------------------------------
# Limiting ratio g


def test_g_identity():
    prior = wm_prior()
    th = [1.0, 1.0, 1.5]
    assert limiting_ratio_g(prior, th, th) == pytest.approx(1.0, rel=0)


def test_g_closed_form_example():
    prior = wm_prior()
    assert limiting_ratio_g(prior, [1.0, 2.0, 1.5], [1.0, 1.0, 1.5]) == pytest.approx(8.0)


def test_g_beta_depends_only_on_beta():
    p_beta = SpectralPrior(
        spectrum=priors.neumann1d(),
        family="whittle_matern_beta",
        fixed={"nu": 1.5},
        free=("sigma", "beta"),
        domain=HyperDomain([0.05, 0.05], [20.0, 20.0]),
    )
    assert limiting_ratio_g(p_beta, [5.0, 1.0], [1.0, 1.0]) == pytest.approx(1.0)
    assert limiting_ratio_g(p_beta, [2.0, 0.5], [1.0, 1.0]) == pytest.approx(4.0)


def test_g_regularity_mismatch_flags():
    prior = wm_prior()
    assert limiting_ratio_g(prior, [1.0, 1.0, 1.0], [1.0, 1.0, 1.5]) == 0.0
    assert limiting_ratio_g(prior, [1.0, 1.0, 2.0], [1.0, 1.0, 1.5]) == math.inf


def test_g_ard_flags_and_finite_case():
    prior = ard_prior(d=2, sweep_axis=0)
    truth = [1.0, 1.0]
    assert limiting_ratio_g(prior, [0.5, 1.0], truth) == 0.0
    assert limiting_ratio_g(prior, [2.0, 1.0], truth) == math.inf
    got = limiting_ratio_g(prior, [1.0, 0.5], truth)
    assert got == pytest.approx(math.exp(-math.pi**2 * (1.0 - 0.25)), rel=1e-12)


def test_g_equivalence_curve():
    # g = 1 exactly when sigma ell^(-nu) matches the true combination
    prior = wm_prior()
    nu = 1.5
    truth = [1.0, 1.0, nu]
    for ell in (0.25, 0.5, 1.0, 2.0, 4.0):
        sig_on = ell**nu
        assert limiting_ratio_g(prior, [sig_on, ell, nu], truth) == pytest.approx(1.0, rel=1e-12)
        assert limiting_ratio_g(prior, [1.1 * sig_on, ell, nu], truth) != pytest.approx(1.0, rel=1e-3)


def test_eigenvalue_ratio_converges_to_g():
    prior = wm_prior()
    theta, truth = [1.0, 2.0, 1.5], [1.0, 1.0, 1.5]
    g = limiting_ratio_g(prior, theta, truth)
    js = np.array([10**4, 2 * 10**4, 10**5])
    ratio = eigenvalue(prior, truth, js) / eigenvalue(prior, theta, js)
    assert np.all(np.abs(ratio - g) < 0.01 * g)


# ---------------------------------------------------------------------------
# Property-based checks


@settings(max_examples=60, deadline=None)
@given(
    sig=st.floats(0.1, 10.0),
    ell=st.floats(0.1, 10.0),
    nu=st.floats(0.3, 4.0),
    j=st.integers(1, 10**6),
)
def test_wm_eigenvalue_positive_and_decreasing_property(sig, ell, nu, j):
    prior = wm_prior()
    mu_j = eigenvalue(prior, [sig, ell, nu], j)
    mu_next = eigenvalue(prior, [sig, ell, nu], j + 1)
    assert mu_j > 0
    assert mu_next <= mu_j


@settings(max_examples=40, deadline=None)
@given(
    sig=st.floats(0.1, 10.0), ell=st.floats(0.1, 10.0),
    sig2=st.floats(0.1, 10.0), ell2=st.floats(0.1, 10.0),
)
def test_g_reciprocity_property(sig, ell, sig2, ell2):
    prior = wm_prior()
    a = limiting_ratio_g(prior, [sig, ell, 1.5], [sig2, ell2, 1.5])
    b = limiting_ratio_g(prior, [sig2, ell2, 1.5], [sig, ell, 1.5])
    assert a * b == pytest.approx(1.0, rel=1e-9)
