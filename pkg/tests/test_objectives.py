import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hiermap import errors, forward, objectives, oracle, priors
from hiermap.forward import Dataset, ProblemSpec, generate_data
from hiermap.objectives import (
    ObjectiveSpec,
    assumption_ii_margin,
    cesaro_b_mean,
    evaluate,
    limiting_objective,
    rescale,
    s_weight,
    spectral_weights,
)
from hiermap.priors import HyperDomain, SpectralPrior


def wm_prior(family="whittle_matern"):
    return SpectralPrior(
        spectrum=priors.neumann1d(),
        family=family,
        fixed={"nu": 1.5},
        free=("sigma", "ell"),
        domain=HyperDomain([0.05, 0.05], [20.0, 20.0]),
    )


PRIOR = wm_prior()


def make_dataset(n=16, gamma=0.5, theta_true=(1.0, 1.0), seed=0,
                 representation="noncentred", fwd=None):
    spec = ProblemSpec(prior=PRIOR, forward=fwd or forward.deblurring(),
                       noise=forward.fixed_noise(gamma), n=n,
                       theta_true=theta_true, representation=representation)
    return generate_data(spec, seed=seed)


# ---------------------------------------------------------------------------
# Weights


def test_s_weight_frozen_value():
    # a_1 = 1, mu_1 = (pi^2 + 1)^{-3/2}, gamma = 1
    val = s_weight(PRIOR, forward.deblurring(), (1.0, 1.0), 1.0, 1)
    assert val == pytest.approx((np.pi**2 + 1) ** -1.5 + 1.0, rel=1e-14)


def test_s_weight_degenerate_pieces():
    theta = (1.3, 0.8)
    mu3 = priors.eigenvalue(PRIOR, theta, 3)
    assert s_weight(PRIOR, forward.deblurring(), theta, 0.0, 3) == pytest.approx(
        mu3 / 81.0, rel=1e-15)
    dead = forward.custom([1.0, 0.0, 2.0])
    assert s_weight(PRIOR, dead, theta, 0.7, 2) == 0.7**2
    arr = s_weight(PRIOR, forward.deblurring(), theta, 0.2, np.array([1, 2, 5]))
    assert arr.shape == (3,)
    assert arr[0] == pytest.approx(priors.eigenvalue(PRIOR, theta, 1) + 0.04)


def test_b_is_one_at_truth():
    w = spectral_weights(PRIOR, forward.deblurring(), (1.0, 1.0), 0.3, 40, (1.0, 1.0))
    assert np.array_equal(w.b, np.ones(40))
    assert np.all(w.s > 0.09)


# ---------------------------------------------------------------------------
# Objective values


def test_noncentred_zero_data_is_hyperprior_only():
    ds = make_dataset(n=8)
    zero = Dataset(n=ds.n, gamma=ds.gamma, y=np.zeros(ds.n),
                   truth_coeffs=ds.truth_coeffs, theta_true=ds.theta_true,
                   seed=ds.seed, representation=ds.representation,
                   a=ds.a, mu_true=ds.mu_true)
    logrho = lambda th: -0.5 * float(np.sum((th - 1.0) ** 2))
    spec = ObjectiveSpec(kind="noncentred", prior=PRIOR, dataset=zero,
                         log_hyperprior=logrho)
    theta = np.array([1.5, 0.7])
    assert evaluate(spec, theta) == -logrho(theta) / 8


def test_all_shifted_objectives_coincide_at_truth():
    ds = make_dataset(n=32, seed=4)
    vals = [evaluate(ObjectiveSpec(kind=k, prior=PRIOR, dataset=ds), (1.0, 1.0))
            for k in ("centred", "noncentred", "empirical_bayes")]
    assert vals[0] == pytest.approx(vals[1], rel=1e-13)
    assert vals[2] == pytest.approx(vals[1], rel=1e-13)


def test_outside_domain_raises():
    ds = make_dataset()
    spec = ObjectiveSpec(kind="centred", prior=PRIOR, dataset=ds)
    with pytest.raises(errors.DomainError):
        evaluate(spec, (25.0, 1.0))


def test_centred_full_validation():
    ds = make_dataset(n=10)
    with pytest.raises(errors.DomainError):
        ObjectiveSpec(kind="centred_full", prior=PRIOR, dataset=ds, nmax_full=5)
    with pytest.raises(errors.DomainError):
        ObjectiveSpec(kind="centred", prior=PRIOR, dataset=ds, nmax_full=20)
    with pytest.raises(errors.DomainError):
        ObjectiveSpec(kind="profile", prior=PRIOR, dataset=ds)


def test_centred_full_matches_scaled_centred():
    ds = make_dataset(n=12, seed=7)
    logrho = lambda th: float(-np.sum(th))
    full = ObjectiveSpec(kind="centred_full", prior=PRIOR, dataset=ds,
                         nmax_full=12, log_hyperprior=logrho)
    norm = ObjectiveSpec(kind="centred", prior=PRIOR, dataset=ds,
                         log_hyperprior=logrho)
    for theta in ((1.0, 1.0), (0.4, 2.5), (3.0, 0.3)):
        assert evaluate(full, theta) == pytest.approx(
            12 * evaluate(norm, theta), rel=1e-12)


def test_centred_full_extension_cancels_at_truth():
    # at the generating hyperparameter the extended volume term cancels with
    # its shift no matter how far the sum runs
    ds = make_dataset(n=12, seed=7)
    short = ObjectiveSpec(kind="centred_full", prior=PRIOR, dataset=ds, nmax_full=12)
    long = ObjectiveSpec(kind="centred_full", prior=PRIOR, dataset=ds, nmax_full=500)
    assert evaluate(long, (1.0, 1.0)) == pytest.approx(
        evaluate(short, (1.0, 1.0)), rel=1e-12)
    assert evaluate(long, (1.0, 1.4)) != pytest.approx(
        evaluate(short, (1.0, 1.4)), rel=1e-6)


# ---------------------------------------------------------------------------
# Dense-matrix oracle equivalence


def _random_instance(rng):
    n = int(rng.integers(3, 51))
    gamma = float(rng.uniform(0.1, 2.0))
    theta_true = (float(rng.uniform(0.3, 3.0)), float(rng.uniform(0.3, 3.0)))
    fwd = forward.deblurring() if rng.random() < 0.5 else forward.power_law(
        float(rng.uniform(0.5, 3.0)))
    spec = ProblemSpec(
        prior=PRIOR, forward=fwd, noise=forward.fixed_noise(gamma), n=n,
        theta_true=theta_true,
        representation="centred" if rng.random() < 0.5 else "noncentred")
    ds = generate_data(spec, seed=int(rng.integers(0, 2**31)))
    theta = (float(rng.uniform(0.3, 3.0)), float(rng.uniform(0.3, 3.0)))
    return ds, theta


def test_objectives_match_dense_oracle():
    rng = np.random.default_rng(2024)
    logrho = lambda th: -0.1 * float(np.sum(th**2))
    for i in range(10):
        ds, theta = _random_instance(rng)
        for kind in ("centred", "noncentred", "empirical_bayes"):
            fast = evaluate(ObjectiveSpec(kind=kind, prior=PRIOR, dataset=ds,
                                          log_hyperprior=logrho), theta)
            dense = oracle.dense_objective(kind, PRIOR, ds, theta,
                                           log_hyperprior=logrho, seed=i)
            assert abs(fast - dense) <= 1e-10 * max(1.0, abs(dense))


def test_posterior_matches_dense_oracle():
    rng = np.random.default_rng(77)
    for i in range(5):
        ds, theta = _random_instance(rng)
        mean, cov = oracle.dense_posterior(PRIOR, ds, theta, seed=i)
        fast_mean = forward.posterior_mean_coeff(PRIOR, theta, ds)
        fast_var = forward.posterior_variance_coeff(PRIOR, theta, ds)
        scale = max(1.0, np.abs(mean).max())
        assert np.allclose(fast_mean, mean, rtol=0, atol=1e-10 * scale)
        assert np.allclose(np.diag(cov), fast_var, rtol=0,
                           atol=1e-10 * max(1.0, fast_var.max()))
        off = cov - np.diag(np.diag(cov))
        assert np.abs(off).max() < 1e-10 * max(1.0, fast_var.max())


def test_variational_misfit_identity():
    rng = np.random.default_rng(5)
    ds, theta = _random_instance(rng)
    a_mat, c_mat, y, _, _ = oracle.rotated_problem(PRIOR, ds, theta, seed=11)
    gram = ds.gamma**2 * np.eye(ds.n) + a_mat @ c_mat @ a_mat.T
    direct = 0.5 * float(y @ np.linalg.solve(gram, y))
    assert oracle.variational_misfit(a_mat, c_mat, y, ds.gamma) == pytest.approx(
        direct, rel=1e-8)


def test_square_determinant_identity():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((6, 6))
    m = rng.standard_normal((6, 6))
    qsym = m @ m.T + 6 * np.eye(6)
    lhs = np.linalg.det(a.T @ qsym @ a)
    rhs = np.linalg.det(qsym) * np.linalg.det(a) ** 2
    assert lhs == pytest.approx(rhs, rel=1e-8)


# ---------------------------------------------------------------------------
# Shift and rescale leave minimizers alone


def test_rescale_properties():
    assert rescale(3.0, 0.25, 3.0) == 1.0
    v = np.array([-2.0, 0.0, 1.0, 10.0, 1e6])
    out = rescale(v, 0.3)
    assert np.all(np.diff(out) > 0)
    with pytest.raises(errors.DomainError):
        rescale(1.0, 0.0)


def test_argmin_invariance_on_grid():
    ds = make_dataset(n=24, seed=3)
    ells = np.linspace(0.2, 4.0, 61)
    variants = {
        "base": ObjectiveSpec(kind="centred", prior=PRIOR, dataset=ds),
        "unshifted": ObjectiveSpec(kind="centred", prior=PRIOR, dataset=ds,
                                   shifted=False),
        "rescaled": ObjectiveSpec(kind="centred", prior=PRIOR, dataset=ds,
                                  rescale_epsilon=0.2, rescale_center=0.5),
    }
    argmins = {}
    for name, spec in variants.items():
        vals = np.array([evaluate(spec, (1.0, ell)) for ell in ells])
        argmins[name] = int(np.argmin(vals))
    assert argmins["unshifted"] == argmins["base"]
    assert argmins["rescaled"] == argmins["base"]


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 18.0), st.floats(0.2, 18.0))
def test_shift_constant_is_theta_independent(sig, ell):
    ds = make_dataset(n=16, seed=9)
    ref_diff = None
    for kind in ("centred", "empirical_bayes"):
        shifted = ObjectiveSpec(kind=kind, prior=PRIOR, dataset=ds)
        plain = ObjectiveSpec(kind=kind, prior=PRIOR, dataset=ds, shifted=False)
        diff = evaluate(shifted, (sig, ell)) - evaluate(plain, (sig, ell))
        ref = evaluate(shifted, (1.0, 1.0)) - evaluate(plain, (1.0, 1.0))
        assert diff == pytest.approx(ref, rel=1e-9, abs=1e-9)
        ref_diff = diff


# ---------------------------------------------------------------------------
# Limits and Cesaro means


def test_limiting_values():
    assert limiting_objective("centred_limit", PRIOR, (1.0, 1.0), (1.0, 1.0)) == 0.5
    assert limiting_objective("noncentred_limit", PRIOR, (1.0, 1.0), (1.0, 1.0)) == 0.5
    # g = (ell/ell_true)^{2 nu} = 2^3 = 8
    c8 = limiting_objective("centred_limit", PRIOR, (1.0, 2.0), (1.0, 1.0))
    assert c8 == pytest.approx(4.0 - 0.5 * math.log(8.0), rel=1e-14)
    assert limiting_objective("noncentred_limit", PRIOR, (1.0, 2.0), (1.0, 1.0)) == 4.0
    with pytest.raises(errors.DomainError):
        limiting_objective("centred", PRIOR, (1.0, 1.0), (1.0, 1.0))


def test_limiting_degenerate_flags():
    rough = SpectralPrior(spectrum=priors.neumann1d(), family="whittle_matern",
                          fixed={"nu": 1.0}, free=("sigma", "ell"),
                          domain=HyperDomain([0.05, 0.05], [20.0, 20.0]))
    smooth = SpectralPrior(spectrum=priors.neumann1d(), family="whittle_matern",
                           fixed={"nu": 2.0}, free=("sigma", "ell"),
                           domain=HyperDomain([0.05, 0.05], [20.0, 20.0]))
    # matching hyperparameters always give g = 1 whatever the fixed smoothness
    assert priors.limiting_ratio_g(rough, (1.0, 1.0), (1.0, 1.0)) == 1.0
    assert priors.limiting_ratio_g(smooth, (1.0, 1.0), (1.0, 1.0)) == 1.0
    # smoothness mismatch needs nu among the free coordinates
    mixed = SpectralPrior(spectrum=priors.neumann1d(), family="whittle_matern",
                          fixed={}, free=("sigma", "ell", "nu"),
                          domain=HyperDomain([0.05, 0.05, 0.2], [20.0, 20.0, 5.0]))
    # fitting a smoother tail than the data (nu > nu_true) blows the ratio up,
    # a rougher one sends it to zero
    assert priors.limiting_ratio_g(mixed, (1.0, 1.0, 2.0), (1.0, 1.0, 1.0)) == math.inf
    assert priors.limiting_ratio_g(mixed, (1.0, 1.0, 1.0), (1.0, 1.0, 2.0)) == 0.0
    assert limiting_objective("centred_limit", mixed, (1.0, 1.0, 2.0),
                              (1.0, 1.0, 1.0)) == math.inf
    assert limiting_objective("centred_limit", mixed, (1.0, 1.0, 1.0),
                              (1.0, 1.0, 2.0)) == math.inf
    assert limiting_objective("noncentred_limit", mixed, (1.0, 1.0, 2.0),
                              (1.0, 1.0, 1.0)) == math.inf
    assert limiting_objective("noncentred_limit", mixed, (1.0, 1.0, 1.0),
                              (1.0, 1.0, 2.0)) == 0.0


def test_cesaro_mean_at_truth_is_one():
    val = cesaro_b_mean(PRIOR, (1.0, 1.0), (1.0, 1.0), forward.deblurring(),
                        forward.decay_in_n(5.0), 500)
    assert val == 1.0


def test_cesaro_mean_converges_to_g():
    # decaying noise keeps every mode signal-dominated, so the mean tracks g=8
    val = cesaro_b_mean(PRIOR, (1.0, 2.0), (1.0, 1.0), forward.deblurring(),
                        forward.decay_in_n(5.0), 10**4)
    assert abs(val - 8.0) < 0.02 * 8.0
    # negative control: a fixed noise floor swamps both spectra in the tail
    flat = cesaro_b_mean(PRIOR, (1.0, 2.0), (1.0, 1.0), forward.deblurring(),
                         forward.fixed_noise(0.5), 10**4)
    assert abs(flat - 1.0) < 0.5


def test_margin_regimes():
    # normalized spectrum ~ j^{-4}; with a_j = j^{-2} the signal decays like
    # j^{-8}, so gamma_n = n^{-w} puts the margin at n^{2w-8}
    nprior = wm_prior("whittle_matern_normalized")
    fwd = forward.deblurring()
    ns = (10**2, 10**3, 10**4)

    def margins(w):
        rule = forward.decay_in_n(w)
        return [assumption_ii_margin(fwd, nprior, (1.0, 1.0), rule, n) for n in ns]

    up = margins(4.5)
    assert up[0] < up[1] < up[2]
    down = margins(3.5)
    assert down[0] > down[1] > down[2]
    flat = margins(4.0)
    assert 0.5 < flat[2] / flat[1] < 2.0
    assert assumption_ii_margin(fwd, nprior, (1.0, 1.0),
                                forward.fixed_noise(0.0), 10) == math.inf
