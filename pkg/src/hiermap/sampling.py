"""Monte Carlo estimation and sampling for the hierarchical model.

Three pieces:

* exact conjugate draws from the conditional posterior ``u | y, theta``
  (the model is diagonal, so this is a vectorized Gaussian sample);
* a Monte Carlo estimate of the marginal objective built from those draws,
  and the alternating scheme (:func:`run_em`) that re-draws and re-minimizes
  it — an importance-weight identity makes each inner problem a noisy copy
  of the marginal-likelihood objective, so the iterates track the direct
  empirical Bayes minimizer;
* Metropolis-within-Gibbs chains (:func:`run_gibbs`) over ``(u, theta)`` in
  the centred parameterization and over ``(xi, theta)`` in the noncentred
  one.  The centred theta-conditional concentrates as the number of observed
  modes grows, which collapses its random-walk acceptance rate; the
  noncentred chain keeps a bounded rate.  Comparing the two rates is the
  point of the acceptance-rate experiment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.special import logsumexp

from . import priors, streams
from .errors import DomainError, EvaluationError
from .forward import generate_data
from .optimize import ArgminReport, OptimizerConfig, minimize

GIBBS_VARIANTS = ("centred", "noncentred")
AVERAGING = ("last", "tail_mean")


def sample_conditional_posterior(prior, theta, dataset, m, seed, index=0):
    """Draw ``m`` exact samples of ``u | y, theta``; returns shape ``(m, n)``."""
    if m < 1:
        raise DomainError("need at least one sample")
    n = dataset.n
    mu = priors.eigenvalues(prior, theta, n)
    s = dataset.a**2 * mu + dataset.gamma**2
    mean = dataset.a * mu * dataset.y / s
    var = dataset.gamma**2 * mu / s
    rng = streams.generator(seed, streams.CONDITIONAL, index)
    z = streams.normals(rng, m * n).reshape(m, n)
    return mean + np.sqrt(var) * z


def mc_marginal_objective(prior, theta, theta_prime, samples, log_hyperprior=None):
    """Monte Carlo surrogate for the (unnormalized) marginal objective.

    With ``samples`` drawn from ``u | y, theta_prime`` the weights
    ``w_i = p(u_i | theta) / p(u_i | theta_prime)`` satisfy
    ``E[w] = p(y | theta) / p(y | theta_prime)``, so
    ``-logsumexp(log w) - log rho0(theta)`` estimates the negative log
    marginal posterior up to a ``theta``-independent constant.  At
    ``theta == theta_prime`` the value is exactly ``-log m - log rho0``.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise DomainError("need at least one conditional sample")
    theta = np.asarray(theta, dtype=float)
    n = samples.shape[1]
    mu = priors.eigenvalues(prior, theta, n)
    mu_p = priors.eigenvalues(prior, theta_prime, n)
    logw = (0.5 * samples**2 @ (1.0 / mu_p - 1.0 / mu)
            + 0.5 * float(np.sum(np.log(mu_p) - np.log(mu))))
    val = -float(logsumexp(logw))
    if log_hyperprior is not None:
        val -= float(log_hyperprior(theta))
    return val


def exact_em_objective(prior, theta, theta_prime, dataset, log_hyperprior=None):
    """Infinite-sample limit of :func:`mc_marginal_objective` (without the
    ``-log m`` offset), via the Gaussian identity
    ``E[exp(-c u^2 / 2)] = (1 + c v)^{-1/2} exp(-c m^2 / (2 (1 + c v)))``
    for ``u ~ N(m, v)``.  Always well defined because the conditional
    variance is strictly below the prior variance at ``theta_prime``.
    """
    n = dataset.n
    mu = priors.eigenvalues(prior, theta, n)
    mu_p = priors.eigenvalues(prior, theta_prime, n)
    s = dataset.a**2 * mu_p + dataset.gamma**2
    mean = dataset.a * mu_p * dataset.y / s
    var = dataset.gamma**2 * mu_p / s
    c = 1.0 / mu - 1.0 / mu_p
    denom = 1.0 + c * var
    val = float(np.sum(-0.5 * np.log(mu_p / mu) + 0.5 * np.log(denom)
                       + 0.5 * c * mean**2 / denom))
    if log_hyperprior is not None:
        val -= float(log_hyperprior(np.asarray(theta, dtype=float)))
    return val


def exact_em_step(prior, dataset, theta_prime, config: OptimizerConfig = None,
                  log_hyperprior=None) -> ArgminReport:
    """One alternating-minimization step with the Monte Carlo error removed."""
    fn = lambda th: exact_em_objective(prior, th, theta_prime, dataset,
                                       log_hyperprior)
    return minimize(fn, config, domain=prior.domain)


@dataclass(frozen=True)
class EmConfig:
    m_samples: int
    k_iters: int
    theta_init: tuple
    inner_optimizer: Optional[OptimizerConfig] = None
    averaging: str = "tail_mean"
    tail_fraction: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.m_samples < 1 or self.k_iters < 1:
            raise DomainError("m_samples and k_iters must be positive")
        if self.averaging not in AVERAGING:
            raise DomainError(f"unknown averaging {self.averaging!r}")
        if not 0.0 < self.tail_fraction <= 1.0:
            raise DomainError("tail_fraction must lie in (0, 1]")
        object.__setattr__(self, "theta_init", tuple(float(v) for v in self.theta_init))


class EmResult(NamedTuple):
    theta_hat: tuple
    thetas: np.ndarray  # iterates including the initial point


def run_em(spec, config: EmConfig, dataset=None) -> EmResult:
    """Alternate exact conditional draws with minimization of the Monte
    Carlo marginal objective.  Fresh draws (a new conditional stream index)
    are used at every iteration."""
    ds = dataset if dataset is not None else generate_data(spec, seed=config.seed)
    prior = spec.prior
    if not prior.domain.contains(config.theta_init):
        raise DomainError("theta_init lies outside the hyperparameter domain")
    logrho = spec.log_hyperprior
    theta = np.asarray(config.theta_init, dtype=float)
    thetas = [theta.copy()]
    for k in range(config.k_iters):
        samples = sample_conditional_posterior(prior, theta, ds,
                                               config.m_samples,
                                               seed=config.seed, index=k)
        fn = lambda th: mc_marginal_objective(prior, th, theta, samples, logrho)
        try:
            report = minimize(fn, config.inner_optimizer, domain=prior.domain)
        except EvaluationError as exc:
            exc.iteration = k
            raise
        theta = np.asarray(report.theta_hat, dtype=float)
        thetas.append(theta.copy())
    path = np.array(thetas)
    if config.averaging == "last":
        theta_hat = path[-1]
    else:
        tail = max(1, int(np.ceil(config.tail_fraction * config.k_iters)))
        theta_hat = path[1:][-tail:].mean(axis=0)
    return EmResult(theta_hat=tuple(float(v) for v in theta_hat), thetas=path)


# ---------------------------------------------------------------------------
# Metropolis-within-Gibbs


def pcn_propose(xi, beta, zeta):
    """Preserves the standard normal reference measure for any beta in (0, 1]."""
    return np.sqrt(1.0 - beta**2) * xi + beta * zeta


def _fold(x, lo, hi):
    # reflect a random-walk proposal back into the box; symmetric, so the
    # acceptance ratio needs no correction
    width = hi - lo
    y = np.mod(x - lo, 2.0 * width)
    y = np.where(y > width, 2.0 * width - y, y)
    return lo + y


@dataclass(frozen=True)
class GibbsConfig:
    variant: str
    n_steps: int
    pcn_beta: float = 0.2
    theta_proposal_std: float = 0.25
    theta_init: Optional[tuple] = None
    seed: int = 0

    def __post_init__(self):
        if self.variant not in GIBBS_VARIANTS:
            raise DomainError(f"unknown variant {self.variant!r}")
        if self.n_steps < 1:
            raise DomainError("n_steps must be positive")
        if not 0.0 < self.pcn_beta <= 1.0:
            raise DomainError("pcn_beta must lie in (0, 1]")
        if self.theta_proposal_std < 0.0:
            raise DomainError("theta_proposal_std must be nonnegative")
        if self.theta_init is not None:
            object.__setattr__(self, "theta_init",
                               tuple(float(v) for v in self.theta_init))


class ChainRecord(NamedTuple):
    thetas: np.ndarray
    accept_state: np.ndarray
    accept_theta: np.ndarray
    theta_rate: float
    state_rate: float
    u_mean: np.ndarray
    u_var: np.ndarray


def run_gibbs(spec, config: GibbsConfig, dataset=None) -> ChainRecord:
    """Run a Metropolis-within-Gibbs chain on the joint posterior.

    Each step makes one state move (exact conjugate resample of ``u`` in the
    centred variant, a pCN proposal on the whitened ``xi`` in the noncentred
    one) followed by one reflected random-walk move on ``theta``.  A zero
    ``theta_proposal_std`` freezes ``theta`` entirely: no proposals are
    attempted and the theta acceptance rate reports 0.
    """
    ds = dataset if dataset is not None else generate_data(spec, seed=config.seed)
    if ds.gamma <= 0:
        raise DomainError("the joint chains need a positive noise level")
    prior = spec.prior
    logrho = spec.log_hyperprior or (lambda th: 0.0)
    n = ds.n
    a, y, gamma2 = ds.a, ds.y, ds.gamma**2
    lo, hi = prior.domain.arrays()
    theta = np.asarray(config.theta_init if config.theta_init is not None
                       else spec.theta_true, dtype=float)
    if not prior.domain.contains(theta):
        raise DomainError("theta_init lies outside the hyperparameter domain")
    rng = streams.generator(config.seed, streams.GIBBS)
    std = config.theta_proposal_std
    beta = config.pcn_beta
    centred = config.variant == "centred"

    mu = priors.eigenvalues(prior, theta, n)
    if centred:
        u = np.sqrt(mu) * streams.normals(rng, n)
    else:
        xi = streams.normals(rng, n)

    def phi(u_vec):
        return 0.5 * float(np.sum((y - a * u_vec) ** 2)) / gamma2

    steps = config.n_steps
    thetas = np.empty((steps + 1, len(theta)))
    thetas[0] = theta
    accept_state = np.zeros(steps, dtype=bool)
    accept_theta = np.zeros(steps, dtype=bool)
    u_sum = np.zeros(n)
    u_sumsq = np.zeros(n)

    for k in range(steps):
        if centred:
            s = a**2 * mu + gamma2
            mean = a * mu * y / s
            var = gamma2 * mu / s
            u = mean + np.sqrt(var) * streams.normals(rng, n)
            accept_state[k] = True
        else:
            zeta = streams.normals(rng, n)
            xi_prop = pcn_propose(xi, beta, zeta)
            sq = np.sqrt(mu)
            log_alpha = phi(sq * xi) - phi(sq * xi_prop)
            if np.log(rng.random()) < log_alpha:
                xi = xi_prop
                accept_state[k] = True

        if std > 0.0:
            prop = _fold(theta + std * streams.normals(rng, len(theta)), lo, hi)
            mu_prop = priors.eigenvalues(prior, prop, n)
            if centred:
                log_alpha = 0.5 * float(np.sum(np.log(mu / mu_prop)
                                               + u**2 * (1.0 / mu - 1.0 / mu_prop)))
            else:
                log_alpha = phi(np.sqrt(mu) * xi) - phi(np.sqrt(mu_prop) * xi)
            log_alpha += float(logrho(prop)) - float(logrho(theta))
            if np.log(rng.random()) < log_alpha:
                theta, mu = prop, mu_prop
                accept_theta[k] = True

        thetas[k + 1] = theta
        u_now = u if centred else np.sqrt(mu) * xi
        u_sum += u_now
        u_sumsq += u_now**2

    u_mean = u_sum / steps
    return ChainRecord(
        thetas=thetas,
        accept_state=accept_state,
        accept_theta=accept_theta,
        theta_rate=float(accept_theta.mean()) if std > 0.0 else 0.0,
        state_rate=float(accept_state.mean()),
        u_mean=u_mean,
        u_var=u_sumsq / steps - u_mean**2,
    )


def save_chain_trace(result, path):
    """Write a chain or alternating-minimization trace as CSV.

    Columns are ``k,theta_1[,theta_2,...],accept_state,accept_theta`` (the
    accept columns are all 1 for :class:`EmResult`, whose inner steps always
    succeed).  A ``<path>.summary.json`` sidecar records acceptance rates and
    the final estimate.
    """
    import csv
    import json
    from pathlib import Path

    path = Path(path)
    if isinstance(result, ChainRecord):
        thetas = result.thetas
        acc_state = np.concatenate([[1], result.accept_state.astype(int)])
        acc_theta = np.concatenate([[1], result.accept_theta.astype(int)])
        summary = {"theta_rate": result.theta_rate,
                   "state_rate": result.state_rate,
                   "final": [float(v) for v in thetas[-1]]}
    elif isinstance(result, EmResult):
        thetas = result.thetas
        acc_state = np.ones(len(thetas), dtype=int)
        acc_theta = np.ones(len(thetas), dtype=int)
        summary = {"theta_hat": list(result.theta_hat)}
    else:
        raise DomainError("result must be a ChainRecord or EmResult")
    dim = thetas.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k"] + [f"theta_{i + 1}" for i in range(dim)]
                        + ["accept_state", "accept_theta"])
        for k in range(len(thetas)):
            writer.writerow([k] + [repr(float(v)) for v in thetas[k]]
                            + [int(acc_state[k]), int(acc_theta[k])])
    path.with_name(path.name + ".summary.json").write_text(
        json.dumps(summary, indent=2) + "\n")
