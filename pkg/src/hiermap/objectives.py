"""Hyperparameter objective functions for the diagonal hierarchical model.

Every objective here is a map ``theta -> float`` built from one observed
dataset.  Four variants are provided, selected by ``ObjectiveSpec.kind``:

``centred``
    Negative log joint density of ``(u, theta)`` with the unknown profiled
    out, normalized by ``1/n``.  Contains a ``log mu_j(theta)`` volume term,
    which is what makes the centred approach break down when the noise decays
    too fast relative to the observation operator.

``noncentred``
    Same data misfit but written in the whitened variables, where the volume
    term cancels.  Normalized by ``1/n``.

``empirical_bayes``
    Negative log marginal likelihood of ``y`` given ``theta`` (the unknown
    integrated out rather than profiled), normalized by ``1/n``.

``centred_full``
    Unnormalized centred objective whose volume term runs over the first
    ``nmax_full`` modes while the data misfit stays truncated at the ``n``
    observed ones.  With ``nmax_full == n`` this is exactly ``n`` times the
    ``centred`` value; larger ``nmax_full`` gives the untruncated-volume
    variant used in the truncation study.

All variants share the weights ``s_j(theta) = a_j^2 mu_j(theta) + gamma^2``.
With ``shifted=True`` (default) a ``theta``-independent constant is
subtracted so that the expected value at the generating hyperparameter is
``1/2``, matching the large-``n`` limits computed by
:func:`limiting_objective`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import priors
from .errors import DomainError
from .forward import Dataset, ForwardSpectrum, NoiseRule

OBJECTIVE_KINDS = ("centred", "noncentred", "empirical_bayes", "centred_full")
LIMIT_KINDS = ("centred_limit", "noncentred_limit")

_TINY = np.finfo(float).tiny


def _safe_log(x):
    # guard exact underflow to 0.0 (sharply decaying spectra at large j)
    return np.log(np.maximum(x, _TINY))


def s_weight(prior, forward, theta, gamma, j):
    """Marginal data variance ``a_j^2 mu_j(theta) + gamma^2`` of mode ``j``.

    ``j`` may be a scalar index (1-based) or an array of indices.
    """
    jarr = np.asarray(j)
    a = forward.coefficients(int(jarr.max()))
    mu = priors.eigenvalue(prior, theta, j)
    if jarr.ndim == 0:
        return float(a[int(j) - 1] ** 2 * mu + gamma**2)
    return a[jarr.astype(int) - 1] ** 2 * mu + gamma**2


class SpectralWeights(NamedTuple):
    s: np.ndarray  # s_j(theta) for j = 1..n
    b: np.ndarray  # s_j(theta_true) / s_j(theta)


def spectral_weights(prior, forward, theta, gamma, n, theta_true) -> SpectralWeights:
    """Weights ``s_j`` and ratios ``b_j`` against a reference hyperparameter.

    ``b_j = 1`` identically at ``theta == theta_true``; its Cesaro mean
    converges to the limiting spectral ratio ``g`` (see
    :func:`cesaro_b_mean`).
    """
    a2 = forward.coefficients(n) ** 2
    s = a2 * priors.eigenvalues(prior, theta, n) + gamma**2
    s_ref = a2 * priors.eigenvalues(prior, theta_true, n) + gamma**2
    return SpectralWeights(s=s, b=s_ref / s)


def rescale(value, epsilon: float, center: float = 0.0):
    """Monotone compression used for plotting wide-ranging objective values.

    Values above ``center`` are mapped through ``(v - center + 1)**epsilon``,
    values below through the tangent line ``1 + epsilon*(v - center)``; the
    two branches meet at ``(center, 1)`` with matching slope, so minimizers
    are preserved exactly.
    """
    if epsilon <= 0:
        raise DomainError("rescale epsilon must be positive")
    v = np.asarray(value, dtype=float)
    shifted = v - center
    above = np.power(np.maximum(shifted, 0.0) + 1.0, epsilon)
    below = 1.0 + epsilon * shifted
    out = np.where(shifted >= 0.0, above, below)
    if np.ndim(value) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class ObjectiveSpec:
    """A concrete objective: one dataset, one fitting prior, one variant.

    ``log_hyperprior`` is an optional callable ``theta -> float`` added as
    ``-(1/n) log rho0(theta)`` (``-log rho0`` for ``centred_full``); ``None``
    means a flat hyperprior.  ``rescale_epsilon``/``rescale_center`` apply
    :func:`rescale` to the final value.  ``nmax_full`` (``centred_full``
    only) extends the volume term past the observed modes and defaults to
    ``dataset.n``.
    """

    kind: str
    prior: priors.SpectralPrior
    dataset: Dataset
    log_hyperprior: Optional[Callable] = None
    rescale_epsilon: Optional[float] = None
    rescale_center: float = 0.0
    nmax_full: Optional[int] = None
    shifted: bool = True

    def __post_init__(self):
        if self.kind not in OBJECTIVE_KINDS:
            raise DomainError(f"unknown objective kind {self.kind!r}")
        if self.rescale_epsilon is not None and self.rescale_epsilon <= 0:
            raise DomainError("rescale_epsilon must be positive")
        if self.kind == "centred_full":
            nmax = self.nmax_full if self.nmax_full is not None else self.dataset.n
            if nmax < self.dataset.n:
                raise DomainError("nmax_full must be at least the number of observed modes")
        elif self.nmax_full is not None:
            raise DomainError("nmax_full only applies to the centred_full kind")


def _compile(spec: ObjectiveSpec) -> Callable:
    ds = spec.dataset
    n = ds.n
    y2 = ds.y**2
    a2 = ds.a**2
    gamma2 = ds.gamma**2
    prior = spec.prior
    logrho = spec.log_hyperprior

    if spec.kind == "centred_full":
        nmax = spec.nmax_full if spec.nmax_full is not None else n
        shift = 0.0
        if spec.shifted:
            # requires dataset.theta_true to be admissible for the fitting prior
            mu_ref = priors.eigenvalues(prior, ds.theta_true, nmax)
            shift = 0.5 * float(np.sum(_safe_log(mu_ref)))

        def raw(theta):
            mu = priors.eigenvalues(prior, theta, nmax)
            val = 0.5 * float(np.sum(y2 / (a2 * mu[:n] + gamma2)))
            val += 0.5 * float(np.sum(_safe_log(mu))) - shift
            if logrho is not None:
                val -= float(logrho(theta))
            return val

    else:
        if spec.kind == "centred":
            shift = 0.5 * float(np.sum(_safe_log(ds.mu_true))) if spec.shifted else 0.0
        elif spec.kind == "empirical_bayes":
            shift = (0.5 * float(np.sum(_safe_log(a2 * ds.mu_true + gamma2)))
                     if spec.shifted else 0.0)
        else:
            shift = 0.0
        kind = spec.kind

        def raw(theta):
            mu = priors.eigenvalues(prior, theta, n)
            s = a2 * mu + gamma2
            val = 0.5 * float(np.sum(y2 / s))
            if kind == "centred":
                val += 0.5 * float(np.sum(_safe_log(mu)))
            elif kind == "empirical_bayes":
                val += 0.5 * float(np.sum(_safe_log(s)))
            val = (val - shift) / n
            if logrho is not None:
                val -= float(logrho(theta)) / n
            return val

    if spec.rescale_epsilon is None:
        return raw
    eps = spec.rescale_epsilon
    center = spec.rescale_center

    def rescaled(theta):
        return rescale(raw(theta), eps, center)

    return rescaled


def evaluate(spec: ObjectiveSpec, theta) -> float:
    """Evaluate the objective at ``theta`` (sequence of free hyperparameters)."""
    fn = getattr(spec, "_compiled", None)
    if fn is None:
        fn = _compile(spec)
        object.__setattr__(spec, "_compiled", fn)
    return fn(np.asarray(theta, dtype=float))


def limiting_objective(kind: str, prior, theta, theta_true) -> float:
    """Large-``n`` limit of the centred or noncentred objective.

    Both limits depend on ``theta`` only through the spectral ratio
    ``g = lim_j mu_j(theta_true)/mu_j(theta)``:

    * ``noncentred_limit``: ``g/2`` — minimized by inflating the prior, which
      drives ``g`` to 0 and the minimizer to the domain boundary.
    * ``centred_limit``: ``g/2 - log(g)/2`` — uniquely minimized at ``g = 1``
      with value ``1/2``, and ``+inf`` when ``g`` degenerates to 0 or
      infinity.
    """
    if kind not in LIMIT_KINDS:
        raise DomainError(f"unknown limit kind {kind!r}")
    g = priors.limiting_ratio_g(prior, theta, theta_true)
    if kind == "noncentred_limit":
        return 0.5 * g
    if g == 0.0 or math.isinf(g):
        return math.inf
    return 0.5 * g - 0.5 * math.log(g)


def cesaro_b_mean(prior, theta, theta_true, forward: ForwardSpectrum,
                  noise_rule: NoiseRule, n: int) -> float:
    """Cesaro mean ``(1/n) sum_{j<=n} b_j`` of the weight ratios.

    When the noise level decays fast enough for the signal to dominate every
    retained mode, this converges to the limiting ratio ``g`` as ``n`` grows;
    with fixed noise it drifts toward 1 instead because the flat noise floor
    eventually swamps both spectra.
    """
    gamma = noise_rule.gamma_for(n)
    w = spectral_weights(prior, forward, theta, gamma, n, theta_true)
    return float(np.mean(w.b))


def assumption_ii_margin(forward: ForwardSpectrum, prior, theta,
                         noise_rule: NoiseRule, n: int) -> float:
    """Smallest signal-to-noise ratio ``a_j^2 mu_j(theta) / gamma_n^2`` over ``j <= n``.

    The centred approach needs this margin to stay bounded away from zero
    along the sequence of problems; a margin decaying to zero is the
    signature of the regime where the centred estimator stops converging.
    """
    gamma = noise_rule.gamma_for(n)
    signal = forward.coefficients(n) ** 2 * priors.eigenvalues(prior, theta, n)
    if gamma == 0.0:
        return math.inf
    return float(np.min(signal) / gamma**2)
