"""Forward-map spectra, synthetic observations, and the diagonal conjugate posterior.

The observation model is, coefficientwise in the shared eigenbasis,

    y_j = a_j u_j + gamma eta_j,   j = 1..N,

with ``u`` drawn from the prior at the true hyperparameter.  Data can be
generated in two equivalent representations:

- ``"centred"``: draw the truth ``u`` explicitly and add noise;
- ``"noncentred"``: draw ``y_j = sqrt(a_j^2 mu_j(theta_true) + gamma^2) xi_j``
  with white ``xi`` (same distribution, no explicit truth realization; the
  stored ``truth_coeffs`` are then an independent reference draw from the
  prior, not coupled to ``y``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import streams
from .errors import DomainError
from .priors import SpectralPrior, eigenvalues

FORWARD_KINDS = ("deblurring", "power_law", "identity", "custom")
NOISE_KINDS = ("fixed", "decay_in_n", "obs_in_gamma")
REPRESENTATIONS = ("centred", "noncentred")


@lru_cache(maxsize=64)
def _power_array(power: float, n: int) -> np.ndarray:
    a = np.arange(1, n + 1, dtype=float) ** (-power)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ForwardSpectrum:
    """Diagonal forward-map coefficients ``a_j > 0``."""

    kind: str
    power: Optional[float] = None
    table: Optional[tuple] = None
    description: str = ""

    def __post_init__(self):
        if self.kind not in FORWARD_KINDS:
            raise DomainError(f"unknown forward kind {self.kind!r}")
        if self.kind == "power_law" and (self.power is None or self.power <= 0):
            raise DomainError("power_law requires a positive exponent")
        if self.kind == "custom":
            if not self.table:
                raise DomainError("custom spectrum requires a coefficient table")
            tab = tuple(float(v) for v in self.table)
            if any(v < 0 for v in tab):
                raise DomainError("forward coefficients must be nonnegative")
            object.__setattr__(self, "table", tab)

    def coefficients(self, n: int) -> np.ndarray:
        if n < 1:
            raise DomainError("n must be >= 1")
        if self.kind == "identity":
            return np.ones(n)
        if self.kind == "deblurring":
            return _power_array(2.0, int(n))
        if self.kind == "power_law":
            return _power_array(float(self.power), int(n))
        if len(self.table) < n:
            raise DomainError(f"custom table has {len(self.table)} < {n} entries")
        return np.asarray(self.table[:n])


def deblurring() -> ForwardSpectrum:
    """a_j = j^(-2): the inverse of a second-order smoothing operator."""
    return ForwardSpectrum(kind="deblurring", description="a_j = j^-2 blurring")


def power_law(a: float) -> ForwardSpectrum:
    return ForwardSpectrum(kind="power_law", power=float(a),
                           description=f"a_j = j^-{a}")


def identity() -> ForwardSpectrum:
    return ForwardSpectrum(kind="identity", description="a_j = 1")


def custom(table) -> ForwardSpectrum:
    return ForwardSpectrum(kind="custom", table=tuple(table),
                           description="tabulated spectrum")


@dataclass(frozen=True)
class NoiseRule:
    """Noise level as a function of the truncation level (or vice versa).

    ``fixed``: constant ``gamma`` (``gamma = 0`` is allowed for noiseless
    diagnostics even though production rules keep it positive).
    ``decay_in_n``: ``gamma_N = N^(-w)``.
    ``obs_in_gamma``: the driver is ``gamma``; the number of observations is
    ``N_gamma = ceil(gamma^(-1/w))``.
    """

    kind: str
    gamma: Optional[float] = None
    w: Optional[float] = None

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise DomainError(f"unknown noise kind {self.kind!r}")
        if self.kind == "fixed":
            if self.gamma is None or self.gamma < 0:
                raise DomainError("fixed noise requires gamma >= 0")
        elif self.w is None or self.w <= 0:
            raise DomainError(f"{self.kind} requires w > 0")

    def gamma_for(self, n: int) -> float:
        if n < 1:
            raise DomainError("n must be >= 1")
        if self.kind == "fixed":
            return float(self.gamma)
        return float(n) ** -float(self.w)

    def n_for_gamma(self, gamma: float) -> int:
        if self.kind != "obs_in_gamma":
            raise DomainError("n_for_gamma applies to obs_in_gamma rules only")
        if gamma <= 0:
            raise DomainError("gamma must be positive")
        return int(math.ceil(gamma ** (-1.0 / float(self.w))))


def fixed_noise(gamma: float) -> NoiseRule:
    return NoiseRule(kind="fixed", gamma=float(gamma))


def decay_in_n(w: float) -> NoiseRule:
    return NoiseRule(kind="decay_in_n", w=float(w))


def obs_in_gamma(w: float) -> NoiseRule:
    return NoiseRule(kind="obs_in_gamma", w=float(w))


@dataclass(frozen=True)
class ProblemSpec:
    """Everything needed to synthesize one dataset and define its objectives."""

    prior: SpectralPrior
    forward: ForwardSpectrum
    noise: NoiseRule
    n: int
    theta_true: tuple
    log_hyperprior: Optional[Callable] = None  # None means flat on the box
    representation: str = "noncentred"

    def __post_init__(self):
        object.__setattr__(
            self, "theta_true",
            tuple(float(v) for v in np.atleast_1d(self.theta_true)),
        )
        if self.n < 1:
            raise DomainError("truncation level n must be >= 1")
        if self.representation not in REPRESENTATIONS:
            raise DomainError(f"unknown representation {self.representation!r}")
        if not self.prior.domain.contains(self.theta_true):
            raise DomainError("theta_true outside the hyperparameter box")


@dataclass(frozen=True)
class Dataset:
    """Observation coefficients plus the quantities that generated them.

    ``a`` and ``mu_true`` (the forward coefficients and the prior
    eigenvalues at ``theta_true``) are carried along so downstream
    objectives never have to re-derive truth quantities.  Regenerating with
    the same seed reproduces ``y`` bit-identically.
    """

    n: int
    gamma: float
    y: np.ndarray
    truth_coeffs: np.ndarray
    theta_true: tuple
    seed: int
    representation: str
    a: np.ndarray
    mu_true: np.ndarray

    def __post_init__(self):
        for name in ("y", "truth_coeffs", "a", "mu_true"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(
            self, "theta_true",
            tuple(float(v) for v in np.atleast_1d(self.theta_true)),
        )
        if not (len(self.y) == len(self.truth_coeffs) == self.n):
            raise DomainError("y and truth_coeffs must have length n")


def sample_truth(prior: SpectralPrior, theta_true, n: int, seed: int) -> np.ndarray:
    """Draw ``u_j = sqrt(mu_j(theta_true)) z_j`` from the truth stream."""
    mu = eigenvalues(prior, theta_true, n)
    rng = streams.generator(seed, streams.TRUTH)
    return np.sqrt(mu) * streams.normals(rng, n)


def generate_data(spec: ProblemSpec, seed: int) -> Dataset:
    """Synthesize a :class:`Dataset` from ``spec`` deterministically in ``seed``."""
    n = spec.n
    gamma = spec.noise.gamma_for(n)
    a = spec.forward.coefficients(n)
    mu_true = eigenvalues(spec.prior, spec.theta_true, n)
    truth = sample_truth(spec.prior, spec.theta_true, n, seed)
    if spec.representation == "centred":
        eta = streams.normals(streams.generator(seed, streams.NOISE), n)
        y = a * truth + gamma * eta
    else:
        xi = streams.normals(streams.generator(seed, streams.XI), n)
        y = np.sqrt(a**2 * mu_true + gamma**2) * xi
    return Dataset(
        n=n, gamma=gamma, y=y, truth_coeffs=truth,
        theta_true=spec.theta_true, seed=int(seed),
        representation=spec.representation, a=a, mu_true=mu_true,
    )


def posterior_mean_coeff(prior: SpectralPrior, theta, dataset: Dataset) -> np.ndarray:
    """Posterior mean ``u_j(theta) = a_j mu_j(theta) y_j / s_j(theta)``.

    This is also the minimizer of the state objective at fixed ``theta``,
    in either parameterization.  At ``gamma = 0`` it reduces to exact
    inversion ``y_j / a_j``.
    """
    mu = eigenvalues(prior, theta, dataset.n)
    s = dataset.a**2 * mu + dataset.gamma**2
    return dataset.a * mu * dataset.y / s


def posterior_variance_coeff(prior: SpectralPrior, theta, dataset: Dataset) -> np.ndarray:
    """Diagonal posterior variance ``gamma^2 mu_j(theta) / s_j(theta)``."""
    mu = eigenvalues(prior, theta, dataset.n)
    s = dataset.a**2 * mu + dataset.gamma**2
    return dataset.gamma**2 * mu / s


# ---------------------------------------------------------------------------
# Serialization: CSV table plus a TOML metadata sidecar


def save_dataset(dataset: Dataset, path, family: str = "") -> None:
    """Write ``<path>`` as CSV and ``<path>.meta.toml`` alongside it."""
    import csv
    from pathlib import Path

    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["j", "a_j", "mu_j_true", "y_j", "u_true_j"])
        for j in range(dataset.n):
            writer.writerow([
                j + 1, repr(float(dataset.a[j])), repr(float(dataset.mu_true[j])),
                repr(float(dataset.y[j])), repr(float(dataset.truth_coeffs[j])),
            ])
    theta = ", ".join(repr(float(v)) for v in dataset.theta_true)
    sidecar = (
        f"seed = {dataset.seed}\n"
        f"theta_true = [{theta}]\n"
        f"gamma = {float(dataset.gamma)!r}\n"
        f"n = {dataset.n}\n"
        f'family = "{family}"\n'
        f'representation = "{dataset.representation}"\n'
    )
    path.with_name(path.name + ".meta.toml").write_text(sidecar)


def load_dataset(path):
    """Inverse of :func:`save_dataset`; returns ``(Dataset, family)``."""
    import csv
    from pathlib import Path

    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib

    path = Path(path)
    meta = tomllib.loads(path.with_name(path.name + ".meta.toml").read_text())
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = [[float(v) for v in row[1:]] for row in reader]
    cols = np.asarray(rows).T
    dataset = Dataset(
        n=meta["n"], gamma=meta["gamma"], y=cols[2], truth_coeffs=cols[3],
        theta_true=tuple(meta["theta_true"]), seed=meta["seed"],
        representation=meta["representation"], a=cols[0], mu_true=cols[1],
    )
    return dataset, meta["family"]
