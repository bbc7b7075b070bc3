"""Prior covariance spectra diagonalized in a Laplacian eigenbasis.

This module defines

- :class:`LaplacianSpectrum`: eigenvalue sequences ``lambda_j`` of the
  negative Laplacian on the unit interval / box under the supported
  boundary conditions;
- :class:`HyperDomain`: the compact hyperparameter box ``Theta``;
- :class:`SpectralPrior`: a parametric family ``theta -> {mu_j(theta)}`` of
  prior covariance eigenvalues;
- pointwise covariance kernels (:func:`kernel_value`) for the stationary
  families used in path sampling;
- the limiting eigenvalue ratio ``g(theta, theta_true)`` that controls
  identifiability (:func:`limiting_ratio_g`).

Families
--------
``whittle_matern``
    ``mu_j = sigma^2 ell^(-2 nu) (lambda_j + ell^(-2))^(-nu)``.  The
    convention used by the bundled experiments.
``whittle_matern_normalized``
    ``mu_j = kappa(nu) sigma^2 ell^d (1 + ell^2 lambda_j)^(-nu - d/2)`` with
    ``kappa(nu) = Gamma(nu + d/2) (4 pi)^(d/2) / Gamma(nu)``, i.e. the
    variance-normalized convention.
``whittle_matern_beta``
    Reparameterization ``theta = (sigma, beta)`` with ``beta = sigma
    ell^(-nu)``: ``mu_j = kappa(nu) beta^2 ((beta/sigma)^(2/nu) +
    lambda_j)^(-nu - d/2)``.  ``beta`` is identifiable where ``(sigma,
    ell)`` individually are not.
``ard``
    Anisotropic squared-exponential on ``(0,1)^d`` with Dirichlet
    conditions: ``mu_{i_1..i_d} = sigma^2 exp(-pi^2 sum_k theta_k^2
    i_k^2)``.  Single-index access sweeps one coordinate of the
    multi-index (``sweep_axis``) with the others pinned at 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from scipy.special import digamma

from .errors import DomainError, UnsupportedParameterError

FAMILIES = (
    "whittle_matern",
    "whittle_matern_normalized",
    "whittle_matern_beta",
    "ard",
)

BOUNDARY_KINDS = ("neumann1d", "dirichlet1d", "periodic1d", "dirichlet_box")


# ---------------------------------------------------------------------------
# Laplacian spectra


@lru_cache(maxsize=64)
def _lambda_array(kind: str, d: int, n: int) -> np.ndarray:
    """First ``n`` negative-Laplacian eigenvalues, ascending, read-only."""
    if kind in ("neumann1d", "dirichlet1d"):
        j = np.arange(1, n + 1, dtype=float)
        lam = np.pi**2 * j**2
    elif kind == "periodic1d":
        j = np.arange(1, n + 1)
        # zero-mean periodic functions: each frequency m >= 1 carries a
        # sine and a cosine mode, both with eigenvalue 4 pi^2 m^2
        m = (j + 1) // 2
        lam = 4.0 * np.pi**2 * m.astype(float) ** 2
    elif kind == "dirichlet_box":
        lam = np.pi**2 * _sorted_index_norms(d, n)
    else:
        raise DomainError(f"unknown boundary kind {kind!r}")
    lam.flags.writeable = False
    return lam


def _sorted_index_norms(d: int, n: int) -> np.ndarray:
    """The n smallest values of sum_k i_k^2 over positive multi-indices."""
    bound = d
    while True:
        m = int(math.isqrt(bound))
        norms = []
        for idx in itertools.product(range(1, m + 1), repeat=d):
            s = sum(i * i for i in idx)
            if s <= bound:
                norms.append(s)
        if len(norms) >= n:
            norms.sort()
            return np.asarray(norms[:n], dtype=float)
        bound *= 2


@dataclass(frozen=True)
class LaplacianSpectrum:
    """Eigenvalue sequence ``j -> lambda_j`` of the negative Laplacian.

    ``lambda_j`` is nondecreasing, tends to infinity, and grows like
    ``j^(2/d)``.  Values are dimensionless.
    """

    d: int
    kind: str

    def __post_init__(self):
        if self.kind not in BOUNDARY_KINDS:
            raise DomainError(f"unknown boundary kind {self.kind!r}")
        if self.d < 1:
            raise DomainError("spatial dimension must be positive")
        if self.kind.endswith("1d") and self.d != 1:
            raise DomainError(f"{self.kind} requires d=1")

    def eigenvalues(self, n: int) -> np.ndarray:
        """lambda_1 .. lambda_n as a read-only ascending array."""
        if n < 1:
            raise DomainError("n must be >= 1")
        return _lambda_array(self.kind, self.d, int(n))

    def eigenvalue(self, j: int) -> float:
        if j < 1:
            raise DomainError("index j must be >= 1")
        return float(self.eigenvalues(int(j))[-1])


def neumann1d() -> LaplacianSpectrum:
    """Zero-mean Neumann Laplacian on (0,1): lambda_j = pi^2 j^2."""
    return LaplacianSpectrum(d=1, kind="neumann1d")


def dirichlet1d() -> LaplacianSpectrum:
    return LaplacianSpectrum(d=1, kind="dirichlet1d")


def periodic1d() -> LaplacianSpectrum:
    return LaplacianSpectrum(d=1, kind="periodic1d")


def dirichlet_box(d: int) -> LaplacianSpectrum:
    """Dirichlet Laplacian on (0,1)^d, eigenvalues sorted ascending."""
    return LaplacianSpectrum(d=d, kind="dirichlet_box")


# ---------------------------------------------------------------------------
# Hyperparameter domain


@dataclass(frozen=True)
class HyperDomain:
    """Compact box ``prod_k [lower_k, upper_k]`` with 0 < lower < upper."""

    lower: tuple
    upper: tuple

    def __init__(self, lower: Sequence[float], upper: Sequence[float]):
        lo = tuple(float(x) for x in np.atleast_1d(lower))
        hi = tuple(float(x) for x in np.atleast_1d(upper))
        if len(lo) != len(hi):
            raise DomainError("lower/upper must have equal length")
        for a, b in zip(lo, hi):
            if not (0.0 < a < b < math.inf):
                raise DomainError(
                    f"need 0 < lower < upper < inf componentwise, got [{a}, {b}]"
                )
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def arrays(self):
        return np.asarray(self.lower), np.asarray(self.upper)

    def contains(self, theta, strict: bool = False) -> bool:
        t = np.atleast_1d(np.asarray(theta, dtype=float))
        if t.shape != (self.dim,):
            return False
        lo, hi = self.arrays()
        if strict:
            return bool(np.all(t > lo) and np.all(t < hi))
        return bool(np.all(t >= lo) and np.all(t <= hi))

    def clip(self, theta) -> np.ndarray:
        lo, hi = self.arrays()
        return np.clip(np.atleast_1d(np.asarray(theta, dtype=float)), lo, hi)


# ---------------------------------------------------------------------------
# Spectral prior families

_FAMILY_PARAMS = {
    "whittle_matern": {"sigma", "ell", "ell_inv", "nu"},
    "whittle_matern_normalized": {"sigma", "ell", "ell_inv", "nu"},
    "whittle_matern_beta": {"sigma", "beta", "nu"},
    "ard": None,  # sigma plus theta1..thetad, validated dynamically
}


def kappa(nu: float, d: int) -> float:
    """Normalizing constant Gamma(nu + d/2) (4 pi)^(d/2) / Gamma(nu)."""
    if nu <= 0:
        raise DomainError("nu must be positive")
    return math.exp(
        math.lgamma(nu + d / 2.0) - math.lgamma(nu) + (d / 2.0) * math.log(4.0 * math.pi)
    )


@dataclass(frozen=True)
class SpectralPrior:
    """Parametric family ``theta -> {mu_j(theta)}`` of covariance eigenvalues.

    Parameters
    ----------
    spectrum : LaplacianSpectrum
        Supplies ``lambda_j`` (unused by the ``ard`` family, which works on
        multi-indices directly, but fixes ``d``).
    family : str
        One of :data:`FAMILIES`.
    fixed : mapping
        Frozen hyperparameters, e.g. ``{"nu": 1.5, "sigma": 1.0}``.
    free : tuple of str
        Ordered names of the free hyperparameters; the ``theta`` vector
        passed to every operation follows this order.  ``"ell_inv"`` may be
        used in place of ``"ell"`` to parameterize by inverse length-scale.
    domain : HyperDomain
        Compact box for the free parameters.
    sweep_axis : int
        For ``ard`` only: the multi-index coordinate swept by the single
        index ``j`` (the others are pinned at 1).
    """

    spectrum: LaplacianSpectrum
    family: str
    fixed: Mapping[str, float]
    free: tuple
    domain: HyperDomain
    sweep_axis: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}")
        object.__setattr__(self, "free", tuple(self.free))
        object.__setattr__(self, "fixed", dict(self.fixed))
        if self.domain.dim != len(self.free):
            raise DomainError("domain dimension != number of free parameters")
        names = set(self.fixed) | set(self.free)
        if self.family == "ard":
            d = self.spectrum.d
            expected = {"sigma"} | {f"theta{k + 1}" for k in range(d)}
            if names != expected:
                raise DomainError(f"ard parameters must be exactly {sorted(expected)}")
            if not 0 <= self.sweep_axis < d:
                raise DomainError("sweep_axis out of range")
        else:
            allowed = _FAMILY_PARAMS[self.family]
            if not names <= allowed:
                raise DomainError(f"unknown parameters {sorted(names - allowed)}")
            if "ell" in names and "ell_inv" in names:
                raise DomainError("give either ell or ell_inv, not both")
            if self.family == "whittle_matern_beta":
                if not {"sigma", "beta", "nu"} <= names:
                    raise DomainError("beta family needs sigma, beta and nu")
                if "nu" in self.free:
                    raise UnsupportedParameterError(
                        "nu must be fixed in the (sigma, beta) parameterization"
                    )
            else:
                if not {"sigma", "nu"} <= names or not ({"ell", "ell_inv"} & names):
                    raise DomainError(f"{self.family} needs sigma, nu and ell(_inv)")
        for k in self.fixed:
            if k in self.free:
                raise DomainError(f"parameter {k!r} is both fixed and free")

    # -- parameter plumbing -------------------------------------------------

    def params(self, theta) -> dict:
        """Merge fixed values with the free vector ``theta`` (domain-checked)."""
        t = np.atleast_1d(np.asarray(theta, dtype=float))
        if not self.domain.contains(t):
            raise DomainError(f"theta {t} outside the hyperparameter box")
        p = dict(self.fixed)
        p.update(zip(self.free, t))
        if "ell_inv" in p:
            p["ell"] = 1.0 / p.pop("ell_inv")
        return p

    @property
    def dim(self) -> int:
        return len(self.free)


# -- eigenvalue evaluation ---------------------------------------------------


def _mu_from_params(prior: SpectralPrior, p: dict, lam_or_j) -> np.ndarray:
    d = prior.spectrum.d
    if prior.family == "whittle_matern":
        t = 1.0 / p["ell"]
        return p["sigma"] ** 2 * t ** (2 * p["nu"]) * (lam_or_j + t * t) ** (-p["nu"])
    if prior.family == "whittle_matern_normalized":
        t = 1.0 / p["ell"]
        nu = p["nu"]
        return (
            kappa(nu, d)
            * p["sigma"] ** 2
            * t ** (2 * nu)
            * (lam_or_j + t * t) ** (-nu - d / 2.0)
        )
    if prior.family == "whittle_matern_beta":
        nu = p["nu"]
        q = (p["beta"] / p["sigma"]) ** (2.0 / nu)
        return kappa(nu, d) * p["beta"] ** 2 * (lam_or_j + q) ** (-nu - d / 2.0)
    # ard: lam_or_j is the swept index j itself
    j = lam_or_j
    th = np.array([p[f"theta{k + 1}"] for k in range(d)])
    rest = float(np.sum(th**2)) - th[prior.sweep_axis] ** 2
    s2 = rest + th[prior.sweep_axis] ** 2 * np.asarray(j, dtype=float) ** 2
    return p["sigma"] ** 2 * np.exp(-np.pi**2 * s2)


def eigenvalue(prior: SpectralPrior, theta, j):
    """Prior covariance eigenvalue ``mu_j(theta)``.

    ``j`` may be a positive integer or an array of them; the return value
    matches its shape.
    """
    jarr = np.atleast_1d(np.asarray(j))
    if np.any(jarr < 1):
        raise DomainError("index j must be >= 1")
    jarr = jarr.astype(int)
    p = prior.params(theta)
    if prior.family == "ard":
        arg = jarr.astype(float)
    else:
        lam_all = prior.spectrum.eigenvalues(int(jarr.max()))
        arg = lam_all[jarr - 1]
    mu = _mu_from_params(prior, p, arg)
    return float(mu[0]) if np.ndim(j) == 0 else mu


def eigenvalues(prior: SpectralPrior, theta, n: int) -> np.ndarray:
    """Vector ``(mu_1(theta), ..., mu_n(theta))``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    p = prior.params(theta)
    if prior.family == "ard":
        arg = np.arange(1, n + 1, dtype=float)
    else:
        arg = prior.spectrum.eigenvalues(int(n))
    return _mu_from_params(prior, p, arg)


def ard_eigenvalue(prior: SpectralPrior, theta, index: Sequence[int]) -> float:
    """ARD eigenvalue at an explicit multi-index ``(i_1, ..., i_d)``."""
    if prior.family != "ard":
        raise UnsupportedParameterError("multi-index access is ard-only")
    idx = np.asarray(index, dtype=float)
    if idx.shape != (prior.spectrum.d,) or np.any(idx < 1):
        raise DomainError("index must be a positive multi-index of length d")
    p = prior.params(theta)
    th = np.array([p[f"theta{k + 1}"] for k in range(prior.spectrum.d)])
    return float(p["sigma"] ** 2 * math.exp(-math.pi**2 * float(np.sum(th**2 * idx**2))))


def log_eigenvalue_gradient(prior: SpectralPrior, theta, j):
    """Analytic gradient ``d/dtheta log mu_j(theta)`` w.r.t. the free vector.

    Requires ``theta`` strictly interior to the box.  For scalar ``j``
    returns shape ``(k,)``; for an array of indices, shape ``(len(j), k)``.
    """
    t_vec = np.atleast_1d(np.asarray(theta, dtype=float))
    if not prior.domain.contains(t_vec, strict=True):
        raise DomainError("gradient requires theta strictly inside the box")
    jarr = np.atleast_1d(np.asarray(j)).astype(int)
    if np.any(jarr < 1):
        raise DomainError("index j must be >= 1")
    p = prior.params(t_vec)
    d = prior.spectrum.d

    if prior.family == "ard":
        jf = jarr.astype(float)
        cols = {}
        for k in range(d):
            ik2 = jf**2 if k == prior.sweep_axis else np.ones_like(jf)
            cols[f"theta{k + 1}"] = -2.0 * np.pi**2 * p[f"theta{k + 1}"] * ik2
        cols["sigma"] = np.full_like(jf, 2.0 / p["sigma"])
        grad = np.stack([cols[name] for name in prior.free], axis=-1)
        return grad[0] if np.ndim(j) == 0 else grad

    lam = prior.spectrum.eigenvalues(int(jarr.max()))[jarr - 1].astype(float)
    nu = p["nu"]
    cols = {}
    if prior.family == "whittle_matern_beta":
        sig, beta = p["sigma"], p["beta"]
        q = (beta / sig) ** (2.0 / nu)
        frac = q / (q + lam)
        cols["beta"] = 2.0 / beta - (nu + d / 2.0) * (2.0 / nu) * frac / beta
        cols["sigma"] = (nu + d / 2.0) * (2.0 / nu) * frac / sig
    else:
        t = 1.0 / p["ell"]
        if prior.family == "whittle_matern":
            expo = nu
            dnu = -(np.log(lam + t * t) - 2.0 * math.log(t))
        else:
            expo = nu + d / 2.0
            dnu = (
                digamma(nu + d / 2.0)
                - digamma(nu)
                + 2.0 * math.log(t)
                - np.log(lam + t * t)
            )
        dt = 2.0 * nu / t - 2.0 * expo * t / (lam + t * t)
        cols["sigma"] = np.full_like(lam, 2.0 / p["sigma"])
        cols["ell_inv"] = dt
        cols["ell"] = -(t * t) * dt
        cols["nu"] = dnu
    grad = np.stack([cols[name] for name in prior.free], axis=-1)
    return grad[0] if np.ndim(j) == 0 else grad


# ---------------------------------------------------------------------------
# Pointwise kernels (stationary, for path sampling)

KERNEL_KINDS = ("ou", "squared_exponential", "matern")


def kernel_value(kind: str, params: Mapping[str, float], x, xp):
    """Stationary covariance ``c(x, x')``.

    ``params`` holds ``sigma`` and ``ell`` (and ``nu`` for ``matern``).
    The Matern family uses the half-integer closed forms with distance
    scaled as ``r / ell`` (no sqrt(2 nu) factor), so ``nu = 1/2`` equals
    the OU kernel exactly.
    """
    sigma = float(params["sigma"])
    ell = float(params["ell"])
    if sigma <= 0 or ell <= 0:
        raise DomainError("sigma and ell must be positive")
    r = np.abs(np.asarray(x, dtype=float) - np.asarray(xp, dtype=float))
    z = r / ell
    if kind == "ou":
        return sigma**2 * np.exp(-z)
    if kind == "squared_exponential":
        return sigma**2 * np.exp(-0.5 * z**2)
    if kind == "matern":
        nu = float(params["nu"])
        if nu == 0.5:
            poly = 1.0
        elif nu == 1.5:
            poly = 1.0 + z
        elif nu == 2.5:
            poly = 1.0 + z + z**2 / 3.0
        else:
            raise UnsupportedParameterError(
                f"matern kernel implemented for half-integer nu 0.5, 1.5, 2.5; got {nu}"
            )
        return sigma**2 * poly * np.exp(-z)
    raise UnsupportedParameterError(f"unknown kernel kind {kind!r}")


# ---------------------------------------------------------------------------
# Limiting eigenvalue ratio


def limiting_ratio_g(prior: SpectralPrior, theta, theta_true) -> float:
    """``g(theta, theta_true) = lim_j mu_j(theta_true) / mu_j(theta)``.

    Returns ``0.0`` or ``math.inf`` when the ratio degenerates (regularity
    mismatch, or an ARD length-scale mismatch on the swept coordinate);
    otherwise the finite closed-form limit.
    """
    p = prior.params(theta)
    pt = prior.params(theta_true)
    if prior.family == "ard":
        k = prior.sweep_axis
        name = f"theta{k + 1}"
        tk, tk_true = p[name], pt[name]
        if tk_true > tk:
            return 0.0
        if tk_true < tk:
            return math.inf
        d = prior.spectrum.d
        rest = sum(
            pt[f"theta{m + 1}"] ** 2 - p[f"theta{m + 1}"] ** 2
            for m in range(d)
            if m != k
        )
        return (pt["sigma"] / p["sigma"]) ** 2 * math.exp(-math.pi**2 * rest)
    if prior.family == "whittle_matern_beta":
        return (pt["beta"] / p["beta"]) ** 2
    # both Whittle-Matern conventions share the closed form when nu matches
    if pt["nu"] > p["nu"]:
        return 0.0
    if pt["nu"] < p["nu"]:
        return math.inf
    nu = p["nu"]
    return (pt["sigma"] / p["sigma"]) ** 2 * (p["ell"] / pt["ell"]) ** (2 * nu)
