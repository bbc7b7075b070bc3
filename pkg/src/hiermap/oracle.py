"""Dense-matrix reference implementations.

The production code in :mod:`hiermap.objectives` and :mod:`hiermap.forward`
exploits the fact that prior covariance and observation operator are
simultaneously diagonal, so every quantity reduces to scalar arithmetic
per mode.  The functions here deliberately refuse that shortcut: the
diagonal model is rotated into a random orthonormal basis and everything is
recomputed with generic dense linear algebra (solves, ``slogdet``).  Since
objective values, posterior means and covariances are basis-independent,
any disagreement beyond roundoff exposes a bug in the fast path.

Intended for tests; cost is O(n^3) per call.
"""

import numpy as np

from . import priors
from .errors import DomainError


def rotated_problem(prior, dataset, theta, seed=0):
    """Realize the diagonal model in a random orthonormal basis.

    Returns ``(a_mat, c_mat, y, q, p)`` with observation operator
    ``a_mat = P diag(a) Q^T``, prior covariance ``c_mat = Q diag(mu) Q^T``
    and rotated data ``y = P y_coeff``.
    """
    rng = np.random.default_rng(seed)
    n = dataset.n
    q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    p = np.linalg.qr(rng.standard_normal((n, n)))[0]
    mu = priors.eigenvalues(prior, theta, n)
    a_mat = p @ np.diag(dataset.a) @ q.T
    c_mat = q @ np.diag(mu) @ q.T
    y = p @ dataset.y
    return a_mat, c_mat, y, q, p


def dense_objective(kind, prior, dataset, theta, log_hyperprior=None,
                    shifted=True, seed=0):
    """Objective value computed from dense matrices.

    Supports the three normalized kinds (``centred``, ``noncentred``,
    ``empirical_bayes``).  The data misfit comes from a dense solve against
    the marginal covariance ``gamma^2 I + A C A^T`` and the volume terms from
    ``slogdet``; only the ``theta``-independent shift constants reuse the
    stored per-mode arrays.
    """
    if kind not in ("centred", "noncentred", "empirical_bayes"):
        raise DomainError(f"dense oracle does not implement kind {kind!r}")
    a_mat, c_mat, y, _, _ = rotated_problem(prior, dataset, theta, seed)
    n = dataset.n
    gram = dataset.gamma**2 * np.eye(n) + a_mat @ c_mat @ a_mat.T
    val = 0.5 * float(y @ np.linalg.solve(gram, y))
    if kind == "centred":
        val += 0.5 * float(np.linalg.slogdet(c_mat)[1])
        if shifted:
            val -= 0.5 * float(np.sum(np.log(dataset.mu_true)))
    elif kind == "empirical_bayes":
        val += 0.5 * float(np.linalg.slogdet(gram)[1])
        if shifted:
            s_true = dataset.a**2 * dataset.mu_true + dataset.gamma**2
            val -= 0.5 * float(np.sum(np.log(s_true)))
    val /= n
    if log_hyperprior is not None:
        val -= float(log_hyperprior(np.asarray(theta, dtype=float))) / n
    return val


def dense_posterior(prior, dataset, theta, seed=0):
    """Posterior mean and full covariance via the dense update formulas.

    Rotates the result back into the eigencoefficient basis, so the mean is
    directly comparable to the per-mode fast path and the covariance should
    come out diagonal.
    """
    a_mat, c_mat, y, q, _ = rotated_problem(prior, dataset, theta, seed)
    n = dataset.n
    gram = dataset.gamma**2 * np.eye(n) + a_mat @ c_mat @ a_mat.T
    cross = c_mat @ a_mat.T
    mean = cross @ np.linalg.solve(gram, y)
    cov = c_mat - cross @ np.linalg.solve(gram, cross.T)
    return q.T @ mean, q.T @ cov @ q


def variational_misfit(a_mat, c_mat, y, gamma):
    """Data misfit via the quadratic minimization identity.

    ``min_u [ ||y - A u||^2 / (2 gamma^2) + u^T C^{-1} u / 2 ]`` equals
    ``y^T (gamma^2 I + A C A^T)^{-1} y / 2``; solving the normal equations
    gives an independent route to the misfit used by :func:`dense_objective`.
    """
    if gamma <= 0:
        raise DomainError("the variational route needs a positive noise level")
    h = a_mat.T @ a_mat / gamma**2 + np.linalg.inv(c_mat)
    u_star = np.linalg.solve(h, a_mat.T @ y / gamma**2)
    r = y - a_mat @ u_star
    return float(r @ r / (2 * gamma**2)
                 + 0.5 * u_star @ np.linalg.solve(c_mat, u_star))
