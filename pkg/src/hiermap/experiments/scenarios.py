"""The eight runnable scenarios.

Each scenario function takes a resolved :class:`RunConfig` and returns a
:class:`ScenarioResult`: named CSV tables (header + rows), a plot builder
that works *from the written CSV files* rather than from memory, and any
per-replicate diagnostics.  Estimation scenarios share one trace engine;
the estimate truth is pinned at one for every free hyperparameter
(sigma = ell = 1, nu = 3/2 throughout).

Replicates run sequentially with seeds ``seed + r`` and rows are ordered by
(replicate, N) before emission, so reruns are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.signal

from .. import streams
from ..errors import (ConfigError, DomainError, EvaluationError,
                      NumericalError, UnsupportedParameterError)
from ..forward import (ForwardSpectrum, NoiseRule, ProblemSpec, custom,
                       deblurring, decay_in_n, fixed_noise, generate_data,
                       identity, obs_in_gamma, power_law, sample_truth)
from ..objectives import ObjectiveSpec
from ..optimize import OptimizerConfig, argmin_sets, grid_scan, minimize
from ..priors import (HyperDomain, SpectralPrior, dirichlet1d, kernel_value,
                      neumann1d, periodic1d)
from ..sampling import EmConfig, GibbsConfig, run_em, run_gibbs
from . import io, svgplot
from .config import RunConfig

TRACE_HEADER = ("replicate", "N", "gamma_N", "method", "theta_hat",
                "abs_error", "boundary_hit", "boundary_side")

_METHOD_KINDS = {"C": "centred", "NC": "noncentred", "E": "empirical_bayes",
                 "C_full": "centred_full"}

_BOUNDARIES = {"neumann1d": neumann1d, "dirichlet1d": dirichlet1d,
               "periodic1d": periodic1d}


@dataclass
class ScenarioResult:
    tables: dict                      # filename -> (header, rows)
    plots: Optional[Callable] = None  # outdir -> {filename: svg text}
    diagnostics: tuple = ()
    aborted_replicates: int = 0


# ---------------------------------------------------------------------------
# Config -> library objects


def build_prior(prior_cfg: dict) -> SpectralPrior:
    boundary = prior_cfg.get("boundary", "neumann1d")
    if boundary not in _BOUNDARIES:
        raise ConfigError(f"unknown boundary {boundary!r} in [prior]")
    try:
        return SpectralPrior(
            spectrum=_BOUNDARIES[boundary](),
            family=prior_cfg.get("family", "whittle_matern"),
            fixed={k: float(v) for k, v in prior_cfg.get("fixed", {}).items()},
            free=tuple(prior_cfg.get("free", ())),
            domain=HyperDomain(prior_cfg.get("lower", ()), prior_cfg.get("upper", ())),
        )
    except DomainError as exc:
        raise ConfigError(f"in [prior]: {exc}")


def build_forward(forward_cfg: dict) -> ForwardSpectrum:
    kind = forward_cfg.get("kind", "deblurring")
    try:
        if kind == "deblurring":
            return deblurring()
        if kind == "identity":
            return identity()
        if kind == "power_law":
            return power_law(float(forward_cfg["exponent"]))
        if kind == "custom":
            return custom(forward_cfg["table"])
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"in [forward]: {exc}")
    raise ConfigError(f"unknown forward kind {kind!r}")


def build_noise(noise_cfg: dict) -> NoiseRule:
    kind = noise_cfg.get("kind", "decay_in_n")
    try:
        if kind == "fixed":
            return fixed_noise(float(noise_cfg["gamma"]))
        if kind == "decay_in_n":
            return decay_in_n(float(noise_cfg["w"]))
        if kind == "obs_in_gamma":
            return obs_in_gamma(float(noise_cfg["w"]))
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"in [noise]: {exc}")
    raise ConfigError(f"unknown noise kind {kind!r}")


def build_optimizer(opt_cfg: dict) -> OptimizerConfig:
    try:
        return OptimizerConfig(
            method=opt_cfg.get("method", "auto"),
            grid_points_per_dim=int(opt_cfg.get("grid_points_per_dim", 32)),
            tol_theta=float(opt_cfg.get("tol_theta", 1e-6)),
            max_evals=opt_cfg.get("max_evals"),
        )
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(f"in [optimizer]: {exc}")


# ---------------------------------------------------------------------------
# Shared estimation-trace engine


def _near_edge(domain: HyperDomain, theta, tol: float):
    # same convention as the optimizer's boundary report
    lo, hi = domain.arrays()
    btol = 10.0 * tol * np.maximum(1.0, hi - lo)
    t = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any(t - lo <= btol):
        return True, -1
    if np.any(hi - t <= btol):
        return True, 1
    return False, 0


def _fit_one(method: str, spec: ProblemSpec, dataset, opt: OptimizerConfig,
             n_max, seed: int):
    """One point estimate; returns (theta_hat, boundary_hit, boundary_side)."""
    prior = spec.prior
    if method == "EM":
        lo, hi = prior.domain.arrays()
        em = EmConfig(m_samples=200, k_iters=20,
                      theta_init=tuple(0.5 * (lo + hi)),
                      inner_optimizer=opt, seed=seed)
        theta = run_em(spec, em, dataset=dataset).theta_hat
        hit, side = _near_edge(prior.domain, theta, opt.tol_theta)
        return theta, hit, side
    kwargs = {"nmax_full": int(n_max)} if method == "C_full" else {}
    obj = ObjectiveSpec(kind=_METHOD_KINDS[method], prior=prior, dataset=dataset,
                        log_hyperprior=spec.log_hyperprior, **kwargs)
    report = minimize(obj, opt)
    side = next((int(s) for s in report.boundary_side if s != 0), 0)
    return report.theta_hat, any(report.boundary_hit), side


def _trace_rows(cfg: RunConfig, prior: SpectralPrior, fwd: ForwardSpectrum,
                jobs, *, with_w: bool):
    """Run replicates x jobs x methods.  ``jobs`` entries are dicts with
    keys w (tag or None), n, gamma (recorded level) and rule (drives data
    generation).  A non-finite objective aborts the whole replicate."""
    if prior.dim != 1:
        raise ConfigError("estimation traces need exactly one free hyperparameter")
    methods = list(cfg.objective.get("methods", []))
    if not methods:
        raise ConfigError("no methods configured in [objective]")
    n_max = cfg.objective.get("n_max")
    if "C_full" in methods:
        if n_max is None or int(n_max) < max(job["n"] for job in jobs):
            raise ConfigError("[objective] n_max must be >= the largest N")
    opt = build_optimizer(cfg.optimizer)
    theta_true = (1.0,) * prior.dim
    rows, diags, aborted = [], [], 0
    for r in range(cfg.replicates):
        rep_rows = []
        try:
            for job in jobs:
                spec = ProblemSpec(prior=prior, forward=fwd, noise=job["rule"],
                                   n=job["n"], theta_true=theta_true)
                dataset = generate_data(spec, seed=cfg.seed + r)
                for m in methods:
                    theta, hit, side = _fit_one(m, spec, dataset, opt, n_max,
                                                cfg.seed + r)
                    err = float(np.linalg.norm(np.subtract(theta, theta_true)))
                    head = (job["w"],) if with_w else ()
                    rep_rows.append(head + (r, job["n"], job["gamma"], m,
                                            float(theta[0]), err, hit, side))
        except (EvaluationError, NumericalError) as exc:
            aborted += 1
            where = getattr(exc, "theta", None)
            diags.append(f"replicate {r} aborted (theta={where}): {exc}")
        else:
            rows.extend(rep_rows)
    if aborted == cfg.replicates:
        raise NumericalError(
            f"all {aborted} replicates aborted; first diagnostic: {diags[0]}")
    offset = 1 if with_w else 0
    rows.sort(key=lambda row: (row[offset], row[offset + 1], row[:offset],
                               methods.index(row[offset + 3])))
    return rows, diags, aborted


def _median_error_series(columns, *, with_w: bool):
    """Per-(method[, w]) arrays of (N, median abs error) from a trace table."""
    ns = io.floats(columns, "N")
    err = io.floats(columns, "abs_error")
    methods = columns["method"]
    tags = sorted(set(methods))
    ws = io.floats(columns, "w") if with_w else None
    series = []
    groups = ([(m, None) for m in tags] if not with_w else
              [(m, w) for m in tags for w in sorted(set(ws.tolist()))])
    for m, w in groups:
        mask = np.array([mm == m for mm in methods])
        if w is not None:
            mask &= ws == w
        if not mask.any():
            continue
        xs = np.unique(ns[mask])
        med = [float(np.median(err[mask & (ns == x)])) for x in xs]
        label = m if w is None else f"{m} w={w:g}"
        series.append((label, xs, np.array(med)))
    return series


def _trace_plot(outdir, name="trace.csv", *, with_w=False, title="",
                xlabel="N", out_name="trace.svg"):
    _, columns = io.read_csv(outdir / name)
    series = _median_error_series(columns, with_w=with_w)
    return {out_name: svgplot.line_plot(
        series, title=title, xlabel=xlabel, ylabel="median |theta - 1|",
        logx=True, logy=True)}


# ---------------------------------------------------------------------------
# Estimation scenarios


def rate_trace(cfg: RunConfig) -> ScenarioResult:
    prior = build_prior(cfg.prior)
    fwd = build_forward(cfg.forward)
    rule = build_noise(cfg.noise)
    jobs = [{"w": None, "n": n, "gamma": rule.gamma_for(n), "rule": rule}
            for n in cfg.n_schedule]
    rows, diags, aborted = _trace_rows(cfg, prior, fwd, jobs, with_w=False)
    tables = {"trace.csv": (TRACE_HEADER, rows)}

    opts = cfg.scenario_options
    if opts.get("truth_panel", False):
        modes = int(opts.get("truth_modes", 512))
        grid = int(opts.get("truth_grid", 1024))
        u = sample_truth(prior, (1.0,) * prior.dim, modes, seed=cfg.seed)
        a = fwd.coefficients(modes)
        x = np.linspace(0.0, 1.0, grid)
        basis = np.sqrt(2.0) * np.cos(np.pi * np.outer(x, np.arange(1, modes + 1)))
        field = basis @ u
        blurred = basis @ (a * u)
        tables["truth.csv"] = (("x", "u_true", "blurred"),
                               list(zip(x, field, blurred)))

    def plots(outdir):
        out = _trace_plot(outdir, title="estimation error vs N")
        if "truth.csv" in tables:
            _, columns = io.read_csv(outdir / "truth.csv")
            xs = io.floats(columns, "x")
            out["truth.svg"] = svgplot.line_plot(
                [("u_true", xs, io.floats(columns, "u_true")),
                 ("blurred", xs, io.floats(columns, "blurred"))],
                title="one truth draw and its blurred image", xlabel="x",
                markers=False)
        return out

    return ScenarioResult(tables, plots, tuple(diags), aborted)


def truncation_study(cfg: RunConfig) -> ScenarioResult:
    prior = build_prior(cfg.prior)
    fwd = build_forward(cfg.forward)
    rule = build_noise(cfg.noise)
    jobs = [{"w": None, "n": n, "gamma": rule.gamma_for(n), "rule": rule}
            for n in cfg.n_schedule]
    rows, diags, aborted = _trace_rows(cfg, prior, fwd, jobs, with_w=False)

    def plots(outdir):
        return _trace_plot(outdir, title="truncated vs full-volume centred fit")

    return ScenarioResult({"trace.csv": (TRACE_HEADER, rows)}, plots,
                          tuple(diags), aborted)


def noise_decay(cfg: RunConfig) -> ScenarioResult:
    if cfg.noise.get("kind", "decay_in_n") != "decay_in_n":
        raise ConfigError("noise-decay sweeps decay_in_n rules")
    prior = build_prior(cfg.prior)
    fwd = build_forward(cfg.forward)
    w_list = [float(w) for w in cfg.scenario_options.get("w_list", [])]
    if not w_list:
        raise ConfigError("noise-decay needs a nonempty w_list")
    jobs = []
    for w in w_list:
        rule = decay_in_n(w)
        jobs.extend({"w": w, "n": n, "gamma": rule.gamma_for(n), "rule": rule}
                    for n in cfg.n_schedule)
    rows, diags, aborted = _trace_rows(cfg, prior, fwd, jobs, with_w=True)

    def plots(outdir):
        return _trace_plot(outdir, with_w=True,
                           title="error vs N as the noise decay rate varies")

    return ScenarioResult({"trace.csv": (("w",) + TRACE_HEADER, rows)}, plots,
                          tuple(diags), aborted)


def obs_in_gamma_decay(cfg: RunConfig) -> ScenarioResult:
    if cfg.noise.get("kind") != "obs_in_gamma":
        raise ConfigError("obs-in-gamma-decay needs an obs_in_gamma noise rule")
    prior = build_prior(cfg.prior)
    fwd = build_forward(cfg.forward)
    w_list = [float(w) for w in cfg.scenario_options.get("w_list", [])]
    gammas = [float(g) for g in cfg.scenario_options.get("gamma_schedule", [])]
    if not w_list or not gammas:
        raise ConfigError("obs-in-gamma-decay needs w_list and gamma_schedule")
    jobs = []
    for w in w_list:
        rule = obs_in_gamma(w)
        # gamma drives the run; data are generated at that exact level while
        # N comes from the rule, so the recorded pair stays consistent
        jobs.extend({"w": w, "n": rule.n_for_gamma(g), "gamma": g,
                     "rule": fixed_noise(g)} for g in gammas)
    rows, diags, aborted = _trace_rows(cfg, prior, fwd, jobs, with_w=True)

    def plots(outdir):
        return _trace_plot(outdir, with_w=True,
                           title="error vs N with gamma as the driver")

    return ScenarioResult({"trace.csv": (("w",) + TRACE_HEADER, rows)}, plots,
                          tuple(diags), aborted)


# ---------------------------------------------------------------------------
# Objective landscapes over two free hyperparameters


def _landscape_variant(variant: str, cfg: RunConfig):
    prior_cfg = cfg.prior
    nu = float(prior_cfg.get("fixed", {}).get("nu", 1.5))
    lower = list(prior_cfg.get("lower", (1e-8, 1e-8)))
    upper = list(prior_cfg.get("upper", (5.0, 5.0)))
    boundary = _BOUNDARIES.get(prior_cfg.get("boundary", "neumann1d"), neumann1d)
    if variant == "sigma_ell":
        free = ("sigma", "ell_inv")
        family = "whittle_matern"
        curve = lambda s: float(s) ** (-1.0 / nu)  # sigma * ell_inv^nu = 1
    elif variant == "sigma_beta":
        free = ("sigma", "beta")
        family = "whittle_matern_beta"
        curve = lambda s: 1.0
    else:
        raise ConfigError(f"unknown landscape variant {variant!r}")
    try:
        prior = SpectralPrior(spectrum=boundary(), family=family,
                              fixed={"nu": nu}, free=free,
                              domain=HyperDomain(lower, upper))
    except DomainError as exc:
        raise ConfigError(f"in [prior]: {exc}")
    return prior, curve


def landscape_2d(cfg: RunConfig) -> ScenarioResult:
    if cfg.replicates != 1:
        raise ConfigError("landscape-2d plots a single data realization")
    fwd = build_forward(cfg.forward)
    rule = build_noise(cfg.noise)
    cells = int(cfg.scenario_options.get("grid_cells", 128))
    variants = list(cfg.scenario_options.get("variants", ["sigma_ell", "sigma_beta"]))
    land_rows, curve_rows = [], []
    for variant in variants:
        prior, curve = _landscape_variant(variant, cfg)
        box_hi = prior.domain.arrays()[1]
        for n in cfg.n_schedule:
            spec = ProblemSpec(prior=prior, forward=fwd, noise=rule, n=n,
                               theta_true=(1.0, 1.0))
            dataset = generate_data(spec, seed=cfg.seed)
            obj = ObjectiveSpec(kind="centred", prior=prior, dataset=dataset)
            table = grid_scan(obj, ((0.0, 0.0), tuple(box_hi)), cells)
            xs, ys = table.axes
            for i in range(cells):
                for j in range(cells):
                    land_rows.append((variant, n, xs[i], ys[j], table.values[i, j]))
            sets = argmin_sets(table)
            for i in range(cells):
                curve_rows.append((variant, n, "row", xs[i], ys[sets.row_argmin[i]]))
            for j in range(cells):
                curve_rows.append((variant, n, "col", xs[sets.col_argmin[j]], ys[j]))
            gi, gj = sets.global_index
            curve_rows.append((variant, n, "global", xs[gi], ys[gj]))
            for i in range(cells):
                t2 = curve(xs[i])
                if t2 <= box_hi[1]:
                    curve_rows.append((variant, n, "equiv_curve", xs[i], t2))

    tables = {
        "landscape.csv": (("variant", "N", "sigma", "theta2", "J"), land_rows),
        "argmin_curves.csv": (("variant", "N", "kind", "sigma", "theta2"),
                              curve_rows),
    }

    def plots(outdir):
        _, land = io.read_csv(outdir / "landscape.csv")
        _, curves = io.read_csv(outdir / "argmin_curves.csv")
        out = {}
        l_var = np.array(land["variant"])
        l_n = io.floats(land, "N")
        l_sig, l_t2, l_j = (io.floats(land, k) for k in ("sigma", "theta2", "J"))
        c_var = np.array(curves["variant"])
        c_n = io.floats(curves, "N")
        c_kind = np.array(curves["kind"])
        c_sig, c_t2 = io.floats(curves, "sigma"), io.floats(curves, "theta2")
        for variant in sorted(set(l_var.tolist())):
            ylab = "ell_inv" if variant == "sigma_ell" else "beta"
            for n in np.unique(l_n):
                mask = (l_var == variant) & (l_n == n)
                xs, ys = np.unique(l_sig[mask]), np.unique(l_t2[mask])
                values = np.full((len(xs), len(ys)), np.nan)
                values[np.searchsorted(xs, l_sig[mask]),
                       np.searchsorted(ys, l_t2[mask])] = l_j[mask]
                overlays = []
                for kind, style in (("row", "dots"), ("col", "dots"),
                                    ("global", "dots"), ("equiv_curve", "line")):
                    cmask = (c_var == variant) & (c_n == n) & (c_kind == kind)
                    overlays.append((kind, c_sig[cmask], c_t2[cmask], style))
                name = f"landscape_{variant}_N{int(n)}.svg"
                out[name] = svgplot.heat_map(
                    xs, ys, values, overlays=overlays, xlabel="sigma",
                    ylabel=ylab, title=f"centred objective, N={int(n)}")
        return out

    return ScenarioResult(tables, plots)


# ---------------------------------------------------------------------------
# Gibbs acceptance contrast


def gibbs_acceptance(cfg: RunConfig) -> ScenarioResult:
    prior = build_prior(cfg.prior)
    fwd = build_forward(cfg.forward)
    rule = build_noise(cfg.noise)
    opts = cfg.scenario_options
    variants = list(opts.get("variants", ["centred", "noncentred"]))
    init = opts.get("theta_init")
    if init is not None:
        init = tuple(np.atleast_1d(np.asarray(init, dtype=float)))
    try:
        base = GibbsConfig(variant=variants[0],
                           n_steps=int(opts.get("n_steps", 2000)),
                           pcn_beta=float(opts.get("pcn_beta", 0.2)),
                           theta_proposal_std=float(opts.get("theta_proposal_std", 0.25)),
                           theta_init=init)
    except (DomainError, IndexError, TypeError, ValueError) as exc:
        raise ConfigError(f"in [scenario]: {exc}")
    rows = []
    for r in range(cfg.replicates):
        for n in cfg.n_schedule:
            spec = ProblemSpec(prior=prior, forward=fwd, noise=rule, n=n,
                               theta_true=(1.0,) * prior.dim)
            dataset = generate_data(spec, seed=cfg.seed + r)
            for variant in variants:
                chain = GibbsConfig(variant=variant, n_steps=base.n_steps,
                                    pcn_beta=base.pcn_beta,
                                    theta_proposal_std=base.theta_proposal_std,
                                    theta_init=base.theta_init,
                                    seed=cfg.seed + r)
                record = run_gibbs(spec, chain, dataset=dataset)
                rows.append((r, n, variant, record.theta_rate,
                             record.state_rate))

    def plots(outdir):
        _, columns = io.read_csv(outdir / "trace.csv")
        ns = io.floats(columns, "N")
        rate = io.floats(columns, "theta_rate")
        var = np.array(columns["variant"])
        series = []
        for v in sorted(set(var.tolist())):
            xs = np.unique(ns[var == v])
            med = [float(np.median(rate[(var == v) & (ns == x)])) for x in xs]
            series.append((v, xs, np.array(med)))
        return {"acceptance.svg": svgplot.line_plot(
            series, title="theta-move acceptance rate vs N", xlabel="N",
            ylabel="acceptance rate", logx=True)}

    header = ("replicate", "N", "variant", "theta_rate", "state_rate")
    return ScenarioResult({"trace.csv": (header, rows)}, plots)


# ---------------------------------------------------------------------------
# Gaussian-process paths and quadratic variation


def _jittered_cholesky(cov: np.ndarray, sigma2: float) -> np.ndarray:
    # jitter schedule pinned: start 1e-10 sigma^2, double, give up past 1e-6 sigma^2
    jitter = 1e-10 * sigma2
    eye = np.eye(len(cov))
    while True:
        try:
            return np.linalg.cholesky(cov + jitter * eye)
        except np.linalg.LinAlgError:
            jitter *= 2.0
            if jitter > 1e-6 * sigma2:
                raise NumericalError(
                    f"covariance factorization failed up to jitter {jitter:g}")


def sample_paths(kernels, grid_size: int, n_paths: int, seed: int):
    """Draw stationary-kernel paths on a uniform grid over [0, 1].

    ``kernels`` is a sequence of mappings with ``kind`` plus the kernel
    parameters (``sigma``, ``ell`` and ``nu`` for the Matern family).
    Returns ``(header, rows)`` in long format with one row per sample
    location; an empty row list (``n_paths = 0``) is valid.
    """
    if int(grid_size) < 2:
        raise DomainError("grid_size must be at least 2")
    if int(n_paths) < 0:
        raise DomainError("n_paths must be nonnegative")
    x = np.linspace(0.0, 1.0, int(grid_size))
    rows = []
    for k, spec in enumerate(kernels):
        params = dict(spec)
        kind = params.pop("kind")
        label = params.pop("label", None) or (
            f"{kind}-nu{params['nu']:g}" if kind == "matern" else kind)
        cov = kernel_value(kind, params, x[:, None], x[None, :])
        chol = _jittered_cholesky(cov, float(params["sigma"]) ** 2)
        rng = streams.generator(seed, streams.PATHS, index=k)
        draws = streams.normals(rng, int(n_paths) * len(x)).reshape(int(n_paths), len(x))
        paths = draws @ chol.T
        for p in range(int(n_paths)):
            rows.extend((label, p, x[i], paths[p, i]) for i in range(len(x)))
    return ("kernel", "path", "x", "u"), rows


def scenario_sample_paths(cfg: RunConfig) -> ScenarioResult:
    opts = cfg.scenario_options
    try:
        header, rows = sample_paths(opts.get("kernels", []),
                                    int(opts.get("grid_size", 512)),
                                    int(opts.get("n_paths", 0)), cfg.seed)
    except (DomainError, UnsupportedParameterError, KeyError) as exc:
        raise ConfigError(f"in [scenario]: {exc}")

    def plots(outdir):
        _, columns = io.read_csv(outdir / "trace.csv")
        xs = io.floats(columns, "x")
        us = io.floats(columns, "u")
        kernel = np.array(columns["kernel"])
        path = np.array(columns["path"])
        series = []
        for key in sorted(set(zip(kernel.tolist(), path.tolist()))):
            mask = (kernel == key[0]) & (path == key[1])
            series.append((f"{key[0]}[{key[1]}]", xs[mask], us[mask]))
        return {"paths.svg": svgplot.line_plot(
            series, title="sample paths", xlabel="x", ylabel="u(x)",
            markers=False)}

    return ScenarioResult({"trace.csv": (header, rows)}, plots)


def ou_path(sigma: float, ell: float, n_points: int, rng, span: float = 1.0):
    """Exact stationary OU draw on a uniform grid (AR(1) recursion)."""
    if n_points < 2:
        raise DomainError("need at least two grid points")
    if sigma <= 0 or ell <= 0 or span <= 0:
        raise DomainError("sigma, ell and span must be positive")
    h = span / (n_points - 1)
    phi = float(np.exp(-h / ell))
    z = streams.normals(rng, n_points)
    innovations = z * (sigma * np.sqrt(1.0 - phi**2))
    innovations[0] = sigma * z[0]  # stationary start
    return scipy.signal.lfilter([1.0], [1.0, -phi], innovations)


def quadratic_variation_beta(path, span: float = 1.0) -> float:
    """Estimate ``beta = sigma^2 / ell`` from one OU path's quadratic variation.

    The sum of squared increments of an OU path over ``[0, span]`` converges
    to ``2 beta span`` as the grid refines, so ``beta_hat`` is that sum over
    ``2 span``.
    """
    arr = np.asarray(path, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise DomainError("need a 1-D path with at least two points")
    if span <= 0:
        raise DomainError("span must be positive")
    increments = np.diff(arr)
    return float(increments @ increments / (2.0 * span))


def quadratic_variation(cfg: RunConfig) -> ScenarioResult:
    opts = cfg.scenario_options
    pairs = [(float(s), float(l)) for s, l in opts.get("pairs", [])]
    if not pairs:
        raise ConfigError("quadratic-variation needs at least one (sigma, ell) pair")
    n_points = int(opts.get("n_points", 16_384))
    if n_points < 2:
        raise ConfigError("n_points must be at least 2")
    rows = []
    for r in range(cfg.replicates):
        for k, (sigma, ell) in enumerate(pairs):
            rng = streams.generator(cfg.seed + r, streams.PATHS, index=k)
            path = ou_path(sigma, ell, n_points, rng)
            rows.append((r, sigma, ell, sigma**2 / ell,
                         quadratic_variation_beta(path)))

    def plots(outdir):
        _, columns = io.read_csv(outdir / "trace.csv")
        sig = io.floats(columns, "sigma")
        ell = io.floats(columns, "ell")
        bhat = io.floats(columns, "beta_hat")
        btrue = io.floats(columns, "beta_true")
        series = []
        for s, l in sorted(set(zip(sig.tolist(), ell.tolist()))):
            mask = (sig == s) & (ell == l)
            ys = np.sort(bhat[mask])
            qs = (np.arange(len(ys)) + 0.5) / len(ys)
            series.append((f"sigma={s:g} ell={l:g}", qs, ys))
        if len(btrue):
            series.append(("true beta", np.array([0.0, 1.0]),
                           np.full(2, btrue[0])))
        return {"quadratic_variation.svg": svgplot.line_plot(
            series, title="quadratic-variation estimates of beta",
            xlabel="quantile", ylabel="beta estimate", markers=False)}

    header = ("replicate", "sigma", "ell", "beta_true", "beta_hat")
    return ScenarioResult({"trace.csv": (header, rows)}, plots)


SCENARIO_FUNCS = {
    "sample-paths": scenario_sample_paths,
    "truncation-study": truncation_study,
    "rate-trace": rate_trace,
    "landscape-2d": landscape_2d,
    "noise-decay": noise_decay,
    "obs-in-gamma-decay": obs_in_gamma_decay,
    "quadratic-variation": quadratic_variation,
    "gibbs-acceptance": gibbs_acceptance,
}
