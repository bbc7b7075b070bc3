"""Hierarchical Bayesian hyperparameter estimation for diagonal linear inverse problems."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DomainError,
    EvaluationError,
    HiermapError,
    NumericalError,
    UnsupportedParameterError,
)
from .priors import (
    HyperDomain,
    LaplacianSpectrum,
    SpectralPrior,
    ard_eigenvalue,
    dirichlet1d,
    dirichlet_box,
    eigenvalue,
    eigenvalues,
    kernel_value,
    limiting_ratio_g,
    log_eigenvalue_gradient,
    neumann1d,
    periodic1d,
)
from .forward import (
    Dataset,
    ForwardSpectrum,
    NoiseRule,
    ProblemSpec,
    custom,
    deblurring,
    decay_in_n,
    fixed_noise,
    generate_data,
    identity,
    load_dataset,
    obs_in_gamma,
    posterior_mean_coeff,
    posterior_variance_coeff,
    power_law,
    sample_truth,
    save_dataset,
)
from .objectives import (
    ObjectiveSpec,
    SpectralWeights,
    assumption_ii_margin,
    cesaro_b_mean,
    evaluate,
    limiting_objective,
    rescale,
    s_weight,
    spectral_weights,
)
from .optimize import (
    ArgminReport,
    ArgminSets,
    GridTable,
    OptimizerConfig,
    argmin_sets,
    grid_scan,
    minimize,
)
from .sampling import (
    ChainRecord,
    EmConfig,
    EmResult,
    GibbsConfig,
    exact_em_objective,
    exact_em_step,
    mc_marginal_objective,
    pcn_propose,
    run_em,
    run_gibbs,
    sample_conditional_posterior,
    save_chain_trace,
)
