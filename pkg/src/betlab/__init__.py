"""Monte Carlo laboratory for betting martingales testing a bounded mean."""

from . import diagnostics, kernels, simlab, strategies, subgaussian
from .core import (
    FractionInterval,
    NullSpec,
    PathState,
    fraction_bounds,
    predictable_min_wealth,
    wealth_update,
)
from .diagnostics import (
    KlinfResult,
    SosClassification,
    SosLedger,
    TnTracker,
    classify_sos,
    klinf,
    pnb_check,
    regret,
    sos_update,
    tn_update,
)
from .simlab import (
    ConfseqResult,
    DistSpec,
    EnsembleSummary,
    ExperimentConfig,
    bernoulli,
    chi2_cdf,
    derive_path_seed,
    discrete_on01,
    invert_confidence_set,
    ks_distance,
    normal,
    point_mass,
    run_ensemble,
    sample_path,
    scaled_beta,
    ville_violation_rate,
)
from .strategies import (
    HedgedState,
    MixtureSpec,
    Strategy,
    agrapa_fraction,
    agrapa_strategy,
    beta_mixture_strategy,
    build_beta_mixture,
    build_robbins_mixture,
    fixed_fraction,
    grapa_fraction,
    grapa_strategy,
    hedged_strategy,
    hedged_update,
    intermittent,
    kt_fraction,
    kt_strategy,
    mixture_update,
    opportunistic_leverage,
    prh_fraction,
    robbins_mixture_strategy,
    with_cash,
)
from .subgaussian import (
    SubgState,
    subg_atom_mixture,
    subg_gaussian_mixture,
    subg_plugin_update,
)

__version__ = "0.1.0"
