"""Exact desk-scale toolkit for two-transmitter wiretap channels with
subset-tapping adversaries: achievable rate regions, random-binning protocol
simulation, and numerical verification of the underlying concentration
machinery."""

__version__ = "0.1.0"

from .channels import (
    AuxInput,
    CondKernel,
    MacWiretapSpec,
    Model,
    Pmf,
    bundled_spec,
    concat_aux,
    joint_full,
    load_channel_spec,
    superpose,
)
from .adversary import (
    Observation,
    Strategy,
    enumerate_strategies,
    observation_kernel,
    observe,
    strategy_count,
)
from .binning_sim import (
    BinningRealization,
    ProtocolParams,
    ProtocolRun,
    induced_joint,
    injective_binning,
    leakage_max,
    leakage_report,
    run_protocol,
    sample_binning,
    sw_decode,
)
from .info_measures import (
    binary_entropy,
    cond_entropy,
    cond_mutual_info,
    entropy,
    kl_divergence,
    mutual_info,
    total_variation,
)
from .lemma_lab import (
    BoundedVars,
    LemmaParams,
    chernoff_variant_check,
    dset_prob,
    entropy_given_wiretap,
    lemma1_check,
    lemma2_check,
    rate_constraint_report,
)
from .rate_regions import (
    RatePair,
    RegionHull,
    RegionPoly,
    check_inclusion,
    optimize_hull,
    region_for,
    region_generalized,
    region_model1,
    region_model2,
    region_model3,
)
from .limits import Caps

__all__ = [name for name in dir() if not name.startswith("_")]
