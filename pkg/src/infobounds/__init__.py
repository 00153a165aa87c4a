"""f-divergence and majorization bounds for list decoding and lossless source coding."""

__version__ = "0.1.0"

from .errors import (
    EnumerationLimit,
    Infeasible,
    InfoBoundsError,
    InvalidArgument,
    InvalidPMF,
    NotApplicable,
    NotMajorized,
    PreconditionError,
)
from .prob import JointPMF, Kernel, ProbVector, decompose, map_error, push_forward, uniform, validate
from .divergences import (
    CHI2,
    KL,
    TV,
    FGenerator,
    binary_entropy,
    binary_kl,
    conditional_entropy,
    e_gamma,
    egamma_generator,
    expected_div_to_uniform,
    f_divergence,
    generator,
    renyi_entropy,
    shannon_entropy,
)
from .majorization import ClusterMap, DoublyStochasticMatrix, cluster_oracle, ds_witness, induced_pmf, majorizes, tilde_x_m
from .listdecoding import (
    FixedListRule,
    RefinedBoundReport,
    VariableListRule,
    ak_invert,
    brute_force_min_error,
    egamma_bound,
    equality_check,
    error_prob,
    fano_fixed_invert,
    gen_fano_check,
    gen_fano_invert,
    optimize_gamma,
    refined_bound,
    refined_invert,
    top_l_rule,
)
from .sourcecoding import CodeSpec, campbell_lengths, campbell_verify, cgf, clustering_report, huffman, kraft_sum
