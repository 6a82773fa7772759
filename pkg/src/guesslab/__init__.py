"""Two-stage guessing: entropy measures, Huffman-merge descriptions, exact moments and exponents."""

from .errors import CapExceededError, GuesslabError, InputError
from .exponents import (
    ExponentReport,
    ab_sequences,
    e1,
    e2,
    e2_bounds_huffman,
    m_star_rho,
    single_stage_variational,
    two_stage_rate,
    variational_exponent,
)
from .guesswork import (
    GuessOrder,
    MomentResult,
    PowerSumBounds,
    TwoStageBounds,
    arikan_sandwich,
    guess_moment,
    guess_order,
    power_sum_bounds,
    two_stage_moment,
    two_stage_moment_bounds,
)
from .pmf import (
    JointPmf,
    Pmf,
    arimoto_conditional_entropy,
    conditional_rows,
    kl_divergence,
    majorizes,
    make_joint,
    make_pmf,
    marginals,
    renyi_entropy,
    shannon_entropy,
    top_mass,
)
from .reduction import MergeMap, apply_map, beta_star, huffman_reduce, joint_of_map, reduce_pmf, v_gap
from .typeclasses import (
    StageOneSet,
    TypeDescriptor,
    delta_n,
    empirical_type,
    enumerate_types,
    type_class_size,
    type_class_two_stage_moment,
    type_probability,
)

__version__ = "0.1.0"
