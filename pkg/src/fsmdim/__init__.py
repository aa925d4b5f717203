"""Finite-state dimension, mutual dimension and lossless finite-state compressors."""

__version__ = "0.1.0"

from .alphabet import (
    Alphabet, PairedString, ProbMeasure, SymbolString, format_symbols, gen_champernowne,
    gen_iid, gen_periodic, pair, parse_symbols, prefix_truncate, unzip,
)
from .blockstats import (
    FrequencyTable, JointFrequencyTable, block_count, block_freq_table, joint_block_freq_table,
    kl_divergence, marginals, mutual_information, self_information, shannon_entropy,
)
from .dimension import (
    DimensionEstimate, RateGrid, entropy_rate_curve, estimate_beta_dim, estimate_dim,
    estimate_joint_dim, estimate_mdim, joint_entropy_rate_curve, mutual_info_rate_curve,
    normality_test,
)
from .errors import FsmdimError
from .fsc import Fsc, check_il, epsilon_fsc, identity_fsc, kraft_audit, output_length, run
from .huffman import HuffmanCodebook, build_codebook, build_for_string, huffman_ilfsc
from .ratios import catalog_rho, catalog_rho_joint, mutual_ratio, rho_beta, rho_c
from .verify import brute_force_oracle, run_suite

__all__ = [name for name in dir() if not name.startswith("_")]
