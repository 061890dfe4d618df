"""Seeded multiplicative sign sequences and the sets they carve out:
exact word statistics, correlation averages, square-pair counting, and
equation searches."""

from .errors import NsetFormatError, OutOfRangeError, SeedPreconditionError
from .sieve import (
    MAX_SIEVE_LIMIT,
    DivisorSet,
    OffsetSpec,
    SpfTable,
    build_spf,
    common_divisor_set,
    factorize,
    is_prime,
    liouville_classic,
    squarefree_kernel,
    xi,
)
from .signs import (
    CLASSIC,
    DEFAULT_SEED,
    RANDOM,
    SetBitset,
    SignAssignment,
    SignedSequence,
    a_q_set,
    build_signed_sequence,
    lambda_q,
    sign_of_prime,
)
from .wordstats import (
    MAX_WORD_LEN,
    CorrelationResult,
    DiscrepancyReport,
    TrendReport,
    WordStats,
    correlation_sum,
    discrepancy_report,
    poly_grid,
    subsequence_trend,
    word_freq_via_correlations,
    word_frequencies,
)
from .pairsquare import (
    BoundViolation,
    MonteCarloResult,
    PairCountResult,
    Sum2hReport,
    count_square_pairs,
    monte_carlo_e_tn2,
    per_x_bound_check,
    smallest_prime_for_decay,
    square_class,
    sum_2h,
)
from .equations import (
    DIFF_TRIPLE,
    SUM_TRIPLE,
    MagicTriple,
    SolutionReport,
    dilation,
    find_magic_triples,
    find_schur_violation,
    solve_diff_of_squares,
    solve_sum_of_squares,
    solve_xy_z2,
    verify_cnk,
    verify_magic_triple,
    verify_multiplicative_schur,
)
from .nset import nset_from_bytes, nset_to_bytes, read_nset, write_nset
from .cli import (
    EXIT_ERROR,
    EXIT_NOT_FOUND,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VIOLATION,
    RunConfig,
    main,
    run_config,
)

__version__ = "0.1.0"
