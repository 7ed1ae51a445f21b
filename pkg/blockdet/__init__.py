"""blockdet: Kronecker, Hadamard and Khatri-Rao products and Oppenheim-type determinant bounds.

Quick start::

    import numpy as np
    import blockdet

    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    b = np.array([[3.0, 1.0], [1.0, 3.0]])
    report = blockdet.chen_bound(a, b)
    report.holds, report.margin_log
"""

__version__ = "0.1.0"

from .block import (
    BlockFactorList,
    BlockMatrix,
    diagonal_block,
    flatten,
    khatri_rao,
    khatri_rao_all,
    leading_block_submatrix,
    partition,
)
from .bounds import (
    chen_bound,
    chen_improves_schur,
    coro24_check,
    coro26_bound,
    coro27_ineq,
    fischer_ineq,
    hadamard_ineq,
    kim_bound,
    lemma23_check,
    oppenheim_ineq,
    oppenheim_schur_ineq,
    perturb_to_pd,
    thm21_bound,
    thm24_bound,
    thm24_dominates_thm25,
    thm25_ineq,
)
from .config import SuiteConfig
from .dense import (
    LogDet,
    cholesky,
    conjugate_transpose,
    det_cofactor_oracle,
    det_lu,
    hadamard,
    is_hermitian,
    kronecker,
    leading_principal,
    log_det_pd,
    matmul,
)
from .errors import *  # noqa: F401,F403
from .gen import (
    GenConfig,
    SplitMix64,
    derive_seed,
    random_block_pd,
    random_block_psd_singular,
    random_ge1_array,
    random_pd,
    random_psd_singular,
)
from .harness import SuiteReport, check_reductions, replay, run_suite
from .registry import BOUND_NAMES, evaluate_bound, get_supported_bounds
from .reports import BoundTerms, InequalityReport
