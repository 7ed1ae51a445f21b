"""Oppenheim-type determinantal inequalities, evaluated in log space.

Every function returns an :class:`~blockdet.reports.InequalityReport` whose
``lhs_log``/``rhs_log`` are natural logs of the two sides. Determinants of
positive definite inputs come from Cholesky; semidefinite inputs whose
Cholesky factorization breaks down are treated as having determinant zero.

Exponents Q / q_i (with Q = q_1 ... q_m) are always formed as the exact
integer product of the other factors' block orders.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import List, Sequence, Tuple

import numpy as np

from . import logspace
from .block import (
    BlockFactorList,
    BlockMatrix,
    diagonal_block,
    flatten,
    khatri_rao_all,
    leading_block_submatrix,
)
from .dense import (
    as_matrix,
    default_hermitian_tol,
    hadamard,
    hermitian_part,
    identity,
    is_psd,
    log_det_pd,
    max_norm,
)
from .errors import (
    DimensionMismatch,
    DomainError,
    EmptyFactorList,
    IndexOutOfRange,
    NegativeDiagonal,
    NonSquareBlocks,
    NotPositiveDefinite,
)
from .reports import DEFAULT_TOL, BoundTerms, InequalityReport
from .serialize import inputs_digest

logger = logging.getLogger(__name__)

LOG_ZERO = logspace.LOG_ZERO


# ---------------------------------------------------------------------------
# Input handling
# ---------------------------------------------------------------------------

def _matrices(mats: Sequence) -> List[np.ndarray]:
    """Validated Hermitian parts of equally sized square matrices."""
    mats = [as_matrix(x) for x in mats]
    if not mats:
        raise EmptyFactorList("at least one matrix is required")
    shapes = {x.shape for x in mats}
    if len(shapes) != 1:
        raise DimensionMismatch(f"matrices must share one dimension, got {sorted(shapes)}")
    return [hermitian_part(x) for x in mats]


def _require_factors(m: int) -> None:
    if m < 2:
        raise DomainError(f"product bounds need at least two factors, got {m}")


def _block_factors(factors) -> BlockFactorList:
    factors = BlockFactorList.of(factors)
    _require_factors(factors.m)
    for i, f in enumerate(factors):
        if not f.has_square_blocks:
            raise NonSquareBlocks(f"factor {i} has {f.p}x{f.q} blocks; bounds need square blocks")
    return factors


def _log_det(a) -> float:
    return log_det_pd(a).log_abs


def _log_det_psd(a) -> float:
    try:
        return log_det_pd(a).log_abs
    except NotPositiveDefinite:
        if not is_psd(a):
            raise NotPositiveDefinite("input is indefinite, not semidefinite") from None
        logger.debug("Cholesky broke down on a semidefinite input; determinant is zero")
        return LOG_ZERO


def _log_diagonal(a: np.ndarray) -> List[float]:
    floor = -default_hermitian_tol(a)
    out = []
    for i, d in enumerate(a.diagonal().real):
        if d < floor:
            raise NegativeDiagonal(f"diagonal entry {i} is {d:.6g}; input is not semidefinite")
        out.append(logspace.log(float(d)) if d > 0 else LOG_ZERO)
    return out


def _exponents(block_dims: Sequence[int]) -> Tuple[int, ...]:
    """Q / q_i as the product of the other block orders."""
    return tuple(
        math.prod(q for j, q in enumerate(block_dims) if j != i)
        for i in range(len(block_dims))
    )


# ---------------------------------------------------------------------------
# Leading-principal profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Profile:
    """log det of the leading (block) submatrices and diagonal (blocks) of one factor.

    ``leading[mu]`` is log det A_mu with ``leading[0] == 0``;
    ``diagonal[mu - 1]`` is log det A_mu,mu.
    """

    leading: Tuple[float, ...]
    diagonal: Tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.diagonal)

    @property
    def log_det(self) -> float:
        return self.leading[-1]

    def log_ratio(self, mu: int) -> float:
        """log(det A_mu,mu * det A_{mu-1} / det A_mu), >= 0 by Fischer."""
        return self.diagonal[mu - 1] + self.leading[mu - 1] - self.leading[mu]


def _scalar_profile(a: np.ndarray) -> _Profile:
    n = a.shape[0]
    leading = (0.0,) + tuple(_log_det(a[:mu, :mu]) for mu in range(1, n + 1))
    diagonal = tuple(math.log(d) for d in a.diagonal().real)
    return _Profile(leading, diagonal)


def _block_profile(a: BlockMatrix) -> _Profile:
    leading = (0.0,) + tuple(
        _log_det(flatten(leading_block_submatrix(a, mu))) for mu in range(1, a.n + 1)
    )
    diagonal = tuple(_log_det(diagonal_block(a, mu)) for mu in range(1, a.n + 1))
    return _Profile(leading, diagonal)


def _bound_terms(
    profiles: Sequence[_Profile],
    block_dims: Sequence[int],
    partial: _Profile,
) -> List[BoundTerms]:
    """Per-mu brackets plus the induction quantities R_mu and S_mu.

    ``partial`` is the profile of the Khatri-Rao (or Hadamard) product of all
    but the last factor.
    """
    m = len(profiles)
    exponents = _exponents(block_dims)
    head_exponents = _exponents(block_dims[:-1])
    q_last = block_dims[-1]
    q_head = math.prod(block_dims[:-1])
    terms = []
    for mu in range(2, profiles[0].n + 1):
        ratios = tuple(logspace.scale(e, p.log_ratio(mu)) for e, p in zip(exponents, profiles))
        factor = logspace.log_sum_minus(ratios, m - 1)
        head = [logspace.scale(e, p.log_ratio(mu)) for e, p in zip(head_exponents, profiles[:-1])]
        r_mu = logspace.scale(q_last, logspace.log_sum_minus(head, m - 2))
        s_mu = logspace.log_sum_minus(
            [
                logspace.scale(q_last, partial.log_ratio(mu)),
                logspace.scale(q_head, profiles[-1].log_ratio(mu)),
            ],
            1,
        )
        terms.append(BoundTerms(mu, ratios, factor, r_mu, s_mu))
    return terms


def _product_report(
    name: str,
    lhs_log: float,
    profiles: Sequence[_Profile],
    block_dims: Sequence[int],
    partial: _Profile,
    tol: float,
    inputs: Sequence,
) -> InequalityReport:
    exponents = _exponents(block_dims)
    terms = _bound_terms(profiles, block_dims, partial)
    log_product = logspace.log_sum(e * p.log_det for e, p in zip(exponents, profiles))
    rhs = logspace.log_sum([log_product] + [t.factor_log for t in terms])
    return InequalityReport.build(
        name,
        lhs_log,
        rhs,
        tol,
        terms=tuple(terms),
        details={"logDetKhatriRao": lhs_log, "logDetProduct": log_product},
        inputs_hash=inputs_digest(inputs),
    )


def _hadamard_chain(name: str, mats: List[np.ndarray], tol: float) -> InequalityReport:
    _require_factors(len(mats))
    profiles = [_scalar_profile(a) for a in mats]
    lhs = _log_det(reduce(hadamard, mats))
    partial = profiles[0] if len(mats) == 2 else _scalar_profile(reduce(hadamard, mats[:-1]))
    return _product_report(name, lhs, profiles, (1,) * len(mats), partial, tol, mats)


def _khatri_rao_chain(name: str, factors, tol: float) -> InequalityReport:
    factors = _block_factors(factors)
    profiles = [_block_profile(f) for f in factors]
    lhs = _log_det(flatten(khatri_rao_all(factors)))
    if factors.m == 2:
        partial = profiles[0]
    else:
        partial = _block_profile(khatri_rao_all(factors.factors[:-1]))
    return _product_report(name, lhs, profiles, factors.block_dims, partial, tol, factors.factors)


# ---------------------------------------------------------------------------
# Classical inequalities
# ---------------------------------------------------------------------------

def hadamard_ineq(a, tol: float = DEFAULT_TOL) -> InequalityReport:
    """prod a_ii >= det A for positive semidefinite A."""
    (a,) = _matrices([a])
    lhs = logspace.log_sum(_log_diagonal(a))
    rhs = _log_det_psd(a)
    return InequalityReport.build("hadamard", lhs, rhs, tol, inputs_hash=inputs_digest([a]))


def fischer_ineq(a, split_row: int, tol: float = DEFAULT_TOL) -> InequalityReport:
    """prod a_ii >= det A_11 det A_22 >= det A for the split after ``split_row``."""
    (a,) = _matrices([a])
    dim = a.shape[0]
    if not 1 <= split_row < dim:
        raise IndexOutOfRange(f"split row {split_row} outside 1..{dim - 1}")
    diagonal = logspace.log_sum(_log_diagonal(a))
    blocks = logspace.log_sum(
        [_log_det_psd(a[:split_row, :split_row]), _log_det_psd(a[split_row:, split_row:])]
    )
    whole = _log_det_psd(a)
    links = (
        InequalityReport.build("fischer.diagonal", diagonal, blocks, tol),
        InequalityReport.build("fischer.blocks", blocks, whole, tol),
    )
    return InequalityReport.build(
        "fischer",
        diagonal,
        whole,
        tol,
        links=links,
        details={"logDetDiagonalBlocks": blocks, "splitRow": float(split_row)},
        inputs_hash=inputs_digest([a]),
    )


@dataclass(frozen=True)
class _PairLogs:
    hadamard: float
    det_a: float
    det_b: float
    diag_a: float
    diag_b: float

    @property
    def product(self) -> float:
        """log det(AB), as log det A + log det B."""
        return logspace.log_sum([self.det_a, self.det_b])

    @property
    def det_a_diag_b(self) -> float:
        return logspace.log_sum([self.det_a, self.diag_b])

    @property
    def det_b_diag_a(self) -> float:
        return logspace.log_sum([self.det_b, self.diag_a])

    def details(self) -> dict:
        return {
            "logDetHadamard": self.hadamard,
            "logDetA": self.det_a,
            "logDetB": self.det_b,
            "logDetProduct": self.product,
        }


def _pair_logs(a: np.ndarray, b: np.ndarray) -> _PairLogs:
    return _PairLogs(
        hadamard=_log_det_psd(hadamard(a, b)),
        det_a=_log_det_psd(a),
        det_b=_log_det_psd(b),
        diag_a=logspace.log_sum(_log_diagonal(a)),
        diag_b=logspace.log_sum(_log_diagonal(b)),
    )


def oppenheim_ineq(a, b, tol: float = DEFAULT_TOL) -> InequalityReport:
    """det(A o B) >= det A prod b_ii >= det(AB), and the symmetric chain."""
    a, b = _matrices([a, b])
    logs = _pair_logs(a, b)
    links = (
        InequalityReport.build("oppenheim.upper", logs.hadamard, logs.det_a_diag_b, tol),
        InequalityReport.build("oppenheim.lower", logs.det_a_diag_b, logs.product, tol),
        InequalityReport.build("oppenheim.symmetric.upper", logs.hadamard, logs.det_b_diag_a, tol),
        InequalityReport.build("oppenheim.symmetric.lower", logs.det_b_diag_a, logs.product, tol),
    )
    return InequalityReport.build(
        "oppenheim",
        logs.hadamard,
        logs.product,
        tol,
        links=links,
        details=logs.details(),
        inputs_hash=inputs_digest([a, b]),
    )


def oppenheim_schur_ineq(a, b, tol: float = DEFAULT_TOL) -> InequalityReport:
    """det(A o B) + det(AB) >= det A prod b_ii + det B prod a_ii."""
    a, b = _matrices([a, b])
    logs = _pair_logs(a, b)
    lhs = logspace.log_add(logs.hadamard, logs.product)
    rhs = logspace.log_add(logs.det_a_diag_b, logs.det_b_diag_a)
    return InequalityReport.build(
        "oppenheim_schur", lhs, rhs, tol, details=logs.details(), inputs_hash=inputs_digest([a, b])
    )


def chen_bound(a, b, tol: float = DEFAULT_TOL) -> InequalityReport:
    """det(A o B) >= det(AB) prod_mu (a_mu,mu det A_{mu-1}/det A_mu + (same for B) - 1).

    Requires positive definite A and B.
    """
    return _hadamard_chain("chen", _matrices([a, b]), tol)


# ---------------------------------------------------------------------------
# Khatri-Rao bounds
# ---------------------------------------------------------------------------

def thm21_bound(a: BlockMatrix, b: BlockMatrix, tol: float = DEFAULT_TOL) -> InequalityReport:
    """det(A * B) >= (det A)^q (det B)^p prod_mu (r_mu(A)^q + r_mu(B)^p - 1)."""
    return _khatri_rao_chain("thm21", [a, b], tol)


def kim_bound(a: BlockMatrix, b: BlockMatrix, tol: float = DEFAULT_TOL) -> InequalityReport:
    """The equal-block-order (p == q == k) case of :func:`thm21_bound`."""
    if a.p != b.p or a.q != b.q:
        raise DimensionMismatch(f"kim needs equal block orders, got {a.p}x{a.q} and {b.p}x{b.q}")
    return _khatri_rao_chain("kim", [a, b], tol)


def thm24_bound(factors, tol: float = DEFAULT_TOL) -> InequalityReport:
    """m-factor Khatri-Rao extension of :func:`thm21_bound`."""
    return _khatri_rao_chain("thm24", factors, tol)


def _arrangement_gap(lhs_add: float, rhs_add: float, lhs_ratio: float, rhs_ratio: float, log_p: float) -> float:
    """Difference of the two arrangements' slacks, both divided by prod (det A_i)^(Q/q_i).

    Scaled by the largest term so it is a relative quantity.
    """
    shifted = [x - log_p for x in (lhs_add, rhs_add, lhs_ratio, rhs_ratio)]
    top = max(shifted)
    e = [math.exp(x - top) for x in shifted]
    return abs((e[0] - e[1]) - (e[2] - e[3]))


def thm25_ineq(factors, tol: float = DEFAULT_TOL) -> InequalityReport:
    """Multi-factor Oppenheim-Schur inequality for the Khatri-Rao product.

    The top-level report is the additive arrangement

        det(prod* A_i) + (m-1) P >= sum_i (prod_mu det A_i,mu,mu)^(Q/q_i) prod_{j!=i} (det A_j)^(Q/q_j)

    with P = prod_i (det A_i)^(Q/q_i); it is defined for semidefinite factors.
    When every factor is positive definite the divided form

        det(prod* A_i) >= P (sum_i (prod_mu det A_i,mu,mu / det A_i)^(Q/q_i) - (m-1))

    is attached as link ``thm25.ratio`` and ``details["arrangementGap"]`` records
    how far the two slacks (divided by P) disagree.
    """
    factors = _block_factors(factors)
    m = factors.m
    exponents = _exponents(factors.block_dims)
    flats = [hermitian_part(flatten(f)) for f in factors]
    log_dets = [_log_det_psd(x) for x in flats]
    diag_products = [
        logspace.log_sum(_log_det_psd(diagonal_block(f, mu)) for mu in range(1, f.n + 1))
        for f in factors
    ]
    lhs_det = _log_det_psd(flatten(khatri_rao_all(factors)))
    log_p = logspace.log_sum(logspace.scale(e, d) for e, d in zip(exponents, log_dets))

    lhs = logspace.log_add(lhs_det, math.log(m - 1) + log_p)
    rhs = logspace.logsumexp(
        [
            logspace.log_sum(
                [logspace.scale(exponents[i], diag_products[i])]
                + [logspace.scale(exponents[j], log_dets[j]) for j in range(m) if j != i]
            )
            for i in range(m)
        ]
    )
    details = {"logDetKhatriRao": lhs_det, "logDetProduct": log_p}
    links: Tuple[InequalityReport, ...] = ()
    if all(math.isfinite(d) for d in log_dets):
        ratios = [
            logspace.scale(e, dp - ld) for e, dp, ld in zip(exponents, diag_products, log_dets)
        ]
        rhs_ratio = log_p + logspace.log_sum_minus(ratios, m - 1)
        links = (InequalityReport.build("thm25.ratio", lhs_det, rhs_ratio, tol),)
        details["arrangementGap"] = _arrangement_gap(lhs, rhs, lhs_det, rhs_ratio, log_p)
    return InequalityReport.build(
        "thm25",
        lhs,
        rhs,
        tol,
        links=links,
        details=details,
        inputs_hash=inputs_digest(factors.factors),
    )


# ---------------------------------------------------------------------------
# Hadamard-product corollaries
# ---------------------------------------------------------------------------

def coro26_bound(factors: Sequence, tol: float = DEFAULT_TOL) -> InequalityReport:
    """det(prod o A_i) >= prod det A_i * prod_mu (sum_i a_mu,mu det A_i,mu-1 / det A_i,mu - (m-1))."""
    return _hadamard_chain("coro26", _matrices(factors), tol)


def coro27_ineq(factors: Sequence, tol: float = DEFAULT_TOL) -> InequalityReport:
    """det(prod o A_i) + (m-1) prod det A_i >= sum_i prod_{j!=i} det A_j prod_mu a^(i)_mu,mu."""
    mats = _matrices(factors)
    m = len(mats)
    _require_factors(m)
    log_dets = [_log_det_psd(x) for x in mats]
    diags = [logspace.log_sum(_log_diagonal(x)) for x in mats]
    lhs_det = _log_det_psd(reduce(hadamard, mats))
    log_p = logspace.log_sum(log_dets)
    lhs = logspace.log_add(lhs_det, math.log(m - 1) + log_p)
    rhs = logspace.logsumexp(
        [logspace.log_sum([diags[i]] + [log_dets[j] for j in range(m) if j != i]) for i in range(m)]
    )
    return InequalityReport.build(
        "coro27",
        lhs,
        rhs,
        tol,
        details={"logDetHadamard": lhs_det, "logDetProduct": log_p},
        inputs_hash=inputs_digest(mats),
    )


# ---------------------------------------------------------------------------
# Scalar lemmas
# ---------------------------------------------------------------------------

def _at_least_one(values, what: str) -> np.ndarray:
    if np.iscomplexobj(values):
        raise DomainError(f"{what} must be real")
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise DomainError(f"{what} must be non-empty")
    if not np.all(np.isfinite(arr)) or np.any(arr < 1.0):
        raise DomainError(f"every entry of {what} must be a finite number >= 1")
    return arr


def _scalar_report(name: str, lhs: float, rhs: float, tol: float, inputs) -> InequalityReport:
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        raise DomainError(f"{name}: inputs too large for direct evaluation")
    return InequalityReport.build(
        name,
        math.log(lhs),
        math.log(rhs),
        tol,
        details={"lhs": lhs, "rhs": rhs},
        inputs_hash=inputs_digest(inputs),
    )


def lemma23_check(a, tol: float = DEFAULT_TOL) -> InequalityReport:
    """prod_mu (sum_i a_i,mu - (m-1)) >= sum_i prod_mu a_i,mu - (m-1) for an m x n array >= 1."""
    arr = _at_least_one(a, "lemma23 input")
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DomainError(f"lemma23 needs an m x n array, got {arr.ndim} dimensions")
    m, n = arr.shape
    rows = arr.tolist()
    lhs = math.prod(math.fsum(row[mu] for row in rows) - (m - 1) for mu in range(n))
    rhs = math.fsum(math.prod(row) for row in rows) - (m - 1)
    return _scalar_report("lemma23", lhs, rhs, tol, [arr])


def coro24_check(b, q: int, tol: float = DEFAULT_TOL) -> InequalityReport:
    """(sum b_i - (m-1))^q >= sum b_i^q - (m-1) for b_i >= 1 and integer q >= 1."""
    arr = _at_least_one(b, "coro24 input").reshape(-1)
    if isinstance(q, bool) or int(q) != q or q < 1:
        raise DomainError(f"coro24 exponent must be a positive integer, got {q!r}")
    q = int(q)
    m = arr.shape[0]
    values = arr.tolist()
    lhs = (math.fsum(values) - (m - 1)) ** q
    rhs = math.fsum(v ** q for v in values) - (m - 1)
    return _scalar_report("coro24", lhs, rhs, tol, [arr.reshape(1, -1), np.array([q])])


# ---------------------------------------------------------------------------
# Perturbation and proof-chain comparisons
# ---------------------------------------------------------------------------

def perturb_to_pd(a, delta: float) -> np.ndarray:
    """a + delta * (1 + ||a||_max) * I for a Hermitian semidefinite ``a``."""
    h = hermitian_part(a)
    if not math.isfinite(delta) or delta < 0:
        raise DomainError(f"perturbation must be a finite non-negative number, got {delta!r}")
    if delta == 0:
        return h
    shift = delta * (1.0 + max_norm(h))
    return h + shift * identity(h.shape[0])


def chen_improves_schur(a, b, tol: float = DEFAULT_TOL) -> InequalityReport:
    """Chen's lower bound on det(A o B) dominates det A prod b_ii + det B prod a_ii - det(AB)."""
    a, b = _matrices([a, b])
    chen = _hadamard_chain("chen", [a, b], tol)
    logs = _pair_logs(a, b)
    upper = logspace.log_add(logs.det_a_diag_b, logs.det_b_diag_a)
    schur = upper + math.log1p(-math.exp(logs.product - upper))
    return InequalityReport.build(
        "chen_vs_schur", chen.rhs_log, schur, tol, inputs_hash=inputs_digest([a, b])
    )


def thm24_dominates_thm25(factors, tol: float = DEFAULT_TOL) -> InequalityReport:
    """The product-over-mu bound dominates the divided Oppenheim-Schur form.

    This is the step that derives the multi-factor Oppenheim-Schur inequality
    from the product bound by the scalar lemma.
    """
    factors = _block_factors(factors)
    product = _khatri_rao_chain("thm24", factors, tol)
    divided = thm25_ineq(factors, tol)
    if not divided.links:
        raise NotPositiveDefinite("the divided arrangement needs positive definite factors")
    return InequalityReport.build(
        "thm24_vs_thm25",
        product.rhs_log,
        divided.links[0].rhs_log,
        tol,
        inputs_hash=product.inputs_hash,
    )
