"""Sampled verification of every registered bound.

Every instance is addressed by a seed path ``(bound index, sample index)``;
``derive_seed(suite seed, *path)`` fixes its shapes and entries, so serial
and parallel runs produce identical reports and any instance can be
regenerated or replayed on its own.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import bounds
from .block import BlockMatrix, flatten, khatri_rao, partition
from .config import SuiteConfig, resolve_threads
from .dense import hadamard, kronecker
from .errors import BlockdetError, ParseError
from .gen import (
    COMPLEX,
    REAL,
    GenConfig,
    SplitMix64,
    derive_seed,
    next_int,
    random_block_pd,
    random_block_psd_singular,
    random_ge1_array,
    random_pd,
    random_psd_singular,
)
from .registry import ARRAY, BLOCK, BOUND_NAMES, evaluate_bound, get_bound
from .reports import InequalityReport
from .serialize import decode_float, encode_float, input_from_dict, input_to_dict, load_json, write_json

logger = logging.getLogger(__name__)

EQUALITY_TOL = 1e-9
REDUCTION_TOL = 1e-12

LEMMA_MAX_ROWS = 6
LEMMA_MAX_COLS = 8
LEMMA_CAP = 1e3
CORO24_MAX_Q = 16


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Instance:
    """Inputs of one bound evaluation plus where they came from."""

    bound: str
    inputs: Tuple[Any, ...]
    params: Dict[str, Any] = field(default_factory=dict)
    seed_path: Tuple[int, ...] = ()
    perturbation: Optional[float] = None


def _scalar_kind(rng: SplitMix64) -> str:
    return COMPLEX if next_int(rng, 0, 1) else REAL


def _factor_count(spec, rng: SplitMix64, cfg: SuiteConfig) -> int:
    if spec.max_inputs is not None:
        return spec.max_inputs
    return next_int(rng, spec.min_inputs, cfg.max_factors)


def _perturb(value, delta: float):
    if isinstance(value, BlockMatrix):
        return partition(bounds.perturb_to_pd(flatten(value), delta), value.n, value.p, value.q)
    return bounds.perturb_to_pd(value, delta)


def sample_instance(name: str, cfg: SuiteConfig, sample_index: int) -> Instance:
    """The instance at ``(bound index, sample_index)`` of the suite stream."""
    spec = get_bound(name)
    path = (BOUND_NAMES.index(name), sample_index)
    seed = derive_seed(cfg.seed, *path)
    rng = SplitMix64(seed)
    params: Dict[str, Any] = {}

    if spec.kind == ARRAY:
        m = next_int(rng, 1, LEMMA_MAX_ROWS)
        if name == "coro24":
            params["q"] = next_int(rng, 1, CORO24_MAX_Q)
            values = random_ge1_array(derive_seed(seed, 0), 1, m, LEMMA_CAP)
        else:
            n = next_int(rng, 1, LEMMA_MAX_COLS)
            values = random_ge1_array(derive_seed(seed, 0), m, n, LEMMA_CAP)
        return Instance(name, (values,), params, path)

    m = _factor_count(spec, rng, cfg)
    n = next_int(rng, 2, cfg.max_n)
    kind = _scalar_kind(rng)
    if spec.kind == BLOCK:
        if name == "kim":
            block_dims = [next_int(rng, 1, cfg.max_block_dim)] * m
        else:
            block_dims = [next_int(rng, 1, cfg.max_block_dim) for _ in range(m)]
    else:
        if name == "fischer":
            params["split"] = next_int(rng, 1, n - 1)
        block_dims = [1] * m

    singular_at = -1
    deficit = 0
    if cfg.include_singular and sample_index % 2 == 1:
        singular_at = next_int(rng, 0, m - 1)
        q = block_dims[singular_at]
        if spec.kind == BLOCK:
            max_deficit = n * q - q
        elif name == "fischer":
            max_deficit = min(params["split"], n - params["split"])
        else:
            max_deficit = n - 1
        if max_deficit >= 1:
            deficit = next_int(rng, 1, max_deficit)
        else:
            singular_at = -1

    inputs = []
    for i, q in enumerate(block_dims):
        factor_seed = derive_seed(seed, i + 1)
        if spec.kind == BLOCK:
            gen = GenConfig(factor_seed, n=n, block_dim=q, cond_cap=cfg.cond_cap,
                            scalar_kind=kind, rank_deficit=deficit if i == singular_at else 0)
            value = random_block_psd_singular(gen) if i == singular_at else random_block_pd(gen)
        else:
            gen = GenConfig(factor_seed, dim=n, cond_cap=cfg.cond_cap,
                            scalar_kind=kind, rank_deficit=deficit if i == singular_at else 0)
            value = random_psd_singular(gen) if i == singular_at else random_pd(gen)
        inputs.append(value)

    perturbation = None
    if singular_at >= 0 and not spec.admits_psd:
        perturbation = 1.0 / cfg.cond_cap
        inputs[singular_at] = _perturb(inputs[singular_at], perturbation)
    return Instance(name, tuple(inputs), params, path, perturbation)


def serialize_instance(instance: Instance, report: Optional[InequalityReport], tol: float) -> dict:
    return {
        "bound": instance.bound,
        "inputs": [input_to_dict(x) for x in instance.inputs],
        "params": dict(instance.params),
        "tol": tol,
        "seedPath": list(instance.seed_path),
        "perturbation": instance.perturbation,
        "report": None if report is None else report.to_dict(),
    }


def load_instance(path: str | Path) -> Tuple[Instance, float]:
    """Read an instance file written by :func:`serialize_instance`."""
    doc = load_json(path)
    if not isinstance(doc, dict) or "inputs" not in doc or "bound" not in doc:
        raise ParseError(f"{path} is not an instance file")
    if not isinstance(doc["inputs"], list):
        raise ParseError("instance inputs must be a list")
    inputs = tuple(input_from_dict(x) for x in doc["inputs"])
    perturbation = doc.get("perturbation")
    instance = Instance(
        bound=str(doc["bound"]),
        inputs=inputs,
        params=dict(doc.get("params") or {}),
        seed_path=tuple(int(i) for i in doc.get("seedPath") or ()),
        perturbation=None if perturbation is None else decode_float(perturbation),
    )
    return instance, decode_float(doc.get("tol", bounds.DEFAULT_TOL))


def replay(instance_file: str | Path, bound_name: Optional[str] = None,
           tol: Optional[float] = None) -> InequalityReport:
    """Re-evaluate a stored instance, or a single input document under ``bound_name``."""
    doc = load_json(instance_file)
    if isinstance(doc, dict) and "inputs" in doc:
        instance, stored_tol = load_instance(instance_file)
        name = bound_name or instance.bound
        return evaluate_bound(name, list(instance.inputs),
                              stored_tol if tol is None else tol, instance.params)
    if bound_name is None:
        raise ParseError(f"{instance_file} holds a bare input; a bound name is required")
    return evaluate_bound(bound_name, [input_from_dict(doc)],
                          bounds.DEFAULT_TOL if tol is None else tol)


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Outcome:
    bound: str
    seed_path: Tuple[int, ...]
    margin_log: Optional[float] = None
    verified: bool = True
    perturbed: bool = False
    error: Optional[str] = None
    discrepancy: Optional[float] = None
    instance: Optional[dict] = None


@dataclass
class BoundStats:
    """Per-bound (or per-check) totals of a suite run."""

    name: str
    samples: int = 0
    violations: int = 0
    errors: int = 0
    perturbed: int = 0
    min_margin_log: Optional[float] = None
    margins: List[float] = field(default_factory=list, repr=False)
    equality_hits: int = 0
    violation_instances: List[dict] = field(default_factory=list)
    max_discrepancy: Optional[float] = None

    def add(self, outcome: Outcome) -> None:
        self.samples += 1
        if outcome.perturbed:
            self.perturbed += 1
        if outcome.error is not None:
            self.errors += 1
            return
        if not outcome.verified:
            self.violations += 1
            if outcome.instance is not None:
                self.violation_instances.append(outcome.instance)
        margin = outcome.margin_log
        if margin is not None:
            if self.min_margin_log is None or margin < self.min_margin_log:
                self.min_margin_log = margin
            if math.isfinite(margin):
                self.margins.append(margin)
            if abs(margin) <= EQUALITY_TOL:
                self.equality_hits += 1
        if outcome.discrepancy is not None:
            self.max_discrepancy = max(self.max_discrepancy or 0.0, outcome.discrepancy)

    @property
    def mean_margin_log(self) -> Optional[float]:
        if not self.margins:
            return None
        return math.fsum(self.margins) / len(self.margins)

    def to_dict(self) -> dict:
        doc = {
            "samples": self.samples,
            "violations": self.violations,
            "errors": self.errors,
            "perturbed": self.perturbed,
            "minMarginLog": None if self.min_margin_log is None else encode_float(self.min_margin_log),
            "meanMarginLog": None if self.mean_margin_log is None else encode_float(self.mean_margin_log),
            "equalityHits": self.equality_hits,
            "violationInstances": list(self.violation_instances),
        }
        if self.max_discrepancy is not None:
            doc["maxDiscrepancy"] = encode_float(self.max_discrepancy)
        return doc

    @classmethod
    def from_dict(cls, name: str, doc: dict) -> BoundStats:
        """Summary-only reconstruction; individual margins are not stored."""
        def _opt(key):
            value = doc.get(key)
            return None if value is None else decode_float(value)

        stats = cls(
            name=name,
            samples=int(doc.get("samples", 0)),
            violations=int(doc.get("violations", 0)),
            errors=int(doc.get("errors", 0)),
            perturbed=int(doc.get("perturbed", 0)),
            min_margin_log=_opt("minMarginLog"),
            equality_hits=int(doc.get("equalityHits", 0)),
            violation_instances=list(doc.get("violationInstances", [])),
            max_discrepancy=_opt("maxDiscrepancy"),
        )
        mean = _opt("meanMarginLog")
        if mean is not None:
            stats.margins = [mean]
        return stats


@dataclass
class SuiteReport:
    kind: str
    seed: int
    config: dict
    stats: Dict[str, BoundStats]
    wall_time: float = 0.0

    @property
    def violations(self) -> int:
        return sum(s.violations for s in self.stats.values())

    @property
    def errors(self) -> int:
        return sum(s.errors for s in self.stats.values())

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "environment": {"seed": self.seed, "config": self.config, "wallTime": self.wall_time},
            "bounds": {name: s.to_dict() for name, s in self.stats.items()},
            "totals": {
                "samples": sum(s.samples for s in self.stats.values()),
                "violations": self.violations,
                "errors": self.errors,
            },
        }

    @classmethod
    def from_dict(cls, doc: Any) -> SuiteReport:
        try:
            env = doc["environment"]
            stats = {name: BoundStats.from_dict(name, s) for name, s in doc["bounds"].items()}
            return cls(
                kind=str(doc.get("kind", "verify")),
                seed=int(env["seed"]),
                config=dict(env.get("config", {})),
                stats=stats,
                wall_time=float(env.get("wallTime", 0.0)),
            )
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ParseError(f"malformed suite report: {exc}") from None


# ---------------------------------------------------------------------------
# Suite execution
# ---------------------------------------------------------------------------

def evaluate_instance(instance: Instance, tol: float) -> Outcome:
    """Evaluate one instance; library errors become error outcomes."""
    perturbed = instance.perturbation is not None
    try:
        report = evaluate_bound(instance.bound, list(instance.inputs), tol, instance.params)
    except BlockdetError as exc:
        return Outcome(instance.bound, instance.seed_path, perturbed=perturbed,
                       error=f"{type(exc).__name__}: {exc}")
    verified = report.verified
    return Outcome(
        instance.bound,
        instance.seed_path,
        margin_log=report.margin_log,
        verified=verified,
        perturbed=perturbed,
        instance=None if verified else serialize_instance(instance, report, tol),
    )


def _run_sample(task: Tuple[str, SuiteConfig, int]) -> Outcome:
    name, cfg, index = task
    try:
        instance = sample_instance(name, cfg, index)
    except BlockdetError as exc:
        path = (BOUND_NAMES.index(name), index)
        return Outcome(name, path, error=f"{type(exc).__name__}: {exc}")
    return evaluate_instance(instance, cfg.tol)


def _map(fn: Callable, tasks: Sequence, threads: int) -> List:
    if threads <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    chunksize = max(1, len(tasks) // (threads * 8))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks, chunksize=chunksize))


def _collect(names: Sequence[str], outcomes: Sequence[Outcome]) -> Dict[str, BoundStats]:
    stats = {name: BoundStats(name) for name in names}
    for outcome in outcomes:
        if outcome.error is not None:
            logger.warning("%s %s failed: %s", outcome.bound, list(outcome.seed_path), outcome.error)
        elif not outcome.verified:
            logger.warning("%s violated at seed path %s (marginLog %s)",
                           outcome.bound, list(outcome.seed_path), outcome.margin_log)
        stats[outcome.bound].add(outcome)
    for s in stats.values():
        logger.info("%s: %d samples, %d violations, %d errors, min marginLog %s",
                    s.name, s.samples, s.violations, s.errors, s.min_margin_log)
    return stats


def run_suite(cfg: SuiteConfig, threads: Optional[int] = None) -> SuiteReport:
    """Sample and evaluate ``cfg.samples_per_bound`` instances of each bound."""
    cfg.validate()
    threads = resolve_threads() if threads is None else threads
    start = time.perf_counter()
    tasks = [(name, cfg, i) for name in cfg.bounds for i in range(cfg.samples_per_bound)]
    outcomes = _map(_run_sample, tasks, threads)
    stats = _collect(cfg.bounds, outcomes)
    return SuiteReport("verify", cfg.seed, cfg.to_dict(), stats, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# Reductions
# ---------------------------------------------------------------------------

def report_discrepancy(a: InequalityReport, b: InequalityReport) -> float:
    """Largest difference between the two reports' lhs, rhs and margin logs."""
    worst = 0.0
    for x, y in ((a.lhs_log, b.lhs_log), (a.rhs_log, b.rhs_log), (a.margin_log, b.margin_log)):
        if x == y:
            continue
        worst = max(worst, abs(x - y) if math.isfinite(x) and math.isfinite(y) else math.inf)
    return worst


def _array_discrepancy(x: np.ndarray, y: np.ndarray) -> float:
    if x.shape == y.shape and np.array_equal(x, y):
        return 0.0
    if x.shape != y.shape:
        return math.inf
    return float(np.max(np.abs(x - y)))


def _pd(seed: int, dim: int, cfg: SuiteConfig, kind: str) -> np.ndarray:
    return random_pd(GenConfig(seed, dim=dim, cond_cap=cfg.cond_cap, scalar_kind=kind))


def _unit(a: np.ndarray) -> BlockMatrix:
    n = a.shape[0]
    return partition(a, n, 1, 1)


def _reduction_sample(check: str, cfg: SuiteConfig, seed: int) -> Tuple[float, Optional[InequalityReport]]:
    """(discrepancy, dominance report) for one sample of ``check``."""
    rng = SplitMix64(seed)
    n = next_int(rng, 2, cfg.max_n)
    p = next_int(rng, 1, cfg.max_block_dim)
    q = next_int(rng, 1, cfg.max_block_dim)
    kind = _scalar_kind(rng)
    tol = cfg.tol

    if check in ("thm24_vs_thm21", "thm24_dominates_thm25"):
        a = random_block_pd(GenConfig(derive_seed(seed, 1), n=n, block_dim=p, cond_cap=cfg.cond_cap, scalar_kind=kind))
        b = random_block_pd(GenConfig(derive_seed(seed, 2), n=n, block_dim=q, cond_cap=cfg.cond_cap, scalar_kind=kind))
        if check == "thm24_vs_thm21":
            return report_discrepancy(bounds.thm24_bound([a, b], tol), bounds.thm21_bound(a, b, tol)), None
        return 0.0, bounds.thm24_dominates_thm25([a, b], tol)

    if check == "khatri_rao_vs_kronecker":
        a = _pd(derive_seed(seed, 1), p, cfg, kind)
        b = _pd(derive_seed(seed, 2), q, cfg, kind)
        kr = flatten(khatri_rao(BlockMatrix(1, p, p, ((a,),)), BlockMatrix(1, q, q, ((b,),))))
        return _array_discrepancy(kr, kronecker(a, b)), None

    a = _pd(derive_seed(seed, 1), n, cfg, kind)
    b = _pd(derive_seed(seed, 2), n, cfg, kind)
    if check == "thm21_vs_chen":
        return report_discrepancy(bounds.thm21_bound(_unit(a), _unit(b), tol), bounds.chen_bound(a, b, tol)), None
    if check == "coro26_vs_chen":
        return report_discrepancy(bounds.coro26_bound([a, b], tol), bounds.chen_bound(a, b, tol)), None
    if check == "coro27_vs_oppenheim_schur":
        return report_discrepancy(bounds.coro27_ineq([a, b], tol), bounds.oppenheim_schur_ineq(a, b, tol)), None
    if check == "thm25_vs_oppenheim_schur":
        return report_discrepancy(bounds.thm25_ineq([_unit(a), _unit(b)], tol),
                                  bounds.oppenheim_schur_ineq(a, b, tol)), None
    if check == "oppenheim_identity_vs_hadamard":
        upper = bounds.oppenheim_ineq(a, np.eye(n), tol).links[0]
        return report_discrepancy(upper, bounds.hadamard_ineq(a, tol)), None
    if check == "khatri_rao_vs_hadamard":
        kr = flatten(khatri_rao(_unit(a), _unit(b)))
        return _array_discrepancy(kr, hadamard(a, b)), None
    if check == "chen_improves_schur":
        return 0.0, bounds.chen_improves_schur(a, b, tol)
    raise KeyError(check)


REDUCTION_CHECKS = (
    "thm24_vs_thm21",
    "thm21_vs_chen",
    "coro26_vs_chen",
    "coro27_vs_oppenheim_schur",
    "thm25_vs_oppenheim_schur",
    "oppenheim_identity_vs_hadamard",
    "khatri_rao_vs_hadamard",
    "khatri_rao_vs_kronecker",
    "chen_improves_schur",
    "thm24_dominates_thm25",
)

BITWISE_CHECKS = frozenset({"khatri_rao_vs_hadamard", "khatri_rao_vs_kronecker"})


def _run_reduction(task: Tuple[str, SuiteConfig, int]) -> Outcome:
    check, cfg, index = task
    path = (REDUCTION_CHECKS.index(check), index)
    try:
        discrepancy, report = _reduction_sample(check, cfg, derive_seed(cfg.seed, len(BOUND_NAMES), *path))
    except BlockdetError as exc:
        return Outcome(check, path, error=f"{type(exc).__name__}: {exc}")
    if report is not None:
        return Outcome(check, path, margin_log=report.margin_log, verified=report.holds)
    limit = 0.0 if check in BITWISE_CHECKS else REDUCTION_TOL
    return Outcome(check, path, verified=discrepancy <= limit, discrepancy=discrepancy)


def check_reductions(cfg: SuiteConfig, threads: Optional[int] = None) -> SuiteReport:
    """Compare each bound with the bound it specializes to, on shared random inputs.

    Bound pairs must agree to ``REDUCTION_TOL`` log units and the Khatri-Rao
    product must equal the Hadamard (unit blocks) and Kronecker (one block)
    products bit for bit. Two dominance chains are checked as inequalities.
    """
    cfg.validate()
    threads = resolve_threads() if threads is None else threads
    start = time.perf_counter()
    tasks = [(check, cfg, i) for check in REDUCTION_CHECKS for i in range(cfg.samples_per_bound)]
    outcomes = _map(_run_reduction, tasks, threads)
    stats = _collect(REDUCTION_CHECKS, outcomes)
    return SuiteReport("reductions", cfg.seed, cfg.to_dict(), stats, time.perf_counter() - start)


def write_report(report: SuiteReport, path: str | Path | None) -> str:
    return write_json(report.to_dict(), path)
