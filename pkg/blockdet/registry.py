"""Stable bound names and dispatch from decoded inputs to bound functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np

from . import bounds
from .block import BlockMatrix
from .errors import ShapeMismatch, UnknownBound
from .reports import DEFAULT_TOL, InequalityReport
from .serialize import ScalarArray

MATRIX = "matrix"
BLOCK = "block"
ARRAY = "array"


@dataclass(frozen=True)
class BoundSpec:
    """How a named bound consumes its inputs."""

    name: str
    kind: str
    min_inputs: int
    max_inputs: Optional[int]
    admits_psd: bool
    evaluate: Callable[[List[Any], float, Mapping[str, Any]], InequalityReport]
    summary: str = ""


def _one(fn):
    return lambda xs, tol, params: fn(xs[0], tol=tol)


def _two(fn):
    return lambda xs, tol, params: fn(xs[0], xs[1], tol=tol)


def _many(fn):
    return lambda xs, tol, params: fn(xs, tol=tol)


def _fischer(xs, tol, params):
    split = params.get("split")
    if split is None:
        split = xs[0].shape[0] // 2
    return bounds.fischer_ineq(xs[0], int(split), tol=tol)


def _coro24(xs, tol, params):
    return bounds.coro24_check(xs[0], int(params.get("q", 2)), tol=tol)


_SPECS = (
    BoundSpec("hadamard", MATRIX, 1, 1, True, _one(bounds.hadamard_ineq), "prod a_ii >= det A"),
    BoundSpec("fischer", MATRIX, 1, 1, True, _fischer, "prod a_ii >= det A11 det A22 >= det A"),
    BoundSpec("oppenheim", MATRIX, 2, 2, True, _two(bounds.oppenheim_ineq), "det(A o B) >= det A prod b_ii >= det(AB)"),
    BoundSpec("oppenheim_schur", MATRIX, 2, 2, True, _two(bounds.oppenheim_schur_ineq), "det(A o B) + det(AB) >= det A prod b_ii + det B prod a_ii"),
    BoundSpec("chen", MATRIX, 2, 2, False, _two(bounds.chen_bound), "product-over-mu refinement of Oppenheim-Schur"),
    BoundSpec("kim", BLOCK, 2, 2, False, _two(bounds.kim_bound), "Khatri-Rao bound, equal block orders"),
    BoundSpec("thm21", BLOCK, 2, 2, False, _two(bounds.thm21_bound), "Khatri-Rao bound, two factors"),
    BoundSpec("thm24", BLOCK, 2, None, False, _many(bounds.thm24_bound), "Khatri-Rao bound, m factors"),
    BoundSpec("thm25", BLOCK, 2, None, True, _many(bounds.thm25_ineq), "Khatri-Rao Oppenheim-Schur, m factors"),
    BoundSpec("coro26", MATRIX, 2, None, False, _many(bounds.coro26_bound), "Hadamard bound, m factors"),
    BoundSpec("coro27", MATRIX, 2, None, True, _many(bounds.coro27_ineq), "Hadamard Oppenheim-Schur, m factors"),
    BoundSpec("lemma23", ARRAY, 1, 1, False, _one(bounds.lemma23_check), "scalar product inequality for entries >= 1"),
    BoundSpec("coro24", ARRAY, 1, 1, False, _coro24, "scalar power inequality for entries >= 1"),
)

REGISTRY: Dict[str, BoundSpec] = {spec.name: spec for spec in _SPECS}

BOUND_NAMES = tuple(spec.name for spec in _SPECS)


def get_supported_bounds() -> List[str]:
    return list(BOUND_NAMES)


def get_bound(name: str) -> BoundSpec:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownBound(
            f"unknown bound {name!r}; supported: {', '.join(BOUND_NAMES)}"
        ) from None


def _check_inputs(spec: BoundSpec, inputs: Sequence[Any]) -> List[Any]:
    count = len(inputs)
    if count < spec.min_inputs or (spec.max_inputs is not None and count > spec.max_inputs):
        expected = (
            str(spec.min_inputs)
            if spec.min_inputs == spec.max_inputs
            else f"at least {spec.min_inputs}"
        )
        raise ShapeMismatch(f"{spec.name} takes {expected} input(s), got {count}")
    for i, value in enumerate(inputs):
        is_block = isinstance(value, BlockMatrix)
        if spec.kind == BLOCK and not is_block:
            raise ShapeMismatch(f"{spec.name} input {i} must be a block matrix")
        if spec.kind != BLOCK and is_block:
            raise ShapeMismatch(f"{spec.name} input {i} must not be a block matrix")
        if spec.kind == MATRIX:
            if isinstance(value, ScalarArray):
                raise ShapeMismatch(f"{spec.name} input {i} must be a matrix, got a scalar array")
            if np.ndim(value) != 2:
                raise ShapeMismatch(f"{spec.name} input {i} must be a 2-D matrix")
        if spec.kind == ARRAY:
            # decoded matrix documents are always complex128
            if np.iscomplexobj(value):
                raise ShapeMismatch(f"{spec.name} input {i} must be a real scalar array, got a matrix")
            if np.ndim(value) not in (1, 2):
                raise ShapeMismatch(f"{spec.name} input {i} must be a 1-D or 2-D scalar array")
    return list(inputs)


def evaluate_bound(
    name: str,
    inputs: Sequence[Any],
    tol: float = DEFAULT_TOL,
    params: Optional[Mapping[str, Any]] = None,
) -> InequalityReport:
    """Evaluate the bound registered as ``name`` on decoded inputs.

    ``params`` may carry ``split`` (fischer; default half the dimension) and
    ``q`` (coro24; default 2).
    """
    spec = get_bound(name)
    return spec.evaluate(_check_inputs(spec, inputs), tol, dict(params or {}))
