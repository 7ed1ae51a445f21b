"""Value objects produced by bound evaluations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from . import logspace
from .serialize import decode_float, encode_float

DEFAULT_TOL = 1e-8

# Fischer's inequality makes every ratio term >= 1; this is the slack allowed
# for rounding when checking it.
FISCHER_TOL = 1e-9
_FISCHER_FLOOR = math.log1p(-FISCHER_TOL)


@dataclass(frozen=True)
class BoundTerms:
    """Per-mu diagnostics of a product-over-mu bound.

    ``ratio_terms`` holds, per factor i, the log of
    (det A_mu,mu * det A_{mu-1} / det A_mu) ** (Q / q_i). ``r_mu`` and ``s_mu``
    are the logs of the induction quantities R_mu and S_mu (None for m == 1);
    ``factor_log`` is the log of the mu-th bracket sum_i r_i - (m - 1).
    """

    mu: int
    ratio_terms: Tuple[float, ...]
    factor_log: float
    r_mu: Optional[float] = None
    s_mu: Optional[float] = None

    @property
    def fischer_ok(self) -> bool:
        values = list(self.ratio_terms)
        values += [v for v in (self.r_mu, self.s_mu) if v is not None]
        return all(v >= _FISCHER_FLOOR for v in values)

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "ratioTerms": [encode_float(x) for x in self.ratio_terms],
            "factorLog": encode_float(self.factor_log),
            "rMu": None if self.r_mu is None else encode_float(self.r_mu),
            "sMu": None if self.s_mu is None else encode_float(self.s_mu),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> BoundTerms:
        return cls(
            mu=int(doc["mu"]),
            ratio_terms=tuple(decode_float(x) for x in doc["ratioTerms"]),
            factor_log=decode_float(doc["factorLog"]),
            r_mu=None if doc.get("rMu") is None else decode_float(doc["rMu"]),
            s_mu=None if doc.get("sMu") is None else decode_float(doc["sMu"]),
        )


@dataclass(frozen=True)
class InequalityReport:
    """One evaluation LHS >= RHS in log space.

    ``holds`` is exactly ``margin_log >= -tol``. Chains and alternative
    arrangements are reported as ``links``; ``verified`` also requires every
    link to hold and every BoundTerms entry to pass the Fischer check.
    """

    name: str
    lhs_log: float
    rhs_log: float
    margin_log: float
    holds: bool
    tol: float
    terms: Tuple[BoundTerms, ...] = ()
    links: Tuple["InequalityReport", ...] = ()
    details: Dict[str, float] = field(default_factory=dict)
    inputs_hash: str = ""

    @classmethod
    def build(
        cls,
        name: str,
        lhs_log: float,
        rhs_log: float,
        tol: float = DEFAULT_TOL,
        **kwargs: Any,
    ) -> InequalityReport:
        margin = logspace.margin(lhs_log, rhs_log)
        return cls(name, lhs_log, rhs_log, margin, bool(margin >= -tol), tol, **kwargs)

    @property
    def verified(self) -> bool:
        return (
            self.holds
            and all(link.verified for link in self.links)
            and all(t.fischer_ok for t in self.terms)
        )

    def to_dict(self) -> dict:
        doc = {
            "name": self.name,
            "lhsLog": encode_float(self.lhs_log),
            "rhsLog": encode_float(self.rhs_log),
            "marginLog": encode_float(self.margin_log),
            "holds": self.holds,
            "tol": self.tol,
            "terms": [t.to_dict() for t in self.terms],
        }
        if self.links:
            doc["links"] = [link.to_dict() for link in self.links]
        if self.details:
            doc["details"] = {k: encode_float(v) for k, v in self.details.items()}
        if self.inputs_hash:
            doc["inputsHash"] = self.inputs_hash
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> InequalityReport:
        return cls(
            name=doc["name"],
            lhs_log=decode_float(doc["lhsLog"]),
            rhs_log=decode_float(doc["rhsLog"]),
            margin_log=decode_float(doc["marginLog"]),
            holds=bool(doc["holds"]),
            tol=float(doc["tol"]),
            terms=tuple(BoundTerms.from_dict(t) for t in doc.get("terms", [])),
            links=tuple(cls.from_dict(x) for x in doc.get("links", [])),
            details={k: decode_float(v) for k, v in doc.get("details", {}).items()},
            inputs_hash=doc.get("inputsHash", ""),
        )
