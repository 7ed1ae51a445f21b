"""Log-domain arithmetic for sums and differences of huge positive terms."""

import math
from typing import Iterable, Sequence

LOG_ZERO = float("-inf")
LOG_ONE = 0.0

# exp() overflows just above 709.78
_EXP_LIMIT = 700.0


def log(x: float) -> float:
    """Natural log taking zero to negative infinity."""
    if x == 0.0:
        return LOG_ZERO
    return math.log(x)


def log_add(log_a: float, log_b: float) -> float:
    """log(exp(log_a) + exp(log_b))."""
    if log_a < log_b:
        log_a, log_b = log_b, log_a
    if log_b == LOG_ZERO:
        return log_a
    return log_a + math.log1p(math.exp(log_b - log_a))


def logsumexp(xs: Sequence[float]) -> float:
    """Max-factored log-domain sum of ``xs``.

    The maximum is pulled out first so every remaining term is at most one;
    ``expm1``/``log1p`` keep the relative error near one ulp per term.
    """
    xs = list(xs)
    if not xs:
        return LOG_ZERO
    maximum = max(xs)
    if math.isinf(maximum):
        return maximum
    total = math.fsum(math.expm1(x - maximum) for x in xs)
    return maximum + math.log1p(total + float(len(xs) - 1))


def log_sum_minus(xs: Sequence[float], k: int) -> float:
    """log(sum(exp(x) for x in xs) - k).

    Used for the bracket ``sum_i r_i - (m - 1)`` of the Oppenheim-type bounds,
    where every r_i is at least one. Returns ``LOG_ZERO`` when the difference is
    not positive.
    """
    xs = list(xs)
    if not xs:
        return LOG_ZERO if k >= 0 else math.log(-k)
    maximum = max(xs)
    if maximum < _EXP_LIMIT:
        # sum(e^x) - k == (len - k) + sum(e^x - 1)
        total = math.fsum(math.expm1(x) for x in xs) + float(len(xs) - k)
        if total <= 0.0:
            return LOG_ZERO
        return math.log(total)
    total = math.fsum(math.exp(x - maximum) for x in xs) - k * math.exp(-maximum)
    if total <= 0.0:
        return LOG_ZERO
    return maximum + math.log(total)


def log_sum(values: Iterable[float]) -> float:
    """Plain (not exponentiated) sum of log values, i.e. the log of a product."""
    values = list(values)
    if any(v == LOG_ZERO for v in values):
        return LOG_ZERO
    return math.fsum(values)


def scale(exponent: int, log_value: float) -> float:
    """log(x ** exponent) for an exact integer exponent."""
    if log_value == LOG_ZERO:
        return LOG_ZERO
    return exponent * log_value


def margin(lhs_log: float, rhs_log: float) -> float:
    """lhs_log - rhs_log with zero-determinant conventions.

    Both sides zero is an equality (margin 0); a zero right-hand side with a
    positive left-hand side holds with infinite margin.
    """
    if rhs_log == LOG_ZERO:
        return 0.0 if lhs_log == LOG_ZERO else math.inf
    if lhs_log == LOG_ZERO:
        return -math.inf
    return lhs_log - rhs_log
