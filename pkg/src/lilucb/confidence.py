"""Finite-LIL confidence radii, parameter maps, and guarantee constants.

All logarithms are natural.  Radii are expressed as deviations of an
empirical *mean* after ``t`` samples (the partial-sum bound divided by ``t``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class Variant(str, enum.Enum):
    """Inner log argument: ``(1+eps) t`` (strict) or ``(1+eps) t + 2``."""

    STRICT = "strict"
    PLUS_TWO = "plus_two"


class InfeasibleError(ValueError):
    """No admissible exploration parameter exists for the given confidence."""


class VacuousBoundError(ValueError):
    """The failure-probability bound is not below one."""


@dataclass(frozen=True)
class LilParams:
    eps: float = 0.0
    delta: float = 0.05
    scale: float = 0.5
    variant: Variant = Variant.PLUS_TWO

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))


@dataclass(frozen=True)
class UcbParams:
    lil: LilParams
    beta: float = 1.0
    a: float = 9.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.a > 0:
            raise ValueError(f"a must be positive, got {self.a}")


def strict_delta_limit(eps: float) -> float:
    """Upper end of the admissible delta range for the strict bound."""
    return math.log1p(eps) / math.e


def validate_params(p: LilParams) -> str | None:
    """Return a description of the first violated constraint, or None."""
    if not (p.scale > 0 and math.isfinite(p.scale)):
        return f"scale must be positive, got {p.scale}"
    if not 0 < p.delta < 1:
        return f"delta must lie in (0, 1), got {p.delta}"
    if p.variant is Variant.STRICT:
        if not p.eps > 0:
            return f"strict variant requires eps > 0, got {p.eps}"
        limit = strict_delta_limit(p.eps)
        if not p.delta < limit:
            return (f"strict variant requires delta in (0, {limit:.3g}) "
                    f"for eps={p.eps:g}, got {p.delta:g}")
    elif not p.eps >= 0:
        return f"eps must be non-negative, got {p.eps}"
    return None


def _check(p: LilParams):
    msg = validate_params(p)
    if msg is not None:
        raise ValueError(msg)


def lil_radius(t: int, p: LilParams) -> float:
    """Anytime confidence radius for the mean of ``t`` samples."""
    if t < 1:
        raise ValueError(f"t must be at least 1, got {t}")
    _check(p)
    eps = p.eps
    inner = (1.0 + eps) * t
    if p.variant is Variant.PLUS_TWO:
        inner += 2.0
    loglog = math.log(inner)
    if loglog <= 0 or loglog / p.delta <= 1:
        raise ValueError(f"radius undefined at t={t} for {p}")
    return (1.0 + math.sqrt(eps)) * math.sqrt(
        2.0 * p.scale**2 * (1.0 + eps) * math.log(loglog / p.delta) / t
    )


def ucb_index(mean: float, t: int, up: UcbParams) -> float:
    return mean + (1.0 + up.beta) * lil_radius(t, up.lil)


def ls_radius(t: int, n: int, p: LilParams) -> float:
    """Radius of the union-bound stopping rule over ``n`` arms (always +2 form)."""
    if n < 2:
        raise ValueError(f"the stopping rule needs at least two arms, got n={n}")
    if t < 1:
        raise ValueError(f"t must be at least 1, got {t}")
    if not (p.scale > 0 and 0 < p.delta < 1 and p.eps >= 0):
        raise ValueError(f"invalid stopping-rule parameters {p}")
    eps = p.eps
    arg = 2.0 * n * math.log((1.0 + eps) * t + 2.0) / p.delta
    return (1.0 + math.sqrt(eps)) * math.sqrt(
        2.0 * p.scale**2 * (1.0 + eps) * math.log(arg) / t
    )


def rho(eps: float) -> float:
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return (2.0 + eps) / eps * (1.0 / math.log1p(eps)) ** (1.0 + eps)


def lil_failure_probability(eps: float, delta: float) -> float:
    """Probability that a walk ever crosses the strict LIL envelope (upper bound)."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return (2.0 + eps) / eps * (delta / math.log1p(eps)) ** (1.0 + eps)


def min_exploration_a(delta: float, beta: float) -> float:
    """Smallest stopping parameter ``a`` covered by the correctness guarantee.

    Raises InfeasibleError when the denominator ``1 - delta - sqrt(sqrt(delta)
    log(1/delta))`` is not positive.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    ratio = ((2.0 + beta) / beta) ** 2
    log_inv = math.log(1.0 / delta)
    denom = 1.0 - delta - math.sqrt(math.sqrt(delta) * log_inv)
    if denom <= 0:
        raise InfeasibleError(f"no admissible a at delta={delta:g} (denominator {denom:.3g})")
    numer = 1.0 + math.log(2.0 * math.log(ratio / delta)) / log_inv
    return numer / denom * ratio


def theorem_failure_bound(delta: float, eps: float) -> float:
    """``sqrt(rho delta) + 4 rho delta / (1 - rho delta)``; raises if vacuous."""
    rd = rho(eps) * delta
    if rd >= 1:
        raise VacuousBoundError(f"rho*delta = {rd:.4g} >= 1; the guarantee does not apply")
    return math.sqrt(rd) + 4.0 * rd / (1.0 - rd)


def map_confidence_theory(nu: float, eps: float) -> float:
    """Confidence handed to the index so that the overall error is about ``nu``."""
    if not 0 < nu < 1:
        raise ValueError(f"nu must lie in (0, 1), got {nu}")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return (nu * eps / (5.0 * (2.0 + eps))) ** (1.0 / (1.0 + eps))


def map_confidence_heuristic(nu: float) -> float:
    if not 0 < nu < 1:
        raise ValueError(f"nu must lie in (0, 1), got {nu}")
    return nu / 5.0
