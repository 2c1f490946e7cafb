"""Gaussian bandit instances, the benchmark scenarios, and hardness measures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

ONE_SPARSE = "one-sparse"
ALPHA = "alpha"
EXPLICIT = "explicit"

_KIND_ALIASES = {
    "one-sparse": ONE_SPARSE,
    "one_sparse": ONE_SPARSE,
    "onesparse": ONE_SPARSE,
    "1-sparse": ONE_SPARSE,
    "alpha": ALPHA,
    "explicit": EXPLICIT,
}

DEFAULT_SCALE = 0.5
ONE_SPARSE_TOP_MEAN = 0.5

# log(log(c / gap**2)) >= 1 for every gap in (0, 1]
H3_CONSTANT = math.exp(math.e)


@dataclass(frozen=True)
class ArmModel:
    """Gaussian arm with standard deviation ``scale``."""

    mean: float
    scale: float = DEFAULT_SCALE

    def __post_init__(self):
        if not math.isfinite(self.mean):
            raise ValueError(f"arm mean must be finite, got {self.mean}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"arm scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class ScenarioSpec:
    """Recipe for a benchmark instance.

    ``kind`` is one of ``"one-sparse"``, ``"alpha"`` or ``"explicit"``.  For
    ``alpha`` the instance has ``n + 1`` arms; for ``explicit`` ``n`` is taken
    from ``means`` when omitted.
    """

    kind: str
    n: int | None = None
    alpha: float | None = None
    means: tuple[float, ...] | None = None
    scale: float = DEFAULT_SCALE

    def __post_init__(self):
        kind = _KIND_ALIASES.get(str(self.kind).lower())
        if kind is None:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.means is not None:
            object.__setattr__(self, "means", tuple(float(m) for m in self.means))
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive, got {self.scale}")

        if kind == ONE_SPARSE:
            if self.n is None or int(self.n) != self.n or self.n < 2:
                raise ValueError("one-sparse scenario needs an integer n >= 2")
        elif kind == ALPHA:
            if self.n is None or int(self.n) != self.n or self.n < 1:
                raise ValueError("alpha scenario needs an integer n >= 1")
            if self.alpha is None or not 0 < self.alpha < 1:
                raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        else:
            if not self.means or len(self.means) < 2:
                raise ValueError("explicit scenario needs at least two means")
            if self.n is None:
                object.__setattr__(self, "n", len(self.means))
            elif self.n != len(self.means):
                raise ValueError(f"n={self.n} disagrees with {len(self.means)} means")
        if self.n is not None:
            object.__setattr__(self, "n", int(self.n))

    @property
    def label(self) -> str:
        if self.kind == ALPHA:
            return f"alpha={self.alpha:g}"
        return self.kind

    @property
    def ident(self) -> str:
        """Stable identifier used for seed derivation."""
        if self.kind == ALPHA:
            return f"alpha(n={self.n},alpha={self.alpha!r},scale={self.scale!r})"
        if self.kind == ONE_SPARSE:
            return f"one-sparse(n={self.n},scale={self.scale!r})"
        return f"explicit(means={list(self.means)!r},scale={self.scale!r})"

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "n": self.n}
        if self.kind == ALPHA:
            out["alpha"] = self.alpha
        if self.kind == EXPLICIT:
            out["means"] = list(self.means)
        out["scale"] = self.scale
        return out

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ScenarioSpec":
        known = {"kind", "n", "alpha", "means", "scale"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown scenario keys: {sorted(extra)}")
        means = d.get("means")
        return cls(
            kind=d["kind"],
            n=d.get("n"),
            alpha=d.get("alpha"),
            means=tuple(means) if means is not None else None,
            scale=d.get("scale", DEFAULT_SCALE),
        )


@dataclass(frozen=True)
class BanditInstance:
    """Immutable set of arms with a unique best arm."""

    arms: tuple[ArmModel, ...]
    scenario: ScenarioSpec | None = None
    _means: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        arms = tuple(self.arms)
        object.__setattr__(self, "arms", arms)
        if len(arms) < 2:
            raise ValueError("a bandit instance needs at least two arms")
        means = np.array([a.mean for a in arms], dtype=float)
        means.setflags(write=False)
        top = means.max()
        if np.count_nonzero(means == top) != 1:
            raise ValueError("no unique best arm: the maximum mean is attained more than once")
        object.__setattr__(self, "_means", means)

    @classmethod
    def from_means(cls, means: Sequence[float], scale: float = DEFAULT_SCALE) -> "BanditInstance":
        return cls(tuple(ArmModel(float(m), scale) for m in means))

    @property
    def n_arms(self) -> int:
        return len(self.arms)

    @property
    def means(self) -> np.ndarray:
        return self._means

    @property
    def scales(self) -> np.ndarray:
        return np.array([a.scale for a in self.arms], dtype=float)

    @property
    def scale(self) -> float:
        """Largest arm scale; the sub-Gaussian parameter handed to algorithms."""
        return max(a.scale for a in self.arms)

    @property
    def best_arm(self) -> int:
        return int(np.argmax(self._means))

    @property
    def gaps(self) -> np.ndarray:
        return self._means[self.best_arm] - self._means


def make_scenario(spec: ScenarioSpec) -> BanditInstance:
    """Build the bandit instance described by ``spec``."""
    if spec.kind == ONE_SPARSE:
        means = [ONE_SPARSE_TOP_MEAN] + [0.0] * (spec.n - 1)
    elif spec.kind == ALPHA:
        n, alpha = spec.n, spec.alpha
        means = [1.0] + [1.0 - (i / n) ** alpha for i in range(1, n + 1)]
    else:
        means = list(spec.means)
    return BanditInstance(tuple(ArmModel(m, spec.scale) for m in means), scenario=spec)


def best_arm(instance: BanditInstance) -> int:
    return instance.best_arm


def sample_arm(instance: BanditInstance, arm: int, rng: np.random.Generator) -> float:
    """Draw one reward from ``arm``."""
    if not 0 <= arm < instance.n_arms:
        raise IndexError(f"arm {arm} out of range for {instance.n_arms} arms")
    a = instance.arms[arm]
    return float(rng.normal(a.mean, a.scale))


def _suboptimal_gaps(instance: BanditInstance) -> np.ndarray:
    gaps = instance.gaps
    return np.delete(gaps, instance.best_arm)


def hardness_h1(instance: BanditInstance) -> float:
    """Sum of inverse squared gaps over the suboptimal arms."""
    gaps = _suboptimal_gaps(instance)
    return float(np.sum(1.0 / gaps**2))


def hardness_h3(instance: BanditInstance, c: float = H3_CONSTANT) -> float:
    """Sum over suboptimal arms of ``log(log(c / gap**2)) / gap**2``.

    Every gap must lie in (0, 1]; with the default ``c = e**e`` each
    log-log factor is at least one.
    """
    gaps = _suboptimal_gaps(instance)
    if np.any(gaps > 1):
        raise ValueError(f"hardness_h3 requires all gaps in (0, 1], largest is {gaps.max():g}")
    inv = 1.0 / gaps**2
    return float(np.sum(np.log(np.log(c * inv)) * inv))


class RewardStream:
    """Per-trial reward source with one independent substream per arm.

    The k-th pull of arm i always returns the same value for a given seed,
    whatever order the arms are pulled in and whether rewards are taken one
    at a time or in bulk.  Two algorithms run with the same seed therefore
    see common random numbers.
    """

    def __init__(self, instance: BanditInstance, seed, block: int = 64, max_block: int = 8192):
        n = instance.n_arms
        if not isinstance(seed, np.random.SeedSequence):
            seed = np.random.SeedSequence(seed)
        self._seeds = seed.spawn(n)
        self._rngs: list[np.random.Generator | None] = [None] * n
        self._means = instance.means.tolist()
        self._scales = instance.scales.tolist()
        self._first_block = block
        self._max_block = max_block
        self._arr = [np.empty(0)] * n
        self._buf: list[list[float]] = [[] for _ in range(n)]
        self._pos = [0] * n
        self._next_block = [block] * n
        self.count = 0

    def _refill(self, arm: int) -> None:
        rng = self._rngs[arm]
        if rng is None:
            rng = self._rngs[arm] = np.random.default_rng(self._seeds[arm])
        size = self._next_block[arm]
        self._next_block[arm] = min(2 * size, self._max_block)
        self._arr[arm] = rng.standard_normal(size)
        self._buf[arm] = self._arr[arm].tolist()
        self._pos[arm] = 0

    def pull(self, arm: int) -> float:
        pos = self._pos[arm]
        if pos == len(self._buf[arm]):
            self._refill(arm)
            pos = 0
        self._pos[arm] = pos + 1
        self.count += 1
        return self._means[arm] + self._scales[arm] * self._buf[arm][pos]

    def standard_normals(self, arm: int, k: int) -> np.ndarray:
        """Next ``k`` standard normal draws of ``arm``'s substream."""
        parts = []
        need = k
        while need > 0:
            if self._pos[arm] == len(self._buf[arm]):
                self._refill(arm)
            pos = self._pos[arm]
            take = min(need, len(self._buf[arm]) - pos)
            parts.append(self._arr[arm][pos:pos + take])
            self._pos[arm] = pos + take
            need -= take
        self.count += k
        return np.concatenate(parts) if parts else np.empty(0)

    def pull_many(self, arms: Sequence[int]) -> np.ndarray:
        """Rewards for the pull sequence ``arms``, identical to repeated :meth:`pull`."""
        arms = np.asarray(arms, dtype=np.intp)
        order = np.argsort(arms, kind="stable")
        sorted_arms = arms[order]
        bounds = np.flatnonzero(np.diff(sorted_arms)) + 1
        starts = np.concatenate(([0], bounds))
        ends = np.concatenate((bounds, [len(arms)]))
        out = np.empty(len(arms))
        for lo, hi in zip(starts.tolist(), ends.tolist()):
            if hi == lo:
                continue
            arm = int(sorted_arms[lo])
            z = self.standard_normals(arm, hi - lo)
            out[order[lo:hi]] = self._means[arm] + self._scales[arm] * z
        return out
