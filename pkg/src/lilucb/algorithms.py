"""Best-arm identification samplers.

Every sampler follows the same contract::

    arm = sampler.next_arm()
    sampler.update(arm, reward)
    sampler.recommendation     # None while running, arm index once stopped
    sampler.anytime_best()     # arm with the highest empirical mean

Ties are broken toward the lowest arm index everywhere.

lil'UCB keeps its indices in an :class:`~lilucb.heap.IndexedMaxHeap`; an
arm's index only depends on its own statistics, so each pull costs
O(log n).  The elimination algorithms are written as generator programs that
yield :class:`Round` schedules and receive the round-local empirical means.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Any, Callable, Generator, Iterable, Sequence

import numpy as np

from .confidence import (
    LilParams,
    UcbParams,
    Variant,
    lil_radius,
    ls_radius,
    map_confidence_heuristic,
    map_confidence_theory,
    validate_params,
)
from .heap import IndexedMaxHeap

LIL_UCB_THEORY = "lil_ucb_theory"
LIL_UCB_HEURISTIC = "lil_ucb_heuristic"
UCB1 = "ucb1"
SUCCESSIVE_ELIMINATION = "successive_elimination"
EXP_GAP = "exp_gap"
NONADAPTIVE = "nonadaptive"

KINDS = (LIL_UCB_THEORY, LIL_UCB_HEURISTIC, UCB1, SUCCESSIVE_ELIMINATION, EXP_GAP, NONADAPTIVE)

_KIND_ALIASES = {k: k for k in KINDS}
_KIND_ALIASES.update({
    "lil_ucb": LIL_UCB_THEORY,
    "lilucb": LIL_UCB_THEORY,
    "heuristic": LIL_UCB_HEURISTIC,
    "se": SUCCESSIVE_ELIMINATION,
    "exponential_gap": EXP_GAP,
    "uniform": NONADAPTIVE,
})

DEFAULT_LS_EPS = 0.01
DEFAULT_MAX_CACHE = 1 << 20


class ContractViolation(RuntimeError):
    """A sampler was driven out of protocol (wrong arm, pull after stop)."""


class SampleStats:
    """Per-arm pull counts and reward sums."""

    __slots__ = ("pulls", "sums", "total")

    def __init__(self, n_arms: int):
        self.pulls = [0] * n_arms
        self.sums = [0.0] * n_arms
        self.total = 0

    @classmethod
    def from_arrays(cls, pulls: Sequence[int], sums: Sequence[float]) -> "SampleStats":
        if len(pulls) != len(sums):
            raise ValueError("pulls and sums must have equal length")
        stats = cls(len(pulls))
        stats.pulls = [int(p) for p in pulls]
        stats.sums = [float(s) for s in sums]
        stats.total = sum(stats.pulls)
        return stats

    @classmethod
    def from_means(cls, means: Sequence[float], pulls: Sequence[int]) -> "SampleStats":
        return cls.from_arrays(pulls, [m * p for m, p in zip(means, pulls)])

    @property
    def n_arms(self) -> int:
        return len(self.pulls)

    def record(self, arm: int, reward: float) -> None:
        self.pulls[arm] += 1
        self.sums[arm] += reward
        self.total += 1

    def mean(self, arm: int) -> float:
        return self.sums[arm] / self.pulls[arm]

    def means(self) -> np.ndarray:
        """Empirical means; NaN for arms never pulled."""
        pulls = np.asarray(self.pulls, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(pulls > 0, np.asarray(self.sums) / pulls, np.nan)


def _argmax(values: Sequence[float]) -> int:
    # first maximum, i.e. lowest index on ties
    return int(np.argmax(np.asarray(values, dtype=float)))


def anytime_recommendation(stats: SampleStats) -> int:
    """Arm with the highest empirical mean."""
    if min(stats.pulls) < 1:
        raise ValueError("every arm must be pulled at least once")
    return _argmax(stats.means())


def lil_ucb_should_stop(stats: SampleStats | Sequence[int], a: float) -> int | None:
    """Exploration stopping rule: some arm holds ``T_i >= 1 + a * sum_{j!=i} T_j``.

    Returns the most-pulled arm when the rule fires.
    """
    pulls = stats.pulls if isinstance(stats, SampleStats) else list(stats)
    total = sum(pulls)
    top = _argmax(pulls)
    t_top = pulls[top]
    if t_top >= 1 + a * (total - t_top):
        return top
    return None


def ls_should_stop(stats: SampleStats, p: LilParams, n: int | None = None) -> int | None:
    """Union-bound stopping rule, evaluated by a full scan.

    Fires with the empirical leader when its lower bound is at least every
    other arm's upper bound.
    """
    n = stats.n_arms if n is None else n
    if min(stats.pulls) < 1:
        raise ValueError("every arm must be pulled at least once")
    means = stats.means()
    radii = np.array([ls_radius(t, n, p) for t in stats.pulls])
    leader = _argmax(means)
    upper = np.delete(means + radii, leader)
    if means[leader] - radii[leader] >= upper.max():
        return leader
    return None


def ucb1_scores(stats: SampleStats, scale: float = 0.5) -> np.ndarray:
    """UCB1 indices ``mean + 2 scale sqrt(2 log t / T_i)``."""
    pulls = np.asarray(stats.pulls, dtype=float)
    means = np.asarray(stats.sums) / pulls
    return means + 2.0 * scale * np.sqrt(2.0 * math.log(stats.total) / pulls)


class _RadiusTable:
    """Memoised radius as a function of the pull count."""

    __slots__ = ("values", "_fn", "_cap")

    def __init__(self, fn: Callable[[int], float], cap: int = DEFAULT_MAX_CACHE):
        self.values = [math.nan]
        self._fn = fn
        self._cap = cap

    def __call__(self, t: int) -> float:
        values = self.values
        if t < len(values):
            return values[t]
        if t > self._cap:
            return self._fn(t)
        fn = self._fn
        for s in range(len(values), t + 1):
            values.append(fn(s))
        return values[t]


class LilStoppingRule:
    """Incremental form of :func:`ls_should_stop`.

    Two indexed heaps track the empirical leader and the largest upper bound;
    only the pulled arm's entries change, so each update is O(log n).
    """

    def __init__(self, n_arms: int, params: LilParams):
        if n_arms < 2:
            raise ValueError("the stopping rule needs at least two arms")
        ls_radius(1, n_arms, params)  # validates
        self.n_arms = n_arms
        self.params = params
        self.radius = _RadiusTable(lambda t: ls_radius(t, n_arms, params))
        self._means = IndexedMaxHeap(n_arms)
        self._upper = IndexedMaxHeap(n_arms)
        self._radii = [math.nan] * n_arms

    def update(self, arm: int, mean: float, pulls: int) -> None:
        r = self.radius(pulls)
        self._radii[arm] = r
        self._means.set(arm, mean)
        self._upper.set(arm, mean + r)

    def check(self) -> int | None:
        if len(self._means) < self.n_arms:
            return None
        leader = self._means.top()
        lower = self._means.key(leader) - self._radii[leader]
        upper = self._upper
        rival = upper.top_key() if upper.top() != leader else upper.second_key()
        if lower >= rival:
            return leader
        return None


class Sampler:
    """Base class for the pull/update/status contract."""

    kind = "sampler"

    def __init__(self, n_arms: int):
        if n_arms < 2:
            raise ValueError(f"need at least two arms, got {n_arms}")
        self.n_arms = n_arms
        self.stats = SampleStats(n_arms)
        self.recommendation: int | None = None
        self.stop_reason: str | None = None

    @property
    def stopped(self) -> bool:
        return self.recommendation is not None

    def status(self) -> int | None:
        """Recommended arm once stopped, otherwise None."""
        return self.recommendation

    def next_arm(self) -> int:
        raise NotImplementedError

    def update(self, arm: int, reward: float) -> None:
        raise NotImplementedError

    def anytime_best(self) -> int:
        return anytime_recommendation(self.stats)

    def _guard(self) -> None:
        if self.recommendation is not None:
            raise ContractViolation(f"{self.kind}: pull requested after stop")

    def _stop(self, arm: int, reason: str) -> None:
        self.recommendation = int(arm)
        self.stop_reason = reason

    def advance(self, source, limit: int) -> int:
        """Run up to ``limit`` pulls against ``source``; returns pulls made."""
        done = 0
        while done < limit and self.recommendation is None:
            arm = self.next_arm()
            self.update(arm, source.pull(arm))
            done += 1
        return done


class LilUCB(Sampler):
    """lil'UCB: pull the arm with the largest LIL upper confidence bound.

    Stops when one arm has been pulled at least ``1 + a`` times the pulls of
    all other arms combined, or, when ``stopping`` is given, through the
    union-bound rule.
    """

    kind = "lil_ucb"

    def __init__(self, n_arms: int, params: UcbParams, stopping: LilParams | None = None):
        super().__init__(n_arms)
        msg = validate_params(params.lil)
        if msg is not None:
            raise ValueError(msg)
        self.params = params
        self._bonus = 1.0 + params.beta
        self._a = params.a
        self._radius = _RadiusTable(lambda t: lil_radius(t, params.lil))
        self._index = IndexedMaxHeap(n_arms)
        self._ls = LilStoppingRule(n_arms, stopping) if stopping is not None else None

    def index_value(self, arm: int) -> float:
        """Current upper confidence bound of a pulled arm."""
        return self._index.key(arm)

    def next_arm(self) -> int:
        self._guard()
        t = self.stats.total
        if t < self.n_arms:
            return t
        return self._index.top()

    def update(self, arm: int, reward: float) -> None:
        expected = self.next_arm()
        if arm != expected:
            raise ContractViolation(f"expected a pull of arm {expected}, got {arm}")
        self._record(arm, reward)

    def _record(self, arm: int, reward: float) -> None:
        stats = self.stats
        stats.record(arm, reward)
        pulls = stats.pulls[arm]
        mean = stats.sums[arm] / pulls
        self._index.set(arm, mean + self._bonus * self._radius(pulls))
        ls = self._ls
        if ls is not None:
            ls.update(arm, mean, pulls)
        total = stats.total
        if total < self.n_arms:
            return
        # only the pulled arm can newly satisfy the exploration rule
        if pulls >= 1 + self._a * (total - pulls):
            self._stop(lil_ucb_should_stop(stats, self._a), "exploration")
        elif ls is not None:
            leader = ls.check()
            if leader is not None:
                self._stop(leader, "lil-stopping")

    def advance(self, source, limit: int) -> int:
        if self.recommendation is not None:
            return 0
        done = 0
        n = self.n_arms
        while self.stats.total < n and done < limit and self.recommendation is None:
            arm = self.stats.total
            self._record(arm, source.pull(arm))
            done += 1
        heap = self._index._heap
        pull, record = source.pull, self._record
        while done < limit and self.recommendation is None:
            arm = heap[0]
            record(arm, pull(arm))
            done += 1
        return done


class UCB1Sampler(Sampler):
    """UCB1 sampling with the union-bound stopping rule."""

    kind = UCB1

    def __init__(self, n_arms: int, scale: float = 0.5, stopping: LilParams | None = None):
        super().__init__(n_arms)
        self.scale = scale
        self._ls = LilStoppingRule(n_arms, stopping) if stopping is not None else None
        self._pulls = np.zeros(n_arms)
        self._sums = np.zeros(n_arms)

    def next_arm(self) -> int:
        self._guard()
        t = self.stats.total
        if t < self.n_arms:
            return t
        bonus = 2.0 * self.scale * np.sqrt(2.0 * math.log(t) / self._pulls)
        return int(np.argmax(self._sums / self._pulls + bonus))

    def update(self, arm: int, reward: float) -> None:
        expected = self.next_arm()
        if arm != expected:
            raise ContractViolation(f"expected a pull of arm {expected}, got {arm}")
        stats = self.stats
        stats.record(arm, reward)
        self._pulls[arm] += 1
        self._sums[arm] += reward
        if self._ls is not None:
            self._ls.update(arm, stats.mean(arm), stats.pulls[arm])
            leader = self._ls.check()
            if leader is not None:
                self._stop(leader, "lil-stopping")


@dataclass(frozen=True)
class Round:
    """Cycle through ``arms`` until each has been pulled ``reps`` times."""

    arms: tuple[int, ...]
    reps: int

    @property
    def size(self) -> int:
        return len(self.arms) * self.reps


Program = Generator[Round, "dict[int, float]", int]

_BULK_CHUNK = 1 << 20
_BULK_MIN = 512


class ScheduledSampler(Sampler):
    """Sampler driven by a generator program of :class:`Round` schedules.

    The program receives, after each round, a dict mapping every arm of that
    round to its round-local empirical mean, and finally returns the
    recommended arm.  With a stopping rule attached it is checked after every
    pull; without one, whole rounds may be simulated in bulk.
    """

    def __init__(self, n_arms: int, stopping: LilParams | None = None):
        super().__init__(n_arms)
        self._ls = LilStoppingRule(n_arms, stopping) if stopping is not None else None
        self._program: Program | None = None
        self._round: Round | None = None
        self._pos = 0
        self._rsum: dict[int, float] = {}
        self.rounds_completed = 0

    def program(self) -> Program:
        raise NotImplementedError

    def _begin(self, rnd: Round) -> None:
        if rnd.reps < 1 or not rnd.arms:
            raise ContractViolation(f"empty round {rnd}")
        self._round = rnd
        self._pos = 0
        self._rsum = dict.fromkeys(rnd.arms, 0.0)

    def _ensure_started(self) -> None:
        if self._program is None:
            self._program = self.program()
            self._begin(next(self._program))

    def next_arm(self) -> int:
        self._guard()
        self._ensure_started()
        arms = self._round.arms
        return arms[self._pos % len(arms)]

    def update(self, arm: int, reward: float) -> None:
        expected = self.next_arm()
        if arm != expected:
            raise ContractViolation(f"expected a pull of arm {expected}, got {arm}")
        self._record(arm, reward)

    def _record(self, arm: int, reward: float) -> None:
        stats = self.stats
        stats.pulls[arm] += 1
        stats.sums[arm] += reward
        stats.total += 1
        self._rsum[arm] += reward
        self._pos += 1
        ls = self._ls
        if ls is not None:
            pulls = stats.pulls[arm]
            ls.update(arm, stats.sums[arm] / pulls, pulls)
            leader = ls.check()
            if leader is not None:
                self._stop(leader, "lil-stopping")
                self._program.close()
                return
        if self._pos == self._round.size:
            self._finish_round()

    def _finish_round(self) -> None:
        reps = self._round.reps
        means = {a: s / reps for a, s in self._rsum.items()}
        self.rounds_completed += 1
        try:
            nxt = self._program.send(means)
        except StopIteration as done:
            self._stop(done.value, "algorithm")
            return
        self._begin(nxt)

    def bulk_capacity(self) -> int:
        """Pulls that can be simulated without per-pull decisions."""
        if self._ls is not None or self.recommendation is not None:
            return 0
        self._ensure_started()
        return self._round.size - self._pos

    def bulk_update(self, source, k: int) -> None:
        """Simulate the next ``k`` scheduled pulls (``k <= bulk_capacity()``)."""
        if k > self.bulk_capacity():
            raise ContractViolation("bulk update exceeds the current round")
        arms = np.asarray(self._round.arms, dtype=np.intp)
        seq = arms[(self._pos + np.arange(k)) % len(arms)]
        rewards = source.pull_many(seq)
        counts = np.bincount(seq, minlength=self.n_arms)
        sums = np.bincount(seq, weights=rewards, minlength=self.n_arms)
        stats = self.stats
        for a in self._round.arms:
            c = int(counts[a])
            if c:
                s = float(sums[a])
                stats.pulls[a] += c
                stats.sums[a] += s
                self._rsum[a] += s
        stats.total += k
        self._pos += k
        if self._pos == self._round.size:
            self._finish_round()

    def advance(self, source, limit: int) -> int:
        done = 0
        while done < limit and self.recommendation is None:
            k = min(self.bulk_capacity(), limit - done, _BULK_CHUNK)
            if k >= _BULK_MIN:
                self.bulk_update(source, k)
                done += k
                continue
            self._guard()
            self._ensure_started()
            # per-pull path, stays inside the current round
            rnd = self._round
            arms, m = rnd.arms, len(rnd.arms)
            stop = done + min(limit - done, rnd.size - self._pos)
            pull, record = source.pull, self._record
            while done < stop:
                arm = arms[self._pos % m]
                record(arm, pull(arm))
                done += 1
                if self._round is not rnd or self.recommendation is not None:
                    break
        return done


class Nonadaptive(ScheduledSampler):
    """Cycle through a fixed random permutation of the arms."""

    kind = NONADAPTIVE

    def __init__(self, n_arms: int, rng: np.random.Generator,
                 stopping: LilParams | None = None):
        super().__init__(n_arms, stopping)
        self.permutation = tuple(int(i) for i in rng.permutation(n_arms))

    def program(self) -> Program:
        # only the stopping rule ends this schedule
        yield Round(self.permutation, 1 << 62)
        return self.permutation[0]


class SuccessiveElimination(ScheduledSampler):
    """Round-robin over active arms, dropping arms the leader dominates.

    After every full round all active arms share one pull count ``T`` and
    arm ``j`` is eliminated once ``mean_leader - r(T) >= mean_j + r(T)``, with
    ``r`` the union-bound radius.
    """

    kind = SUCCESSIVE_ELIMINATION

    def __init__(self, n_arms: int, params: LilParams):
        super().__init__(n_arms, None)
        ls_radius(1, n_arms, params)
        self.params = params
        self.active: list[int] = list(range(n_arms))

    def program(self) -> Program:
        stats = self.stats
        while len(self.active) > 1:
            yield Round(tuple(self.active), 1)
            pulls = stats.pulls[self.active[0]]
            r = ls_radius(pulls, self.n_arms, self.params)
            means = {a: stats.sums[a] / stats.pulls[a] for a in self.active}
            leader = max(self.active, key=lambda a: (means[a], -a))
            floor = means[leader] - r
            self.active = [a for a in self.active if a == leader or means[a] + r > floor]
        return self.active[0]


def median_elimination_budget(eps: float, delta: float, scale: float = 0.5) -> int:
    """Pulls per surviving arm in one median-elimination round."""
    return math.ceil((2.0 * scale) ** 2 * (4.0 / eps**2) * math.log(3.0 / delta))


def exp_gap_round_params(r: int, delta: float) -> tuple[float, float]:
    """Tolerance and confidence of exponential-gap round ``r`` (1-based)."""
    return 2.0 ** (-r) / 4.0, delta / (50.0 * r**3)


def exp_gap_budget(eps_r: float, delta_r: float, scale: float = 0.5) -> int:
    return math.ceil((2.0 * scale) ** 2 * (2.0 / eps_r**2) * math.log(2.0 / delta_r))


def median_elimination_rounds(arms: Iterable[int], eps: float, delta: float,
                              scale: float = 0.5) -> Program:
    """Median elimination as a round program; returns an eps-optimal arm.

    Each round samples every survivor with fresh samples and keeps the
    better half (ranked by round-local mean, ties to the lower index).
    """
    survivors = sorted(arms)
    eps_l, delta_l = eps / 4.0, delta / 2.0
    while len(survivors) > 1:
        means = yield Round(tuple(survivors), median_elimination_budget(eps_l, delta_l, scale))
        ranked = sorted(survivors, key=lambda a: (-means[a], a))
        survivors = sorted(ranked[: len(survivors) // 2])
        eps_l *= 0.75
        delta_l /= 2.0
    return survivors[0]


def median_elimination(pull: Callable[[int], float], arms: Iterable[int], eps: float,
                       delta: float, scale: float = 0.5) -> int:
    """Run median elimination against ``pull(arm) -> reward``.

    Returns an arm whose mean is within ``eps`` of the best of ``arms`` with
    probability at least ``1 - delta``.
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    arms = list(arms)
    if not arms:
        raise ValueError("median elimination needs at least one arm")
    prog = median_elimination_rounds(arms, eps, delta, scale)
    try:
        rnd = next(prog)
        while True:
            sums = dict.fromkeys(rnd.arms, 0.0)
            for _ in range(rnd.reps):
                for a in rnd.arms:
                    sums[a] += pull(a)
            rnd = prog.send({a: s / rnd.reps for a, s in sums.items()})
    except StopIteration as done:
        return done.value


class ExponentialGapElimination(ScheduledSampler):
    """Exponential-gap elimination.

    Round ``r`` samples the active arms for fresh round-local means, finds a
    reference arm by median elimination at tolerance ``eps_r / 2``, and drops
    every arm whose round mean is below the reference's by more than ``eps_r``.
    """

    kind = EXP_GAP

    def __init__(self, n_arms: int, delta: float, scale: float = 0.5,
                 stopping: LilParams | None = None):
        super().__init__(n_arms, stopping)
        if not 0 < delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {delta}")
        self.delta = delta
        self.scale = scale
        self.active: list[int] = list(range(n_arms))
        self.round_index = 0

    def program(self) -> Program:
        while len(self.active) > 1:
            self.round_index += 1
            eps_r, delta_r = exp_gap_round_params(self.round_index, self.delta)
            means = yield Round(tuple(self.active),
                                exp_gap_budget(eps_r, delta_r, self.scale))
            ref = yield from median_elimination_rounds(self.active, eps_r / 2.0, delta_r, self.scale)
            cut = means[ref] - eps_r
            self.active = [a for a in self.active if means[a] >= cut]
        return self.active[0]


@dataclass(frozen=True)
class AlgorithmSpec:
    """Algorithm choice plus optional parameter overrides.

    ``nu`` is the input confidence.  ``ls`` attaches the union-bound stopping
    rule; it defaults to on for every kind that uses it and is rejected for
    the heuristic preset, which only stops through the exploration rule.
    """

    kind: str
    nu: float | None = None
    ls: bool | None = None
    eps: float | None = None
    beta: float | None = None
    a: float | None = None
    delta: float | None = None
    scale: float | None = None

    def __post_init__(self):
        kind = _KIND_ALIASES.get(str(self.kind).lower().replace("-", "_").replace("'", ""))
        if kind is None:
            raise ValueError(f"unknown algorithm kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "kind", kind)
        if self.nu is not None and not 0 < self.nu < 1:
            raise ValueError(f"nu must lie in (0, 1), got {self.nu}")
        if kind == LIL_UCB_HEURISTIC and self.ls:
            raise ValueError("the lil'UCB heuristic stops only through its exploration rule")

    @property
    def uses_ls(self) -> bool:
        if self.kind == LIL_UCB_HEURISTIC:
            return False
        if self.kind == SUCCESSIVE_ELIMINATION:
            return True
        return True if self.ls is None else bool(self.ls)

    @property
    def label(self) -> str:
        if self.kind in (LIL_UCB_HEURISTIC, SUCCESSIVE_ELIMINATION):
            return self.kind
        return self.kind + ("+ls" if self.uses_ls else "")

    @property
    def ident(self) -> str:
        return repr(sorted(self.to_dict().items()))

    def with_default_nu(self, nu: float) -> "AlgorithmSpec":
        return self if self.nu is not None else replace(self, nu=nu)

    def to_dict(self) -> dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "AlgorithmSpec":
        known = {"kind", "nu", "ls", "eps", "beta", "a", "delta", "scale"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown algorithm keys: {sorted(extra)}")
        return cls(**d)

    def resolve(self, n_arms: int, scale: float = 0.5) -> dict[str, Any]:
        """Concrete parameters used on an instance with ``n_arms`` arms."""
        nu = 0.1 if self.nu is None else self.nu
        sigma = self.scale if self.scale is not None else scale
        out: dict[str, Any] = {"kind": self.kind, "label": self.label, "nu": nu,
                               "ls": self.uses_ls, "scale": sigma}
        kind = self.kind
        if kind == LIL_UCB_THEORY:
            eps = 0.01 if self.eps is None else self.eps
            beta = 1.0 if self.beta is None else self.beta
            a = ((2.0 + beta) / beta) ** 2 if self.a is None else self.a
            nu_alg = nu / 2.0 if self.uses_ls else nu
            delta = map_confidence_theory(nu_alg, eps) if self.delta is None else self.delta
            out.update(eps=eps, beta=beta, a=a, delta=delta, variant=Variant.PLUS_TWO.value)
            if self.uses_ls:
                out.update(ls_delta=nu / 2.0, ls_eps=eps)
        elif kind == LIL_UCB_HEURISTIC:
            eps = 0.0 if self.eps is None else self.eps
            out.update(
                eps=eps,
                beta=0.5 if self.beta is None else self.beta,
                a=1.0 + 10.0 / n_arms if self.a is None else self.a,
                delta=map_confidence_heuristic(nu) if self.delta is None else self.delta,
                variant=Variant.PLUS_TWO.value,
            )
        elif kind in (UCB1, NONADAPTIVE):
            eps = DEFAULT_LS_EPS if self.eps is None else self.eps
            if self.uses_ls:
                out.update(ls_delta=nu if self.delta is None else self.delta, ls_eps=eps)
        elif kind == SUCCESSIVE_ELIMINATION:
            out.update(delta=nu if self.delta is None else self.delta,
                       eps=DEFAULT_LS_EPS if self.eps is None else self.eps)
        elif kind == EXP_GAP:
            nu_alg = nu / 2.0 if self.uses_ls else nu
            out.update(delta=nu_alg if self.delta is None else self.delta,
                       round_tolerance="2^-r/4", round_confidence="delta/(50 r^3)",
                       median_elimination="eps/4, delta/2; x3/4, /2 per halving")
            if self.uses_ls:
                out.update(ls_delta=nu / 2.0,
                           ls_eps=DEFAULT_LS_EPS if self.eps is None else self.eps)
        return out


def make_sampler(spec: AlgorithmSpec, n_arms: int, scale: float = 0.5,
                 rng: np.random.Generator | None = None) -> Sampler:
    """Instantiate the sampler described by ``spec``.

    ``rng`` is only consumed by kinds with internal randomisation (the
    nonadaptive permutation).
    """
    p = spec.resolve(n_arms, scale)
    sigma = p["scale"]
    stopping = None
    if "ls_delta" in p:
        stopping = LilParams(eps=p["ls_eps"], delta=p["ls_delta"], scale=sigma)
    kind = spec.kind
    if kind in (LIL_UCB_THEORY, LIL_UCB_HEURISTIC):
        lil = LilParams(eps=p["eps"], delta=p["delta"], scale=sigma, variant=Variant(p["variant"]))
        return LilUCB(n_arms, UcbParams(lil, beta=p["beta"], a=p["a"]), stopping)
    if kind == UCB1:
        return UCB1Sampler(n_arms, sigma, stopping)
    if kind == SUCCESSIVE_ELIMINATION:
        return SuccessiveElimination(n_arms, LilParams(eps=p["eps"], delta=p["delta"], scale=sigma))
    if kind == EXP_GAP:
        return ExponentialGapElimination(n_arms, p["delta"], sigma, stopping)
    if rng is None:
        raise ValueError("the nonadaptive sampler needs a random generator")
    return Nonadaptive(n_arms, rng, stopping)
