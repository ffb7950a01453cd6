"""Best-response contagion algorithms and equilibrium objects.

``cascade`` runs synchronized best-response waves from a starting set at a
fixed q and returns the smallest Nash equilibrium containing it.
``full_contagion_threshold`` repeatedly lowers q by the smallest amount
that lets the cascade resume (bootstrapping from the previous equilibrium,
never from scratch) until the whole network deviates; the final q is the
contagion threshold q*: the cascade fills the network exactly for q <= q*.
The stagewise equilibria also determine the depth step function and the
virality of a starting set.

Waves are synchronous: each flip wave is computed against the frozen
current set, so flips within a wave do not see each other.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable

from ._engines import make_engine
from .errors import (
    InvariantViolationError,
    ParameterError,
    PreconditionError,
    UnsupportedHypothesisError,
)
from .game import GameConfig, PlayerSet, has_incentive
from .graphs import Network
from .rational import as_unit_rational, decimal_render, rational_str


@dataclass(frozen=True)
class CascadeResult:
    """Trace of one cascade: C_0, the flip waves, and the reached equilibrium."""

    final: PlayerSet
    waves: tuple[PlayerSet, ...]
    initial: PlayerSet
    subsets_checked: int

    @property
    def steps(self) -> int:
        return len(self.waves)

    def __post_init__(self):
        union = set(self.initial)
        for wave in self.waves:
            if not wave or union & wave:
                raise InvariantViolationError("waves must be nonempty and disjoint")
            union |= wave
        if union != set(self.final):
            raise InvariantViolationError("final set must equal C_0 plus the waves")


@dataclass(frozen=True)
class ThresholdStage:
    """One stage of the full-contagion search: equilibrium A_{n+1} = C(S, q_n)."""

    q: Fraction
    size: int
    members: PlayerSet | None = None

    def to_dict(self, include_members: bool = False) -> dict:
        out = {
            "q": {"num": self.q.numerator, "den": self.q.denominator,
                  "decimal": decimal_render(self.q)},
            "equilibrium_size": self.size,
        }
        if include_members and self.members is not None:
            out["equilibrium_members"] = sorted(self.members)
        return out


@dataclass(frozen=True)
class ThresholdResult:
    """Output of the full-network contagion search.

    ``stages[n]`` pairs q_n with the equilibrium reached by cascading at
    q_n; the q's strictly decrease from 1 to q* while the equilibria
    strictly grow to the full set.  ``marginal_players[n]`` is the
    lowest-indexed attainer of the max that produced ``stages[n+1].q``.
    """

    q_star: Fraction
    stages: tuple[ThresholdStage, ...]
    subsets_checked: int
    marginal_players: tuple[int, ...]
    node_count: int

    def __post_init__(self):
        if not self.stages or self.stages[0].q != 1:
            raise InvariantViolationError("stage sequence must start at q_0 = 1")
        for a, b in zip(self.stages, self.stages[1:]):
            if not (b.q < a.q and b.size > a.size):
                raise InvariantViolationError(
                    "q must strictly decrease and equilibria strictly grow")
        if self.stages[-1].size != self.node_count:
            raise InvariantViolationError("last equilibrium must be the full set")
        if self.q_star != self.stages[-1].q:
            raise InvariantViolationError("q_star must equal the last stage q")
        if len(self.marginal_players) != len(self.stages) - 1:
            raise InvariantViolationError("one marginal player per stage descent")

    def to_dict(self, include_members: bool = False) -> dict:
        return {
            "q_star": {"num": self.q_star.numerator,
                       "den": self.q_star.denominator,
                       "decimal": decimal_render(self.q_star)},
            "stages": [st.to_dict(include_members) for st in self.stages],
            "subsets_checked": self.subsets_checked,
            "marginal_players": list(self.marginal_players),
        }


@dataclass(frozen=True)
class DepthFunction:
    """Step function q -> reached fraction, stored by breakpoints.

    ``breakpoints`` are q_0 = 1 > q_1 > ... > q_N = q*; on the half-open
    interval (q_{n+1}, q_n] the value is ``interval_sizes[n] / node_count``,
    and on [0, q*] it is 1.
    """

    breakpoints: tuple[Fraction, ...]
    interval_sizes: tuple[int, ...]
    node_count: int
    _ascending: tuple[Fraction, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.interval_sizes) != len(self.breakpoints) - 1:
            raise InvariantViolationError("one interval value per breakpoint gap")
        object.__setattr__(self, "_ascending", tuple(reversed(self.breakpoints)))

    @classmethod
    def from_threshold(cls, result: ThresholdResult) -> "DepthFunction":
        return cls(
            breakpoints=tuple(st.q for st in result.stages),
            interval_sizes=tuple(st.size for st in result.stages[:-1]),
            node_count=result.node_count,
        )

    @property
    def q_star(self) -> Fraction:
        return self.breakpoints[-1]

    def to_dict(self) -> dict:
        return {
            "q_star": {"num": self.q_star.numerator, "den": self.q_star.denominator},
            "steps": [{"q_num": q.numerator, "q_den": q.denominator, "size": size}
                      for q, size in zip(self.breakpoints, self.interval_sizes)],
            "node_count": self.node_count,
        }


def depth_at(df: DepthFunction, q) -> Fraction:
    """Evaluate the depth step function, honoring (q_{n+1}, q_n] intervals."""
    q = as_unit_rational(q, "q")
    if q <= df.q_star:
        return Fraction(1)
    # q is in some (q_{n+1}, q_n]; locate q_n as the smallest breakpoint >= q.
    j = bisect_left(df._ascending, q)
    n = len(df.breakpoints) - 1 - j
    return Fraction(df.interval_sizes[n], df.node_count)


def _check_start_incentive(cfg: GameConfig, start: PlayerSet, q: Fraction):
    for i in sorted(start):
        if i in cfg.infected:
            continue  # exogenously infected players always have the incentive
        if not has_incentive(cfg, i, start, q):
            raise PreconditionError(
                f"player {i} has no incentive to deviate at q={rational_str(q)} "
                f"in the starting configuration", i)


def cascade(cfg: GameConfig, start: Iterable[int], q) -> CascadeResult:
    """Run best-response waves from ``start`` at resilience q.

    Every starting player must already have the incentive at q in the
    starting configuration (exogenously infected players always do); the
    result is then the smallest Nash equilibrium at q containing the start.
    """
    q = as_unit_rational(q, "q")
    start = cfg.player_set(start)
    _check_start_incentive(cfg, start, q)
    engine = make_engine(cfg)
    initial = start | cfg.infected
    engine.start(initial)
    waves: list[PlayerSet] = []
    checked = 0
    while engine.uninfected_count() > 0:
        flips = engine.flip_candidates(q)
        checked += 1
        if len(flips) == 0:
            break
        engine.apply(flips)
        waves.append(frozenset(int(i) for i in flips))
    return CascadeResult(final=engine.infected_set(), waves=tuple(waves),
                         initial=initial, subsets_checked=checked)


def full_contagion_threshold(cfg: GameConfig, start: Iterable[int], *,
                             collect_members: bool = True) -> ThresholdResult:
    """Find the contagion threshold q* and the stagewise equilibria.

    Every starting player must have the incentive at q = 1 (as exogenously
    infected players do).  Each stage resumes the cascade from the previous
    equilibrium at the largest q that switches some outsider; by the
    bootstrap property the resumed cascade reaches exactly C(start, q).
    ``collect_members=False`` keeps only equilibrium sizes, which the
    Monte Carlo harness uses to avoid materializing large member sets.
    """
    one = Fraction(1)
    start = cfg.player_set(start)
    _check_start_incentive(cfg, start, one)
    engine = make_engine(cfg)
    engine.start(start | cfg.infected)
    n = cfg.network.node_count
    q = one
    stages: list[ThresholdStage] = []
    marginals: list[int] = []
    checked = 0
    while True:
        first_evaluation = True
        while engine.uninfected_count() > 0:
            flips = engine.flip_candidates(q)
            # The resumed stage re-examines the set whose evaluation ended
            # the previous stage; it is counted once, not twice.
            if not (first_evaluation and stages):
                checked += 1
            first_evaluation = False
            if len(flips) == 0:
                break
            engine.apply(flips)
        remaining = engine.uninfected_count()
        stages.append(ThresholdStage(
            q=q, size=n - remaining,
            members=engine.infected_set() if collect_members else None))
        if remaining == 0:
            break
        threshold, attainers = engine.max_threshold()
        if not threshold < q:
            raise InvariantViolationError(
                f"stage threshold {threshold} did not decrease below {q}")
        marginals.append(attainers[0])
        q = threshold
    return ThresholdResult(q_star=q, stages=tuple(stages),
                           subsets_checked=checked,
                           marginal_players=tuple(marginals), node_count=n)


def depth_function(cfg: GameConfig, start: Iterable[int]) -> DepthFunction:
    """Depth of contagion from ``start`` as a step function of q."""
    return DepthFunction.from_threshold(
        full_contagion_threshold(cfg, start, collect_members=False))


def virality(cfg: GameConfig, start: Iterable[int], q) -> Fraction:
    """Equilibrium spread beyond the starting set: depth minus |start|/I."""
    start = cfg.player_set(start)
    result = cascade(cfg, start, q)
    n = cfg.network.node_count
    return Fraction(len(result.final), n) - Fraction(len(start), n)


def is_nash(cfg: GameConfig, members: Iterable[int], q) -> bool:
    """Direct equilibrium check: infected inside, insiders willing, outsiders not."""
    q = as_unit_rational(q, "q")
    E = cfg.player_set(members)
    if not cfg.infected <= E:
        return False
    for i in range(cfg.network.node_count):
        inside = i in E
        if inside and i not in cfg.infected:
            if not has_incentive(cfg, i, E, q):
                return False
        elif not inside:
            if has_incentive(cfg, i, E, q):
                return False
    return True


def coexisting_conventions(cfg: GameConfig, start: Iterable[int], q) -> PlayerSet | None:
    """Smallest equilibrium strictly between empty and full containing ``start``.

    Returns None when the cascade from ``start`` fills the network (no
    coexistence extending this set) or when it is empty.
    """
    start = cfg.player_set(start)
    if not start:
        raise ParameterError("starting set must be nonempty")
    final = cascade(cfg, start, q).final
    if final and len(final) < cfg.network.node_count:
        return final
    return None


def cohesiveness(net: Network, members: Iterable[int]) -> Fraction:
    """Largest r such that every member has at least fraction r of its
    neighbors inside the set (unit-weight notion)."""
    S = frozenset(int(i) for i in members)
    if not S:
        raise ParameterError("cohesiveness of the empty set is undefined")
    best: Fraction | None = None
    for i in S:
        if not 0 <= i < net.node_count:
            raise ParameterError(f"player {i} out of range")
        nbrs = net.adjacency[i]
        if not nbrs:
            continue  # no neighbors: vacuously as cohesive as anything
        inside = sum(1 for j in nbrs if j in S)
        ratio = Fraction(inside, len(nbrs))
        if best is None or ratio < best:
            best = ratio
    return Fraction(1) if best is None else best


def is_uniformly_at_most_cohesive(cfg: GameConfig, members: Iterable[int], r) -> bool:
    """Whether every nonempty subset of ``members`` is at most r-cohesive.

    Only supported for local-effects-only unit-weight games, where the
    answer equals the contagion test: seed the complement exogenously, and
    compare 1 - r with the resulting contagion threshold.  The
    configuration's own infected set plays no role here; the question is a
    property of the network alone.
    """
    r = as_unit_rational(r, "r")
    if not cfg.weights.is_unit or not cfg.global_effect.is_zero:
        raise UnsupportedHypothesisError(
            "uniform cohesion via the threshold route requires unit weights "
            "and no global effects")
    A = cfg.player_set(members)
    complement = frozenset(range(cfg.network.node_count)) - A
    seeded = replace(cfg, infected=complement)
    result = full_contagion_threshold(seeded, complement, collect_members=False)
    return 1 - r <= result.q_star
