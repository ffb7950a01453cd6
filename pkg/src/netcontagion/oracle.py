"""Brute-force ground truth for small instances.

Everything here goes through exhaustive subset sweeps or a naive
best-response fixpoint built directly on the incentive condition, so the
results are independent of the engine bookkeeping in
:mod:`netcontagion.contagion` and serve as its oracle in tests.  Size
guards refuse instances whose sweeps would not finish promptly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .contagion import cohesiveness
from .errors import InvariantViolationError, SizeGuardError
from .game import GameConfig, PlayerSet, has_incentive
from .graphs import Network
from .rational import as_rational, as_unit_rational

SIZE_GUARD = 20


def _guard(count: int, what: str):
    if count > SIZE_GUARD:
        raise SizeGuardError(
            f"{what} would sweep 2^{count} subsets; the guard is {SIZE_GUARD}")


class _MaskTable:
    """Precomputed per-player data for subset sweeps over bitmasks."""

    def __init__(self, cfg: GameConfig, q: Fraction):
        net = cfg.network
        n = net.node_count
        self.n = n
        self.q = q
        self.infected_mask = 0
        for i in cfg.infected:
            self.infected_mask |= 1 << i
        self.nbr_mask = [0] * n
        for i in range(n):
            for j in net.adjacency[i]:
                self.nbr_mask[i] |= 1 << j
        self.unit = cfg.weights.is_unit
        c = cfg.c
        self.c = c
        # c*w_i - phi_i(outside/pool_i), indexed by outside count.
        self.rhs: list[list[Fraction]] = []
        for i in range(n):
            pool = n - net.degree(i) - 1
            cw = c * cfg.weights.row_sum(i)
            row = []
            for outside in range(pool + 1):
                p = Fraction(0) if pool == 0 else Fraction(outside, pool)
                row.append(cw - cfg.global_effect.value(i, p, c, net.degree(i)))
            self.rhs.append(row)
        if not self.unit:
            # Weighted support for every subset of each neighborhood, keyed
            # by the raw restricted bitmask.
            self.support: list[dict[int, Fraction]] = []
            for i in range(n):
                sums = {0: Fraction(0)}
                for j in net.adjacency[i]:
                    w = cfg.weights.weight(i, j)
                    bit = 1 << j
                    sums.update({mask | bit: val + w for mask, val in sums.items()})
                self.support.append(sums)

    def is_nash_mask(self, mask: int) -> bool:
        if (mask & self.infected_mask) != self.infected_mask:
            return False
        q = self.q
        size = mask.bit_count()
        for i in range(self.n):
            bit = 1 << i
            inside = mask & bit
            if inside and (self.infected_mask & bit):
                continue
            k = (mask & self.nbr_mask[i]).bit_count()
            outside = size - k - (1 if inside else 0)
            if self.unit:
                cs = self.c * k
            else:
                cs = self.c * self.support[i][mask & self.nbr_mask[i]]
            willing = q == 0 or cs >= q * self.rhs[i][outside]
            if inside and not willing:
                return False
            if not inside and willing:
                return False
        return True


def enumerate_nash(cfg: GameConfig, q) -> list[PlayerSet]:
    """All Nash equilibria at q, by direct check of every subset.

    Sorted by cardinality, then lexicographically by member list.
    """
    q = as_unit_rational(q, "q")
    n = cfg.network.node_count
    _guard(n, "equilibrium enumeration")
    table = _MaskTable(cfg, q)
    found = []
    for mask in range(1 << n):
        if table.is_nash_mask(mask):
            found.append(frozenset(i for i in range(n) if mask >> i & 1))
    found.sort(key=lambda E: (len(E), tuple(sorted(E))))
    return found


def smallest_nash_containing(cfg: GameConfig, start: Iterable[int], q) -> PlayerSet:
    """Minimum-cardinality equilibrium containing ``start``.

    The full set always qualifies, so one exists.  Minimality should be
    attained uniquely; a tie is reported as an invariant violation.
    """
    q = as_unit_rational(q, "q")
    n = cfg.network.node_count
    start = cfg.player_set(start)
    _guard(n, "containing-equilibrium search")
    table = _MaskTable(cfg, q)
    start_mask = 0
    for i in start:
        start_mask |= 1 << i
    free = ((1 << n) - 1) & ~start_mask
    best_mask = None
    best_size = n + 1
    tie = False
    sub = free
    while True:
        mask = start_mask | sub
        if table.is_nash_mask(mask):
            size = mask.bit_count()
            if size < best_size:
                best_mask, best_size, tie = mask, size, False
            elif size == best_size and mask != best_mask:
                tie = True
        if sub == 0:
            break
        sub = (sub - 1) & free
    if best_mask is None:
        raise InvariantViolationError("no containing equilibrium; the full set "
                                      "should always qualify")
    if tie:
        raise InvariantViolationError(
            f"minimal containing equilibrium at q={q} is not unique")
    return frozenset(i for i in range(n) if best_mask >> i & 1)


def _best_response_limit(cfg: GameConfig, start: PlayerSet, q: Fraction) -> PlayerSet:
    """Naive synchronous best-response fixpoint from ``start`` (plus infected)."""
    E = frozenset(start) | cfg.infected
    nodes = range(cfg.network.node_count)
    while True:
        flips = frozenset(i for i in nodes
                          if i not in E and has_incentive(cfg, i, E, q))
        if not flips:
            return E
        E |= flips


def brute_threshold(cfg: GameConfig, start: Iterable[int]) -> Fraction:
    """Largest q in [0, 1] whose best-response limit is the full set.

    Candidate q values are every attainable switch boundary
    c*s / (c*w_i - phi_i(outside/pool_i)) over all players, attainable
    weighted supports s, and outside counts, plus 0 and 1; the limit is
    evaluated at each candidate from the top down.
    """
    n = cfg.network.node_count
    _guard(n, "threshold candidate sweep")
    start = cfg.player_set(start)
    c = cfg.c
    candidates = {Fraction(0), Fraction(1)}
    for i in range(n):
        nbrs = cfg.network.adjacency[i]
        supports = {Fraction(0)}
        for j in nbrs:
            w = cfg.weights.weight(i, j)
            supports |= {s + w for s in supports}
        pool = n - len(nbrs) - 1
        cw = c * cfg.weights.row_sum(i)
        for outside in range(pool + 1):
            p = Fraction(0) if pool == 0 else Fraction(outside, pool)
            rhs = cw - cfg.global_effect.value(i, p, c, len(nbrs))
            if rhs <= 0:
                continue
            for s in supports:
                t = c * s / rhs
                if 0 <= t <= 1:
                    candidates.add(t)
    full = frozenset(range(n))
    for t in sorted(candidates, reverse=True):
        if _best_response_limit(cfg, start, t) == full:
            return t
    raise InvariantViolationError("the limit at q = 0 must be the full set")


def brute_uniform_cohesion(net: Network, members: Iterable[int], r) -> bool:
    """Whether every nonempty subset of ``members`` is at most r-cohesive."""
    r = as_rational(r, "r")
    A = sorted(frozenset(int(i) for i in members))
    _guard(len(A), "uniform-cohesion sweep")
    for sub_bits in range(1, 1 << len(A)):
        subset = [A[pos] for pos in range(len(A)) if sub_bits >> pos & 1]
        if cohesiveness(net, subset) > r:
            return False
    return True
