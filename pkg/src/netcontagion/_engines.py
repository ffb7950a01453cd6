"""Internal incentive-evaluation engines for the contagion algorithms.

Both engines maintain an evolving deviating set and answer, for the current
set, which outsiders have the incentive at a given q and what the exact
largest outsider switch threshold is.  ``ExactEngine`` works on any
configuration with Fraction arithmetic.  ``FastEngine`` covers the
unit-weight parametric case with vectorized int64 arithmetic; every
comparison it makes is exact (products are bounds-checked against the int64
range up front, with a big-int fallback for oversized q), so the two
engines are interchangeable and are property-tested against each other.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import InvariantViolationError
from .game import GameConfig, ParametricGlobalEffect

_INT64_SAFE = 2**62


class ExactEngine:
    """Fraction-arithmetic engine; the reference implementation."""

    def __init__(self, cfg: GameConfig):
        self.cfg = cfg
        net = cfg.network
        self.n = net.node_count
        self.adj = net.adjacency
        self.rows = [cfg.weights.row(i) for i in range(self.n)]
        self.c = cfg.c
        self.cw = [cfg.c * cfg.weights.row_sum(i) for i in range(self.n)]
        self.pool = [self.n - net.degree(i) - 1 for i in range(self.n)]
        self._rhs_cache: dict[tuple[int, int], Fraction] = {}

    def start(self, initial: frozenset[int]):
        self.infected = bytearray(self.n)
        self.s = [Fraction(0)] * self.n
        self.k = [0] * self.n
        self.K = len(initial)
        self.uninf = set(range(self.n))
        for j in initial:
            self.infected[j] = 1
            self.uninf.discard(j)
        for j in initial:
            for nb in self.adj[j]:
                self.s[nb] += self.rows[nb][j]
                self.k[nb] += 1

    def uninfected_count(self) -> int:
        return len(self.uninf)

    def infected_set(self) -> frozenset[int]:
        return frozenset(i for i in range(self.n) if self.infected[i])

    def _rhs(self, i: int, outside: int) -> Fraction:
        # c*w_i - phi_i(p_i) with p_i = outside / pool_i (0 on empty pool).
        key = (i, outside)
        val = self._rhs_cache.get(key)
        if val is None:
            pool = self.pool[i]
            p = Fraction(0) if pool == 0 else Fraction(outside, pool)
            val = self.cw[i] - self.cfg.global_effect.value(
                i, p, self.c, len(self.adj[i]))
            self._rhs_cache[key] = val
        return val

    def flip_candidates(self, q: Fraction) -> list[int]:
        flips = []
        c = self.c
        for i in sorted(self.uninf):
            if q == 0 or c * self.s[i] >= q * self._rhs(i, self.K - self.k[i]):
                flips.append(i)
        return flips

    def apply(self, flips) -> None:
        for j in flips:
            self.infected[j] = 1
            self.uninf.discard(j)
        self.K += len(flips)
        for j in flips:
            for nb in self.adj[j]:
                self.s[nb] += self.rows[nb][j]
                self.k[nb] += 1

    def max_threshold(self) -> tuple[Fraction, list[int]]:
        """Exact max of c*s_i/(c*w_i - phi_i) over outsiders, with attainers."""
        best: Fraction | None = None
        attainers: list[int] = []
        c = self.c
        for i in sorted(self.uninf):
            rhs = self._rhs(i, self.K - self.k[i])
            if rhs <= 0:
                raise InvariantViolationError(
                    f"player {i} has nonpositive threshold denominator {rhs} "
                    f"while still outside the set")
            t = c * self.s[i] / rhs
            if best is None or t > best:
                best, attainers = t, [i]
            elif t == best:
                attainers.append(i)
        if best is None:
            raise InvariantViolationError("no outsiders left to compute a threshold")
        return best, attainers


class FastEngineUnavailable(Exception):
    """Configuration or size outside the vectorized engine's exact range."""


class FastEngine:
    """Vectorized exact engine for unit weights and parametric global effect.

    With unit weights the deviation condition at q = qn/qd reduces to the
    integer comparison

        k_i * qd * ad * pool_i  >=  qn * d_i * (ad*pool_i - an*(K - k_i))

    (``alpha = an/ad``; for pool_i = 0 the condition is k_i*qd >= qn*d_i).
    All products are pre-bounded against int64.
    """

    def __init__(self, cfg: GameConfig):
        if not cfg.weights.is_unit or not isinstance(cfg.global_effect,
                                                     ParametricGlobalEffect):
            raise FastEngineUnavailable("requires unit weights and parametric effect")
        alpha = cfg.global_effect.alpha
        self.an, self.ad = alpha.numerator, alpha.denominator
        net = cfg.network
        self.n = net.node_count
        # Threshold cross-products reach ad*(ad+an)*n^4; stay well inside int64.
        if self.ad * (self.ad + self.an) * self.n**4 >= _INT64_SAFE:
            raise FastEngineUnavailable("node count too large for int64 products")
        self.indptr, self.indices = net.csr
        self.deg = np.diff(self.indptr)
        self.pool = self.n - 1 - self.deg
        self.has_empty_pool = bool((self.pool == 0).any())

    def start(self, initial: frozenset[int]):
        n = self.n
        self.infected = np.zeros(n, dtype=bool)
        if initial:
            self.infected[list(initial)] = True
        self.K = int(self.infected.sum())
        k = np.zeros(n, dtype=np.int64)
        for j in initial:
            k[self.indices[self.indptr[j]:self.indptr[j + 1]]] += 1
        self.ids = np.flatnonzero(~self.infected).astype(np.int64)
        self.kb = k[self.ids]
        self.db = self.deg[self.ids]
        self.poolb = self.pool[self.ids]
        self.scaled_poolb = self.ad * self.poolb
        self.pos = np.full(n, -1, dtype=np.int64)
        self.pos[self.ids] = np.arange(len(self.ids))

    def uninfected_count(self) -> int:
        return len(self.ids)

    def infected_set(self) -> frozenset[int]:
        return frozenset(int(i) for i in np.flatnonzero(self.infected))

    def flip_candidates(self, q: Fraction) -> np.ndarray:
        qn, qd = q.numerator, q.denominator
        nsq = self.n * self.n
        if qd * self.ad * nsq >= _INT64_SAFE or \
                qn * (self.ad + self.an) * nsq >= _INT64_SAFE:
            return self._flip_candidates_bigint(qn, qd)
        lhs = self.kb * (qd * self.ad) * self.poolb
        rhs = qn * self.db * (self.scaled_poolb - self.an * self.K
                              + self.an * self.kb)
        mask = lhs >= rhs
        if self.has_empty_pool:
            empty = self.poolb == 0
            mask = np.where(empty, self.kb * qd >= qn * self.db, mask)
        return self.ids[mask]

    def _flip_candidates_bigint(self, qn: int, qd: int) -> np.ndarray:
        # Oversized q (huge user-supplied denominator): exact Python ints.
        flips = []
        for row, i in enumerate(self.ids.tolist()):
            k, d, pool = int(self.kb[row]), int(self.db[row]), int(self.poolb[row])
            if pool == 0:
                ok = k * qd >= qn * d
            else:
                ok = (k * qd * self.ad * pool
                      >= qn * d * (self.ad * pool - self.an * (self.K - k)))
            if ok:
                flips.append(i)
        return np.asarray(flips, dtype=np.int64)

    def apply(self, flips: np.ndarray) -> None:
        rows = self.pos[flips]
        nbr_chunks = [self.indices[self.indptr[j]:self.indptr[j + 1]]
                      for j in flips.tolist()]
        if nbr_chunks:
            touched = self.pos[np.concatenate(nbr_chunks)]
            touched = touched[touched >= 0]
            np.add.at(self.kb, touched, 1)
        self.infected[flips] = True
        self.K += len(flips)
        keep = np.ones(len(self.ids), dtype=bool)
        keep[rows] = False
        self.ids = self.ids[keep]
        self.kb = self.kb[keep]
        self.db = self.db[keep]
        self.poolb = self.poolb[keep]
        self.scaled_poolb = self.scaled_poolb[keep]
        self.pos[:] = -1
        self.pos[self.ids] = np.arange(len(self.ids))

    def max_threshold(self) -> tuple[Fraction, list[int]]:
        if len(self.ids) == 0:
            raise InvariantViolationError("no outsiders left to compute a threshold")
        inner = self.scaled_poolb - self.an * (self.K - self.kb)
        num = np.where(self.poolb > 0, self.kb * self.ad * self.poolb, self.kb)
        den = np.where(self.poolb > 0, self.db * inner, self.db)
        if (den <= 0).any():
            bad = int(self.ids[int(np.argmax(den <= 0))])
            raise InvariantViolationError(
                f"player {bad} has nonpositive threshold denominator while "
                f"still outside the set")
        # Float argmax only seeds the search; ordering is settled exactly.
        guess = int(np.argmax(num / den))
        better = np.flatnonzero(num * int(den[guess]) > int(num[guess]) * den)
        best = guess
        for j in better.tolist():
            if int(num[j]) * int(den[best]) > int(num[best]) * int(den[j]):
                best = j
        ties = num * int(den[best]) == int(num[best]) * den
        attainers = [int(i) for i in self.ids[ties]]
        g = math.gcd(int(num[best]), int(den[best]))
        return Fraction(int(num[best]) // g, int(den[best]) // g), attainers


def make_engine(cfg: GameConfig):
    """Pick the fastest engine that is exact for this configuration."""
    try:
        return FastEngine(cfg)
    except FastEngineUnavailable:
        return ExactEngine(cfg)
