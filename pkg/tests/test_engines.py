"""The vectorized engine must be indistinguishable from the Fraction engine."""

from fractions import Fraction

import numpy as np
import pytest

from netcontagion._engines import ExactEngine, FastEngine, FastEngineUnavailable, make_engine
from netcontagion.game import (
    GameConfig,
    InfluenceWeights,
    ParametricGlobalEffect,
    TabularGlobalEffect,
)
from netcontagion.graphs import generate_ba

F = Fraction


def run_threshold_trace(engine, initial, n):
    """Drive the stage loop on a raw engine, logging waves and thresholds."""
    trace = []
    q = F(1)
    engine.start(initial)
    while True:
        while engine.uninfected_count() > 0:
            flips = engine.flip_candidates(q)
            if len(flips) == 0:
                break
            engine.apply(flips)
            trace.append(("wave", frozenset(int(i) for i in flips)))
        if engine.uninfected_count() == 0:
            return trace
        t, attainers = engine.max_threshold()
        trace.append(("q", t, tuple(attainers)))
        if t == 0:
            assert len(engine.flip_candidates(F(0))) == engine.uninfected_count()
            return trace
        q = t


@pytest.mark.parametrize("seed", range(12))
def test_fast_matches_exact_trace(seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    n = int(rng.integers(10, 60))
    net = generate_ba(n, int(rng.integers(1, 4)), seed)
    alpha = F(int(rng.integers(0, 5)), 4)
    start = frozenset(int(i) for i in range(n) if rng.random() < 0.2) or frozenset({0})
    cfg = GameConfig(network=net, global_effect=ParametricGlobalEffect(alpha),
                     infected=start)
    fast = make_engine(cfg)
    assert isinstance(fast, FastEngine)
    exact = ExactEngine(cfg)
    assert run_threshold_trace(fast, start, n) == run_threshold_trace(exact, start, n)


@pytest.mark.parametrize("seed", range(12))
def test_fast_matches_exact_single_q(seed):
    rng = np.random.Generator(np.random.PCG64(100 + seed))
    n = int(rng.integers(8, 40))
    if seed % 3 == 0:
        # Star: the hub's non-neighbor pool is empty, hitting the engines'
        # degenerate-share branch directly.
        from netcontagion.graphs import Network
        net = Network.from_edges(n, [(0, i) for i in range(1, n)])
    else:
        net = generate_ba(n, 2, seed)
    alpha = F(int(rng.integers(0, 3)), 2)
    cfg = GameConfig(network=net, global_effect=ParametricGlobalEffect(alpha),
                     infected=frozenset({0, n - 1}))
    den = int(rng.integers(1, 30))
    q = F(int(rng.integers(0, den + 1)), den)
    fast, exact = FastEngine(cfg), ExactEngine(cfg)
    fast.start(cfg.infected)
    exact.start(cfg.infected)
    while True:
        ffast = frozenset(int(i) for i in fast.flip_candidates(q))
        fexact = frozenset(exact.flip_candidates(q))
        assert ffast == fexact
        if not ffast:
            break
        fast.apply(np.asarray(sorted(ffast), dtype=np.int64))
        exact.apply(sorted(fexact))
    assert fast.infected_set() == exact.infected_set()


def test_fast_engine_flags_empty_pool():
    from netcontagion.graphs import Network
    star = Network.from_edges(6, [(0, i) for i in range(1, 6)])
    cfg = GameConfig(network=star, infected=frozenset({1}))
    engine = FastEngine(cfg)
    assert engine.has_empty_pool
    engine.start(cfg.infected)
    # At q=1 the hub needs every neighbor (its share pool is empty), while a
    # leaf needs only its single neighbor.
    assert list(engine.flip_candidates(F(1))) == []
    engine2 = FastEngine(GameConfig(network=star, infected=frozenset({0})))
    engine2.start(frozenset({0}))
    flips = engine2.flip_candidates(F(1))
    assert sorted(int(i) for i in flips) == [1, 2, 3, 4, 5]


def test_fast_engine_oversized_q_falls_back_to_bigint():
    net = generate_ba(30, 2, 0)
    cfg = GameConfig(network=net, infected=frozenset({0, 1, 2}))
    fast, exact = FastEngine(cfg), ExactEngine(cfg)
    fast.start(cfg.infected)
    exact.start(cfg.infected)
    huge_den = 10**30
    q = F(huge_den - 12345, huge_den * 3)
    assert frozenset(int(i) for i in fast.flip_candidates(q)) == \
        frozenset(exact.flip_candidates(q))


@pytest.mark.parametrize("seed", range(4))
def test_tabular_matching_parametric_gives_identical_dynamics(seed):
    # A per-player step table sampled from alpha*c*d_i*p at every attainable
    # share must reproduce the parametric run exactly; this also pits the
    # Fraction engine (tabular) against the vectorized one (parametric).
    rng = np.random.Generator(np.random.PCG64(40 + seed))
    n = int(rng.integers(8, 16))
    net = generate_ba(n, 2, seed)
    alpha, c = F(1, 2), F(3, 2)
    tables = []
    for i in range(n):
        pool = n - net.degree(i) - 1
        points = [(F(k, pool), alpha * c * net.degree(i) * F(k, pool))
                  for k in range(pool + 1)] if pool else [(F(0), F(0))]
        tables.append(tuple(points))
    start = frozenset(int(i) for i in range(n) if rng.random() < 0.3) or frozenset({0})
    parametric = GameConfig(network=net, c=c,
                            global_effect=ParametricGlobalEffect(alpha),
                            infected=start)
    tabular = GameConfig(network=net, c=c,
                         global_effect=TabularGlobalEffect(tuple(tables)),
                         infected=start)
    assert isinstance(make_engine(parametric), FastEngine)
    assert isinstance(make_engine(tabular), ExactEngine)
    from netcontagion.contagion import full_contagion_threshold
    a = full_contagion_threshold(parametric, start)
    b = full_contagion_threshold(tabular, start)
    assert a.q_star == b.q_star
    assert [(st.q, st.members) for st in a.stages] == \
        [(st.q, st.members) for st in b.stages]
    assert a.subsets_checked == b.subsets_checked


def test_engine_selection():
    net = generate_ba(10, 2, 0)
    unit = GameConfig(network=net)
    assert isinstance(make_engine(unit), FastEngine)
    weighted = GameConfig(network=net,
                          weights=InfluenceWeights.from_pairs(net, {(0, net.adjacency[0][0]): F(2)}))
    assert isinstance(make_engine(weighted), ExactEngine)
    tabular = GameConfig(network=net,
                         global_effect=TabularGlobalEffect.uniform(((F(0), F(0)),), 10))
    assert isinstance(make_engine(tabular), ExactEngine)
    with pytest.raises(FastEngineUnavailable):
        FastEngine(weighted)
