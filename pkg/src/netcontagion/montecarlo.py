"""Monte Carlo harness: sweep thresholds and depth over scale-free networks.

The data generating process: for each attachment parameter m, generate
``networks_per_m`` scale-free networks; per network and per starting-set
size, draw ``sets_per_size`` uniform starting sets; seed each set
exogenously (a uniformly random set almost never sustains itself
endogenously at q = 1) and run the full threshold search once per
global-effect intensity, reusing the same draw across intensities.

Every random draw flows from ``master_seed`` through a documented split:
``sha256("netcontagion:<master>:<field>:...")`` truncated to 64 bits, so
records are bit-identical regardless of worker count or scheduling.
"""

from __future__ import annotations

import csv
import hashlib
import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .contagion import DepthFunction, depth_at, full_contagion_threshold
from .errors import ParameterError
from .game import GameConfig, InfluenceWeights, ParametricGlobalEffect
from .graphs import generate_ba
from .rational import as_rational, as_unit_rational, decimal_render, rational_str


def derive_seed(master_seed: int, *fields) -> int:
    """Stable 64-bit task seed from the master seed and a field tuple."""
    text = ":".join(["netcontagion", str(int(master_seed))]
                    + [str(f) for f in fields])
    digest = hashlib.sha256(text.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "little")


def draw_set(rng: np.random.Generator, population: int, size: int) -> frozenset[int]:
    """Uniform subset without replacement via a partial Fisher-Yates pass."""
    arr = np.arange(population)
    picks = rng.integers(low=np.arange(size), high=population)
    for j in range(size):
        other = picks[j]
        arr[j], arr[other] = arr[other], arr[j]
    return frozenset(int(x) for x in arr[:size])


@dataclass(frozen=True)
class ExperimentGrid:
    network_size: int
    m_values: tuple[int, ...]
    alpha_values: tuple[Fraction, ...]
    networks_per_m: int
    sets_per_size: int
    set_sizes: tuple[int, ...]
    q_grid: tuple[Fraction, ...]
    master_seed: int

    def __post_init__(self):
        object.__setattr__(self, "m_values", tuple(int(m) for m in self.m_values))
        object.__setattr__(self, "alpha_values",
                           tuple(as_unit_rational(a, "alpha") for a in self.alpha_values))
        object.__setattr__(self, "set_sizes", tuple(int(s) for s in self.set_sizes))
        object.__setattr__(self, "q_grid",
                           tuple(as_unit_rational(q, "q") for q in self.q_grid))
        if self.network_size < 2:
            raise ParameterError("network_size must be at least 2")
        if self.networks_per_m < 1 or self.sets_per_size < 1:
            raise ParameterError("counts must be positive")
        if not self.m_values or not self.alpha_values or not self.set_sizes:
            raise ParameterError("m_values, alpha_values, set_sizes must be nonempty")
        for m in self.m_values:
            if not 1 <= m < self.network_size:
                raise ParameterError(f"m={m} incompatible with network size")
        for s in self.set_sizes:
            if not 1 <= s < self.network_size:
                raise ParameterError(f"set size {s} must be in [1, network_size)")

    @property
    def runs_per_m_alpha(self) -> int:
        return self.networks_per_m * self.sets_per_size * len(self.set_sizes)


def desk_grid(master_seed: int = 42) -> ExperimentGrid:
    """Small grid that finishes in minutes on one core."""
    return ExperimentGrid(
        network_size=300, m_values=(5, 10, 20),
        alpha_values=(Fraction(0), Fraction(1, 2), Fraction(1)),
        networks_per_m=8, sets_per_size=10,
        set_sizes=tuple(range(10, 300, 10)),
        q_grid=(Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)),
        master_seed=master_seed)


def m5_benchmark_grid(master_seed: int = 42) -> ExperimentGrid:
    """1000-node, m=5 grid at reduced replication; used by the acceptance suite."""
    return ExperimentGrid(
        network_size=1000, m_values=(5,),
        alpha_values=(Fraction(0), Fraction(1)),
        networks_per_m=10, sets_per_size=20,
        set_sizes=tuple(range(10, 1000, 10)),
        q_grid=(Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)),
        master_seed=master_seed)


def full_grid(master_seed: int = 42) -> ExperimentGrid:
    """The complete sweep (1000 nodes, 40 networks, 50 sets per size).

    Long-running: 1,782,000 threshold searches; prefer the desk presets
    unless you have hours to spend.
    """
    return ExperimentGrid(
        network_size=1000, m_values=(5, 10, 20),
        alpha_values=(Fraction(0), Fraction(1, 2), Fraction(1)),
        networks_per_m=40, sets_per_size=50,
        set_sizes=tuple(range(10, 1000, 10)),
        q_grid=(Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)),
        master_seed=master_seed)


PRESETS = {
    "desk": desk_grid,
    "m5-benchmark": m5_benchmark_grid,
    "full": full_grid,
}


@dataclass(frozen=True)
class RunRecord:
    m: int
    alpha: Fraction
    network_id: int
    set_size: int
    replicate_id: int
    q_star: Fraction
    depth: DepthFunction
    subsets_checked: int
    network_size: int

    @property
    def size_fraction(self) -> Fraction:
        return Fraction(self.set_size, self.network_size)

    def sort_key(self):
        return (self.m, self.network_id, self.set_size, self.replicate_id,
                self.alpha)


def _run_network_task(grid: ExperimentGrid, m: int, network_id: int) -> list[RunRecord]:
    net = generate_ba(grid.network_size, m,
                      derive_seed(grid.master_seed, "network", m, network_id))
    weights = InfluenceWeights.unit(net)
    effects = {alpha: ParametricGlobalEffect(alpha) for alpha in grid.alpha_values}
    records: list[RunRecord] = []
    for set_size in grid.set_sizes:
        for replicate in range(grid.sets_per_size):
            seed = derive_seed(grid.master_seed, "set", m, network_id,
                               set_size, replicate)
            rng = np.random.Generator(np.random.PCG64(seed))
            start = draw_set(rng, grid.network_size, set_size)
            for alpha in grid.alpha_values:
                cfg = GameConfig(network=net, weights=weights,
                                 global_effect=effects[alpha],
                                 infected=start)
                result = full_contagion_threshold(cfg, start,
                                                  collect_members=False)
                records.append(RunRecord(
                    m=m, alpha=alpha, network_id=network_id,
                    set_size=set_size, replicate_id=replicate,
                    q_star=result.q_star,
                    depth=DepthFunction.from_threshold(result),
                    subsets_checked=result.subsets_checked,
                    network_size=grid.network_size))
    return records


def run_grid(grid: ExperimentGrid, workers: int = 1) -> list[RunRecord]:
    """Execute the grid; the record list is identical for any worker count."""
    tasks = [(m, net_id) for m in grid.m_values
             for net_id in range(grid.networks_per_m)]
    if workers <= 1:
        chunks = [_run_network_task(grid, m, net_id) for m, net_id in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_network_task, grid, m, net_id)
                       for m, net_id in tasks]
            chunks = [f.result() for f in futures]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=RunRecord.sort_key)
    return records


@dataclass
class ThresholdCell:
    mean: Fraction
    count: int
    sd: float


@dataclass
class AggregateTable:
    """Grouped summaries: threshold stats per (m, alpha, set size) and mean
    depth per (m, alpha, q, set size)."""

    network_size: int
    thresholds: dict[tuple[int, Fraction, int], ThresholdCell] = field(default_factory=dict)
    depth_means: dict[tuple[int, Fraction, Fraction, int], Fraction] = field(default_factory=dict)


def average_thresholds(records: Sequence[RunRecord],
                       q_grid: Iterable = ()) -> AggregateTable:
    """Arithmetic means of q* (exact) grouped by (m, alpha, set size).

    Mean q* should grow weakly with set size; sampling jitter can break
    that in small grids, so violations only warn.
    """
    if not records:
        raise ParameterError("no records to aggregate")
    table = AggregateTable(network_size=records[0].network_size)
    groups: dict[tuple[int, Fraction, int], list[RunRecord]] = {}
    for rec in records:
        groups.setdefault((rec.m, rec.alpha, rec.set_size), []).append(rec)
    for key in sorted(groups):
        vals = [rec.q_star for rec in groups[key]]
        mean = sum(vals, Fraction(0)) / len(vals)
        sd = float(np.std([float(v) for v in vals]))
        table.thresholds[key] = ThresholdCell(mean=mean, count=len(vals), sd=sd)
    for (m, alpha) in sorted({(k[0], k[1]) for k in groups}):
        means = [(size, table.thresholds[(m, alpha, size)].mean)
                 for size in sorted({k[2] for k in groups if k[:2] == (m, alpha)})]
        for (s0, v0), (s1, v1) in zip(means, means[1:]):
            if v1 < v0:
                warnings.warn(
                    f"mean threshold dips from {float(v0):.4f} to {float(v1):.4f} "
                    f"between sizes {s0} and {s1} (m={m}, alpha={alpha}); "
                    f"sampling jitter", stacklevel=2)
                break
    scenarios = _group_by_scenario(records)
    for q in q_grid:
        q = as_unit_rational(q, "q")
        for (m, alpha), recs in sorted(scenarios.items()):
            for size_frac, mean in depth_curve(recs, q).items():
                size = int(size_frac * table.network_size)
                table.depth_means[(m, alpha, q, size)] = mean
    return table


def _group_by_scenario(records: Sequence[RunRecord]) -> dict[tuple[int, Fraction], list[RunRecord]]:
    out: dict[tuple[int, Fraction], list[RunRecord]] = {}
    for rec in records:
        out.setdefault((rec.m, rec.alpha), []).append(rec)
    return out


def depth_curve(records: Sequence[RunRecord], q) -> dict[Fraction, Fraction]:
    """Mean depth at q per starting-set fraction, over the given records.

    Records should share one (m, alpha) scenario; sizes are keyed as exact
    fractions of the network.
    """
    q = as_unit_rational(q, "q")
    if not records:
        raise ParameterError("no records")
    sums: dict[Fraction, list] = {}
    for rec in records:
        cell = sums.setdefault(rec.size_fraction, [Fraction(0), 0])
        cell[0] += depth_at(rec.depth, q)
        cell[1] += 1
    return {frac: total / count for frac, (total, count) in sorted(sums.items())}


def _isotonic(values: list[Fraction]) -> list[Fraction]:
    """Pool-adjacent-violators pass; exact, equal weights."""
    blocks: list[list] = []  # [sum, count]
    for v in values:
        cur = [v, 1]
        while blocks and blocks[-1][0] * cur[1] > cur[0] * blocks[-1][1]:
            prev = blocks.pop()
            cur = [prev[0] + cur[0], prev[1] + cur[1]]
        blocks.append(cur)
    out: list[Fraction] = []
    for total, count in blocks:
        out.extend([total / count] * count)
    return out


def regularized_curve(curve: Mapping[Fraction, Fraction]) -> dict[Fraction, Fraction]:
    """Monotone (isotonic) regularization of a mean-depth curve."""
    sizes = sorted(curve)
    fitted = _isotonic([curve[s] for s in sizes])
    return dict(zip(sizes, fitted))


def inverse_depth(curve: Mapping[Fraction, Fraction], target_depth) -> Fraction | None:
    """Smallest grid set-size fraction whose regularized mean depth reaches
    ``target_depth``; None when no grid size does."""
    target = as_rational(target_depth, "target_depth")
    if not 0 < target <= 1:
        raise ParameterError("target depth must be in (0, 1]")
    for size_frac, depth in sorted(regularized_curve(curve).items()):
        if depth >= target:
            return size_frac
    return None


def singularity_interval(curve: Mapping[Fraction, Fraction],
                         lo_frac=Fraction(1, 100),
                         hi_frac=Fraction(19, 20)) -> tuple[Fraction | None, Fraction | None]:
    """Tipping band of a depth curve: first size with mean virality at least
    ``lo_frac`` and first size with mean depth at least ``hi_frac``.

    The defaults (1% mean virality, 95% mean depth) mark where systematic
    spread beyond the seed first clears sampling noise and where outcomes
    are essentially all-in; both fractions are overridable.
    """
    lo = as_rational(lo_frac, "lo_frac")
    hi = as_rational(hi_frac, "hi_frac")
    if not 0 < lo < hi < 1:
        raise ParameterError("need 0 < lo_frac < hi_frac < 1")
    reg = regularized_curve(curve)
    size_lo = size_hi = None
    for size_frac in sorted(reg):
        if size_lo is None and reg[size_frac] - size_frac >= lo:
            size_lo = size_frac
        if size_hi is None and reg[size_frac] >= hi:
            size_hi = size_frac
    return size_lo, size_hi


# ---------------------------------------------------------------------------
# File emission

RUN_CSV_COLUMNS = ["m", "alpha", "network_id", "set_size", "replicate",
                   "q_star_num", "q_star_den", "q_star_decimal",
                   "subsets_checked"]


def write_records_csv(records: Sequence[RunRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUN_CSV_COLUMNS)
        for rec in records:
            writer.writerow([
                rec.m, rational_str(rec.alpha), rec.network_id, rec.set_size,
                rec.replicate_id, rec.q_star.numerator, rec.q_star.denominator,
                decimal_render(rec.q_star), rec.subsets_checked])


def write_records_jsonl(records: Sequence[RunRecord], path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps({
                "m": rec.m,
                "alpha": rational_str(rec.alpha),
                "network_id": rec.network_id,
                "set_size": rec.set_size,
                "replicate": rec.replicate_id,
                "q_star": {"num": rec.q_star.numerator,
                           "den": rec.q_star.denominator,
                           "decimal": decimal_render(rec.q_star)},
                "subsets_checked": rec.subsets_checked,
                "network_size": rec.network_size,
                "depth": rec.depth.to_dict(),
            }, separators=(",", ":")))
            fh.write("\n")


def write_threshold_table_csv(table: AggregateTable, path) -> None:
    """Wide layout: one row per set-size proportion, one column per (m, alpha)."""
    keys = sorted(table.thresholds)
    scenarios = sorted({(m, a) for m, a, _ in keys})
    sizes = sorted({s for _, _, s in keys})
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["size_fraction"] + [f"m={m} alpha={rational_str(a)}"
                                             for m, a in scenarios])
        for size in sizes:
            row = [decimal_render(Fraction(size, table.network_size), 3)]
            for m, a in scenarios:
                cell = table.thresholds.get((m, a, size))
                row.append("" if cell is None else decimal_render(cell.mean))
            writer.writerow(row)


def write_threshold_stats_csv(table: AggregateTable, path) -> None:
    """Long layout with counts and standard deviations."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "alpha", "set_size", "size_fraction",
                         "mean_q_star", "count", "sd"])
        for (m, a, size) in sorted(table.thresholds):
            cell = table.thresholds[(m, a, size)]
            writer.writerow([m, rational_str(a), size,
                             decimal_render(Fraction(size, table.network_size), 3),
                             decimal_render(cell.mean), cell.count,
                             f"{cell.sd:.6f}"])


def write_inverse_depth_table_csv(records: Sequence[RunRecord], q_grid,
                                  path, targets=None) -> None:
    """Wide layout: rows (m, q, alpha), columns depth targets."""
    targets = [Fraction(t, 10) for t in range(1, 11)] if targets is None else \
        [as_rational(t, "target") for t in targets]
    scenarios = sorted(_group_by_scenario(records))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "q", "alpha"] +
                        [f"depth>={decimal_render(t, 2)}" for t in targets])
        for q in q_grid:
            q = as_unit_rational(q, "q")
            for m, alpha in scenarios:
                curve = depth_curve([r for r in records
                                     if r.m == m and r.alpha == alpha], q)
                row = [m, rational_str(q), rational_str(alpha)]
                for t in targets:
                    frac = inverse_depth(curve, t)
                    row.append("unreachable" if frac is None
                               else decimal_render(frac, 3))
                writer.writerow(row)


def write_depth_curves_csv(records: Sequence[RunRecord], q_grid, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "alpha", "q", "set_size", "size_fraction",
                         "mean_depth"])
        for q in q_grid:
            q = as_unit_rational(q, "q")
            for (m, alpha), recs in sorted(_group_by_scenario(records).items()):
                curve = depth_curve(recs, q)
                for size_frac in sorted(curve):
                    writer.writerow([
                        m, rational_str(alpha), rational_str(q),
                        int(size_frac * records[0].network_size),
                        decimal_render(size_frac, 3),
                        decimal_render(curve[size_frac])])
