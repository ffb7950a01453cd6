"""Command-line surface.

Subcommands: ``generate`` (write a scale-free edge list), ``threshold``
(contagion threshold report for one game), ``depth`` (depth/virality at
chosen q values), ``montecarlo`` (grid sweep emitting CSV/JSONL/SVG), and
``verify`` (randomized oracle cross-checks).  Game and grid descriptions
can come from JSON documents; command-line flags override file values.

Errors exit nonzero; with ``--json-errors`` they are emitted as one JSON
object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np
from fractions import Fraction
from pathlib import Path

from . import montecarlo, svgplot, verify
from .contagion import depth_at, depth_function, full_contagion_threshold
from .errors import NetcontagionError, ParameterError
from .game import GameConfig, InfluenceWeights, ParametricGlobalEffect, TabularGlobalEffect
from .graphs import dump_edge_list, generate_ba, load_edge_list
from .montecarlo import ExperimentGrid, PRESETS, run_grid
from .rational import as_rational, as_unit_rational, decimal_render, rational_str


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read JSON document {path}: {exc}") from exc


def _network_from_args(args, doc: dict):
    if getattr(args, "network", None):
        return load_edge_list(Path(args.network).read_text())
    if getattr(args, "generate", None):
        try:
            n, m, seed = (int(x) for x in args.generate.split(","))
        except ValueError:
            raise ParameterError("--generate expects N,M,SEED")
        return generate_ba(n, m, seed)
    net_spec = doc.get("network")
    if isinstance(net_spec, dict) and "path" in net_spec:
        return load_edge_list(Path(net_spec["path"]).read_text())
    if isinstance(net_spec, dict) and "generate" in net_spec:
        gen = net_spec["generate"]
        return generate_ba(int(gen["n"]), int(gen["m"]), int(gen.get("seed", 0)))
    raise ParameterError("no network given; use --network, --generate, or a config file")


def _game_from_args(args, doc: dict) -> tuple[GameConfig, frozenset[int]]:
    net = _network_from_args(args, doc)
    weights_spec = doc.get("weights", "unit")
    if getattr(args, "weights", None):
        weights_spec = _load_json(args.weights)
    if weights_spec == "unit":
        weights = InfluenceWeights.unit(net)
    else:
        pairs = {}
        for entry in weights_spec:
            i, j, w = entry
            pairs[(int(i), int(j))] = as_rational(w, "weight")
        weights = InfluenceWeights.from_pairs(net, pairs)
    alpha = args.alpha if getattr(args, "alpha", None) is not None \
        else doc.get("alpha", "0")
    if "global_tables" in doc and getattr(args, "alpha", None) is None:
        tables = tuple(
            tuple((as_unit_rational(p, "p"), as_rational(v, "phi")) for p, v in table)
            for table in doc["global_tables"])
        effect = TabularGlobalEffect(tables)
    else:
        effect = ParametricGlobalEffect(as_unit_rational(alpha, "alpha"))
    c = as_rational(args.c if getattr(args, "c", None) is not None
                    else doc.get("c", "1"), "c")

    if getattr(args, "seeds", None):
        start = frozenset(int(x) for x in args.seeds.split(","))
    elif getattr(args, "seeds_random", None):
        rng_seed = getattr(args, "seeds_seed", 0) or 0
        rng = np.random.Generator(np.random.PCG64(rng_seed))
        start = montecarlo.draw_set(rng, net.node_count, int(args.seeds_random))
    elif doc.get("infected") is not None:
        start = frozenset(int(x) for x in doc["infected"])
    else:
        raise ParameterError("no starting set; use --seeds or --seeds-random")

    infected = frozenset() if getattr(args, "endogenous", False) else start
    cfg = GameConfig(network=net, weights=weights, c=c, global_effect=effect,
                     infected=infected)
    return cfg, cfg.player_set(start)


def _q_list(args, doc: dict) -> list[Fraction]:
    raw = args.q if getattr(args, "q", None) else doc.get("q")
    if not raw:
        raise ParameterError("no q values; pass --q")
    if isinstance(raw, str):
        raw = raw.split(",")
    return [as_unit_rational(part, "q") for part in raw]


def _cmd_generate(args) -> int:
    net = generate_ba(args.n, args.m, args.seed)
    text = dump_edge_list(net, header=True)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_threshold(args) -> int:
    doc = _load_json(args.config) if args.config else {}
    cfg, start = _game_from_args(args, doc)
    result = full_contagion_threshold(cfg, start)
    if args.json:
        print(json.dumps(result.to_dict(include_members=args.members), indent=2))
        return 0
    print(f"contagion threshold q* = {rational_str(result.q_star)} "
          f"(= {decimal_render(result.q_star)})")
    print(f"subsets checked: {result.subsets_checked}")
    print(f"{'stage':>5} {'q':>12} {'decimal':>10} {'size':>6}")
    for idx, stage in enumerate(result.stages):
        print(f"{idx:>5} {rational_str(stage.q):>12} "
              f"{decimal_render(stage.q):>10} {stage.size:>6}")
        if args.members:
            print(f"      members: {sorted(stage.members)}")
    if result.marginal_players:
        print(f"marginal players per stage: {list(result.marginal_players)}")
    return 0


def _cmd_depth(args) -> int:
    doc = _load_json(args.config) if args.config else {}
    cfg, start = _game_from_args(args, doc)
    qs = _q_list(args, doc)
    df = depth_function(cfg, start)
    n = cfg.network.node_count
    start_frac = Fraction(len(start), n)
    rows = []
    for q in qs:
        d = depth_at(df, q)
        rows.append({"q": rational_str(q), "depth": rational_str(d),
                     "depth_decimal": decimal_render(d),
                     "virality": rational_str(d - start_frac),
                     "virality_decimal": decimal_render(d - start_frac)})
    if args.json:
        print(json.dumps({"q_star": rational_str(df.q_star), "rows": rows}, indent=2))
        return 0
    print(f"q* = {rational_str(df.q_star)} (= {decimal_render(df.q_star)}); "
          f"|start|/I = {rational_str(start_frac)}")
    print(f"{'q':>10} {'depth':>12} {'decimal':>10} {'virality':>12} {'decimal':>10}")
    for row in rows:
        print(f"{row['q']:>10} {row['depth']:>12} {row['depth_decimal']:>10} "
              f"{row['virality']:>12} {row['virality_decimal']:>10}")
    return 0


def _grid_from_doc(doc: dict) -> ExperimentGrid:
    sizes = doc["set_sizes"]
    if isinstance(sizes, dict):
        sizes = range(int(sizes["start"]), int(sizes["stop"]), int(sizes.get("step", 10)))
    return ExperimentGrid(
        network_size=int(doc["network_size"]),
        m_values=tuple(int(m) for m in doc["m_values"]),
        alpha_values=tuple(as_unit_rational(a, "alpha") for a in doc["alpha_values"]),
        networks_per_m=int(doc["networks_per_m"]),
        sets_per_size=int(doc["sets_per_size"]),
        set_sizes=tuple(sizes),
        q_grid=tuple(as_unit_rational(q, "q") for q in doc.get("q_grid", ["1/4", "1/2", "3/4"])),
        master_seed=int(doc.get("master_seed", 42)))


def _cmd_montecarlo(args) -> int:
    if args.preset:
        grid = PRESETS[args.preset]() if args.master_seed is None \
            else PRESETS[args.preset](args.master_seed)
    elif args.config:
        doc = _load_json(args.config)
        if args.master_seed is not None:
            doc = {**doc, "master_seed": args.master_seed}
        grid = _grid_from_doc(doc)
    else:
        raise ParameterError("montecarlo needs --preset or --config")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = run_grid(grid, workers=args.workers)
    montecarlo.write_records_csv(records, out / "runs.csv")
    montecarlo.write_records_jsonl(records, out / "runs.jsonl")
    table = montecarlo.average_thresholds(records, grid.q_grid)
    montecarlo.write_threshold_table_csv(table, out / "thresholds_table.csv")
    montecarlo.write_threshold_stats_csv(table, out / "threshold_stats.csv")
    montecarlo.write_inverse_depth_table_csv(records, grid.q_grid,
                                             out / "inverse_depth_table.csv")
    montecarlo.write_depth_curves_csv(records, grid.q_grid,
                                      out / "depth_curves.csv")
    if args.plots:
        plot_dir = out / "plots"
        plot_dir.mkdir(exist_ok=True)
        for m in grid.m_values:
            for alpha in grid.alpha_values:
                recs = [r for r in records if r.m == m and r.alpha == alpha]
                points = [(r.size_fraction, r.q_star) for r in recs]
                means = {
                    Fraction(size, grid.network_size): cell.mean
                    for (mm, aa, size), cell in table.thresholds.items()
                    if (mm, aa) == (m, alpha)}
                svg = svgplot.render_scatter(
                    points, means,
                    title=f"contagion threshold, m={m}, alpha={rational_str(alpha)}",
                    x_label="starting-set fraction", y_label="q*")
                name = f"thresholds_m{m}_alpha{rational_str(alpha).replace('/', '-')}.svg"
                (plot_dir / name).write_text(svg)
    print(f"wrote {len(records)} runs to {out}")
    return 0


def _cmd_verify(args) -> int:
    if args.trials == 0:
        print("warning: trials=0, every property passes vacuously",
              file=sys.stderr)
    reports = verify.run_checks(trials=args.trials, max_i=args.max_i,
                                seed=args.seed)
    reports += verify.run_cohesion_checks(
        trials=max(1, args.trials // 4) if args.trials else 0,
        max_i=min(args.max_i, 12), seed=args.seed)
    failed = False
    for report in sorted(reports, key=lambda r: r.name):
        status = "PASS" if report.passed else "FAIL"
        print(f"{status} {report.name}: {report.checks} checks, "
              f"{len(report.failures)} failures")
        if report.failures:
            failed = True
            for failure in report.failures[:3]:
                print(f"  counterexample: {json.dumps(failure, sort_keys=True)}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netcontagion",
        description="Contagion thresholds and depth for network coordination "
                    "games with local and global effects")
    parser.add_argument("--json-errors", action="store_true",
                        help="emit errors as JSON on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a scale-free edge list")
    p.add_argument("-n", type=int, required=True, help="number of nodes")
    p.add_argument("-m", type=int, required=True, help="edges per new node")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_generate)

    def game_flags(p):
        p.add_argument("--network", help="edge-list file")
        p.add_argument("--generate", metavar="N,M,SEED",
                       help="generate the network instead of loading one")
        p.add_argument("--config", help="game description JSON")
        p.add_argument("--seeds", help="comma-separated starting players")
        p.add_argument("--seeds-random", type=int, metavar="K",
                       help="draw K random starting players")
        p.add_argument("--seeds-seed", type=int, default=0)
        p.add_argument("--alpha", help="global-effect intensity (rational)")
        p.add_argument("--c", help="miscoordination cost (rational, default 1)")
        p.add_argument("--weights", help="JSON file of [i, j, w] weight triples")
        p.add_argument("--endogenous", action="store_true",
                       help="do not seed the starting set exogenously")
        p.add_argument("--members", action="store_true",
                       help="list equilibrium members")
        p.add_argument("--json", action="store_true", help="JSON output")

    p = sub.add_parser("threshold", help="full-network contagion threshold")
    game_flags(p)
    p.set_defaults(func=_cmd_threshold)

    p = sub.add_parser("depth", help="contagion depth and virality at given q")
    game_flags(p)
    p.add_argument("--q", help="comma-separated q values")
    p.set_defaults(func=_cmd_depth)

    p = sub.add_parser("montecarlo", help="run a sweep grid")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--config", help="grid description JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--master-seed", type=int, default=None,
                   help="override the grid's master seed")
    p.add_argument("--plots", action="store_true", help="emit SVG plots")
    p.set_defaults(func=_cmd_montecarlo)

    p = sub.add_parser("verify", help="randomized oracle cross-checks")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--max-i", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NetcontagionError as exc:
        if args.json_errors:
            payload = {"error": type(exc).__name__, "message": str(exc)}
            if hasattr(exc, "player"):
                payload["player"] = exc.player
            if hasattr(exc, "line"):
                payload["line"] = exc.line
            print(json.dumps(payload), file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
