"""Command-line front end.

Subcommands: `generate` (random scenario to JSON), `solve` (exact |
heuristic | lemma1 | lemma2 on a scenario or WiFi-graph file), `audit`
(feasibility report for a saved configuration), `sweep` (Monte-Carlo
grid with CSV output), `demo` (replay a built-in network and compare
against its reference values).

Exit codes: 0 success, 2 configuration error, 3 infeasible or
size-guard, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import metrics as metrics_mod
from .errors import (
    InfeasibleAssignmentError,
    ParameterError,
    SizeGuardError,
    StructureError,
)
from .exact import (
    as_scenario,
    enumerate_optimal,
    feasible_assignment,
    lemma1_config,
    lemma2_config,
    load_wifi_graph,
    verify_clique_partition,
)
from .heuristic import (
    capacity_matrix,
    configure_network,
    loading,
    prospective_client_matrix,
)
from .networks import DEMO_NETWORKS
from .ratemodel import (
    Assignment,
    RateAllocation,
    allocate_rates,
    baseline_rates,
    check_feasibility,
    hotspot_link_rate,
    sum_rate,
)
from .scenario import (
    Scenario,
    ScenarioParams,
    generate_scenario,
    load_scenario,
    save_scenario,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


def _load_input(path) -> Scenario:
    """Read a scenario or WiFi-graph JSON file as a Scenario."""
    with open(path) as fh:
        doc = json.load(fh)
    if "edges" in doc:
        graph, cell = load_wifi_graph(path)
        return as_scenario(graph, cell)
    return load_scenario(path)


def _cmd_generate(args) -> int:
    params = ScenarioParams(
        node_count=args.nodes,
        cell_radius=args.radius_km * 1000.0,
        wifi_efficiency=args.eta,
        cell_pathloss_exponent=args.alpha,
        wifi_pathloss_exponent=args.alpha_wifi,
        rng_seed=args.seed,
    )
    save_scenario(args.out, generate_scenario(params))
    print(f"wrote scenario with {args.nodes} nodes to {args.out}")
    return EXIT_OK


def _config_doc(scenario, assignment, allocation, solver) -> dict:
    base = baseline_rates(scenario)
    gains = 100.0 * (allocation.node_rates - base.rates) / base.rates
    return {
        "solver": solver,
        "hotspots": [int(h) for h in assignment.hotspots],
        "clients": {
            str(int(h)): [int(c) for c in assignment.clients_of(int(h))]
            for h in assignment.hotspots
        },
        "rates": {str(j): float(allocation.node_rates[j]) for j in range(scenario.n)},
        "hotspot_count": assignment.hotspot_count,
        "sum_rate": float(allocation.node_rates.sum()),
        "sum_rate_bps": float(allocation.node_rates.sum() * scenario.params.bandwidth),
        "baseline_sum_rate": base.total,
        "mean_gain_pct": float(gains.mean()),
    }


def _cmd_solve(args) -> int:
    scenario = _load_input(args.input)
    if args.solver == "heuristic":
        result = configure_network(scenario, fair_loading=not args.no_fair_loading)
        assignment, allocation = result.assignment, result.allocation
    elif args.solver == "exact":
        result = enumerate_optimal(scenario, max_n=args.max_exact_n)
        assignment = result.best_assignment
        allocation = allocate_rates(scenario, assignment)
    else:  # lemma1 | lemma2
        with open(args.input) as fh:
            if "edges" not in json.load(fh):
                print("lemma solvers need a WiFi-graph input file", file=sys.stderr)
                return EXIT_CONFIG
        graph, cell = load_wifi_graph(args.input)
        if args.solver == "lemma1":
            assignment = lemma1_config(graph, cell)
        else:
            parts = verify_clique_partition(graph)
            if parts is None:
                raise StructureError("graph is not a disjoint union of cliques")
            assignment = lemma2_config(graph, parts, cell)
        allocation = allocate_rates(scenario, assignment)

    doc = _config_doc(scenario, assignment, allocation, args.solver)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    print(
        f"{args.solver}: {doc['hotspot_count']} hotspots, "
        f"sum rate {doc['sum_rate']:.4f} bits/sec/Hz "
        f"(baseline {doc['baseline_sum_rate']:.4f}, mean gain {doc['mean_gain_pct']:.1f}%)"
    )
    return EXIT_OK


def _cmd_audit(args) -> int:
    scenario = _load_input(args.scenario)
    with open(args.input) as fh:
        doc = json.load(fh)
    groups = {int(h): [int(c) for c in cs] for h, cs in doc["clients"].items()}
    assignment = Assignment.from_groups(scenario.n, groups)
    node_rates = np.array([float(doc["rates"][str(j)]) for j in range(scenario.n)])
    rates = {
        (int(assignment.owner[j]), j): float(node_rates[j]) for j in range(scenario.n)
    }
    report = check_feasibility(
        scenario, assignment, RateAllocation(rates=rates, node_rates=node_rates)
    )
    print(report)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def _cell_key(nodes, radius_km, eta, alpha_wifi) -> str:
    return f"n{nodes}_r{radius_km:g}km_eta{eta:g}_aw{alpha_wifi:g}"


def _cmd_sweep(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_rows = []
    grid = [
        (n, r, eta, aw)
        for n in sorted(args.nodes)
        for r in sorted(args.radius_km)
        for eta in sorted(args.eta)
        for aw in sorted(args.alpha_wifi)
    ]
    for nodes, radius_km, eta, alpha_wifi in grid:
        key = _cell_key(nodes, radius_km, eta, alpha_wifi)
        per_instance = []
        hotspot_counts = []
        node_rows = []
        for k in range(args.instances):
            params = ScenarioParams(
                node_count=nodes,
                cell_radius=radius_km * 1000.0,
                wifi_efficiency=eta,
                cell_pathloss_exponent=args.alpha,
                wifi_pathloss_exponent=alpha_wifi,
                rng_seed=args.seed + k,
            )
            scenario = generate_scenario(params)
            result = configure_network(scenario, fair_loading=not args.no_fair_loading)
            base = baseline_rates(scenario)
            mets = metrics_mod.network_metrics(
                scenario, result.assignment, result.allocation, base
            )
            per_instance.append(mets)
            hotspot_counts.append(result.hotspot_count)
            node_rows.extend(
                metrics_mod.node_csv_rows(
                    k, scenario, result.assignment, result.allocation, base, mets
                )
            )
        agg = metrics_mod.summarize(per_instance, hotspot_counts)
        metrics_mod.write_node_csv(out_dir / f"nodes_{key}.csv", node_rows)
        row = {
            "nodes": nodes,
            "radius_km": radius_km,
            "eta": eta,
            "alpha": args.alpha,
            "alpha_wifi": alpha_wifi,
            "instances": args.instances,
            "mean_gain_pct": agg.mean_gain_pct,
            "median_gain_pct": agg.median_gain_pct,
            "mean_srg": agg.mean_srg,
            "mean_hotspot_count": agg.mean_hotspot_count,
        }
        for ri in range(agg.regions.share.shape[0]):
            for ti in range(agg.regions.share.shape[1]):
                share, gain = agg.regions.region(ri, ti)
                row[f"share_srg{ri}_tsg{ti}"] = share
                row[f"gain_srg{ri}_tsg{ti}"] = gain
        summary_rows.append(row)
        with open(out_dir / f"summary_{key}.csv", "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(row))
            writer.writeheader()
            writer.writerow(row)
        print(
            f"{key}: mean gain {agg.mean_gain_pct:.1f}%, "
            f"median {agg.median_gain_pct:.1f}%, mean hotspots {agg.mean_hotspot_count:.1f}"
        )
    with open(out_dir / "sweep_summary.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(summary_rows[0]))
        writer.writeheader()
        writer.writerows(summary_rows)
    return EXIT_OK


class _CheckTable:
    """Accumulates expected-vs-computed rows for demo output."""

    def __init__(self):
        self.rows = []
        self.all_ok = True

    def close(self, name, expected, computed, tol):
        ok = abs(computed - expected) <= tol
        self._add(name, f"{expected:g}", f"{computed:.4f}", ok)

    def close_seq(self, name, expected, computed, tol):
        ok = len(expected) == len(computed) and all(
            abs(c - e) <= tol for e, c in zip(expected, computed)
        )
        self._add(
            name,
            "(" + ", ".join(f"{e:g}" for e in expected) + ")",
            "(" + ", ".join(f"{c:.3f}" for c in computed) + ")",
            ok,
        )

    def same(self, name, expected, computed):
        ok = expected == computed
        self._add(name, str(expected), str(computed), ok)

    def _add(self, name, expected, computed, ok):
        self.all_ok &= ok
        self.rows.append((name, expected, computed, "ok" if ok else "MISMATCH"))

    def render(self) -> str:
        width = max(len(r[0]) for r in self.rows)
        ew = max(len(r[1]) for r in self.rows)
        lines = [
            f"  {name:<{width}}  expected {exp:<{ew}}  computed {comp}  [{flag}]"
            for name, exp, comp, flag in self.rows
        ]
        return "\n".join(lines)


def _sorted_labels(net, index_set):
    return sorted(net.labels[i] for i in index_set)


def _demo_intro(net, checks):
    scenario = net.scenario()
    base = baseline_rates(scenario)
    b = net.index_of("B")
    checks.close("baseline sum rate", 5.63, base.total, 0.01)
    checks.close("baseline rate of B", 3.32, float(base[b]), 0.01)
    best = enumerate_optimal(scenario)
    checks.same(
        "best hotspot set", ["B"], _sorted_labels(net, best.best_assignment.hotspots)
    )
    checks.close("one-hotspot sum rate", 9.96, best.best_sum_rate, 0.01)
    checks.close(
        "two-hotspot B link rate", 4.98, hotspot_link_rate(scenario, 2, b), 0.01
    )
    only_a = Assignment(np.full(3, net.index_of("A")))
    try:
        allocate_rates(scenario, only_a)
        feasible = True
    except InfeasibleAssignmentError:
        feasible = False
    checks.same("A as sole hotspot feasible", False, feasible)


def _demo_fig2(net, checks):
    scenario = net.scenario()
    base = baseline_rates(scenario)
    best = enumerate_optimal(scenario)
    if net.name == "fig2a":
        checks.close("baseline sum rate", 3.0976, base.total, 0.01)
        lemma = lemma1_config(net.graph(), scenario.cell_sinr)
        checks.same(
            "single-clique rule hotspot", [17], _sorted_labels(net, lemma.hotspots)
        )
        checks.same("exact hotspots", [17], _sorted_labels(net, best.best_assignment.hotspots))
        checks.close("optimal sum rate", 5.68, best.best_sum_rate, 0.01)
        gain = 100.0 * (best.best_sum_rate - base.total) / base.total
        checks.close("sum-rate gain %", 83.0, gain, 0.5)
        alloc = allocate_rates(scenario, best.best_assignment)
        checks.close_seq(
            "allocation (by node)",
            (0.5, 0.5, 0.6, 0.7, 0.7, 0.8, 0.8, 1.0),
            [float(r) for r in alloc.node_rates],
            0.05,  # reference values are printed to one decimal
        )
    elif net.name == "fig2b":
        parts = verify_clique_partition(net.graph())
        lemma = lemma2_config(net.graph(), parts, scenario.cell_sinr)
        checks.same(
            "per-clique rule hotspots", [10, 17], _sorted_labels(net, lemma.hotspots)
        )
        checks.same("exact hotspots", [10, 17], _sorted_labels(net, best.best_assignment.hotspots))
        checks.close("optimal sum rate", 4.57, best.best_sum_rate, 0.01)
        solo = feasible_assignment(scenario, {net.index_of(17)})
        checks.same("17 as sole hotspot feasible", False, solo is not None)
    elif net.name == "fig2c":
        checks.same("exact hotspots", [7, 17], _sorted_labels(net, best.best_assignment.hotspots))
    elif net.name == "fig2d":
        checks.same(
            "exact hotspots", [7, 16, 17], _sorted_labels(net, best.best_assignment.hotspots)
        )
    elif net.name == "fig2e":
        checks.same("baseline is optimal", True, best.status == "baseline_only")
        checks.close(
            "link rate of 7 at H=5", 0.518, hotspot_link_rate(scenario, 5, net.index_of(7)), 0.01
        )
        checks.close(
            "link rate of 6 at H=5", 0.463, hotspot_link_rate(scenario, 5, net.index_of(6)), 0.01
        )
        checks.close_seq(
            "baselines of 5, 6, 7",
            (0.257, 0.290, 0.324),
            [float(base[net.index_of(l)]) for l in (5, 6, 7)],
            0.01,
        )
        candidate = net.index_set({6, 7, 13, 16, 17})
        checks.same(
            "5-hotspot candidate feasible",
            False,
            feasible_assignment(scenario, candidate) is not None,
        )


def _demo_fig4(net, checks):
    scenario = net.scenario()
    base = baseline_rates(scenario)
    cap = capacity_matrix(scenario)
    row = net.index_of(15)
    others = [net.index_of(l) for l in (5, 8, 10, 13, 14)]
    checks.close_seq(
        "WiFi capacities from 15",
        (7.32, 0.40, 0.32, 8.64, 6.99),
        [float(cap.c[row, j]) for j in others],
        0.01,
    )
    prospective = prospective_client_matrix(cap, base)
    checks.same("client budget of 15", 3, int(prospective.budget[row]))
    checks.same(
        "prospective clients of 15",
        [5, 13, 14],
        _sorted_labels(net, prospective.clients_of(row)),
    )

    for fair, tag, expected_loads, expected_gains in (
        (False, "before balancing", (0.97, 0.64), (4.76, 3.41, 2.82, 2.23, 56.81, 53.19)),
        (True, "after balancing", (0.82, 0.78), (53.31, 28.43, 23.59, 18.59, 23.30, 21.82)),
    ):
        result = configure_network(scenario, fair_loading=fair)
        if not fair:
            checks.same("chosen hotspot count", 2, result.hotspot_count)
            checks.same(
                "chosen hotspots", [13, 15], _sorted_labels(net, result.assignment.hotspots)
            )
        loads = [
            loading(result.assignment, base, scenario, net.index_of(l)) for l in (13, 15)
        ]
        checks.close_seq(f"loadings 13/15 {tag}", expected_loads, loads, 0.01)
        gains = [
            100.0 * (result.allocation.node_rates[j] - base[j]) / base[j]
            for j in range(scenario.n)
        ]
        checks.close_seq(f"node gains % {tag}", expected_gains, gains, 0.05)


def _cmd_demo(args) -> int:
    name = args.name
    if name not in DEMO_NETWORKS:
        print(
            f"unknown demo {name!r}; choose from {', '.join(sorted(DEMO_NETWORKS))}",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    net = DEMO_NETWORKS[name]
    checks = _CheckTable()
    if name == "intro-3node":
        _demo_intro(net, checks)
    elif name.startswith("fig2"):
        _demo_fig2(net, checks)
    else:
        _demo_fig4(net, checks)
    print(f"demo {name}: {net.description}")
    print(checks.render())
    if not checks.all_ok:
        print("some computed values do not match their references", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tethernet",
        description="Configure cellular nodes into WiFi-tethered hotspot networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a random scenario file")
    gen.add_argument("--nodes", type=int, default=100)
    gen.add_argument("--radius-km", type=float, default=1.0)
    gen.add_argument("--eta", type=float, default=1.0)
    gen.add_argument("--alpha", type=float, default=3.0)
    gen.add_argument("--alpha-wifi", type=float, default=3.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_generate)

    solve = sub.add_parser("solve", help="solve a scenario or WiFi-graph file")
    solve.add_argument("--in", dest="input", required=True)
    solve.add_argument("--out")
    solve.add_argument(
        "--solver", choices=("exact", "heuristic", "lemma1", "lemma2"), default="heuristic"
    )
    solve.add_argument("--max-exact-n", type=int, default=12)
    solve.add_argument("--no-fair-loading", action="store_true")
    solve.set_defaults(func=_cmd_solve)

    audit = sub.add_parser("audit", help="check a saved configuration")
    audit.add_argument("--in", dest="input", required=True, help="configuration file")
    audit.add_argument("--scenario", required=True, help="scenario or graph file")
    audit.set_defaults(func=_cmd_audit)

    sweep = sub.add_parser("sweep", help="Monte-Carlo parameter sweep with CSV output")
    sweep.add_argument("--nodes", type=int, nargs="+", default=[100, 200, 400])
    sweep.add_argument("--radius-km", type=float, nargs="+", default=[1.0, 2.0, 5.0])
    sweep.add_argument("--eta", type=float, nargs="+", default=[0.5, 0.75, 1.0])
    sweep.add_argument("--alpha", type=float, default=3.0)
    sweep.add_argument("--alpha-wifi", type=float, nargs="+", default=[2.5, 3.0])
    sweep.add_argument("--instances", type=int, default=100)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--no-fair-loading", action="store_true")
    sweep.add_argument("--out", required=True, help="output directory")
    sweep.set_defaults(func=_cmd_sweep)

    demo = sub.add_parser("demo", help="replay a built-in network")
    demo.add_argument("name")
    demo.set_defaults(func=_cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SizeGuardError, InfeasibleAssignmentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
