"""Ground-truth solvers for small instances.

Two ingredients:

* an exhaustive search over hotspot subsets with upper-bound ordering
  (the sum rate of any feasible configuration depends only on the
  hotspot set, so the first set in decreasing-bound order that admits a
  client assignment is optimal), and
* closed-form optima for WiFi connectivity graphs made of cliques.

The binary WiFi graph abstracts link quality to "carries any rate" /
"carries nothing": an edge means the pair's WiFi link never limits an
allocation, a missing edge means it can carry no rate at all. Such a
graph converts to a Scenario whose WiFi SINRs are inf / 0, so every
other module runs on it unchanged.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import SizeGuardError, StructureError
from .ratemodel import Assignment, baseline_rates, link_capacity_matrix, shannon_rates
from .scenario import Scenario, ScenarioParams, db_to_linear, linear_to_db

DEFAULT_MAX_N = 12
_CAP_TOL = 1e-9


@dataclass(frozen=True)
class WifiGraph:
    """Symmetric binary WiFi connectivity: edge = link is never a bottleneck."""

    n: int
    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.ascontiguousarray(np.asarray(self.adjacency, dtype=bool))
        if adj.shape != (self.n, self.n):
            raise StructureError(f"adjacency must have shape ({self.n}, {self.n})")
        if not np.array_equal(adj, adj.T):
            raise StructureError("adjacency must be symmetric")
        if np.any(np.diag(adj)):
            raise StructureError("adjacency diagonal must be zero")
        adj.flags.writeable = False
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def from_edges(cls, n: int, edges) -> "WifiGraph":
        adj = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if i == j:
                raise StructureError(f"self-edge ({i}, {j}) is not allowed")
            adj[i, j] = adj[j, i] = True
        return cls(n=n, adjacency=adj)

    @classmethod
    def clique(cls, n: int) -> "WifiGraph":
        adj = np.ones((n, n), dtype=bool)
        np.fill_diagonal(adj, False)
        return cls(n=n, adjacency=adj)

    @classmethod
    def from_cliques(cls, groups) -> "WifiGraph":
        """Disjoint union of cliques; `groups` are iterables of node indices."""
        nodes = [i for g in groups for i in g]
        n = max(nodes) + 1
        adj = np.zeros((n, n), dtype=bool)
        for g in groups:
            g = list(g)
            for i, j in itertools.combinations(g, 2):
                adj[i, j] = adj[j, i] = True
        return cls(n=n, adjacency=adj)

    @property
    def edges(self) -> list[tuple[int, int]]:
        ii, jj = np.nonzero(np.triu(self.adjacency))
        return [(int(i), int(j)) for i, j in zip(ii, jj)]

    def is_clique(self) -> bool:
        off = ~np.eye(self.n, dtype=bool)
        return bool(np.all(self.adjacency[off]))


def as_scenario(graph: WifiGraph, cell_sinr, eta: float = 1.0) -> Scenario:
    """Scenario view of a WiFi graph: edge -> inf SINR, non-edge -> 0."""
    cell = np.asarray(cell_sinr, dtype=float)
    wifi = np.where(graph.adjacency, np.inf, 0.0)
    np.fill_diagonal(wifi, np.nan)
    params = ScenarioParams(node_count=graph.n, wifi_efficiency=eta)
    return Scenario(params=params, cell_sinr=cell, wifi_sinr=wifi)


@dataclass(frozen=True)
class ExactResult:
    best_assignment: Assignment
    best_sum_rate: float
    configurations_examined: int
    status: str  # 'optimal' | 'baseline_only'


def feasible_assignment(scenario: Scenario, hotspot_set) -> Assignment | None:
    """Search for a client assignment that makes `hotspot_set` feasible.

    Backtracks over client -> hotspot choices. A complete assignment is
    feasible when each hotspot's members' baselines fit under its 1/H
    link rate and every client's baseline fits under its WiFi cap at the
    hotspot's final client count. Both quantities only tighten as clients
    are added, so partial violations prune safely.
    """
    hotspots = sorted(int(h) for h in hotspot_set)
    n = scenario.n
    h_count = len(hotspots)
    base = baseline_rates(scenario).rates
    capacity = link_capacity_matrix(scenario)
    full = shannon_rates(scenario)

    clients = [j for j in range(n) if j not in set(hotspots)]
    # Hardest-to-place first.
    clients.sort(key=lambda j: (-base[j], j))

    link = {h: full[h] / h_count for h in hotspots}
    load = {h: float(base[h]) for h in hotspots}
    count = {h: 0 for h in hotspots}
    # max_clients[h][j]: largest client count of h under which j's cap
    # still covers its baseline.
    max_clients = {h: capacity[h] / base for h in hotspots}
    min_cap = {h: np.inf for h in hotspots}
    owner = np.arange(n)

    def place(idx: int) -> bool:
        if idx == len(clients):
            return True
        j = clients[idx]
        for h in hotspots:
            if load[h] + base[j] > link[h] + _CAP_TOL:
                continue
            new_min = min(min_cap[h], max_clients[h][j])
            if count[h] + 1 > new_min + _CAP_TOL:
                continue
            old_min = min_cap[h]
            load[h] += base[j]
            count[h] += 1
            min_cap[h] = new_min
            owner[j] = h
            if place(idx + 1):
                return True
            owner[j] = j
            load[h] -= base[j]
            count[h] -= 1
            min_cap[h] = old_min
        return False

    if not place(0):
        return None
    return Assignment(owner.copy())


def enumerate_optimal(
    source,
    cell_sinr=None,
    eta: float = 1.0,
    max_n: int = DEFAULT_MAX_N,
    prune: bool = True,
) -> ExactResult:
    """Exhaustive optimum over every hotspot set and client assignment.

    `source` is a Scenario, or a WifiGraph together with `cell_sinr`
    (linear). Hotspot sets are visited in decreasing order of their
    sum-rate bound (1/|S|) * sum(log2(1+SINR_i)); with `prune` the scan
    stops at the first feasible set, which that order makes optimal.
    `prune=False` scans everything and must return the same optimum.
    """
    if isinstance(source, WifiGraph):
        if cell_sinr is None:
            raise ValueError("cell_sinr is required with a WifiGraph input")
        scenario = as_scenario(source, cell_sinr, eta=eta)
    else:
        scenario = source
    n = scenario.n
    if n > max_n:
        raise SizeGuardError(
            f"exhaustive search limited to {max_n} nodes, got {n}"
        )

    full = shannon_rates(scenario)
    subsets = []
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            subsets.append((float(full[list(combo)].sum() / size), combo))
    subsets.sort(key=lambda item: (-item[0], item[1]))

    examined = 0
    best = None
    best_rate = -np.inf
    for rate, combo in subsets:
        if best is not None and prune:
            break
        examined += 1
        found = feasible_assignment(scenario, combo)
        if found is not None and rate > best_rate:
            best, best_rate = found, rate

    # The all-hotspot (baseline) set is always feasible, so best exists.
    status = "baseline_only" if best == Assignment.identity(n) else "optimal"
    return ExactResult(
        best_assignment=best,
        best_sum_rate=best_rate,
        configurations_examined=examined,
        status=status,
    )


def lemma1_config(graph: WifiGraph, cell_sinr) -> Assignment:
    """Optimal configuration when the WiFi graph is one clique.

    The node with the largest cellular SINR becomes the only hotspot and
    serves everyone; no WiFi link constrains the allocation, so the whole
    baseline demand fits under the best link.
    """
    if not graph.is_clique():
        raise StructureError("lemma1_config requires a clique WiFi graph")
    cell = np.asarray(cell_sinr, dtype=float)
    hotspot = int(np.argmax(cell))
    return Assignment(np.full(graph.n, hotspot))


def lemma2_config(graph: WifiGraph, partition, cell_sinr) -> Assignment:
    """Optimal configuration for equal-size, mutually isolated cliques.

    One hotspot per clique (its max-SINR node); every node then keeps a
    1/N time share but rides the best link of its clique.
    """
    cell = np.asarray(cell_sinr, dtype=float)
    parts = [sorted(int(i) for i in part) for part in partition]
    covered = sorted(i for part in parts for i in part)
    if covered != list(range(graph.n)):
        raise StructureError("partition must cover every node exactly once")
    sizes = {len(part) for part in parts}
    if len(sizes) != 1:
        raise StructureError(f"cliques must have equal sizes, got {sorted(len(p) for p in parts)}")
    adj = graph.adjacency
    for part in parts:
        for i, j in itertools.combinations(part, 2):
            if not adj[i, j]:
                raise StructureError(f"part {part} is not a clique (missing edge {i}-{j})")
    for pa, pb in itertools.combinations(parts, 2):
        for i in pa:
            for j in pb:
                if adj[i, j]:
                    raise StructureError(f"parts are not isolated (edge {i}-{j})")

    owner = np.arange(graph.n)
    for part in parts:
        hotspot = max(part, key=lambda i: (cell[i], -i))
        owner[part] = hotspot
    return Assignment(owner)


def verify_clique_partition(graph: WifiGraph):
    """Connected components if each one is a clique, else None."""
    n = graph.n
    adj = graph.adjacency
    seen = np.zeros(n, dtype=bool)
    parts = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in np.flatnonzero(adj[i]):
                if not seen[j]:
                    seen[j] = True
                    stack.append(int(j))
        comp.sort()
        for i, j in itertools.combinations(comp, 2):
            if not adj[i, j]:
                return None
        parts.append(set(comp))
    return parts


def save_wifi_graph(path, graph: WifiGraph, cell_sinr) -> None:
    doc = {
        "n": graph.n,
        "edges": [[i, j] for i, j in graph.edges],
        "cell_sinr_db": linear_to_db(np.asarray(cell_sinr, dtype=float)).tolist(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_wifi_graph(path) -> tuple[WifiGraph, np.ndarray]:
    """Read a graph file; returns (graph, linear cell SINRs)."""
    with open(path) as fh:
        doc = json.load(fh)
    graph = WifiGraph.from_edges(doc["n"], doc["edges"])
    return graph, db_to_linear(np.asarray(doc["cell_sinr_db"], dtype=float))
