"""Greedy hotspot-network construction.

The pipeline, given a scenario:

1. Build the prospective-client matrix W: for every node i, the largest
   set of other nodes whose baseline rates their WiFi links to i could
   still carry if all of them shared i's medium. Clients of i are only
   ever drawn from this set, which keeps WiFi caps satisfied by
   construction.
2. For each candidate hotspot count H (1..N), try to cover all nodes
   with H hotspots: prune every node's prospective set until the
   baselines it would carry fit under a 1/H link share (dropping
   large-SINR members first, since those make better hotspots), then
   greedily pick hotspots by how many still-uncovered nodes they
   support. When a round leaves nodes uncovered, keep only its first
   pick and rerun on the rest, up to H rounds.
3. Stop raising H once even the H+1 best links together cannot beat a
   sum rate already achieved, pick the best H, rebalance client load
   across hotspots (Jain-fairness ascent), and allocate rates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ratemodel import (
    Assignment,
    RateAllocation,
    allocate_rates,
    baseline_rates,
    link_capacity_matrix,
    shannon_rates,
)
from .scenario import Scenario

FAIR_LOADING_MOVE_CAP_FACTOR = 1  # cap = factor * n^2 moves


@dataclass(frozen=True)
class CapacityMatrix:
    """Pairwise full-medium WiFi spectral efficiencies (NaN diagonal)."""

    c: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.c, dtype=float))
        c.flags.writeable = False
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.c.shape[0]


def capacity_matrix(scenario: Scenario) -> CapacityMatrix:
    return CapacityMatrix(link_capacity_matrix(scenario))


@dataclass(frozen=True)
class ProspectiveClientMatrix:
    """w[i, j] = 1 when j may ever serve as a client of i.

    ``budget[i]`` is the row's client budget: the largest n such that at
    least n nodes' WiFi links to i can carry their baselines even when n
    clients share i's medium. Row i then holds exactly budget[i] ones,
    placed on the smallest-baseline qualifying nodes.
    """

    w: np.ndarray
    budget: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(np.asarray(self.w, dtype=bool))
        budget = np.ascontiguousarray(np.asarray(self.budget, dtype=int))
        w.flags.writeable = False
        budget.flags.writeable = False
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "budget", budget)

    def clients_of(self, i) -> np.ndarray:
        return np.flatnonzero(self.w[i])


def prospective_client_matrix(capacity, baselines) -> ProspectiveClientMatrix:
    """Fix, per node, the set of nodes that may ever become its clients.

    For row i let t_j = c_ij / baseline_j (how many co-clients node j's
    link to i tolerates). The budget n* is the largest n with at least n
    nodes satisfying t_j >= n; the n* smallest-baseline such nodes get
    w[i, j] = 1. Rows with no feasible n stay empty.
    """
    c = capacity.c if isinstance(capacity, CapacityMatrix) else np.asarray(capacity, float)
    base = np.asarray(getattr(baselines, "rates", baselines), dtype=float)
    n = c.shape[0]
    w = np.zeros((n, n), dtype=bool)
    budget = np.zeros(n, dtype=int)

    order_by_base = np.lexsort((np.arange(n), base))
    for i in range(n):
        tolerance = c[i] / base
        tolerance[i] = -np.inf
        ranked = np.sort(tolerance)[::-1]
        counts = np.arange(1, n + 1, dtype=float)
        feasible = np.flatnonzero(ranked >= counts)
        if feasible.size == 0:
            continue
        n_star = int(feasible[-1] + 1)
        budget[i] = n_star
        chosen = [j for j in order_by_base if tolerance[j] >= n_star][:n_star]
        w[i, chosen] = True
    return ProspectiveClientMatrix(w=w, budget=budget)


@dataclass(frozen=True)
class SelectionRound:
    """One pass of hotspot picking over a node pool.

    ``hotspots`` are in pick order; ``clients[k]`` are the nodes covered
    by hotspots[k] (excluding itself). With ``detail``, ``support`` maps
    every pool node to the clients it could have served after SINR-based
    pruning and ``pruned`` to the prospective clients pruning removed.
    """

    hotspots: list
    clients: list
    leftover: np.ndarray
    support: dict | None
    pruned: dict | None


def select_hotspots(
    nodes, prospective: ProspectiveClientMatrix, h_target: int, h_remaining: int,
    baselines, cell_sinr, detail: bool = True,
) -> SelectionRound:
    """Pick up to ``h_remaining`` hotspots covering ``nodes``.

    Every node's prospective clients (within the pool) are first pruned
    until its own plus their baselines fit under its 1/h_target link
    rate, removing the largest cellular SINR first. Hotspots are then
    chosen greedily by supported-client count within the shrinking pool;
    ties go to the larger cellular SINR, then the lower index.
    """
    base = np.asarray(getattr(baselines, "rates", baselines), dtype=float)
    cell = np.asarray(cell_sinr, dtype=float)
    n = base.shape[0]
    full = np.log2(1.0 + cell)

    pool = np.zeros(n, dtype=bool)
    pool[np.asarray(nodes, dtype=int)] = True
    members = np.flatnonzero(pool)

    candidate = prospective.w & pool[None, :]
    # Keep the largest low-SINR prefix whose baselines fit the budget:
    # removing from the top (largest SINR first) until the demand fits is
    # the same as keeping that prefix.
    order = np.lexsort((-np.arange(n), cell))  # SINR asc, ties keep higher index
    contrib = candidate[:, order] * base[order][None, :]
    cum = np.cumsum(contrib, axis=1)
    room = full / h_target - base
    keep_sorted = candidate[:, order] & (cum <= room[:, None])
    keep = np.zeros_like(candidate)
    keep[:, order] = keep_sorted

    support = pruned = None
    if detail:
        support = {int(i): np.flatnonzero(keep[i]) for i in members}
        pruned = {int(i): np.flatnonzero(candidate[i] & ~keep[i]) for i in members}

    active = pool.copy()
    counts = keep[:, active].sum(axis=1)
    hotspots: list[int] = []
    client_sets: list[np.ndarray] = []
    picks_left = h_remaining
    while picks_left > 0:
        live = np.flatnonzero(active)
        if live.size == 0:
            break
        best_count = counts[live].max()
        if best_count == 0:
            # No node covers anything beyond itself: the remaining picks
            # are singletons taken by SINR (then index), all at once.
            take = live[np.lexsort((live, -cell[live]))][:picks_left]
            for pick in take:
                hotspots.append(int(pick))
                client_sets.append(np.empty(0, dtype=int))
            active[take] = False
            break
        tied = live[counts[live] == best_count]
        pick = int(tied[np.argmax(cell[tied])])
        covered = np.flatnonzero(keep[pick] & active)
        hotspots.append(pick)
        client_sets.append(covered)
        active[covered] = False
        active[pick] = False
        counts = counts - keep[:, covered].sum(axis=1) - keep[:, pick]
        picks_left -= 1

    return SelectionRound(
        hotspots=hotspots,
        clients=client_sets,
        leftover=np.flatnonzero(active),
        support=support,
        pruned=pruned,
    )


def exit_condition(h: int, rate_h: float, sorted_cell_sinr) -> bool:
    """True when no network with more hotspots can beat ``rate_h``.

    ``sorted_cell_sinr`` must be descending. Any selection of h+1 or more
    hotspots yields at most the mean of the h+1 best full link rates;
    once that bound drops below an achieved rate, larger h is pointless.
    """
    sinr = np.asarray(sorted_cell_sinr, dtype=float)
    n = sinr.shape[0]
    if h >= n:
        return False
    bound = float(np.log2(1.0 + sinr[: h + 1]).sum() / (h + 1))
    return bound < rate_h


def loading(assignment: Assignment, baselines, scenario: Scenario, i: int) -> float:
    """Fraction of hotspot i's link rate that baseline demand consumes."""
    if not assignment.is_hotspot(i):
        raise ValueError(f"node {i} is not a hotspot")
    base = np.asarray(getattr(baselines, "rates", baselines), dtype=float)
    demand = float(base[assignment.members_of(i)].sum())
    full = float(np.log2(1.0 + scenario.cell_sinr[i]))
    return assignment.hotspot_count * demand / full


def jain_fairness(loadings) -> float:
    """Jain's index over hotspot loadings: 1 is perfectly even, 1/H worst."""
    values = np.asarray(loadings, dtype=float)
    return float(values.sum() ** 2 / (values.size * np.square(values).sum()))


def compute_fair_loading(
    assignment: Assignment,
    prospective: ProspectiveClientMatrix,
    baselines,
    scenario: Scenario,
    trace=None,
) -> Assignment:
    """Rebalance clients across hotspots to even out loading.

    Repeatedly offer the least-loaded hotspot a client taken from the
    most-loaded hotspot that owns one it could absorb (prospective, not
    already its own, baseline below its spare capacity; the largest such
    baseline moves). A move is applied only if it strictly increases
    Jain's fairness over loadings; otherwise the process stops. Hotspots,
    and hence the sum rate, never change.
    """
    base = np.asarray(getattr(baselines, "rates", baselines), dtype=float)
    full = shannon_rates(scenario)
    owner = np.array(assignment.owner)
    hotspots = assignment.hotspots
    h_count = hotspots.size
    w = prospective.w

    demand = np.array([base[owner == h].sum() for h in hotspots])
    loads = h_count * demand / full[hotspots]
    fairness = jain_fairness(loads)
    pos = {int(h): k for k, h in enumerate(hotspots)}
    is_hotspot = np.zeros(assignment.n, dtype=bool)
    is_hotspot[hotspots] = True

    move_cap = FAIR_LOADING_MOVE_CAP_FACTOR * assignment.n**2
    for _ in range(move_cap):
        k_min = int(np.lexsort((hotspots, loads))[0])
        target = int(hotspots[k_min])
        spare = full[target] / h_count - demand[k_min]
        movable = np.flatnonzero(
            w[target] & ~is_hotspot & (owner != target) & (base < spare)
        )
        if movable.size == 0:
            break
        donor_loads = loads[[pos[int(owner[j])] for j in movable]]
        donors = hotspots[[pos[int(owner[j])] for j in movable]]
        best_load = donor_loads.max()
        donor = int(donors[donor_loads == best_load].min())
        candidates = movable[owner[movable] == donor]
        moved = int(candidates[np.lexsort((candidates, -base[candidates]))[0]])

        k_donor = pos[donor]
        new_demand_min = demand[k_min] + base[moved]
        new_demand_donor = demand[k_donor] - base[moved]
        trial = loads.copy()
        trial[k_min] = h_count * new_demand_min / full[target]
        trial[k_donor] = h_count * new_demand_donor / full[donor]
        new_fairness = jain_fairness(trial)
        if new_fairness <= fairness:
            break
        owner[moved] = target
        demand[k_min] = new_demand_min
        demand[k_donor] = new_demand_donor
        loads = trial
        fairness = new_fairness
        if trace is not None:
            trace.append(
                {
                    "event": "fair_move",
                    "node": moved,
                    "source": donor,
                    "dest": target,
                    "fairness": fairness,
                }
            )

    return Assignment(owner)


@dataclass(frozen=True)
class ConfiguredNetwork:
    """Result of the full pipeline on one scenario."""

    assignment: Assignment
    allocation: RateAllocation
    hotspot_count: int
    sum_rate: float
    candidate_rates: dict  # target H -> sum rate (0.0 when H failed)


def _coverage_caps(prospective: ProspectiveClientMatrix, base, full) -> np.ndarray:
    """Prefix sums of each row's client baselines, cheapest first.

    ``caps[i, k]`` is the summed demand of the k cheapest prospective
    clients of i (inf past the row's budget). No hotspot can ever cover
    more than 1 + max{k: caps[i, k] <= link_share - own_baseline} nodes,
    whatever pool it is picked from, since its clients always come from
    its prospective row and must fit its link budget.
    """
    n = base.shape[0]
    caps = np.full((n, n + 1), np.inf)
    caps[:, 0] = 0.0
    for i in range(n):
        members = np.flatnonzero(prospective.w[i])
        if members.size:
            caps[i, 1 : members.size + 1] = np.cumsum(np.sort(base[members]))
    return caps


def configure_network(
    scenario: Scenario,
    fair_loading: bool = True,
    use_exit_condition: bool = True,
    trace=None,
) -> ConfiguredNetwork:
    """Run the full greedy pipeline and allocate rates.

    ``fair_loading=False`` skips the load-rebalancing step. Disabling
    the exit condition scans every hotspot count up to N. ``trace``, if
    given, is a list that receives per-candidate and per-move records.
    """
    n = scenario.n
    base = baseline_rates(scenario)
    cell = scenario.cell_sinr
    full = shannon_rates(scenario)
    prospective = prospective_client_matrix(capacity_matrix(scenario), base)
    sinr_desc = np.sort(cell)[::-1]
    demand_prefix = _coverage_caps(prospective, base.rates, full)

    candidate_rates: dict[int, float] = {}
    saved: dict[int, list] = {}
    for h_target in range(1, n + 1):
        room = full / h_target - base.rates
        cover_cap = (demand_prefix <= room[:, None]).sum(axis=1)  # 1 + max clients
        committed: list[tuple[int, np.ndarray]] = []
        last_round: list[tuple[int, np.ndarray]] = []
        leftover = np.arange(n)
        calls = 0
        while leftover.size and calls < h_target:
            pieces = [leftover]
            if last_round:
                committed.append(last_round[0])
                for hotspot, covered in last_round[1:]:
                    pieces.append(np.array([hotspot]))
                    pieces.append(covered)
            pool = np.concatenate(pieces)
            # Even the most absorbent picks cannot cover the pool: bail out.
            picks_left = h_target - len(committed)
            pool_caps = cover_cap[pool]
            if picks_left < pool.size:
                reachable = np.partition(pool_caps, pool.size - picks_left)[
                    pool.size - picks_left :
                ].sum()
                if reachable < pool.size:
                    break
            round_result = select_hotspots(
                pool, prospective, h_target, h_target - calls, base, cell, detail=False
            )
            last_round = list(zip(round_result.hotspots, round_result.clients))
            leftover = round_result.leftover
            calls += 1
        committed.extend(last_round)

        if leftover.size == 0:
            hotspots = [h for h, _ in committed]
            rate = float(full[hotspots].sum() / len(hotspots))
            candidate_rates[h_target] = rate
            saved[h_target] = committed
        else:
            candidate_rates[h_target] = 0.0
        if trace is not None:
            trace.append(
                {
                    "event": "candidate",
                    "h_target": h_target,
                    "feasible": leftover.size == 0,
                    "hotspots": sorted(h for h, _ in committed)
                    if leftover.size == 0
                    else [],
                    "sum_rate": candidate_rates[h_target],
                }
            )
        if use_exit_condition and exit_condition(
            h_target, candidate_rates[h_target], sinr_desc
        ):
            if trace is not None:
                trace.append({"event": "exit", "h_target": h_target})
            break

    best_h = max(sorted(candidate_rates), key=lambda h: candidate_rates[h])
    groups = {h: [int(x) for x in covered] for h, covered in saved[best_h]}
    assignment = Assignment.from_groups(n, groups)
    if fair_loading and assignment.hotspot_count > 1:
        assignment = compute_fair_loading(
            assignment, prospective, base, scenario, trace=trace
        )
    allocation = allocate_rates(scenario, assignment)
    return ConfiguredNetwork(
        assignment=assignment,
        allocation=allocation,
        hotspot_count=assignment.hotspot_count,
        sum_rate=float(allocation.node_rates.sum()),
        candidate_rates=candidate_rates,
    )
