"""Rates, assignments, and feasibility for tethered hotspot networks.

The model: N nodes share one cellular channel. In the baseline network
every node uses its own link for a 1/N time share, so node i gets
(1/N)*log2(1 + SINR_i) bits/sec/Hz. In a hotspot network only the H
hotspots use their links, each for a 1/H share; a client reaches the
tower through its hotspot's link over WiFi, and the rate it can be
allocated there is capped by its WiFi link rate

    eta * (1 / n_clients(h)) * log2(1 + SINR_hj)

where n_clients(h) counts the clients sharing hotspot h's WiFi medium.
A configuration is feasible when every node is allocated at least its
baseline rate, client rates respect the WiFi caps, and each hotspot's
allocations exactly exhaust its link rate.

Everything here is in spectral efficiency (bits/sec/Hz); multiply by the
scenario bandwidth for absolute rates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InfeasibleAssignmentError, UndefinedLinkError
from .scenario import Scenario

FEASIBILITY_TOL = 1e-9  # bits/sec/Hz slack allowed on any constraint
ALLOCATION_TOL = 1e-9  # residual below which the allocation loop stops


def shannon_rates(scenario: Scenario) -> np.ndarray:
    """Per-node full-time link rate to the tower, log2(1 + SINR_i)."""
    return np.log2(1.0 + scenario.cell_sinr)


@dataclass(frozen=True)
class BaselineRates:
    """Per-node rates when everyone uses their own link for a 1/N share."""

    rates: np.ndarray

    def __post_init__(self):
        rates = np.ascontiguousarray(np.asarray(self.rates, dtype=float))
        rates.flags.writeable = False
        object.__setattr__(self, "rates", rates)

    def __getitem__(self, j):
        return self.rates[j]

    def __len__(self):
        return len(self.rates)

    @property
    def total(self) -> float:
        return float(self.rates.sum())


def baseline_rates(scenario: Scenario) -> BaselineRates:
    return BaselineRates(shannon_rates(scenario) / scenario.n)


@dataclass(frozen=True, eq=False)
class Assignment:
    """Who carries whom: ``owner[j]`` is the hotspot serving node j.

    Hotspots serve themselves (``owner[h] == h``); every other node is a
    client of exactly one hotspot. Equivalent to the binary matrix with
    a[i, j] = 1 iff owner[j] == i, which is column-stochastic and only
    lets clients attach to hotspots.
    """

    owner: np.ndarray

    def __post_init__(self):
        owner = np.ascontiguousarray(np.asarray(self.owner, dtype=int))
        n = owner.shape[0]
        if owner.ndim != 1 or n == 0:
            raise ValueError("owner must be a non-empty 1-D index array")
        if np.any(owner < 0) or np.any(owner >= n):
            raise ValueError("owner entries must be node indices")
        if np.any(owner[owner] != owner):
            raise ValueError("clients may only attach to hotspots")
        owner.flags.writeable = False
        object.__setattr__(self, "owner", owner)

    def __eq__(self, other):
        return isinstance(other, Assignment) and np.array_equal(self.owner, other.owner)

    def __hash__(self):
        return hash(self.owner.tobytes())

    @property
    def n(self) -> int:
        return self.owner.shape[0]

    @property
    def hotspots(self) -> np.ndarray:
        return np.flatnonzero(self.owner == np.arange(self.n))

    @property
    def hotspot_count(self) -> int:
        return int(np.count_nonzero(self.owner == np.arange(self.n)))

    def is_hotspot(self, i) -> bool:
        return self.owner[i] == i

    def clients_of(self, i) -> np.ndarray:
        """Clients of hotspot i, excluding i itself."""
        mask = self.owner == i
        mask[i] = False
        return np.flatnonzero(mask)

    def members_of(self, i) -> np.ndarray:
        """Hotspot i together with its clients."""
        return np.flatnonzero(self.owner == i)

    def client_count(self, i) -> int:
        return int(np.count_nonzero(self.owner == i)) - 1

    @property
    def matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=int)
        a[self.owner, np.arange(self.n)] = 1
        return a

    @classmethod
    def identity(cls, n: int) -> "Assignment":
        return cls(np.arange(n))

    @classmethod
    def from_groups(cls, n: int, groups) -> "Assignment":
        """Build from a mapping hotspot -> iterable of client indices."""
        owner = np.full(n, -1, dtype=int)
        for hotspot, clients in groups.items():
            owner[hotspot] = hotspot
            for c in clients:
                owner[c] = hotspot
        if np.any(owner < 0):
            missing = np.flatnonzero(owner < 0).tolist()
            raise ValueError(f"nodes {missing} are neither hotspots nor clients")
        return cls(owner)

    @classmethod
    def from_matrix(cls, a) -> "Assignment":
        a = np.asarray(a)
        violations = matrix_structure_violations(a)
        if violations:
            raise ValueError(f"invalid assignment matrix: {violations[0]}")
        return cls(np.argmax(a, axis=0))


def matrix_structure_violations(a) -> list["Violation"]:
    """Structural checks on a raw binary matrix (attachment constraints)."""
    a = np.asarray(a)
    out = []
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return [Violation("unique_attach", (-1, -1), float("-inf"))]
    bad = (a != 0) & (a != 1)
    for i, j in zip(*np.nonzero(bad)):
        out.append(Violation("unique_attach", (int(i), int(j)), float("-inf")))
    col = a.sum(axis=0)
    for j in np.flatnonzero(col != 1):
        out.append(Violation("unique_attach", int(j), float(1 - col[j])))
    if not out:
        owner = np.argmax(a, axis=0)
        for j in np.flatnonzero(owner[owner] != owner):
            out.append(Violation("unique_attach", (int(owner[j]), int(j)), float("-inf")))
    return out


class Violation(NamedTuple):
    """One violated constraint; negative slack means violation magnitude."""

    constraint: str  # 'baseline' | 'wifi_cap' | 'link_sum' | 'unique_attach'
    subject: object  # node index or (hotspot, node) pair
    slack: float


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    violations: tuple[Violation, ...]

    def __str__(self):
        if self.feasible:
            return "feasible (no violations)"
        lines = [f"infeasible ({len(self.violations)} violations)"]
        lines += [
            f"  {v.constraint} at {v.subject}: slack {v.slack:.6g}"
            for v in self.violations
        ]
        return "\n".join(lines)


@dataclass(frozen=True)
class RateAllocation:
    """Sparse per-link rates plus the per-node totals they induce.

    ``rates`` maps (hotspot, node) -> rate for every served node,
    including the hotspot itself at (h, h). ``node_rates[j]`` is the
    single entry serving node j.
    """

    rates: dict
    node_rates: np.ndarray

    def __post_init__(self):
        node_rates = np.ascontiguousarray(np.asarray(self.node_rates, dtype=float))
        node_rates.flags.writeable = False
        object.__setattr__(self, "node_rates", node_rates)

    @property
    def total(self) -> float:
        return float(self.node_rates.sum())


def hotspot_link_rate(scenario: Scenario, hotspot_count: int, i: int) -> float:
    """Rate of node i's tower link when it is one of `hotspot_count` hotspots."""
    if hotspot_count < 1:
        raise ValueError("hotspot_count must be at least 1")
    return float(np.log2(1.0 + scenario.cell_sinr[i]) / hotspot_count)


def wifi_link_rate(scenario: Scenario, assignment: Assignment, i: int, j: int) -> float:
    """WiFi link rate from hotspot i to its client j under the assignment.

    Defined only for actual hotspot->client pairs; the medium is shared
    equally by all of i's clients.
    """
    if i == j or assignment.owner[j] != i or not assignment.is_hotspot(i):
        raise UndefinedLinkError(f"({i}, {j}) is not a hotspot->client link")
    n_clients = assignment.client_count(i)
    return float(
        scenario.eta * np.log2(1.0 + scenario.wifi_sinr[i, j]) / n_clients
    )


def link_capacity_matrix(scenario: Scenario) -> np.ndarray:
    """Full-medium WiFi spectral efficiency eta*log2(1+SINR_ij); NaN diagonal."""
    return scenario.eta * np.log2(1.0 + scenario.wifi_sinr)


def sum_rate(assignment: Assignment, scenario: Scenario) -> float:
    """Network sum rate: each hotspot's link runs for a 1/H time share."""
    hotspots = assignment.hotspots
    full = np.log2(1.0 + scenario.cell_sinr[hotspots])
    return float(full.sum() / hotspots.size)


def check_feasibility(
    scenario: Scenario, assignment, allocation: RateAllocation, tol: float = FEASIBILITY_TOL
) -> FeasibilityReport:
    """Audit an (assignment, allocation) pair against all constraints.

    ``assignment`` may be an Assignment or a raw binary matrix; structural
    problems in a raw matrix are reported as 'unique_attach' violations and
    preempt the rate checks. Rates are read from ``allocation.rates``.
    """
    if not isinstance(assignment, Assignment):
        structural = matrix_structure_violations(assignment)
        if structural:
            return FeasibilityReport(False, tuple(structural))
        assignment = Assignment.from_matrix(assignment)

    base = baseline_rates(scenario).rates
    capacity = link_capacity_matrix(scenario)
    h_count = assignment.hotspot_count
    violations = []

    for j in range(assignment.n):
        rate_j = allocation.rates.get((int(assignment.owner[j]), j), 0.0)
        slack = rate_j - base[j]
        if slack < -tol:
            violations.append(Violation("baseline", j, float(slack)))

    for h in assignment.hotspots:
        h = int(h)
        members = assignment.members_of(h)
        clients = members[members != h]
        link = hotspot_link_rate(scenario, h_count, h)
        got = sum(allocation.rates.get((h, int(j)), 0.0) for j in members)
        if abs(got - link) > tol:
            violations.append(Violation("link_sum", h, float(link - got)))
        if clients.size:
            for j in clients:
                cap = capacity[h, j] / clients.size
                slack = cap - allocation.rates.get((h, int(j)), 0.0)
                if slack < -tol:
                    violations.append(Violation("wifi_cap", (h, int(j)), float(slack)))

    return FeasibilityReport(not violations, tuple(violations))


def allocate_rates(
    scenario: Scenario, assignment: Assignment, tol: float = ALLOCATION_TOL
) -> RateAllocation:
    """Fill each hotspot's link: baselines first, then equal split of leftover.

    Per hotspot, every served node starts at its baseline rate; the unused
    link rate is then split equally among the nodes still below their WiFi
    cap (the hotspot itself is never capped), until the link is exhausted.
    Raises InfeasibleAssignmentError when baselines alone overflow a link
    or exceed a WiFi cap, since no allocation can then satisfy the
    constraints.
    """
    base = baseline_rates(scenario).rates
    capacity = link_capacity_matrix(scenario)
    h_count = assignment.hotspot_count

    problems = []
    for h in assignment.hotspots:
        h = int(h)
        members = assignment.members_of(h)
        clients = members[members != h]
        link = hotspot_link_rate(scenario, h_count, h)
        demand = float(base[members].sum())
        if demand > link + tol:
            problems.append(Violation("link_sum", h, float(link - demand)))
        for j in clients:
            cap = capacity[h, j] / clients.size
            if base[j] > cap + tol:
                problems.append(Violation("wifi_cap", (h, int(j)), float(cap - base[j])))
    if problems:
        report = FeasibilityReport(False, tuple(problems))
        raise InfeasibleAssignmentError(
            f"assignment admits no feasible allocation:\n{report}", report
        )

    rates = {}
    node_rates = np.zeros(assignment.n)
    for h in assignment.hotspots:
        h = int(h)
        members = [int(j) for j in assignment.members_of(h)]
        n_clients = len(members) - 1
        link = hotspot_link_rate(scenario, h_count, h)
        cap = {
            j: np.inf if j == h else float(capacity[h, j] / n_clients) for j in members
        }
        alloc = {j: float(base[j]) for j in members}
        residual = link - sum(alloc.values())
        open_nodes = set(members)
        # Each pass either exhausts the residual or saturates a cap, so
        # this takes at most len(members) + 1 passes.
        while residual > tol and open_nodes:
            share = residual / len(open_nodes)
            for j in sorted(open_nodes):
                room = cap[j] - alloc[j]
                take = min(share, room)
                alloc[j] += take
                residual -= take
                if room <= share:
                    open_nodes.discard(j)
        for j in members:
            rates[(h, j)] = alloc[j]
            node_rates[j] = alloc[j]

    return RateAllocation(rates=rates, node_rates=node_rates)
