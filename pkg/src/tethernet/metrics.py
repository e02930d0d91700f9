"""Per-node gain metrics and Monte-Carlo aggregation.

For node j served by hotspot i in an H-hotspot network:

* Shannon rate gain  SRG_j = baseline_i / baseline_j (1 for hotspots):
  how much better the link j now rides is, rate-wise, than its own.
* Time share gain    TSG_j = (R_j / link_i) * (1/H) / (1/N): the time j
  effectively gets on the air versus its baseline 1/N share.
* Percent rate gain  G_j = 100 * (R_j - baseline_j) / baseline_j.

A feasible configuration can only raise a node's rate through one of the
first two, so G_j > 0 implies SRG_j > 1 or TSG_j > 1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .ratemodel import Assignment, RateAllocation, hotspot_link_rate
from .scenario import Scenario, linear_to_db

SRG_BIN_EDGES = (0.0, 1.0, 1.4, 2.6)
TSG_BIN_EDGES = (0.0, 1.0, 2.4)


@dataclass(frozen=True)
class NodeMetrics:
    node: int
    role: str  # 'hotspot' | 'client'
    srg: float
    tsg: float
    gain_pct: float


def node_metrics(
    scenario: Scenario,
    assignment: Assignment,
    allocation: RateAllocation,
    baselines,
    j: int,
) -> NodeMetrics:
    base = np.asarray(getattr(baselines, "rates", baselines), dtype=float)
    i = int(assignment.owner[j])
    h_count = assignment.hotspot_count
    link = hotspot_link_rate(scenario, h_count, i)
    rate = float(allocation.node_rates[j])
    return NodeMetrics(
        node=j,
        role="hotspot" if i == j else "client",
        srg=float(base[i] / base[j]),
        tsg=float((rate / link) * scenario.n / h_count),
        gain_pct=float(100.0 * (rate - base[j]) / base[j]),
    )


def network_metrics(scenario, assignment, allocation, baselines) -> list[NodeMetrics]:
    return [
        node_metrics(scenario, assignment, allocation, baselines, j)
        for j in range(scenario.n)
    ]


def _bin_index(value: float, edges) -> int:
    """Right-closed bins over `edges`; a value of exactly 1 goes to the
    bin starting at 1 (hotspots sit on that boundary). Out-of-range
    values land in the nearest outer bin."""
    edges = list(edges)
    n_bins = len(edges) - 1
    if value == 1.0 and 1.0 in edges:
        return min(edges.index(1.0), n_bins - 1)
    idx = int(np.searchsorted(edges, value, side="left")) - 1
    return min(max(idx, 0), n_bins - 1)


@dataclass(frozen=True)
class RegionHistogram:
    """Node shares and mean gains over an SRG x TSG grid."""

    srg_edges: tuple
    tsg_edges: tuple
    share: np.ndarray  # (srg bins, tsg bins), sums to 1
    mean_gain: np.ndarray  # NaN where a region is empty

    def region(self, srg_bin: int, tsg_bin: int) -> tuple[float, float]:
        return float(self.share[srg_bin, tsg_bin]), float(self.mean_gain[srg_bin, tsg_bin])


def region_histogram(
    metrics, srg_edges=SRG_BIN_EDGES, tsg_edges=TSG_BIN_EDGES
) -> RegionHistogram:
    n_srg = len(srg_edges) - 1
    n_tsg = len(tsg_edges) - 1
    count = np.zeros((n_srg, n_tsg))
    gain_sum = np.zeros((n_srg, n_tsg))
    for m in metrics:
        r = _bin_index(m.srg, srg_edges)
        t = _bin_index(m.tsg, tsg_edges)
        count[r, t] += 1
        gain_sum[r, t] += m.gain_pct
    total = count.sum()
    with np.errstate(invalid="ignore", divide="ignore"):
        mean_gain = np.where(count > 0, gain_sum / np.maximum(count, 1), np.nan)
    return RegionHistogram(
        srg_edges=tuple(srg_edges),
        tsg_edges=tuple(tsg_edges),
        share=count / total,
        mean_gain=mean_gain,
    )


@dataclass(frozen=True)
class InstanceSummary:
    mean_gain_pct: float
    median_gain_pct: float
    mean_srg: float
    hotspot_count: int
    regions: RegionHistogram


@dataclass(frozen=True)
class AggregateSummary:
    """Per-instance summaries plus a pooled view over all nodes."""

    instances: tuple
    mean_gain_pct: float
    median_gain_pct: float
    mean_srg: float
    mean_hotspot_count: float
    regions: RegionHistogram


def summarize_instance(
    metrics, hotspot_count: int, srg_edges=SRG_BIN_EDGES, tsg_edges=TSG_BIN_EDGES
) -> InstanceSummary:
    if not metrics:
        raise ValueError("metrics must be non-empty")
    gains = np.array([m.gain_pct for m in metrics])
    srgs = np.array([m.srg for m in metrics])
    return InstanceSummary(
        mean_gain_pct=float(gains.mean()),
        median_gain_pct=float(np.median(gains)),
        mean_srg=float(srgs.mean()),
        hotspot_count=hotspot_count,
        regions=region_histogram(metrics, srg_edges, tsg_edges),
    )


def summarize(
    metrics_by_instance,
    hotspot_counts=None,
    srg_edges=SRG_BIN_EDGES,
    tsg_edges=TSG_BIN_EDGES,
) -> AggregateSummary:
    """Summarize a batch of instances and pool their nodes."""
    instances = list(metrics_by_instance)
    if not instances or any(not m for m in instances):
        raise ValueError("need at least one instance with at least one node")
    if hotspot_counts is None:
        hotspot_counts = [sum(1 for m in inst if m.role == "hotspot") for inst in instances]
    summaries = tuple(
        summarize_instance(inst, h, srg_edges, tsg_edges)
        for inst, h in zip(instances, hotspot_counts)
    )
    pooled = [m for inst in instances for m in inst]
    gains = np.array([m.gain_pct for m in pooled])
    return AggregateSummary(
        instances=summaries,
        mean_gain_pct=float(gains.mean()),
        median_gain_pct=float(np.median(gains)),
        mean_srg=float(np.mean([m.srg for m in pooled])),
        mean_hotspot_count=float(np.mean(list(hotspot_counts))),
        regions=region_histogram(pooled, srg_edges, tsg_edges),
    )


NODE_CSV_FIELDS = (
    "instance_id",
    "node_id",
    "role",
    "sinr_db",
    "baseline_rate",
    "rate",
    "srg",
    "tsg",
    "gain_pct",
)


def node_csv_rows(instance_id, scenario, assignment, allocation, baselines, metrics):
    base = np.asarray(getattr(baselines, "rates", baselines), dtype=float)
    for m in metrics:
        yield {
            "instance_id": instance_id,
            "node_id": m.node,
            "role": m.role,
            "sinr_db": float(linear_to_db(scenario.cell_sinr[m.node])),
            "baseline_rate": float(base[m.node]),
            "rate": float(allocation.node_rates[m.node]),
            "srg": m.srg,
            "tsg": m.tsg,
            "gain_pct": m.gain_pct,
        }


def write_node_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=NODE_CSV_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
