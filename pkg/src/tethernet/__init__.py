"""tethernet: organize cellular nodes into WiFi-tethered hotspot networks.

Given per-node cellular SINRs and pairwise WiFi SINRs, the package
splits nodes into hotspots (which keep using their own tower links) and
clients (which reach the tower through a hotspot over WiFi), maximizing
the network sum rate while guaranteeing every node at least the rate it
had when all nodes shared the tower directly.
"""

from .errors import (
    InfeasibleAssignmentError,
    ParameterError,
    SizeGuardError,
    StructureError,
    TethernetError,
    UndefinedLinkError,
    UndefinedPairError,
)
from .exact import (
    ExactResult,
    WifiGraph,
    as_scenario,
    enumerate_optimal,
    feasible_assignment,
    lemma1_config,
    lemma2_config,
    load_wifi_graph,
    save_wifi_graph,
    verify_clique_partition,
)
from .heuristic import (
    CapacityMatrix,
    ConfiguredNetwork,
    ProspectiveClientMatrix,
    SelectionRound,
    capacity_matrix,
    compute_fair_loading,
    configure_network,
    exit_condition,
    jain_fairness,
    loading,
    prospective_client_matrix,
    select_hotspots,
)
from .metrics import (
    AggregateSummary,
    InstanceSummary,
    NodeMetrics,
    RegionHistogram,
    network_metrics,
    node_csv_rows,
    node_metrics,
    region_histogram,
    summarize,
    summarize_instance,
    write_node_csv,
)
from .networks import DEMO_NETWORKS, DemoNetwork
from .ratemodel import (
    Assignment,
    BaselineRates,
    FeasibilityReport,
    RateAllocation,
    Violation,
    allocate_rates,
    baseline_rates,
    check_feasibility,
    hotspot_link_rate,
    link_capacity_matrix,
    shannon_rates,
    sum_rate,
    wifi_link_rate,
)
from .scenario import (
    Scenario,
    ScenarioParams,
    cellular_sinr,
    db_to_linear,
    generate_scenario,
    linear_to_db,
    load_scenario,
    pathloss_db,
    save_scenario,
    wifi_sinr,
)

__version__ = "0.1.0"
