"""Built-in demo networks with known-good reference values.

Small hand-checkable networks used by the `demo` CLI command, the
narrative scripts, and the regression suite. Node labels equal the
cellular SINR in dB (the three-node network uses letters). Reference
values are stored to the precision they are known at; `check` entries
are (description, expected, tolerance).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exact import WifiGraph, as_scenario
from .scenario import Scenario, db_to_linear


@dataclass(frozen=True)
class DemoNetwork:
    name: str
    description: str
    labels: tuple
    cell_sinr_db: tuple
    eta: float = 1.0
    cliques: tuple = None  # label groups; None means dense SINR table
    wifi_sinr_db: tuple = None  # NxN table (None on diagonal)

    @property
    def n(self) -> int:
        return len(self.labels)

    def index_of(self, label) -> int:
        return self.labels.index(label)

    def index_set(self, labels) -> set:
        return {self.index_of(lbl) for lbl in labels}

    def graph(self) -> WifiGraph:
        if self.cliques is None:
            raise ValueError(f"{self.name} is defined by a SINR table, not a graph")
        groups = [[self.index_of(lbl) for lbl in grp] for grp in self.cliques]
        return WifiGraph.from_cliques(groups)

    def scenario(self) -> Scenario:
        cell = db_to_linear(np.asarray(self.cell_sinr_db, dtype=float))
        if self.cliques is not None:
            return as_scenario(self.graph(), cell, eta=self.eta)
        return Scenario.from_sinr_db(self.cell_sinr_db, self.wifi_sinr_db, eta=self.eta)


INTRO_3NODE = DemoNetwork(
    name="intro-3node",
    description="Three nodes, unconstrained WiFi: one strong link carries all",
    labels=("A", "B", "C"),
    cell_sinr_db=(10.0, 30.0, 10.0),
    cliques=(("A", "B", "C"),),
)

FIG2A = DemoNetwork(
    name="fig2a",
    description="Eight-node clique: the best link alone is optimal",
    labels=(2, 3, 7, 8, 9, 10, 12, 17),
    cell_sinr_db=(2.0, 3.0, 7.0, 8.0, 9.0, 10.0, 12.0, 17.0),
    cliques=((2, 3, 7, 8, 9, 10, 12, 17),),
)

FIG2B = DemoNetwork(
    name="fig2b",
    description="Two equal isolated cliques: best link of each clique",
    labels=(2, 3, 7, 8, 9, 10, 12, 17),
    cell_sinr_db=(2.0, 3.0, 7.0, 8.0, 9.0, 10.0, 12.0, 17.0),
    cliques=((8, 9, 12, 17), (2, 3, 7, 10)),
)

FIG2C = DemoNetwork(
    name="fig2c",
    description="Unequal cliques (3 + 5), wide SINR spread in the large one",
    labels=(2, 3, 7, 8, 9, 10, 12, 17),
    cell_sinr_db=(2.0, 3.0, 7.0, 8.0, 9.0, 10.0, 12.0, 17.0),
    cliques=((2, 3, 7), (8, 9, 10, 12, 17)),
)

FIG2D = DemoNetwork(
    name="fig2d",
    description="Unequal cliques, narrow spread in the large one: three hotspots",
    labels=(2, 3, 7, 13, 14, 15, 16, 17),
    cell_sinr_db=(2.0, 3.0, 7.0, 13.0, 14.0, 15.0, 16.0, 17.0),
    cliques=((2, 3, 7), (13, 14, 15, 16, 17)),
)

FIG2E = DemoNetwork(
    name="fig2e",
    description="Strong small clique: reorganizing cannot beat the baseline",
    labels=(5, 6, 7, 13, 14, 15, 16, 17),
    cell_sinr_db=(5.0, 6.0, 7.0, 13.0, 14.0, 15.0, 16.0, 17.0),
    cliques=((5, 6, 7), (13, 14, 15, 16, 17)),
)

# Six-node network with a full pairwise WiFi SINR table (dB).
_FIG4_WIFI_DB = (
    (None, -10, -8, 29, 20, 22),
    (-10, None, 20, 25, -8, -5),
    (-8, 20, None, 21, -15, -6),
    (29, 25, 21, None, 22, 26),
    (20, -8, -15, 22, None, 21),
    (22, -5, -6, 26, 21, None),
)

FIG4 = DemoNetwork(
    name="fig4",
    description="Six nodes with a measured WiFi SINR table: full greedy pipeline",
    labels=(5, 8, 10, 13, 14, 15),
    cell_sinr_db=(5.0, 8.0, 10.0, 13.0, 14.0, 15.0),
    eta=1.0,
    wifi_sinr_db=_FIG4_WIFI_DB,
)

DEMO_NETWORKS = {
    net.name: net for net in (INTRO_3NODE, FIG2A, FIG2B, FIG2C, FIG2D, FIG2E, FIG4)
}
