"""Cell scenarios: node placement, link budgets, and SINR synthesis.

A scenario consists of N nodes dropped uniformly on a disk around a single
cell tower, a per-node cellular SINR, and a symmetric pairwise WiFi SINR
matrix. SINRs are linear ratios everywhere inside the package; dB shows up
only at file boundaries, in parameter defaults, and in user-facing output.

The link budget is a standard log-distance model with a free-space
intercept at 1 m:

    PL(d) = 20*log10(4*pi*d0*f/c) + 10*alpha*log10(d/d0),   d0 = 1 m
    SINR_dB = P_tx_dBm - PL(d) - noise_floor_dBm - interference_margin_dB

Cellular links use the 3-D distance to the tower antenna (tower height
matters close in); WiFi links use the 2-D ground distance.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ParameterError, UndefinedPairError

SPEED_OF_LIGHT = 299_792_458.0  # m/s
REFERENCE_DISTANCE = 1.0  # m, pathloss intercept distance
THERMAL_NOISE_DBM_PER_HZ = -174.0


def db_to_linear(value_db):
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(np.asarray(value, dtype=float))


def watts_to_dbm(power_w):
    return 10.0 * np.log10(np.asarray(power_w, dtype=float) * 1e3)


@dataclass(frozen=True)
class ScenarioParams:
    """Knobs for scenario generation.

    ``noise_floor`` defaults to thermal noise integrated over ``bandwidth``
    (-174 dBm/Hz + 10*log10(B)); pass an explicit value to override.
    ``interference_margin`` is a flat dB penalty standing in for
    adjacent-cell interference.
    """

    node_count: int
    cell_radius: float = 1000.0  # m
    wifi_efficiency: float = 1.0  # fraction of WiFi airtime carrying data
    cell_pathloss_exponent: float = 3.0
    wifi_pathloss_exponent: float = 3.0
    tower_power: float = 1.0  # W
    wifi_power: float = 0.1  # W
    tower_height: float = 30.0  # m
    bandwidth: float = 20e6  # Hz
    noise_floor: float | None = None  # dBm over `bandwidth`
    cell_carrier_freq: float = 2.0e9  # Hz
    wifi_carrier_freq: float = 2.4e9  # Hz
    interference_margin: float = 0.0  # dB
    rng_seed: int = 0

    def __post_init__(self):
        checks = [
            ("node_count", self.node_count >= 1),
            ("cell_radius", self.cell_radius > 0),
            ("wifi_efficiency", 0.0 < self.wifi_efficiency <= 1.0),
            ("cell_pathloss_exponent", self.cell_pathloss_exponent >= 2.0),
            ("wifi_pathloss_exponent", self.wifi_pathloss_exponent >= 2.0),
            ("tower_power", self.tower_power > 0),
            ("wifi_power", self.wifi_power > 0),
            ("tower_height", self.tower_height >= 0),
            ("bandwidth", self.bandwidth > 0),
            ("cell_carrier_freq", self.cell_carrier_freq > 0),
            ("wifi_carrier_freq", self.wifi_carrier_freq > 0),
        ]
        for name, ok in checks:
            if not ok:
                raise ParameterError(
                    f"{name}={getattr(self, name)!r} is outside its valid range"
                )
        if self.noise_floor is None:
            floor = THERMAL_NOISE_DBM_PER_HZ + 10.0 * np.log10(self.bandwidth)
            object.__setattr__(self, "noise_floor", float(floor))


@dataclass(frozen=True)
class Scenario:
    """Immutable scenario: parameters, optional positions, and SINRs.

    ``cell_sinr`` is a length-N vector, ``wifi_sinr`` an NxN symmetric
    matrix, both linear; the WiFi diagonal is NaN (a node has no WiFi link
    to itself). ``positions`` is None for scenarios built directly from
    SINR tables. Graph-derived scenarios may hold inf (link carries any
    rate) or 0 (link carries nothing) in ``wifi_sinr``.
    """

    params: ScenarioParams
    cell_sinr: np.ndarray
    wifi_sinr: np.ndarray
    positions: np.ndarray | None = None

    def __post_init__(self):
        n = self.params.node_count
        cell = np.ascontiguousarray(np.asarray(self.cell_sinr, dtype=float))
        wifi = np.ascontiguousarray(np.asarray(self.wifi_sinr, dtype=float))
        if cell.shape != (n,):
            raise ParameterError(f"cell_sinr must have shape ({n},)")
        if wifi.shape != (n, n):
            raise ParameterError(f"wifi_sinr must have shape ({n}, {n})")
        if not np.all(cell > 0):
            raise ParameterError("cell_sinr entries must be positive")
        off = ~np.eye(n, dtype=bool)
        if np.any(np.isnan(wifi[off])) or np.any(wifi[off] < 0):
            raise ParameterError("wifi_sinr off-diagonal entries must be >= 0")
        if not np.array_equal(wifi[off], wifi.T[off]):
            raise ParameterError("wifi_sinr must be symmetric")
        pos = self.positions
        if pos is not None:
            pos = np.ascontiguousarray(np.asarray(pos, dtype=float))
            if pos.shape != (n, 2):
                raise ParameterError(f"positions must have shape ({n}, 2)")
        for name, arr in (("cell_sinr", cell), ("wifi_sinr", wifi), ("positions", pos)):
            if arr is not None:
                arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.params.node_count

    @property
    def eta(self) -> float:
        return self.params.wifi_efficiency

    @classmethod
    def from_sinr_db(cls, cell_sinr_db, wifi_sinr_db, eta=1.0, params=None):
        """Build a scenario directly from dB tables (no geometry).

        The WiFi diagonal may hold None/NaN; it is normalized to NaN.
        """
        cell_db = np.asarray(cell_sinr_db, dtype=float)
        wifi_db = np.array(
            [[np.nan if v is None else float(v) for v in row] for row in wifi_sinr_db]
        )
        n = cell_db.shape[0]
        np.fill_diagonal(wifi_db, np.nan)
        if params is None:
            params = ScenarioParams(node_count=n, wifi_efficiency=eta)
        return cls(
            params=params,
            cell_sinr=db_to_linear(cell_db),
            wifi_sinr=db_to_linear(wifi_db),
        )


def pathloss_db(distance, exponent, carrier_freq):
    """Log-distance pathloss in dB; distances below 1 m are clamped to 1 m."""
    d = np.maximum(np.asarray(distance, dtype=float), REFERENCE_DISTANCE)
    intercept = 20.0 * np.log10(
        4.0 * np.pi * REFERENCE_DISTANCE * carrier_freq / SPEED_OF_LIGHT
    )
    return intercept + 10.0 * exponent * np.log10(d / REFERENCE_DISTANCE)


def _cell_sinr_db_from_distance(ground_distance, params: ScenarioParams):
    d3 = np.hypot(ground_distance, params.tower_height)
    loss = pathloss_db(d3, params.cell_pathloss_exponent, params.cell_carrier_freq)
    return (
        watts_to_dbm(params.tower_power)
        - loss
        - params.noise_floor
        - params.interference_margin
    )


def _wifi_sinr_db_from_distance(distance, params: ScenarioParams):
    loss = pathloss_db(distance, params.wifi_pathloss_exponent, params.wifi_carrier_freq)
    return (
        watts_to_dbm(params.wifi_power)
        - loss
        - params.noise_floor
        - params.interference_margin
    )


def cellular_sinr(node_index, positions, params: ScenarioParams) -> float:
    """Linear cellular SINR of one node; tower at the origin."""
    pos = np.asarray(positions, dtype=float)
    ground = float(np.hypot(pos[node_index, 0], pos[node_index, 1]))
    return float(db_to_linear(_cell_sinr_db_from_distance(ground, params)))


def wifi_sinr(i, j, positions, params: ScenarioParams) -> float:
    """Linear WiFi SINR between two distinct nodes (symmetric in i, j)."""
    if i == j:
        raise UndefinedPairError(f"WiFi SINR is undefined for a node with itself (node {i})")
    pos = np.asarray(positions, dtype=float)
    dist = float(np.hypot(*(pos[i] - pos[j])))
    return float(db_to_linear(_wifi_sinr_db_from_distance(dist, params)))


def generate_scenario(params: ScenarioParams) -> Scenario:
    """Sample a random scenario: uniform node drop on the disk, then SINRs.

    Deterministic for a fixed ``params.rng_seed``.
    """
    rng = np.random.default_rng(params.rng_seed)
    n = params.node_count
    radius = params.cell_radius * np.sqrt(rng.random(n))
    angle = 2.0 * np.pi * rng.random(n)
    positions = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])

    ground = np.hypot(positions[:, 0], positions[:, 1])
    cell = db_to_linear(_cell_sinr_db_from_distance(ground, params))

    delta = positions[:, None, :] - positions[None, :, :]
    dist = np.hypot(delta[..., 0], delta[..., 1])
    wifi = db_to_linear(_wifi_sinr_db_from_distance(dist, params))
    np.fill_diagonal(wifi, np.nan)

    return Scenario(params=params, cell_sinr=cell, wifi_sinr=wifi, positions=positions)


def save_scenario(path, scenario: Scenario) -> None:
    """Write a scenario as JSON with SINRs in dB (WiFi diagonal null)."""
    n = scenario.n
    wifi_db = linear_to_db(scenario.wifi_sinr)
    if not np.all(np.isfinite(wifi_db[~np.eye(n, dtype=bool)])):
        raise ParameterError(
            "scenario has non-finite WiFi SINRs; persist it as a WiFi graph instead"
        )
    doc = {
        "params": asdict(scenario.params),
        "positions": None
        if scenario.positions is None
        else scenario.positions.tolist(),
        "cell_sinr_db": linear_to_db(scenario.cell_sinr).tolist(),
        "wifi_sinr_db": [
            [None if i == j else wifi_db[i, j] for j in range(n)] for i in range(n)
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        doc = json.load(fh)
    params = ScenarioParams(**doc["params"])
    wifi_db = np.array(
        [[np.nan if v is None else float(v) for v in row] for row in doc["wifi_sinr_db"]]
    )
    positions = doc.get("positions")
    return Scenario(
        params=params,
        cell_sinr=db_to_linear(np.asarray(doc["cell_sinr_db"], dtype=float)),
        wifi_sinr=db_to_linear(wifi_db),
        positions=None if positions is None else np.asarray(positions, dtype=float),
    )
