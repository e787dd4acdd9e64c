"""Domain model for zonal MVDC shipboard power scheduling.

Holds the static scenario description (generators, energy storage, loads,
propulsion, network topology, voyage, penalty weights, faults), scenario
file I/O, validation, and the closed-form penalty-parameter bounds that
make load shedding and distance reduction last-resort actions.

Units: MW, MWh, hours, knots, nautical miles, arbitrary monetary units
(m.u.).  Zones and bus segments are 1-based; segment ``z`` joins zone
``z`` and ``z+1`` on the tagged bus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

SCHEMA_VERSION = "sps-scenario/1"

PB = "PB"
SB = "SB"


class ConfigurationError(ValueError):
    """Raised when an operation is asked to run on unusable static data."""


@dataclass(frozen=True)
class GeneratorSpec:
    id: str
    zone: int
    kind: str  # "MTG" | "ATG"
    p_min: float
    p_max: float
    ramp_max: float  # MW per interval
    t_min_on: int  # intervals
    cost_a: float  # m.u./(MW^2 h)
    cost_b: float  # m.u./(MW h)
    cost_c: float  # m.u./h
    co2_a: float
    co2_b: float
    co2_c: float
    initial_on: bool = False
    initial_power: float = 0.0


@dataclass(frozen=True)
class EsmSpec:
    id: str
    zone: int
    p_min: float  # negative: max charging power
    p_max: float  # positive: max discharging power
    e_min: float
    e_max: float
    e_initial: float
    lc_a: float  # m.u./(MW^2 h)
    lc_c: float  # m.u./h


@dataclass(frozen=True)
class NonVitalBlock:
    zone: int
    bus: str  # PB | SB
    series: tuple  # MW per interval


@dataclass(frozen=True)
class LoadProfile:
    horizon: int
    dt: float
    vs_by_zone: tuple  # [zone][t] MW, vital + semi-vital
    no_blocks: tuple  # NonVitalBlock entries

    def vs_array(self) -> np.ndarray:
        return np.asarray(self.vs_by_zone, dtype=float)


@dataclass(frozen=True)
class PropulsionSpec:
    zone: int
    alpha: float  # MW / kn^beta
    beta: float = 3.0
    v_min: float = 0.0
    v_max: float = 17.0
    module_count: int = 1

    @property
    def p_max(self) -> float:
        """Propulsion power at maximum speed."""
        return self.alpha * self.v_max**self.beta

    @property
    def p_min(self) -> float:
        return self.alpha * self.v_min**self.beta


@dataclass(frozen=True)
class VoyageSpec:
    distance: float  # nm
    horizon: int
    dt: float  # hours
    eeoi_max: float  # gCO2 / (tn nm)
    f_sl: float  # tn, ship load factor


@dataclass(frozen=True)
class NetworkTopology:
    zone_count: int
    pb_segments: tuple  # segment ids present on the port bus
    sb_segments: tuple
    converter_efficiency: float = 1.0  # zeta, defaults to lossless
    switch_initial: tuple = ()  # per zone (S_P, S_S)
    t_min_switch: int = 1


@dataclass(frozen=True)
class FaultSet:
    failed_pb_segments: tuple = ()
    failed_sb_segments: tuple = ()
    failed_generators: tuple = ()

    @property
    def empty(self) -> bool:
        return not (
            self.failed_pb_segments or self.failed_sb_segments or self.failed_generators
        )


@dataclass(frozen=True)
class PenaltyConfig:
    xi_e: float = 1.0
    xi_l: float = 0.0  # m.u./MWh
    h: float = 0.0  # m.u./nm
    auto_derive: bool = False
    margin: float = 1.05


@dataclass(frozen=True)
class ShipScenario:
    generators: tuple
    esms: tuple
    loads: LoadProfile
    propulsion: PropulsionSpec
    voyage: VoyageSpec
    topology: NetworkTopology
    penalties: PenaltyConfig
    faults: FaultSet = field(default_factory=FaultSet)

    @property
    def horizon(self) -> int:
        return self.voyage.horizon

    @property
    def dt(self) -> float:
        return self.voyage.dt

    def generator(self, gen_id: str) -> GeneratorSpec:
        for g in self.generators:
            if g.id == gen_id:
                return g
        raise KeyError(gen_id)

    def resolved_penalties(self) -> PenaltyConfig:
        """Penalty weights with auto-derivation applied when requested."""
        pen = self.penalties
        if not pen.auto_derive:
            return pen
        xi_l_bound = derive_xi_l_bound(self)
        xi_l = pen.margin * xi_l_bound if xi_l_bound > 0 else 1.0
        h_bound = derive_h_bound(self, xi_l)
        h = pen.margin * h_bound if h_bound > 0 else 1.0
        return PenaltyConfig(
            xi_e=pen.xi_e, xi_l=xi_l, h=h, auto_derive=True, margin=pen.margin
        )


@dataclass
class Schedule:
    """Full decision trajectory.  Arrays are indexed [equipment][t]."""

    delta_g: np.ndarray  # [generator][t] 0/1
    y_g: np.ndarray  # [generator][t] 0/1
    p_g: np.ndarray  # [generator][t] MW
    p_e: np.ndarray  # [esm][t] MW, discharging positive
    e_e: np.ndarray  # [esm][t] MWh, end-of-interval energy
    p_pr: np.ndarray  # [module][t] MW
    rho: np.ndarray  # [island part][t] in [0, 1]
    s_p: np.ndarray  # [zone][t] 0/1
    s_s: np.ndarray  # [zone][t] 0/1
    d_d: float  # nm, reduced travel distance

    def to_dict(self) -> dict:
        out = {k: np.asarray(v).tolist() for k, v in asdict(self).items() if k != "d_d"}
        out["d_d"] = float(self.d_d)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Schedule":
        kwargs = {
            k: np.asarray(data[k], dtype=float)
            for k in (
                "delta_g",
                "y_g",
                "p_g",
                "p_e",
                "e_e",
                "p_pr",
                "rho",
                "s_p",
                "s_s",
            )
        }
        return cls(d_d=float(data["d_d"]), **kwargs)


@dataclass
class SolveReport:
    total_cost: float
    fuel_cost: float
    esm_cost: float
    shed_cost: float
    distance_penalty: float
    p_ls_total: float  # MWh shed over the horizon
    d_d: float
    n_rs: int
    iterations: int
    lower_bounds: list
    upper_bounds: list
    converged: bool = True
    wall_time: float = 0.0
    max_kkt: float = 0.0
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# validation


def _check(violations, ok, field_name, rule):
    if not ok:
        violations.append(f"{field_name}: {rule}")


def validate_scenario(scenario: ShipScenario) -> list:
    """Return the list of invariant violations (empty means valid)."""
    v: list = []
    T = scenario.voyage.horizon
    Z = scenario.topology.zone_count

    for g in scenario.generators:
        pre = f"generators[{g.id}]"
        _check(v, 0 <= g.p_min <= g.p_max, pre, "requires 0 <= p_min <= p_max")
        _check(v, g.ramp_max > 0, pre, "requires ramp_max > 0")
        _check(v, g.t_min_on >= 1, pre, "requires t_min_on >= 1")
        _check(v, g.cost_a >= 0, pre, "requires cost_a >= 0")
        _check(v, g.kind in ("MTG", "ATG"), pre, "kind must be MTG or ATG")
        _check(v, 1 <= g.zone <= Z, pre, "zone out of range")
        _check(
            v,
            g.initial_power == 0.0 or g.p_min <= g.initial_power <= g.p_max,
            pre,
            "initial_power must be 0 or within [p_min, p_max]",
        )
    ids = [g.id for g in scenario.generators]
    _check(v, len(ids) == len(set(ids)), "generators", "ids must be unique")

    for e in scenario.esms:
        pre = f"esms[{e.id}]"
        _check(v, e.p_min < 0 < e.p_max, pre, "requires p_min < 0 < p_max")
        _check(
            v,
            e.e_min <= e.e_initial <= e.e_max,
            pre,
            "requires e_min <= e_initial <= e_max (energy bound ordering)",
        )
        _check(v, e.lc_a >= 0 and e.lc_c >= 0, pre, "life-cycle coefficients >= 0")
        _check(v, 1 <= e.zone <= Z, pre, "zone out of range")

    lp = scenario.loads
    vs = lp.vs_array()
    _check(v, lp.horizon == T, "loads.horizon", "must match voyage horizon")
    _check(v, abs(lp.dt - scenario.voyage.dt) < 1e-12, "loads.dt", "must match voyage dt")
    _check(v, vs.shape == (Z, T), "loads.vs_by_zone", f"shape must be ({Z}, {T})")
    _check(v, bool((vs >= 0).all()), "loads.vs_by_zone", "entries must be >= 0")
    for i, blk in enumerate(lp.no_blocks):
        pre = f"loads.no_blocks[{i}]"
        _check(v, blk.bus in (PB, SB), pre, "bus tag must be PB or SB")
        _check(v, 1 <= blk.zone <= Z, pre, "zone out of range")
        series = np.asarray(blk.series, dtype=float)
        _check(v, series.shape == (T,), pre, f"series length must be {T}")
        _check(v, bool((series >= 0).all()), pre, "entries must be >= 0")

    pr = scenario.propulsion
    _check(v, pr.alpha > 0, "propulsion.alpha", "must be > 0")
    _check(v, pr.beta >= 1, "propulsion.beta", "must be >= 1")
    _check(v, 0 <= pr.v_min < pr.v_max, "propulsion.v_min", "requires 0 <= v_min < v_max")
    _check(v, pr.module_count >= 1, "propulsion.module_count", "must be >= 1")
    _check(v, 1 <= pr.zone <= Z, "propulsion.zone", "zone out of range")

    vo = scenario.voyage
    _check(v, vo.distance >= 0, "voyage.distance", "must be >= 0")
    _check(v, vo.horizon >= 1, "voyage.horizon", "must be >= 1")
    _check(v, vo.dt > 0, "voyage.dt", "must be > 0")
    _check(v, vo.eeoi_max > 0, "voyage.eeoi_max", "must be > 0")
    _check(v, vo.f_sl > 0, "voyage.f_sl", "must be > 0")

    tp = scenario.topology
    _check(v, tp.zone_count >= 1, "topology.zone_count", "must be >= 1")
    _check(
        v,
        0 < tp.converter_efficiency <= 1,
        "topology.converter_efficiency",
        "must lie in (0, 1]",
    )
    for name, segs in (("pb_segments", tp.pb_segments), ("sb_segments", tp.sb_segments)):
        for s in segs:
            _check(v, 1 <= s <= Z - 1, f"topology.{name}", f"segment {s} out of range")
        _check(v, len(set(segs)) == len(segs), f"topology.{name}", "segments must be unique")
    _check(
        v,
        len(tp.switch_initial) == Z,
        "topology.switch_initial",
        "one (S_P, S_S) pair per zone",
    )
    for z, pair in enumerate(tp.switch_initial, start=1):
        sp, ss = pair
        _check(
            v,
            (sp, ss) in ((0, 1), (1, 0)),
            f"topology.switch_initial[{z}]",
            "exactly one of the redundant switches must be closed",
        )
    _check(v, tp.t_min_switch >= 1, "topology.t_min_switch", "must be >= 1")

    ft = scenario.faults
    for s in ft.failed_pb_segments:
        _check(v, s in tp.pb_segments, "faults.failed_pb_segments", f"segment {s} not in topology")
    for s in ft.failed_sb_segments:
        _check(v, s in tp.sb_segments, "faults.failed_sb_segments", f"segment {s} not in topology")
    for gid in ft.failed_generators:
        _check(v, gid in ids, "faults.failed_generators", f"unknown generator {gid}")

    pen = scenario.penalties
    _check(v, pen.xi_e >= 0, "penalties.xi_e", "must be >= 0")
    if pen.auto_derive:
        _check(v, pen.margin > 1, "penalties.margin", "margin factor must exceed 1")
    elif not v and scenario.generators:
        xi_l_bound = derive_xi_l_bound(scenario)
        _check(
            v,
            pen.xi_l > xi_l_bound or (pen.xi_l == 0 and xi_l_bound == 0),
            "penalties.xi_l",
            f"must exceed the shedding-coordination bound {xi_l_bound:.6g}",
        )
        if pen.xi_l > 0:
            h_bound = derive_h_bound(scenario, pen.xi_l)
            _check(
                v,
                pen.h > h_bound,
                "penalties.h",
                f"must exceed the distance-penalty bound {h_bound:.6g}",
            )
    return v


# ---------------------------------------------------------------------------
# penalty-parameter bounds


def derive_xi_l_bound(scenario: ShipScenario) -> float:
    """Smallest shedding penalty that keeps load shedding a last resort.

    Any xi_l strictly above this value makes one MWh of shed load cost more
    than the steepest marginal cost of serving it from a generator or an
    energy storage module.
    """
    if not scenario.generators and not scenario.esms:
        raise ConfigurationError("scenario has no generators and no ESMs")
    gen_term = max(
        (2.0 * g.cost_a * g.p_max + g.cost_b for g in scenario.generators),
        default=0.0,
    )
    esm_term = max(
        (2.0 * scenario.penalties.xi_e * e.lc_a * e.p_max for e in scenario.esms),
        default=0.0,
    )
    return max(gen_term, esm_term)


def derive_h_bound(scenario: ShipScenario, xi_l: float) -> float:
    """Smallest distance penalty that keeps the travel slack tight.

    Above this value, giving up a nautical mile always costs more than the
    operating cost it could save, so the slack activates only when the
    voyage is genuinely unreachable.
    """
    if xi_l <= 0:
        raise ConfigurationError("xi_l must be positive")
    pr = scenario.propulsion
    if pr.v_max <= 0:
        raise ConfigurationError("v_max must be positive")
    p_pr_max = pr.p_max
    # beta = 1 degenerates to alpha * xi_l (the power term cancels).
    return pr.beta * pr.alpha ** (1.0 / pr.beta) * xi_l * p_pr_max ** (1.0 - 1.0 / pr.beta)


# ---------------------------------------------------------------------------
# scenario file I/O


def scenario_to_dict(scenario: ShipScenario) -> dict:
    lp = scenario.loads
    return {
        "schema": SCHEMA_VERSION,
        "generators": [asdict(g) for g in scenario.generators],
        "esms": [asdict(e) for e in scenario.esms],
        "loads": {
            "horizon": lp.horizon,
            "dt": lp.dt,
            "vs_by_zone": [list(row) for row in lp.vs_by_zone],
            "no_blocks": [
                {"zone": b.zone, "bus": b.bus, "series": list(b.series)}
                for b in lp.no_blocks
            ],
        },
        "propulsion": asdict(scenario.propulsion),
        "voyage": asdict(scenario.voyage),
        "topology": {
            "zone_count": scenario.topology.zone_count,
            "pb_segments": list(scenario.topology.pb_segments),
            "sb_segments": list(scenario.topology.sb_segments),
            "converter_efficiency": scenario.topology.converter_efficiency,
            "switch_initial": [list(p) for p in scenario.topology.switch_initial],
            "t_min_switch": scenario.topology.t_min_switch,
        },
        "penalties": asdict(scenario.penalties),
        "faults": {
            "failed_pb_segments": list(scenario.faults.failed_pb_segments),
            "failed_sb_segments": list(scenario.faults.failed_sb_segments),
            "failed_generators": list(scenario.faults.failed_generators),
        },
    }


def scenario_from_dict(data: dict) -> ShipScenario:
    if data.get("schema") != SCHEMA_VERSION:
        raise ConfigurationError(
            f"unsupported scenario schema {data.get('schema')!r}; expected {SCHEMA_VERSION!r}"
        )
    lp = data["loads"]
    return ShipScenario(
        generators=tuple(GeneratorSpec(**g) for g in data["generators"]),
        esms=tuple(EsmSpec(**e) for e in data["esms"]),
        loads=LoadProfile(
            horizon=int(lp["horizon"]),
            dt=float(lp["dt"]),
            vs_by_zone=tuple(tuple(float(x) for x in row) for row in lp["vs_by_zone"]),
            no_blocks=tuple(
                NonVitalBlock(
                    zone=int(b["zone"]),
                    bus=b["bus"],
                    series=tuple(float(x) for x in b["series"]),
                )
                for b in lp["no_blocks"]
            ),
        ),
        propulsion=PropulsionSpec(**data["propulsion"]),
        voyage=VoyageSpec(**data["voyage"]),
        topology=NetworkTopology(
            zone_count=int(data["topology"]["zone_count"]),
            pb_segments=tuple(int(s) for s in data["topology"]["pb_segments"]),
            sb_segments=tuple(int(s) for s in data["topology"]["sb_segments"]),
            converter_efficiency=float(data["topology"]["converter_efficiency"]),
            switch_initial=tuple(
                (int(p[0]), int(p[1])) for p in data["topology"]["switch_initial"]
            ),
            t_min_switch=int(data["topology"]["t_min_switch"]),
        ),
        penalties=PenaltyConfig(**data["penalties"]),
        faults=FaultSet(
            failed_pb_segments=tuple(int(s) for s in data["faults"]["failed_pb_segments"]),
            failed_sb_segments=tuple(int(s) for s in data["faults"]["failed_sb_segments"]),
            failed_generators=tuple(data["faults"]["failed_generators"]),
        ),
    )


def load_scenario(path: str) -> ShipScenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))


def save_scenario(scenario: ShipScenario, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2)
        fh.write("\n")
