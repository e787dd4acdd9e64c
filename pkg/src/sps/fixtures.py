"""Ready-made scenarios: the six-zone case studies and randomized desk-scale
instances for cross-validation against the brute-force reference.

The six-zone ship: MTG in zone 1, propulsion in zone 2, service loads split
across zones by fixed weights (vital+semi-vital 80%, non-vital 20% of the
total service profile).  Load shapes are synthetic — a single mid-voyage
peak — since only their character matters for the properties under test.
"""

from __future__ import annotations

import numpy as np

from .model import (
    EsmSpec,
    FaultSet,
    GeneratorSpec,
    LoadProfile,
    NetworkTopology,
    NonVitalBlock,
    PenaltyConfig,
    PropulsionSpec,
    ShipScenario,
    VoyageSpec,
)

_ZONE_WEIGHTS = (0.25, 0.10, 0.15, 0.20, 0.10, 0.20)


def _mtg(zone: int, initial_power: float = 3.0) -> GeneratorSpec:
    return GeneratorSpec(
        id=f"mtg{zone}",
        zone=zone,
        kind="MTG",
        p_min=1.2,
        p_max=8.0,
        ramp_max=7.2,
        t_min_on=2,
        cost_a=13.5,
        cost_b=10.0,
        cost_c=300.0,
        co2_a=13.5,
        co2_b=10.0,
        co2_c=300.0,
        initial_on=True,
        initial_power=initial_power,
    )


def _atg(zone: int, initial_on: bool = True) -> GeneratorSpec:
    return GeneratorSpec(
        id=f"atg{zone}",
        zone=zone,
        kind="ATG",
        p_min=0.4,
        p_max=4.0,
        ramp_max=3.6,
        t_min_on=1,
        cost_a=6.0,
        cost_b=30.0,
        cost_c=250.0,
        co2_a=6.0,
        co2_b=30.0,
        co2_c=250.0,
        initial_on=initial_on,
        initial_power=1.0 if initial_on else 0.0,
    )


def _esm(zone: int) -> EsmSpec:
    return EsmSpec(
        id=f"esm{zone}",
        zone=zone,
        p_min=-0.5,
        p_max=0.5,
        e_min=0.2,
        e_max=2.0,
        e_initial=1.1,
        lc_a=1.0,
        lc_c=0.5,
    )


def _service_loads(totals, zone_weights=_ZONE_WEIGHTS, dt: float = 1.0) -> LoadProfile:
    """Split a total service profile: 80% vital+semi-vital by zone weight,
    20% non-vital in three blocks."""
    totals = np.asarray(totals, dtype=float)
    T = len(totals)
    vs = tuple(
        tuple(0.8 * w * totals[t] for t in range(T)) for w in zone_weights
    )
    blocks = (
        NonVitalBlock(zone=2, bus="PB", series=tuple(0.08 * totals)),
        NonVitalBlock(zone=4, bus="SB", series=tuple(0.07 * totals)),
        NonVitalBlock(zone=5, bus="PB", series=tuple(0.05 * totals)),
    )
    return LoadProfile(horizon=T, dt=dt, vs_by_zone=vs, no_blocks=blocks)


def _six_zone_topology() -> NetworkTopology:
    return NetworkTopology(
        zone_count=6,
        pb_segments=(1, 2, 3, 4, 5),
        sb_segments=(1, 2, 3, 4, 5),
        converter_efficiency=1.0,
        switch_initial=((1, 0), (0, 1), (1, 0), (0, 1), (1, 0), (0, 1)),
        t_min_switch=1,
    )


_CASE1_TOTALS = (2.6, 2.7, 3.0, 3.4, 3.9, 4.3, 4.5, 4.1, 3.4, 2.8)


def case1_scenario(distance: float = 120.0) -> ShipScenario:
    """Semi-island case: one MTG + one ATG, bus faults leaving zone 3 coupled."""
    return ShipScenario(
        generators=(_mtg(1), _atg(6)),
        esms=(_esm(1), _esm(3), _esm(4), _esm(6)),
        loads=_service_loads(_CASE1_TOTALS),
        propulsion=PropulsionSpec(zone=2, alpha=2.2e-3, beta=3.0, v_min=0.0, v_max=17.0),
        voyage=VoyageSpec(distance=distance, horizon=10, dt=1.0, eeoi_max=23.0, f_sl=30.0),
        topology=_six_zone_topology(),
        penalties=PenaltyConfig(xi_e=1.0, xi_l=265.0, h=1150.0),
        faults=FaultSet(failed_pb_segments=(3,), failed_sb_segments=(2,)),
    )


def case1_wide_coupling_scenario(distance: float = 120.0) -> ShipScenario:
    """Variant of the semi-island case with three coupled zones (3, 4, 5)."""
    base = case1_scenario(distance)
    return ShipScenario(
        generators=base.generators,
        esms=base.esms,
        loads=base.loads,
        propulsion=base.propulsion,
        voyage=base.voyage,
        topology=base.topology,
        penalties=base.penalties,
        faults=FaultSet(failed_pb_segments=(5,), failed_sb_segments=(2,)),
    )


_CASE2_TOTALS = (2.4, 2.6, 2.9, 3.2, 3.6, 4.0, 4.4, 4.2, 3.8, 3.3, 2.9, 2.6)


def island_scenario(distance: float = 120.0) -> ShipScenario:
    """Island case: both buses cut between zones 3 and 4."""
    return ShipScenario(
        generators=(_mtg(1), _atg(3), _atg(6)),
        esms=(_esm(1), _esm(3), _esm(5)),
        loads=_service_loads(_CASE2_TOTALS),
        propulsion=PropulsionSpec(zone=2, alpha=2.2e-3, beta=3.0, v_min=0.0, v_max=17.0),
        voyage=VoyageSpec(distance=distance, horizon=12, dt=1.0, eeoi_max=23.0, f_sl=30.0),
        topology=_six_zone_topology(),
        penalties=PenaltyConfig(xi_e=1.0, xi_l=265.0, h=1150.0),
        faults=FaultSet(failed_pb_segments=(3,), failed_sb_segments=(3,)),
    )


def non_island_scenario(distance: float = 100.0) -> ShipScenario:
    """Generator fault only: the network stays connected."""
    base = case1_scenario(distance)
    return ShipScenario(
        generators=base.generators,
        esms=base.esms,
        loads=base.loads,
        propulsion=base.propulsion,
        voyage=base.voyage,
        topology=base.topology,
        penalties=base.penalties,
        faults=FaultSet(failed_generators=("atg6",)),
    )


def normal_scenario(distance: float = 120.0) -> ShipScenario:
    base = case1_scenario(distance)
    return ShipScenario(
        generators=base.generators,
        esms=base.esms,
        loads=base.loads,
        propulsion=base.propulsion,
        voyage=base.voyage,
        topology=base.topology,
        penalties=base.penalties,
        faults=FaultSet(),
    )


# ---------------------------------------------------------------------------
# randomized desk-scale instances (four zones, <= 12 binaries)


def random_small_scenario(
    seed: int,
    mode: str = "mixed",
    distance_factor: float = None,
    xi_l: float = None,
    esm_count: int = None,
) -> ShipScenario:
    """Small four-zone scenario for oracle cross-validation.

    mode: "Normal" | "NonIsland" | "Island" | "SemiIsland" | "mixed".
    distance_factor scales the voyage target relative to a comfortable
    baseline (values near/above 1 approach or exceed reachability).
    """
    rng = np.random.default_rng(seed)
    if mode == "mixed":
        mode = ["Normal", "NonIsland", "Island", "SemiIsland"][seed % 4]

    Z = 4
    T = 2 if mode == "SemiIsland" else int(rng.integers(2, 4))
    dt = 1.0

    def gen(idx, zone):
        # the zone-1 unit alone must be able to carry the whole ship so the
        # generator-fault mode stays structurally feasible
        p_max = float(rng.uniform(3.6, 4.5)) if idx == 1 else float(rng.uniform(2.0, 4.0))
        return GeneratorSpec(
            id=f"g{idx}",
            zone=zone,
            kind="ATG",
            p_min=float(rng.uniform(0.1, 0.4)),
            p_max=p_max,
            ramp_max=p_max,
            t_min_on=int(rng.integers(1, 3)),
            cost_a=float(rng.uniform(1.0, 5.0)),
            cost_b=float(rng.uniform(5.0, 20.0)),
            cost_c=float(rng.uniform(10.0, 40.0)),
            co2_a=float(rng.uniform(1.0, 5.0)),
            co2_b=float(rng.uniform(5.0, 20.0)),
            co2_c=float(rng.uniform(10.0, 40.0)),
            initial_on=bool(rng.integers(0, 2)),
            initial_power=0.0,
        )

    generators = (gen(1, 1), gen(2, 4))
    faults = FaultSet()
    if mode == "NonIsland":
        faults = FaultSet(failed_generators=("g2",))
    elif mode == "Island":
        faults = FaultSet(failed_pb_segments=(2,), failed_sb_segments=(2,))
    elif mode == "SemiIsland":
        faults = FaultSet(failed_pb_segments=(2,), failed_sb_segments=(1,))

    n_esm = int(rng.integers(0, 3)) if esm_count is None else esm_count
    esm_zones = [2, 3][:n_esm]
    esms = tuple(
        EsmSpec(
            id=f"e{z}",
            zone=z,
            p_min=-0.3,
            p_max=0.3,
            e_min=0.1,
            e_max=float(rng.uniform(0.5, 1.0)),
            e_initial=0.4,
            lc_a=float(rng.uniform(0.5, 2.0)),
            lc_c=float(rng.uniform(0.1, 0.5)),
        )
        for z in esm_zones
    )

    vs = tuple(
        tuple(float(rng.uniform(0.3, 0.6)) for _ in range(T)) for _ in range(Z)
    )
    blocks = tuple(
        NonVitalBlock(
            zone=int(z),
            bus=("PB", "SB")[int(rng.integers(0, 2))],
            series=tuple(float(rng.uniform(0.05, 0.3)) for _ in range(T)),
        )
        for z in rng.choice(np.arange(1, Z + 1), size=int(rng.integers(1, 3)), replace=False)
    )
    loads = LoadProfile(horizon=T, dt=dt, vs_by_zone=vs, no_blocks=blocks)

    propulsion = PropulsionSpec(zone=2, alpha=0.01, beta=3.0, v_min=0.0, v_max=6.0)
    reach = T * dt * propulsion.v_max
    if distance_factor is None:
        distance_factor = float(rng.uniform(0.2, 0.6))
    voyage = VoyageSpec(
        distance=distance_factor * reach, horizon=T, dt=dt, eeoi_max=60.0, f_sl=30.0
    )

    topology = NetworkTopology(
        zone_count=Z,
        pb_segments=(1, 2, 3),
        sb_segments=(1, 2, 3),
        converter_efficiency=1.0,
        switch_initial=((1, 0), (0, 1), (1, 0), (0, 1)),
        t_min_switch=1,
    )
    if xi_l is None:
        penalties = PenaltyConfig(xi_e=1.0, auto_derive=True, margin=1.1)
    else:
        penalties = PenaltyConfig(xi_e=1.0, xi_l=xi_l, h=5000.0)

    return ShipScenario(
        generators=generators,
        esms=esms,
        loads=loads,
        propulsion=propulsion,
        voyage=voyage,
        topology=topology,
        penalties=penalties,
        faults=faults,
    )


NAMED_FIXTURES = {
    "case1": case1_scenario,
    "case1-wide": case1_wide_coupling_scenario,
    "island": island_scenario,
    "non-island": non_island_scenario,
    "normal": normal_scenario,
}
