"""Fault classification and island partitioning of the zonal network.

The connectivity graph has one port-bus node and one starboard-bus node per
zone.  Surviving longitudinal bus segments are edges, and every zone holding
a healthy generator bridges its two bus nodes (the generator feeds either bus
through its converter).  Connected components of this graph are the island
parts; a zone whose two bus nodes land in different sourced components is a
coupled zone whose redundant switch pair becomes a decision variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .model import PB, SB, FaultSet, NetworkTopology, Schedule, ShipScenario


class FaultMode:
    NORMAL = "Normal"
    NON_ISLAND = "NonIsland"
    ISLAND = "Island"
    SEMI_ISLAND = "SemiIsland"


@dataclass
class IslandPart:
    index: int
    generators: list  # generator ids (healthy only)
    esms: list  # esm ids
    propulsion_modules: list  # module indices 0..R-1
    zones: list  # exclusively served zones
    omega_pb: list  # coupled zones whose PB side lies in this part
    omega_sb: list  # coupled zones whose SB side lies in this part
    nonvital_blocks: list = field(default_factory=list)  # indices into loads.no_blocks


@dataclass
class IslandPartition:
    mode: str
    parts: list  # IslandPart
    coupled_zones: list
    # Forced redundant-switch states for non-coupled zones: zone -> (S_P, S_S).
    fixed_switches: dict = field(default_factory=dict)
    failed_generators: tuple = ()

    @property
    def n_parts(self) -> int:
        return len(self.parts)

    def part_of_generator(self, gen_id: str) -> int:
        for p in self.parts:
            if gen_id in p.generators:
                return p.index
        raise KeyError(gen_id)

    def propulsion_part(self):
        for p in self.parts:
            if p.propulsion_modules:
                return p
        return None


def _node(zone: int, bus: str):
    return (zone, bus)


def partition(topology: NetworkTopology, fault_set: FaultSet, scenario: ShipScenario) -> IslandPartition:
    """Compute the island decomposition induced by the fault set."""
    Z = topology.zone_count
    for s in fault_set.failed_pb_segments:
        if s not in topology.pb_segments:
            raise KeyError(f"fault references unknown PB segment {s}")
    for s in fault_set.failed_sb_segments:
        if s not in topology.sb_segments:
            raise KeyError(f"fault references unknown SB segment {s}")
    gen_ids = {g.id for g in scenario.generators}
    for gid in fault_set.failed_generators:
        if gid not in gen_ids:
            raise KeyError(f"fault references unknown generator {gid}")

    failed_gens = tuple(fault_set.failed_generators)
    healthy_gens = [g for g in scenario.generators if g.id not in failed_gens]

    graph = nx.Graph()
    for z in range(1, Z + 1):
        graph.add_node(_node(z, PB))
        graph.add_node(_node(z, SB))
    for s in topology.pb_segments:
        if s not in fault_set.failed_pb_segments:
            graph.add_edge(_node(s, PB), _node(s + 1, PB))
    for s in topology.sb_segments:
        if s not in fault_set.failed_sb_segments:
            graph.add_edge(_node(s, SB), _node(s + 1, SB))
    for g in healthy_gens:
        graph.add_edge(_node(g.zone, PB), _node(g.zone, SB))

    components = [frozenset(c) for c in nx.connected_components(graph)]
    components.sort(key=lambda c: min(c))
    comp_of = {}
    for i, comp in enumerate(components):
        for node in comp:
            comp_of[node] = i

    def sourced(ci: int) -> bool:
        comp = components[ci]
        for g in healthy_gens:
            if _node(g.zone, PB) in comp:
                return True
        for e in scenario.esms:
            if _node(e.zone, PB) in comp or _node(e.zone, SB) in comp:
                return True
        return False

    sourced_comps = [i for i in range(len(components)) if sourced(i)]

    def pb_adjacent_alive(z: int) -> bool:
        return graph.degree(_node(z, PB)) > 0

    # Serving component of each zone's vital loads; None marks a coupled zone.
    coupled_zones: list = []
    serving_comp: dict = {}
    for z in range(1, Z + 1):
        cp, cs = comp_of[_node(z, PB)], comp_of[_node(z, SB)]
        if cp == cs:
            serving_comp[z] = cp
        elif sourced(cp) and sourced(cs):
            coupled_zones.append(z)
        elif sourced(cp):
            serving_comp[z] = cp
        elif sourced(cs):
            serving_comp[z] = cs
        else:
            serving_comp[z] = cp  # dead zone; keeps the bookkeeping total

    # Components that carry equipment or serve loads become island parts.
    used_comps = sorted(
        set(serving_comp.values())
        | {comp_of[_node(z, PB)] for z in coupled_zones}
        | {comp_of[_node(z, SB)] for z in coupled_zones}
        | set(sourced_comps)
    )
    part_index = {ci: w for w, ci in enumerate(used_comps)}
    parts = [
        IslandPart(
            index=w,
            generators=[],
            esms=[],
            propulsion_modules=[],
            zones=[],
            omega_pb=[],
            omega_sb=[],
        )
        for w in range(len(used_comps))
    ]

    for g in healthy_gens:
        parts[part_index[comp_of[_node(g.zone, PB)]]].generators.append(g.id)

    def side_component(z: int) -> int:
        """Component a zone-attached device lands in (ambiguity rule for
        coupled zones: follow the bus whose longitudinal run survives at the
        zone, preferring PB when both or neither do)."""
        cp, cs = comp_of[_node(z, PB)], comp_of[_node(z, SB)]
        if cp == cs:
            return cp
        if z in coupled_zones:
            if pb_adjacent_alive(z):
                return cp
            return cs
        return serving_comp[z]

    for e in scenario.esms:
        parts[part_index[side_component(e.zone)]].esms.append(e.id)

    pr = scenario.propulsion
    prop_part = part_index[side_component(pr.zone)]
    parts[prop_part].propulsion_modules = list(range(pr.module_count))

    for z in range(1, Z + 1):
        if z in coupled_zones:
            parts[part_index[comp_of[_node(z, PB)]]].omega_pb.append(z)
            parts[part_index[comp_of[_node(z, SB)]]].omega_sb.append(z)
        else:
            parts[part_index[serving_comp[z]]].zones.append(z)

    for i, blk in enumerate(scenario.loads.no_blocks):
        ci = comp_of[_node(blk.zone, blk.bus)]
        if ci in part_index:
            parts[part_index[ci]].nonvital_blocks.append(i)
        # blocks on a dead stub have no supply path and drop out entirely

    # Forced switch states for non-coupled zones: keep the initial state
    # unless it points at a bus with no path to any source.
    fixed_switches = {}
    for z in range(1, Z + 1):
        if z in coupled_zones:
            continue
        sp0, ss0 = topology.switch_initial[z - 1]
        cp, cs = comp_of[_node(z, PB)], comp_of[_node(z, SB)]
        pb_ok, sb_ok = sourced(cp), sourced(cs)
        if sp0 == 1 and not pb_ok and sb_ok:
            fixed_switches[z] = (0, 1)
        elif ss0 == 1 and not sb_ok and pb_ok:
            fixed_switches[z] = (1, 0)
        else:
            fixed_switches[z] = (sp0, ss0)

    n_effective = sum(1 for p in parts if p.generators or p.esms or p.zones)
    if fault_set.empty:
        mode = FaultMode.NORMAL
    elif coupled_zones:
        mode = FaultMode.SEMI_ISLAND
    elif n_effective <= 1:
        mode = FaultMode.NON_ISLAND
    else:
        mode = FaultMode.ISLAND

    return IslandPartition(
        mode=mode,
        parts=parts,
        coupled_zones=coupled_zones,
        fixed_switches=fixed_switches,
        failed_generators=failed_gens,
    )


def count_switch_changes(
    part_result: IslandPartition, schedule: Schedule, topology: NetworkTopology
) -> int:
    """Number of (zone, t) redundant-switch reconfigurations over the horizon."""
    sp = np.asarray(schedule.s_p)
    ss = np.asarray(schedule.s_s)
    Z, T = sp.shape
    if Z != topology.zone_count:
        raise ValueError("schedule switch dimensions do not match the topology")
    n = 0
    for z in range(Z):
        prev = topology.switch_initial[z]
        for t in range(T):
            cur = (round(sp[z, t]), round(ss[z, t]))
            if cur != tuple(prev):
                n += 1
            prev = cur
    return n
