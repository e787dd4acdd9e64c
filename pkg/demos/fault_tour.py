"""Tour of the fault taxonomy on the six-zone ship.

Walks the named fixtures through the partition step and prints what each
fault does to the network: how many parts, which zones end up coupled,
and where the equipment lands.
"""

from sps import fixtures
from sps.fault_analysis import partition


def describe(name, sc):
    part = partition(sc.topology, sc.faults, sc)
    print(f"--- {name}")
    print(f"  faults: PB {sc.faults.failed_pb_segments} SB {sc.faults.failed_sb_segments} "
          f"generators {sc.faults.failed_generators}")
    print(f"  mode: {part.mode}, parts: {part.n_parts}, coupled zones: {part.coupled_zones or 'none'}")
    for p in part.parts:
        print(f"  part {p.index}: zones {p.zones} + PB-side {p.omega_pb} + SB-side {p.omega_sb}")
        print(f"    generators {p.generators}, esms {p.esms}, "
              f"propulsion {'yes' if p.propulsion_modules else 'no'}")


def main():
    for name in ("normal", "non-island", "island", "case1", "case1-wide"):
        describe(name, fixtures.NAMED_FIXTURES[name]())
        print()


if __name__ == "__main__":
    main()
