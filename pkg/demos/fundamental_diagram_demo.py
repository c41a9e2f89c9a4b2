"""Walk through the linear speed-density model and what it bounds.

Demonstrates:
- speed and flow across the whole density range
- the critical density and the capacity it induces
- headroom: how much extra flow a lane can absorb at a given load,
  which is exactly the ceiling on credible phantom traffic

Run directly: python demos/fundamental_diagram_demo.py
"""

from sybil_atsc import (
    FundamentalDiagramParams,
    critical_density,
    flow_at_density,
    headroom,
    max_flow,
    speed_at_density,
)


def example_1_sweep():
    print("\n" + "=" * 68)
    print("EXAMPLE 1: speed and flow against density (arterial parameters)")
    print("=" * 68)
    params = FundamentalDiagramParams(free_speed=14.0, jam_density=0.157)
    print(f"free speed {params.free_speed} m/s, jam density {params.jam_density} veh/m")
    print(f"{'k (veh/m)':>10}  {'v (m/s)':>8}  {'q (veh/s)':>10}")
    for i in range(0, 11):
        k = params.jam_density * i / 10
        print(
            f"{k:>10.4f}  {speed_at_density(params, k):>8.2f}  "
            f"{flow_at_density(params, k):>10.4f}"
        )
    kc = critical_density(params)
    print(f"\ncritical density {kc:.4f} veh/m -> capacity {max_flow(params):.4f} veh/s")
    print("flow is zero at both ends and peaks exactly halfway to jam density")


def example_2_headroom():
    print("\n" + "=" * 68)
    print("EXAMPLE 2: headroom under increasing load")
    print("=" * 68)
    params = FundamentalDiagramParams(free_speed=14.0, jam_density=0.157)
    cap = max_flow(params)
    print("headroom = capacity - observed flow, floored at zero.")
    print("it bounds how many phantom vehicles per second a lane can claim")
    print("before the claim exceeds what the road could physically carry.\n")
    print(f"{'observed q':>10}  {'headroom':>9}")
    for q in (0.0, 0.1, 0.25, 0.4, cap, 0.7):
        print(f"{q:>10.3f}  {headroom(params, q):>9.3f}")


def example_3_busy_vs_quiet():
    print("\n" + "=" * 68)
    print("EXAMPLE 3: why quiet lanes are the attacker's playground")
    print("=" * 68)
    params = FundamentalDiagramParams(free_speed=14.0, jam_density=0.157)
    arterial_flow = 0.31
    cross_flow = 0.04
    print(f"arterial lane at {arterial_flow} veh/s: "
          f"headroom {headroom(params, arterial_flow):.3f} veh/s")
    print(f"cross street at {cross_flow} veh/s:  "
          f"headroom {headroom(params, cross_flow):.3f} veh/s")
    print("\nthe quiet lane can hide several times more fake flow, which is")
    print("why the defensive game ends up distrusting quiet lanes the most")


if __name__ == "__main__":
    example_1_sweep()
    example_2_headroom()
    example_3_busy_vs_quiet()
