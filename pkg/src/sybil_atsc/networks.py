"""Prebuilt road networks: a three-junction arterial and an N x M grid."""

from __future__ import annotations

from .traffic_model import (
    FundamentalDiagramParams,
    Junction,
    Lane,
    Network,
    SignalPhase,
)

# Reference demand, veh/h.  The arterial (left/right) runs heavily loaded
# while the cross streets stay light, so per-lane headroom differs strongly
# between them; that asymmetry is what both attacker and defender play on.
REFERENCE_INFLOWS_VPH = {"top": 50.0, "bottom": 75.0, "left": 1100.0, "right": 900.0}

# Grid demand, veh/h per entry edge.
GRID_INFLOWS_VPH = {"top": 20.0, "bottom": 40.0, "left": 40.0, "right": 50.0}


def _lane(lane_id, length, diagram, saturation, inflow_vph):
    return Lane(
        id=lane_id,
        length=length,
        diagram=diagram,
        saturation_flow=saturation,
        inflow_rate=inflow_vph / 3600.0,
    )


def three_junction_reference(
    *,
    lane_length: float = 150.0,
    free_speed: float = 35.0,
    jam_density: float = 0.16,
    saturation_flow: float = 0.5,
    inflows_vph: dict[str, float] | None = None,
    min_green: float = 5.0,
    max_green: float = 45.0,
    yellow: float = 3.0,
) -> Network:
    """Three signalised junctions in a row along an east-west arterial.

    Eastbound traffic enters at J1's west approach and crosses all three
    junctions; westbound enters at J3's east approach and crosses them the
    other way.  Each junction also has a north and a south approach that
    discharge straight to a sink.  4 approaches per junction, 12 lanes total.
    """
    flows = dict(REFERENCE_INFLOWS_VPH)
    if inflows_vph:
        flows.update(inflows_vph)
    diagram = FundamentalDiagramParams(free_speed=free_speed, jam_density=jam_density)

    junctions = []
    for idx in (1, 2, 3):
        name = f"J{idx}"
        west_inflow = flows["left"] if idx == 1 else 0.0
        east_inflow = flows["right"] if idx == 3 else 0.0
        lanes = (
            _lane(f"{name}:N", lane_length, diagram, saturation_flow, flows["top"]),
            _lane(f"{name}:S", lane_length, diagram, saturation_flow, flows["bottom"]),
            _lane(f"{name}:E", lane_length, diagram, saturation_flow, east_inflow),
            _lane(f"{name}:W", lane_length, diagram, saturation_flow, west_inflow),
        )
        phases = (
            SignalPhase(
                id=f"{name}:EW",
                served_lanes=(f"{name}:E", f"{name}:W"),
                min_green=min_green,
                max_green=max_green,
                yellow=yellow,
            ),
            SignalPhase(
                id=f"{name}:NS",
                served_lanes=(f"{name}:N", f"{name}:S"),
                min_green=min_green,
                max_green=max_green,
                yellow=yellow,
            ),
        )
        junctions.append(Junction(id=name, approach_lanes=lanes, phase_table=phases))

    adjacency = {
        "J1:W": "J2:W",
        "J2:W": "J3:W",
        "J3:E": "J2:E",
        "J2:E": "J1:E",
    }
    return Network(junctions=tuple(junctions), adjacency=adjacency)


def grid(
    rows: int = 10,
    cols: int = 10,
    *,
    lanes_per_direction: int = 2,
    lane_length: float = 500.0,
    free_speed: float = 35.0,
    jam_density: float = 0.16,
    saturation_flow: float = 0.5,
    inflows_vph: dict[str, float] | None = None,
    min_green: float = 5.0,
    max_green: float = 45.0,
    yellow: float = 3.0,
) -> Network:
    """Rows x cols grid of signalised junctions with edge inflows.

    Multiple physical lanes per direction are aggregated into one modelled
    approach whose jam density and saturation flow scale with the lane count.
    Southbound traffic enters along the top edge, northbound along the
    bottom, eastbound on the left and westbound on the right; every movement
    continues straight and exits at the far edge.
    """
    if rows < 1 or cols < 1:
        raise ValueError("grid needs rows >= 1 and cols >= 1")
    flows = dict(GRID_INFLOWS_VPH)
    if inflows_vph:
        flows.update(inflows_vph)
    diagram = FundamentalDiagramParams(
        free_speed=free_speed, jam_density=jam_density * lanes_per_direction
    )
    saturation = saturation_flow * lanes_per_direction

    junctions = []
    adjacency: dict[str, str] = {}
    for r in range(rows):
        for c in range(cols):
            name = f"J{r}_{c}"
            inflow_n = flows["top"] if r == 0 else 0.0
            inflow_s = flows["bottom"] if r == rows - 1 else 0.0
            inflow_w = flows["left"] if c == 0 else 0.0
            inflow_e = flows["right"] if c == cols - 1 else 0.0
            lanes = (
                _lane(f"{name}:N", lane_length, diagram, saturation, inflow_n),
                _lane(f"{name}:S", lane_length, diagram, saturation, inflow_s),
                _lane(f"{name}:E", lane_length, diagram, saturation, inflow_e),
                _lane(f"{name}:W", lane_length, diagram, saturation, inflow_w),
            )
            phases = (
                SignalPhase(
                    id=f"{name}:EW",
                    served_lanes=(f"{name}:E", f"{name}:W"),
                    min_green=min_green,
                    max_green=max_green,
                    yellow=yellow,
                ),
                SignalPhase(
                    id=f"{name}:NS",
                    served_lanes=(f"{name}:N", f"{name}:S"),
                    min_green=min_green,
                    max_green=max_green,
                    yellow=yellow,
                ),
            )
            junctions.append(
                Junction(id=name, approach_lanes=lanes, phase_table=phases)
            )
            # continue-straight wiring; vehicles exit at the far edge
            if r + 1 < rows:
                adjacency[f"{name}:N"] = f"J{r + 1}_{c}:N"
            if r - 1 >= 0:
                adjacency[f"{name}:S"] = f"J{r - 1}_{c}:S"
            if c + 1 < cols:
                adjacency[f"{name}:W"] = f"J{r}_{c + 1}:W"
            if c - 1 >= 0:
                adjacency[f"{name}:E"] = f"J{r}_{c - 1}:E"

    return Network(junctions=tuple(junctions), adjacency=adjacency)
