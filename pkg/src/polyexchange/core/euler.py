"""Euler-characteristic bookkeeping for planar and toroidal subdivisions."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

__all__ = ["Topology", "SubdivisionCount", "euler_faces"]


class Topology(str, Enum):
    DISK = "disk"
    TORUS = "torus"


def euler_faces(V: int, E: int, topology="disk") -> int:
    """Number of faces of a connected subdivision with ``V`` vertices and ``E`` edges.

    Disk: ``F = E - V + 1``. Torus (Euler characteristic 0): ``F = E - V``.
    """
    topology = Topology(topology)
    if V < 0 or E < 0:
        raise ValueError("counts must be non-negative")
    F = E - V + 1 if topology is Topology.DISK else E - V
    if F < 1:
        raise ValueError(f"malformed subdivision: V={V}, E={E} on a {topology.value} gives F={F}")
    return F


@dataclass(frozen=True)
class SubdivisionCount:
    V: int
    E: int
    F: int
    topology: Topology = Topology.DISK

    def __post_init__(self):
        if euler_faces(self.V, self.E, self.topology) != self.F:
            raise ValueError("counts violate the Euler relation")

    @classmethod
    def from_counts(cls, V: int, E: int, topology="disk") -> "SubdivisionCount":
        return cls(V, E, euler_faces(V, E, topology), Topology(topology))
