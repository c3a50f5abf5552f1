"""Triangular-lattice geometry in oblique coordinates.

Sites are integer pairs ``(i, j)``; the corresponding point of the plane is
``i + j * exp(i*pi/3)`` in complex notation, so the six nearest neighbours
of a site sit at offsets (1,0), (0,1), (-1,1), (-1,0), (0,-1), (1,-1).
Every site is rendered as a hexagonal cell; two sites are adjacent exactly
when their hexagons share a wall.

All geometry here is exact integer arithmetic.  The Euclidean embedding
(x = i + j/2, y = j*sqrt(3)/2) appears only in the SVG renderer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Tuple

Site = Tuple[int, int]

#: Neighbour offsets in counterclockwise order starting from (1, 0).
NEIGHBOR_OFFSETS: tuple[Site, ...] = (
    (1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1),
)

#: The three undirected edge directions; every lattice edge is one of these
#: offsets applied to its lexicographically smaller endpoint.
EDGE_OFFSETS: tuple[Site, ...] = ((1, 0), (0, 1), (-1, 1))


def neighbors(z: Site) -> tuple[Site, ...]:
    """Return the six neighbours of ``z``, in a fixed ccw order."""
    i, j = z
    return (
        (i + 1, j), (i, j + 1), (i - 1, j + 1),
        (i - 1, j), (i, j - 1), (i + 1, j - 1),
    )


def dist(z1: Site, z2: Site) -> int:
    """Box distance ``max(|di|, |dj|)`` in oblique coordinates."""
    return max(abs(z1[0] - z2[0]), abs(z1[1] - z2[1]))


def rot60(z: Site) -> Site:
    """Rotate an offset by +60 degrees: (a, b) -> (-b, a+b)."""
    return (-z[1], z[0] + z[1])


@dataclass(frozen=True, order=True)
class Region:
    """Inclusive parallelogram ``[a1, a2] x [b1, b2]`` of lattice sites."""

    a1: int
    a2: int
    b1: int
    b2: int

    def __post_init__(self) -> None:
        if self.a1 > self.a2 or self.b1 > self.b2:
            raise ValueError(f"empty region bounds {self}")

    @property
    def ncols(self) -> int:
        return self.a2 - self.a1 + 1

    @property
    def nrows(self) -> int:
        return self.b2 - self.b1 + 1

    @property
    def nsites(self) -> int:
        return self.ncols * self.nrows

    def contains(self, z: Site) -> bool:
        return self.a1 <= z[0] <= self.a2 and self.b1 <= z[1] <= self.b2

    def contains_region(self, other: "Region") -> bool:
        return (self.a1 <= other.a1 and other.a2 <= self.a2
                and self.b1 <= other.b1 and other.b2 <= self.b2)

    def interior(self) -> "Region | None":
        """Open parallelogram, or None when no interior site exists."""
        if self.a2 - self.a1 < 2 or self.b2 - self.b1 < 2:
            return None
        return Region(self.a1 + 1, self.a2 - 1, self.b1 + 1, self.b2 - 1)

    def sites(self) -> Iterator[Site]:
        """All sites, row-major (j ascending, then i ascending)."""
        for j in range(self.b1, self.b2 + 1):
            for i in range(self.a1, self.a2 + 1):
                yield (i, j)

    def interior_sites(self) -> Iterator[Site]:
        inner = self.interior()
        return iter(()) if inner is None else inner.sites()

    def boundary_sites(self) -> Iterator[Site]:
        inner = self.interior()
        for z in self.sites():
            if inner is None or not inner.contains(z):
                yield z

    def site_index(self, z: Site) -> int:
        """Row-major index of ``z``; this fixes the RNG stream position."""
        if not self.contains(z):
            raise ValueError(f"site {z} outside region {self}")
        return (z[1] - self.b1) * self.ncols + (z[0] - self.a1)


def box(z: Site, n: int) -> Region:
    """Rhombus of all sites at box distance at most ``n`` from ``z``."""
    if n < 0:
        raise ValueError("box radius must be >= 0")
    return Region(z[0] - n, z[0] + n, z[1] - n, z[1] + n)


def box_boundary(z: Site, n: int) -> list[Site]:
    """Sites at box distance exactly ``n`` from ``z``."""
    if n == 0:
        return [z]
    return [w for w in box(z, n).sites() if dist(z, w) == n]


def _edge_key(z: Site) -> tuple[int, int]:
    # canonical endpoint order is lexicographic by (j, i)
    return (z[1], z[0])


@dataclass(frozen=True)
class DualEdge:
    """Hexagonal wall between two adjacent sites, canonically ordered.

    ``lo`` is the endpoint that is smaller in (j, i) lexicographic order;
    the representative site of the edge is ``lo``, fixed once and for all
    so that edge-to-site bookkeeping is reproducible.
    """

    lo: Site
    hi: Site

    def __post_init__(self) -> None:
        if self.hi not in neighbors(self.lo):
            raise ValueError(f"{self.lo} and {self.hi} are not adjacent")
        if _edge_key(self.lo) >= _edge_key(self.hi):
            raise ValueError(f"edge endpoints out of canonical order: {self}")

    @classmethod
    def of(cls, u: Site, v: Site) -> "DualEdge":
        """Canonicalize an unordered adjacent pair into a DualEdge."""
        if _edge_key(u) <= _edge_key(v):
            return cls(u, v)
        return cls(v, u)


def x_of_edge(e: DualEdge) -> Site:
    """The fixed representative site associated with a dual edge."""
    return e.lo


def canonical_pair(u: Site, v: Site) -> tuple[Site, Site]:
    """Unordered adjacent pair as (lo, hi) in (j, i) lexicographic order."""
    return (u, v) if _edge_key(u) <= _edge_key(v) else (v, u)
