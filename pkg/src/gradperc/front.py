"""Gradient-percolation front: two-arm edge set, interface walks,
uniqueness, height statistics and outer (accessible) boundaries.

Two independent algorithms are implemented.  The cluster route labels the
occupied cluster of the bottom row and the vacant cluster of the top row
and collects every adjacent pair between them: these are exactly the
edges carrying one occupied arm to the bottom and one vacant arm to the
top.  The walk route traces interfaces on the dual hexagonal lattice,
turning 60 degrees per step according to the colour of the cell ahead;
started from the top-left (resp. bottom-left) corner it discovers the
upper boundary of the topmost occupied crossing (resp. the lower boundary
of the lowest vacant crossing).  When the front is unique the two routes
produce the same edge set, and the two walks the same edge sequence.

Walk boundary convention: the two strip side columns are flanked by
virtual wall columns, occupied for the upper walk and vacant for the
lower one, so the walk hugs the side until the interface enters the
strip.  Edges touching a wall are not part of the interface; the recorded
path is the final run of real edges after the walk last touched the left
wall, and the walk stops on first contact with the right wall.  Excursions
around side-touching clusters that are not part of any crossing are
discarded by this trimming rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connectivity import label_grid
from .lattice import Site
from .sampling import Configuration, StripSpec

#: undirected front edge offsets (di, dj); dj >= 0 so (z, z + delta) is in
#: canonical (j, i) order automatically
_EDGE_OFFSETS = ((1, 0), (0, 1), (-1, 1))

DirectedEdge = tuple[Site, Site]


def _strip_shape(c: Configuration) -> tuple[int, int]:
    """(N, ell) of a canonical strip region [0, ell] x [-N, N]."""
    r = c.region
    if r.a1 != 0 or r.b1 != -r.b2 or r.b2 < 1 or r.a2 < 1:
        raise ValueError(f"not a canonical strip region: {r}")
    return r.b2, r.a2


def _validate_strip(c: Configuration) -> tuple[int, int]:
    N, ell = _strip_shape(c)
    if not c.occupied[0, :].all():
        raise ValueError("bottom strip row is not deterministically occupied")
    if c.occupied[-1, :].any():
        raise ValueError("top strip row is not deterministically vacant")
    return N, ell


def _interface_walk(occ: np.ndarray, ell: int, N: int,
                    upper: bool) -> list[DirectedEdge]:
    """Trace one interface; returns directed (vacant, occupied) site pairs.

    ``upper`` selects the walk from the top-left corner (occupied walls)
    discovering the topmost occupied crossing; otherwise the walk from the
    bottom-left corner (vacant walls) discovering the lowest vacant
    crossing.  Both travel left to right along the recorded stretch.
    """
    wall_occupied = upper

    def colored(i: int, j: int) -> bool:
        if i < 0 or i > ell:
            return wall_occupied
        return bool(occ[j + N, i])

    if upper:
        L: Site = (0, N)
        R: Site = (-1, N)
    else:
        L = (-1, -N)
        R = (0, -N)

    run: list[DirectedEdge] = []
    max_steps = 12 * (ell + 3) * (2 * N + 1) + 64
    for _ in range(max_steps):
        di = R[0] - L[0]
        dj = R[1] - L[1]
        # cell ahead: L + rot60(R - L)
        F = (L[0] - dj, L[1] + di + dj)
        if colored(*F):
            edge = (L, F)
            R = F
        else:
            edge = (F, R)
            L = F
        if max(edge[0][0], edge[1][0]) > ell:
            return run  # reached the right side
        if min(edge[0][0], edge[1][0]) < 0:
            run = []  # still (or again) attached to the left wall
        else:
            run.append(edge)
    raise RuntimeError("interface walk exceeded its step budget")


def highest_occupied_crossing(c: Configuration) -> list[DirectedEdge]:
    """Upper-boundary path of the topmost occupied horizontal crossing."""
    N, ell = _validate_strip(c)
    return _interface_walk(c.occupied, ell, N, upper=True)


def lowest_vacant_crossing(c: Configuration) -> list[DirectedEdge]:
    """Lower-boundary path of the lowest vacant horizontal crossing."""
    N, ell = _validate_strip(c)
    return _interface_walk(c.occupied, ell, N, upper=False)


def check_uniqueness(c: Configuration) -> bool:
    """True iff the two interface walks traverse the same edge sequence."""
    return highest_occupied_crossing(c) == lowest_vacant_crossing(c)


def _bottom_top_masks(occ: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    occ_labels, _ = label_grid(occ)
    vac_labels, _ = label_grid(~occ)
    bottom = occ_labels == occ_labels[0, 0]
    top = vac_labels == vac_labels[-1, 0]
    return bottom, top


def _pair_positions(A: np.ndarray, B: np.ndarray,
                    di: int, dj: int) -> tuple[np.ndarray, np.ndarray]:
    """(rows, cols) where A holds at z and B at z + (di, dj); dj >= 0."""
    if dj == 0:  # di == 1
        m = A[:, :-1] & B[:, 1:]
        r, cc = np.nonzero(m)
        return r, cc
    if di == 0:  # (0, 1)
        m = A[:-1, :] & B[1:, :]
        return np.nonzero(m)
    # (-1, 1)
    m = A[:-1, 1:] & B[1:, :-1]
    r, cc = np.nonzero(m)
    return r, cc + 1


@dataclass
class FrontResult:
    """The extracted front of one strip configuration.

    ``edges`` has one row (i_lo, j_lo, i_hi, j_hi) per front edge, sorted;
    ``heights``/``columns`` align with it.  ``rho_upper``/``rho_lower``
    are the interface walks in traversal order.
    """

    spec: StripSpec
    edges: np.ndarray
    length: int
    unique: bool
    rho_upper: list[DirectedEdge]
    rho_lower: list[DirectedEdge]
    heights: np.ndarray
    columns: np.ndarray

    def edge_set(self) -> set[tuple[Site, Site]]:
        return {((r[0], r[1]), (r[2], r[3])) for r in self.edges.tolist()}

    def height_profile(self) -> list[np.ndarray]:
        """Per-column arrays of front-edge heights, columns 0..ell."""
        prof = [self.heights[self.columns == c_]
                for c_ in range(self.spec.ell + 1)]
        return prof

    def fraction_outside(self, band_halfwidth: float) -> float:
        if self.length == 0:
            raise ValueError("empty front")
        return float(np.mean(np.abs(self.heights) > band_halfwidth))


def extract_front(c: Configuration) -> FrontResult:
    """Front edges: adjacent pairs (occupied in the bottom cluster,
    vacant in the top cluster), plus walks and the uniqueness flag."""
    N, ell = _validate_strip(c)
    O, W = _bottom_top_masks(c.occupied)

    rows = []
    for di, dj in _EDGE_OFFSETS:
        for A, B in ((O, W), (W, O)):
            r, cc = _pair_positions(A, B, di, dj)
            if r.size == 0:
                continue
            j = r - N
            block = np.empty((r.size, 4), dtype=np.int64)
            block[:, 0] = cc
            block[:, 1] = j
            block[:, 2] = cc + di
            block[:, 3] = j + dj
            rows.append(block)
    if rows:
        edges = np.concatenate(rows, axis=0)
        order = np.lexsort((edges[:, 2], edges[:, 3], edges[:, 0], edges[:, 1]))
        edges = edges[order]
    else:
        edges = np.empty((0, 4), dtype=np.int64)

    heights = (edges[:, 1] + edges[:, 3]) / 2.0
    columns = np.minimum(edges[:, 0], edges[:, 2])

    rho_u = _interface_walk(c.occupied, ell, N, upper=True)
    rho_l = _interface_walk(c.occupied, ell, N, upper=False)

    return FrontResult(spec=StripSpec(N=N, ell=ell), edges=edges,
                       length=int(edges.shape[0]), unique=rho_u == rho_l,
                       rho_upper=rho_u, rho_lower=rho_l,
                       heights=heights, columns=columns)


@dataclass
class FrontStats:
    """Height summary of a front, heights in lattice rows from y = 0."""

    length: int
    mean_height: float
    std_height: float
    min_height: float
    max_height: float
    delta: float
    band_plus: float
    band_minus: float
    fraction_outside_plus: float
    fraction_outside_minus: float


def front_stats(f: FrontResult, spec: StripSpec, delta: float = 0.1) -> FrontStats:
    """Summary statistics plus localization-band occupancy for the bands
    of half-width N**(4/7 +- delta)."""
    if f.length == 0:
        raise ValueError("empty front has no statistics")
    h = f.heights
    band_plus = spec.N ** (4 / 7 + delta)
    band_minus = spec.N ** (4 / 7 - delta)
    return FrontStats(
        length=f.length,
        mean_height=float(h.mean()),
        std_height=float(h.std()),
        min_height=float(h.min()),
        max_height=float(h.max()),
        delta=delta,
        band_plus=band_plus,
        band_minus=band_minus,
        fraction_outside_plus=f.fraction_outside(band_plus),
        fraction_outside_minus=f.fraction_outside(band_minus),
    )


def _dedupe(seq: list[Site]) -> list[Site]:
    out = [seq[0]]
    for s in seq[1:]:
        if s != out[-1]:
            out.append(s)
    return out


def loop_erase(seq: list[Site]) -> list[Site]:
    """Erase cycles in visit order, leaving a self-avoiding path."""
    path: list[Site] = []
    pos: dict[Site, int] = {}
    for s in seq:
        if s in pos:
            k = pos[s]
            for t in path[k + 1:]:
                del pos[t]
            del path[k + 1:]
        else:
            pos[s] = len(path)
            path.append(s)
    return path


@dataclass
class BoundaryResult:
    """One outer (accessible) boundary of the front."""

    side: str
    sites: list[Site]
    length: int


def outer_boundary(c: Configuration, side: str) -> BoundaryResult:
    """Accessible perimeter on one side of the front.

    ``upper``: the lowest self-avoiding vacant left-right crossing, i.e.
    the vacant sites hugging the lowest vacant crossing's lower boundary,
    fjords removed by loop erasure.  ``lower``: the highest self-avoiding
    occupied crossing, from the upper walk's occupied sides.
    """
    if side not in ("upper", "lower"):
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
    N, ell = _validate_strip(c)
    if side == "upper":
        walk = _interface_walk(c.occupied, ell, N, upper=False)
        hull = [e[0] for e in walk]  # vacant sides
    else:
        walk = _interface_walk(c.occupied, ell, N, upper=True)
        hull = [e[1] for e in walk]  # occupied sides
    if not walk:
        raise ValueError("interface walk produced no edges")
    path = loop_erase(_dedupe(hull))
    return BoundaryResult(side=side, sites=path, length=len(path))
