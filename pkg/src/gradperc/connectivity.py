"""Cluster labeling and crossing events with relaxed endpoints.

A horizontal occupied crossing of a parallelogram is a path between its
left and right sides whose sites, apart from the two extremities, lie in
the open interior and are occupied.  The extremities' colours are free,
so the event only depends on the interior: it is equivalent to an
occupied path inside the interior joining the first and last interior
columns (each interior site of those columns touches the corresponding
side).  Regions of width <= 2 in the crossing direction have no interior
constraint at all and always cross.

On the triangular lattice this convention makes the crossing event the
exact pathwise complement of the transverse vacant crossing, provided the
region is wider than 2 in at least one direction.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .lattice import Region
from .sampling import Configuration, ProbabilityField, sample

#: 3x3 structuring element encoding the 6-neighbour adjacency on the
#: (row=j, col=i) array layout.
HEX_STRUCTURE = np.array([[0, 1, 1],
                          [1, 1, 1],
                          [1, 1, 0]], dtype=bool)


@dataclass
class ClusterLabels:
    """Connected-component labels of one colour class; -1 elsewhere."""

    region: Region
    labels: np.ndarray
    count: int


def label_grid(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """Hex-adjacency connected components of a boolean grid (0 = none)."""
    labels, count = ndimage.label(mask, structure=HEX_STRUCTURE)
    return labels, int(count)


def label_clusters(c: Configuration, color: str = "occupied") -> ClusterLabels:
    """Label the maximal connected clusters of the requested colour."""
    mask = c.occupied if color == "occupied" else ~c.occupied
    labels, count = label_grid(mask)
    return ClusterLabels(region=c.region, labels=labels - 1, count=count)


@dataclass(frozen=True)
class CrossingQuery:
    """A crossing event: orientation 'horizontal' joins the i = a1 and
    i = a2 sides, 'vertical' the j = b1 and j = b2 sides."""

    region: Region
    orientation: str = "horizontal"
    color: str = "occupied"

    def __post_init__(self) -> None:
        if self.orientation not in ("horizontal", "vertical"):
            raise ValueError(f"bad orientation {self.orientation!r}")
        if self.color not in ("occupied", "vacant"):
            raise ValueError(f"bad color {self.color!r}")
        r = self.region
        span = (r.a2 - r.a1) if self.orientation == "horizontal" else (r.b2 - r.b1)
        if span < 1:
            raise ValueError("region has zero extent in the crossing direction")


def _grid_crossing(grid: np.ndarray, horizontal: bool) -> bool:
    """Crossing decision on a (rows=j, cols=i) colour grid of the region."""
    nrows, ncols = grid.shape
    span = ncols if horizontal else nrows
    if span <= 2:
        return True  # extremities may be adjacent; no interior constraint
    if (nrows if horizontal else ncols) <= 2:
        return False  # no interior sites at all
    inner = grid[1:-1, 1:-1]
    labels, count = label_grid(inner)
    if count == 0:
        return False
    if horizontal:
        first, last = labels[:, 0], labels[:, -1]
    else:
        first, last = labels[0, :], labels[-1, :]
    hit = np.intersect1d(first[first > 0], last[last > 0])
    return hit.size > 0


def has_crossing(c: Configuration, q: CrossingQuery) -> bool:
    """Whether the relaxed-endpoint crossing event holds in ``c``."""
    if not c.region.contains_region(q.region):
        raise ValueError(f"query region {q.region} not inside {c.region}")
    sub = c.subgrid(q.region)
    grid = sub if q.color == "occupied" else ~sub
    return _grid_crossing(grid, q.orientation == "horizontal")


@dataclass(frozen=True)
class CrossingEstimate:
    estimate: float
    stderr: float
    successes: int
    trials: int


def _binomial_estimate(successes: int, trials: int) -> CrossingEstimate:
    p = successes / trials
    se = float(np.sqrt(p * (1.0 - p) / trials))
    return CrossingEstimate(estimate=p, stderr=se,
                            successes=successes, trials=trials)


def crossing_probability(field: ProbabilityField, q: CrossingQuery,
                         samples: int, seed: int,
                         threads: int = 1) -> CrossingEstimate:
    """Monte Carlo crossing frequency over independent configurations.

    Replica r of the stream (seed, r) decides trial r, so results are
    independent of execution order and merging replica ranges is exact.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")

    def one(r: int) -> bool:
        return has_crossing(sample(field, q.region, seed, r), q)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            hits = sum(ex.map(one, range(samples)))
    else:
        hits = sum(one(r) for r in range(samples))
    return _binomial_estimate(int(hits), samples)
