"""Polychromatic arm events in annuli and two-arm events at a site.

Arm detection decomposes by colour.  Writing Mo (Mv) for the maximum
number of vertex-disjoint occupied (vacant) paths joining the inner and
outer shells of the annulus, the implemented events are

    j = 2:  Mo >= 1 and Mv >= 1          (one arm of each colour)
    j = 3:  {2 of one colour, 1 of the other}
    j = 4:  {2, 2}

Opposite-coloured paths are disjoint automatically, so only same-colour
multiplicities matter.  Counting the clusters of a colour that touch both
shells gives a lower bound on the disjoint-path count (one path per
cluster); when a single cluster must supply two disjoint paths the
decision falls back to a unit-vertex-capacity max-flow stopped at value
two (Menger).  The brute-force disjoint-path oracle in ``oracle`` checks
this detector exactly on small annuli.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import annulus_crossing_counts, has_two_disjoint_crossings
from .connectivity import CrossingEstimate, _binomial_estimate, label_grid
from .lattice import Region, Site, box
from .sampling import Configuration, homogeneous_field, sample


@dataclass(frozen=True)
class ArmQuery:
    """j disjoint monochromatic arms, both colours present, crossing the
    annulus S_n(center) minus the open box S_m(center).

    The exponent statement assumes m >= j, but any m >= 1 is accepted
    (the near-critical product test needs the inner radius 1).
    """

    center: Site
    m: int
    n: int
    j: int

    def __post_init__(self) -> None:
        if self.j not in (2, 3, 4):
            raise ValueError("arm count j must be 2, 3 or 4")
        if self.m < 1 or self.n <= self.m:
            raise ValueError("need 1 <= m < n")

    @property
    def region(self) -> Region:
        return box(self.center, self.n)


def _count_sides(occ_box: np.ndarray, m: int) -> tuple[int, int]:
    occ_c = np.ascontiguousarray(occ_box)
    o, v = annulus_crossing_counts(occ_c, m)
    return int(o), int(v)


def _at_least(occ_box: np.ndarray, m: int, count: int, need: int) -> bool:
    """Whether the colour with ``count`` crossing clusters admits ``need``
    disjoint crossings (need <= 2)."""
    if count >= need:
        return True
    if need == 2 and count == 1:
        return bool(has_two_disjoint_crossings(np.ascontiguousarray(occ_box), m))
    return False


def _arms_decision(occ_box: np.ndarray, m: int, j: int) -> bool:
    o, v = _count_sides(occ_box, m)
    if o == 0 or v == 0:
        return False
    if j == 2:
        return True
    if j == 3:
        if o >= 2 or v >= 2:
            return True
        return (_at_least(occ_box, m, o, 2)
                or _at_least(~occ_box, m, v, 2))
    # j == 4, pattern {2, 2}
    return (_at_least(occ_box, m, o, 2)
            and _at_least(~occ_box, m, v, 2))


def has_polychromatic_arms(c: Configuration, q: ArmQuery) -> bool:
    """Decide the arm event on the annulus of ``q`` inside ``c``."""
    if not c.region.contains_region(q.region):
        raise ValueError(f"annulus region {q.region} not inside {c.region}")
    occ_box = c.subgrid(q.region)
    return _arms_decision(occ_box, q.m, q.j)


@dataclass(frozen=True)
class TwoArmQuery:
    """One occupied and one vacant path from the neighbours of ``site``
    to the region boundary (the site itself is not part of either path)."""

    site: Site
    region: Region

    def __post_init__(self) -> None:
        inner = self.region.interior()
        if inner is None or not inner.contains(self.site):
            raise ValueError("site must lie in the interior of the region")


def has_two_arms(c: Configuration, q: TwoArmQuery) -> bool:
    if not c.region.contains_region(q.region):
        raise ValueError(f"query region {q.region} not inside {c.region}")
    grid = c.subgrid(q.region)
    r0 = q.site[1] - q.region.b1
    c0 = q.site[0] - q.region.a1

    def reaches_boundary(mask: np.ndarray) -> bool:
        work = mask.copy()
        work[r0, c0] = False  # the centre site carries no arm
        labels, count = label_grid(work)
        if count == 0:
            return False
        ring = np.concatenate([labels[0, :], labels[-1, :],
                               labels[1:-1, 0], labels[1:-1, -1]])
        ring = set(ring[ring > 0].tolist())
        if not ring:
            return False
        for di, dj in ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)):
            rr, cc = r0 + dj, c0 + di
            if 0 <= rr < labels.shape[0] and 0 <= cc < labels.shape[1]:
                if labels[rr, cc] in ring:
                    return True
        return False

    return reaches_boundary(grid) and reaches_boundary(~grid)


def arm_probability(p: float, q: ArmQuery, samples: int, seed: int,
                    threads: int = 1) -> CrossingEstimate:
    """Monte Carlo frequency of the arm event at homogeneous ``p``.

    Trial r uses the stream (seed, r) over the box region of ``q``;
    deterministic and mergeable across replica ranges.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    field = homogeneous_field(p)
    region = q.region

    def one(r: int) -> bool:
        cfg = sample(field, region, seed, r)
        return _arms_decision(cfg.occupied, q.m, q.j)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            hits = sum(ex.map(one, range(samples)))
    else:
        hits = sum(one(r) for r in range(samples))
    return _binomial_estimate(int(hits), samples)
