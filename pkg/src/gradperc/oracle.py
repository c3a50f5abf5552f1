"""Brute-force reference implementations.

Slow, independent counterparts of the production detectors, used by the
test suite and by the ``enumerate-oracle`` CLI command: breadth-first
crossing search, exhaustive configuration enumeration, reachability
two-arm checks, and a backtracking search over vertex-disjoint path
systems for arm events and 3-arm boundary membership.
"""

from __future__ import annotations

from collections import deque
from itertools import product
from typing import Callable, Iterable, Sequence

from .lattice import Region, Site, box, dist, neighbors


def crossing_reference(occ_at: Callable[[Site], bool], region: Region,
                       orientation: str = "horizontal",
                       color: str = "occupied") -> bool:
    """Relaxed-endpoint crossing decision by breadth-first search.

    ``occ_at`` gives site occupancy; the path's interior sites must have
    the queried colour and lie in the open interior of ``region``, the
    extremities sit anywhere on the two target sides.
    """
    want = color == "occupied"
    horizontal = orientation == "horizontal"
    span = (region.a2 - region.a1) if horizontal else (region.b2 - region.b1)
    if span <= 1:
        return True
    inner = region.interior()
    if inner is None:
        return False

    if horizontal:
        starts = [(inner.a1, j) for j in range(inner.b1, inner.b2 + 1)]
        def is_goal(z: Site) -> bool:
            return z[0] == inner.a2
    else:
        starts = [(i, inner.b1) for i in range(inner.a1, inner.a2 + 1)]
        def is_goal(z: Site) -> bool:
            return z[1] == inner.b2

    seen = set()
    queue = deque(z for z in starts if occ_at(z) == want)
    seen.update(queue)
    while queue:
        z = queue.popleft()
        if is_goal(z):
            return True
        for w in neighbors(z):
            if w not in seen and inner.contains(w) and occ_at(w) == want:
                seen.add(w)
                queue.append(w)
    return False


def enumerate_event_counts(region: Region, event: Callable[[dict], bool],
                           limit: int = 1 << 20) -> list[int]:
    """Exhaustive enumeration: counts[k] = number of configurations with k
    occupied sites satisfying ``event`` (a dict site -> bool)."""
    sites = list(region.sites())
    if 1 << len(sites) > limit:
        raise ValueError(f"{len(sites)} sites exceed the enumeration limit")
    counts = [0] * (len(sites) + 1)
    for bits in product((False, True), repeat=len(sites)):
        cfg = dict(zip(sites, bits))
        if event(cfg):
            counts[sum(bits)] += 1
    return counts


def probability_from_counts(counts: list[int], p: float) -> float:
    """Exact event probability at parameter ``p`` from popcount counts."""
    n = len(counts) - 1
    return float(sum(c * p ** k * (1 - p) ** (n - k)
                     for k, c in enumerate(counts)))


def enumerate_event_probability(region: Region, p: float,
                                event: Callable[[dict], bool],
                                limit: int = 1 << 20) -> float:
    """Exact probability of ``event`` under i.i.d. occupancy at ``p``."""
    return probability_from_counts(enumerate_event_counts(region, event,
                                                          limit), p)


def two_arm_reference(occ_at: Callable[[Site], bool], region: Region,
                      site: Site) -> bool:
    """One occupied and one vacant path from the neighbours of ``site``
    to the region boundary, avoiding ``site`` itself (reachability only;
    opposite colours are disjoint automatically)."""
    inner = region.interior()
    if inner is None or not inner.contains(site):
        raise ValueError("site must lie in the region interior")

    def reaches(want: bool) -> bool:
        seen = set()
        queue = deque(w for w in neighbors(site)
                      if region.contains(w) and occ_at(w) == want)
        seen.update(queue)
        while queue:
            z = queue.popleft()
            if not inner.contains(z):  # on the boundary ring
                return True
            for w in neighbors(z):
                if w != site and w not in seen and region.contains(w) \
                        and occ_at(w) == want:
                    seen.add(w)
                    queue.append(w)
        return False

    return reaches(True) and reaches(False)


def _can_reach(occ_at: Callable[[Site], bool], want: bool,
               allowed: Callable[[Site], bool], starts: Iterable[Site],
               is_goal: Callable[[Site], bool], blocked: set[Site]) -> bool:
    seen = set()
    queue = deque(s for s in starts
                  if s not in blocked and allowed(s) and occ_at(s) == want)
    seen.update(queue)
    while queue:
        z = queue.popleft()
        if is_goal(z):
            return True
        for w in neighbors(z):
            if w not in seen and w not in blocked and allowed(w) \
                    and occ_at(w) == want:
                seen.add(w)
                queue.append(w)
    return False


def _simple_paths(occ_at: Callable[[Site], bool], want: bool,
                  allowed: Callable[[Site], bool],
                  start_set: Sequence[Site], is_goal: Callable[[Site], bool],
                  blocked: set[Site], budget: list[int]) -> Iterable[list[Site]]:
    """Depth-first enumeration of chordless monochromatic paths.

    Exhaustive for the purpose of disjoint-path systems: any path system
    can be shortcut, path by path, into one of chordless paths that each
    stop at their first goal contact, so restricting the enumeration
    loses no witnesses.  Extensions that lose reachability of the goal
    are pruned.
    """
    path: list[Site] = []
    on_path: set[Site] = set()

    def extend(z: Site):
        budget[0] -= 1
        if budget[0] < 0:
            raise RuntimeError("path-system search budget exceeded")
        path.append(z)
        on_path.add(z)
        if is_goal(z):
            yield list(path)
        else:
            for w in neighbors(z):
                if w in on_path or w in blocked:
                    continue
                if not allowed(w) or occ_at(w) != want:
                    continue
                # chordless: w may touch the path only at its tip z
                chord = False
                for u in neighbors(w):
                    if u != z and u in on_path:
                        chord = True
                        break
                if chord:
                    continue
                if not _can_reach(occ_at, want, allowed, [w], is_goal,
                                  blocked | on_path):
                    continue
                yield from extend(w)
        path.pop()
        on_path.remove(z)

    for s in start_set:
        if allowed(s) and s not in blocked and occ_at(s) == want \
                and s not in on_path:
            yield from extend(s)


def disjoint_path_system(occ_at: Callable[[Site], bool],
                         allowed: Callable[[Site], bool],
                         requirements: Sequence[tuple[bool, Sequence[Site],
                                                      Callable[[Site], bool]]],
                         budget: int = 2_000_000) -> bool:
    """Whether vertex-disjoint paths satisfying all requirements exist.

    Each requirement is (colour, start sites, goal predicate).  Paths of
    the system may not share any site, regardless of colour.  Plain
    backtracking: find a path for the first requirement, block its sites,
    recurse; on failure try the next path.
    """
    counter = [budget]

    def solve(k: int, blocked: set[Site], min_rank: int) -> bool:
        if k == len(requirements):
            return True
        for want, starts, is_goal in requirements[k:]:
            if not _can_reach(occ_at, want, allowed, starts, is_goal, blocked):
                return False
        want, starts, is_goal = requirements[k]
        # symmetry break: interchangeable consecutive requirements take
        # their start sites in increasing rank
        start_list = list(starts)[min_rank:]
        for path in _simple_paths(occ_at, want, allowed, start_list, is_goal,
                                  blocked, counter):
            next_rank = 0
            if k + 1 < len(requirements) and requirements[k + 1] == requirements[k]:
                next_rank = list(starts).index(path[0]) + 1
            if solve(k + 1, blocked | set(path), next_rank):
                return True
        return False

    return solve(0, set(), 0)


def arm_event_reference(occ_at: Callable[[Site], bool], center: Site,
                        m: int, n: int, j: int,
                        budget: int = 2_000_000) -> bool:
    """Polychromatic arm event by exhaustive disjoint-path search.

    Looks for j vertex-disjoint monochromatic paths from the inner shell
    (distance m) to the outer shell (distance n) with colour multiset
    {a occupied, b vacant}; the implemented patterns are {1,1} for j=2,
    {2,1} for j=3 and {2,2} for j=4.
    """
    if j not in (2, 3, 4):
        raise ValueError("j must be 2, 3 or 4")

    def in_annulus(z: Site) -> bool:
        d = dist(z, center)
        return m <= d <= n

    inner_shell = [z for z in _shell(center, m)]

    def is_goal(z: Site) -> bool:
        return dist(z, center) == n

    def req(want: bool):
        return (want, inner_shell, is_goal)

    # one arm of each colour is necessary for every pattern; this check is
    # cheap and kills most unsatisfiable instances early
    if not disjoint_path_system(occ_at, in_annulus, [req(True), req(False)],
                                budget=budget):
        return False
    if j == 2:
        return True

    # enumerate the rarer colour first: fewer top-level paths to try
    occ_count = sum(1 for z in box(center, n).sites()
                    if in_annulus(z) and occ_at(z))
    vac_first = occ_count * 2 > (2 * n + 1) ** 2 - max(2 * m - 1, 0) ** 2
    patterns = {3: [(2, 1), (1, 2)], 4: [(2, 2)]}
    for a, b in patterns[j]:
        reqs = [req(True)] * a + [req(False)] * b
        if vac_first:
            reqs = reqs[::-1]
        if disjoint_path_system(occ_at, in_annulus, reqs, budget=budget):
            return True
    return False


def _shell(center: Site, radius: int) -> list[Site]:
    if radius == 0:
        return [center]
    out = []
    ci, cj = center
    for t in range(-radius, radius + 1):
        out.append((ci + t, cj - radius))
        out.append((ci + t, cj + radius))
    for t in range(-radius + 1, radius):
        out.append((ci - radius, cj + t))
        out.append((ci + radius, cj + t))
    return out


def three_arm_membership(occ_at: Callable[[Site], bool], region: Region,
                         site: Site, side: str,
                         budget: int = 2_000_000) -> bool:
    """3-arm test for outer-boundary membership on a strip.

    ``upper``: two vertex-disjoint vacant arms from ``site`` to the left
    and right strip sides (sharing only ``site``), and an occupied arm
    from a neighbour of ``site`` to the bottom row.  ``lower``: colours
    swapped, occupied arms to the sides and a vacant arm to the top row.
    """
    want_side = side == "lower"  # colour of the two side arms
    if occ_at(site) != want_side:
        return False

    def in_region(z: Site) -> bool:
        return region.contains(z)

    counter = [budget]

    def to_left(z: Site) -> bool:
        return z[0] == region.a1

    def to_right(z: Site) -> bool:
        return z[0] == region.a2

    found_pair = False
    for left_path in _simple_paths(occ_at, want_side, in_region, [site],
                                   to_left, set(), counter):
        blocked = set(left_path) - {site}
        for _ in _simple_paths(occ_at, want_side, in_region, [site],
                               to_right, blocked, counter):
            found_pair = True
            break
        if found_pair:
            break
    if not found_pair:
        return False

    # transverse arm of the opposite colour from a neighbour of the site
    want_arm = not want_side
    target_row = region.b1 if side == "upper" else region.b2
    seen = set()
    queue = deque(w for w in neighbors(site)
                  if region.contains(w) and occ_at(w) == want_arm)
    seen.update(queue)
    while queue:
        z = queue.popleft()
        if z[1] == target_row:
            return True
        for w in neighbors(z):
            if w != site and w not in seen and region.contains(w) \
                    and occ_at(w) == want_arm:
                seen.add(w)
                queue.append(w)
    return False
