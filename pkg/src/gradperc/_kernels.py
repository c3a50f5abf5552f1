"""Numba kernels for the hot loops: counter-based RNG fill, annulus
cluster counting, and the two-disjoint-paths (Menger) decision.

Everything here has a slow pure-Python/scipy counterpart used as a
reference in the test suite; these kernels are the production engines.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

#: SplitMix64 constants (Vigna / Steele et al.); fixed forever, the RNG
#: stream contract depends on them.
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1


def mix64(z: int) -> int:
    """SplitMix64 finalizer on Python ints (reference, exact)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, replica: int) -> int:
    """Derive the 64-bit stream key for a (seed, replica) pair."""
    k = mix64((seed + GAMMA) & MASK64)
    return mix64(k ^ mix64((replica + 2 * GAMMA) & MASK64))


@njit("void(uint64, uint64, uint64[::1])", cache=True)
def fill_raw(key, start, out):
    """Fill ``out[k] = mix64(key + GAMMA*(start+k))`` for k = 0..len-1."""
    g = uint64(GAMMA)
    m1 = uint64(_M1)
    m2 = uint64(_M2)
    for k in range(out.shape[0]):
        z = key + g * (start + uint64(k))
        z = (z ^ (z >> uint64(30))) * m1
        z = (z ^ (z >> uint64(27))) * m2
        out[k] = z ^ (z >> uint64(31))


def raw_stream(key: int, start: int, count: int) -> np.ndarray:
    """Words ``start .. start+count-1`` of the stream, as uint64 array."""
    out = np.empty(count, dtype=np.uint64)
    fill_raw(np.uint64(key), np.uint64(start), out)
    return out


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]  # path halving
        x = parent[x]
    return x


@njit(cache=True)
def _box_dist(r, c, n):
    dr = r - n if r >= n else n - r
    dc = c - n if c >= n else n - c
    return dr if dr > dc else dc


@njit(cache=True)
def annulus_crossing_counts(occ, m):
    """Count clusters of each colour crossing the annulus of a box.

    ``occ`` is the (2n+1) x (2n+1) occupancy of a box S_n, array axes
    (row, col) = (j, i) relative to the box corner.  Only sites at box
    distance m..n from the centre participate.  Returns (o, v): how many
    occupied (resp. vacant) clusters of the annulus contain sites on both
    the inner shell (distance m) and the outer shell (distance n).
    """
    size = occ.shape[0]
    n = (size - 1) // 2
    total = size * size
    parent = np.arange(total, dtype=np.int32)

    # hole bounding box in array coordinates: distances < m
    h0 = n - m + 1
    h1 = n + m - 1

    for r in range(size):
        in_hole_rows = h0 <= r <= h1
        below_hole = h0 <= r + 1 <= h1
        base = r * size
        for c in range(size):
            if in_hole_rows and h0 <= c <= h1:
                continue
            a = base + c
            ca = occ[r, c]
            # undirected neighbour offsets (dr, dc): (0,1), (1,0), (1,-1)
            if c + 1 < size and not (in_hole_rows and h0 <= c + 1 <= h1) \
                    and occ[r, c + 1] == ca:
                x = a
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                y = a + 1
                while parent[y] != y:
                    parent[y] = parent[parent[y]]
                    y = parent[y]
                if x != y:
                    parent[y] = x
            if r + 1 < size:
                if not (below_hole and h0 <= c <= h1) and occ[r + 1, c] == ca:
                    x = a
                    while parent[x] != x:
                        parent[x] = parent[parent[x]]
                        x = parent[x]
                    y = a + size
                    while parent[y] != y:
                        parent[y] = parent[parent[y]]
                        y = parent[y]
                    if x != y:
                        parent[y] = x
                if c - 1 >= 0 and not (below_hole and h0 <= c - 1 <= h1) \
                        and occ[r + 1, c - 1] == ca:
                    x = a
                    while parent[x] != x:
                        parent[x] = parent[parent[x]]
                        x = parent[x]
                    y = a + size - 1
                    while parent[y] != y:
                        parent[y] = parent[parent[y]]
                        y = parent[y]
                    if x != y:
                        parent[y] = x

    # flags: bit 0 = cluster reaches the outer shell, bit 1 = the inner
    flags = np.zeros(total, dtype=np.uint8)
    for c in range(size):  # outer shell = array border
        flags[_find(parent, c)] |= 1
        flags[_find(parent, (size - 1) * size + c)] |= 1
    for r in range(1, size - 1):
        flags[_find(parent, r * size)] |= 1
        flags[_find(parent, r * size + size - 1)] |= 1
    for c in range(h0 - 1, h1 + 2):  # inner shell = ring at distance m
        flags[_find(parent, (h0 - 1) * size + c)] |= 2
        flags[_find(parent, (h1 + 1) * size + c)] |= 2
    for r in range(h0, h1 + 1):
        flags[_find(parent, r * size + h0 - 1)] |= 2
        flags[_find(parent, r * size + h1 + 1)] |= 2

    o = 0
    v = 0
    for r in range(size):
        base = r * size
        for c in range(size):
            a = base + c
            if parent[a] == a and flags[a] == 3:
                if occ[r, c]:
                    o += 1
                else:
                    v += 1
    return o, v


@njit(cache=True)
def has_two_disjoint_crossings(mask, m):
    """Decide whether >= 2 vertex-disjoint paths of True sites join the
    inner shell (box distance m) to the outer shell of the box.

    Unit-vertex-capacity max-flow on the annulus subgraph of ``mask``,
    stopped after the second augmenting path.  Each site is split into an
    entry and an exit node; flow state is kept per site: through[a] plus
    the flow edge pointers succ[a]/pred[a] (-1 at a path start/end).
    """
    size = mask.shape[0]
    n = (size - 1) // 2
    total = size * size

    # 0 outside, 1 annulus interior, 2 inner shell, 3 outer shell
    level = np.zeros(total, dtype=np.int8)
    for r in range(size):
        for c in range(size):
            d = _box_dist(r, c, n)
            if d < m or not mask[r, c]:
                continue
            a = r * size + c
            if d == m:
                level[a] = 2
            elif d == n:
                level[a] = 3
            else:
                level[a] = 1

    through = np.zeros(total, dtype=np.uint8)
    succ = np.full(total, -1, dtype=np.int64)
    pred = np.full(total, -1, dtype=np.int64)
    offs = np.array([1, -1, size, -size, size - 1, -size + 1], dtype=np.int64)

    found = 0
    for _attempt in range(2):
        # BFS over split-node states: 2*a = entry of site a, 2*a+1 = exit
        seen = np.zeros(2 * total, dtype=np.uint8)
        parent_state = np.full(2 * total, -1, dtype=np.int64)
        queue = np.empty(2 * total, dtype=np.int64)
        qt = 0
        for a in range(total):
            # source edge to every inner-shell site not already a path start
            if level[a] == 2 and not (through[a] == 1 and pred[a] == -1):
                s = 2 * a
                if seen[s] == 0:
                    seen[s] = 1
                    parent_state[s] = -2
                    queue[qt] = s
                    qt += 1
        qh = 0
        goal = -1
        while qh < qt and goal < 0:
            s = queue[qh]
            qh += 1
            a = s // 2
            if s % 2 == 0:
                # entry of a: pass through when free
                if through[a] == 0:
                    t = 2 * a + 1
                    if seen[t] == 0:
                        seen[t] = 1
                        parent_state[t] = s
                        queue[qt] = t
                        qt += 1
                # or cancel the flow edge pred[a] -> a
                p = pred[a]
                if through[a] == 1 and p >= 0:
                    t = 2 * p + 1
                    if seen[t] == 0:
                        seen[t] = 1
                        parent_state[t] = s
                        queue[qt] = t
                        qt += 1
            else:
                # exit of a: sink edge for outer-shell sites not already
                # terminating a path
                if level[a] == 3 and not (through[a] == 1 and succ[a] == -1):
                    goal = s
                    break
                ca = a % size
                for k in range(6):
                    b = a + offs[k]
                    if b < 0 or b >= total:
                        continue
                    dc = b % size - ca
                    if dc > 1 or dc < -1:
                        continue  # row wrap
                    if level[b] == 0 or succ[a] == b:
                        continue
                    t = 2 * b
                    if seen[t] == 0:
                        seen[t] = 1
                        parent_state[t] = s
                        queue[qt] = t
                        qt += 1
        if goal < 0:
            return found >= 2

        # retrace the augmenting state path root..goal
        ln = 0
        s = goal
        while s != -2:
            ln += 1
            s = parent_state[s]
        path = np.empty(ln, dtype=np.int64)
        s = goal
        for idx in range(ln - 1, -1, -1):
            path[idx] = s
            s = parent_state[s]
        # apply flow updates pairwise
        for idx in range(ln - 1):
            s0 = path[idx]
            s1 = path[idx + 1]
            a0 = s0 // 2
            a1 = s1 // 2
            if s0 % 2 == 0 and s1 % 2 == 1:
                if a0 == a1:
                    through[a0] = 1
                else:
                    # cancellation of flow edge a1 -> a0
                    succ[a1] = -1
                    if pred[a0] == a1:
                        pred[a0] = -1
            else:
                # s0 exit -> s1 entry: new flow edge a0 -> a1
                succ[a0] = a1
                pred[a1] = a0
        first = path[0] // 2
        last = path[ln - 1] // 2
        through[first] = 1
        pred[first] = -1
        through[last] = 1
        succ[last] = -1
        found += 1
    return found >= 2
