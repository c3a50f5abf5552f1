"""Probability fields and reproducible random configurations.

RNG contract
------------
Sampling is counter-based.  For a pair ``(seed, replica)`` a 64-bit stream
key ``K`` is derived with the SplitMix64 finalizer (see ``_kernels``), and
the raw word attached to the site with row-major index ``k`` inside the
sampled region is ``mix64(K + GAMMA * k)``.  The 53-bit uniform variate of
the site is the top 53 bits of that word.  Consequences:

* any site's variate is computable in O(1), independent of iteration
  order or of which other sites are generated;
* the stream depends only on (seed, replica, region, site), never on
  numpy internals, so it is stable across library versions;
* a configuration is a pure function of (field, region, seed, replica).

A site is occupied iff ``u53 < T(p)`` where ``T(p) = ceil(p * 2**53)`` is
computed in exact integer arithmetic.  For the gradient field the row
probability is the rational (N - j) / (2N), so the rows j = -N and j = +N
get thresholds 2**53 and 0: deterministically occupied resp. vacant, with
no dependence on the random stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import _kernels
from .lattice import Region, Site

_U53 = 1 << 53


@dataclass(frozen=True)
class ProbabilityField:
    """Per-site occupation probability, homogeneous or gradient.

    ``kind`` is "homogeneous" (constant ``p``) or "gradient"
    (``p(z) = 1/2 - z.j / (2N)`` clipped to [0, 1], per the model where the
    strip bottom row y = -N is surely occupied and the top row surely
    vacant).
    """

    kind: str
    p: float | None = None
    N: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "homogeneous":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError("homogeneous field needs p in [0, 1]")
        elif self.kind == "gradient":
            if self.N is None or self.N < 1:
                raise ValueError("gradient field needs N >= 1")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    def prob(self, z: Site) -> float:
        """Occupation probability of site ``z``."""
        if self.kind == "homogeneous":
            return self.p
        y = z[1]
        return float(min(max(Fraction(self.N - y, 2 * self.N), 0), 1))

    def row_threshold(self, j: int) -> int:
        """Exact 53-bit acceptance threshold for a site in row ``j``."""
        if self.kind == "homogeneous":
            num, den = self.p.as_integer_ratio()
        else:
            frac = min(max(Fraction(self.N - j, 2 * self.N), 0), 1)
            num, den = frac.numerator, frac.denominator
        return -((-num * _U53) // den)  # ceil(p * 2**53)

    def thresholds(self, region: Region) -> np.ndarray:
        """Per-row thresholds over ``region`` as a uint64 column vector."""
        ts = [self.row_threshold(j) for j in range(region.b1, region.b2 + 1)]
        return np.array(ts, dtype=np.uint64).reshape(-1, 1)

    def descriptor(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "homogeneous":
            d["p"] = self.p
        else:
            d["N"] = self.N
        return d

    @classmethod
    def from_descriptor(cls, d: dict) -> "ProbabilityField":
        return cls(kind=d["kind"], p=d.get("p"), N=d.get("N"))


def homogeneous_field(p: float) -> ProbabilityField:
    return ProbabilityField(kind="homogeneous", p=float(p))


def gradient_field(N: int) -> ProbabilityField:
    """Field with p(z) = 1/2 - z.j/(2N); bottom row occupied, top vacant."""
    if N < 1:
        raise ValueError("gradient half-width N must be >= 1")
    return ProbabilityField(kind="gradient", N=int(N))


@dataclass(frozen=True)
class Provenance:
    field: dict
    seed: int
    replica: int


@dataclass
class Configuration:
    """Occupancy over a region plus the provenance to regenerate it.

    ``occupied[r, c]`` is the site (region.a1 + c, region.b1 + r); axis 0
    is the j (row) axis, matching row-major site indexing.
    """

    region: Region
    occupied: np.ndarray
    provenance: Provenance | None = None

    def __post_init__(self) -> None:
        expect = (self.region.nrows, self.region.ncols)
        if self.occupied.shape != expect:
            raise ValueError(f"occupancy shape {self.occupied.shape} != {expect}")
        if self.occupied.dtype != np.bool_:
            self.occupied = self.occupied.astype(bool)

    def occupied_at(self, z: Site) -> bool:
        if not self.region.contains(z):
            raise ValueError(f"site {z} outside region {self.region}")
        return bool(self.occupied[z[1] - self.region.b1, z[0] - self.region.a1])

    def subgrid(self, sub: Region) -> np.ndarray:
        """Occupancy view over a subregion (rows = j, cols = i)."""
        if not self.region.contains_region(sub):
            raise ValueError(f"{sub} not contained in {self.region}")
        r0 = sub.b1 - self.region.b1
        c0 = sub.a1 - self.region.a1
        return self.occupied[r0:r0 + sub.nrows, c0:c0 + sub.ncols]

    # -- serialization: binary dump + JSON sidecar ------------------------

    def to_bytes(self) -> bytes:
        """Region bounds as 4 little-endian int64, then the bitset packed
        8 sites per byte, row-major, bit k%8 of byte k//8."""
        head = np.array([self.region.a1, self.region.a2,
                         self.region.b1, self.region.b2],
                        dtype="<i8").tobytes()
        bits = np.packbits(self.occupied.reshape(-1), bitorder="little")
        return head + bits.tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes,
                   provenance: Provenance | None = None) -> "Configuration":
        bounds = np.frombuffer(blob[:32], dtype="<i8")
        region = Region(*[int(x) for x in bounds])
        bits = np.frombuffer(blob[32:], dtype=np.uint8)
        flat = np.unpackbits(bits, bitorder="little")[:region.nsites]
        occ = flat.astype(bool).reshape(region.nrows, region.ncols)
        return cls(region=region, occupied=occ, provenance=provenance)

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.write_bytes(self.to_bytes())
        side = {"region": [self.region.a1, self.region.a2,
                           self.region.b1, self.region.b2]}
        if self.provenance is not None:
            side["provenance"] = {
                "field": self.provenance.field,
                "seed": self.provenance.seed,
                "replica": self.provenance.replica,
            }
        path.with_suffix(path.suffix + ".json").write_text(
            json.dumps(side, sort_keys=True, indent=1) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Configuration":
        path = Path(path)
        prov = None
        sidecar = path.with_suffix(path.suffix + ".json")
        if sidecar.exists():
            side = json.loads(sidecar.read_text())
            if "provenance" in side:
                pj = side["provenance"]
                prov = Provenance(field=pj["field"], seed=pj["seed"],
                                  replica=pj["replica"])
        return cls.from_bytes(path.read_bytes(), provenance=prov)


def _u53_grid(region: Region, seed: int, replica: int) -> np.ndarray:
    key = _kernels.stream_key(int(seed), int(replica))
    raw = _kernels.raw_stream(key, 0, region.nsites)
    return (raw >> np.uint64(11)).reshape(region.nrows, region.ncols)


def site_u53(region: Region, seed: int, replica: int, z: Site) -> int:
    """The single site's uniform variate, computed in O(1)."""
    key = _kernels.stream_key(int(seed), int(replica))
    return int(_kernels.raw_stream(key, region.site_index(z), 1)[0] >> 11)


def sample(field: ProbabilityField, region: Region,
           seed: int, replica: int = 0) -> Configuration:
    """Independent occupancy with per-site probability ``field.prob``.

    Fully determined by (field, region, seed, replica); see the module
    docstring for the stream contract.
    """
    u = _u53_grid(region, seed, replica)
    occ = u < field.thresholds(region)
    return Configuration(region=region, occupied=occ,
                         provenance=Provenance(field=field.descriptor(),
                                               seed=int(seed),
                                               replica=int(replica)))


def sample_coupled(p_list: list[float], region: Region,
                   seed: int, replica: int = 0) -> list[Configuration]:
    """Monotone coupling: one uniform per site, thresholded at each p.

    ``p_list`` must be sorted ascending; the occupied sets are then nested
    ascending, pathwise.
    """
    if any(b < a for a, b in zip(p_list, p_list[1:])):
        raise ValueError("p_list must be sorted ascending")
    u = _u53_grid(region, seed, replica)
    out = []
    for p in p_list:
        fld = homogeneous_field(p)
        occ = u < fld.thresholds(region)
        out.append(Configuration(region=region, occupied=occ,
                                 provenance=Provenance(field=fld.descriptor(),
                                                       seed=int(seed),
                                                       replica=int(replica))))
    return out


@dataclass(frozen=True)
class StripSpec:
    """Gradient strip of height 2N+1 (rows -N..N) and columns 0..ell."""

    N: int
    ell: int

    def __post_init__(self) -> None:
        if self.N < 1 or self.ell < 1:
            raise ValueError("strip needs N >= 1 and ell >= 1")

    @property
    def region(self) -> Region:
        return Region(0, self.ell, -self.N, self.N)

    @property
    def field(self) -> ProbabilityField:
        return gradient_field(self.N)


def sample_strip(spec: StripSpec, seed: int, replica: int = 0) -> Configuration:
    """Gradient configuration on the strip; bottom row all occupied and
    top row all vacant by construction."""
    return sample(spec.field, spec.region, seed, replica)
