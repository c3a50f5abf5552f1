"""Characteristic length, log-log exponent fitting, experiment drivers.

The characteristic length L(p, eps0) is the smallest box size at which
the crossing probability drops to eps0 (occupied crossings below one
half, vacant above).  It is located by geometric doubling followed by
integer bisection; every probe is decided only when the Monte Carlo
estimate clears eps0 by a confidence margin, doubling the sample budget
until it does.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .connectivity import CrossingEstimate, CrossingQuery, crossing_probability
from .front import extract_front, front_stats, outer_boundary
from .lattice import Region
from .sampling import StripSpec, homogeneous_field, sample_strip


@dataclass(frozen=True)
class CharLengthParams:
    """Tuning knobs for the L(p) search."""

    eps0: float = 0.05
    samples: int = 1000            # per probe, before adaptive doubling
    confidence: float = 4.0        # margin in standard errors
    max_samples: int = 64000
    probe_cap: int = 4096

    def __post_init__(self) -> None:
        if not 0.0 < self.eps0 < 0.5:
            raise ValueError("eps0 must lie in (0, 1/2)")


@dataclass
class CharLengthResult:
    L: int | None
    beyond_horizon: bool
    p: float
    eps0: float
    probes: dict[int, CrossingEstimate]

    def diagnostics(self) -> dict:
        out = {"p": self.p, "eps0": self.eps0,
               "beyond_horizon": self.beyond_horizon, "L": self.L}
        if self.L is not None:
            lo = self.probes.get(self.L - 1)
            hi = self.probes.get(self.L)
            out["estimate_at_L"] = None if hi is None else hi.estimate
            out["estimate_at_L_minus_1"] = None if lo is None else lo.estimate
        return out


def _charlen_query(p: float, n: int) -> CrossingQuery:
    color = "occupied" if p < 0.5 else "vacant"
    return CrossingQuery(region=Region(0, n, 0, n),
                         orientation="horizontal", color=color)


def characteristic_length(p: float, params: CharLengthParams = CharLengthParams(),
                          seed: int = 0) -> CharLengthResult:
    """Smallest probed n whose crossing-probability estimate clears eps0
    by the confidence margin, refined by integer bisection.

    A probe counts as above eps0 when it cannot be certified below even
    at the maximum sample budget (the true value may graze eps0, where a
    two-sided margin decision is undecidable).  At p = 1/2, or whenever
    no probe up to the cap certifies below, the result is the
    beyond-horizon sentinel with L = None.
    """
    probes: dict[int, CrossingEstimate] = {}
    counter = [0]

    def estimate(n: int) -> tuple[str, CrossingEstimate]:
        """Decide 'below'/'above' eps0 at margin, doubling samples."""
        budget = params.samples
        while True:
            counter[0] += 1
            est = crossing_probability(homogeneous_field(p),
                                       _charlen_query(p, n),
                                       budget, seed + 7919 * counter[0])
            probes[n] = est
            margin = params.confidence * est.stderr
            if est.estimate + margin <= params.eps0:
                return "below", est
            if est.estimate - margin >= params.eps0:
                return "above", est
            if budget >= params.max_samples:
                return "ambiguous", est
            budget = min(2 * budget, params.max_samples)

    # geometric doubling until the threshold brackets
    lo = None
    hi = None
    n = 4
    while n <= params.probe_cap:
        verdict, _ = estimate(n)
        if verdict == "below":
            hi = n
            break
        lo = n
        n *= 2
    if hi is None:
        return CharLengthResult(L=None, beyond_horizon=True, p=p,
                                eps0=params.eps0, probes=probes)
    if lo is None:
        lo = max(1, hi // 2)  # crossing already below at the first probe

    # integer bisection; invariant: lo above, hi below
    while hi - lo > 1:
        mid = (lo + hi) // 2
        verdict, _ = estimate(mid)
        if verdict == "below":
            hi = mid
        else:
            lo = mid
    if lo not in probes:
        estimate(lo)
    return CharLengthResult(L=hi, beyond_horizon=False, p=p,
                            eps0=params.eps0, probes=probes)


@dataclass
class ExponentFit:
    """Least-squares slope on (log x, log y) with a points bootstrap CI."""

    slope: float
    intercept: float
    stderr: float
    bootstrap_ci: tuple[float, float]
    points: list[tuple[float, float, float]]  # (x, y, weight)


def _wols(lx: np.ndarray, ly: np.ndarray, w: np.ndarray) -> tuple[float, float, float]:
    W = w.sum()
    mx = (w * lx).sum() / W
    my = (w * ly).sum() / W
    sxx = (w * (lx - mx) ** 2).sum()
    slope = (w * (lx - mx) * (ly - my)).sum() / sxx
    intercept = my - slope * mx
    resid = ly - (intercept + slope * lx)
    dof = max(len(lx) - 2, 1)
    s2 = (w * resid ** 2).sum() / dof
    return float(slope), float(intercept), float(math.sqrt(s2 / sxx))


def fit_exponent(points: list[tuple[float, float]],
                 weights: list[float] | None = None,
                 n_boot: int = 2000, seed: int = 12345) -> ExponentFit:
    """OLS of log y on log x; weights default to 1 (use 1/stderr(log y)**2
    when the points carry Monte Carlo errors)."""
    if len(points) < 3:
        raise ValueError("need at least 3 points to fit an exponent")
    xs = np.array([q[0] for q in points], dtype=float)
    ys = np.array([q[1] for q in points], dtype=float)
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("points must be positive for a log-log fit")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("x values must be strictly increasing")
    w = np.ones_like(xs) if weights is None else np.asarray(weights, float)
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept, stderr = _wols(lx, ly, w)

    rng = np.random.default_rng(seed)
    slopes = []
    k = len(xs)
    while len(slopes) < n_boot:
        idx = rng.integers(0, k, size=k)
        if np.unique(lx[idx]).size < 2:
            continue
        s, _, _ = _wols(lx[idx], ly[idx], w[idx])
        slopes.append(s)
    lo, hi = np.percentile(slopes, [2.5, 97.5])
    lo, hi = min(lo, slope), max(hi, slope)
    return ExponentFit(slope=slope, intercept=intercept, stderr=stderr,
                       bootstrap_ci=(float(lo), float(hi)),
                       points=[(float(x), float(y), float(ww))
                               for x, y, ww in zip(xs, ys, w)])


def _lack_of_fit(points, se_log, fit: ExponentFit) -> float:
    """Chi-square per dof of the log-log residuals against known errors."""
    xs = np.array([q[0] for q in points])
    ys = np.array([q[1] for q in points])
    se = np.asarray(se_log, float)
    resid = np.log(ys) - (fit.intercept + fit.slope * np.log(xs))
    return float(((resid / se) ** 2).sum()) / max(len(points) - 2, 1)


def fit_with_small_scale_check(points: list[tuple[float, float]],
                               weights: list[float] | None = None,
                               seed: int = 12345,
                               chi2_per_dof: float = 4.0
                               ) -> tuple[ExponentFit, ExponentFit | None]:
    """Primary fit plus, when the weighted lack-of-fit test fails, a refit
    without the smallest-scale point (finite-size corrections live there).
    """
    main = fit_exponent(points, weights, seed=seed)
    refit = None
    if weights is not None and len(points) >= 4:
        se_log = [1.0 / math.sqrt(w) for w in weights]
        if _lack_of_fit(points, se_log, main) > chi2_per_dof:
            refit = fit_exponent(points[1:], list(weights[1:]), seed=seed)
    return main, refit


def fit_scaling_window(points: list[tuple[float, float]],
                       se_log: list[float], seed: int = 12345,
                       chi2_per_dof: float = 4.0, min_points: int = 3
                       ) -> tuple[ExponentFit, ExponentFit, int]:
    """Scaling-window fit: discard the smallest scale, repeatedly, while
    the residuals are incompatible with the Monte Carlo errors.

    Pre-asymptotic curvature concentrates at small scales; the window
    selection uses the known per-point errors of log y, the slope inside
    the window comes from the plain (unweighted) log-log OLS.  Returns
    (full-range fit, window fit, number of points dropped).
    """
    full = fit_exponent(points, seed=seed)
    pts = list(points)
    ses = list(se_log)
    fit = full
    dropped = 0
    while len(pts) > min_points and _lack_of_fit(pts, ses, fit) > chi2_per_dof:
        pts = pts[1:]
        ses = ses[1:]
        dropped += 1
        fit = fit_exponent(pts, seed=seed)
    return full, fit, dropped


# ---------------------------------------------------------------------------
# experiment driver


_ELL_RULES = {
    "N": lambda N: N,
    "2N": lambda N: 2 * N,
}


def resolve_ell_rule(rule: str):
    """ell_N rules: 'N', '2N' or 'N^a' with a float exponent a."""
    if rule in _ELL_RULES:
        return _ELL_RULES[rule]
    if rule.startswith("N^"):
        a = float(rule[2:])
        return lambda N: max(1, round(N ** a))
    raise ValueError(f"unknown ell rule {rule!r}")


def validate_ell_rule(rule: str, sweep: list[int], delta: float = 0.01) -> None:
    """The strip length must satisfy ell_N >= N**(4/7 + delta) for every
    N of the sweep (and stay polynomially bounded); reject rules like
    sqrt(N) that produce short strips with several interfaces."""
    f = resolve_ell_rule(rule)
    for N in sweep:
        ell = f(N)
        if ell < N ** (4 / 7 + delta):
            raise ValueError(
                f"ell rule {rule!r} gives ell={ell} < N^(4/7+delta) at N={N}; "
                "the front is then not unique with positive probability")
        if ell > N ** 2:
            raise ValueError(f"ell rule {rule!r} exceeds the N^2 cap at N={N}")


@dataclass(frozen=True)
class ExperimentSpec:
    """A front-statistics sweep over N with ell_N given by a rule."""

    sweep: list[int]
    replicas: int
    seed: int
    ell_rule: str = "N"
    output: str | None = None

    def __post_init__(self) -> None:
        if not self.sweep:
            raise ValueError("empty sweep")
        if any(b <= a for a, b in zip(self.sweep, self.sweep[1:])):
            raise ValueError("sweep must be strictly increasing")
        if self.replicas < 1:
            raise ValueError("need at least one replica")
        validate_ell_rule(self.ell_rule, list(self.sweep))

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentSpec":
        data = json.loads(Path(path).read_text())
        try:
            return cls(sweep=list(data["sweep"]),
                       replicas=int(data["replicas"]),
                       seed=int(data["seed"]),
                       ell_rule=str(data.get("ell_rule", "N")),
                       output=data.get("output"))
        except KeyError as exc:
            raise ValueError(f"experiment spec missing field {exc}") from exc


#: per-replica CSV schema of the front experiment
SAMPLE_COLUMNS = ("N", "ell", "seed", "replica", "front_length", "unique",
                  "mean_height", "std_height", "min_height", "max_height",
                  "u_plus_length", "u_minus_length")


def front_sample_row(N: int, ell: int, seed: int, replica: int) -> tuple:
    """Simulate one strip replica and produce its per-sample CSV row."""
    spec = StripSpec(N=N, ell=ell)
    c = sample_strip(spec, seed, replica)
    f = extract_front(c)
    st = front_stats(f, spec)
    up = outer_boundary(c, "upper")
    lo = outer_boundary(c, "lower")
    return (N, ell, seed, replica, f.length, int(f.unique),
            st.mean_height, st.std_height, st.min_height, st.max_height,
            up.length, lo.length)


@dataclass
class PointAggregate:
    """Per-replica records of one sweep point with exactly mergeable
    summaries: integer quantities are reduced with Python integer sums and
    float quantities with math.fsum, so every reported number is
    independent of replica order and of how batches were partitioned."""

    N: int
    ell: int
    lengths: list[int] = dc_field(default_factory=list)
    std_heights: list[float] = dc_field(default_factory=list)
    u_plus: list[int] = dc_field(default_factory=list)
    u_minus: list[int] = dc_field(default_factory=list)
    n_unique: int = 0

    def add_row(self, row: tuple) -> None:
        self.lengths.append(int(row[4]))
        self.n_unique += int(row[5])
        self.std_heights.append(float(row[7]))
        self.u_plus.append(int(row[10]))
        self.u_minus.append(int(row[11]))

    def merge(self, other: "PointAggregate") -> "PointAggregate":
        if (self.N, self.ell) != (other.N, other.ell):
            raise ValueError("cannot merge aggregates of different points")
        out = PointAggregate(self.N, self.ell)
        for src in (self, other):
            out.lengths += src.lengths
            out.std_heights += src.std_heights
            out.u_plus += src.u_plus
            out.u_minus += src.u_minus
            out.n_unique += src.n_unique
        return out

    @property
    def count(self) -> int:
        return len(self.lengths)

    @property
    def mean_T(self) -> float:
        return sum(self.lengths) / self.count

    @property
    def var_T(self) -> float:
        n = self.count
        if n < 2:
            return 0.0
        s = sum(self.lengths)
        s2 = sum(x * x for x in self.lengths)
        return (s2 - s * s / n) / (n - 1)

    def var_T_jackknife_se(self) -> float:
        """Jackknife standard error of the front-length variance."""
        n = self.count
        if n < 3:
            return float("nan")
        s = sum(self.lengths)
        s2 = sum(x * x for x in self.lengths)
        m = n - 1
        loo = [((s2 - x * x) - (s - x) ** 2 / m) / (m - 1)
               for x in self.lengths]
        mean_loo = math.fsum(loo) / n
        var_sum = math.fsum((u - mean_loo) ** 2 for u in loo)
        return math.sqrt((n - 1) / n * var_sum)

    @property
    def mean_std_height(self) -> float:
        return math.fsum(self.std_heights) / self.count

    @property
    def std_std_height(self) -> float:
        n = self.count
        if n < 2:
            return 0.0
        mean = math.fsum(self.std_heights) / n
        v = math.fsum((x - mean) ** 2 for x in self.std_heights) / (n - 1)
        return math.sqrt(max(v, 0.0))

    @property
    def mean_u_plus(self) -> float:
        return sum(self.u_plus) / self.count

    @property
    def mean_u_minus(self) -> float:
        return sum(self.u_minus) / self.count

    @property
    def unique_fraction(self) -> float:
        return self.n_unique / self.count

    def summary_row(self) -> tuple:
        return (self.N, self.ell, self.count, self.mean_T, self.var_T,
                self.var_T_jackknife_se(), self.mean_std_height,
                self.std_std_height, self.mean_u_plus, self.mean_u_minus,
                self.unique_fraction)


SUMMARY_COLUMNS = ("N", "ell", "replicas", "mean_front_length",
                   "var_front_length", "var_front_length_jackknife_se",
                   "mean_std_height", "std_std_height",
                   "mean_u_plus", "mean_u_minus", "unique_fraction")


def run_front_experiment(spec: ExperimentSpec,
                         replica_range: tuple[int, int] | None = None,
                         collect_rows: bool = False, threads: int = 1
                         ) -> tuple[list[PointAggregate], list[tuple]]:
    """Run the sweep; fully determined by (spec, replica_range).

    Replica r of sweep point k draws from the stream
    (spec.seed, k * 2**32 + r), so partitioning the replica range across
    runs or workers and merging aggregates reproduces the full run
    exactly.  With ``threads`` > 1 replicas are computed by a worker pool
    and still aggregated in replica order.
    """
    from concurrent.futures import ThreadPoolExecutor

    ell_of = resolve_ell_rule(spec.ell_rule)
    r0, r1 = replica_range if replica_range is not None else (0, spec.replicas)
    aggs = []
    rows = []
    for k, N in enumerate(spec.sweep):
        ell = ell_of(N)
        agg = PointAggregate(N=N, ell=ell)
        replicas = [(k << 32) + r for r in range(r0, r1)]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                point_rows = list(ex.map(
                    lambda rep: front_sample_row(N, ell, spec.seed, rep),
                    replicas))
        else:
            point_rows = [front_sample_row(N, ell, spec.seed, rep)
                          for rep in replicas]
        for row in point_rows:
            agg.add_row(row)
            if collect_rows:
                rows.append(row)
        aggs.append(agg)
    return aggs, rows


# ---------------------------------------------------------------------------
# near-critical consistency relations


@dataclass
class NearCriticalReport:
    """Raw numbers behind the near-critical bounded-ratio checks."""

    p_list: list[float]
    L: dict[float, int]
    eq10_products: dict[float, float]
    decay_estimates: dict[float, dict[int, float]]   # p -> {k: P at n=k*L}
    charlen_ratios: dict[float, float]               # L(p, e0) / L(p, e0/2)
    two_arm_ratios: dict[float, float]               # P_p / P_half at n<=L

    def eq10_spread(self) -> float:
        vals = list(self.eq10_products.values())
        return max(vals) / min(vals)

    def decay_factor(self, p: float) -> float:
        d = self.decay_estimates[p]
        return d[1] / d[3] if d[3] > 0 else math.inf


def check_near_critical_relations(p_list: list[float],
                                  params: CharLengthParams = CharLengthParams(),
                                  seed: int = 0,
                                  arm_samples: int = 20000,
                                  decay_samples: int = 20000,
                                  two_arm_samples: int = 20000
                                  ) -> NearCriticalReport:
    """Estimate the near-critical relations on the subcritical side:

    (a) |p - 1/2| L(p)^2 P_half(A4(1, L(p))) across p (bounded spread);
    (b) square-crossing probability at n = k L(p), k = 1, 2, 3 (decay
        by at least e between k = 1 and 3);
    (c) L(p, eps0) / L(p, eps0/2) (bounded);
    (d) two-arm probability at p versus at 1/2 for n = L(p) // 2
        (bounded ratio).
    """
    from .arms import ArmQuery, arm_probability, TwoArmQuery, has_two_arms
    from .sampling import sample as sample_cfg

    if any(p >= 0.5 for p in p_list):
        raise ValueError("p_list must be on the subcritical side (p < 1/2)")

    L: dict[float, int] = {}
    eq10: dict[float, float] = {}
    decay: dict[float, dict[int, float]] = {}
    ratios_L: dict[float, float] = {}
    ratios_arm: dict[float, float] = {}

    half_params = CharLengthParams(eps0=params.eps0 / 2,
                                   samples=params.samples,
                                   confidence=params.confidence,
                                   max_samples=params.max_samples,
                                   probe_cap=params.probe_cap)

    for idx, p in enumerate(p_list):
        res = characteristic_length(p, params, seed=seed + 1000 * idx)
        if res.beyond_horizon:
            raise RuntimeError(f"L({p}) beyond probe cap; not MC-reachable")
        Lp = res.L
        L[p] = Lp

        arm = arm_probability(0.5, ArmQuery(center=(0, 0), m=1, n=Lp, j=4),
                              arm_samples, seed=seed + 1000 * idx + 1)
        eq10[p] = abs(p - 0.5) * Lp ** 2 * arm.estimate

        decay[p] = {}
        for k in (1, 2, 3):
            est = crossing_probability(homogeneous_field(p),
                                       _charlen_query(p, k * Lp),
                                       decay_samples,
                                       seed=seed + 1000 * idx + 10 + k)
            decay[p][k] = est.estimate

        res_half = characteristic_length(p, half_params,
                                         seed=seed + 1000 * idx + 20)
        ratios_L[p] = (res_half.L / Lp) if res_half.L else math.inf

        n_arm = max(2, Lp // 2)
        qa = TwoArmQuery(site=(0, 0), region=Region(-n_arm - 1, n_arm + 1,
                                                    -n_arm - 1, n_arm + 1))
        hits_p = 0
        hits_half = 0
        fld_p = homogeneous_field(p)
        fld_half = homogeneous_field(0.5)
        for r in range(two_arm_samples):
            cp = sample_cfg(fld_p, qa.region, seed + 1000 * idx + 30, r)
            ch = sample_cfg(fld_half, qa.region, seed + 1000 * idx + 31, r)
            hits_p += has_two_arms(cp, qa)
            hits_half += has_two_arms(ch, qa)
        ratios_arm[p] = (hits_p / max(hits_half, 1)) if hits_half else math.inf

    return NearCriticalReport(p_list=list(p_list), L=L, eq10_products=eq10,
                              decay_estimates=decay, charlen_ratios=ratios_L,
                              two_arm_ratios=ratios_arm)
