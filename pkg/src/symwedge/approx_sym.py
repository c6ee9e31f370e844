"""Tabulated approximation of totally symmetric functions on a lattice wedge.

A tabulator stores f(Z)/C_Z per wedge entry Z, where C_Z is the entry's
repetition constant. Indicator-mode evaluation canonicalizes the input onto
the wedge and returns the stored value times C_Z, which makes permutation
invariance bit-exact. Smooth mode blends corner values with normalized
quintic cutoffs, trading the bit-exact lookup for continuity across cell
faces while keeping constants exact to rounding.

The same table can be evaluated through an explicit feature expansion
(log-sum features over slot subsets, recombined with alternating signs);
that route is the literal sum-of-2^N-features form and is kept as a slow
cross-check of the canonicalized path.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable

from .core import Configuration, Symmetry, TargetFunction
from .errors import BuildError, CapacityError, DomainError
from .lattice import (
    DEFAULT_WEDGE_CAP,
    LatticeSpec,
    WedgeKey,
    cell_of,
    center_configuration,
    corner_configuration,
    enumerate_wedge,
    locate,
    repetition_constant,
    site_weight_support,
    wedge_size,
)

__all__ = [
    "MODE_INDICATOR",
    "MODE_SMOOTH",
    "BuildStats",
    "SymmetricTabulator",
    "FeatureCountReport",
    "ErrorBudget",
    "build_sym",
    "eval_sym",
    "eval_sym_feature_form",
    "smooth_weights",
    "corner_values",
    "feature_count",
    "feature_budget_bound",
    "epsilon_density_limit",
    "error_budget",
    "delta_for_epsilon",
]

MODE_INDICATOR = "indicator"
MODE_SMOOTH = "smooth"
DEFAULT_FEATURE_CAP = 10**6


@dataclass(frozen=True)
class BuildStats:
    """Build metadata: work done and the lattice regime the table lives in.

    ``coarse_lattice`` flags spacings above N^(-1/d), where cells hold more
    than one point on average and the wedge no longer resolves the targets.
    """

    evaluations: int
    wedge_count: int
    coarse_lattice: bool
    wall_time_s: float


@dataclass(frozen=True)
class SymmetricTabulator:
    """A built table for one symmetric target on one lattice."""

    spec: LatticeSpec
    N: int
    mode: str
    smooth_width: float | None
    table: dict[WedgeKey, float]
    stats: BuildStats

    def corner_value(self, zs: WedgeKey) -> float:
        """f(Z) as the evaluator reproduces it: stored coefficient times C_Z."""
        return self.table[zs] * repetition_constant(zs)


def _validate_mode(spec: LatticeSpec, mode: str, smooth_width: float | None) -> None:
    if mode not in (MODE_INDICATOR, MODE_SMOOTH):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == MODE_SMOOTH:
        if smooth_width is None:
            raise ValueError("smooth mode needs a width")
        if not 0.0 < smooth_width <= spec.delta / 2.0:
            raise ValueError(
                f"need 0 < smooth_width <= delta/2 = {spec.delta / 2.0}, got {smooth_width}"
            )
    elif smooth_width is not None:
        raise ValueError("smooth_width only applies to smooth mode")


def corner_values(
    f: Callable[[Configuration], float],
    spec: LatticeSpec,
    N: int,
    cap: int = DEFAULT_WEDGE_CAP,
    threads: int = 1,
    keys: list[WedgeKey] | None = None,
    center: bool = False,
) -> Iterable[tuple[WedgeKey, float]]:
    """Evaluate f at every wedge entry's corner configuration, in wedge order.

    With threads > 1 the wedge is split into contiguous chunks evaluated
    concurrently and merged back in order, so the result is identical to the
    sequential walk. ``keys`` restricts the walk to a pre-filtered list of
    entries (the capacity cap is still checked against the full wedge).
    ``center`` samples box centers instead of corners.
    """
    if keys is None:
        entries = list(enumerate_wedge(spec, N, cap=cap))
    else:
        size = wedge_size(spec, N)
        if size > cap:
            raise CapacityError(
                f"wedge has {size} entries, above the cap of {cap}; rerun with cap >= {size}"
            )
        entries = keys
    at = center_configuration if center else corner_configuration

    def chunk_values(chunk: list[WedgeKey]) -> list[float]:
        return [f(at(spec, zs)) for zs in chunk]

    if threads <= 1 or len(entries) < 2 * threads:
        values = chunk_values(entries)
    else:
        step = (len(entries) + threads - 1) // threads
        chunks = [entries[i : i + step] for i in range(0, len(entries), step)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = [v for part in pool.map(chunk_values, chunks) for v in part]
    for zs, value in zip(entries, values):
        if not math.isfinite(value):
            raise BuildError(f"target returned non-finite value {value!r} at Z = {zs}")
        yield zs, value


def build_sym(
    f: TargetFunction,
    spec: LatticeSpec,
    N: int,
    mode: str = MODE_INDICATOR,
    smooth_width: float | None = None,
    cap: int = DEFAULT_WEDGE_CAP,
    threads: int = 1,
    center: bool = False,
) -> SymmetricTabulator:
    """Tabulate a symmetric target over the wedge.

    ``center`` switches the sampling site from the cell corner (the default,
    which makes eval exact at the corner itself) to the cell center, which
    roughly halves the worst-case constant at the cost of corner exactness.
    """
    if f.declared_symmetry is not Symmetry.SYMMETRIC:
        raise ValueError(
            f"build_sym needs a symmetric target, got {f.declared_symmetry.value!r}"
        )
    _validate_mode(spec, mode, smooth_width)
    start = time.perf_counter()
    table: dict[WedgeKey, float] = {}
    for zs, value in corner_values(f, spec, N, cap=cap, threads=threads, center=center):
        table[zs] = value / repetition_constant(zs)
    elapsed = time.perf_counter() - start
    stats = BuildStats(
        evaluations=len(table),
        wedge_count=len(table),
        coarse_lattice=spec.delta > N ** (-1.0 / spec.d),
        wall_time_s=elapsed,
    )
    return SymmetricTabulator(spec, N, mode, smooth_width, table, stats)


def _check_eval_input(T, X: Configuration) -> None:
    if X.N != T.N or X.d != T.spec.d:
        raise ValueError(
            f"tabulator is for N = {T.N}, d = {T.spec.d}; got N = {X.N}, d = {X.d}"
        )


def smooth_weights(spec: LatticeSpec, X: Configuration, w: float) -> dict[WedgeKey, float]:
    """Normalized box weights at X: each point spreads unit mass over its
    nearby cells, and products are aggregated per wedge entry. Values sum
    to one, making constants exact under smooth evaluation.

    Points are canonicalized (sorted by coordinates) before aggregation, so
    the result carries no trace of the input ordering.
    """
    pts = sorted(X.points, key=lambda p: p.coords)
    supports = [site_weight_support(spec, p, w) for p in pts]
    weights: dict[WedgeKey, float] = {}
    for combo in product(*supports):
        weight = 1.0
        for _, p in combo:
            weight *= p
        key = tuple(sorted(site for site, _ in combo))
        weights[key] = weights.get(key, 0.0) + weight
    return weights


def eval_sym(T: SymmetricTabulator, X: Configuration) -> float:
    """Evaluate the tabulator.

    Indicator mode locates X, so the result is a function of the wedge entry
    alone and permutation invariance holds bit-for-bit. Smooth mode blends
    the corner values of nearby entries with normalized cutoff weights; the
    blend is computed on the canonically sorted configuration, so it is
    equally order-blind.
    """
    _check_eval_input(T, X)
    if T.mode == MODE_INDICATOR:
        assignment = locate(T.spec, X)
        return T.table[assignment.wedge] * assignment.repetition
    total = 0.0
    for zs, weight in smooth_weights(T.spec, X, T.smooth_width).items():
        total += weight * (T.table[zs] * repetition_constant(zs))
    return total


def eval_sym_feature_form(
    T: SymmetricTabulator, X: Configuration, feature_cap: int = DEFAULT_FEATURE_CAP
) -> float:
    """Evaluate through the explicit feature expansion (indicator mode only).

    For each wedge entry Z and nonempty slot subset S the feature is
    y = sum_i log(#{j in S : x_i lies in cell Z_j}), pooled over input slots
    in input order; entries recombine as
    (-1)^N * sum_Z (f(Z)/C_Z) * sum_S (-1)^|S| exp(y).  Entries for which
    some point lies in none of Z's cells contribute exactly zero through the
    exp(-inf) sentinel and are skipped as written.
    """
    _check_eval_input(T, X)
    if T.mode != MODE_INDICATOR:
        raise ValueError("feature-form evaluation is defined for indicator mode only")
    N = T.N
    m = len(T.table) * (1 << N)
    if m > feature_cap:
        raise CapacityError(
            f"feature expansion has {m} features, above the cap of {feature_cap}; "
            f"rerun with feature_cap >= {m}"
        )
    cells = [cell_of(T.spec, p) for p in X.points]
    log_count = [0.0] * (N + 1)
    for c in range(1, N + 1):
        log_count[c] = math.log(c)
    total = 0.0
    for zs, coeff in T.table.items():
        site_set = set(zs)
        if any(c not in site_set for c in cells):
            continue  # every subset term is an exact zero for this entry
        acc = 0.0
        for mask in range(1, 1 << N):
            y = 0.0
            dead = False
            for c in cells:
                count = 0
                for j in range(N):
                    if mask >> j & 1 and zs[j] == c:
                        count += 1
                if count == 0:
                    dead = True
                    break
                y += log_count[count]
            if dead:
                continue
            term = math.exp(y)
            acc += -term if mask.bit_count() & 1 else term
        total += coeff * acc
    return -total if N & 1 else total


def epsilon_density_limit(N: int, d: int) -> float:
    """Largest accuracy target the construction supports: above
    sqrt(N*d) * N^(-1/d) the implied spacing would pack more than one point
    per cell on average."""
    return math.sqrt(N * d) * N ** (-1.0 / d)


def feature_budget_bound(N: int, d: int, epsilon: float) -> float:
    """Counting bound 2^N (N*d)^(N*d/2) / (epsilon^(N*d) N!) on the number
    of features needed at accuracy epsilon."""
    nd = N * d
    return 2.0**N * float(nd) ** (nd / 2.0) / (epsilon**nd * math.factorial(N))


@dataclass(frozen=True)
class FeatureCountReport:
    """Actual feature count of a table next to the counting bound.

    The two are reported side by side without reconciling constants; the
    bound ignores domain truncation and the actual count ignores entries
    that could be dropped as negligible.
    """

    wedge_count: int
    per_entry_features: int
    M: int
    epsilon: float
    L: float
    budget_bound: float
    exceeds_budget: bool
    spacing_within_budget: bool


def feature_count(T: SymmetricTabulator, epsilon: float, L: float) -> FeatureCountReport:
    """Feature accounting for a built table at accuracy epsilon and gradient bound L."""
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if L <= 0.0:
        raise ValueError("gradient bound must be positive")
    N, d = T.N, T.spec.d
    limit = epsilon_density_limit(N, d)
    if epsilon >= limit:
        raise ValueError(
            f"epsilon = {epsilon} is not below the density limit {limit} for N = {N}, d = {d}"
        )
    wedge_count = T.stats.wedge_count
    per_entry = 1 << N
    M = wedge_count * per_entry
    bound = feature_budget_bound(N, d, epsilon)
    return FeatureCountReport(
        wedge_count=wedge_count,
        per_entry_features=per_entry,
        M=M,
        epsilon=epsilon,
        L=L,
        budget_bound=bound,
        exceeds_budget=M > bound,
        spacing_within_budget=T.spec.delta * math.sqrt(N * d) * L <= epsilon,
    )


@dataclass(frozen=True)
class ErrorBudget:
    """Worst-case tabulation error delta * sqrt(N*d) * L for spacing delta,
    slot count N, dimension d, and gradient bound L."""

    delta: float
    N: int
    d: int
    L: float
    bound: float


def error_budget(delta: float, N: int, d: int, L: float) -> ErrorBudget:
    if delta <= 0.0 or L < 0.0:
        raise ValueError("need delta > 0 and L >= 0")
    if N < 1 or d < 1:
        raise ValueError("N and d must be at least 1")
    return ErrorBudget(delta=delta, N=N, d=d, L=L, bound=delta * math.sqrt(N * d) * L)


def delta_for_epsilon(epsilon: float, N: int, d: int, L: float) -> float:
    """Largest spacing whose error budget meets the accuracy epsilon."""
    if epsilon <= 0.0 or L <= 0.0:
        raise ValueError("epsilon and L must be positive")
    if N < 1 or d < 1:
        raise ValueError("N and d must be at least 1")
    return epsilon / (math.sqrt(N * d) * L)
