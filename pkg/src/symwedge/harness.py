"""Empirical verification: seeded sampling, measured gradient bounds,
sup-error scans, invariance suites, convergence sweeps.

Everything here is deterministic given (seed, inputs). Sampling uses a
counter-based bit generator (Philox) keyed directly by the seed, so sample
sets regenerate bit-identically across runs and machines.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import permutations as _all_permutations
from typing import Callable, Sequence

import numpy as np

from .core import (
    Configuration,
    DomainSpec,
    Permutation,
    Symmetry,
    TargetFunction,
    parity,
    permute,
)
from .errors import DomainError
from .lattice import DEFAULT_WEDGE_CAP, LatticeSpec
from .approx_sym import (
    MODE_INDICATOR,
    MODE_SMOOTH,
    SymmetricTabulator,
    build_sym,
    delta_for_epsilon,
    error_budget,
    eval_sym,
)
from .approx_antisym import (
    MODE_PROJECTED,
    MODE_RANK,
    AntisymTabulator,
    build_antisym,
    eval_antisym,
    vandermonde_product,
)

__all__ = [
    "SampleSet",
    "sample_configurations",
    "gradient_bound_estimate",
    "sup_error",
    "invariance_suite",
    "SweepRow",
    "SweepResult",
    "convergence_sweep",
    "cauchy_factor_check",
    "CheckResult",
    "VerificationReport",
    "run_verification",
    "DEFAULT_FD_STEP_FRACTION",
]

DEFAULT_FD_STEP_FRACTION = 1e-4
BOUND_SLACK = 1e-12
CONSTANT_ERROR_FLOOR = 1e-12
_PERM_SEED_SALT = 0x9E3779B97F4A7C15  # decorrelates permutation draws from sample draws


@dataclass(frozen=True)
class SampleSet:
    """Configurations drawn i.i.d. uniformly from the domain box."""

    domain: DomainSpec
    seed: int
    count: int
    configurations: tuple[Configuration, ...]


def sample_configurations(domain: DomainSpec, count: int, seed: int) -> SampleSet:
    """Draw ``count`` configurations, deterministic in ``seed``."""
    if count < 1:
        raise ValueError(f"need at least one sample, got {count}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    raw = domain.lo + domain.span * rng.random((count, domain.N, domain.d))
    configurations = tuple(Configuration.from_rows(rows) for rows in raw.tolist())
    return SampleSet(domain=domain, seed=seed, count=count, configurations=configurations)


def gradient_bound_estimate(
    f: Callable[[Configuration], float], S: SampleSet, h: float | None = None
) -> float:
    """Max over samples of the Euclidean norm of the central-difference
    gradient (all N*d slots), with samples clipped to the interior so the
    stencil stays inside the domain."""
    domain = S.domain
    if h is None:
        h = DEFAULT_FD_STEP_FRACTION * domain.span
    if not 0.0 < h < domain.span / 2.0:
        raise ValueError(f"step {h} incompatible with span {domain.span}")
    lo, hi = domain.lo + h, domain.hi - h
    two_h = 2.0 * h
    best = 0.0
    for X in S.configurations:
        rows = [list(p.coords) for p in X.points]
        for i, row in enumerate(rows):
            for a, c in enumerate(row):
                rows[i][a] = min(max(c, lo), hi)
        norm2 = 0.0
        for i in range(len(rows)):
            for a in range(len(rows[i])):
                c = rows[i][a]
                rows[i][a] = c + h
                up = f(Configuration.from_rows(rows))
                rows[i][a] = c - h
                down = f(Configuration.from_rows(rows))
                rows[i][a] = c
                g = (up - down) / two_h
                if not math.isfinite(g):
                    raise ValueError(f"non-finite derivative at slot ({i}, {a})")
                norm2 += g * g
        best = max(best, math.sqrt(norm2))
    return best


def sup_error(
    f: Callable[[Configuration], float],
    approx: Callable[[Configuration], float],
    S: SampleSet,
) -> tuple[float, Configuration]:
    """Largest sampled |f - approx| and the configuration attaining it."""
    best = -1.0
    arg = S.configurations[0]
    for X in S.configurations:
        err = abs(f(X) - approx(X))
        if err > best:
            best = err
            arg = X
    return best, arg


def _random_permutations(N: int, count: int, seed: int) -> list[Permutation]:
    rng = np.random.Generator(np.random.Philox(key=seed))
    return [Permutation(tuple(int(i) for i in rng.permutation(N))) for _ in range(count)]


def invariance_suite(
    evaluator: Callable[[Configuration], float],
    S: SampleSet,
    n_perms: int,
    symmetry: Symmetry,
    seed: int | None = None,
) -> float:
    """Max residual of the declared permutation law over seeded random
    permutations: |e(sigma X) - e(X)| for symmetric evaluators,
    |e(sigma X) - sign(sigma) e(X)| for anti-symmetric ones."""
    if n_perms < 1:
        raise ValueError("need at least one permutation per sample")
    if symmetry is Symmetry.NONE:
        raise ValueError("no invariance law to test for an asymmetric evaluator")
    if seed is None:
        seed = S.seed ^ _PERM_SEED_SALT
    N = S.domain.N
    worst = 0.0
    for k, X in enumerate(S.configurations):
        base = evaluator(X)
        for sigma in _random_permutations(N, n_perms, seed + k):
            permuted = evaluator(permute(X, sigma))
            if symmetry is Symmetry.SYMMETRIC:
                residual = abs(permuted - base)
            else:
                residual = abs(permuted - parity(sigma) * base)
            worst = max(worst, residual)
    return worst


@dataclass(frozen=True)
class SweepRow:
    delta: float
    sup_error: float
    bound: float
    wedge_count: int
    M: int
    wall_time_s: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    slope: float | None
    gradient_bound: float


def convergence_sweep(
    f: TargetFunction,
    domain: DomainSpec,
    deltas: Sequence[float],
    S: SampleSet,
    cap: int = DEFAULT_WEDGE_CAP,
    threads: int = 1,
) -> SweepResult:
    """Build one indicator tabulator per spacing and fit the log-log slope
    of the sampled sup error against the spacing.

    Spacings must be given in strictly descending order (at least three).
    Rows at or below the constant-function floor of 1e-12 are excluded from
    the fit; if fewer than two rows remain the slope is undefined.
    """
    deltas = [float(v) for v in deltas]
    if len(deltas) < 3:
        raise ValueError("need at least three spacings")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("spacings must be strictly descending")
    L_hat = gradient_bound_estimate(f, S)
    rows = []
    for delta in deltas:
        start = time.perf_counter()
        spec = LatticeSpec.from_domain(domain, delta)
        if f.declared_symmetry is Symmetry.SYMMETRIC:
            tab = build_sym(f, spec, domain.N, cap=cap, threads=threads)
            approx = lambda X, tab=tab: eval_sym(tab, X)
        elif f.declared_symmetry is Symmetry.ANTISYMMETRIC:
            tab = build_antisym(f, spec, domain.N, mode=MODE_RANK, cap=cap, threads=threads)
            approx = lambda X, tab=tab: eval_antisym(tab, X)
        else:
            raise ValueError("sweep needs a target with a declared symmetry")
        err, _ = sup_error(f, approx, S)
        elapsed = time.perf_counter() - start
        rows.append(
            SweepRow(
                delta=delta,
                sup_error=err,
                bound=error_budget(delta, domain.N, domain.d, L_hat).bound if L_hat > 0 else 0.0,
                wedge_count=tab.stats.wedge_count,
                M=tab.stats.wedge_count * (1 << domain.N),
                wall_time_s=elapsed,
            )
        )
    fit = [(r.delta, r.sup_error) for r in rows if r.sup_error > CONSTANT_ERROR_FLOOR]
    if len(fit) >= 2:
        xs = np.log([p[0] for p in fit])
        ys = np.log([p[1] for p in fit])
        slope = float(np.polyfit(xs, ys, 1)[0])
    else:
        slope = None
    return SweepResult(rows=tuple(rows), slope=slope, gradient_bound=L_hat)


def cauchy_factor_check(
    f: Callable[[Configuration], float], S: SampleSet, min_gap: float
) -> float:
    """For d = 1 anti-symmetric targets: divide out the pair-difference
    product and measure how far the quotient is from permutation invariance,
    over samples whose points are pairwise at least min_gap apart."""
    if S.domain.d != 1:
        raise ValueError("the factor check is defined for d = 1 only")
    if min_gap <= 0.0:
        raise ValueError("min_gap must be positive")
    kept = []
    for X in S.configurations:
        xs = [p.coords[0] for p in X.points]
        gap = min(
            (abs(a - b) for i, a in enumerate(xs) for b in xs[i + 1 :]),
            default=math.inf,
        )
        if gap >= min_gap:
            kept.append((X, xs))
    if not kept:
        raise ValueError(f"no sample is diagonal-free at min_gap = {min_gap}")
    N = S.domain.N
    perms = [Permutation(p) for p in _all_permutations(range(N))]
    worst = 0.0
    for X, xs in kept:
        base = f(X) / vandermonde_product(xs)
        for sigma in perms:
            Y = permute(X, sigma)
            quotient = f(Y) / vandermonde_product([p.coords[0] for p in Y.points])
            worst = max(worst, abs(quotient - base))
    return worst


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    """Everything one verification run measured, plus pass/fail bookkeeping."""

    target: str
    kind: str
    d: int
    N: int
    delta: float
    samples: int
    seed: int
    gradient_bound: float
    sup_error: float
    argmax_configuration: Configuration
    bound: float
    bound_satisfied: bool
    invariance_max_residual: float
    cauchy_residual: float | None
    slope: float | None
    wall_time_s: float
    checks: tuple[CheckResult, ...]

    def __post_init__(self) -> None:
        expected = self.sup_error <= self.bound + BOUND_SLACK
        if self.bound_satisfied != expected:
            raise ValueError("bound_satisfied is inconsistent with sup_error and bound")

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def run_verification(
    f: TargetFunction,
    domain: DomainSpec,
    delta: float | None = None,
    epsilon: float | None = None,
    construction: str = MODE_RANK,
    smooth_width: float | None = None,
    tau: float = 1e-3,
    samples: int = 10000,
    seed: int = 0,
    n_perms: int = 8,
    min_gap: float = 0.05,
    fd_step: float | None = None,
    cap: int = DEFAULT_WEDGE_CAP,
    threads: int = 1,
):
    """Build one tabulator and run the full measurement suite against it.

    Exactly one of ``delta``/``epsilon`` must be given; an accuracy target
    is converted to a spacing through the measured gradient bound. Returns
    (report, tabulator).
    """
    if (delta is None) == (epsilon is None):
        raise ValueError("give exactly one of delta and epsilon")
    start = time.perf_counter()
    S = sample_configurations(domain, samples, seed)
    L_hat = gradient_bound_estimate(f, S, h=fd_step)
    if delta is None:
        if L_hat <= 0.0:
            raise ValueError("measured gradient bound is zero; cannot size the lattice")
        delta = delta_for_epsilon(epsilon, domain.N, domain.d, L_hat)
    spec = LatticeSpec.from_domain(domain, delta)

    scale = 1.0
    for X in S.configurations:
        scale = max(scale, abs(f(X)))
    target_residual = invariance_suite(f, S, n_perms, f.declared_symmetry) / scale

    if f.declared_symmetry is Symmetry.SYMMETRIC:
        mode = MODE_SMOOTH if smooth_width is not None else MODE_INDICATOR
        tab = build_sym(f, spec, domain.N, mode=mode, smooth_width=smooth_width,
                        cap=cap, threads=threads)
        approx = lambda X: eval_sym(tab, X)
        kind = "sym"
        indicator = mode == MODE_INDICATOR
    elif f.declared_symmetry is Symmetry.ANTISYMMETRIC:
        tab = build_antisym(f, spec, domain.N, mode=construction, tau=tau,
                            smooth_width=smooth_width, cap=cap, threads=threads)
        approx = lambda X: eval_antisym(tab, X)
        kind = "antisym-c1" if construction == MODE_RANK else "antisym-c2"
        indicator = smooth_width is None
    else:
        raise ValueError("verification needs a target with a declared symmetry")

    sup, arg = sup_error(f, approx, S)
    budget = error_budget(delta, domain.N, domain.d, L_hat).bound if L_hat > 0 else 0.0
    invariance = invariance_suite(approx, S, n_perms, f.declared_symmetry)
    cauchy = None
    if f.declared_symmetry is Symmetry.ANTISYMMETRIC and domain.d == 1:
        cauchy = cauchy_factor_check(f, S, min_gap)

    checks = [
        CheckResult("target_symmetry_residual", target_residual, 1e-12, target_residual <= 1e-12),
        CheckResult("sup_error_within_budget", sup, budget + BOUND_SLACK, sup <= budget + BOUND_SLACK),
        CheckResult(
            "invariance_residual",
            invariance,
            0.0 if indicator else 1e-12,
            invariance <= (0.0 if indicator else 1e-12),
        ),
    ]
    if cauchy is not None:
        checks.append(CheckResult("cauchy_factor_residual", cauchy, 1e-9, cauchy <= 1e-9))

    report = VerificationReport(
        target=f.name,
        kind=kind,
        d=domain.d,
        N=domain.N,
        delta=delta,
        samples=samples,
        seed=seed,
        gradient_bound=L_hat,
        sup_error=sup,
        argmax_configuration=arg,
        bound=budget,
        bound_satisfied=sup <= budget + BOUND_SLACK,
        invariance_max_residual=invariance,
        cauchy_residual=cauchy,
        slope=None,
        wall_time_s=time.perf_counter() - start,
        checks=tuple(checks),
    )
    return report, tab
