"""Shared domain types: points, configurations, permutations, target functions.

Conventions used throughout the package:

* Particle slots and permutation images are 0-indexed.
* Coordinates are plain 64-bit floats; no extended precision in hot paths.
* A "gradient bound" always means the Euclidean norm of the full
  N*d-component gradient of a target, viewed as a function on R^(N*d).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .errors import ConfigError

__all__ = [
    "Symmetry",
    "Point",
    "Configuration",
    "DomainSpec",
    "Permutation",
    "TargetFunction",
    "permute",
    "parity",
    "compose",
    "inverse",
    "builtin_target",
    "BUILTIN_TARGET_NAMES",
]


class Symmetry(enum.Enum):
    """Declared permutation behaviour of a target function."""

    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"
    NONE = "none"


@dataclass(frozen=True)
class Point:
    """One element x of R^d."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        coords = tuple(float(c) for c in self.coords)
        if not coords:
            raise ValueError("a point needs at least one coordinate")
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"non-finite coordinate: {coords!r}")
        object.__setattr__(self, "coords", coords)

    @property
    def d(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class Configuration:
    """An ordered tuple of N points; the argument of every target function.

    The ordering carries meaning only up to the declared symmetry of the
    function being evaluated; the type itself is plain ordered data.
    """

    points: tuple[Point, ...]

    def __post_init__(self) -> None:
        points = tuple(self.points)
        if not points:
            raise ValueError("a configuration needs at least one point")
        d = points[0].d
        if any(p.d != d for p in points):
            raise ValueError("all points of a configuration must share one dimension")
        object.__setattr__(self, "points", points)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "Configuration":
        return cls(tuple(Point(tuple(row)) for row in rows))

    @property
    def N(self) -> int:
        return len(self.points)

    @property
    def d(self) -> int:
        return self.points[0].d

    def rows(self) -> tuple[tuple[float, ...], ...]:
        return tuple(p.coords for p in self.points)


@dataclass(frozen=True)
class DomainSpec:
    """Per-particle box domain [lo, hi]^d with N particles."""

    d: int
    N: int
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.d < 1 or self.N < 1:
            raise ValueError("d and N must be at least 1")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("domain bounds must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def span(self) -> float:
        return self.hi - self.lo

    def contains(self, X: Configuration) -> bool:
        if X.N != self.N or X.d != self.d:
            return False
        return all(self.lo <= c <= self.hi for p in X.points for c in p.coords)


@dataclass(frozen=True)
class Permutation:
    """A bijection of {0, ..., n-1}, stored as its image tuple."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation of 0..{len(images) - 1}: {images!r}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @property
    def size(self) -> int:
        return len(self.images)


def permute(X: Configuration, sigma: Permutation) -> Configuration:
    """Reorder a configuration: result.points[i] = X.points[sigma.images[i]]."""
    if sigma.size != X.N:
        raise ValueError(f"permutation size {sigma.size} != configuration size {X.N}")
    return Configuration(tuple(X.points[j] for j in sigma.images))


def parity(sigma: Permutation) -> int:
    """Sign (-1)^inversions of a permutation; +1 for even, -1 for odd."""
    inv = 0
    images = sigma.images
    n = len(images)
    for i in range(n):
        for j in range(i + 1, n):
            if images[i] > images[j]:
                inv += 1
    return -1 if inv & 1 else 1


def compose(tau: Permutation, sigma: Permutation) -> Permutation:
    """Composition such that permute(permute(X, sigma), tau) == permute(X, compose(tau, sigma))."""
    if tau.size != sigma.size:
        raise ValueError("cannot compose permutations of different sizes")
    return Permutation(tuple(sigma.images[t] for t in tau.images))


def inverse(sigma: Permutation) -> Permutation:
    inv = [0] * sigma.size
    for i, j in enumerate(sigma.images):
        inv[j] = i
    return Permutation(tuple(inv))


@dataclass(frozen=True)
class TargetFunction:
    """A scalar function of a configuration together with its declared symmetry.

    ``gradient_bound_hint`` is optional analytic knowledge; the harness
    always measures its own bound and never trusts the hint blindly.
    """

    evaluator: Callable[[Configuration], float]
    declared_symmetry: Symmetry
    gradient_bound_hint: float | None = None
    name: str = "custom"

    def __call__(self, X: Configuration) -> float:
        return float(self.evaluator(X))


def _param(params: Mapping[str, object], key: str, default: float) -> float:
    value = params.get(key, default)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"target parameter {key!r} must be a number, got {value!r}")
    return float(value)


def _check_params(name: str, params: Mapping[str, object], allowed: frozenset[str]) -> None:
    unknown = set(params) - allowed - {"d", "N"}
    if unknown:
        raise ConfigError(f"unknown parameter(s) for target {name!r}: {sorted(unknown)}")


def _shape(params: Mapping[str, object]) -> tuple[int | None, int | None]:
    d = params.get("d")
    N = params.get("N")
    return (int(d) if d is not None else None, int(N) if N is not None else None)


def _make_sum_coords(params: Mapping[str, object]) -> TargetFunction:
    _check_params("sum-coords", params, frozenset())
    d, N = _shape(params)

    def ev(X: Configuration) -> float:
        total = 0.0
        for p in X.points:
            for c in p.coords:
                total += c
        return total

    hint = math.sqrt(N * d) if (d is not None and N is not None) else None
    return TargetFunction(ev, Symmetry.SYMMETRIC, hint, "sum-coords")


def _make_gaussian_pair(params: Mapping[str, object]) -> TargetFunction:
    _check_params("gaussian-pair-sym", params, frozenset({"width"}))
    width = _param(params, "width", 1.0)
    if width <= 0.0:
        raise ConfigError("gaussian-pair-sym width must be positive")
    inv_w2 = 1.0 / (width * width)

    def ev(X: Configuration) -> float:
        pts = X.points
        n = len(pts)
        total = 0.0
        for i in range(n):
            ci = pts[i].coords
            for j in range(i + 1, n):
                cj = pts[j].coords
                r2 = 0.0
                for a in range(len(ci)):
                    diff = ci[a] - cj[a]
                    r2 += diff * diff
                total += math.exp(-r2 * inv_w2)
        return total

    return TargetFunction(ev, Symmetry.SYMMETRIC, None, "gaussian-pair-sym")


def _make_product_smooth(params: Mapping[str, object]) -> TargetFunction:
    _check_params("product-smooth-sym", params, frozenset({"amplitude"}))
    amplitude = _param(params, "amplitude", 0.5)
    if not 0.0 <= amplitude < 1.0:
        raise ConfigError("product-smooth-sym amplitude must lie in [0, 1)")

    # quarter-period sine: monotone per coordinate on the unit box, so a
    # half-box lattice is not already range-saturated and convergence sweeps
    # starting at delta = 0.5 measure the asymptotic first-order rate
    def ev(X: Configuration) -> float:
        prod = 1.0
        for p in X.points:
            mean = sum(p.coords) / len(p.coords)
            prod *= 1.0 + amplitude * math.sin(0.5 * math.pi * mean)
        return prod

    return TargetFunction(ev, Symmetry.SYMMETRIC, None, "product-smooth-sym")


def _first_coord_vandermonde(X: Configuration) -> float:
    pts = X.points
    n = len(pts)
    prod = 1.0
    for i in range(n):
        xi = pts[i].coords[0]
        for j in range(i + 1, n):
            prod *= xi - pts[j].coords[0]
    return prod


def _make_vandermonde_gauss(params: Mapping[str, object]) -> TargetFunction:
    _check_params("vandermonde-gauss-antisym", params, frozenset())

    def ev(X: Configuration) -> float:
        r2 = 0.0
        for p in X.points:
            for c in p.coords:
                r2 += c * c
        return _first_coord_vandermonde(X) * math.exp(-r2)

    return TargetFunction(ev, Symmetry.ANTISYMMETRIC, None, "vandermonde-gauss-antisym")


def _make_vandermonde_sum(params: Mapping[str, object]) -> TargetFunction:
    _check_params("vandermonde-sum-antisym", params, frozenset())

    def ev(X: Configuration) -> float:
        total = 0.0
        for p in X.points:
            for c in p.coords:
                total += c
        return _first_coord_vandermonde(X) * total

    return TargetFunction(ev, Symmetry.ANTISYMMETRIC, None, "vandermonde-sum-antisym")


_BUILTIN_FACTORIES: dict[str, Callable[[Mapping[str, object]], TargetFunction]] = {
    "sum-coords": _make_sum_coords,
    "gaussian-pair-sym": _make_gaussian_pair,
    "product-smooth-sym": _make_product_smooth,
    "vandermonde-gauss-antisym": _make_vandermonde_gauss,
    "vandermonde-sum-antisym": _make_vandermonde_sum,
}

BUILTIN_TARGET_NAMES: tuple[str, ...] = tuple(sorted(_BUILTIN_FACTORIES))


def builtin_target(name: str, params: Mapping[str, object] | None = None) -> TargetFunction:
    """Look up a named builtin target; unknown names raise ConfigError.

    ``params`` may carry target-specific knobs plus optional ``d``/``N``
    used to precompute analytic gradient hints where available.
    """
    try:
        factory = _BUILTIN_FACTORIES[name]
    except KeyError:
        raise ConfigError(
            f"unknown builtin target {name!r}; known: {', '.join(BUILTIN_TARGET_NAMES)}"
        ) from None
    return factory(params or {})
