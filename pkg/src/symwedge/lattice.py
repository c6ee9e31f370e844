"""Regular box lattices over [lo, hi]^d and their symmetrized (wedge) index sets.

Cells are half-open boxes [corner, corner + delta) per coordinate, with the
top cell closed so the domain boundary hi stays covered; operationally a
coordinate maps to min(floor((x - lo)/delta), n - 1). The wedge is the set
of lexicographically non-decreasing N-tuples of lattice sites; it is in
bijection with multisets of N sites and has C(n^d + N - 1, N) elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement, product
from typing import Iterator, Sequence

from .core import Configuration, DomainSpec, Permutation, Point, parity
from .errors import CapacityError, DomainError

__all__ = [
    "LatticeSpec",
    "LatticeIndex",
    "WedgeKey",
    "CellAssignment",
    "DEFAULT_WEDGE_CAP",
    "lex_compare",
    "lattice_sites",
    "cell_of",
    "wedge_size",
    "enumerate_wedge",
    "repetition_constant",
    "locate",
    "corner_configuration",
    "center_configuration",
    "smooth_cutoff",
    "axis_weight_support",
    "site_weight_support",
]

# A lattice site is its integer multi-index; a wedge key is a non-decreasing
# tuple of sites. Plain tuples compare lexicographically and hash cheaply.
LatticeIndex = tuple[int, ...]
WedgeKey = tuple[LatticeIndex, ...]

DEFAULT_WEDGE_CAP = 10**7
_INT64_MAX = 2**63 - 1
# Relative slack when (hi - lo)/delta lands a hair away from an integer.
_CELL_COUNT_SNAP = 1e-9


@dataclass(frozen=True)
class LatticeSpec:
    """Geometry of one lattice: spacing, dimension, cells per axis, box bounds."""

    delta: float
    d: int
    cells_per_dim: int
    origin: float
    top: float

    def __post_init__(self) -> None:
        if self.delta <= 0.0 or not math.isfinite(self.delta):
            raise ValueError(f"spacing must be positive and finite, got {self.delta}")
        if self.d < 1:
            raise ValueError("dimension must be at least 1")
        if self.cells_per_dim < 1:
            raise ValueError("need at least one cell per axis")
        if not self.origin < self.top:
            raise ValueError(f"need origin < top, got [{self.origin}, {self.top}]")
        if self.cells_per_dim ** self.d > _INT64_MAX:
            raise CapacityError(
                f"{self.cells_per_dim}^{self.d} lattice sites exceed 64-bit range"
            )

    @classmethod
    def from_domain(cls, domain: DomainSpec, delta: float) -> "LatticeSpec":
        """Cover a domain with ceil(span/delta) cells per axis.

        Quotients within 1e-9 (relative) of an integer snap to it, so a
        spacing written as span/n yields exactly n cells despite float dust.
        """
        if delta <= 0.0 or not math.isfinite(delta):
            raise ValueError(f"spacing must be positive and finite, got {delta}")
        q = domain.span / delta
        nearest = round(q)
        if nearest >= 1 and abs(q - nearest) <= _CELL_COUNT_SNAP * max(1.0, abs(q)):
            n = int(nearest)
        else:
            n = int(math.ceil(q))
        return cls(delta=delta, d=domain.d, cells_per_dim=n, origin=domain.lo, top=domain.hi)

    @classmethod
    def from_counts(cls, n: int, d: int, lo: float, hi: float) -> "LatticeSpec":
        """Exactly n cells per axis with delta = (hi - lo)/n."""
        if n < 1:
            raise ValueError("need at least one cell per axis")
        return cls(delta=(hi - lo) / n, d=d, cells_per_dim=n, origin=lo, top=hi)

    @property
    def site_count(self) -> int:
        return self.cells_per_dim ** self.d

    def axis_position(self, index: int) -> float:
        return self.origin + index * self.delta

    def position(self, site: LatticeIndex) -> tuple[float, ...]:
        """Real coordinates of a site's cell corner (the lower corner)."""
        return tuple(self.origin + i * self.delta for i in site)


def lex_compare(a: Sequence[int], b: Sequence[int]) -> int:
    """-1, 0, or +1 for a < b, a == b, a > b in lexicographic order."""
    ta, tb = tuple(a), tuple(b)
    if len(ta) != len(tb):
        raise ValueError("cannot compare indices of different lengths")
    if ta < tb:
        return -1
    if ta > tb:
        return 1
    return 0


def lattice_sites(spec: LatticeSpec) -> Iterator[LatticeIndex]:
    """All sites in lexicographic order."""
    return product(range(spec.cells_per_dim), repeat=spec.d)


def cell_of(spec: LatticeSpec, x: Point | Sequence[float]) -> LatticeIndex:
    """Multi-index of the cell containing x; the top cell is closed at hi."""
    coords = x.coords if isinstance(x, Point) else tuple(x)
    if len(coords) != spec.d:
        raise DomainError(f"point has dimension {len(coords)}, lattice is {spec.d}-dimensional")
    n = spec.cells_per_dim
    out = []
    for c in coords:
        if not spec.origin <= c <= spec.top:
            raise DomainError(
                f"coordinate {c!r} outside [{spec.origin}, {spec.top}]"
            )
        i = int((c - spec.origin) / spec.delta)
        if i >= n:
            i = n - 1
        out.append(i)
    return tuple(out)


def wedge_size(spec: LatticeSpec, N: int) -> int:
    """C(n^d + N - 1, N); raises CapacityError past the 64-bit range."""
    if N < 1:
        raise ValueError("need at least one slot")
    size = math.comb(spec.site_count + N - 1, N)
    if size > _INT64_MAX:
        raise CapacityError(f"wedge size {size} exceeds 64-bit range")
    return size


def enumerate_wedge(spec: LatticeSpec, N: int, cap: int = DEFAULT_WEDGE_CAP) -> Iterator[WedgeKey]:
    """Non-decreasing N-tuples of sites in lexicographic order.

    Checks the total count against ``cap`` before yielding anything so a
    too-fine lattice fails fast with the cap it would need.
    """
    size = wedge_size(spec, N)
    if size > cap:
        raise CapacityError(
            f"wedge has {size} entries, above the cap of {cap}; rerun with cap >= {size}"
        )
    return combinations_with_replacement(lattice_sites(spec), N)


def repetition_constant(zs: WedgeKey) -> int:
    """Product of factorials of site multiplicities within one wedge entry."""
    const = 1
    run = 1
    for prev, cur in zip(zs, zs[1:]):
        if cur == prev:
            run += 1
            const *= run
        else:
            run = 1
    return const


@dataclass(frozen=True)
class CellAssignment:
    """Result of locating a configuration: its wedge entry, the slot
    permutation into wedge order, and the entry's repetition constant."""

    wedge: WedgeKey
    sigma: Permutation
    repetition: int

    @property
    def sign(self) -> int:
        return parity(self.sigma)


def locate(spec: LatticeSpec, X: Configuration) -> CellAssignment:
    """Canonicalize a configuration onto the wedge.

    The returned permutation maps input slots to wedge slots:
    cell_of(X.points[i]) == wedge[sigma.images[i]]. Ties (repeated cells)
    are broken stably by input slot, so the permutation is deterministic.
    """
    cells = [cell_of(spec, p) for p in X.points]
    order = sorted(range(len(cells)), key=cells.__getitem__)
    images = [0] * len(cells)
    for slot, i in enumerate(order):
        images[i] = slot
    wedge = tuple(cells[i] for i in order)
    return CellAssignment(wedge, Permutation(tuple(images)), repetition_constant(wedge))


def corner_configuration(spec: LatticeSpec, zs: WedgeKey) -> Configuration:
    """The configuration sitting at the cell corners of a wedge entry."""
    return Configuration(tuple(Point(spec.position(z)) for z in zs))


def center_configuration(spec: LatticeSpec, zs: WedgeKey) -> Configuration:
    """The configuration at the cell centers of a wedge entry. Top cells can
    be partial when delta does not divide the span; centers are clamped to
    the domain so the target is never asked to leave it."""
    half = spec.delta / 2.0
    return Configuration(
        tuple(
            Point(tuple(min(spec.axis_position(i) + half, spec.top) for i in z))
            for z in zs
        )
    )


def _smoothstep(t: float) -> float:
    # Quintic 6t^5 - 15t^4 + 10t^3: C^2, with s(t) + s(1-t) = 1.
    if t <= 0.0:
        return 0.0
    if t >= 1.0:
        return 1.0
    return t * t * t * (10.0 + t * (6.0 * t - 15.0))


def _axis_profile(spec: LatticeSpec, index: int, c: float, w: float) -> float:
    a = spec.axis_position(index)
    rise_from = a - w
    rise_to = a + w
    fall_from = a + spec.delta - w
    fall_to = a + spec.delta + w
    if c <= rise_from or c >= fall_to:
        return 0.0
    if c < rise_to:
        return _smoothstep((c - rise_from) / (2.0 * w))
    if c <= fall_from:
        return 1.0
    return _smoothstep((fall_to - c) / (2.0 * w))


def smooth_cutoff(spec: LatticeSpec, z: LatticeIndex, x: Point | Sequence[float], w: float) -> float:
    """Tensor-product quintic cutoff for cell z: 1 on the inner plateau
    [corner + w, corner + delta - w], 0 outside [corner - w, corner + delta + w].

    On a shared cell face each crossing coordinate contributes exactly 1/2.
    Requires 0 < w <= delta/2 so only adjacent cells overlap.
    """
    if not 0.0 < w <= spec.delta / 2.0:
        raise ValueError(f"need 0 < w <= delta/2 = {spec.delta / 2.0}, got w = {w}")
    coords = x.coords if isinstance(x, Point) else tuple(x)
    if len(coords) != spec.d or len(z) != spec.d:
        raise DomainError("dimension mismatch in smooth_cutoff")
    prod = 1.0
    for index, c in zip(z, coords):
        prod *= _axis_profile(spec, index, c, w)
        if prod == 0.0:
            return 0.0
    return prod


def axis_weight_support(spec: LatticeSpec, c: float, w: float) -> tuple[tuple[int, float], ...]:
    """Cells with a nonzero cutoff at coordinate c along one axis, with the
    profiles normalized to sum to one.

    Away from the domain boundary the raw profiles of adjacent cells already
    sum to one (the quintic satisfies s(t) + s(1-t) = 1); normalizing also
    repairs the deficit of the half-bands at lo and hi. With w <= delta/2 at
    most two cells are active, and the containing cell's profile is >= 1/2,
    so the divisor never degenerates.
    """
    if not spec.origin <= c <= spec.top:
        raise DomainError(f"coordinate {c!r} outside [{spec.origin}, {spec.top}]")
    n = spec.cells_per_dim
    k = int((c - spec.origin) / spec.delta)
    if k >= n:
        k = n - 1
    entries = []
    for index in (k - 1, k, k + 1):
        if 0 <= index < n:
            p = _axis_profile(spec, index, c, w)
            if p > 0.0:
                entries.append((index, p))
    total = 0.0
    for _, p in entries:
        total += p
    return tuple((index, p / total) for index, p in entries)


def site_weight_support(
    spec: LatticeSpec, x: Point | Sequence[float], w: float
) -> tuple[tuple[LatticeIndex, float], ...]:
    """Tensor product of the per-axis supports: the sites a single point
    spreads its unit mass over. Weights sum to one."""
    if not 0.0 < w <= spec.delta / 2.0:
        raise ValueError(f"need 0 < w <= delta/2 = {spec.delta / 2.0}, got w = {w}")
    coords = x.coords if isinstance(x, Point) else tuple(x)
    if len(coords) != spec.d:
        raise DomainError(f"point has dimension {len(coords)}, lattice is {spec.d}-dimensional")
    axis_supports = [axis_weight_support(spec, c, w) for c in coords]
    out = []
    for combo in product(*axis_supports):
        weight = 1.0
        for _, p in combo:
            weight *= p
        out.append((tuple(index for index, _ in combo), weight))
    return tuple(out)
