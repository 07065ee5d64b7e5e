"""Finite domains, tabulated measurements, and the right action of bijections.

Everything downstream (pseudo-metrics, admissibility, certification, covering)
is built on four finite representations: an indexed point set, real-valued
measurements stored as value arrays, finite measurement spaces, and bijections
of the point set stored as index permutations.  All types are immutable after
construction and every operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

# Tolerance deciding whether a measurement counts as a member of a space.
DEFAULT_DELTA_MEM = 1e-9
# Slack for inequality checks that hold exactly only in real arithmetic.
DEFAULT_DELTA_NUM = 1e-12


class PgeneoError(Exception):
    """Base class for errors raised by this package."""


class DomainMismatch(PgeneoError):
    """Operands live on different point sets."""


class EmptySpaceError(PgeneoError):
    """A sup over an empty measurement space is undefined, not zero."""


@dataclass(frozen=True)
class FiniteDomain:
    """An indexed finite point set; labels are opaque identifiers."""

    points: tuple[str, ...]

    def __post_init__(self) -> None:
        points = tuple(str(p) for p in self.points)
        if not points:
            raise ValueError("a domain needs at least one point")
        if len(set(points)) != len(points):
            raise ValueError("point labels must be pairwise distinct")
        object.__setattr__(self, "points", points)

    @property
    def size(self) -> int:
        return len(self.points)


@dataclass(frozen=True, eq=False)
class Measurement:
    """A bounded real-valued function on a finite domain, tabulated by point index."""

    domain: FiniteDomain
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float)
        if arr.shape != (self.domain.size,):
            raise ValueError(
                f"expected {self.domain.size} values, got array of shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("measurement values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class DomainMap:
    """A bijection of the domain: point i is sent to point perm[i]."""

    domain: FiniteDomain
    perm: tuple[int, ...]

    def __post_init__(self) -> None:
        perm = tuple(int(i) for i in self.perm)
        if sorted(perm) != list(range(self.domain.size)):
            raise ValueError("perm must list each point index exactly once")
        object.__setattr__(self, "perm", perm)

    @classmethod
    def identity(cls, domain: FiniteDomain) -> "DomainMap":
        return cls(domain, tuple(range(domain.size)))

    def __call__(self, i: int) -> int:
        return self.perm[i]

    def is_identity(self) -> bool:
        return all(j == i for i, j in enumerate(self.perm))

    def compose(self, other: "DomainMap") -> "DomainMap":
        """self after other: (self.compose(other))(x) = self(other(x))."""
        _require_same_domain(self.domain, other.domain)
        return DomainMap(self.domain, tuple(self.perm[j] for j in other.perm))

    def inverse(self) -> "DomainMap":
        inv = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            inv[j] = i
        return DomainMap(self.domain, tuple(inv))


@dataclass(frozen=True, eq=False)
class MeasurementSpace:
    """A finite set of measurements sharing one domain."""

    domain: FiniteDomain
    members: tuple[Measurement, ...]
    label: str = ""

    def __post_init__(self) -> None:
        members = tuple(self.members)
        for k, f in enumerate(members):
            if f.domain != self.domain:
                raise DomainMismatch(f"member {k} lives on a different domain")
        object.__setattr__(self, "members", members)
        # stacked value matrix, one row per member; empty spaces get a 0-row matrix
        matrix = (
            np.stack([f.values for f in members])
            if members
            else np.zeros((0, self.domain.size))
        )
        matrix.flags.writeable = False
        object.__setattr__(self, "_matrix", matrix)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix  # type: ignore[attr-defined]

    def __len__(self) -> int:
        return len(self.members)

    def matches(self, other: "MeasurementSpace") -> bool:
        """Exact structural equality: same domain, same members in the same order."""
        return (
            self.domain == other.domain
            and len(self) == len(other)
            and bool(np.array_equal(self.matrix, other.matrix))
        )


def space_from_arrays(
    domain: FiniteDomain, arrays: Sequence[Sequence[float]], label: str = ""
) -> MeasurementSpace:
    return MeasurementSpace(
        domain, tuple(Measurement(domain, np.asarray(a, dtype=float)) for a in arrays), label
    )


def dedup_space(
    domain: FiniteDomain,
    measurements: Sequence[Measurement],
    label: str = "",
    delta_mem: float = DEFAULT_DELTA_MEM,
) -> MeasurementSpace:
    """Build a space keeping only the first representative of each delta_mem-cluster."""
    kept: list[Measurement] = []
    for f in measurements:
        if all(uniform_distance(f, g) > delta_mem for g in kept):
            kept.append(f)
    return MeasurementSpace(domain, tuple(kept), label)


@dataclass(frozen=True, eq=False)
class PerceptionTriple:
    """Original measurements, their admissible variants, and the bijections relating them.

    The admissibility of every op (each composed original must land in the
    variant space) is checked by ``operations.validate_perception_triple``,
    not at construction.
    """

    phi: MeasurementSpace
    phi_prime: MeasurementSpace
    ops: tuple[DomainMap, ...]

    def __post_init__(self) -> None:
        _require_same_domain(self.phi.domain, self.phi_prime.domain)
        for s in self.ops:
            _require_same_domain(s.domain, self.phi.domain)
        object.__setattr__(self, "ops", tuple(self.ops))

    @property
    def domain(self) -> FiniteDomain:
        return self.phi.domain

    def matches(self, other: "PerceptionTriple") -> bool:
        return (
            self.phi.matches(other.phi)
            and self.phi_prime.matches(other.phi_prime)
            and self.ops == other.ops
        )


def _require_same_domain(a: FiniteDomain, b: FiniteDomain) -> None:
    if a != b:
        raise DomainMismatch("operands are defined on different domains")


def uniform_norm(f: Measurement) -> float:
    """Sup norm: the largest absolute value taken by the measurement."""
    return float(np.max(np.abs(f.values)))


def uniform_distance(f: Measurement, g: Measurement) -> float:
    """Sup-norm distance between two measurements on the same domain."""
    _require_same_domain(f.domain, g.domain)
    return float(np.max(np.abs(f.values - g.values)))


def right_action(phi: Measurement, s: DomainMap) -> Measurement:
    """Compose a measurement with a bijection: result(x) = phi(s(x))."""
    _require_same_domain(phi.domain, s.domain)
    return Measurement(phi.domain, phi.values[np.asarray(s.perm)])


def space_membership(
    f: Measurement,
    omega: MeasurementSpace,
    delta_mem: float = DEFAULT_DELTA_MEM,
) -> Optional[int]:
    """Index of the first member within delta_mem of f in sup norm, or None."""
    _require_same_domain(f.domain, omega.domain)
    if not omega.members:
        return None
    gaps = np.max(np.abs(omega.matrix - f.values), axis=1)
    hits = np.flatnonzero(gaps <= delta_mem)
    return int(hits[0]) if hits.size else None


def nearest_member(
    f: Measurement, omega: MeasurementSpace
) -> tuple[Optional[int], float]:
    """Closest member of the space and its sup-norm gap; (None, inf) when empty."""
    _require_same_domain(f.domain, omega.domain)
    if not omega.members:
        return None, float("inf")
    gaps = np.max(np.abs(omega.matrix - f.values), axis=1)
    k = int(np.argmin(gaps))
    return k, float(gaps[k])
