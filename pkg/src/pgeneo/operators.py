"""Operator pairs between perception triples: certification and construction.

An operator pair tabulates two maps - one on the original measurement space,
one on the variant space - together with a transformation map sending source
ops to target ops.  ``certify`` checks, by exhaustive scan, the four
properties that make the pair a partially equivariant non-expansive operator:

* the transformation map respects composition and inversion where defined,
* the tabulated images land in the target spaces,
* the pair is equivariant: image-of-composed equals composed-of-image,
* both tabulated maps are 1-Lipschitz for the sup norm.

New certified pairs are built from old ones by composition, by pointwise
fusion through a 1-Lipschitz aggregator, and by convex combination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    DEFAULT_DELTA_MEM,
    DEFAULT_DELTA_NUM,
    DomainMap,
    Measurement,
    PerceptionTriple,
    PgeneoError,
    right_action,
    space_membership,
    nearest_member,
    uniform_distance,
)


class AuditError(PgeneoError):
    """An aggregator failed its non-expansiveness audit."""


class ConvexityError(PgeneoError):
    """A weighted-sum image misses the target space, so the convex construction is undefined."""


@dataclass(frozen=True)
class TransformationMap:
    """Assignment of source ops to target ops: source_ops[i] -> target_ops[assignment[i]]."""

    source_ops: tuple[DomainMap, ...]
    target_ops: tuple[DomainMap, ...]
    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.assignment) != len(self.source_ops):
            raise ValueError("assignment must be total on the source ops")
        for a in self.assignment:
            if not (0 <= a < len(self.target_ops)):
                raise ValueError(f"assignment index {a} out of range")

    def image(self, i: int) -> DomainMap:
        return self.target_ops[self.assignment[i]]

    @classmethod
    def identity_on(cls, ops: Sequence[DomainMap]) -> "TransformationMap":
        ops = tuple(ops)
        return cls(ops, ops, tuple(range(len(ops))))


@dataclass(frozen=True)
class HomomorphismReport:
    """Violations of the partial homomorphism conditions, found by exhaustive scan."""

    ok: bool
    # (i, j, k): source_ops[i] o source_ops[j] = source_ops[k] but images disagree
    composition_violations: tuple[tuple[int, int, int], ...]
    # (i, m): source_ops[m] = source_ops[i]^-1 but images are not mutually inverse
    inverse_violations: tuple[tuple[int, int], ...]


def check_transformation_map(tm: TransformationMap) -> HomomorphismReport:
    """Scan all composable pairs and all invertible-within-source ops."""
    ops = tm.source_ops
    comp_bad = []
    for i, s in enumerate(ops):
        for j, t in enumerate(ops):
            st = s.compose(t)
            k = next((k for k, u in enumerate(ops) if u == st), None)
            if k is None:
                continue
            if tm.image(k) != tm.image(i).compose(tm.image(j)):
                comp_bad.append((i, j, k))
    inv_bad = []
    for i, s in enumerate(ops):
        s_inv = s.inverse()
        m = next((m for m, u in enumerate(ops) if u == s_inv), None)
        if m is None:
            continue
        if tm.image(m) != tm.image(i).inverse():
            inv_bad.append((i, m))
    return HomomorphismReport(
        not comp_bad and not inv_bad, tuple(comp_bad), tuple(inv_bad)
    )


@dataclass(frozen=True, eq=False)
class OperatorPair:
    """A candidate operator pair between two perception triples.

    ``on_phi[i]`` is the image of the i-th member of the source original
    space; ``on_phi_prime[j]`` the image of the j-th member of the source
    variant space.  Images are measurements on the target domain.
    """

    source: PerceptionTriple
    target: PerceptionTriple
    on_phi: tuple[Measurement, ...]
    on_phi_prime: tuple[Measurement, ...]
    transform: TransformationMap

    def __post_init__(self) -> None:
        if len(self.on_phi) != len(self.source.phi.members):
            raise ValueError("tabulation must cover every original member")
        if len(self.on_phi_prime) != len(self.source.phi_prime.members):
            raise ValueError("tabulation must cover every variant member")
        for img in (*self.on_phi, *self.on_phi_prime):
            if img.domain != self.target.domain:
                raise ValueError("images must live on the target domain")
        if self.transform.source_ops != self.source.ops:
            raise ValueError("transform must be defined exactly on the source ops")
        if self.transform.target_ops != self.target.ops:
            raise ValueError("transform must take values in the target ops")
        object.__setattr__(self, "on_phi", tuple(self.on_phi))
        object.__setattr__(self, "on_phi_prime", tuple(self.on_phi_prime))


@dataclass(frozen=True)
class CodomainFailure:
    side: str                # "phi" or "phi_prime"
    member: int              # source member whose image misses the target space
    nearest: Optional[int]
    gap: float


@dataclass(frozen=True)
class Certificate:
    """Machine-checkable record of the four certification scans."""

    equivariance_residual: float
    lipschitz_excess: float          # on the original side
    lipschitz_excess_prime: float    # on the variant side
    codomain_ok: bool
    homomorphism_ok: bool
    codomain_failures: tuple[CodomainFailure, ...]
    delta_mem: float
    delta_num: float

    @property
    def certified(self) -> bool:
        return (
            self.equivariance_residual <= self.delta_num
            and self.lipschitz_excess <= self.delta_num
            and self.lipschitz_excess_prime <= self.delta_num
            and self.codomain_ok
            and self.homomorphism_ok
        )


def _pairwise_excess(space, images) -> float:
    """Max over member pairs of (image gap - member gap); 0 when < 2 members."""
    worst = 0.0
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            excess = uniform_distance(images[i], images[j]) - uniform_distance(
                space.members[i], space.members[j]
            )
            worst = max(worst, excess)
    return worst


def certify(
    pair: OperatorPair,
    delta_mem: float = DEFAULT_DELTA_MEM,
    delta_num: float = DEFAULT_DELTA_NUM,
) -> Certificate:
    """Exhaustively scan equivariance, non-expansiveness, codomains and the transform."""
    src, tgt = pair.source, pair.target
    residual = 0.0
    for i, f in enumerate(src.phi.members):
        for j, s in enumerate(src.ops):
            moved = right_action(f, s)
            idx = space_membership(moved, src.phi_prime, delta_mem)
            if idx is None:
                raise ValueError(
                    f"source triple is broken: member {i} composed with op {j} "
                    "is not in the variant space"
                )
            expected = right_action(pair.on_phi[i], pair.transform.image(j))
            residual = max(residual, uniform_distance(pair.on_phi_prime[idx], expected))

    failures: list[CodomainFailure] = []
    for side, images, space in (
        ("phi", pair.on_phi, tgt.phi),
        ("phi_prime", pair.on_phi_prime, tgt.phi_prime),
    ):
        for i, img in enumerate(images):
            if space_membership(img, space, delta_mem) is None:
                near, gap = nearest_member(img, space)
                failures.append(CodomainFailure(side, i, near, gap))

    return Certificate(
        equivariance_residual=residual,
        lipschitz_excess=_pairwise_excess(src.phi, pair.on_phi),
        lipschitz_excess_prime=_pairwise_excess(src.phi_prime, pair.on_phi_prime),
        codomain_ok=not failures,
        homomorphism_ok=check_transformation_map(pair.transform).ok,
        codomain_failures=tuple(failures),
        delta_mem=delta_mem,
        delta_num=delta_num,
    )


def compose(
    first: OperatorPair,
    second: OperatorPair,
    delta_mem: float = DEFAULT_DELTA_MEM,
    delta_num: float = DEFAULT_DELTA_NUM,
) -> tuple[OperatorPair, Certificate]:
    """Compose two certified pairs; the target of the first must be the source of the second."""
    if not first.target.matches(second.source):
        raise ValueError("target triple of the first pair must equal the source of the second")
    for name, p in (("first", first), ("second", second)):
        if not certify(p, delta_mem, delta_num).certified:
            raise ValueError(f"{name} operator pair is not certified")

    def through(images, mid_space, second_images):
        out = []
        for img in images:
            k = space_membership(img, mid_space, delta_mem)
            if k is None:  # certified inputs place every image in the middle space
                raise AssertionError("image lost between the composed pairs")
            out.append(second_images[k])
        return tuple(out)

    on_phi = through(first.on_phi, second.source.phi, second.on_phi)
    on_phi_prime = through(
        first.on_phi_prime, second.source.phi_prime, second.on_phi_prime
    )
    assignment = []
    for i in range(len(first.transform.source_ops)):
        mid = first.transform.image(i)
        k = next(
            (k for k, u in enumerate(second.transform.source_ops) if u == mid), None
        )
        if k is None:
            raise ValueError("first transform takes a value outside the second's source ops")
        assignment.append(second.transform.assignment[k])
    tm = TransformationMap(
        first.transform.source_ops, second.transform.target_ops, tuple(assignment)
    )
    pair = OperatorPair(first.source, second.target, on_phi, on_phi_prime, tm)
    return pair, certify(pair, delta_mem, delta_num)


@dataclass(frozen=True)
class Aggregator:
    """A 1-Lipschitz map R^n -> R applied pointwise to fuse operator images.

    Shipped kinds: ``max``, ``min``, ``convex`` (weighted average) and
    ``power_mean`` (weighted, exponent >= 1, nonnegative inputs only).
    """

    kind: str
    weights: Optional[tuple[float, ...]] = None
    power: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind not in ("max", "min", "convex", "power_mean"):
            raise ValueError(f"unknown aggregator kind {self.kind!r}")
        if self.kind in ("max", "min"):
            if self.weights is not None or self.power is not None:
                raise ValueError(f"{self.kind} takes no weights or power")
            return
        if self.weights is None:
            raise ValueError(f"{self.kind} needs weights")
        w = tuple(float(x) for x in self.weights)
        if any(x < 0 for x in w):
            raise ValueError("weights must be nonnegative")
        if abs(sum(w) - 1.0) > DEFAULT_DELTA_NUM:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "weights", w)
        if self.kind == "power_mean":
            if self.power is None or self.power < 1:
                raise ValueError("power mean needs an exponent >= 1")
        elif self.power is not None:
            raise ValueError("convex combination takes no power")

    @property
    def expected_arity(self) -> Optional[int]:
        return len(self.weights) if self.weights is not None else None

    def apply(self, stacked: np.ndarray) -> np.ndarray:
        """Reduce the leading axis of an (n, ...) array of component values."""
        if self.kind == "max":
            return np.max(stacked, axis=0)
        if self.kind == "min":
            return np.min(stacked, axis=0)
        w = np.asarray(self.weights)
        if self.kind == "convex":
            return np.tensordot(w, stacked, axes=1)
        if np.any(stacked < 0):
            raise ValueError("power mean is only defined on nonnegative values")
        p = float(self.power)  # type: ignore[arg-type]
        return np.tensordot(w, stacked**p, axes=1) ** (1.0 / p)


def check_aggregator_nonexpansive(
    agg: Aggregator,
    trials: int = 100_000,
    seed: int = 0,
    arity: Optional[int] = None,
) -> float:
    """Randomized audit of |L(u) - L(v)| <= ||u - v||_inf; returns the max excess."""
    n = arity if arity is not None else (agg.expected_arity or 3)
    if agg.expected_arity is not None and n != agg.expected_arity:
        raise ValueError("arity does not match the aggregator's weights")
    rng = np.random.default_rng(seed)
    lo = 0.0 if agg.kind == "power_mean" else -1.0
    u = rng.uniform(lo, 1.0, size=(n, trials))
    v = rng.uniform(lo, 1.0, size=(n, trials))
    excess = np.abs(agg.apply(u) - agg.apply(v)) - np.max(np.abs(u - v), axis=0)
    return float(np.max(excess))


def _require_common_family(parts: Sequence[OperatorPair]) -> None:
    if not parts:
        raise ValueError("need at least one operator pair")
    head = parts[0]
    for k, p in enumerate(parts[1:], start=1):
        if not (head.source.matches(p.source) and head.target.matches(p.target)):
            raise ValueError(f"part {k} lives between different perception triples")
        if head.transform != p.transform:
            raise ValueError(f"part {k} has a different transformation map")


def combine(
    agg: Aggregator,
    parts: Sequence[OperatorPair],
    delta_mem: float = DEFAULT_DELTA_MEM,
    delta_num: float = DEFAULT_DELTA_NUM,
    audit_trials: int = 100_000,
    seed: int = 0,
) -> tuple[OperatorPair, Certificate]:
    """Fuse certified pairs pointwise through an audited 1-Lipschitz aggregator.

    The construction is only guaranteed to certify when the fused images land
    back in the target spaces; when that codomain hypothesis fails the pair is
    returned uncertified, with the failing members named in the certificate.
    """
    _require_common_family(parts)
    if agg.expected_arity is not None and agg.expected_arity != len(parts):
        raise ValueError("aggregator arity does not match the number of parts")
    excess = check_aggregator_nonexpansive(agg, audit_trials, seed, arity=len(parts))
    if excess > delta_num:
        raise AuditError(f"aggregator failed its non-expansiveness audit: excess {excess}")
    head = parts[0]

    def fused(images_per_part):
        out = []
        for idx in range(len(images_per_part[0])):
            stacked = np.stack([imgs[idx].values for imgs in images_per_part])
            out.append(Measurement(head.target.domain, agg.apply(stacked)))
        return tuple(out)

    pair = OperatorPair(
        head.source,
        head.target,
        fused([p.on_phi for p in parts]),
        fused([p.on_phi_prime for p in parts]),
        head.transform,
    )
    return pair, certify(pair, delta_mem, delta_num)


def convex_combine(
    parts: Sequence[OperatorPair],
    weights: Sequence[float],
    delta_mem: float = DEFAULT_DELTA_MEM,
    delta_num: float = DEFAULT_DELTA_NUM,
) -> tuple[OperatorPair, Certificate]:
    """Weighted sum of certified pairs.

    Convexity of the target spaces cannot hold literally for finite sets; the
    finite surrogate is that every weighted-sum image must itself pass
    membership in the target space, and its failure is a signaled error.
    """
    _require_common_family(parts)
    w = [float(x) for x in weights]
    if len(w) != len(parts):
        raise ValueError("need one weight per part")
    if any(x < 0 for x in w) or abs(sum(w) - 1.0) > delta_num:
        raise ValueError("weights must be nonnegative and sum to 1")
    head = parts[0]
    wv = np.asarray(w)

    def summed(images_per_part):
        out = []
        for idx in range(len(images_per_part[0])):
            stacked = np.stack([imgs[idx].values for imgs in images_per_part])
            out.append(Measurement(head.target.domain, np.tensordot(wv, stacked, axes=1)))
        return tuple(out)

    on_phi = summed([p.on_phi for p in parts])
    on_phi_prime = summed([p.on_phi_prime for p in parts])
    for side, images, space in (
        ("phi", on_phi, head.target.phi),
        ("phi_prime", on_phi_prime, head.target.phi_prime),
    ):
        for i, img in enumerate(images):
            if space_membership(img, space, delta_mem) is None:
                _, gap = nearest_member(img, space)
                raise ConvexityError(
                    f"weighted sum of {side} images at member {i} misses the "
                    f"target space by {gap}"
                )
    pair = OperatorPair(head.source, head.target, on_phi, on_phi_prime, head.transform)
    return pair, certify(pair, delta_mem, delta_num)


@dataclass(frozen=True)
class RestrictionReport:
    """Gap between the two tabulated maps on the original space, when comparable.

    Comparable means the identity is among the source ops and the original
    space is contained in the variant space; certified pairs then agree on
    the original space.  Otherwise the check reports 'not applicable' --
    the two maps are allowed to differ on any overlap.
    """

    applicable: bool
    reason: str
    max_gap: Optional[float]
    gaps: tuple[float, ...]


def check_restriction(
    pair: OperatorPair, delta_mem: float = DEFAULT_DELTA_MEM
) -> RestrictionReport:
    src = pair.source
    if not any(s.is_identity() for s in src.ops):
        return RestrictionReport(False, "identity is not among the source ops", None, ())
    member_of_prime = [
        space_membership(f, src.phi_prime, delta_mem) for f in src.phi.members
    ]
    if any(idx is None for idx in member_of_prime):
        return RestrictionReport(
            False, "original space is not contained in the variant space", None, ()
        )
    gaps = tuple(
        uniform_distance(pair.on_phi_prime[idx], pair.on_phi[i])  # type: ignore[index]
        for i, idx in enumerate(member_of_prime)
    )
    return RestrictionReport(True, "", max(gaps) if gaps else 0.0, gaps)
