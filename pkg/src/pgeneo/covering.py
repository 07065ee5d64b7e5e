"""Epsilon-net construction: the computable witness of total boundedness.

A net is built greedily, farthest point first: start from element 0 and keep
adding the element farthest from the chosen centers until every element lies
within epsilon of some center.  The selection order does not depend on
epsilon, so net sizes are automatically non-increasing in epsilon, and ties
are broken by lowest index, so identical inputs yield identical nets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, TypeVar

import numpy as np

from .core import (
    DEFAULT_DELTA_MEM,
    DEFAULT_DELTA_NUM,
    DomainMap,
    MeasurementSpace,
    PgeneoError,
    uniform_distance,
)
from .metrics import aut_pseudometric, domain_distance_matrix, pgeneo_distance
from .operations import is_operation

T = TypeVar("T")


class MetricSpotCheckError(PgeneoError):
    """The supplied distance oracle fails a basic pseudo-metric sanity check."""


class StabilityError(PgeneoError):
    """Replacing a space by its internal net moved the induced metric too far."""


@dataclass(frozen=True)
class EpsilonNet:
    """A covering of a finite collection at radius epsilon.

    ``center_indices`` are indices into the covered collection (the net is
    internal); ``assignment[i]`` is the position in ``center_indices`` of the
    nearest center of element i.
    """

    epsilon: float
    center_indices: tuple[int, ...]
    covering_radius_achieved: float
    assignment: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.center_indices)


def greedy_net(
    collection: Sequence[T],
    metric: Callable[[T, T], float],
    epsilon: float,
) -> EpsilonNet:
    """Farthest-point-first cover of the collection under the given pseudo-metric."""
    n = len(collection)
    if n == 0:
        raise ValueError("cannot cover an empty collection")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    _spot_check(collection, metric)

    dist = np.array([metric(collection[0], e) for e in collection])
    assignment = np.zeros(n, dtype=int)
    centers = [0]
    while float(np.max(dist)) > epsilon:
        nxt = int(np.argmax(dist))  # argmax takes the first max: lowest-index tie-break
        centers.append(nxt)
        row = np.array([metric(collection[nxt], e) for e in collection])
        closer = row < dist  # strict: ties stay with the earlier center
        assignment[closer] = len(centers) - 1
        dist = np.minimum(dist, row)
    return EpsilonNet(
        epsilon=float(epsilon),
        center_indices=tuple(centers),
        covering_radius_achieved=float(np.max(dist)),
        assignment=tuple(int(a) for a in assignment),
    )


def _spot_check(collection: Sequence[T], metric: Callable[[T, T], float]) -> None:
    a, b = collection[0], collection[-1]
    if abs(metric(a, a)) > 0:
        raise MetricSpotCheckError("metric(x, x) must be 0")
    ab, ba = metric(a, b), metric(b, a)
    if ab < 0 or ab != ba:
        raise MetricSpotCheckError("metric must be nonnegative and symmetric")


def verify_net(
    net: EpsilonNet, collection: Sequence[T], metric: Callable[[T, T], float]
) -> float:
    """Exhaustively recompute the covering radius; raises if any contract fails."""
    worst = 0.0
    for i, e in enumerate(collection):
        to_centers = [metric(collection[c], e) for c in net.center_indices]
        nearest = min(to_centers)
        assigned = to_centers[net.assignment[i]]
        if assigned != nearest:
            raise AssertionError(f"element {i} is not assigned to a nearest center")
        if nearest > net.epsilon:
            raise AssertionError(f"element {i} is uncovered: {nearest} > {net.epsilon}")
        worst = max(worst, nearest)
    if worst != net.covering_radius_achieved:
        raise AssertionError("covering radius does not match the recomputed value")
    return worst


def reduced_space_deviation(
    omega: MeasurementSpace, epsilon: float
) -> tuple[MeasurementSpace, float]:
    """Replace a space by an internal epsilon-net of itself and measure the worst
    change of the induced domain pseudo-metric over all point pairs."""
    members_net = greedy_net(omega.members, uniform_distance, epsilon)
    reduced = MeasurementSpace(
        omega.domain,
        tuple(omega.members[c] for c in members_net.center_indices),
        f"{omega.label}.net",
    )
    deviation = float(
        np.max(np.abs(domain_distance_matrix(omega) - domain_distance_matrix(reduced)))
    )
    return reduced, deviation


def cover_domain(
    omega: MeasurementSpace,
    epsilon: float,
    delta_num: float = DEFAULT_DELTA_NUM,
) -> EpsilonNet:
    """Net over the domain's points under the pseudo-metric induced by the space.

    Also exercises the stability mechanism behind total boundedness: thinning
    the space itself to an internal epsilon-net moves the induced metric by at
    most 2 * epsilon on every point pair; a violation raises.
    """
    dmat = domain_distance_matrix(omega)
    points = list(range(omega.domain.size))
    net = greedy_net(points, lambda i, j: float(dmat[i, j]), epsilon)
    _, deviation = reduced_space_deviation(omega, epsilon)
    if deviation > 2 * epsilon + delta_num:
        raise StabilityError(
            f"metric moved by {deviation} > 2*{epsilon} after thinning the space"
        )
    return net


def cover_operations(
    ops: Sequence[DomainMap],
    phi: MeasurementSpace,
    epsilon: float,
    phi_prime: Optional[MeasurementSpace] = None,
    delta_mem: float = DEFAULT_DELTA_MEM,
) -> EpsilonNet:
    """Net over a finite set of bijections under the aut pseudo-metric of phi.

    When the variant space is supplied, every op is first checked admissible.
    """
    if phi_prime is not None:
        for k, s in enumerate(ops):
            if not is_operation(s, phi, phi_prime, delta_mem).admissible:
                raise ValueError(f"op {k} is not admissible for (phi, phi_prime)")
    return greedy_net(
        list(ops), lambda a, b: aut_pseudometric(phi, a, b).value, epsilon
    )


def cover_operator_family(family: Sequence, epsilon: float) -> EpsilonNet:
    """Net over a finite family of operator pairs sharing triples and transform.

    Coverage is the operational content of compactness at this scale; the
    claim is restricted to the supplied family, never to the whole space.
    """
    return greedy_net(list(family), pgeneo_distance, epsilon)
