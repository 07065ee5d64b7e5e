"""Pseudo-metrics on points, bijections and tabulated operators, exact on finite instances.

* ``domain_pseudometric``   - on points, induced by a measurement space.
* ``aut_pseudometric``      - on bijections, inherited from a measurement space.
* ``pi_distance``           - on pairs of bijections (sum of two aut distances).
* ``operator_distance``     - on tabulated operators over one space.
* ``pgeneo_distance``       - on operator pairs (max of the two sides).

Every sup in the definitions is a max over a finite index set, so values are
exact up to float arithmetic; witnesses are the first argmax encountered in
deterministic iteration order (member index, then point index).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    DomainMap,
    EmptySpaceError,
    Measurement,
    MeasurementSpace,
    _require_same_domain,
)


@dataclass(frozen=True)
class MetricReport:
    """A pseudo-metric value together with the indices achieving the max.

    The witness layout depends on the metric: ``(member,)`` for the domain
    pseudo-metric, ``(member, point)`` for the aut and operator distances.
    Re-evaluating the metric at the witness reproduces ``value`` exactly.
    """

    value: float
    witness: tuple[int, ...]


def domain_pseudometric(
    omega: MeasurementSpace, x1: int, x2: int
) -> MetricReport:
    """Largest gap |w(x1) - w(x2)| over the measurements w of the space.

    Two points are indistinguishable (distance 0) when no measurement
    separates them; the sup over an empty space is a signaled error.
    """
    if not omega.members:
        raise EmptySpaceError("domain pseudo-metric over an empty space is undefined")
    n = omega.domain.size
    if not (0 <= x1 < n and 0 <= x2 < n):
        raise IndexError(f"point indices {x1}, {x2} out of range for {n} points")
    gaps = np.abs(omega.matrix[:, x1] - omega.matrix[:, x2])
    k = int(np.argmax(gaps))
    return MetricReport(float(gaps[k]), (k,))


def aut_pseudometric(
    omega: MeasurementSpace, s1: DomainMap, s2: DomainMap
) -> MetricReport:
    """Largest sup-norm gap between right-composed measurements, max over the space.

    Coincides with the uniform pseudo-metric of the domain pseudo-metric:
    max over points x of domain_pseudometric(omega, s1(x), s2(x)).
    """
    if not omega.members:
        raise EmptySpaceError("aut pseudo-metric over an empty space is undefined")
    _require_same_domain(omega.domain, s1.domain)
    _require_same_domain(omega.domain, s2.domain)
    a = omega.matrix[:, np.asarray(s1.perm)]
    b = omega.matrix[:, np.asarray(s2.perm)]
    gaps = np.abs(a - b)
    flat = int(np.argmax(gaps))
    k, i = divmod(flat, omega.domain.size)
    return MetricReport(float(gaps[k, i]), (k, i))


def pi_distance(
    p1: tuple[DomainMap, DomainMap],
    p2: tuple[DomainMap, DomainMap],
    phi: MeasurementSpace,
    phi_prime: MeasurementSpace,
) -> float:
    """Distance on pairs of bijections: aut distance of the first components
    under phi plus aut distance of the second components under phi_prime."""
    s1, t1 = p1
    s2, t2 = p2
    return (
        aut_pseudometric(phi, s1, s2).value
        + aut_pseudometric(phi_prime, t1, t2).value
    )


def operator_distance(
    omega: MeasurementSpace,
    images1: Sequence[Measurement],
    images2: Sequence[Measurement],
) -> MetricReport:
    """Sup over members of the sup-norm gap between the two tabulated images."""
    if not omega.members:
        raise EmptySpaceError("operator distance over an empty space is undefined")
    if len(images1) != len(omega.members) or len(images2) != len(omega.members):
        raise ValueError("tabulated maps must provide an image for every member")
    best = MetricReport(-1.0, (-1, -1))
    for k, (f, g) in enumerate(zip(images1, images2)):
        _require_same_domain(f.domain, g.domain)
        gaps = np.abs(f.values - g.values)
        i = int(np.argmax(gaps))
        if float(gaps[i]) > best.value:
            best = MetricReport(float(gaps[i]), (k, i))
    return best


def pgeneo_distance(pair1, pair2) -> float:
    """Distance between two operator pairs over the same source triple and transform.

    Max of the operator distances over the original space and over the variant
    space.  Raises when the pairs do not share source/target triples and
    transformation map, since the metric is only defined on one such family.
    """
    if not (pair1.source.matches(pair2.source) and pair1.target.matches(pair2.target)):
        raise ValueError("operator pairs live between different perception triples")
    if pair1.transform != pair2.transform:
        raise ValueError("operator pairs have different transformation maps")
    d_phi = operator_distance(pair1.source.phi, pair1.on_phi, pair2.on_phi).value
    d_phi_prime = operator_distance(
        pair1.source.phi_prime, pair1.on_phi_prime, pair2.on_phi_prime
    ).value
    return max(d_phi, d_phi_prime)


def domain_distance_matrix(omega: MeasurementSpace) -> np.ndarray:
    """All pairwise domain pseudo-metric values as an (n, n) array."""
    if not omega.members:
        raise EmptySpaceError("domain pseudo-metric over an empty space is undefined")
    m = omega.matrix
    return np.max(np.abs(m[:, :, None] - m[:, None, :]), axis=0)
