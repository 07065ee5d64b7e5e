"""Admissibility machinery for bijections acting on measurement spaces.

A bijection s is admissible for (phi, phi_prime) when every member of phi,
right-composed with s, lands in phi_prime (membership decided under the
shared tolerance delta_mem).  On top of that single notion this module builds
perception-triple validation, the composition criterion, the pair/inverse
structures (all ordered pairs whose composition stays admissible, all maps
whose inverse stays admissible), and the non-expansiveness / continuity
checks those structures satisfy.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    DEFAULT_DELTA_MEM,
    DomainMap,
    EmptySpaceError,
    FiniteDomain,
    Measurement,
    MeasurementSpace,
    PerceptionTriple,
    _require_same_domain,
    dedup_space,
    right_action,
)
from .metrics import aut_pseudometric, domain_distance_matrix


@dataclass(frozen=True)
class AdmissibilityFailure:
    """One member whose composition with the tested map misses the target space."""

    member: int                 # index into the source space
    composed: Measurement       # that member right-composed with the map
    nearest: Optional[int]      # closest member of the target space, None if empty
    gap: float                  # sup-norm gap to that member (inf when empty)


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    failures: tuple[AdmissibilityFailure, ...]


@dataclass(frozen=True)
class TripleReport:
    """Aggregated admissibility of every op of a perception triple."""

    admissible: bool
    op_reports: tuple[AdmissibilityReport, ...]

    @property
    def vacuous(self) -> bool:
        return not self.op_reports


@dataclass(frozen=True)
class PiSet:
    """Ordered pairs (s, t) of candidate indices with s, t and st all admissible."""

    maps: tuple[DomainMap, ...]
    pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class UpsilonSet:
    """Candidate indices s with both s and its inverse admissible."""

    maps: tuple[DomainMap, ...]
    indices: tuple[int, ...]


@dataclass(frozen=True)
class NonExpansivenessReport:
    """Worst violation of a non-expansiveness inequality, with its witness."""

    max_violation: float
    witness: tuple[int, ...]


def is_operation(
    s: DomainMap,
    phi: MeasurementSpace,
    phi_prime: MeasurementSpace,
    delta_mem: float = DEFAULT_DELTA_MEM,
) -> AdmissibilityReport:
    """Decide whether every member of phi, composed with s, belongs to phi_prime."""
    _require_same_domain(s.domain, phi.domain)
    _require_same_domain(phi.domain, phi_prime.domain)
    if not phi.members:
        return AdmissibilityReport(True, ())
    composed = phi.matrix[:, np.asarray(s.perm)]
    failures = []
    if phi_prime.members:
        # chebyshev gaps between every composed member and every target member
        gaps = np.max(
            np.abs(composed[:, None, :] - phi_prime.matrix[None, :, :]), axis=2
        )
        nearest = np.argmin(gaps, axis=1)
        for k in range(len(phi.members)):
            j = int(nearest[k])
            if gaps[k, j] > delta_mem:
                failures.append(
                    AdmissibilityFailure(
                        k, Measurement(phi.domain, composed[k]), j, float(gaps[k, j])
                    )
                )
    else:
        failures = [
            AdmissibilityFailure(k, Measurement(phi.domain, composed[k]), None, math.inf)
            for k in range(len(phi.members))
        ]
    return AdmissibilityReport(not failures, tuple(failures))


def validate_perception_triple(
    triple: PerceptionTriple, delta_mem: float = DEFAULT_DELTA_MEM
) -> TripleReport:
    """Check every op of the triple; an empty op list is vacuously admissible."""
    reports = tuple(
        is_operation(s, triple.phi, triple.phi_prime, delta_mem) for s in triple.ops
    )
    return TripleReport(all(r.admissible for r in reports), reports)


def translate_space(
    phi: MeasurementSpace,
    s: DomainMap,
    delta_mem: float = DEFAULT_DELTA_MEM,
) -> MeasurementSpace:
    """Materialize the right-translated space {f o s : f in phi}, deduplicated."""
    moved = [right_action(f, s) for f in phi.members]
    return dedup_space(phi.domain, moved, f"{phi.label}.translated", delta_mem)


def compose_admissible(
    s: DomainMap,
    t: DomainMap,
    phi: MeasurementSpace,
    phi_prime: MeasurementSpace,
    delta_mem: float = DEFAULT_DELTA_MEM,
) -> bool:
    """Is the composition st admissible?  Computed two ways and cross-checked.

    The direct route tests st against (phi, phi_prime); the equivalent route
    tests t against (phi translated by s, phi_prime).  Both answers must
    agree; a disagreement would falsify the composition criterion and raises.
    """
    if not is_operation(s, phi, phi_prime, delta_mem).admissible:
        raise ValueError("s is not admissible for (phi, phi_prime)")
    if not is_operation(t, phi, phi_prime, delta_mem).admissible:
        raise ValueError("t is not admissible for (phi, phi_prime)")
    direct = is_operation(s.compose(t), phi, phi_prime, delta_mem).admissible
    translated = translate_space(phi, s, delta_mem)
    via_translation = is_operation(t, translated, phi_prime, delta_mem).admissible
    if direct != via_translation:
        raise AssertionError(
            "composition criterion mismatch: "
            f"direct={direct}, via translated space={via_translation}"
        )
    return direct


def build_pi(
    candidates: Sequence[DomainMap],
    phi: MeasurementSpace,
    phi_prime: MeasurementSpace,
    delta_mem: float = DEFAULT_DELTA_MEM,
) -> PiSet:
    """All ordered candidate pairs (s, t) with s, t and st admissible."""
    maps = tuple(candidates)
    ok = [is_operation(s, phi, phi_prime, delta_mem).admissible for s in maps]
    pairs = []
    for i, j in itertools.product(range(len(maps)), repeat=2):
        if not (ok[i] and ok[j]):
            continue
        st = maps[i].compose(maps[j])
        if is_operation(st, phi, phi_prime, delta_mem).admissible:
            pairs.append((i, j))
    return PiSet(maps, tuple(pairs))


def build_upsilon(
    candidates: Sequence[DomainMap],
    phi: MeasurementSpace,
    phi_prime: MeasurementSpace,
    delta_mem: float = DEFAULT_DELTA_MEM,
) -> UpsilonSet:
    """All candidates s with both s and its inverse admissible."""
    maps = tuple(candidates)
    indices = tuple(
        i
        for i, s in enumerate(maps)
        if is_operation(s, phi, phi_prime, delta_mem).admissible
        and is_operation(s.inverse(), phi, phi_prime, delta_mem).admissible
    )
    return UpsilonSet(maps, indices)


def check_operation_nonexpansive(
    s: DomainMap,
    phi: MeasurementSpace,
    phi_prime: MeasurementSpace,
) -> NonExpansivenessReport:
    """Worst excess of D_phi(s(x1), s(x2)) over D_phi_prime(x1, x2), all point pairs.

    Admissible maps are non-expansive from the variant-space pseudo-metric to
    the original-space pseudo-metric, so their max violation is <= 0 up to
    float slack; non-admissible maps may genuinely violate the bound.
    """
    if not (phi.members and phi_prime.members):
        raise EmptySpaceError("non-expansiveness check needs nonempty spaces")
    d_phi = domain_distance_matrix(phi)
    d_prime = domain_distance_matrix(phi_prime)
    perm = np.asarray(s.perm)
    excess = d_phi[np.ix_(perm, perm)] - d_prime
    flat = int(np.argmax(excess))
    i, j = divmod(flat, phi.domain.size)
    return NonExpansivenessReport(float(excess[i, j]), (i, j))


def check_action_continuity(
    phi: MeasurementSpace,
    phi_prime: MeasurementSpace,
    ops: Sequence[DomainMap],
    delta_mem: float = DEFAULT_DELTA_MEM,
) -> NonExpansivenessReport:
    """Worst violation of the right-action continuity bound over all quadruples.

    For measurements f, g and admissible maps t, s the composition satisfies
    ||f t - g s||_inf <= D_aut(t, s) + ||f - g||_inf; the report carries the
    max of (left side - right side) with witness (f, g, t, s) indices.
    """
    if not phi.members:
        raise EmptySpaceError("continuity check needs a nonempty space")
    for k, s in enumerate(ops):
        if not is_operation(s, phi, phi_prime, delta_mem).admissible:
            raise ValueError(f"op {k} is not admissible for (phi, phi_prime)")
    m = phi.matrix
    member_gaps = np.max(np.abs(m[:, None, :] - m[None, :, :]), axis=2)
    worst = NonExpansivenessReport(-math.inf, (-1, -1, -1, -1))
    for a, t in enumerate(ops):
        ta = m[:, np.asarray(t.perm)]
        for b, s in enumerate(ops):
            sb = m[:, np.asarray(s.perm)]
            d_aut = aut_pseudometric(phi, t, s).value
            lhs = np.max(np.abs(ta[:, None, :] - sb[None, :, :]), axis=2)
            excess = lhs - (d_aut + member_gaps)
            flat = int(np.argmax(excess))
            i, j = divmod(flat, len(phi.members))
            if float(excess[i, j]) > worst.max_violation:
                worst = NonExpansivenessReport(float(excess[i, j]), (i, j, a, b))
    return worst


def all_bijections(domain: FiniteDomain) -> list[DomainMap]:
    """Every bijection of a small domain; opt-in and capped at 7 points."""
    if domain.size > 7:
        raise ValueError(
            f"refusing to enumerate {math.factorial(domain.size)} bijections; "
            "supply an explicit candidate list instead"
        )
    return [
        DomainMap(domain, perm)
        for perm in itertools.permutations(range(domain.size))
    ]
