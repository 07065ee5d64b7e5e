"""Loading, resolving and saving instance documents.

Loading is atomic: JSON parsing, schema validation and resolution into core
objects either all succeed or fail with a diagnostic naming the offending
field, and nothing partially built escapes.  Saving writes a canonical form
(sorted keys, two-space indent, full-precision decimal floats) so that
save(load(f)) is byte-identical for canonicalized files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import ValidationError

from .core import (
    DomainMap,
    FiniteDomain,
    Measurement,
    MeasurementSpace,
    PerceptionTriple,
    PgeneoError,
    uniform_distance,
)
from .operators import Certificate, OperatorPair, TransformationMap
from .schemas import CertificateModel, InstanceDoc


class InstanceError(PgeneoError):
    """An instance document failed to parse, validate or resolve."""


@dataclass(frozen=True)
class Instance:
    """An instance document resolved into core objects, ready for checks."""

    doc: InstanceDoc
    domain: FiniteDomain
    spaces: dict[str, MeasurementSpace]
    ops: dict[str, DomainMap]
    triples: dict[str, PerceptionTriple]
    operators: dict[str, OperatorPair]

    @property
    def delta_mem(self) -> float:
        return self.doc.tolerances.delta_mem

    @property
    def delta_num(self) -> float:
        return self.doc.tolerances.delta_num


def resolve(doc: InstanceDoc) -> Instance:
    """Build core objects from a schema-valid document.

    Duplicate members inside one space (under the document's membership
    tolerance) are rejected rather than merged: tabulated operators refer to
    members by position, so silently dropping one would shift indices.
    """
    delta_mem = doc.tolerances.delta_mem
    domain = FiniteDomain(tuple(doc.domain.points))
    spaces: dict[str, MeasurementSpace] = {}
    for name, arrays in doc.spaces.items():
        members = tuple(Measurement(domain, np.asarray(a, float)) for a in arrays)
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                if uniform_distance(members[i], members[j]) <= delta_mem:
                    raise InstanceError(
                        f"spaces[{name!r}]: members {i} and {j} coincide under "
                        f"delta_mem={delta_mem}"
                    )
        spaces[name] = MeasurementSpace(domain, members, name)
    ops = {name: DomainMap(domain, tuple(perm)) for name, perm in doc.ops.items()}
    triples = {
        name: PerceptionTriple(
            spaces[t.phi], spaces[t.phi_prime], tuple(ops[o] for o in t.ops)
        )
        for name, t in doc.triples.items()
    }
    operators: dict[str, OperatorPair] = {}
    for name, spec in doc.operators.items():
        source, target = triples[spec.source], triples[spec.target]
        src_spec, tgt_spec = doc.triples[spec.source], doc.triples[spec.target]
        assignment = tuple(
            tgt_spec.ops.index(spec.transform[s_name]) for s_name in src_spec.ops
        )
        tm = TransformationMap(source.ops, target.ops, assignment)
        operators[name] = OperatorPair(
            source,
            target,
            tuple(Measurement(domain, np.asarray(a, float)) for a in spec.on_phi),
            tuple(Measurement(domain, np.asarray(a, float)) for a in spec.on_phi_prime),
            tm,
        )
    return Instance(doc, domain, spaces, ops, triples, operators)


def parse_instance(text: str) -> tuple[InstanceDoc, Instance]:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"not valid JSON: {e}") from e
    try:
        doc = InstanceDoc.model_validate(raw)
    except ValidationError as e:
        lines = [
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in e.errors()
        ]
        raise InstanceError("invalid instance document:\n  " + "\n  ".join(lines)) from e
    return doc, resolve(doc)


def load_instance(path: Union[str, Path]) -> tuple[InstanceDoc, Instance]:
    """Read, validate and resolve an instance file; fails atomically."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InstanceError(f"cannot read {path}: {e}") from e
    return parse_instance(text)


def canonical_text(doc: InstanceDoc) -> str:
    payload = doc.model_dump(mode="json", exclude_none=True)
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def save_instance(doc: InstanceDoc, path: Union[str, Path]) -> None:
    Path(path).write_text(canonical_text(doc))


def certificate_model(cert: Certificate) -> CertificateModel:
    return CertificateModel(
        certified=cert.certified,
        equivariance_residual=cert.equivariance_residual,
        lipschitz_excess=cert.lipschitz_excess,
        lipschitz_excess_prime=cert.lipschitz_excess_prime,
        codomain_ok=cert.codomain_ok,
        homomorphism_ok=cert.homomorphism_ok,
        delta_mem=cert.delta_mem,
        delta_num=cert.delta_num,
    )
