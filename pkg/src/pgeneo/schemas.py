"""Pydantic models: the JSON instance document and the service wire formats.

An instance file is a single JSON document with fixed top-level fields
(version, domain, spaces, ops, triples, operators, tolerances).  Structural
invariants - array lengths, permutation validity, name resolution - are
enforced here so that a document that validates always resolves into
in-memory objects.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class DomainSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    points: list[str] = Field(min_length=1)

    @field_validator("points")
    @classmethod
    def _distinct(cls, v: list[str]) -> list[str]:
        if len(set(v)) != len(v):
            raise ValueError("point labels must be pairwise distinct")
        return v


class TripleSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    phi: str
    phi_prime: str
    ops: list[str] = []


class CertificateModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    certified: bool
    equivariance_residual: float
    lipschitz_excess: float
    lipschitz_excess_prime: float
    codomain_ok: bool
    homomorphism_ok: bool
    delta_mem: float
    delta_num: float


class OperatorSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    source: str
    target: str
    on_phi: list[list[float]]
    on_phi_prime: list[list[float]]
    transform: dict[str, str]
    certificate: Optional[CertificateModel] = None


class ToleranceSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    delta_mem: float = 1e-9
    delta_num: float = 1e-12

    @field_validator("delta_mem", "delta_num")
    @classmethod
    def _positive(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("tolerances must be positive")
        return v


class InstanceDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    version: int = 1
    domain: DomainSpec
    spaces: dict[str, list[list[float]]] = {}
    ops: dict[str, list[int]] = {}
    triples: dict[str, TripleSpec] = {}
    operators: dict[str, OperatorSpec] = {}
    tolerances: ToleranceSpec = ToleranceSpec()

    @field_validator("version")
    @classmethod
    def _version(cls, v: int) -> int:
        if v != 1:
            raise ValueError(f"unsupported instance version {v}")
        return v

    @model_validator(mode="after")
    def _cross_checks(self) -> "InstanceDoc":
        n = len(self.domain.points)
        for name, arrays in self.spaces.items():
            for k, arr in enumerate(arrays):
                if len(arr) != n:
                    raise ValueError(
                        f"spaces[{name!r}][{k}]: expected {n} values, got {len(arr)}"
                    )
        for name, perm in self.ops.items():
            if sorted(perm) != list(range(n)):
                raise ValueError(
                    f"ops[{name!r}]: not a permutation of 0..{n - 1}"
                )
        for name, t in self.triples.items():
            for field_name, ref in (("phi", t.phi), ("phi_prime", t.phi_prime)):
                if ref not in self.spaces:
                    raise ValueError(
                        f"triples[{name!r}].{field_name}: unknown space {ref!r}"
                    )
            for op_name in t.ops:
                if op_name not in self.ops:
                    raise ValueError(f"triples[{name!r}].ops: unknown op {op_name!r}")
        for name, op in self.operators.items():
            for field_name, ref in (("source", op.source), ("target", op.target)):
                if ref not in self.triples:
                    raise ValueError(
                        f"operators[{name!r}].{field_name}: unknown triple {ref!r}"
                    )
            src, tgt = self.triples[op.source], self.triples[op.target]
            for side, images, space_ref in (
                ("on_phi", op.on_phi, src.phi),
                ("on_phi_prime", op.on_phi_prime, src.phi_prime),
            ):
                want = len(self.spaces[space_ref])
                if len(images) != want:
                    raise ValueError(
                        f"operators[{name!r}].{side}: expected {want} images, "
                        f"got {len(images)}"
                    )
                for k, arr in enumerate(images):
                    if len(arr) != n:
                        raise ValueError(
                            f"operators[{name!r}].{side}[{k}]: expected {n} values"
                        )
            if set(op.transform.keys()) != set(src.ops):
                raise ValueError(
                    f"operators[{name!r}].transform: must assign exactly the "
                    f"ops of triple {op.source!r}"
                )
            for s_name, q_name in op.transform.items():
                if q_name not in tgt.ops:
                    raise ValueError(
                        f"operators[{name!r}].transform[{s_name!r}]: {q_name!r} "
                        f"is not an op of triple {op.target!r}"
                    )
        return self


# ---------------------------------------------------------------------------
# service wire formats


class AggregatorModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["max", "min", "convex", "power_mean"]
    weights: Optional[list[float]] = None
    power: Optional[float] = None


class FailureModel(BaseModel):
    op: str
    member: int
    nearest: Optional[int]
    gap: float


class ValidateRequest(BaseModel):
    instance: InstanceDoc
    triple: str


class ValidateResponse(BaseModel):
    triple: str
    admissible: bool
    vacuous: bool
    failures: list[FailureModel] = []


class CertifyRequest(BaseModel):
    instance: InstanceDoc
    operator: str


class CodomainFailureModel(BaseModel):
    side: str
    member: int
    nearest: Optional[int]
    gap: float


class CertifyResponse(BaseModel):
    operator: str
    certified: bool
    certificate: CertificateModel
    codomain_failures: list[CodomainFailureModel] = []


class CombineRequest(BaseModel):
    instance: InstanceDoc
    aggregator: AggregatorModel
    operators: list[str] = Field(min_length=1)
    output: str
    seed: int = 0
    audit_trials: int = 100_000


class CombineResponse(BaseModel):
    output: str
    certified: bool
    reason: str = ""
    certificate: Optional[CertificateModel] = None
    # updated document, present only when the combination certified
    instance: Optional[InstanceDoc] = None


class CoverRequest(BaseModel):
    instance: InstanceDoc
    target: Literal["domain", "ops", "operators"]
    epsilon: float
    # which part of the instance to cover, depending on target
    space: Optional[str] = None        # target=domain: space inducing the metric
    triple: Optional[str] = None       # target=ops: triple whose ops are covered
    operators: Optional[list[str]] = None  # target=operators: family members


class NetModel(BaseModel):
    epsilon: float
    size: int
    center_indices: list[int]
    center_labels: list[str]
    covering_radius_achieved: float
    assignment: list[int]
    histogram: dict[str, int]


class CoverResponse(BaseModel):
    target: str
    net: NetModel
    scope_note: str


class SquaresRequest(BaseModel):
    grid: int = 16
    side: int = 8
    margin: int = 2
    shift: tuple[int, int] = (4, 4)


class InstanceResponse(BaseModel):
    instance: InstanceDoc
