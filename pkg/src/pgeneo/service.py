"""FastAPI service exposing validation, certification, combination and covering.

The service is stateless: every request carries a full instance document and
the response carries verdicts (and, for /combine, the updated document).  A
negative verdict - inadmissible triple, uncertified operator - is a normal
200 response; HTTP 400 is reserved for requests that cannot be evaluated at
all (unknown names, invalid weights, bad geometry).  The CLI calls the same
``run_*`` handlers in process.
"""

from __future__ import annotations

from collections import Counter

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .builders import squares_instance
from .core import PgeneoError
from .covering import cover_domain, cover_operations, cover_operator_family
from .instances import Instance, InstanceError, certificate_model, resolve
from .operations import validate_perception_triple
from .operators import (
    Aggregator,
    AuditError,
    ConvexityError,
    certify,
    combine,
    convex_combine,
)
from .schemas import (
    CertifyRequest,
    CertifyResponse,
    CodomainFailureModel,
    CombineRequest,
    CombineResponse,
    CoverRequest,
    CoverResponse,
    FailureModel,
    InstanceResponse,
    NetModel,
    OperatorSpec,
    SquaresRequest,
    ValidateRequest,
    ValidateResponse,
)

SCOPE_NOTE = (
    "coverage is verified exhaustively for the supplied finite collection only; "
    "no claim is made about any larger space"
)


def run_validate(req: ValidateRequest) -> ValidateResponse:
    inst = resolve(req.instance)
    if req.triple not in inst.triples:
        raise InstanceError(f"unknown triple {req.triple!r}")
    triple = inst.triples[req.triple]
    report = validate_perception_triple(triple, inst.delta_mem)
    op_names = req.instance.triples[req.triple].ops
    failures = [
        FailureModel(op=op_names[k], member=f.member, nearest=f.nearest, gap=f.gap)
        for k, op_report in enumerate(report.op_reports)
        for f in op_report.failures
    ]
    return ValidateResponse(
        triple=req.triple,
        admissible=report.admissible,
        vacuous=report.vacuous,
        failures=failures,
    )


def run_certify(req: CertifyRequest) -> CertifyResponse:
    inst = resolve(req.instance)
    if req.operator not in inst.operators:
        raise InstanceError(f"unknown operator {req.operator!r}")
    cert = certify(inst.operators[req.operator], inst.delta_mem, inst.delta_num)
    return CertifyResponse(
        operator=req.operator,
        certified=cert.certified,
        certificate=certificate_model(cert),
        codomain_failures=[
            CodomainFailureModel(side=f.side, member=f.member, nearest=f.nearest, gap=f.gap)
            for f in cert.codomain_failures
        ],
    )


def run_combine(req: CombineRequest) -> CombineResponse:
    inst = resolve(req.instance)
    if req.output in req.instance.operators:
        raise InstanceError(f"operator {req.output!r} already exists in the instance")
    parts = []
    for name in req.operators:
        if name not in inst.operators:
            raise InstanceError(f"unknown operator {name!r}")
        parts.append(inst.operators[name])
    spec = req.aggregator
    try:
        if spec.kind == "convex":
            pair, cert = convex_combine(
                parts, spec.weights or [], inst.delta_mem, inst.delta_num
            )
        else:
            agg = Aggregator(kind=spec.kind, weights=_weights(spec), power=spec.power)
            pair, cert = combine(
                agg,
                parts,
                inst.delta_mem,
                inst.delta_num,
                audit_trials=req.audit_trials,
                seed=req.seed,
            )
    except (ConvexityError, AuditError) as e:
        return CombineResponse(output=req.output, certified=False, reason=str(e))
    if not cert.certified:
        return CombineResponse(
            output=req.output,
            certified=False,
            reason="combined operator failed certification",
            certificate=certificate_model(cert),
        )
    head = req.instance.operators[req.operators[0]]
    updated = req.instance.model_copy(deep=True)
    updated.operators[req.output] = OperatorSpec(
        source=head.source,
        target=head.target,
        on_phi=[img.values.tolist() for img in pair.on_phi],
        on_phi_prime=[img.values.tolist() for img in pair.on_phi_prime],
        transform=dict(head.transform),
        certificate=certificate_model(cert),
    )
    return CombineResponse(
        output=req.output,
        certified=True,
        certificate=certificate_model(cert),
        instance=updated,
    )


def _weights(spec) -> tuple[float, ...] | None:
    return tuple(spec.weights) if spec.weights is not None else None


def run_cover(req: CoverRequest) -> CoverResponse:
    inst = resolve(req.instance)
    if req.target == "domain":
        net, labels = _cover_domain(req, inst)
    elif req.target == "ops":
        net, labels = _cover_ops(req, inst)
    else:
        net, labels = _cover_operators(req, inst)
    histogram = Counter(labels[net.assignment[i]] for i in range(len(net.assignment)))
    return CoverResponse(
        target=req.target,
        net=NetModel(
            epsilon=net.epsilon,
            size=net.size,
            center_indices=list(net.center_indices),
            center_labels=[labels[k] for k in range(net.size)],
            covering_radius_achieved=net.covering_radius_achieved,
            assignment=list(net.assignment),
            histogram=dict(histogram),
        ),
        scope_note=SCOPE_NOTE,
    )


def _cover_domain(req: CoverRequest, inst: Instance):
    if not req.space or req.space not in inst.spaces:
        raise InstanceError("cover over the domain needs a known 'space' name")
    net = cover_domain(inst.spaces[req.space], req.epsilon, inst.delta_num)
    labels = [inst.domain.points[c] for c in net.center_indices]
    return net, labels


def _cover_ops(req: CoverRequest, inst: Instance):
    if not req.triple or req.triple not in inst.triples:
        raise InstanceError("cover over ops needs a known 'triple' name")
    triple = inst.triples[req.triple]
    if not triple.ops:
        raise InstanceError(f"triple {req.triple!r} has no ops to cover")
    net = cover_operations(
        triple.ops, triple.phi, req.epsilon, triple.phi_prime, inst.delta_mem
    )
    op_names = inst.doc.triples[req.triple].ops
    labels = [op_names[c] for c in net.center_indices]
    return net, labels


def _cover_operators(req: CoverRequest, inst: Instance):
    if not req.operators:
        raise InstanceError("cover over operators needs a nonempty 'operators' list")
    family = []
    for name in req.operators:
        if name not in inst.operators:
            raise InstanceError(f"unknown operator {name!r}")
        pair = inst.operators[name]
        if not certify(pair, inst.delta_mem, inst.delta_num).certified:
            raise InstanceError(f"operator {name!r} is not certified; cover needs a certified family")
        family.append(pair)
    net = cover_operator_family(family, req.epsilon)
    labels = [req.operators[c] for c in net.center_indices]
    return net, labels


def run_demo_squares(req: SquaresRequest) -> InstanceResponse:
    return InstanceResponse(
        instance=squares_instance(req.grid, req.side, req.margin, tuple(req.shift))
    )


app = FastAPI(
    title="pgeneo",
    description="Admissibility, certification and covering checks for "
    "partially equivariant non-expansive operators on finite instances.",
)


@app.exception_handler(PgeneoError)
async def _domain_error(request: Request, exc: PgeneoError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(ValueError)
async def _value_error(request: Request, exc: ValueError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/validate", response_model=ValidateResponse)
def validate_endpoint(req: ValidateRequest) -> ValidateResponse:
    return run_validate(req)


@app.post("/certify", response_model=CertifyResponse)
def certify_endpoint(req: CertifyRequest) -> CertifyResponse:
    return run_certify(req)


@app.post("/combine", response_model=CombineResponse)
def combine_endpoint(req: CombineRequest) -> CombineResponse:
    return run_combine(req)


@app.post("/cover", response_model=CoverResponse)
def cover_endpoint(req: CoverRequest) -> CoverResponse:
    return run_cover(req)


@app.post("/demo-squares", response_model=InstanceResponse)
def demo_squares_endpoint(req: SquaresRequest) -> InstanceResponse:
    return run_demo_squares(req)
