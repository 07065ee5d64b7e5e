"""Command-line client for the pgeneo service handlers.

Each subcommand loads an instance file, builds the corresponding request
model, calls the same handler the HTTP service exposes, and renders the
response.  Exit codes are a stable scripting contract: 0 when the requested
check succeeded, 1 when it evaluated to "no" (inadmissible, uncertified),
2 when the request could not be evaluated (bad file, unknown name, invalid
parameters).
"""

from __future__ import annotations

import sys
from typing import Optional

import click

from .builders import squares_instance
from .core import PgeneoError
from .instances import load_instance, save_instance
from .schemas import (
    AggregatorModel,
    CertifyRequest,
    CombineRequest,
    CoverRequest,
    InstanceDoc,
    ValidateRequest,
)
from .service import run_certify, run_combine, run_cover, run_validate

EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


def _fail_input(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_INPUT_ERROR)


def _load(path: str, delta_mem: Optional[float], delta_num: Optional[float]) -> InstanceDoc:
    try:
        doc, _ = load_instance(path)
    except PgeneoError as e:
        _fail_input(str(e))
    if delta_mem is not None:
        doc.tolerances.delta_mem = delta_mem
    if delta_num is not None:
        doc.tolerances.delta_num = delta_num
    return doc


def _emit(response, as_json: bool, text: str) -> None:
    if as_json:
        click.echo(response.model_dump_json(indent=2))
    else:
        click.echo(text)


@click.group()
def main() -> None:
    """Validate, certify, combine and cover finite operator instances."""


instance_opt = click.option("--instance", "path", required=True, type=click.Path(), help="Instance file (JSON).")
delta_mem_opt = click.option("--delta-mem", type=float, default=None, help="Override the membership tolerance.")
delta_num_opt = click.option("--delta-num", type=float, default=None, help="Override the numeric slack.")
json_opt = click.option("--json", "as_json", is_flag=True, help="Emit the machine-readable response.")


@main.command()
@instance_opt
@click.option("--triple", required=True, help="Name of the perception triple to validate.")
@delta_mem_opt
@delta_num_opt
@json_opt
def validate(path: str, triple: str, delta_mem, delta_num, as_json: bool) -> None:
    """Check that every op of a triple carries the originals into the variants."""
    doc = _load(path, delta_mem, delta_num)
    try:
        resp = run_validate(ValidateRequest(instance=doc, triple=triple))
    except (PgeneoError, ValueError) as e:
        _fail_input(str(e))
    lines = [f"triple {resp.triple!r}: {'admissible' if resp.admissible else 'NOT admissible'}"]
    if resp.vacuous:
        lines.append("note: the triple lists no ops, so the check is vacuous")
    for f in resp.failures:
        lines.append(
            f"  op {f.op!r}: member {f.member} lands outside the variant space "
            f"(nearest member {f.nearest}, gap {f.gap:.6g})"
        )
    _emit(resp, as_json, "\n".join(lines))
    sys.exit(0 if resp.admissible else EXIT_CHECK_FAILED)


@main.command()
@instance_opt
@click.option("--operator", required=True, help="Name of the operator pair to certify.")
@delta_mem_opt
@delta_num_opt
@json_opt
def certify(path: str, operator: str, delta_mem, delta_num, as_json: bool) -> None:
    """Certify an operator pair: equivariance, non-expansiveness, codomains, transform."""
    doc = _load(path, delta_mem, delta_num)
    try:
        resp = run_certify(CertifyRequest(instance=doc, operator=operator))
    except (PgeneoError, ValueError) as e:
        _fail_input(str(e))
    c = resp.certificate
    lines = [
        f"operator {resp.operator!r}: {'CERTIFIED' if resp.certified else 'NOT certified'}",
        f"  equivariance residual   {c.equivariance_residual:.6g}",
        f"  lipschitz excess        {c.lipschitz_excess:.6g}",
        f"  lipschitz excess (var.) {c.lipschitz_excess_prime:.6g}",
        f"  codomain ok             {c.codomain_ok}",
        f"  homomorphism ok         {c.homomorphism_ok}",
    ]
    for f in resp.codomain_failures:
        lines.append(
            f"  codomain failure on {f.side}: member {f.member} "
            f"(nearest {f.nearest}, gap {f.gap:.6g})"
        )
    _emit(resp, as_json, "\n".join(lines))
    sys.exit(0 if resp.certified else EXIT_CHECK_FAILED)


@main.command()
@instance_opt
@click.option("--aggregator", "agg_spec", required=True,
              help="max | min | convex:W1,W2,... | pmean:P:W1,W2,...")
@click.option("--operators", required=True, help="Comma-separated operator names to fuse.")
@click.option("--output", required=True, help="Name for the new operator.")
@click.option("--seed", type=int, default=0, help="Seed for the aggregator audit.")
@click.option("--audit-trials", type=int, default=100_000, help="Samples in the aggregator audit.")
@delta_mem_opt
@delta_num_opt
@json_opt
def combine(path, agg_spec, operators, output, seed, audit_trials, delta_mem, delta_num, as_json):
    """Fuse certified operators; on success the result is written back to the file."""
    doc = _load(path, delta_mem, delta_num)
    try:
        agg = _parse_aggregator(agg_spec)
        req = CombineRequest(
            instance=doc,
            aggregator=agg,
            operators=[s.strip() for s in operators.split(",") if s.strip()],
            output=output,
            seed=seed,
            audit_trials=audit_trials,
        )
        resp = run_combine(req)
    except (PgeneoError, ValueError) as e:
        _fail_input(str(e))
    if not resp.certified:
        _emit(resp, as_json, f"combine failed: {resp.reason}")
        sys.exit(EXIT_CHECK_FAILED)
    save_instance(resp.instance, path)
    _emit(resp, as_json, f"wrote certified operator {resp.output!r} into {path}")
    sys.exit(0)


def _parse_aggregator(spec: str) -> AggregatorModel:
    head, _, rest = spec.partition(":")
    head = head.strip().lower()
    if head in ("max", "min"):
        if rest:
            raise ValueError(f"{head} takes no parameters")
        return AggregatorModel(kind=head)
    if head == "convex":
        return AggregatorModel(kind="convex", weights=_parse_weights(rest))
    if head in ("pmean", "power_mean"):
        p_text, _, w_text = rest.partition(":")
        return AggregatorModel(
            kind="power_mean", power=float(p_text), weights=_parse_weights(w_text)
        )
    raise ValueError(f"unknown aggregator {spec!r}")


def _parse_weights(text: str) -> list[float]:
    if not text.strip():
        raise ValueError("missing weights")
    return [float(x) for x in text.split(",")]


@main.command()
@instance_opt
@click.option("--target", type=click.Choice(["domain", "ops", "operators"]), required=True)
@click.option("--epsilon", type=float, required=True)
@click.option("--space", default=None, help="Space inducing the metric (target=domain).")
@click.option("--triple", default=None, help="Triple whose ops are covered (target=ops).")
@click.option("--operators", default=None, help="Comma-separated family (target=operators).")
@delta_mem_opt
@delta_num_opt
@json_opt
def cover(path, target, epsilon, space, triple, operators, delta_mem, delta_num, as_json):
    """Build and verify a greedy epsilon-net over points, ops or an operator family."""
    doc = _load(path, delta_mem, delta_num)
    try:
        req = CoverRequest(
            instance=doc,
            target=target,
            epsilon=epsilon,
            space=space,
            triple=triple,
            operators=[s.strip() for s in operators.split(",")] if operators else None,
        )
        resp = run_cover(req)
    except (PgeneoError, ValueError) as e:
        _fail_input(str(e))
    net = resp.net
    lines = [
        f"net over {resp.target}: {net.size} centers at epsilon {net.epsilon:g}",
        f"  covering radius achieved {net.covering_radius_achieved:.6g}",
        f"  centers: {', '.join(net.center_labels)}",
        "  assignment histogram:",
    ]
    for label in net.center_labels:
        lines.append(f"    {label}: {net.histogram.get(label, 0)}")
    lines.append(f"  note: {resp.scope_note}")
    _emit(resp, as_json, "\n".join(lines))
    sys.exit(0)


@main.command("demo-squares")
@click.option("--grid", type=int, default=16, help="Grid side length.")
@click.option("--side", type=int, default=8, help="Side of the outer square.")
@click.option("--margin", type=int, default=2, help="Margin of the inner square.")
@click.option("--shift", default="4,4", help="Translation vector, e.g. 4,4.")
@click.option("--output", "out_path", required=True, type=click.Path(), help="Where to write the instance.")
def demo_squares(grid, side, margin, shift, out_path) -> None:
    """Write the nested-squares translation instance with its cutting operator."""
    try:
        parts = [int(x) for x in shift.split(",")]
        if len(parts) != 2:
            raise ValueError("shift must be two integers, e.g. 4,4")
        doc = squares_instance(grid, side, margin, (parts[0], parts[1]))
    except (PgeneoError, ValueError) as e:
        _fail_input(str(e))
    save_instance(doc, out_path)
    click.echo(f"wrote {out_path} (grid {grid}x{grid}, side {side}, margin {margin}, shift {shift})")
    sys.exit(0)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("pgeneo.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
