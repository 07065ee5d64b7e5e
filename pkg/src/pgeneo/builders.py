"""Builders for the bundled demonstration instances.

``squares_instance`` realizes the nested-squares translation setup on a
discrete grid: measurements supported in a square, their translates, and the
operator that cuts every image down to an inner square.  The translation is
stored as a grid permutation (modular in the coordinates); geometry in which
a square or its translate would leave the grid is rejected rather than
wrapped, so supports never cross the boundary.

``digit_instance`` is the symmetry-breaking illustration: a coarse raster of
the digit 6 whose quarter turn is declared an admissible variant while the
half turn (which reads as a 9) is not.
"""

from __future__ import annotations

import numpy as np

from .core import PgeneoError
from .schemas import DomainSpec, InstanceDoc, OperatorSpec, TripleSpec


class GeometryError(PgeneoError):
    """Requested squares do not fit inside the grid."""


def _dedup_exactish(arrays: list[np.ndarray], delta: float) -> list[np.ndarray]:
    kept: list[np.ndarray] = []
    for a in arrays:
        if all(float(np.max(np.abs(a - b))) > delta for b in kept):
            kept.append(a)
    return kept


def _square_mask(grid: int, r0: int, r1: int, c0: int, c1: int) -> np.ndarray:
    mask = np.zeros((grid, grid))
    mask[r0 : r1 + 1, c0 : c1 + 1] = 1.0
    return mask


def squares_instance(
    grid: int = 16,
    side: int = 8,
    margin: int = 2,
    shift: tuple[int, int] = (4, 4),
    spoil_overlap: bool = False,
    delta_mem: float = 1e-9,
) -> InstanceDoc:
    """Nested-squares instance: outer squares carry the measurements, inner
    squares carry the cut images, one translation relates the two copies.

    With ``spoil_overlap`` the variant-side image of the overlap-supported
    member is forced equal to its original-side image, which breaks the
    codomain containment: the two tabulated maps may legitimately differ on
    the intersection of their domains, and this variant shows why.
    """
    dr, dc = int(shift[0]), int(shift[1])
    if grid < 2 or not (0 < side <= grid - 1):
        raise GeometryError(f"side {side} does not fit a {grid}x{grid} grid")
    if not (0 < margin < side):
        raise GeometryError(f"margin must satisfy 0 < margin < side, got {margin}")
    for d in (dr, dc):
        if d < 0 or side + d > grid - 1:
            raise GeometryError(f"translated square leaves the {grid}x{grid} grid")

    outer = _square_mask(grid, 0, side, 0, side)
    outer_moved = _square_mask(grid, dr, side + dr, dc, side + dc)
    inner = _square_mask(grid, margin, side - margin, margin, side - margin)
    inner_moved = _square_mask(grid, margin + dr, side - margin + dr, margin + dc, side - margin + dc)
    overlap = outer * outer_moved

    rows = np.arange(grid)[:, None] * np.ones(grid)[None, :]
    cols = np.ones(grid)[:, None] * np.arange(grid)[None, :]
    half = side / 2.0
    templates = [
        outer,
        (cols / side) * outer,
        (1.0 - np.maximum(np.abs(rows - half), np.abs(cols - half)) / half).clip(0) * outer,
    ]
    has_overlap = bool(np.any(overlap))
    if has_overlap:
        templates.append(overlap)

    # the translation op: point (r, c) is sent to (r - dr, c - dc) modulo the
    # grid, so right composition moves supports forward by (dr, dc)
    def idx(r: int, c: int) -> int:
        return r * grid + c

    perm = [idx((r - dr) % grid, (c - dc) % grid) for r in range(grid) for c in range(grid)]

    def moved(a: np.ndarray) -> np.ndarray:
        return a.reshape(-1)[perm].reshape(grid, grid)

    phi = _dedup_exactish(templates, delta_mem)
    phi_prime_raw = [moved(a) for a in phi] + ([overlap] if has_overlap else [])
    phi_prime = _dedup_exactish(phi_prime_raw, delta_mem)
    psi = _dedup_exactish([a * inner for a in phi], delta_mem)
    psi_prime = _dedup_exactish([a * inner_moved for a in phi_prime], delta_mem)

    on_phi = [a * inner for a in phi]
    on_phi_prime = [a * inner_moved for a in phi_prime]
    if spoil_overlap:
        if not has_overlap or dr == dc == 0:
            raise GeometryError("no distinct overlap member to spoil")
        k = next(
            i for i, a in enumerate(phi_prime) if np.array_equal(a, overlap)
        )
        on_phi_prime[k] = overlap * inner

    flat = lambda arrays: [a.reshape(-1).tolist() for a in arrays]
    op_name = "translate"
    points = [f"r{r}c{c}" for r in range(grid) for c in range(grid)]
    return InstanceDoc(
        domain=DomainSpec(points=points),
        spaces={
            "Phi": flat(phi),
            "PhiPrime": flat(phi_prime),
            "Psi": flat(psi),
            "PsiPrime": flat(psi_prime),
        },
        ops={op_name: perm},
        triples={
            "images": TripleSpec(phi="Phi", phi_prime="PhiPrime", ops=[op_name]),
            "cut_images": TripleSpec(phi="Psi", phi_prime="PsiPrime", ops=[op_name]),
        },
        operators={
            "cut": OperatorSpec(
                source="images",
                target="cut_images",
                on_phi=flat(on_phi),
                on_phi_prime=flat(on_phi_prime),
                transform={op_name: op_name},
            )
        },
    )


_SIX = np.array(
    [
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 1, 1, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0],
        [0, 1, 1, 1, 1, 0, 0, 0],
        [0, 1, 0, 0, 0, 1, 0, 0],
        [0, 1, 0, 0, 0, 1, 0, 0],
        [0, 0, 1, 1, 1, 0, 0, 0],
    ],
    dtype=float,
)


def digit_instance() -> InstanceDoc:
    """Coarse raster of a 6 where only the quarter turn keeps its meaning.

    The half turn is listed among the ops but deliberately left out of the
    triple: composing the raster with it lands outside the variant space
    (the glyph now reads as a 9), so it is not an admissible operation.
    """
    grid = _SIX.shape[0]

    def idx(r: int, c: int) -> int:
        return r * grid + c

    # right-composing with this permutation rotates a raster a quarter turn
    quarter = [idx(c, grid - 1 - r) for r in range(grid) for c in range(grid)]
    identity = list(range(grid * grid))

    def compose(p, q):
        return [p[j] for j in q]

    half = compose(quarter, quarter)
    three_quarter = compose(half, quarter)

    six = _SIX.reshape(-1)
    six_quarter = six[quarter]
    points = [f"r{r}c{c}" for r in range(grid) for c in range(grid)]
    return InstanceDoc(
        domain=DomainSpec(points=points),
        spaces={
            "Phi": [six.tolist()],
            "PhiPrime": [six.tolist(), six_quarter.tolist()],
        },
        ops={
            "id": identity,
            "quarter_turn": quarter,
            "half_turn": half,
            "three_quarter_turn": three_quarter,
        },
        triples={
            "rotations": TripleSpec(
                phi="Phi", phi_prime="PhiPrime", ops=["id", "quarter_turn"]
            )
        },
    )
