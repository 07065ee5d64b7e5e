import numpy as np
import pytest

from pgeneo import (
    DomainMap,
    EmptySpaceError,
    Measurement,
    MeasurementSpace,
    OperatorPair,
    aut_pseudometric,
    domain_pseudometric,
    operator_distance,
    pgeneo_distance,
    pi_distance,
    right_action,
    space_from_arrays,
    uniform_distance,
)
from gen import (
    affine_family,
    make_domain,
    rand_measurement,
    rand_perm,
    rand_space,
    step_function_setup,
)

DELTA_NUM = 1e-12


def test_domain_pseudometric_constant_space_collapses():
    dom = make_domain(4)
    omega = space_from_arrays(dom, [[2.5] * 4], "const")
    for i in range(4):
        for j in range(4):
            assert domain_pseudometric(omega, i, j).value == 0.0


def test_domain_pseudometric_hand_value():
    dom = make_domain(3)
    omega = space_from_arrays(dom, [[0.0, 1.0, 2.0], [5.0, 5.0, 0.0]], "omega")
    report = domain_pseudometric(omega, 0, 2)
    # brute force over both members: max(|0-2|, |5-0|) = 5, witness member 1
    assert report.value == 5.0
    assert report.witness == (1,)
    assert domain_pseudometric(omega, 1, 1).value == 0.0


def test_domain_pseudometric_empty_space_is_an_error():
    dom = make_domain(2)
    with pytest.raises(EmptySpaceError):
        domain_pseudometric(MeasurementSpace(dom, (), "empty"), 0, 1)


def test_domain_pseudometric_witness_reproduces_value():
    rng = np.random.default_rng(3)
    omega = rand_space(rng, make_domain(5), 4, "omega")
    report = domain_pseudometric(omega, 0, 3)
    k = report.witness[0]
    assert abs(omega.members[k].values[0] - omega.members[k].values[3]) == report.value


def test_aut_pseudometric_examples():
    dom = make_domain(3)
    omega = space_from_arrays(dom, [[0.0, 1.0, 2.0]], "omega")
    ident = DomainMap.identity(dom)
    shift = DomainMap(dom, (1, 2, 0))
    assert aut_pseudometric(omega, ident, ident).value == 0.0
    report = aut_pseudometric(omega, ident, shift)
    # hand enumeration: |0-1|, |1-2|, |2-0| -> 2
    assert report.value == 2.0
    k, i = report.witness
    f = omega.members[k]
    assert abs(f.values[ident.perm[i]] - f.values[shift.perm[i]]) == 2.0


def test_aut_pseudometric_is_uniform_pseudometric_of_domain_metric():
    rng = np.random.default_rng(5)
    dom = make_domain(6)
    omega = rand_space(rng, dom, 4, "omega")
    s1, s2 = rand_perm(rng, dom), rand_perm(rng, dom)
    expected = max(
        domain_pseudometric(omega, s1.perm[x], s2.perm[x]).value
        for x in range(dom.size)
    )
    assert aut_pseudometric(omega, s1, s2).value == expected


def test_pi_distance_reduces_and_sums():
    rng = np.random.default_rng(9)
    dom = make_domain(5)
    phi = rand_space(rng, dom, 3, "phi")
    phi_prime = rand_space(rng, dom, 4, "phi_prime")
    s, t, t2 = rand_perm(rng, dom), rand_perm(rng, dom), rand_perm(rng, dom)
    assert pi_distance((s, t), (s, t), phi, phi_prime) == 0.0
    assert pi_distance((s, t), (s, t2), phi, phi_prime) == aut_pseudometric(
        phi_prime, t, t2
    ).value
    s2 = rand_perm(rng, dom)
    total = pi_distance((s, t), (s2, t2), phi, phi_prime)
    assert total == aut_pseudometric(phi, s, s2).value + aut_pseudometric(
        phi_prime, t, t2
    ).value


def test_operator_distance_brute_force():
    rng = np.random.default_rng(13)
    dom = make_domain(4)
    out_dom = make_domain(5, "y")
    omega = rand_space(rng, dom, 3, "omega")
    images1 = [rand_measurement(rng, out_dom) for _ in omega.members]
    images2 = [rand_measurement(rng, out_dom) for _ in omega.members]
    report = operator_distance(omega, images1, images2)
    brute = max(uniform_distance(f, g) for f, g in zip(images1, images2))
    assert report.value == brute
    k, i = report.witness
    assert abs(images1[k].values[i] - images2[k].values[i]) == report.value
    assert operator_distance(omega, images1, images1).value == 0.0
    shifted = [Measurement(out_dom, f.values + 0.75) for f in images1]
    assert operator_distance(omega, images1, shifted).value == pytest.approx(0.75, abs=1e-15)
    with pytest.raises(ValueError):
        operator_distance(omega, images1[:-1], images2)


def test_pgeneo_distance_components_and_trivia():
    rng = np.random.default_rng(17)
    _, _, _, pairs = affine_family(rng, count=3)
    p1, p2 = pairs[0], pairs[1]
    assert pgeneo_distance(p1, p1) == 0.0
    d_phi = operator_distance(p1.source.phi, p1.on_phi, p2.on_phi).value
    d_prime = operator_distance(
        p1.source.phi_prime, p1.on_phi_prime, p2.on_phi_prime
    ).value
    assert pgeneo_distance(p1, p2) == max(d_phi, d_prime)


def test_pgeneo_distance_when_only_variant_side_differs():
    rng = np.random.default_rng(19)
    _, _, _, pairs = affine_family(rng, count=1)
    p = pairs[0]
    bumped = OperatorPair(
        p.source,
        p.target,
        p.on_phi,
        tuple(Measurement(f.domain, f.values) for f in p.on_phi_prime[:-1])
        + (Measurement(p.target.domain, p.on_phi_prime[-1].values + 0.25),),
        p.transform,
    )
    assert pgeneo_distance(p, bumped) == pytest.approx(0.25, abs=1e-15)


def test_pgeneo_distance_requires_shared_family():
    rng = np.random.default_rng(23)
    _, _, _, pairs_a = affine_family(rng, count=1)
    _, _, _, pairs_b = affine_family(rng, count=1)
    with pytest.raises(ValueError):
        pgeneo_distance(pairs_a[0], pairs_b[0])


def _axioms(dist, points, slack=DELTA_NUM):
    for a in points:
        assert dist(a, a) == 0.0
    for a in points:
        for b in points:
            d = dist(a, b)
            assert d >= 0.0
            assert d == dist(b, a)
    for a in points:
        for b in points:
            for c in points:
                assert dist(a, c) <= dist(a, b) + dist(b, c) + slack


def test_pseudometric_axioms_on_random_instances():
    rng = np.random.default_rng(29)
    dom = make_domain(6)
    omega = rand_space(rng, dom, 4, "omega")
    pts = list(range(dom.size))
    _axioms(lambda i, j: domain_pseudometric(omega, i, j).value, pts)
    maps = [rand_perm(rng, dom) for _ in range(5)]
    _axioms(lambda a, b: aut_pseudometric(omega, a, b).value, maps)
    phi_prime = rand_space(rng, dom, 3, "phi_prime")
    pairs = [(rand_perm(rng, dom), rand_perm(rng, dom)) for _ in range(4)]
    _axioms(lambda a, b: pi_distance(a, b, omega, phi_prime), pairs)


def test_right_composition_is_an_isometry_exactly():
    rng = np.random.default_rng(31)
    dom = make_domain(7)
    omega = rand_space(rng, dom, 5, "omega")
    for _ in range(25):
        r, s, t = (rand_perm(rng, dom) for _ in range(3))
        assert (
            aut_pseudometric(omega, r.compose(t), s.compose(t)).value
            == aut_pseudometric(omega, r, s).value
        )


def test_left_composition_bound():
    rng = np.random.default_rng(37)
    dom = make_domain(6)
    phi = rand_space(rng, dom, 4, "phi")
    for _ in range(25):
        t = rand_perm(rng, dom)
        # variant space contains the translated originals exactly
        from pgeneo import dedup_space

        phi_prime = dedup_space(
            dom,
            [right_action(f, t) for f in phi.members]
            + [rand_measurement(rng, dom)],
            "phi_prime",
        )
        r, s = rand_perm(rng, dom), rand_perm(rng, dom)
        lhs = aut_pseudometric(phi, t.compose(r), t.compose(s)).value
        rhs = aut_pseudometric(phi_prime, r, s).value
        assert lhs <= rhs + DELTA_NUM


def test_step_function_example_with_strict_thresholds():
    _, phi, phi_prime, mirror = step_function_setup(include_boundary=False)
    from pgeneo import is_operation

    assert is_operation(mirror, phi, phi_prime).admissible
    x0, x2 = 3, 5  # indices of points 0 and 2 on the grid -3..3
    assert domain_pseudometric(phi_prime, x0, x2).value == 0.0
    # yet an original measurement separates those points: not non-expansive
    # from the variant-space pseudo-metric
    assert abs(phi.members[0].values[x0] - phi.members[0].values[x2]) == 1.0


def test_step_function_example_boundary_threshold_changes_the_value():
    # with the boundary threshold included the two points are separated,
    # so the collapse above depends on keeping the inequality strict
    _, _, phi_prime, _ = step_function_setup(include_boundary=True)
    assert domain_pseudometric(phi_prime, 3, 5).value == 1.0
