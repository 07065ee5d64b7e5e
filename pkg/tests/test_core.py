import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgeneo import (
    DomainMap,
    DomainMismatch,
    FiniteDomain,
    Measurement,
    MeasurementSpace,
    dedup_space,
    right_action,
    space_from_arrays,
    space_membership,
    uniform_distance,
    uniform_norm,
)
from gen import make_domain, rand_measurement, rand_perm, rand_space


def test_domain_rejects_duplicate_labels():
    with pytest.raises(ValueError):
        FiniteDomain(("a", "b", "a"))
    with pytest.raises(ValueError):
        FiniteDomain(())


def test_measurement_shape_and_finiteness():
    dom = make_domain(3)
    with pytest.raises(ValueError):
        Measurement(dom, [1.0, 2.0])
    with pytest.raises(ValueError):
        Measurement(dom, [1.0, np.nan, 0.0])
    f = Measurement(dom, [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        f.values[0] = 9.0


def test_domain_map_must_be_permutation():
    dom = make_domain(3)
    with pytest.raises(ValueError):
        DomainMap(dom, (0, 0, 1))
    s = DomainMap(dom, (1, 2, 0))
    assert s.inverse().compose(s).is_identity()
    assert s.compose(s.inverse()).is_identity()


def test_uniform_norm_examples():
    dom = make_domain(3)
    assert uniform_norm(Measurement(dom, [0.0, 0.0, 0.0])) == 0.0
    assert uniform_norm(Measurement(dom, [-3.0, 1.0, 2.0])) == 3.0


def test_uniform_norm_against_loop_oracle():
    rng = np.random.default_rng(7)
    dom = make_domain(5)
    f = rand_measurement(rng, dom, -2.0, 2.0)
    expected = max(abs(v) for v in f.values)  # independent scalar loop
    assert uniform_norm(f) == expected


def test_uniform_distance_examples():
    dom2 = make_domain(2)
    f = Measurement(dom2, [1.0, 0.0])
    g = Measurement(dom2, [0.0, 1.0])
    assert uniform_distance(f, f) == 0.0
    assert uniform_distance(f, g) == 1.0
    with pytest.raises(DomainMismatch):
        uniform_distance(f, Measurement(make_domain(2, "q"), [0.0, 0.0]))


def test_uniform_distance_equals_norm_of_difference():
    rng = np.random.default_rng(11)
    dom = make_domain(6)
    f, g = rand_measurement(rng, dom), rand_measurement(rng, dom)
    assert uniform_distance(f, g) == uniform_norm(Measurement(dom, f.values - g.values))


def test_right_action_hand_composition():
    dom = make_domain(3)
    phi = Measurement(dom, [5.0, 7.0, 9.0])
    s = DomainMap(dom, (1, 2, 0))
    assert right_action(phi, s).values.tolist() == [7.0, 9.0, 5.0]
    assert np.array_equal(right_action(phi, DomainMap.identity(dom)).values, phi.values)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10_000))
def test_right_action_bijectivity_and_isometry(n, seed):
    rng = np.random.default_rng(seed)
    dom = make_domain(n)
    phi1, phi2 = rand_measurement(rng, dom), rand_measurement(rng, dom)
    s = rand_perm(rng, dom)
    # round trip through the inverse
    assert np.array_equal(right_action(right_action(phi1, s), s.inverse()).values, phi1.values)
    # composing with a bijection permutes coordinates, so distances are exact
    assert uniform_distance(right_action(phi1, s), right_action(phi2, s)) == uniform_distance(phi1, phi2)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10_000))
def test_right_action_associativity(n, seed):
    rng = np.random.default_rng(seed)
    dom = make_domain(n)
    phi = rand_measurement(rng, dom)
    s, t = rand_perm(rng, dom), rand_perm(rng, dom)
    one = right_action(right_action(phi, s), t)
    two = right_action(phi, s.compose(t))
    assert np.array_equal(one.values, two.values)


def test_space_membership_exact_far_and_near():
    dom = make_domain(3)
    omega = space_from_arrays(
        dom,
        [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [5.0, 5.0, 5.0]],
        "omega",
    )
    assert space_membership(omega.members[0], omega) == 0
    far = Measurement(dom, [9.0, 9.0, 9.0])
    assert space_membership(far, omega) is None
    delta = 1e-6
    close_to_3 = Measurement(dom, [5.0 + delta / 2, 5.0, 5.0])
    # exhaustive scan oracle: the only member within delta is index 3
    gaps = [uniform_distance(close_to_3, g) for g in omega.members]
    assert [i for i, g in enumerate(gaps) if g <= delta] == [3]
    assert space_membership(close_to_3, omega, delta_mem=delta) == 3


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(2, 7), st.integers(0, 10_000))
def test_space_membership_reflexive(m, n, seed):
    rng = np.random.default_rng(seed)
    omega = rand_space(rng, make_domain(n), m, "omega")
    for i, f in enumerate(omega.members):
        assert space_membership(f, omega) is not None


def test_dedup_space_keeps_first_representative():
    dom = make_domain(2)
    a = Measurement(dom, [0.0, 1.0])
    b = Measurement(dom, [0.0, 1.0 + 1e-12])
    c = Measurement(dom, [2.0, 2.0])
    space = dedup_space(dom, [a, b, c], "omega")
    assert len(space) == 2
    assert np.array_equal(space.members[0].values, a.values)


def test_space_rejects_mixed_domains():
    dom, other = make_domain(2), make_domain(2, "q")
    with pytest.raises(DomainMismatch):
        MeasurementSpace(dom, (Measurement(other, [0.0, 0.0]),), "bad")
