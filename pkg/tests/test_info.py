import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twrlab.info import (
    InformationError,
    JointPmf,
    Kernel,
    Pmf,
    adder_kernel,
    bernoulli,
    binary_entropy,
    bsc_kernel,
    conditional_entropy,
    conditional_mutual_information,
    entropy,
    identity_kernel,
    joint_from,
    joint_single,
    mutual_information,
    point_mass,
    uniform,
)

# 40-digit mpmath evaluations of h(p) and 1 - h(p)
H_011 = 0.4999159581645280
H_01 = 0.4689955935892812
ONE_MINUS_H_01 = 0.5310044064107188


def test_binary_entropy_examples():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.11) == pytest.approx(0.49991, abs=1e-4)
    assert binary_entropy(0.11) == pytest.approx(H_011, abs=1e-14)


@pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
def test_binary_entropy_domain(p):
    with pytest.raises(InformationError):
        binary_entropy(p)


def test_entropy_examples():
    assert entropy(uniform(4)) == pytest.approx(2.0)
    assert entropy(point_mass(5, 3)) == 0.0
    assert entropy(Pmf([0.1, 0.9])) == pytest.approx(0.46900, abs=1e-4)
    assert entropy(Pmf([0.1, 0.9])) == pytest.approx(H_01, abs=1e-14)


@pytest.mark.parametrize("probs", [[0.5, 0.6], [-0.1, 1.1], [], [np.nan, 1.0]])
def test_pmf_rejects_invalid(probs):
    with pytest.raises(InformationError):
        Pmf(probs)


def test_kernel_rejects_bad_rows():
    with pytest.raises(InformationError):
        Kernel([[0.5, 0.4], [0.5, 0.5]])
    with pytest.raises(InformationError):
        Kernel([0.5, 0.5])


def test_joint_from_noiseless_adder():
    j = joint_from(adder_kernel(0.0), uniform(2), uniform(2))
    for a in range(2):
        for b in range(2):
            for y in range(2):
                assert j.table[a, b, y] == pytest.approx(0.25 if y == a ^ b else 0.0)


def test_joint_from_point_mass_is_kernel_row():
    k = adder_kernel(0.3)
    j = joint_from(k, point_mass(2, 1), point_mass(2, 0))
    np.testing.assert_allclose(j.table[1, 0], k.table[1, 0])
    assert j.table.sum() == pytest.approx(1.0)


def test_joint_from_noisy_adder_entry():
    j = joint_from(adder_kernel(0.1), uniform(2), uniform(2))
    assert j.table[0, 0, 1] == pytest.approx(0.025, abs=1e-15)


def test_joint_from_dimension_mismatch():
    with pytest.raises(InformationError):
        joint_from(adder_kernel(0.1), uniform(3), uniform(2))
    with pytest.raises(InformationError):
        joint_from(bsc_kernel(0.1), uniform(2), uniform(2))


def test_mutual_information_examples():
    indep = JointPmf(np.outer([0.3, 0.7], [0.2, 0.5, 0.3]), ("a", "b"))
    assert mutual_information(indep, "a", "b") == pytest.approx(0.0, abs=1e-12)
    noiseless = joint_single(identity_kernel(2), uniform(2))
    assert mutual_information(noiseless, "x", "y") == pytest.approx(1.0)
    bsc = joint_single(bsc_kernel(0.1), uniform(2))
    assert mutual_information(bsc, "x", "y") == pytest.approx(0.53100, abs=1e-4)
    assert mutual_information(bsc, "x", "y") == pytest.approx(ONE_MINUS_H_01, abs=1e-14)


def test_axis_selection_errors():
    j = joint_from(adder_kernel(0.1), uniform(2), uniform(2))
    with pytest.raises(InformationError):
        mutual_information(j, ["x12"], ["x12", "yR"])
    with pytest.raises(InformationError):
        mutual_information(j, [], ["yR"])
    with pytest.raises(InformationError):
        conditional_mutual_information(j, "x12", "yR", "yR")
    with pytest.raises(InformationError):
        conditional_entropy(j, "yR", "nope")


def test_conditional_mutual_information_examples():
    j = joint_from(adder_kernel(0.1), uniform(2), uniform(2))
    assert conditional_mutual_information(j, "x12", "yR", "x21") == pytest.approx(0.53100, abs=1e-4)
    assert conditional_mutual_information(j, "x12", "yR", "x21") == pytest.approx(ONE_MINUS_H_01, abs=1e-14)
    dead = joint_from(adder_kernel(0.5), bernoulli(0.3), bernoulli(0.8))
    assert conditional_mutual_information(dead, "x12", "yR", "x21") == pytest.approx(0.0, abs=1e-12)
    clean = joint_from(adder_kernel(0.0), uniform(2), uniform(2))
    assert conditional_mutual_information(clean, "x12", "yR", "x21") == pytest.approx(1.0)


def test_conditional_entropy_examples():
    j = joint_from(adder_kernel(0.1), uniform(2), uniform(2))
    assert conditional_entropy(j, "yR", ["x12", "x21"]) == pytest.approx(0.46900, abs=1e-4)
    assert conditional_entropy(j, "yR", ["x12", "x21"]) == pytest.approx(H_01, abs=1e-14)
    det = joint_from(adder_kernel(0.0), bernoulli(0.2), bernoulli(0.6))
    assert conditional_entropy(det, "yR", ["x12", "x21"]) == pytest.approx(0.0, abs=1e-12)
    indep = JointPmf(np.outer([0.3, 0.7], [0.25, 0.75]), ("a", "c"))
    assert conditional_entropy(indep, "a", "c") == pytest.approx(entropy(Pmf([0.3, 0.7])))


# ------------------------------------------------------------------------------
# properties

def _random_joint(draw, shape):
    raw = draw(st.lists(st.floats(0.0, 1.0), min_size=int(np.prod(shape)), max_size=int(np.prod(shape))))
    arr = np.array(raw).reshape(shape) + 1e-3
    return arr / arr.sum()


@st.composite
def joints(draw):
    shape = tuple(draw(st.lists(st.integers(1, 3), min_size=3, max_size=3)))
    return JointPmf(_random_joint(draw, shape), ("a", "b", "c"))


@st.composite
def pmfs(draw):
    size = draw(st.integers(1, 6))
    arr = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=size, max_size=size)))
    if arr.sum() == 0:
        arr[0] = 1.0
    return Pmf(arr / arr.sum())


@settings(max_examples=200, deadline=None)
@given(pmfs())
def test_entropy_bounds(p):
    h = entropy(p)
    assert -1e-12 <= h <= np.log2(p.size) + 1e-12


@settings(max_examples=200, deadline=None)
@given(joints())
def test_chain_rule_consistency(j):
    lhs = conditional_mutual_information(j, "a", "b", "c")
    rhs = mutual_information(j, "a", ["b", "c"]) - mutual_information(j, "a", "c")
    assert lhs == pytest.approx(rhs, abs=1e-10)
    assert lhs >= 0.0
    assert mutual_information(j, "a", "b") >= 0.0


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 0.5))
def test_joint_from_marginalises_to_product(p12, p21, eps):
    d12, d21 = bernoulli(p12), bernoulli(p21)
    j = joint_from(adder_kernel(eps), d12, d21)
    np.testing.assert_allclose(j.marginal(["x12", "x21"]), np.outer(d12.probs, d21.probs), atol=1e-12)
