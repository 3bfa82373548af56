import math

import numpy as np
import pytest

from partdiv import (
    GroupSpec,
    char_fn,
    char_fn_derivative,
    convolve_power,
    find_zeros,
    make_measure,
    sample_char_fn,
    second_characteristic,
    winding_number,
)
from partdiv.dual import FailureReason
from partdiv.errors import BadGridSize, HasZeros, OrderTooHigh, WrongGroup

from oracles import direct_char_fn

Z = GroupSpec.integers()
R1 = GroupSpec.real_lattice(1.0)


@pytest.mark.parametrize("theta", [0.0, 0.3, 1.0, math.pi, 5.5])
def test_char_fn_matches_direct_sum(two_point, theta):
    assert char_fn(two_point, theta) == pytest.approx(direct_char_fn({0: 0.7, 1: 0.3}, theta), abs=1e-15)


def test_char_fn_value_at_pi(two_point):
    assert char_fn(two_point, math.pi) == pytest.approx(0.4, abs=1e-15)


def test_char_fn_lattice_scales_points():
    mu = make_measure(GroupSpec.real_lattice(0.5), [(2, 1.0)])
    assert char_fn(mu, 1.0) == pytest.approx(complex(math.cos(1.0), math.sin(1.0)), abs=1e-15)


def test_char_fn_vectorized(two_point):
    th = np.linspace(0, 6, 7)
    vals = char_fn(two_point, th)
    assert vals.shape == (7,)
    assert vals[3] == pytest.approx(char_fn(two_point, th[3]))


@pytest.mark.parametrize("order, expected", [(1, -1.0), (2, 0.0)])
def test_cos_derivatives(cos_measure, order, expected):
    assert char_fn_derivative(cos_measure, math.pi / 2, order) == pytest.approx(expected, abs=1e-14)


def test_cos_squared_second_derivative(cos_measure):
    sq = convolve_power(cos_measure, 2)
    assert char_fn_derivative(sq, math.pi / 2, 2) == pytest.approx(2.0, abs=1e-14)


def test_derivative_order_limit(cos_measure):
    with pytest.raises(OrderTooHigh):
        char_fn_derivative(cos_measure, 0.0, 13)


def test_sample_grid_shapes(two_point, cos_measure):
    assert len(sample_char_fn(two_point, 64)) == 64
    g = sample_char_fn(cos_measure, 64, window=math.pi)
    assert len(g) == 65
    assert g.points[g.trivial_index] == 0.0
    assert len(sample_char_fn(make_measure(GroupSpec.cyclic(5), [(1, 1.0)]))) == 5


@pytest.mark.parametrize("n", [15, 100, 8])
def test_sample_rejects_bad_sizes(two_point, n):
    with pytest.raises(BadGridSize):
        sample_char_fn(two_point, n)


def test_sample_window_only_for_lattice(two_point, cos_measure):
    with pytest.raises(BadGridSize):
        sample_char_fn(two_point, 64, window=1.0)
    with pytest.raises(BadGridSize):
        sample_char_fn(cos_measure, 64)


@pytest.mark.parametrize("power, order", [(1, 1), (2, 2), (4, 4)])
def test_cos_power_zero_orders(cos_measure, power, order):
    mu = convolve_power(cos_measure, power)
    zeros = find_zeros(mu)
    assert sorted(round(z.location, 9) for z in zeros) == [round(-math.pi / 2, 9), round(math.pi / 2, 9)]
    assert {z.order for z in zeros} == {order}


def test_cos_on_integers_zero_order_four():
    mu = convolve_power(make_measure(Z, [(1, 0.5), (-1, 0.5)]), 4)
    zeros = find_zeros(mu)
    assert {z.order for z in zeros} == {4}
    assert len(zeros) == 2


def test_cos_leading_coefficient(cos_measure):
    for z in find_zeros(cos_measure):
        assert abs(z.leading_coefficient) == pytest.approx(1.0, abs=1e-12)


def test_no_zeros_for_dominant_atom(two_point):
    assert not find_zeros(two_point)


def test_cyclic_zero_detected():
    mu = make_measure(GroupSpec.cyclic(2), [(0, 0.5), (1, 0.5)])
    assert len(find_zeros(mu)) == 1


@pytest.mark.parametrize("n", [-3, -2, -1, 0, 1, 2, 3])
def test_winding_of_point_mass(n):
    assert winding_number(make_measure(Z, [(n, 1.0)])) == n


def test_winding_two_point_with_dominant_one():
    assert winding_number(make_measure(Z, [(0, 0.3), (1, 0.7)])) == 1


def test_winding_requires_integers(cos_measure):
    with pytest.raises(WrongGroup):
        winding_number(cos_measure)


def test_winding_refuses_zeros():
    with pytest.raises(HasZeros):
        winding_number(make_measure(Z, [(0, 0.5), (1, 0.5)]))


def test_second_characteristic_reconstructs(two_point):
    sc = second_characteristic(two_point)
    assert sc.admissible and sc.winding == 0
    assert np.max(np.abs(np.exp(sc.psi) - sc.grid.values)) < 1e-12
    assert sc.psi[sc.grid.trivial_index] == 0


def test_second_characteristic_winding_failure():
    sc = second_characteristic(make_measure(Z, [(2, 1.0)]))
    assert not sc.admissible
    assert sc.failure_reason is FailureReason.NONZERO_WINDING
    assert sc.winding == 2


def test_second_characteristic_zero_failure(cos_measure):
    sc = second_characteristic(cos_measure)
    assert sc.failure_reason is FailureReason.HAS_ZEROS
    assert sc.psi is None


def test_lattice_point_mass_is_admissible():
    sc = second_characteristic(make_measure(R1, [(1, 1.0)]))
    assert sc.admissible
    assert np.max(np.abs(sc.psi - 1j * sc.grid.points)) < 1e-12


def test_cyclic_principal_log():
    mu = make_measure(GroupSpec.cyclic(3), [(0, 0.6), (1, 0.3), (2, 0.1)])
    sc = second_characteristic(mu)
    assert sc.admissible
    assert np.allclose(np.exp(sc.psi), sc.grid.values, atol=1e-14)
