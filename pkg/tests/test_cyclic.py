from fractions import Fraction

import numpy as np
import pytest

from partdiv import BranchAssignment, GroupSpec, convolve_power, cyclic_char_fn, cyclic_nth_roots, delta1_membership, lambda_k_scan, make_measure, z2_nth_root
from partdiv.cyclic import branch_log, inverse_char_fn, z2_measure
from partdiv.errors import SearchTooLarge, WrongGroup, ZeroCharacterValue

from oracles import table_tv

BETA_03_CUBE = 0.13159685013596134


def test_char_fn_round_trip():
    mu = make_measure(GroupSpec.cyclic(5), [(0, 0.5), (2, 0.3), (4, 0.2)])
    vals = cyclic_char_fn(mu)
    assert vals[0] == pytest.approx(1.0)
    assert np.allclose(inverse_char_fn(vals).real, [0.5, 0, 0.3, 0, 0.2], atol=1e-15)


def test_char_fn_requires_cyclic(two_point):
    with pytest.raises(WrongGroup):
        cyclic_char_fn(two_point)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_z2_even_roots_absent(n):
    assert z2_nth_root(0.3, n) is None


def test_z2_cube_root():
    beta = z2_nth_root(0.3, 3)
    assert beta == pytest.approx(BETA_03_CUBE, abs=1e-14)
    assert (2 * beta - 1) ** 3 == pytest.approx(-0.4, abs=1e-14)


@pytest.mark.parametrize("alpha", [-0.1, 1.5])
def test_z2_alpha_range(alpha):
    with pytest.raises(ValueError):
        z2_nth_root(alpha, 2)


@pytest.mark.parametrize("n", range(1, 7))
def test_exhaustive_roots_match_closed_form(n):
    mu = z2_measure(0.3)
    rs = cyclic_nth_roots(mu, n)
    beta = z2_nth_root(0.3, n)
    if beta is None:
        assert rs.roots == ()
    else:
        assert len(rs.roots) == 1
        assert rs.roots[0].weight(0) == pytest.approx(beta, abs=1e-12)
    assert rs.exhaustive


def test_z2_alpha_above_half_has_even_roots():
    rs = cyclic_nth_roots(z2_measure(0.75), 2)
    # (2 beta - 1)^2 = 0.5 has both signs available
    assert sorted(round(r.weight(0), 12) for r in rs.roots) == [round(1 - 0.8535533905932737, 12), round(0.8535533905932737, 12)]


def test_delta1_on_z3_square_root():
    mu = make_measure(GroupSpec.cyclic(3), [(1, 1.0)])
    rs = cyclic_nth_roots(mu, 2)
    assert [r.atoms for r in rs.roots] == [((2, 1.0),)]


def test_delta0_on_z2_square_roots():
    mu = make_measure(GroupSpec.cyclic(2), [(0, 1.0)])
    rs = cyclic_nth_roots(mu, 2)
    assert sorted(r.atoms for r in rs.roots) == [((0, 1.0),), ((1, 1.0),)]


def test_roots_reconstruct():
    nu = make_measure(GroupSpec.cyclic(6), [(0, 0.6), (1, 0.25), (3, 0.15)])
    mu = convolve_power(nu, 3)
    rs = cyclic_nth_roots(mu, 3)
    assert any(table_tv(r.as_dict(), nu.as_dict()) < 1e-9 for r in rs.roots)
    for r in rs.roots:
        assert table_tv(convolve_power(r, 3).as_dict(), mu.as_dict()) <= 1e-9


@pytest.mark.parametrize("order, n", [(9, 2), (4, 7)])
def test_search_limits(order, n):
    mu = make_measure(GroupSpec.cyclic(order), [(0, 1.0)])
    with pytest.raises(SearchTooLarge):
        cyclic_nth_roots(mu, n)


def test_delta1_discrepancy_at_three_half():
    m = delta1_membership(3, Fraction(1, 2))
    assert m.brute and not m.closed_form_rule
    assert m.witness == 2
    assert m.discrepancy


@pytest.mark.parametrize(
    "order, q, brute",
    [(2, Fraction(1, 2), False), (4, Fraction(1, 2), False), (5, Fraction(3, 2), True), (6, Fraction(1, 3), False), (3, Fraction(2), True)],
)
def test_delta1_brute(order, q, brute):
    m = delta1_membership(order, q)
    assert m.brute is brute
    for j in m.witnesses:
        assert (j * q.denominator - q.numerator) % order == 0


def test_branch_assignment_validation():
    with pytest.raises(ValueError):
        BranchAssignment((1, 0))
    with pytest.raises(ValueError):
        BranchAssignment((0, 7))
    assert BranchAssignment((0, 7), k_max=7).k == (0, 7)
    assert BranchAssignment.principal(3).k == (0, 0, 0)


def test_branch_log_zero_character():
    with pytest.raises(ZeroCharacterValue):
        branch_log(z2_measure(0.5), BranchAssignment.principal(2))


def test_branch_log_exponentiates_back():
    mu = z2_measure(0.3)
    psi = branch_log(mu, BranchAssignment((0, 2)))
    assert np.allclose(np.exp(psi), cyclic_char_fn(mu), atol=1e-14)


@pytest.mark.parametrize("k", range(5))
def test_lambda_k_is_odd_multiple_lattice(k):
    grid = [Fraction(m, l) for l in range(1, 10) for m in range(1, 3 * l + 1) if Fraction(m, l).denominator == l]
    report = lambda_k_scan(z2_measure(0.3), BranchAssignment((0, k)), grid)
    members = {Fraction(p.label) for p, v in zip(report.grid, report.verdicts) if v.is_member}
    expected = {q for q in grid if (2 * k + 1) % q.denominator == 0}
    assert members == expected
