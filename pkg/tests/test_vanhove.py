"""Tests for the Vanhove operator module: Verrill polynomials, Bessel
power numbers, the dual-route operator construction, structural checks,
the recursion for power numbers, and the symmetric-power duality."""

from fractions import Fraction as F
from math import comb

import pytest

from bwv.exactalg import UniPoly, diffop_adjoint
from bwv.vanhove import (
    bessel_power_number,
    borwein_salvy_operator,
    check_vanhove_structure,
    leading_coeff_product,
    vanhove_operator,
    verify_bms_duality,
    verify_verrill_recursion,
    verrill_poly,
)

# -- Bessel power numbers ---------------------------------------------------


def test_power_numbers_two_factors_are_central_binomials():
    for k in range(8):
        assert bessel_power_number(2, k) == comb(2 * k, k)


def test_power_numbers_three_factors():
    # W_3(2n) = sum over a+b+c=n of multinomial^2: 1, 3, 15, 93, 639
    assert [bessel_power_number(3, n) for n in range(5)] == [1, 3, 15, 93, 639]


def test_power_numbers_one_factor_trivial():
    for k in range(6):
        assert bessel_power_number(1, k) == 1


def test_power_numbers_match_direct_multinomial_sum():
    from math import factorial

    def direct(p, k):
        def rec(parts_left, remaining):
            if parts_left == 1:
                yield (remaining,)
                return
            for a in range(remaining + 1):
                for rest in rec(parts_left - 1, remaining - a):
                    yield (a,) + rest

        total = 0
        for parts in rec(p, k):
            m = factorial(k)
            for a in parts:
                m //= factorial(a)
            total += m * m
        return total

    for p in range(1, 5):
        for k in range(5):
            assert bessel_power_number(p, k) == direct(p, k)


# -- Verrill polynomials ----------------------------------------------------


def test_verrill_poly_k0_is_monomial():
    for m in range(1, 6):
        assert verrill_poly(m, 0) == UniPoly.of("t", [0] * m + [1])


def test_verrill_poly_vanishing_beyond_range():
    # no admissible tuple exists once k exceeds floor(m/2) + 1
    for m in range(1, 6):
        assert verrill_poly(m, m // 2 + 2).is_zero


def test_verrill_recursion_holds():
    for m in range(1, 5):
        result = verify_verrill_recursion(m, 10)
        assert all(result.values()), result


def test_verrill_recursion_extended_range():
    result = verify_verrill_recursion(6, 12)
    assert all(result.values()), result


# -- the operator, both routes ----------------------------------------------


def test_vanhove_operator_m1_explicit():
    # m=1: leading u(u-4)
    op = vanhove_operator(1)
    assert op.leading == UniPoly.of("u", [0, -4, 1])
    # subleading = (1/2) d/du leading
    assert op.ell(0) == op.leading.deriv() * F(1, 2)


def test_vanhove_operator_rejects_m0():
    with pytest.raises(ValueError):
        vanhove_operator(0)


def test_leading_coeff_product_form():
    for m in range(1, 8):
        h = (m + 1) // 2
        u = UniPoly.x("u")
        expect = UniPoly.of("u", [0] * h + [1])
        for n in range(1, m + 2):
            if (n - (m + 1)) % 2 == 0:
                expect = expect * (u - UniPoly.const("u", n * n))
        assert leading_coeff_product(m) == expect
        assert vanhove_operator(m).leading == expect


def test_structure_checks_all_pass():
    for m in range(1, 8):
        report = check_vanhove_structure(vanhove_operator(m))
        assert all(report.values()), (m, report)


def test_operator_coefficients_have_integer_entries():
    for m in range(1, 6):
        op = vanhove_operator(m)
        for j in range(m + 1):
            assert op.ell(j).is_integral()


# -- symmetric-power operator and duality -----------------------------------


def test_borwein_salvy_order_and_leading():
    for n in range(1, 5):
        L = borwein_salvy_operator(n)
        assert L.order == n + 2
        # leading coefficient is t^{n+2}
        assert L.coeff(n + 2) == UniPoly.of("t", [0] * (n + 2) + [1])


def test_borwein_salvy_n1_explicit():
    # verify by expanding (tD)^3 - 4t^2(tD) - 4t^2 directly
    from bwv.exactalg import DiffOp, diffop_compose, diffop_scale_mul

    t = UniPoly.x("t")
    tD = diffop_scale_mul(t, DiffOp.D("t"))
    cube = diffop_compose(tD, diffop_compose(tD, tD))
    corr = diffop_scale_mul(t * t * 4, tD + DiffOp.of("t", [1]))
    assert borwein_salvy_operator(1) == cube - corr


def test_bms_duality_small_orders():
    for n in (1, 2):
        report = verify_bms_duality(n, n + 8)
        assert all(report.values()), (n, report)


def test_bms_duality_rejects_tiny_truncation():
    with pytest.raises(ValueError):
        verify_bms_duality(2, 4)


def test_adjoint_parity_directly():
    for m in range(1, 6):
        L = vanhove_operator(m).as_diffop()
        adj = diffop_adjoint(L)
        assert adj == (L if m % 2 == 0 else -L)
