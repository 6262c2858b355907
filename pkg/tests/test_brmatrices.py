"""Tests for the Bernoulli-matrix module: the V/upsilon matrices, the
Sigma/sigma intersection matrices and their Bernoulli-entry inverses, the
Betti and de Rham matrices with their frozen reference values, beta
matrices, block identities, named constants, and JSON serialization."""

from fractions import Fraction as F

import mpmath
import pytest

from bwv.brmatrices import (
    MATRIX_FAMILIES,
    NAMED_CONSTANTS,
    Surd,
    aux_matrix,
    beta_matrix,
    betti_B,
    betti_Bring,
    betti_b,
    betti_bring,
    betti_minors,
    derham_D,
    derham_Dring,
    derham_alternatives,
    derham_d,
    derham_dring,
    frakS,
    frakSring,
    frakSring_entry,
    matSigma,
    matSigmaInvBernoulli,
    matUpsilon,
    matV,
    matrix_family,
    matrix_from_json,
    matrix_to_json,
    matsigma,
    matsigmaInvBernoulli,
    named_constant,
    top_coeff,
    top_coeff_sign_on_01,
    verify_block_identities,
)
from bwv.exactalg import ExactMatrix, exact_det, exact_inverse

M = ExactMatrix

# -- frozen reference values ------------------------------------------------
# Exact entries of the Betti (B, b) and de Rham (D, d) matrices for
# k = 2..5, independently derived and frozen.

BETTI_B = {
    2: M([[F(1, 80), 0], [0, F(-3, 64)]]),
    3: M([
        [F(15, 224), 0, F(3, 32)],
        [0, F(-5, 64), 0],
        [F(3, 32), 0, F(3, 16)],
    ]),
    4: M([
        [F(21, 16), 0, F(15, 16), 0],
        [0, F(-105, 128), 0, F(-105, 128)],
        [F(15, 16), 0, F(45, 64), 0],
        [0, F(-105, 128), 0, F(-75, 64)],
    ]),
    5: M([
        [F(23625, 352), 0, F(945, 32), 0, F(675, 32)],
        [0, F(-1701, 64), 0, F(-945, 64), 0],
        [F(945, 32), 0, F(105, 8), 0, F(315, 32)],
        [0, F(-945, 64), 0, F(-2205, 256), 0],
        [F(675, 32), 0, F(315, 32), 0, F(675, 64)],
    ]),
}

DERHAM_D = {
    2: M([[F(13, 8), F(225, 64)], [F(225, 64), 0]]),
    3: M([
        [F(51, 16), F(2589, 32), F(11025, 256)],
        [F(2589, 32), F(11025, 256), 0],
        [F(11025, 256), 0, 0],
    ]),
    4: M([
        [F(21, 4), F(60519, 64), F(1270215, 256), F(893025, 1024)],
        [F(60519, 64), F(106497, 128), F(893025, 1024), 0],
        [F(1270215, 256), F(893025, 1024), 0, 0],
        [F(893025, 1024), 0, 0, 0],
    ]),
    5: M([
        [F(125, 16), F(65679, 8), F(25484133, 128),
         F(322307685, 1024), F(108056025, 4096)],
        [F(65679, 8), F(2475315, 256), F(64674153, 1024),
         F(108056025, 4096), 0],
        [F(25484133, 128), F(64674153, 1024), F(108056025, 4096), 0, 0],
        [F(322307685, 1024), F(108056025, 4096), 0, 0, 0],
        [F(108056025, 4096), 0, 0, 0, 0],
    ]),
}

BETTI_b = {
    2: M([[0, F(1, 32)], [F(-1, 32), 0]]),
    3: M([
        [0, F(15, 64), 0],
        [F(-15, 64), 0, F(-15, 64)],
        [0, F(15, 64), 0],
    ]),
    4: M([
        [0, F(189, 32), 0, F(135, 32)],
        [F(-189, 32), 0, F(-105, 32), 0],
        [0, F(105, 32), 0, F(315, 128)],
        [F(-135, 32), 0, F(-315, 128), 0],
    ]),
    5: M([
        [0, F(23625, 64), 0, F(10395, 64), 0],
        [F(-23625, 64), 0, F(-8505, 64), 0, F(-4725, 64)],
        [0, F(8505, 64), 0, F(945, 16), 0],
        [F(-10395, 64), 0, F(-945, 16), 0, F(-2205, 64)],
        [0, F(4725, 64), 0, F(2205, 64), 0],
    ]),
}

DERHAM_d = {
    2: M([[0, -18], [18, 0]]),
    3: M([[0, -288, -576], [288, 0, 0], [576, 0, 0]]),
    4: M([
        [0, F(-11421, 4), -33807, -21600],
        [F(11421, 4), 0, -7200, 0],
        [33807, 7200, 0, 0],
        [21600, 0, 0, 0],
    ]),
    5: M([
        [0, -22608, -1059156, -3485808, -1036800],
        [22608, 0, -388800, -518400, 0],
        [1059156, 388800, 0, 0, 0],
        [3485808, 518400, 0, 0, 0],
        [1036800, 0, 0, 0, 0],
    ]),
}


# -- leading coefficient helpers --------------------------------------------


def test_top_coeff_matches_operator_and_sign():
    for m in range(1, 7):
        p = top_coeff(m)
        assert p.eval(F(1, 2)) != 0
        s = top_coeff_sign_on_01(m)
        assert s in (-1, 1)
        assert (p.eval(F(1, 2)) > 0) == (s == 1)
        # roots only at 0 and at squares: sign agrees at another sample
        assert (p.eval(F(3, 4)) > 0) == (s == 1)


# -- V and upsilon ----------------------------------------------------------


def test_V_symmetric_and_upsilon_skew():
    for k in range(1, 4):
        V = matV(k)
        assert V.rows == V.cols == 2 * k - 1
        assert V == V.T
        ups = matUpsilon(k)
        assert ups.rows == ups.cols == 2 * k
        assert ups == -ups.T


def test_V_antidiagonal_and_triangularity():
    for k in range(1, 4):
        V = matV(k)
        m = 2 * k - 1
        one = V.at(1, 1) / V.at(1, 1)  # multiplicative identity of the ring
        for a in range(1, m + 1):
            for b in range(1, m + 1):
                if a + b == m + 1:
                    assert V.at(a, b) == one * ((-1) ** (a - 1))
                elif a + b > m + 1:
                    assert V.at(a, b) == one * 0


def test_upsilon_corner_vanishes():
    for k in range(1, 4):
        ups = matUpsilon(k)
        zero = ups.at(1, 2) * 0
        assert ups.at(1, 1) == zero


# -- Sigma and sigma --------------------------------------------------------


def test_sigma_small_oracles():
    assert matSigma(1) == M([[9]])
    assert matSigma(2).at(1, 1) == -25
    assert matsigma(1) == M([[0, -8], [8, 0]])


def test_sigma_symmetry_classes():
    for k in range(1, 5):
        S = matSigma(k)
        assert S == S.T
        s = matsigma(k)
        assert s == -s.T


def test_sigma_bernoulli_inverses():
    for k in range(1, 5):
        assert matSigmaInvBernoulli(k) == exact_inverse(matSigma(k))
        assert matsigmaInvBernoulli(k) == exact_inverse(matsigma(k))


def test_sigma_determinants_match_wronskian_constants():
    for k in range(1, 5):
        Lam = named_constant("LambdaOdd", k).rational
        lam = named_constant("lambdaEven", k).rational
        assert Lam**2 * exact_det(matSigma(k)) == 1
        assert lam**2 * exact_det(matsigma(k)) == 1


def test_wronskian_constants_small_values():
    assert named_constant("LambdaOdd", 1).rational == F(1, 3)
    assert named_constant("LambdaOdd", 2).rational == F(1, 20)
    assert named_constant("lambdaEven", 1).rational == F(1, 8)
    assert named_constant("lambdaEven", 2).rational == F(-1, 32)


# -- beta matrices ----------------------------------------------------------


def test_beta2_evaluated():
    u = F(1, 3)
    assert beta_matrix(2, u) == M([[1, 0], [0, F(2, 3)]])


def test_beta_determinant_magnitude():
    u = F(1, 2)
    for m in range(1, 8):
        d = exact_det(beta_matrix(m, u))
        expect = F(2) ** (m * (m - 1) // 2) * abs(u) ** (m * m // 4)
        assert abs(d) == expect


def test_beta_even_inverse_transpose_structure():
    # structure of (beta_{2k}(u)^T)^{-1}: a single geometric entry per row
    u = F(1, 2)
    for k in (2, 3):
        Binv = exact_inverse(beta_matrix(2 * k, u).T)
        for b in range(2, 2 * k + 1):
            assert Binv.at(1, b) == 0
        for a in range(1, k + 1):
            assert Binv.at(a, 2 * a - 1) == (F(-4) * u) ** (1 - a)
        for a in range(k + 1, 2 * k + 1):
            assert Binv.at(a, 2 * (a - k)) == (
                F(1, 2) / u * (F(-4) * u) ** (k + 1 - a)
            )


# -- frakS and the Betti matrices -------------------------------------------


def test_frakS_small_and_inverse_relation():
    assert frakS(1) == M([[48]])
    assert betti_B(1) == M([[F(1, 48)]])
    for k in range(1, 6):
        assert betti_B(k) == exact_inverse(frakS(k))


def test_betti_chessboard_zero_pattern():
    for k in range(2, 6):
        B = betti_B(k)
        b = betti_b(k)
        for a in range(1, k + 1):
            for bb in range(1, k + 1):
                if (a + bb) % 2 == 1:
                    assert B.at(a, bb) == 0
                else:
                    assert b.at(a, bb) == 0


def test_frakSring_entry_extended_domain():
    # a = -1 or b = -1 rows/columns vanish; antisymmetry inside the block
    for k in range(1, 4):
        for b in range(-1, k + 1):
            assert frakSring_entry(k, -1, b) == 0
            assert frakSring_entry(k, b, -1) == 0
        for a in range(0, k + 1):
            for b in range(0, k + 1):
                assert frakSring_entry(k, a, b) == -frakSring_entry(k, b, a)


def test_bring_from_betti_sandwich():
    for k in range(1, 5):
        B = betti_B(k)
        assert betti_Bring(k) == B @ frakSring(k) @ B


def test_betti_Bring_skew():
    for k in range(1, 5):
        assert betti_Bring(k) == -betti_Bring(k).T


# -- frozen Betti / de Rham reference values --------------------------------


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_betti_B_reference(k):
    assert betti_B(k) == BETTI_B[k]


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_betti_b_reference(k):
    assert betti_b(k) == BETTI_b[k]


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_derham_D_reference(k):
    assert derham_D(k) == DERHAM_D[k]


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_derham_d_reference(k):
    assert derham_d(k) == DERHAM_d[k]


def test_derham_ring_matrices_small():
    assert derham_Dring(2) == ExactMatrix.zeros(2, 2)
    assert derham_dring(1) == M([[-2]])
    assert derham_Dring(3) == M([
        [0, F(3229, 32), 0],
        [F(-3229, 32), 0, 0],
        [0, 0, 0],
    ])
    assert derham_dring(2) == M([[F(-59, 8), -18], [-18, 0]])


def test_derham_D_antidiagonal_and_triangularity():
    from bwv.exactalg import binom_ext  # noqa: F401  (keep import local)

    def double_fact(n):
        out = 1
        while n > 1:
            out *= n
            n -= 2
        return out

    for k in range(2, 6):
        D = derham_D(k)
        anti = F(double_fact(2 * k + 1), 2 ** (k + 1)) ** 2
        for a in range(1, k + 1):
            for b in range(1, k + 1):
                if a + b == k + 1:
                    assert D.at(a, b) == anti
                elif a + b > k + 1:
                    assert D.at(a, b) == 0
        assert D == D.T
        assert derham_d(k) == -derham_d(k).T


def test_betti_determinant_identities():
    for k in range(2, 6):
        Lam = named_constant("LambdaOdd", k).rational
        detB = exact_det(betti_B(k))
        sign = -1 if k % 2 == 0 else 1
        assert detB == sign * _fact(2 * k - 1) * Lam / F(2) ** (5 * k - 1)
    assert exact_det(betti_B(2)) == F(-3, 5120)
    for k in range(3, 6):
        Lam = named_constant("LambdaOdd", k).rational
        prod = exact_det(betti_B(k)) * exact_det(betti_B(k - 1))
        sign = -1 if k % 2 == 0 else 1
        assert prod == sign * (2 * k + 1) * F(4) ** (1 - 3 * k) * Lam**2


def _fact(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def test_betti_b_odd_dimension_is_singular():
    for k in (3, 5):
        assert exact_det(betti_b(k)) == 0


# -- minors, block identities, alternatives ---------------------------------


def test_betti_minors():
    for k in range(1, 7):
        res = betti_minors(k)
        assert res["det_product_ok"], k
        assert res["det_even_formula_ok"], k
    res1 = betti_minors(1)
    assert res1["even"].rows == 0 and res1["det_even"] == 1


@pytest.mark.parametrize("k", [2, 3, 4])
def test_block_identities(k):
    res = verify_block_identities(k)
    assert res["ok"] is True
    failures = {key: val for key, val in res.items()
                if isinstance(val, bool) and not val}
    assert not failures, failures


@pytest.mark.parametrize("k", [2, 3])
def test_derham_alternatives(k):
    res = derham_alternatives(k)
    assert res["ok"], {key: val for key, val in res.items()
                       if isinstance(val, bool) and not val}
    assert res["Dring"] == derham_Dring(k)
    assert res["dring"] == derham_dring(k - 1)


# -- named constants, numerically -------------------------------------------


def test_det_formulas_numeric():
    mp = mpmath.mp.clone()
    mp.dps = 50
    tol = mpmath.mpf(10) ** (-35)
    for k in range(1, 5):
        # det M_k = prod_{j=1}^{k} (2j)^{k-j} pi^j / sqrt((2j+1)^(2j+1))
        direct = mp.mpf(1)
        for j in range(1, k + 1):
            direct *= mp.mpf(2 * j) ** (k - j) * mp.pi**j
            direct /= mp.sqrt(mp.mpf(2 * j + 1) ** (2 * j + 1))
        val = named_constant("detM_formula", k).value.to_mpf(mp)
        assert abs(val - direct) < tol * abs(direct)
        # det N_k = 2 pi^{(k+1)^2/2} / Gamma((k+1)/2)
        #           * prod_{j=1}^{k+1} (2j-1)^{k+1-j} / (2j)^j
        direct = 2 * mp.pi ** (mp.mpf((k + 1) ** 2) / 2) / mp.gamma(
            mp.mpf(k + 1) / 2
        )
        for j in range(1, k + 2):
            direct *= mp.mpf(2 * j - 1) ** (k + 1 - j)
            direct /= mp.mpf(2 * j) ** j
        val = named_constant("detN_formula", k).value.to_mpf(mp)
        assert abs(val - direct) < tol * abs(direct)


def test_named_constant_catalogue_and_errors():
    for name in NAMED_CONSTANTS:
        c = named_constant(name, 2)
        assert c.name == name and c.k == 2
    with pytest.raises(ValueError):
        named_constant("nonsense", 2)
    with pytest.raises(ValueError):
        named_constant("LambdaOdd", 0)


def test_surd_normalization_and_product():
    s = Surd.of(F(1, 2), 12)  # sqrt(12) = 2 sqrt(3)
    assert s == Surd(F(1), 3, 0)
    t = Surd(F(1), 3, 1)
    assert s * t == Surd(F(3), 1, 1)


# -- family dispatch and JSON -----------------------------------------------

EXPECTED_FAMILIES = {
    "V", "Upsilon", "Sigma", "sigma", "SigmaInvB", "sigmaInvB",
    "BettiB", "Bettib", "BettiBring", "Bettibring", "FrakS", "FrakSring",
    "DerhamD", "Derhamd", "DerhamDring", "Derhamdring", "Beta",
    "A", "Psi_small", "Rho", "Theta", "Phi", "theta_small", "phi_small",
    "R", "PsiCap",
}


def test_family_catalogue_complete():
    assert set(MATRIX_FAMILIES) == EXPECTED_FAMILIES


def test_family_dispatch_and_errors():
    assert matrix_family("BettiB", 2) == betti_B(2)
    assert matrix_family("Beta", 2, F(1, 3)) == beta_matrix(2, F(1, 3))
    with pytest.raises(ValueError):
        matrix_family("nonsense", 2)
    with pytest.raises(ValueError):
        matrix_family("BettiB", 2, F(1, 2))


def test_aux_matrix_shapes():
    for k in (2, 3):
        assert aux_matrix("rho", k).rows == 2 * k - 1
        assert aux_matrix("rho", k).cols == 2 * k
        assert aux_matrix("psi", k).rows == 2 * k
        assert aux_matrix("psi", k).cols == 2 * k - 1
        # psi has orthonormal unit-vector columns (e_{k+1} is skipped)
        psi = aux_matrix("psi", k)
        assert psi.T @ psi == ExactMatrix.identity(2 * k - 1)
        square = psi @ psi.T
        for a in range(1, 2 * k + 1):
            assert square.at(a, a) == (0 if a == k + 1 else 1)


def test_json_roundtrip_rational():
    name, k = "BettiB", 3
    d = matrix_to_json(name, k, betti_B(k))
    assert d["ring"] == "Q"
    n2, k2, M2 = matrix_from_json(d)
    assert (n2, k2, M2) == (name, k, betti_B(k))


def test_json_roundtrip_function_field():
    name, k = "Beta", 3
    B = beta_matrix(k)
    d = matrix_to_json(name, k, B)
    n2, k2, M2 = matrix_from_json(d)
    assert (n2, k2, M2) == (name, k, B)
    V = matV(2)
    d = matrix_to_json("V", 2, V)
    assert matrix_from_json(d)[2] == V
