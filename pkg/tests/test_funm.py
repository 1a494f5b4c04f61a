import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trifun.exceptions import DegenerateSpectrum, DimensionMismatch, DomainViolation
from trifun.funm import (
    ScalarFunction,
    apply,
    exp_semigroup,
    function_from_name,
    parlett_apply,
    parlett_coefficients,
)
from trifun.matcore import LowerTriangular, dense_multiply, row_sums, validate_simple_spectrum
from trifun.oracles import exp_series, log_integral
from trifun.sampling import make_rng, random_rate_matrix
from trifun.theta import ThetaTable, compute_theta, table_index

from conftest import E, lt, well_separated_family

BUILTINS = [
    ScalarFunction.exp(0.7),
    ScalarFunction.inverse(),
    ScalarFunction.polynomial([0.5, -1, 0.25, 0.1]),
    ScalarFunction.power(3),
]


def test_scalar_functions():
    x = np.array([1.0, 4.0])
    assert ScalarFunction.exp(2)(x).tolist() == np.exp([2.0, 8.0]).tolist()
    assert ScalarFunction.polynomial([1, 2, 3])(x).tolist() == [6, 57]
    assert ScalarFunction.power(0.5)(x).tolist() == [1, 2]
    assert ScalarFunction.inverse()(x).tolist() == [1, 0.25]


@pytest.mark.parametrize("f, values", [
    (ScalarFunction.log(), [2, 0]),
    (ScalarFunction.log(), [-1, 2]),
    (ScalarFunction.power(0.5), [-3, 1]),
    (ScalarFunction.inverse(), [0, 1]),
])
def test_domain_predicates(f, values):
    with pytest.raises(DomainViolation):
        f.check_domain(np.array(values, dtype=float))


def test_domain_allows_integer_power_and_complex_log():
    ScalarFunction.power(2).check_domain(np.array([-3.0]))
    ScalarFunction.log().check_domain(np.array([-1 + 1e-3j]))


def test_identity_polynomial_reproduces_matrix(family):
    f = ScalarFunction.polynomial([0, 1])
    for B in family:
        F = apply(B, compute_theta(B), f)
        np.testing.assert_allclose(F.entries, B.entries, atol=1e-11, rtol=0)


def test_identity_polynomial_sees_extracted_form_of_corruption(b2):
    # apply uses delta_nm f_n + sum_{k<n} theta (f_k - f_n), so a 0.1 slip in
    # theta_2(1,1) moves entry (2,1) by 0.1 * |b_11 - b_22| = 0.2
    values = compute_theta(b2).values.copy()
    values[table_index(1, 0, 0)] += 0.1
    F = apply(b2, ThetaTable(2, values), ScalarFunction.polynomial([0, 1]))
    assert abs(F[1, 0] - b2[1, 0]) == pytest.approx(0.2)


@pytest.mark.parametrize("t", [0.5, 1.0, -0.3])
def test_exp_two_by_two_closed_form(b2, t):
    F = apply(b2, compute_theta(b2), ScalarFunction.exp(t))
    # p_21 = b_21 (p_22 - p_11) / (b_22 - b_11)
    expected = [[np.exp(t), 0], [np.exp(3 * t) - np.exp(t), np.exp(3 * t)]]
    np.testing.assert_allclose(F.to_dense(), expected, rtol=1e-14)
    np.testing.assert_allclose(exp_series(t * b2.to_dense()), expected, rtol=1e-13)


def test_log_domain_violation():
    B = lt([[-1], [1, 2]])
    with pytest.raises(DomainViolation) as err:
        apply(B, compute_theta(B), ScalarFunction.log())
    assert err.value.index == 0


def test_diagonal_exact(family):
    f = ScalarFunction.exp(0.3)
    for B in family[:10]:
        F = apply(B, compute_theta(B), f)
        assert np.array_equal(F.diagonal(), f(B.diagonal()))


def test_dimension_mismatch(b2):
    with pytest.raises(DimensionMismatch):
        apply(b2, compute_theta(LowerTriangular.diag([1, 2, 3])), ScalarFunction.exp())


class TestSemigroup:
    def test_zero_time_is_identity(self, family):
        for B in family[:10]:
            (P,) = exp_semigroup(B, compute_theta(B), [0])
            np.testing.assert_allclose(P.to_dense(), np.eye(B.dim), atol=1e-12)

    def test_markov_two_by_two(self):
        B = lt([[0], [1, -1]])
        (P,) = exp_semigroup(B, compute_theta(B), [1])
        np.testing.assert_allclose(P.to_dense(), [[1, 0], [1 - 1 / E, 1 / E]], rtol=1e-15)
        np.testing.assert_allclose(row_sums(P), [1, 1], atol=1e-15)

    def test_law_on_two_by_two(self, b2):
        P3, P7, P10 = exp_semigroup(b2, compute_theta(b2), [0.3, 0.7, 1.0])
        np.testing.assert_allclose(dense_multiply(P3.to_dense(), P7.to_dense()), P10.to_dense(), atol=1e-9)

    def test_law_on_family(self, family):
        rng = np.random.default_rng(5)
        for B in family:
            t, s = rng.uniform(0, 1, 2)
            Pt, Ps, Pts = exp_semigroup(B, compute_theta(B), [t, s, t + s])
            np.testing.assert_allclose(Pt.to_dense() @ Ps.to_dense(), Pts.to_dense(), atol=1e-9, rtol=0)

    def test_parallel_matches_serial(self, b3):
        T = compute_theta(b3)
        ts = np.linspace(0, 2, 9)
        assert exp_semigroup(b3, T, ts, parallel=True) == exp_semigroup(b3, T, ts)

    def test_zero_row_sums_propagate(self):
        for i in range(20):
            B = random_rate_matrix(make_rng(3, i), int(make_rng(4, i).integers(2, 9)))
            assert np.all(np.abs(row_sums(B)) <= 1e-12)
            assert B[0, 0] == 0
            T = compute_theta(B)
            for t in np.linspace(0, 5, 6):
                (P,) = exp_semigroup(B, T, [t])
                np.testing.assert_allclose(row_sums(P), 1, atol=1e-10)

    def test_snapshot_spectrum_is_simple(self, family):
        for B in family[:15]:
            for t in (0.2, -0.7, 1.5):
                (P,) = exp_semigroup(B, compute_theta(B), [t])
                diag = P.diagonal()
                assert len(set(diag.tolist())) == B.dim
                validate_simple_spectrum(P, 0.0)


class TestParlett:
    def test_exp(self, b2):
        F = parlett_apply(b2, ScalarFunction.exp(1))
        np.testing.assert_allclose(F.to_dense(), [[E, 0], [E**3 - E, E**3]], rtol=1e-14)

    def test_inverse_diag(self):
        F = parlett_apply(LowerTriangular.diag([2, 4]), ScalarFunction.inverse())
        assert F.to_dense().tolist() == [[0.5, 0], [0, 0.25]]

    def test_identity_polynomial(self, family):
        for B in family[:10]:
            F = parlett_apply(B, ScalarFunction.polynomial([0, 1]))
            np.testing.assert_allclose(F.entries, B.entries, atol=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateSpectrum):
            parlett_apply(LowerTriangular.diag([3, 3]), ScalarFunction.exp())

    def test_coefficients_trivial_and_two_by_two(self, b2):
        T = parlett_coefficients(LowerTriangular.diag([1, 2, 3]))
        assert T == compute_theta(LowerTriangular.diag([1, 2, 3]))
        T = parlett_coefficients(b2)
        # coefficient vector of p_21 is 2 / (3 - 1) * (e_2 - e_1)
        assert T[1, 0, 0] == -1 and T[1, 1, 0] == 1

    def test_coefficients_equal_theta(self, family):
        for B in family:
            np.testing.assert_allclose(parlett_coefficients(B).values, compute_theta(B).values,
                                       atol=1e-9, rtol=0)

    @pytest.mark.parametrize("f", BUILTINS, ids=lambda f: f.name)
    def test_route_equivalence(self, family, f):
        for B in family:
            if f.kind == "exp" and np.max(np.abs(B.entries)) > 5:
                continue
            a = apply(B, compute_theta(B), f)
            b = parlett_apply(B, f)
            scale = max(1.0, np.max(np.abs(a.entries)))
            np.testing.assert_allclose(a.entries, b.entries, atol=1e-9 * scale, rtol=0)


def test_one_table_many_functions(b3):
    T = compute_theta(b3)
    exp_part = apply(b3, T, ScalarFunction.exp(0.5))
    inv_part = apply(b3, T, ScalarFunction.inverse())
    sqrt_part = apply(b3, T, ScalarFunction.power(0.5))
    log_part = apply(b3, T, ScalarFunction.log())
    D = b3.to_dense()
    np.testing.assert_allclose(exp_part.to_dense(), exp_series(0.5 * D), atol=1e-12)
    np.testing.assert_allclose(inv_part.to_dense(), np.linalg.inv(D), atol=1e-14)
    np.testing.assert_allclose(sqrt_part.to_dense() @ sqrt_part.to_dense(), D, atol=1e-13)
    np.testing.assert_allclose(log_part.to_dense(), log_integral(D, 64), atol=1e-10)


def test_complex_principal_log():
    B = LowerTriangular(2, [-1 + 0.5j, 0.3, 2 + 0j])
    L = apply(B, compute_theta(B), ScalarFunction.log())
    np.testing.assert_allclose(exp_series(L.to_dense()), B.to_dense(), atol=1e-12)


def test_function_from_name():
    assert function_from_name("exp", t=2).t == 2
    assert function_from_name("poly", coeffs=[1, 2]).coeffs == (1, 2)
    with pytest.raises(ValueError):
        function_from_name("poly")
    with pytest.raises(ValueError):
        function_from_name("sin")


@given(st.integers(0, 5000), st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=40, deadline=None)
def test_semigroup_law_property(seed, t, s):
    B = well_separated_family(1, seed, 2, 8)[0]
    T = compute_theta(B)
    Pt, Ps, Pts = exp_semigroup(B, T, [t, s, t + s])
    np.testing.assert_allclose(Pt.to_dense() @ Ps.to_dense(), Pts.to_dense(), atol=1e-9, rtol=0)
