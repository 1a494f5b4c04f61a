import numpy as np
import pytest

from trifun.exceptions import DegenerateSpectrum, DomainViolation, NonPositiveDiagonal
from trifun.funm import exp_semigroup
from trifun.genlog import (
    SemigroupSample,
    check_markov,
    eta_coefficients,
    extract_generator,
    verify_generator,
)
from trifun.matcore import LowerTriangular, from_dense
from trifun.oracles import exp_series, log_series
from trifun.sampling import make_rng, random_rate_matrix
from trifun.theta import compute_theta

from conftest import E, lt


def sample(rows, t=1.0):
    return SemigroupSample(lt(rows), t)


class TestEta:
    def test_diag(self):
        T = eta_coefficients(SemigroupSample(LowerTriangular.diag([E, E**3]), 1))
        assert T == compute_theta(LowerTriangular.diag([1, 3]))

    def test_two_by_two(self):
        T = eta_coefficients(sample([[E], [E**3 - E, E**3]]))
        # eta_2(1,1) = p_21 / (p_11 - p_22)
        assert T[1, 0, 0] == pytest.approx(-1, abs=1e-15)
        assert T[1, 1, 0] == pytest.approx(1, abs=1e-15)

    def test_three_by_three_equals_theta(self, b3):
        P = from_dense(exp_series(b3.to_dense()))
        np.testing.assert_allclose(eta_coefficients(SemigroupSample(P, 1)).values,
                                   compute_theta(b3).values, atol=1e-8)


class TestExtract:
    def test_diag(self):
        R = extract_generator(SemigroupSample(LowerTriangular.diag([E, E**3]), 1))
        np.testing.assert_allclose(R.B.to_dense(), np.diag([1, 3]), atol=1e-15)

    def test_two_by_two(self):
        S = sample([[E], [E**3 - E, E**3]])
        R = extract_generator(S)
        np.testing.assert_allclose(R.B.to_dense(), [[1, 0], [2, 3]], atol=1e-13)
        assert verify_generator(R, S).residual <= 1e-10

    def test_markov_snapshot(self):
        R = extract_generator(sample([[1], [1 - 1 / E, 1 / E]]))
        np.testing.assert_allclose(R.B.to_dense(), [[0, 0], [1, -1]], atol=1e-15)
        assert R.diagnostics.markov_input and R.diagnostics.rate_matrix
        np.testing.assert_allclose(R.diagnostics.row_sums_of_B, [0, 0], atol=1e-15)

    def test_diagonal_is_scaled_log(self):
        S = sample([[2.0], [0.3, 0.5], [0.1, 0.2, 4.0]], t=0.7)
        R = extract_generator(S)
        np.testing.assert_array_equal(R.B.diagonal(), np.log(S.P.diagonal()) / 0.7)

    def test_identity_is_degenerate(self):
        with pytest.raises(DegenerateSpectrum):
            extract_generator(SemigroupSample(LowerTriangular.diag([1, 1]), 1))

    @pytest.mark.parametrize("diag", [[1, -0.5], [0, 2]])
    def test_nonpositive_diagonal(self, diag):
        with pytest.raises(NonPositiveDiagonal):
            SemigroupSample(LowerTriangular.diag(diag), 1)

    def test_complex_rejected(self):
        with pytest.raises(DomainViolation):
            SemigroupSample(LowerTriangular(1, [1j]), 1)

    def test_time_must_be_positive(self):
        with pytest.raises(ValueError):
            sample([[E]], t=0)

    def test_deterministic(self, family):
        B = family[0]
        (P,) = exp_semigroup(B, compute_theta(B), [0.5])
        a = extract_generator(SemigroupSample(P, 0.5))
        b = extract_generator(SemigroupSample(P, 0.5))
        assert a.B == b.B and a.eta == b.eta

    def test_non_embeddable_markov_snapshot_is_reported(self):
        # stochastic with p_31 = 0 but p_32 > 0: the real generator has a negative rate
        P = lt([[1], [0.5, 0.5], [0.0, 0.4, 0.6]])
        R = extract_generator(SemigroupSample(P, 1))
        assert R.diagnostics.markov_input
        assert not R.diagnostics.rate_matrix
        assert R.B[2, 0] < 0
        np.testing.assert_allclose(exp_series(R.B.to_dense()), P.to_dense(), atol=1e-12)


class TestRoundTrip:
    def test_family(self, family):
        for B in family:
            T = compute_theta(B)
            for t in (0.1, 0.5, 1.0, 2.0):
                if t * np.max(np.abs(B.entries)) > 5:
                    continue
                (P,) = exp_semigroup(B, T, [t])
                R = extract_generator(SemigroupSample(P, t))
                np.testing.assert_allclose(R.B.entries, B.entries, atol=1e-8, rtol=0)

    def test_eta_time_independent(self, family):
        for B in family[:15]:
            T = compute_theta(B)
            P1, P2 = exp_semigroup(B, T, [0.2, 0.9])
            e1 = eta_coefficients(SemigroupSample(P1, 0.2))
            e2 = eta_coefficients(SemigroupSample(P2, 0.9))
            np.testing.assert_allclose(e1.values, e2.values, atol=1e-8)
            np.testing.assert_allclose(e1.values, T.values, atol=1e-8)

    def test_markov_closure(self):
        for i in range(15):
            rng = make_rng(21, i)
            B = random_rate_matrix(rng, int(rng.integers(2, 9)))
            (P,) = exp_semigroup(B, compute_theta(B), [1.0])
            assert check_markov(P, 1e-12).is_markov
            R = extract_generator(SemigroupSample(P, 1))
            assert np.all(np.abs(R.diagnostics.row_sums_of_B) <= 1e-9)
            assert R.diagnostics.rate_matrix
            for s in np.linspace(0, 5, 6):
                (Q,) = exp_semigroup(R.B, R.eta, [s])
                assert check_markov(Q, 1e-9).is_markov

    def test_log_series_agreement(self, family):
        for B in family[:15]:
            D = B.to_dense()
            s = 0.5 / np.max(np.abs(np.diag(D)))
            P = exp_series(s * D)
            R = extract_generator(SemigroupSample(from_dense(P), 1.0))
            np.testing.assert_allclose(R.B.to_dense(), log_series(P), atol=1e-7)


class TestMarkov:
    def test_identity(self):
        assert check_markov(LowerTriangular.diag([1, 1, 1])).is_markov

    def test_two_state(self):
        rep = check_markov(lt([[1], [1 - 1 / E, 1 / E]]))
        assert rep.is_markov

    def test_negative_entry(self):
        rep = check_markov(lt([[1], [-0.1, 1.1]]))
        assert not rep.is_markov
        assert not rep.nonnegative
        assert rep.unit_row_sums


class TestVerify:
    def test_exact_pair(self):
        S = sample([[E], [E**3 - E, E**3]])
        assert verify_generator(extract_generator(S), S).ok

    def test_zero_generator(self):
        from trifun.genlog import GeneratorResult, GeneratorDiagnostics

        B = LowerTriangular.diag([0.0, 0.0])
        R = GeneratorResult(B, compute_theta(LowerTriangular.diag([0, 1])),
                            GeneratorDiagnostics(np.zeros(2), True, True, 1.0))
        v = verify_generator(R, SemigroupSample(LowerTriangular.diag([1.0, 1.0]), 1))
        assert v.residual == 0

    def test_mismatch(self):
        from trifun.genlog import GeneratorResult, GeneratorDiagnostics

        B = LowerTriangular.diag([1.0, 3.0])
        R = GeneratorResult(B, compute_theta(B), GeneratorDiagnostics(np.zeros(2), False, False, 1.0))
        v = verify_generator(R, SemigroupSample(LowerTriangular.diag([E, E**2]), 1))
        assert v.residual == pytest.approx(E**3 - E**2, rel=1e-12)
        assert not v.ok
