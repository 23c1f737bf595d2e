import numpy as np
import pytest

from cvqe import (
    PauliSum,
    PauliTerm,
    coefficient_norm,
    commutes,
    multiply_terms,
    square_shifted,
    trace,
)
from cvqe.errors import DimensionMismatch, HermiticityError
from helpers import dense_oracle, random_pauli_sum


class TestTermProducts:
    def test_involution(self):
        t = multiply_terms(PauliTerm(1.0, ((0, "X"),)), PauliTerm(1.0, ((0, "X"),)))
        assert t.coefficient == 1.0 and t.axes == ()

    def test_xy_gives_iz(self):
        t = multiply_terms(PauliTerm(1.0, ((0, "X"),)), PauliTerm(1.0, ((0, "Y"),)))
        assert t.coefficient == 1j and t.axes == ((0, "Z"),)

    def test_disjoint_supports(self):
        t = multiply_terms(PauliTerm(2.0, ((0, "X"),)), PauliTerm(0.5, ((1, "Y"),)))
        assert t.coefficient == 1.0 and t.axes == ((0, "X"), (1, "Y"))

    def test_single_qubit_table_matches_dense(self):
        # every ordered pair of single-qubit terms against 2x2 matrices
        for a in ("X", "Y", "Z"):
            for b in ("X", "Y", "Z"):
                t = multiply_terms(PauliTerm(1.0, ((0, a),)), PauliTerm(1.0, ((0, b),)))
                result = t.coefficient * dense_oracle(
                    PauliSum((PauliTerm(1.0, t.axes),), 1)
                )
                expected = dense_oracle(PauliSum((PauliTerm(1.0, ((0, a),)),), 1)) @ dense_oracle(
                    PauliSum((PauliTerm(1.0, ((0, b),)),), 1)
                )
                assert np.allclose(result, expected, atol=1e-15)

    def test_multi_qubit_product_matches_dense(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            n = int(rng.integers(2, 5))
            ta = random_pauli_sum(rng, n, 1).terms[0]
            tb = random_pauli_sum(rng, n, 1).terms[0]
            t = multiply_terms(ta, tb)
            left = dense_oracle(PauliSum((PauliTerm(1.0, ta.axes),), n)) * ta.coefficient
            right = dense_oracle(PauliSum((PauliTerm(1.0, tb.axes),), n)) * tb.coefficient
            prod = t.coefficient * dense_oracle(PauliSum((PauliTerm(1.0, t.axes),), n))
            assert np.allclose(prod, left @ right, atol=1e-12)


class TestCanonicalization:
    def test_like_terms_merge(self):
        s = PauliSum((PauliTerm(0.5, ((0, "Z"),)), PauliTerm(0.25, ((0, "Z"),))), 1)
        assert len(s.terms) == 1
        assert s.terms[0].coefficient == 0.75

    def test_drop_tolerance(self):
        s = PauliSum((PauliTerm(1e-13, ((0, "X"),)), PauliTerm(1.0, ((0, "Z"),))), 1)
        assert len(s.terms) == 1

    def test_idempotent(self):
        rng = np.random.default_rng(5)
        s = random_pauli_sum(rng, 3, 8)
        again = PauliSum(s.terms, s.qubit_count)
        assert again == s

    def test_residual_imaginary_rejected(self):
        with pytest.raises(HermiticityError):
            PauliSum((PauliTerm(1j, ((0, "X"),)),), 1)

    def test_out_of_range_qubit_rejected(self):
        with pytest.raises(ValueError):
            PauliSum((PauliTerm(1.0, ((3, "X"),)),), 2)

    def test_deterministic_ordering(self):
        a = PauliSum((PauliTerm(1.0, ((1, "Z"),)), PauliTerm(2.0, ((0, "X"),))), 2)
        b = PauliSum((PauliTerm(2.0, ((0, "X"),)), PauliTerm(1.0, ((1, "Z"),))), 2)
        assert a.terms == b.terms


class TestSquareShifted:
    def test_half_z(self):
        c = PauliSum((PauliTerm(0.5, ((0, "Z"),)),), 1)
        sq = square_shifted(c, 0.5)
        assert sq == PauliSum((PauliTerm(0.5), PauliTerm(-0.5, ((0, "Z"),))), 1)

    def test_identity_shift_is_zero(self):
        c = PauliSum((PauliTerm(1.0),), 2)
        assert square_shifted(c, 1.0).terms == ()

    def test_random_against_dense(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            c = random_pauli_sum(rng, n, 5)
            shift = float(rng.normal())
            lhs = dense_oracle(square_shifted(c, shift))
            m = dense_oracle(c) - shift * np.eye(2**n)
            assert np.max(np.abs(lhs - m @ m)) < 1e-12


class TestCommutes:
    def test_heisenberg_with_total_sz(self):
        from cvqe import build_heisenberg_chain, build_total_sz

        assert commutes(build_heisenberg_chain(4), build_total_sz(4))

    def test_anticommuting_pair(self):
        a = PauliSum((PauliTerm(1.0, ((0, "X"),)),), 1)
        b = PauliSum((PauliTerm(1.0, ((0, "Z"),)),), 1)
        assert not commutes(a, b)

    def test_two_anticommutations_compose(self):
        a = PauliSum((PauliTerm(1.0, ((0, "X"), (1, "X"))),), 2)
        b = PauliSum((PauliTerm(1.0, ((0, "Z"), (1, "Z"))),), 2)
        assert commutes(a, b)

    def test_dimension_mismatch(self):
        a = PauliSum((PauliTerm(1.0, ((0, "X"),)),), 1)
        b = PauliSum((PauliTerm(1.0, ((0, "X"),)),), 2)
        with pytest.raises(DimensionMismatch):
            commutes(a, b)

    def test_commuting_implies_dense_commute(self):
        from cvqe import build_s_squared, build_total_sz
        from helpers import random_symmetric_hamiltonian

        rng = np.random.default_rng(9)
        for _ in range(10):
            n = int(rng.integers(2, 5))
            a = random_symmetric_hamiltonian(rng, n)
            for b in (build_total_sz(n), build_s_squared(n)):
                assert commutes(a, b)
                ma, mb = dense_oracle(a), dense_oracle(b)
                assert np.max(np.abs(ma @ mb - mb @ ma)) < 1e-10


class TestScalars:
    def test_coefficient_norm(self):
        s = PauliSum(
            (PauliTerm(0.5, ((0, "Z"), (1, "Z"))), PauliTerm(-0.25, ((0, "X"),))), 2
        )
        assert coefficient_norm(s) == 0.75

    def test_empty_norm(self):
        assert coefficient_norm(PauliSum((), 2)) == 0.0

    def test_norm_bounds_spectral_norm(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            s = random_pauli_sum(rng, n, 6)
            spectral = np.max(np.abs(np.linalg.eigvalsh(dense_oracle(s))))
            assert coefficient_norm(s) >= spectral - 1e-10

    def test_trace_identity(self):
        assert trace(PauliSum((PauliTerm(1.0),), 3)) == 8.0

    def test_trace_traceless_pauli(self):
        assert trace(PauliSum((PauliTerm(1.0, ((0, "Z"),)),), 2)) == 0.0

    def test_trace_matches_dense(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            s = random_pauli_sum(rng, n, 6)
            assert abs(trace(s) - np.real(np.trace(dense_oracle(s)))) < 1e-10
