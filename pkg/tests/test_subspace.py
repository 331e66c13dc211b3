"""Tests for the subspace module."""

import numpy as np
import pytest

from qfactl.automata import build_aplus, build_kcycles
from qfactl.linalg import Basis, complete_to_unitary
from qfactl.qfa import END, KAPPA, QfaSpec, nonhalting_operator
from qfactl.subspace import EscapeSearchLimit, decompose, escape_word, recurrence_exponent


def rotation_qfa():
    """Two non-halting states rotated into each other by 'a'; 'b' halts q1."""
    c, s = np.cos(0.3), np.sin(0.3)
    return QfaSpec(
        states=["q0", "q1", "acc", "rej"],
        alphabet=("a", "b"),
        transitions={
            KAPPA: np.eye(4),
            "a": complete_to_unitary([[c, s, 0, 0], [-s, c, 0, 0]]),
            "b": complete_to_unitary([[1, 0, 0, 0], [0, 0, 1, 0]]),
            END: complete_to_unitary([[0, 0, 1, 0], [0, 0, 0, 1]]),
        },
        initial=[1, 0, 0, 0],
        accepting={"acc"},
        rejecting={"rej"},
    )


class TestDecompose:
    """Test cases for the E1 / E2 split."""

    def test_aplus_under_a(self):
        spec = build_aplus().qfa
        pair = decompose(spec, ["a"])
        assert (pair.e1.rank, pair.e2.rank) == (1, 1)
        assert pair.e1.distance(spec.basis_vector("q0")) == pytest.approx(0.0, abs=1e-9)
        assert pair.e2.distance(spec.basis_vector("q1")) == pytest.approx(0.0, abs=1e-9)

    def test_aplus_under_both_letters(self):
        pair = decompose(build_aplus().qfa, ["a", "b"])
        assert (pair.e1.rank, pair.e2.rank) == (0, 2)

    def test_kcycles_keeps_the_looping_state(self):
        spec = build_kcycles(2).qfa
        pair = decompose(spec, [("b1",), ("b2",)])
        assert (pair.e1.rank, pair.e2.rank) == (1, 1)
        assert pair.e1.distance(spec.basis_vector("p2")) == pytest.approx(0.0, abs=1e-9)

    def test_unitary_restriction_keeps_everything(self):
        pair = decompose(rotation_qfa(), ["a"])
        assert (pair.e1.rank, pair.e2.rank) == (2, 0)
        assert pair.iterations == 1
        assert not pair.borderline

    def test_bad_arguments(self):
        spec = rotation_qfa()
        with pytest.raises(ValueError):
            decompose(spec, [])
        with pytest.raises(ValueError):
            decompose(spec, [""])
        with pytest.raises(ValueError, match="not in the input alphabet"):
            decompose(spec, ["c"])
        with pytest.raises(ValueError):
            decompose(spec, ["a"], tol=0)

    def test_start_from_the_non_halting_space(self):
        spec = build_aplus().qfa
        start = Basis.from_vectors([spec.basis_vector("q0"), spec.basis_vector("q1")])
        pair = decompose(spec, ["a"], within=start)
        assert (pair.e1.rank, pair.e2.rank) == (1, 1)
        assert pair.e1.distance(spec.basis_vector("q0")) == pytest.approx(0.0, abs=1e-9)

    def test_start_must_avoid_halting_states(self):
        spec = build_aplus().qfa
        with pytest.raises(ValueError, match="non-halting space"):
            decompose(spec, ["a"], within=Basis.from_vectors([spec.basis_vector("qacc")]))
        with pytest.raises(ValueError, match="dimension"):
            decompose(spec, ["a"], within=Basis.from_vectors([[1.0, 0.0]]))


class TestEscapeWord:
    """Test cases for escape_word."""

    def test_aplus_transient_vector_escapes_in_one_letter(self):
        spec = build_aplus().qfa
        assert escape_word(spec, ["a"], spec.basis_vector("q1"), 1e-6, 5) == ("a",)

    def test_escape_shrinks_the_vector(self):
        spec = rotation_qfa()
        psi = spec.basis_vector("q1")
        word = escape_word(spec, ["a", "b"], psi, 1e-3, 40)
        assert word == ("b",)
        assert np.linalg.norm(nonhalting_operator(spec, word) @ psi) < 1e-3

    def test_gives_up_past_max_len(self):
        spec = rotation_qfa()
        assert escape_word(spec, ["a", "b"], spec.basis_vector("q0"), 1e-12, 1) is None

    def test_long_escape_word_through_wide_layers(self):
        """Three quarter turns, each followed by b, are the only way under 1e-3 in 18 letters."""
        spec = rotation_qfa()
        psi = spec.basis_vector("q0")
        expected = (("a",) * 5 + ("b",)) * 3
        assert escape_word(spec, ["a", "b"], psi, 1e-3, 18) == expected

    def test_best_first_search_after_a_narrow_beam(self):
        """A beam of one follows ab, abab, ... and misses the quarter turn."""
        spec = rotation_qfa()
        psi = spec.basis_vector("q0")
        word = escape_word(spec, ["a", "b"], psi, 0.08, 6, beam_width=1)
        assert word == ("a",) * 5 + ("b",)

    def test_search_limit_is_not_a_missing_word(self):
        spec = rotation_qfa()
        with pytest.raises(EscapeSearchLimit):
            escape_word(
                spec, ["a", "b"], spec.basis_vector("q0"), 1e-12, 30, beam_width=1, node_limit=1
            )

    def test_search_limits_must_be_positive(self):
        spec = build_aplus().qfa
        with pytest.raises(ValueError):
            escape_word(spec, ["a"], spec.basis_vector("q1"), 1e-3, 5, beam_width=0)

    def test_vector_must_be_transient(self):
        spec = build_aplus().qfa
        with pytest.raises(ValueError, match="E2"):
            escape_word(spec, ["a"], spec.basis_vector("q0"), 1e-3, 5)

    def test_eps_must_be_positive(self):
        spec = build_aplus().qfa
        with pytest.raises(ValueError):
            escape_word(spec, ["a"], spec.basis_vector("q1"), 0.0, 5)


class TestRecurrence:
    """Test cases for recurrence_exponent."""

    def test_fixed_vector_returns_at_once(self):
        spec = build_aplus().qfa
        assert recurrence_exponent(spec, "a", spec.basis_vector("q0"), 1e-9, 10) == 1

    def test_rotation_comes_back_close(self):
        spec = rotation_qfa()
        i = recurrence_exponent(spec, "a", spec.basis_vector("q0"), 0.05, 1000)
        assert i is not None and i > 1
        v = np.linalg.matrix_power(nonhalting_operator(spec, "a"), i) @ spec.basis_vector("q0")
        assert np.linalg.norm(v - spec.basis_vector("q0")) <= 0.05

    def test_vector_must_be_ergodic(self):
        spec = build_aplus().qfa
        with pytest.raises(ValueError, match="E1"):
            recurrence_exponent(spec, "a", spec.basis_vector("q1"), 1e-3, 5)
