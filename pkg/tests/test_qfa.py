"""Tests for the qfa module."""

import math

import numpy as np
import pytest

from qfactl.automata import APLUS_PROBABILITY, C5_PROBABILITY, build_aplus, build_construction5
from qfactl.linalg import complete_to_unitary
from qfactl.qfa import (
    END,
    KAPPA,
    QfaSpec,
    accumulate,
    as_word,
    correct_probability,
    enumerate_words,
    nonhalting_operator,
    recognition_margin,
    run,
    step,
    trace,
    validate,
)

R2 = 1 / math.sqrt(2)


def coin(**overrides):
    """Three-state QFA: each 'a' accepts half of the amplitude, '$' rejects the rest."""
    fields = dict(
        states=["q0", "acc", "rej"],
        alphabet=("a",),
        transitions={
            KAPPA: np.eye(3),
            "a": complete_to_unitary([[R2, R2, 0]]),
            END: complete_to_unitary([[0, 0, 1]]),
        },
        initial=[1, 0, 0],
        accepting={"acc"},
        rejecting={"rej"},
    )
    fields.update(overrides)
    return QfaSpec(**fields)


class TestQfaSpec:
    """Test cases for the QfaSpec container."""

    def test_arrays_are_frozen(self):
        spec = coin()
        with pytest.raises(ValueError):
            spec.initial[0] = 0
        with pytest.raises(TypeError):
            spec.transitions["b"] = np.eye(3)

    def test_masks_and_nonhalting_states(self):
        spec = coin()
        assert spec.nonhalting == ("q0",)
        assert list(spec.accept_mask) == [False, True, False]
        assert list(spec.nonhalting_mask) == [True, False, False]

    def test_unknown_letter(self):
        with pytest.raises(ValueError, match="Unknown letter"):
            coin().matrix("b")

    def test_unknown_state(self):
        with pytest.raises(ValueError, match="Unknown state"):
            coin().index("q9")

    def test_as_word_splits_strings(self):
        assert as_word("ab") == ("a", "b")
        assert as_word(("b1", "z2")) == ("b1", "z2")


class TestValidate:
    """Test cases for structural validation."""

    def test_catalog_automata_are_valid(self):
        assert validate(build_aplus().qfa) == []
        assert validate(build_construction5().qfa) == []

    def test_non_unitary_matrix(self):
        spec = coin(transitions={KAPPA: np.eye(3), "a": 1.1 * np.eye(3), END: np.eye(3)})
        violations = validate(spec)
        assert [v.invariant for v in violations] == ["unitarity"]
        assert violations[0].subject == "a"

    def test_missing_matrix_and_bad_shape(self):
        spec = coin(transitions={KAPPA: np.eye(3), "a": np.eye(2)})
        kinds = {v.invariant for v in validate(spec)}
        assert kinds == {"transition present", "shape"}

    def test_overlapping_halting_sets(self):
        spec = coin(accepting={"acc", "rej"})
        assert "partition" in {v.invariant for v in validate(spec)}

    def test_unnormalized_initial_state(self):
        spec = coin(initial=[1, 1, 0])
        assert [v.invariant for v in validate(spec)] == ["normalization"]

    def test_endmarker_in_alphabet(self):
        spec = coin(alphabet=("a", END))
        assert "endmarker" in {v.invariant for v in validate(spec)}

    def test_violation_text(self):
        spec = coin(initial=[1, 1, 0])
        assert str(validate(spec)[0]).startswith("normalization violated by initial")


class TestRun:
    """Test cases for step, accumulate, run and trace."""

    def test_coin_probabilities(self):
        spec = coin()
        assert run(spec, "").p_rej == pytest.approx(1.0)
        result = run(spec, "a")
        assert result.p_acc == pytest.approx(0.5)
        assert result.p_rej == pytest.approx(0.5)
        result = run(spec, "aa")
        assert result.p_acc == pytest.approx(0.75)
        assert result.p_rej == pytest.approx(0.25)
        assert result.residual_norm_sq == pytest.approx(0.0, abs=1e-15)

    def test_step_projects_out_halting_states(self):
        outcome = step(coin(), [1, 0, 0], "a")
        assert outcome.p_acc_step == pytest.approx(0.5)
        assert outcome.p_rej_step == pytest.approx(0.0)
        assert np.allclose(outcome.residual, [R2, 0, 0])

    def test_step_dimension_check(self):
        with pytest.raises(ValueError, match="amplitudes"):
            step(coin(), [1, 0], "a")

    def test_run_rejects_unknown_letters(self):
        with pytest.raises(ValueError, match="not in the input alphabet"):
            run(coin(), "ab")
        with pytest.raises(ValueError):
            run(coin(), (END,))

    def test_accumulate_is_additive_over_prefixes(self):
        spec = build_aplus().qfa
        word = ("a", "a", "b", "a")
        head = accumulate(spec, (KAPPA,) + word[:2])
        tail = accumulate(spec, word[2:] + (END,), start=head.residual)
        whole = run(spec, word)
        assert head.p_acc + tail.p_acc == pytest.approx(whole.p_acc, abs=1e-12)
        assert head.p_rej + tail.p_rej == pytest.approx(whole.p_rej, abs=1e-12)

    def test_trace_covers_endmarkers(self):
        steps = trace(build_aplus().qfa, "ab")
        assert [letter for letter, _ in steps] == [KAPPA, "a", "b", END]
        total = sum(o.p_acc_step + o.p_rej_step for _, o in steps)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_run_is_bit_identical(self):
        spec = build_construction5().qfa
        for word in ("", "a", "aab", "abba"):
            first, second = run(spec, word), run(spec, word)
            assert first.p_acc == second.p_acc
            assert first.p_rej == second.p_rej
            assert np.array_equal(first.residual, second.residual)

    def test_double_letter_never_grows_the_state(self):
        spec = build_construction5().qfa
        rng = np.random.default_rng(5)
        for _ in range(100):
            psi = rng.normal(size=spec.size) + 1j * rng.normal(size=spec.size)
            once = np.linalg.norm(nonhalting_operator(spec, "a") @ psi)
            twice = np.linalg.norm(nonhalting_operator(spec, "aa") @ psi)
            assert twice <= once + 1e-12

    def test_nonhalting_operator_needs_a_word(self):
        with pytest.raises(ValueError):
            nonhalting_operator(coin(), "")
        assert np.allclose(nonhalting_operator(coin(), "a")[:, 0], [R2, 0, 0])


class TestAplusProbabilities:
    """Case probabilities of the a+ automaton."""

    def test_empty_word_rejected(self):
        assert run(build_aplus().qfa, "").p_rej == pytest.approx(APLUS_PROBABILITY, abs=1e-9)

    @pytest.mark.parametrize("word", ["a", "aa", "aaaa"])
    def test_members_accepted(self, word):
        assert run(build_aplus().qfa, word).p_acc == pytest.approx(APLUS_PROBABILITY, abs=1e-9)

    @pytest.mark.parametrize("word", ["ab", "aab", "aba"])
    def test_b_after_a_rejected(self, word):
        assert run(build_aplus().qfa, word).p_rej == pytest.approx(APLUS_PROBABILITY, abs=1e-9)

    def test_leading_b_rejected_with_certainty(self):
        assert run(build_aplus().qfa, "ba").p_rej == pytest.approx(1.0, abs=1e-12)

    def test_margin_over_words_up_to_six(self):
        named = build_aplus()
        margin = recognition_margin(named.qfa, named.oracle, enumerate_words("ab", 6))
        assert margin == pytest.approx(APLUS_PROBABILITY, abs=1e-9)


class TestConstruction5Probabilities:
    """The four word classes of the 0.7324 automaton."""

    @pytest.mark.parametrize("word", ["", "b", "bab", "a", "aaa", "ab", "aaba"])
    def test_every_case(self, word):
        named = build_construction5()
        p = correct_probability(named.qfa, named.oracle, word)
        assert p == pytest.approx(C5_PROBABILITY, abs=1e-9)

    def test_margin_over_words_up_to_six(self):
        named = build_construction5()
        margin = recognition_margin(named.qfa, named.oracle, enumerate_words("ab", 6))
        assert margin == pytest.approx(C5_PROBABILITY, abs=1e-9)


class TestEnumeration:
    """Test cases for enumerate_words and recognition_margin."""

    def test_shortlex_order(self):
        words = list(enumerate_words("ab", 2))
        assert words == [(), ("a",), ("b",), ("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]

    def test_count_includes_empty_word(self):
        assert len(list(enumerate_words("ab", 5))) == 63

    def test_negative_length(self):
        with pytest.raises(ValueError):
            list(enumerate_words("ab", -1))

    def test_margin_needs_words(self):
        with pytest.raises(ValueError):
            recognition_margin(coin(), lambda w: True, [])
