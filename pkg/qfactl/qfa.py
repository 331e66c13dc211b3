"""Measure-many quantum finite automata: validation, steps, runs, margins."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .linalg import IDENTITY_TOL, VALIDATION_TOL, as_vector, is_unitary

logger = logging.getLogger(__name__)

KAPPA = "kappa"
END = "$"
ENDMARKERS = (KAPPA, END)

NORM_TOL = IDENTITY_TOL
DEFAULT_ENUMERATION_LENGTH = 6

Word = Tuple[str, ...]
WordLike = Union[str, Sequence[str]]
LanguageOracle = Callable[[Word], bool]


def as_word(word: WordLike) -> Word:
    """Normalize a word to a tuple of letters.

    A plain string is read one character per letter.
    """
    return tuple(word)


@dataclass(frozen=True, eq=False)
class QfaSpec:
    """A measure-many QFA.

    ``transitions`` maps every letter of the working alphabet (input letters
    plus ``kappa`` and ``$``) to a matrix whose column j is the image of the
    j-th state.
    """

    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    transitions: Mapping[str, np.ndarray]
    initial: np.ndarray
    accepting: frozenset
    rejecting: frozenset

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "rejecting", frozenset(self.rejecting))
        matrices = {}
        for letter, matrix in self.transitions.items():
            arr = np.array(matrix, dtype=complex, copy=True)
            arr.setflags(write=False)
            matrices[letter] = arr
        object.__setattr__(self, "transitions", MappingProxyType(matrices))
        initial = np.array(self.initial, dtype=complex, copy=True)
        initial.setflags(write=False)
        object.__setattr__(self, "initial", initial)

    @property
    def working_alphabet(self) -> Tuple[str, ...]:
        return self.alphabet + ENDMARKERS

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def nonhalting(self) -> Tuple[str, ...]:
        halting = self.accepting | self.rejecting
        return tuple(q for q in self.states if q not in halting)

    def index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise ValueError(f"Unknown state: {state}") from None

    def basis_vector(self, state: str) -> np.ndarray:
        v = np.zeros(self.size, dtype=complex)
        v[self.index(state)] = 1.0
        return v

    def _mask(self, names) -> np.ndarray:
        return np.array([q in names for q in self.states], dtype=bool)

    @cached_property
    def accept_mask(self) -> np.ndarray:
        return self._mask(self.accepting)

    @cached_property
    def reject_mask(self) -> np.ndarray:
        return self._mask(self.rejecting)

    @cached_property
    def nonhalting_mask(self) -> np.ndarray:
        return ~(self.accept_mask | self.reject_mask)

    def matrix(self, letter: str) -> np.ndarray:
        if letter not in self.working_alphabet or letter not in self.transitions:
            raise ValueError(f"Unknown letter: {letter!r}")
        return self.transitions[letter]


@dataclass(frozen=True, eq=False)
class StepOutcome:
    p_acc_step: float
    p_rej_step: float
    residual: np.ndarray


@dataclass(frozen=True, eq=False)
class RunResult:
    """Cumulative halting probabilities and the unnormalized non-halting part."""

    p_acc: float
    p_rej: float
    residual: np.ndarray

    @property
    def residual_norm_sq(self) -> float:
        return float(np.vdot(self.residual, self.residual).real)


@dataclass(frozen=True)
class Violation:
    invariant: str
    subject: str
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.invariant} violated by {self.subject}"
        return f"{text}: {self.detail}" if self.detail else text


def validate(spec: QfaSpec, tol: float = VALIDATION_TOL) -> List[Violation]:
    """List every broken structural invariant of ``spec``; empty when valid."""
    violations: List[Violation] = []
    n = spec.size

    if len(set(spec.states)) != n:
        violations.append(Violation("distinct states", "states", "duplicate state names"))
    for marker in ENDMARKERS:
        if marker in spec.alphabet:
            violations.append(
                Violation("endmarker", marker, "endmarkers may not be input letters")
            )
    for letter in spec.working_alphabet:
        if letter not in spec.transitions:
            violations.append(Violation("transition present", letter, "no matrix given"))
    for letter in spec.transitions:
        if letter not in spec.working_alphabet:
            violations.append(
                Violation("transition present", letter, "letter is not in the alphabet")
            )

    for letter, matrix in spec.transitions.items():
        if matrix.ndim != 2 or matrix.shape != (n, n):
            violations.append(
                Violation("shape", letter, f"expected {n}x{n}, got {matrix.shape}")
            )
            continue
        if not np.all(np.isfinite(matrix)):
            violations.append(Violation("finite", letter, "NaN or infinite entry"))
            continue
        if not is_unitary(matrix, tol):
            defect = np.max(np.abs(matrix.conj().T @ matrix - np.eye(n)))
            violations.append(
                Violation("unitarity", letter, f"|V^H V - I| = {defect:.3e}")
            )

    overlap = spec.accepting & spec.rejecting
    if overlap:
        violations.append(
            Violation("partition", ", ".join(sorted(overlap)), "state is both accepting and rejecting")
        )
    unknown = (spec.accepting | spec.rejecting) - set(spec.states)
    if unknown:
        violations.append(
            Violation("partition", ", ".join(sorted(unknown)), "halting state is not a state")
        )

    if spec.initial.ndim != 1 or spec.initial.shape[0] != n:
        violations.append(
            Violation("initial", "initial", f"expected {n} amplitudes, got {spec.initial.shape}")
        )
    elif not np.all(np.isfinite(spec.initial)):
        violations.append(Violation("finite", "initial", "NaN or infinite amplitude"))
    else:
        norm = float(np.linalg.norm(spec.initial))
        if abs(norm - 1.0) > NORM_TOL:
            violations.append(Violation("normalization", "initial", f"norm is {norm:.15g}"))
    return violations


def step(spec: QfaSpec, state, letter: str) -> StepOutcome:
    """Apply one letter and measure accept / reject / continue."""
    matrix = spec.matrix(letter)
    state = as_vector(state)
    if state.shape[0] != spec.size:
        raise ValueError(
            f"State has {state.shape[0]} amplitudes, automaton has {spec.size} states"
        )
    psi = matrix @ state
    weights = np.abs(psi) ** 2
    return StepOutcome(
        p_acc_step=float(np.sum(weights[spec.accept_mask])),
        p_rej_step=float(np.sum(weights[spec.reject_mask])),
        residual=np.where(spec.nonhalting_mask, psi, 0),
    )


def accumulate(spec: QfaSpec, letters: Iterable[str], start=None) -> RunResult:
    """Fold ``step`` over ``letters`` from ``start`` (the initial state by default)."""
    state = spec.initial if start is None else as_vector(start)
    p_acc = 0.0
    p_rej = 0.0
    for letter in letters:
        outcome = step(spec, state, letter)
        p_acc += outcome.p_acc_step
        p_rej += outcome.p_rej_step
        state = outcome.residual
    return RunResult(p_acc=p_acc, p_rej=p_rej, residual=np.array(state, dtype=complex))


def _check_input(spec: QfaSpec, word: WordLike) -> Word:
    letters = as_word(word)
    for letter in letters:
        if letter not in spec.alphabet:
            raise ValueError(f"Letter {letter!r} is not in the input alphabet")
    return letters


def run(spec: QfaSpec, word: WordLike) -> RunResult:
    """Read ``kappa word $`` from the initial superposition."""
    letters = _check_input(spec, word)
    return accumulate(spec, (KAPPA,) + letters + (END,))


def trace(spec: QfaSpec, word: WordLike) -> List[Tuple[str, StepOutcome]]:
    """Per-letter outcomes of ``kappa word $``."""
    letters = _check_input(spec, word)
    outcomes = []
    state = spec.initial
    for letter in (KAPPA,) + letters + (END,):
        outcome = step(spec, state, letter)
        outcomes.append((letter, outcome))
        state = outcome.residual
    return outcomes


def nonhalting_operator(spec: QfaSpec, word: WordLike) -> np.ndarray:
    """``V'_w``: apply each letter, then project onto the non-halting states."""
    letters = as_word(word)
    if not letters:
        raise ValueError("The word must be nonempty")
    keep = spec.nonhalting_mask.astype(complex)
    operator = np.eye(spec.size, dtype=complex)
    for letter in letters:
        operator = keep[:, None] * (spec.matrix(letter) @ operator)
    return operator


def correct_probability(spec: QfaSpec, oracle: LanguageOracle, word: WordLike) -> float:
    result = run(spec, word)
    return result.p_acc if oracle(as_word(word)) else result.p_rej


def recognition_margin(
    spec: QfaSpec, oracle: LanguageOracle, words: Iterable[WordLike]
) -> float:
    """Smallest probability of the correct answer over ``words``."""
    margin: Optional[float] = None
    for word in words:
        p = correct_probability(spec, oracle, word)
        margin = p if margin is None else min(margin, p)
    if margin is None:
        raise ValueError("Need at least one word to measure a margin")
    return margin


def enumerate_words(alphabet: Sequence[str], max_len: int) -> Iterator[Word]:
    """All words of length at most ``max_len`` in shortlex order, empty word first."""
    if max_len < 0:
        raise ValueError("Maximum length must be non-negative")
    for length in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=length)
