"""Catalog of the explicit automata: three QFAs and the DFAs of their languages."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .dfa import DfaSpec
from .linalg import complete_to_unitary
from .qfa import END, KAPPA, LanguageOracle, QfaSpec, Word, as_word

# sin^2 of the a+ angle: root of 4y(1-y) = (1+y^2)/2.
APLUS_SIN_SQ = (4 + math.sqrt(7)) / 9
APLUS_PROBABILITY = (52 + 4 * math.sqrt(7)) / 81
# Angle of the incomparable-pair automaton: 1 - 2cos^2(alpha) = sqrt(3/5).
C5_ALPHA = math.acos(math.sqrt((1 - math.sqrt(3 / 5)) / 2))
C5_PROBABILITY = 0.5 + 3 * math.sqrt(15) / 50

DEFAULT_K = 2


def kcycles_probability(k: int) -> float:
    return k / (2 * k - 1)


@dataclass(frozen=True, eq=False)
class NamedAutomaton:
    name: str
    qfa: QfaSpec
    oracle: LanguageOracle
    claimed_probability: float
    language: str
    dfa_name: str
    k: Optional[int] = None


def _unit(states: Sequence[str], amplitudes: Dict[str, float]) -> np.ndarray:
    v = np.zeros(len(states), dtype=complex)
    for state, amplitude in amplitudes.items():
        v[states.index(state)] = amplitude
    return v


def _letter_matrix(states: Sequence[str], images: Dict[str, Dict[str, float]]) -> np.ndarray:
    """Unitary whose columns for the non-halting states are the given images.

    ``images`` must list the non-halting states in the order they appear at
    the front of ``states``; halting columns come from the completion.
    """
    columns = [_unit(states, image) for image in images.values()]
    return complete_to_unitary(columns, dim=len(states))


def _identity(states: Sequence[str]) -> np.ndarray:
    return np.eye(len(states), dtype=complex)


def build_aplus() -> NamedAutomaton:
    """Five-state QFA for a+ over {a, b}."""
    states = ["q0", "q1", "qacc", "qrej", "qrej1"]
    s = math.sqrt(APLUS_SIN_SQ)
    c = math.sqrt(1 - APLUS_SIN_SQ)
    transitions = {
        KAPPA: _identity(states),
        "a": _letter_matrix(
            states,
            {
                "q0": {"q0": 1.0},
                "q1": {"qacc": math.sqrt((1 + s * s) / 2), "qrej": c / math.sqrt(2)},
            },
        ),
        "b": _letter_matrix(states, {"q0": {"qrej": 1.0}, "q1": {"qrej1": 1.0}}),
        END: _letter_matrix(
            states,
            {"q0": {"qacc": s, "qrej": c}, "q1": {"qacc": -c, "qrej": s}},
        ),
    }
    qfa = QfaSpec(
        states=states,
        alphabet=("a", "b"),
        transitions=transitions,
        initial=_unit(states, {"q0": s, "q1": c}),
        accepting={"qacc"},
        rejecting={"qrej", "qrej1"},
    )
    return NamedAutomaton(
        name="aplus",
        qfa=qfa,
        oracle=language_oracle("aplus"),
        claimed_probability=APLUS_PROBABILITY,
        language="a+",
        dfa_name="aplus",
    )


def kcycles_alphabet(k: int) -> tuple:
    return tuple(f"b{i}" for i in range(1, k + 1)) + tuple(f"z{i}" for i in range(1, k + 1))


def build_kcycles(k: int) -> NamedAutomaton:
    """QFA with 3k states recognizing L1(k) with probability k/(2k-1)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    loops = list(range(2, k + 1))
    primed = ["p0"] + [f"p{j}" for j in loops]
    accepting = ["a0"] + [f"a{j}" for j in loops]
    rejecting = ["r0"] + [f"r{j}" for j in loops]
    states = primed + accepting + rejecting

    transitions = {KAPPA: _identity(states)}
    for i in range(1, k + 1):
        images = {
            "p0": {"a0": math.sqrt((k + 1 - i) / k), "r0": math.sqrt((i - 1) / k)}
        }
        images.update({f"p{j}": {f"p{j}": 1.0} for j in loops})
        transitions[f"b{i}"] = _letter_matrix(states, images)
    for i in range(1, k + 1):
        images = {"p0": {"a0": 1.0}}
        images.update(
            {f"p{j}": {(f"a{j}" if i + j <= k + 1 else f"r{j}"): 1.0} for j in loops}
        )
        transitions[f"z{i}"] = _letter_matrix(states, images)
    images = {"p0": {"a0": 1.0}}
    images.update({f"p{j}": {f"a{j}": 1.0} for j in loops})
    transitions[END] = _letter_matrix(states, images)

    amplitudes = {"p0": math.sqrt(k / (2 * k - 1))}
    amplitudes.update({f"p{j}": math.sqrt(1 / (2 * k - 1)) for j in loops})
    qfa = QfaSpec(
        states=states,
        alphabet=kcycles_alphabet(k),
        transitions=transitions,
        initial=_unit(states, amplitudes),
        accepting=set(accepting),
        rejecting=set(rejecting),
    )
    return NamedAutomaton(
        name=f"kcycles{k}",
        qfa=qfa,
        oracle=language_oracle("l1", k=k),
        claimed_probability=kcycles_probability(k),
        language=f"L1(k={k})",
        dfa_name="l1",
        k=k,
    )


def build_construction5() -> NamedAutomaton:
    """Four-state QFA for {empty} | a+ b (a|b)*."""
    states = ["q0", "q1", "qacc", "qrej"]
    alpha = C5_ALPHA
    c, s = math.cos(alpha), math.sin(alpha)
    r2 = math.sqrt(2)
    transitions = {
        KAPPA: _identity(states),
        "a": _letter_matrix(
            states,
            {
                "q0": {"q0": c * c, "q1": c * s, "qacc": s / r2, "qrej": s / r2},
                "q1": {"q0": c * s, "q1": s * s, "qacc": -c / r2, "qrej": -c / r2},
            },
        ),
        "b": _letter_matrix(states, {"q0": {"qrej": 1.0}, "q1": {"qacc": 1.0}}),
        END: _letter_matrix(states, {"q0": {"qacc": 1.0}, "q1": {"qrej": 1.0}}),
    }
    qfa = QfaSpec(
        states=states,
        alphabet=("a", "b"),
        transitions=transitions,
        initial=_unit(states, {"q0": math.cos(3 * alpha), "q1": math.sin(3 * alpha)}),
        accepting={"qacc"},
        rejecting={"qrej"},
    )
    return NamedAutomaton(
        name="construction5",
        qfa=qfa,
        oracle=language_oracle("eps-aplus-b"),
        claimed_probability=C5_PROBABILITY,
        language="{e} | a+b(a|b)*",
        dfa_name="eps-aplus-b",
    )


def catalog_automata(ks: Sequence[int] = (2, 3, 4)) -> List[NamedAutomaton]:
    return [build_aplus(), *(build_kcycles(k) for k in ks), build_construction5()]


def _l1_member(word: Word, k: int) -> bool:
    if not word or word[0].startswith("z"):
        return True
    i = int(word[0][1:])
    for letter in word[1:]:
        if letter.startswith("z"):
            return i + int(letter[1:]) <= k + 1
    return True


_REGEX_LANGUAGES = {
    "aplus": "a+",
    "astar-bstar": "a*b*",
    "eps-aplus-b": "|a+b[ab]*",
    "ends-in-a": "[ab]*a",
    "sigma-star": "[ab]*",
}


def language_oracle(name: str, k: Optional[int] = None) -> LanguageOracle:
    """Membership predicate for a catalog language."""
    if name == "l1":
        size = DEFAULT_K if k is None else k

        def member(word) -> bool:
            return _l1_member(as_word(word), size)

        return member
    try:
        pattern = re.compile(_REGEX_LANGUAGES[name])
    except KeyError:
        raise ValueError(f"Unknown language: {name}") from None

    def matches(word) -> bool:
        return pattern.fullmatch("".join(as_word(word))) is not None

    return matches


def _dfa(states, alphabet, initial, accepting, rows) -> DfaSpec:
    return DfaSpec(
        states=states,
        alphabet=alphabet,
        initial=initial,
        accepting=accepting,
        transitions={q: dict(zip(alphabet, row)) for q, row in zip(states, rows)},
    )


def _l1_dfa(k: int) -> DfaSpec:
    if k < 2:
        raise ValueError("k must be at least 2")
    alphabet = kcycles_alphabet(k)
    states = ["q0"] + [f"q{i}" for i in range(1, k + 1)] + ["qrej"]
    transitions = {
        "q0": {**{f"b{i}": f"q{i}" for i in range(1, k + 1)}, **{f"z{i}": "q1" for i in range(1, k + 1)}},
        "qrej": {letter: "qrej" for letter in alphabet},
    }
    for i in range(1, k + 1):
        row = {f"b{j}": f"q{i}" for j in range(1, k + 1)}
        row.update({f"z{j}": ("q1" if i + j <= k + 1 else "qrej") for j in range(1, k + 1)})
        transitions[f"q{i}"] = row
    return DfaSpec(
        states=states,
        alphabet=alphabet,
        initial="q0",
        accepting=set(states) - {"qrej"},
        transitions=transitions,
    )


_DFA_BUILDERS: Dict[str, Callable[[], DfaSpec]] = {
    "aplus": lambda: _dfa(
        ["start", "after_a", "dead"],
        ("a", "b"),
        "start",
        {"after_a"},
        [("after_a", "dead"), ("after_a", "dead"), ("dead", "dead")],
    ),
    "astar-bstar": lambda: _dfa(
        ["in_a", "in_b", "dead"],
        ("a", "b"),
        "in_a",
        {"in_a", "in_b"},
        [("in_a", "in_b"), ("dead", "in_b"), ("dead", "dead")],
    ),
    "eps-aplus-b": lambda: _dfa(
        ["s0", "s1", "done", "dead"],
        ("a", "b"),
        "s0",
        {"s0", "done"},
        [("s1", "dead"), ("s1", "done"), ("done", "done"), ("dead", "dead")],
    ),
    "ends-in-a": lambda: _dfa(
        ["other", "ends_a"],
        ("a", "b"),
        "other",
        {"ends_a"},
        [("ends_a", "other"), ("ends_a", "other")],
    ),
    "sigma-star": lambda: _dfa(["all"], ("a", "b"), "all", {"all"}, [("all", "all")]),
}

DFA_NAMES = tuple(_DFA_BUILDERS) + ("l1",)


def build_language_dfa(name: str, k: Optional[int] = None) -> DfaSpec:
    """Complete DFA of a catalog language."""
    if name == "l1":
        return _l1_dfa(DEFAULT_K if k is None else k)
    try:
        return _DFA_BUILDERS[name]()
    except KeyError:
        raise ValueError(f"Unknown language: {name}") from None
