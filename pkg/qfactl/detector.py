"""Detection of non-reversible constructions in minimal DFAs.

Each construction found in the minimal automaton of a language caps the
probability with which any measure-many QFA can recognize it.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple

from .automata import APLUS_PROBABILITY, C5_PROBABILITY, kcycles_probability
from .dfa import (
    INCOMPARABLE,
    DfaSpec,
    is_all_accepting,
    is_all_rejecting,
    minimize,
    product_search,
    shortest_word,
    state_language_relation,
)
from .qfa import Word

logger = logging.getLogger(__name__)

ONE_CYCLE = "one_cycle"
RETURN_CYCLE = "return_cycle"
TWO_CYCLES_ROW = "two_cycles_row"
PARALLEL_CYCLES = "parallel_cycles"
INCOMPARABLE_PAIR = "incomparable_pair"

K_MAX = 3
# Optimum of the two-cycles optimization problem, recomputed numerically by
# ``optimizer.solve_problem2``; no closed form is known.
TWO_CYCLES_BOUND = 0.6890702
TWO_CYCLES_PROVENANCE = "Problem-2 numeric optimum"
# Value printed for the same construction in the literature.
TWO_CYCLES_PRINTED = 0.6894


@dataclass(frozen=True)
class ConstructionWitness:
    """States and words exhibiting one construction.

    ``words`` holds ``(x,)`` for cycles, ``(x, y)`` for return cycles and
    two cycles in a row, ``(x_1, ..., x_k)`` for parallel cycles and
    ``(x, z1, z2)`` for incomparable pairs.
    """

    kind: str
    states: Tuple[str, ...]
    words: Tuple[Word, ...]
    k: Optional[int] = None

    @property
    def label(self) -> str:
        return f"{self.kind}({self.k})" if self.k else self.kind


@dataclass(frozen=True)
class ConstructionReport:
    witnesses: Tuple[ConstructionWitness, ...]
    bound: float
    rfa_recognizable: bool
    qfa_recognizable: bool
    minimized: DfaSpec = field(compare=False, repr=False)
    notes: Tuple[str, ...] = ()


def _is_cycle_target(dfa: DfaSpec, q2: str) -> bool:
    return not is_all_accepting(dfa, q2) and not is_all_rejecting(dfa, q2)


def _one_cycles(dfa: DfaSpec) -> Iterable[Tuple[str, str, Word]]:
    for q2 in dfa.states:
        if not _is_cycle_target(dfa, q2):
            continue
        for q1 in dfa.states:
            if q1 == q2:
                continue
            x = shortest_word(dfa, (q1, q2), (q2, q2))
            if x is not None:
                yield q1, q2, x


def _ordered(witnesses: Iterable[ConstructionWitness], dfa: DfaSpec) -> List[ConstructionWitness]:
    rank = {q: i for i, q in enumerate(dfa.states)}
    return sorted(witnesses, key=lambda w: tuple(rank[q] for q in w.states))


def detect_one_cycle(dfa: DfaSpec) -> List[ConstructionWitness]:
    """Pairs q1 != q2 with a word x taking q1 to q2 and fixing q2."""
    return _ordered(
        (ConstructionWitness(ONE_CYCLE, (q1, q2), (x,)) for q1, q2, x in _one_cycles(dfa)),
        dfa,
    )


def detect_return_cycle(dfa: DfaSpec) -> List[ConstructionWitness]:
    """One cycles from which some word y leads back from q2 to q1."""
    found = []
    for q1, q2, x in _one_cycles(dfa):
        y = shortest_word(dfa, (q2,), (q1,))
        if y is not None:
            found.append(ConstructionWitness(RETURN_CYCLE, (q1, q2), (x, y)))
    return _ordered(found, dfa)


def _two_cycles_candidates(dfa: DfaSpec):
    for q1, q2, q3 in itertools.product(dfa.states, repeat=3):
        if q2 == q3:
            continue
        x = shortest_word(dfa, (q1, q2, q3), (q1, q3, q3))
        if x is None:
            continue
        y = shortest_word(dfa, (q1, q2), (q2, q2))
        if y is None:
            continue
        yield q1, q2, q3, x, y


def detect_two_cycles_row(dfa: DfaSpec) -> List[ConstructionWitness]:
    """Triples with x fixing q1 and q3, x: q2 -> q3, y: q1 -> q2 and y fixing q2.

    When y also takes q3 back to q2 the triple is reported as a return
    cycle on (q2, q3) instead.
    """
    found = []
    for q1, q2, q3, x, y in _two_cycles_candidates(dfa):
        if dfa.delta(q3, y) == q2:
            found.append(ConstructionWitness(RETURN_CYCLE, (q2, q3), (x, y)))
        else:
            found.append(ConstructionWitness(TWO_CYCLES_ROW, (q1, q2, q3), (x, y)))
    return _ordered(found, dfa)


def detect_parallel_cycles(
    dfa: DfaSpec, k: int, k_max: int = K_MAX
) -> List[ConstructionWitness]:
    """States q0, q1..qk and words x_i with x_i: q0 -> q_i and every x_j fixing every q_i."""
    if k < 2 or k > k_max:
        raise ValueError(f"k must be between 2 and {k_max}")
    candidates = [q for q in dfa.states if not is_all_rejecting(dfa, q)]
    found = []
    for cycle_states in itertools.combinations(candidates, k):
        for q0 in dfa.states:
            if q0 in cycle_states:
                continue
            start = (q0,) + cycle_states
            targets = [(qi,) + cycle_states for qi in cycle_states]
            words = product_search(dfa, start, targets)
            if len(words) == k:
                found.append(
                    ConstructionWitness(
                        PARALLEL_CYCLES, start, tuple(words[t] for t in targets), k=k
                    )
                )
    logger.debug("parallel cycles k=%d: %d witnesses", k, len(found))
    return _ordered(found, dfa)


def detect_incomparable_pair(dfa: DfaSpec) -> List[ConstructionWitness]:
    """One cycles whose two states accept incomparable languages."""
    found = []
    for q1, q2, x in _one_cycles(dfa):
        relation = state_language_relation(dfa, q1, q2)
        if relation.kind == INCOMPARABLE:
            found.append(
                ConstructionWitness(
                    INCOMPARABLE_PAIR, (q1, q2), (x, relation.only_a, relation.only_b)
                )
            )
    return _ordered(found, dfa)


def replay(dfa: DfaSpec, witness: ConstructionWitness) -> bool:
    """Check the defining equations of ``witness`` by running its words."""
    d = dfa.delta
    if witness.kind == ONE_CYCLE:
        (q1, q2), (x,) = witness.states, witness.words
        return q1 != q2 and d(q1, x) == q2 and d(q2, x) == q2 and _is_cycle_target(dfa, q2)
    if witness.kind == RETURN_CYCLE:
        (q1, q2), (x, y) = witness.states, witness.words
        return q1 != q2 and d(q1, x) == q2 and d(q2, x) == q2 and d(q2, y) == q1
    if witness.kind == TWO_CYCLES_ROW:
        (q1, q2, q3), (x, y) = witness.states, witness.words
        return (
            q2 != q3
            and d(q1, x) == q1
            and d(q1, y) == q2
            and d(q2, y) == q2
            and d(q2, x) == q3
            and d(q3, x) == q3
        )
    if witness.kind == PARALLEL_CYCLES:
        q0, cycle_states = witness.states[0], witness.states[1:]
        return (
            len(set(witness.states)) == len(witness.states)
            and all(d(q0, x) == qi for x, qi in zip(witness.words, cycle_states))
            and all(d(qi, x) == qi for x in witness.words for qi in cycle_states)
            and not any(is_all_rejecting(dfa, qi) for qi in cycle_states)
        )
    if witness.kind == INCOMPARABLE_PAIR:
        (q1, q2), (x, z1, z2) = witness.states, witness.words
        acc = dfa.accepting
        return (
            d(q1, x) == q2
            and d(q2, x) == q2
            and d(q1, z1) in acc
            and d(q1, z2) not in acc
            and d(q2, z1) not in acc
            and d(q2, z2) in acc
        )
    raise ValueError(f"Unknown construction kind: {witness.kind}")


def witness_bound(witness: ConstructionWitness) -> Optional[float]:
    """Probability cap implied by one witness; None when it only sets flags."""
    if witness.kind == ONE_CYCLE:
        return APLUS_PROBABILITY
    if witness.kind == TWO_CYCLES_ROW:
        return TWO_CYCLES_BOUND
    if witness.kind == PARALLEL_CYCLES:
        return kcycles_probability(witness.k)
    if witness.kind == INCOMPARABLE_PAIR:
        return C5_PROBABILITY
    return None


def implied_bound(witnesses: Iterable[ConstructionWitness]) -> float:
    """Smallest cap over ``witnesses``; 1 when none applies."""
    bounds = [b for b in (witness_bound(w) for w in witnesses) if b is not None]
    return min(bounds, default=1.0)


def analyze(dfa: DfaSpec, k_max: int = K_MAX) -> ConstructionReport:
    """Minimize ``dfa`` and run every detector on the result."""
    minimal = minimize(dfa)
    witnesses: List[ConstructionWitness] = []
    witnesses += detect_one_cycle(minimal)
    witnesses += detect_return_cycle(minimal)
    notes = []
    for witness in detect_two_cycles_row(minimal):
        if witness.kind == RETURN_CYCLE:
            notes.append(
                "two cycles in a row with q2 = q4 on "
                f"{', '.join(witness.states)} reported as a return cycle"
            )
        witnesses.append(witness)
    for k in range(2, k_max + 1):
        witnesses += detect_parallel_cycles(minimal, k, k_max)
    witnesses += detect_incomparable_pair(minimal)

    unique = list(dict.fromkeys(witnesses))
    kinds = {w.kind for w in unique}
    if TWO_CYCLES_ROW in kinds:
        notes.append(f"two cycles in a row bound is the {TWO_CYCLES_PROVENANCE}")
    logger.debug("analyze: %d states, %d witnesses", len(minimal.states), len(unique))
    return ConstructionReport(
        witnesses=tuple(unique),
        bound=implied_bound(unique),
        rfa_recognizable=ONE_CYCLE not in kinds,
        qfa_recognizable=RETURN_CYCLE not in kinds,
        minimized=minimal,
        notes=tuple(dict.fromkeys(notes)),
    )
