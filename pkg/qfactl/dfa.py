"""Deterministic finite automata: validation, minimization, state languages."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .qfa import Violation, Word, WordLike, as_word

EQUAL = "equal"
SUBSET = "subset"
SUPERSET = "superset"
INCOMPARABLE = "incomparable"


@dataclass(frozen=True, eq=False)
class DfaSpec:
    """A complete DFA; ``transitions[state][letter]`` is the successor."""

    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    initial: str
    accepting: frozenset
    transitions: Mapping[str, Mapping[str, str]]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        table = {
            state: MappingProxyType(dict(row)) for state, row in self.transitions.items()
        }
        object.__setattr__(self, "transitions", MappingProxyType(table))

    def delta(self, state: str, word: WordLike) -> str:
        for letter in as_word(word):
            state = self.transitions[state][letter]
        return state

    def accepts(self, word: WordLike, start: Optional[str] = None) -> bool:
        return self.delta(self.initial if start is None else start, word) in self.accepting

    def successors(self, state: str) -> List[str]:
        return [self.transitions[state][letter] for letter in self.alphabet]


def validate_dfa(dfa: DfaSpec) -> List[Violation]:
    """Structural problems of ``dfa``; empty when it is a complete DFA."""
    violations: List[Violation] = []
    states = set(dfa.states)
    if len(states) != len(dfa.states):
        violations.append(Violation("distinct states", "states", "duplicate state names"))
    if len(set(dfa.alphabet)) != len(dfa.alphabet):
        violations.append(Violation("distinct letters", "alphabet", "duplicate letters"))
    if dfa.initial not in states:
        violations.append(Violation("initial state", dfa.initial, "not a state"))
    for state in sorted(dfa.accepting - states):
        violations.append(Violation("accepting subset", state, "not a state"))
    for state in dfa.states:
        row = dfa.transitions.get(state)
        if row is None:
            violations.append(Violation("total transitions", state, "no transition row"))
            continue
        for letter in dfa.alphabet:
            target = row.get(letter)
            if target is None:
                violations.append(
                    Violation("total transitions", f"{state}/{letter}", "missing successor")
                )
            elif target not in states:
                violations.append(
                    Violation("total transitions", f"{state}/{letter}", f"unknown target {target}")
                )
    for state in dfa.transitions:
        if state not in states:
            violations.append(Violation("total transitions", state, "row for unknown state"))
    return violations


def _require_valid(dfa: DfaSpec) -> None:
    violations = validate_dfa(dfa)
    if violations:
        raise ValueError("Invalid DFA: " + "; ".join(str(v) for v in violations))


def reachable_states(dfa: DfaSpec, start: Optional[str] = None) -> List[str]:
    """States reachable from ``start`` in BFS order (alphabet order per state)."""
    start = dfa.initial if start is None else start
    order = [start]
    seen = {start}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for target in dfa.successors(state):
            if target not in seen:
                seen.add(target)
                order.append(target)
                queue.append(target)
    return order


def minimize(dfa: DfaSpec) -> DfaSpec:
    """Minimal equivalent DFA.

    Unreachable states are dropped and equivalent states merged by Moore
    partition refinement. Each class is named after its first member in BFS
    order from the initial state.
    """
    _require_valid(dfa)
    order = reachable_states(dfa)
    block = {q: int(q in dfa.accepting) for q in order}
    while True:
        signatures: Dict[Tuple, int] = {}
        refined = {}
        for q in order:
            signature = (block[q],) + tuple(block[t] for t in dfa.successors(q))
            refined[q] = signatures.setdefault(signature, len(signatures))
        if len(signatures) == len(set(block.values())):
            break
        block = refined

    representative: Dict[int, str] = {}
    for q in order:
        representative.setdefault(block[q], q)
    names = list(representative.values())
    transitions = {
        name: {
            letter: representative[block[dfa.transitions[name][letter]]]
            for letter in dfa.alphabet
        }
        for name in names
    }
    return DfaSpec(
        states=tuple(names),
        alphabet=dfa.alphabet,
        initial=representative[block[dfa.initial]],
        accepting=frozenset(name for name in names if name in dfa.accepting),
        transitions=transitions,
    )


def product_search(
    dfa: DfaSpec, start: Tuple[str, ...], targets: Iterable[Tuple[str, ...]]
) -> Dict[Tuple[str, ...], Word]:
    """Shortlex-least word from ``start`` to each reachable target tuple.

    Every component of the tuple reads the same letters.
    """
    wanted = set(targets)
    found: Dict[Tuple[str, ...], Word] = {}
    parents: Dict[Tuple[str, ...], Tuple[Optional[Tuple[str, ...]], Optional[str]]] = {
        start: (None, None)
    }
    queue = deque([start])
    while queue and len(found) < len(wanted):
        node = queue.popleft()
        if node in wanted:
            found[node] = _path(parents, node)
        for letter in dfa.alphabet:
            nxt = tuple(dfa.transitions[q][letter] for q in node)
            if nxt not in parents:
                parents[nxt] = (node, letter)
                queue.append(nxt)
    return found


def _path(parents, node) -> Word:
    letters = []
    while True:
        parent, letter = parents[node]
        if parent is None:
            return tuple(reversed(letters))
        letters.append(letter)
        node = parent


def shortest_word(
    dfa: DfaSpec, start: Tuple[str, ...], target: Tuple[str, ...]
) -> Optional[Word]:
    return product_search(dfa, start, [target]).get(target)


def is_all_accepting(dfa: DfaSpec, state: str) -> bool:
    """Every state reachable from ``state`` (itself included) accepts."""
    return all(q in dfa.accepting for q in reachable_states(dfa, state))


def is_all_rejecting(dfa: DfaSpec, state: str) -> bool:
    return not any(q in dfa.accepting for q in reachable_states(dfa, state))


@dataclass(frozen=True)
class LanguageRelation:
    """How L(qa) compares with L(qb), with shortest separating words."""

    kind: str
    only_a: Optional[Word] = None
    only_b: Optional[Word] = None


def state_language_relation(dfa: DfaSpec, qa: str, qb: str) -> LanguageRelation:
    """Compare the languages accepted from ``qa`` and from ``qb``."""
    for q in (qa, qb):
        if q not in dfa.states:
            raise ValueError(f"Unknown state: {q}")
    only_a: Optional[Word] = None
    only_b: Optional[Word] = None
    parents = {(qa, qb): (None, None)}
    queue = deque([(qa, qb)])
    while queue and (only_a is None or only_b is None):
        node = queue.popleft()
        a_accepts = node[0] in dfa.accepting
        b_accepts = node[1] in dfa.accepting
        if a_accepts and not b_accepts and only_a is None:
            only_a = _path(parents, node)
        if b_accepts and not a_accepts and only_b is None:
            only_b = _path(parents, node)
        for letter in dfa.alphabet:
            nxt = (dfa.transitions[node[0]][letter], dfa.transitions[node[1]][letter])
            if nxt not in parents:
                parents[nxt] = (node, letter)
                queue.append(nxt)

    if only_a is None and only_b is None:
        kind = EQUAL
    elif only_a is None:
        kind = SUBSET
    elif only_b is None:
        kind = SUPERSET
    else:
        kind = INCOMPARABLE
    return LanguageRelation(kind=kind, only_a=only_a, only_b=only_b)
