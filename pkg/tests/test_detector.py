"""Tests for the detector module."""

import itertools

import numpy as np
import pytest

from qfactl.automata import APLUS_PROBABILITY, C5_PROBABILITY, build_language_dfa
from qfactl.detector import (
    INCOMPARABLE_PAIR,
    ONE_CYCLE,
    PARALLEL_CYCLES,
    RETURN_CYCLE,
    TWO_CYCLES_BOUND,
    TWO_CYCLES_PRINTED,
    TWO_CYCLES_ROW,
    ConstructionWitness,
    analyze,
    detect_one_cycle,
    detect_parallel_cycles,
    detect_return_cycle,
    implied_bound,
    replay,
)
from qfactl.dfa import DfaSpec, minimize

LETTERS = ("a", "b")


def make_dfa(n, targets, accepting):
    """DFA on states s0..s{n-1} over {a, b}; ``targets`` lists the a/b successors row by row."""
    states = [f"s{i}" for i in range(n)]
    transitions = {
        states[i]: {letter: states[targets[2 * i + j]] for j, letter in enumerate(LETTERS)}
        for i in range(n)
    }
    return DfaSpec(
        states=states,
        alphabet=LETTERS,
        initial="s0",
        accepting={states[i] for i in range(n) if accepting[i]},
        transitions=transitions,
    )


def all_dfas(n):
    for targets in itertools.product(range(n), repeat=2 * n):
        for accepting in itertools.product((False, True), repeat=n):
            yield make_dfa(n, targets, accepting)


def sampled_dfas(n, count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        targets = rng.integers(0, n, size=2 * n).tolist()
        accepting = rng.integers(0, 2, size=n).astype(bool).tolist()
        yield make_dfa(n, targets, accepting)


def transformation_monoid(dfa):
    """Every map q -> delta(q, w), as tuples indexed like ``dfa.states``."""
    index = {q: i for i, q in enumerate(dfa.states)}
    generators = [
        tuple(index[dfa.delta(q, letter)] for q in dfa.states) for letter in dfa.alphabet
    ]
    identity = tuple(range(len(dfa.states)))
    seen = {identity}
    frontier = [identity]
    while frontier:
        f = frontier.pop()
        for g in generators:
            h = tuple(g[i] for i in f)
            if h not in seen:
                seen.add(h)
                frontier.append(h)
    return seen


def brute_force_cycles(dfa):
    """One-cycle and return-cycle pairs (q1, q2), read off the transformation monoid."""
    monoid = transformation_monoid(dfa)
    accepting = {i for i, q in enumerate(dfa.states) if q in dfa.accepting}
    n = len(dfa.states)
    reach = {i: {f[i] for f in monoid} for i in range(n)}
    mixed = {i for i in range(n) if reach[i] & accepting and reach[i] - accepting}
    one, ret = set(), set()
    for f in monoid:
        for q1, q2 in itertools.permutations(range(n), 2):
            if f[q1] != q2 or f[q2] != q2:
                continue
            pair = (dfa.states[q1], dfa.states[q2])
            if q2 in mixed:
                one.add(pair)
            if q1 in reach[q2]:
                ret.add(pair)
    return one, ret


class TestCatalog:
    """Constructions found in the catalog languages."""

    def test_aplus(self):
        report = analyze(build_language_dfa("aplus"))
        assert [w.kind for w in report.witnesses] == [ONE_CYCLE]
        assert report.witnesses[0].states == ("start", "after_a")
        assert report.witnesses[0].words == (("a",),)
        assert report.bound == pytest.approx(APLUS_PROBABILITY)
        assert not report.rfa_recognizable
        assert report.qfa_recognizable

    def test_astar_bstar(self):
        report = analyze(build_language_dfa("astar-bstar"))
        assert {w.kind for w in report.witnesses} == {ONE_CYCLE, TWO_CYCLES_ROW}
        row = next(w for w in report.witnesses if w.kind == TWO_CYCLES_ROW)
        assert row.states == ("in_a", "in_b", "dead")
        assert row.words == (("a",), ("b",))
        assert report.bound == TWO_CYCLES_BOUND
        assert any("two cycles in a row" in note for note in report.notes)
        assert report.qfa_recognizable

    def test_l1(self):
        report = analyze(build_language_dfa("l1", k=2))
        assert {w.kind for w in report.witnesses} == {ONE_CYCLE, PARALLEL_CYCLES}
        parallel = next(w for w in report.witnesses if w.kind == PARALLEL_CYCLES)
        assert parallel.states == ("q0", "q1", "q2")
        assert parallel.k == 2
        assert report.bound == pytest.approx(2 / 3)

    def test_eps_aplus_b(self):
        report = analyze(build_language_dfa("eps-aplus-b"))
        assert {w.kind for w in report.witnesses} == {ONE_CYCLE, INCOMPARABLE_PAIR}
        pair = next(w for w in report.witnesses if w.kind == INCOMPARABLE_PAIR)
        assert pair.states == ("s0", "s1")
        assert pair.words == (("a",), (), ("b",))
        assert report.bound == pytest.approx(C5_PROBABILITY)

    def test_ends_in_a(self):
        report = analyze(build_language_dfa("ends-in-a"))
        assert RETURN_CYCLE in {w.kind for w in report.witnesses}
        assert not report.rfa_recognizable
        assert not report.qfa_recognizable

    def test_sigma_star(self):
        report = analyze(build_language_dfa("sigma-star"))
        assert report.witnesses == ()
        assert report.bound == 1.0
        assert report.rfa_recognizable
        assert report.qfa_recognizable

    @pytest.mark.parametrize("name", ["aplus", "astar-bstar", "eps-aplus-b", "ends-in-a", "l1"])
    def test_every_witness_replays(self, name):
        report = analyze(build_language_dfa(name))
        assert report.witnesses
        assert all(replay(report.minimized, w) for w in report.witnesses)


class TestBounds:
    """Test cases for implied_bound and the two-cycles constant."""

    def test_no_witness_gives_one(self):
        assert implied_bound([]) == 1.0

    def test_return_cycle_sets_no_bound(self):
        witness = ConstructionWitness(RETURN_CYCLE, ("p", "q"), (("a",), ("b",)))
        assert implied_bound([witness]) == 1.0

    def test_smallest_bound_wins(self):
        witnesses = [
            ConstructionWitness(ONE_CYCLE, ("p", "q"), (("a",),)),
            ConstructionWitness(PARALLEL_CYCLES, ("p", "q", "r"), (("a",), ("b",)), k=2),
        ]
        assert implied_bound(witnesses) == pytest.approx(2 / 3)

    @pytest.mark.parametrize("name", ["aplus", "astar-bstar", "eps-aplus-b", "ends-in-a", "l1"])
    def test_more_witnesses_never_raise_the_bound(self, name):
        report = analyze(build_language_dfa(name))
        witnesses = report.witnesses
        bounds = [implied_bound(witnesses[:i]) for i in range(len(witnesses) + 1)]
        assert all(later <= earlier for earlier, later in zip(bounds, bounds[1:]))
        assert bounds[-1] == report.bound

    def test_two_cycles_constant_near_printed_value(self):
        assert abs(TWO_CYCLES_BOUND - TWO_CYCLES_PRINTED) <= 5e-4
        assert APLUS_PROBABILITY > TWO_CYCLES_BOUND > 2 / 3

    def test_parallel_k_range(self):
        dfa = build_language_dfa("l1", k=2)
        with pytest.raises(ValueError):
            detect_parallel_cycles(dfa, 1)
        with pytest.raises(ValueError):
            detect_parallel_cycles(dfa, 4, k_max=3)

    def test_unknown_kind_cannot_replay(self):
        witness = ConstructionWitness("spiral", ("p",), ())
        with pytest.raises(ValueError):
            replay(build_language_dfa("aplus"), witness)


class TestBruteForce:
    """Detector results against the transformation monoid on small DFAs."""

    @staticmethod
    def check_cycles(dfa):
        minimal = minimize(dfa)
        one, ret = brute_force_cycles(minimal)
        assert {w.states for w in detect_one_cycle(minimal)} == one
        assert {w.states for w in detect_return_cycle(minimal)} == ret

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_cycles_exhaustive(self, n):
        for dfa in all_dfas(n):
            self.check_cycles(dfa)

    def test_cycles_sampled_minimal_four_states(self):
        """Seeded sample of minimal four-state DFAs.

        There are tens of thousands of minimal four-state DFAs over two
        letters; checking every one takes minutes, so only a sample runs here.
        """
        checked = 0
        for dfa in sampled_dfas(4, 3000, seed=11):
            if len(minimize(dfa).states) == 4:
                self.check_cycles(dfa)
                checked += 1
        assert checked >= 100

    @pytest.mark.parametrize("n", [1, 2])
    def test_analyze_witnesses_replay_exhaustive(self, n):
        for dfa in all_dfas(n):
            report = analyze(dfa)
            assert all(replay(report.minimized, w) for w in report.witnesses)
            assert report.qfa_recognizable == (not brute_force_cycles(report.minimized)[1])

    def test_analyze_witnesses_replay_sampled(self):
        for dfa in sampled_dfas(3, 300, seed=5):
            report = analyze(dfa)
            assert all(replay(report.minimized, w) for w in report.witnesses)
            assert report.rfa_recognizable == (not brute_force_cycles(report.minimized)[0])
