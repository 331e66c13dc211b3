"""Ergodic / transient split of the non-halting space under generator words."""

from __future__ import annotations

import heapq
import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .linalg import (
    BORDERLINE_TOL,
    VALIDATION_TOL,
    Basis,
    as_vector,
    nullspace,
    orthogonal_complement,
    singular_values,
)
from .qfa import QfaSpec, Word, WordLike, as_word, nonhalting_operator

logger = logging.getLogger(__name__)

MEMBERSHIP_TOL = VALIDATION_TOL
ESCAPE_BEAM_WIDTH = 256
ESCAPE_NODE_LIMIT = 200_000


@dataclass(frozen=True)
class SubspacePair:
    """E1 (isometric, invariant) and E2 (its complement) inside E_non.

    Both bases are expressed in the full state space of the automaton.
    """

    e1: Basis
    e2: Basis
    ambient_dim: int
    iterations: int = 0
    borderline: bool = False


def _generator_words(spec: QfaSpec, words: Sequence[WordLike]) -> List[Word]:
    if not words:
        raise ValueError("At least one generator word is required")
    result = []
    for word in words:
        letters = as_word(word)
        if not letters:
            raise ValueError("Generator words must be nonempty")
        for letter in letters:
            if letter not in spec.alphabet:
                raise ValueError(f"Letter {letter!r} is not in the input alphabet")
        result.append(letters)
    return result


def _nonhalting_embedding(spec: QfaSpec) -> np.ndarray:
    """Columns are the standard basis vectors of the non-halting states."""
    return np.eye(spec.size, dtype=complex)[:, spec.nonhalting_mask]


def decompose(
    spec: QfaSpec,
    words: Sequence[WordLike],
    tol: float = VALIDATION_TOL,
    within: Optional[Basis] = None,
) -> SubspacePair:
    """Largest subspace of E_non mapped isometrically into itself by every word.

    Starting from S = E_non (or from the span of ``within``, which must lie in
    E_non), repeatedly keep the vectors v of S with ``(I - A^H A) v = 0`` and
    ``A v in S`` for every restricted operator A, until the dimension stops
    changing. E2 is the complement of E1 inside the starting space.
    """
    if tol <= 0:
        raise ValueError("Tolerance must be positive")
    generators = _generator_words(spec, words)
    embed = _nonhalting_embedding(spec)
    m = embed.shape[1]
    restricted = [
        embed.conj().T @ nonhalting_operator(spec, word) @ embed for word in generators
    ]

    if within is None:
        start = np.eye(m, dtype=complex)
    else:
        if within.dim != spec.size:
            raise ValueError(f"Starting basis lives in dimension {within.dim}, expected {spec.size}")
        start = embed.conj().T @ within.matrix
        if np.linalg.norm(embed @ start - within.matrix) > MEMBERSHIP_TOL * max(1, within.rank):
            raise ValueError("Starting basis must lie inside the non-halting space")
    current = start
    borderline = False
    iterations = 0
    while current.shape[1] > 0:
        iterations += 1
        outside = np.eye(m) - current @ current.conj().T
        blocks = []
        for a in restricted:
            blocks.append((np.eye(m) - a.conj().T @ a) @ current)
            blocks.append(outside @ a @ current)
        stacked = np.vstack(blocks)
        s = singular_values(stacked)
        if np.any((s > tol) & (s <= BORDERLINE_TOL)):
            borderline = True
            logger.warning(
                "Isometry defect between %g and %g; vector classified as transient",
                tol,
                BORDERLINE_TOL,
            )
        kept = nullspace(stacked, tol).matrix
        logger.debug("decompose iteration %d: dim %d -> %d", iterations, current.shape[1], kept.shape[1])
        if kept.shape[1] == current.shape[1]:
            break
        current = current @ kept
        # Re-orthonormalize to keep drift out of later iterations.
        if current.shape[1]:
            current, _ = np.linalg.qr(current)

    # E1 in the coordinates of the starting space, then its complement there.
    inside = Basis(start.conj().T @ current) if current.shape[1] else Basis.empty(start.shape[1])
    e2_local = start @ orthogonal_complement(inside).matrix
    return SubspacePair(
        e1=Basis(embed @ current) if current.shape[1] else Basis.empty(spec.size),
        e2=Basis(embed @ e2_local) if e2_local.shape[1] else Basis.empty(spec.size),
        ambient_dim=start.shape[1],
        iterations=iterations,
        borderline=borderline,
    )


class EscapeSearchLimit(RuntimeError):
    """The pruned escape search ran out of nodes before settling the question."""


def _layered_search(generators, operators, psi, eps, max_len, beam_width):
    """Breadth-first by total length; oversized layers keep their smallest vectors.

    Returns ``(word, pruned)``; ``word`` is None when nothing escaped.
    """
    layers = {0: [((), psi)]}
    pruned = False
    for length in range(max_len + 1):
        layer = layers.pop(length, [])
        unique = {}
        for word, vector in layer:
            unique.setdefault(np.round(vector, 12).tobytes(), (word, vector))
        layer = list(unique.values())
        for word, vector in layer:
            if np.linalg.norm(vector) < eps:
                return word, pruned
        if len(layer) > beam_width:
            pruned = True
            layer = sorted(layer, key=lambda item: np.linalg.norm(item[1]))[:beam_width]
        for word, vector in layer:
            for generator, operator in zip(generators, operators):
                new_length = length + len(generator)
                if new_length <= max_len:
                    layers.setdefault(new_length, []).append((word + generator, operator @ vector))
    return None, pruned


def _norm_key(vector) -> float:
    # Rounded so that equal vectors tie and the shorter word pops first.
    return round(float(np.linalg.norm(vector)), 12)


def _best_first_search(generators, operators, psi, eps, max_len, node_limit):
    """Always expand the smallest vector found so far.

    Vector norms never grow along a word, so this follows the greedy descent
    first and backtracks only once that descent hits ``max_len``.
    """
    counter = itertools.count()
    queue = [(_norm_key(psi), 0, next(counter), (), psi)]
    seen = set()
    while queue:
        norm, length, _, word, vector = heapq.heappop(queue)
        if norm < eps:
            return word
        key = np.round(vector, 12).tobytes()
        if key in seen:
            continue
        seen.add(key)
        if len(seen) > node_limit:
            raise EscapeSearchLimit(
                f"No escape word found within {node_limit} search nodes (max_len {max_len})"
            )
        for generator, operator in zip(generators, operators):
            new_length = length + len(generator)
            if new_length <= max_len:
                image = operator @ vector
                heapq.heappush(
                    queue, (_norm_key(image), new_length, next(counter), word + generator, image)
                )
    return None


def escape_word(
    spec: QfaSpec,
    words: Sequence[WordLike],
    psi,
    eps: float,
    max_len: int,
    tol: float = VALIDATION_TOL,
    beam_width: int = ESCAPE_BEAM_WIDTH,
    node_limit: int = ESCAPE_NODE_LIMIT,
) -> Optional[Word]:
    """A concatenation t of generator words, at most ``max_len`` letters, with ``|V'_t psi| < eps``.

    Words are tried by total length in letters, ties broken by the order of
    ``words``, so the result is the shortest one as long as no length layer
    grows past ``beam_width`` vectors. Past that, each layer keeps its
    ``beam_width`` smallest vectors, and if that finds nothing a best-first
    search by norm takes over.

    Returns None when no word of at most ``max_len`` letters escapes. Raises
    EscapeSearchLimit when the best-first search visits ``node_limit`` vectors
    without deciding.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if beam_width < 1 or node_limit < 1:
        raise ValueError("beam_width and node_limit must be positive")
    generators = _generator_words(spec, words)
    psi = as_vector(psi)
    pair = decompose(spec, generators, tol)
    scale = max(1.0, float(np.linalg.norm(psi)))
    if pair.e2.distance(psi) > MEMBERSHIP_TOL * scale:
        raise ValueError("psi is not inside the transient subspace E2")

    operators = [nonhalting_operator(spec, word) for word in generators]
    found, pruned = _layered_search(generators, operators, psi, eps, max_len, beam_width)
    if found is not None or not pruned:
        return found
    logger.debug("escape_word: beam of %d found nothing, switching to best-first", beam_width)
    return _best_first_search(generators, operators, psi, eps, max_len, node_limit)


def recurrence_exponent(
    spec: QfaSpec,
    word: WordLike,
    psi,
    eps: float,
    max_iter: int,
    tol: float = VALIDATION_TOL,
) -> Optional[int]:
    """Smallest i <= max_iter with ``|V'_{x^i} psi - psi| <= eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    (generator,) = _generator_words(spec, [word])
    psi = as_vector(psi)
    pair = decompose(spec, [generator], tol)
    scale = max(1.0, float(np.linalg.norm(psi)))
    if pair.e1.distance(psi) > MEMBERSHIP_TOL * scale:
        raise ValueError("psi is not inside the isometric subspace E1")

    operator = nonhalting_operator(spec, generator)
    vector = psi
    for i in range(1, max_iter + 1):
        vector = operator @ vector
        if np.linalg.norm(vector - psi) <= eps:
            return i
    return None
