"""File formats, word parsing and shared command options for qfactl."""

import json
import re
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

import click
import numpy as np

from .dfa import DfaSpec, validate_dfa
from .qfa import QfaSpec, Word, validate

QFA_KIND = "qfa"
DFA_KIND = "dfa"


class FormatError(ValueError):
    """A QFA or DFA file that cannot be read or is malformed."""


def detect_file_kind(document: Dict[str, Any]) -> str:
    """Tell a QFA document from a DFA document by its keys."""
    if not isinstance(document, dict):
        raise FormatError("Expected a JSON object at the top level")
    if "rejecting" in document or isinstance(document.get("initial"), list):
        return QFA_KIND
    if isinstance(document.get("initial"), str):
        return DFA_KIND
    raise FormatError("Cannot tell whether the file holds a QFA or a DFA")


def _require(document: Dict[str, Any], keys: Sequence[str]) -> None:
    missing = [key for key in keys if key not in document]
    if missing:
        raise FormatError(f"Missing keys: {', '.join(missing)}")


def _string_list(document: Dict[str, Any], key: str) -> List[str]:
    value = document[key]
    if not isinstance(value, list) or not all(isinstance(item, str) for item in value):
        raise FormatError(f"{key} must be a list of strings")
    return value


def _complex(pair) -> complex:
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise FormatError(f"Expected a [re, im] pair, got {pair!r}")
    try:
        return complex(float(pair[0]), float(pair[1]))
    except (TypeError, ValueError) as e:
        raise FormatError(f"Bad complex number {pair!r}: {e}") from None


def _pair(z: complex):
    return [float(z.real), float(z.imag)]


def qfa_to_json(spec: QfaSpec) -> Dict[str, Any]:
    """QFA as a JSON-ready document; complex numbers are [re, im] pairs."""
    return {
        "states": list(spec.states),
        "alphabet": list(spec.alphabet),
        "initial": [_pair(z) for z in spec.initial],
        "accepting": [q for q in spec.states if q in spec.accepting],
        "rejecting": [q for q in spec.states if q in spec.rejecting],
        "transitions": {
            letter: [[_pair(z) for z in row] for row in matrix]
            for letter, matrix in spec.transitions.items()
        },
    }


def qfa_from_json(document: Dict[str, Any]) -> QfaSpec:
    _require(document, ("states", "alphabet", "initial", "accepting", "rejecting", "transitions"))
    names = {
        key: _string_list(document, key)
        for key in ("states", "alphabet", "accepting", "rejecting")
    }
    if not isinstance(document["initial"], list):
        raise FormatError("initial must be a list of [re, im] pairs")
    if not isinstance(document["transitions"], dict):
        raise FormatError("transitions must map letters to matrices")
    transitions = {}
    for letter, rows in document["transitions"].items():
        if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
            raise FormatError(f"Matrix for {letter!r} must be a list of rows")
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise FormatError(f"Matrix for {letter!r} has ragged rows")
        transitions[letter] = np.array(
            [[_complex(z) for z in row] for row in rows], dtype=complex
        ).reshape(len(rows), widths.pop() if widths else 0)
    return QfaSpec(
        states=names["states"],
        alphabet=names["alphabet"],
        transitions=transitions,
        initial=np.array([_complex(z) for z in document["initial"]], dtype=complex),
        accepting=names["accepting"],
        rejecting=names["rejecting"],
    )


def dfa_to_json(dfa: DfaSpec) -> Dict[str, Any]:
    return {
        "states": list(dfa.states),
        "alphabet": list(dfa.alphabet),
        "initial": dfa.initial,
        "accepting": [q for q in dfa.states if q in dfa.accepting],
        "transitions": {q: dict(dfa.transitions[q]) for q in dfa.transitions},
    }


def dfa_from_json(document: Dict[str, Any]) -> DfaSpec:
    _require(document, ("states", "alphabet", "initial", "accepting", "transitions"))
    rows = document["transitions"]
    if not isinstance(rows, dict) or not all(isinstance(r, dict) for r in rows.values()):
        raise FormatError("transitions must map states to letter -> state maps")
    names = {key: _string_list(document, key) for key in ("states", "alphabet", "accepting")}
    if not isinstance(document["initial"], str):
        raise FormatError("initial must be a state name")
    for state, row in rows.items():
        bad = [letter for letter, target in row.items() if not isinstance(target, str)]
        if bad:
            raise FormatError(
                f"Transition targets of {state} on {', '.join(bad)} must be state names"
            )
    return DfaSpec(
        states=names["states"],
        alphabet=names["alphabet"],
        initial=document["initial"],
        accepting=names["accepting"],
        transitions=rows,
    )


def read_document(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as e:
        raise FormatError(f"Cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise FormatError(f"{path} is not valid JSON: {e}") from None


def load_automaton(path: Union[str, Path]) -> Tuple[str, Union[QfaSpec, DfaSpec]]:
    """Read a QFA or DFA file; returns ``(kind, spec)``."""
    document = read_document(path)
    kind = detect_file_kind(document)
    if kind == QFA_KIND:
        return kind, qfa_from_json(document)
    return kind, dfa_from_json(document)


def load_qfa(path: Union[str, Path]) -> QfaSpec:
    kind, spec = load_automaton(path)
    if kind != QFA_KIND:
        raise FormatError(f"{path} holds a DFA, expected a QFA")
    return spec


def load_dfa(path: Union[str, Path]) -> DfaSpec:
    kind, spec = load_automaton(path)
    if kind != DFA_KIND:
        raise FormatError(f"{path} holds a QFA, expected a DFA")
    return spec


def save_document(document: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def tokenize(text: str, alphabet: Sequence[str]) -> Word:
    """Split a command-line word into letters of ``alphabet``.

    Text containing whitespace, or any text over an alphabet with
    multi-character letters, is split on whitespace; otherwise each
    character is a letter.
    """
    text = text.strip()
    if not text:
        return ()
    if re.search(r"\s", text) or any(len(letter) > 1 for letter in alphabet):
        letters = tuple(text.split())
    else:
        letters = tuple(text)
    unknown = [letter for letter in letters if letter not in alphabet]
    if unknown:
        raise ValueError(f"Unknown letter {unknown[0]!r}; alphabet is {', '.join(alphabet)}")
    return letters


def format_word(word: Sequence[str]) -> str:
    """Inverse of ``tokenize``; the empty word renders as an empty string."""
    if any(len(letter) > 1 for letter in word):
        return " ".join(word)
    return "".join(word)


def json_option(func):
    """Decorator adding ``--json`` for machine-readable output."""
    return click.option(
        "--json", "as_json", is_flag=True, help="Print results as JSON"
    )(func)


def csv_options(func):
    """Decorator adding the CSV append options to a click command."""
    func = click.option(
        "--id", "run_id", default=None, help="Run ID written to the CSV rows"
    )(func)
    func = click.option(
        "--append-to-csv",
        "csv_file",
        type=click.Path(dir_okay=False),
        default=None,
        help="Append result rows to this CSV file",
    )(func)
    return func


def load_valid_qfa(path: Union[str, Path]) -> QfaSpec:
    """Load a QFA file and reject it unless every structural invariant holds."""
    spec = load_qfa(path)
    violations = validate(spec)
    if violations:
        raise ValueError("Invalid QFA: " + "; ".join(str(v) for v in violations))
    return spec


def load_valid_dfa(path: Union[str, Path]) -> DfaSpec:
    dfa = load_dfa(path)
    violations = validate_dfa(dfa)
    if violations:
        raise ValueError("Invalid DFA: " + "; ".join(str(v) for v in violations))
    return dfa
