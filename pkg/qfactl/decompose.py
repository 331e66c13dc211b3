"""Decompose functionality for qfactl."""

import click
import numpy as np

from .linalg import VALIDATION_TOL
from .loader import format_word, json_option, load_valid_qfa, tokenize
from .qfa import nonhalting_operator
from .report import ReportBase
from .subspace import decompose as decompose_subspaces
from .subspace import EscapeSearchLimit, escape_word

DEFAULT_EPS = 1e-3
DEFAULT_MAX_LEN = 12


def format_amplitude(z: complex) -> str:
    if abs(z.imag) < 1e-12:
        return f"{z.real:+.6f}"
    return f"({z.real:+.6f}{z.imag:+.6f}i)"


def format_vector(states, v) -> str:
    """Ket notation over the named states, skipping zero amplitudes."""
    terms = [
        f"{format_amplitude(complex(z))}|{q}>" for q, z in zip(states, v) if abs(z) > 1e-12
    ]
    return " ".join(terms) if terms else "0"


class Decomposer(ReportBase):
    def __init__(self, qfa_file, eps=DEFAULT_EPS, max_len=DEFAULT_MAX_LEN, tol=VALIDATION_TOL, as_json=False):
        super().__init__(as_json=as_json)
        self.qfa_file = qfa_file
        self.eps = eps
        self.max_len = max_len
        self.tol = tol
        self.spec = None

    def load(self):
        self.spec = self.guarded(load_valid_qfa, self.qfa_file)
        return self.spec

    def parse_words(self, text):
        words = [self.guarded(tokenize, part, self.spec.alphabet) for part in text.split(",")]
        if not words or any(not w for w in words):
            self.fail("--words needs nonempty words separated by commas")
        return words

    def analyze(self, words):
        """Subspace dimensions, bases and one escape word per transient basis vector."""
        pair = self.guarded(decompose_subspaces, self.spec, words, self.tol)
        escapes = []
        for psi in pair.e2.vectors:
            status = "found"
            try:
                found = self.guarded(
                    escape_word, self.spec, words, psi, self.eps, self.max_len, self.tol
                )
            except EscapeSearchLimit:
                found, status = None, "search limit"
            if found is None and status == "found":
                status = "none within max_len"
            norm = None
            if found is not None:
                norm = float(np.linalg.norm(nonhalting_operator(self.spec, found) @ psi))
            escapes.append(
                {
                    "vector": psi,
                    "word": None if found is None else format_word(found),
                    "residual_norm": norm,
                    "status": status,
                }
            )
        return {
            "file": str(self.qfa_file),
            "words": [format_word(w) for w in words],
            "dim_e1": pair.e1.rank,
            "dim_e2": pair.e2.rank,
            "e1": pair.e1.vectors,
            "e2": pair.e2.vectors,
            "escapes": escapes,
            "iterations": pair.iterations,
            "borderline": pair.borderline,
        }

    def show(self, document):
        if self.as_json:
            self.print_json(document)
            return
        states = self.spec.states
        click.echo(f"dim E1 = {document['dim_e1']}, dim E2 = {document['dim_e2']}")
        for name in ("e1", "e2"):
            click.echo(f"{name.upper()} basis:")
            for v in document[name]:
                click.echo(f"  {format_vector(states, v)}")
        if document["escapes"]:
            table = self.create_table("Escape words", ["E2 vector", "Word", "|V'_t psi|"])
            for escape in document["escapes"]:
                word = escape["word"]
                table.add_row(
                    format_vector(states, escape["vector"]),
                    escape["status"] if word is None else (word or "ε"),
                    "-" if escape["residual_norm"] is None else f"{escape['residual_norm']:.3e}",
                )
            self.console.print(table)
        if document["borderline"]:
            click.echo("Warning: some vectors were borderline isometric", err=True)


@click.command()
@click.argument("qfa_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--words", required=True, help="Comma-separated generator words")
@click.option("--eps", type=float, default=DEFAULT_EPS, show_default=True, help="Escape threshold")
@click.option(
    "--max-len", type=click.IntRange(min=1), default=DEFAULT_MAX_LEN, show_default=True,
    help="Longest escape word searched",
)
@json_option
def decompose(qfa_file, words, eps, max_len, as_json):
    """Split the non-halting space of a QFA into its E1 / E2 parts."""
    decomposer = Decomposer(qfa_file, eps=eps, max_len=max_len, as_json=as_json)
    decomposer.load()
    decomposer.show(decomposer.analyze(decomposer.parse_words(words)))
