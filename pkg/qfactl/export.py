"""Export functionality for qfactl: write the catalog automata as JSON files."""

from pathlib import Path

import click

from .automata import DEFAULT_K, DFA_NAMES, build_language_dfa, catalog_automata
from .loader import dfa_to_json, qfa_to_json, save_document


def dfa_file_name(name: str) -> str:
    return f"{name.replace('-', '_')}_dfa.json"


class Exporter:
    def __init__(self, out_dir, ks=(2, 3, 4)):
        self.out_dir = Path(out_dir)
        self.ks = tuple(ks)

    def export(self):
        """Write every QFA and every language DFA; returns the written paths."""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for named in catalog_automata(self.ks):
            written.append(save_document(qfa_to_json(named.qfa), self.out_dir / f"{named.name}.json"))
        for name in DFA_NAMES:
            if name == "l1":
                for k in self.ks:
                    dfa = build_language_dfa(name, k=k)
                    written.append(save_document(dfa_to_json(dfa), self.out_dir / f"l1_k{k}_dfa.json"))
            else:
                written.append(
                    save_document(dfa_to_json(build_language_dfa(name)), self.out_dir / dfa_file_name(name))
                )
        return written


@click.command()
@click.option(
    "--out", "out_dir", type=click.Path(file_okay=False), default=".", show_default=True,
    help="Directory for the JSON files",
)
@click.option(
    "--k", "ks", type=click.IntRange(min=2), multiple=True, default=(DEFAULT_K, 3, 4),
    show_default=True, help="k values of the k-cycles automata (repeatable)",
)
def export(out_dir, ks):
    """Write the catalog QFAs and language DFAs as JSON files."""
    try:
        written = Exporter(out_dir, ks=ks).export()
    except OSError as e:
        click.echo(f"Error writing files: {e}", err=True)
        raise SystemExit(2)
    for path in written:
        click.echo(f"Wrote {path}")
