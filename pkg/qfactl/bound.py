"""Bound functionality for qfactl."""

import click

from .detector import K_MAX, analyze
from .loader import format_word, json_option, load_valid_dfa
from .report import ReportBase


def witness_to_dict(witness):
    return {
        "kind": witness.kind,
        "k": witness.k,
        "states": list(witness.states),
        "words": [format_word(w) for w in witness.words],
    }


class BoundAnalyzer(ReportBase):
    def __init__(self, dfa_file, k_max=K_MAX, as_json=False):
        super().__init__(as_json=as_json)
        self.dfa_file = dfa_file
        self.k_max = k_max

    def analyze(self):
        """Minimize the DFA and collect every construction with the bound it implies."""
        dfa = self.guarded(load_valid_dfa, self.dfa_file)
        report = self.guarded(analyze, dfa, self.k_max)
        return {
            "file": str(self.dfa_file),
            "states": len(dfa.states),
            "minimal_states": len(report.minimized.states),
            "bound": report.bound,
            "rfa_recognizable": report.rfa_recognizable,
            "qfa_recognizable": report.qfa_recognizable,
            "witnesses": [witness_to_dict(w) for w in report.witnesses],
            "notes": list(report.notes),
        }

    def show(self, document):
        if self.as_json:
            self.print_json(document)
            return
        click.echo(
            f"Minimal DFA: {document['minimal_states']} states "
            f"(input had {document['states']})"
        )
        if document["witnesses"]:
            table = self.create_table("Constructions", ["Kind", "States", "Words"])
            for w in document["witnesses"]:
                kind = f"{w['kind']}({w['k']})" if w["k"] else w["kind"]
                words = ", ".join(f"'{word}'" for word in w["words"])
                table.add_row(kind, ", ".join(w["states"]), words)
            self.console.print(table)
        else:
            click.echo("No constructions found")
        click.echo(f"Bound: {document['bound']:.7f}")
        click.echo(f"RFA recognizable: {'yes' if document['rfa_recognizable'] else 'no'}")
        click.echo(f"QFA recognizable: {'yes' if document['qfa_recognizable'] else 'no'}")
        for note in document["notes"]:
            click.echo(f"Note: {note}")


@click.command()
@click.argument("dfa_file", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--kmax", "k_max", type=click.IntRange(min=2), default=K_MAX, show_default=True,
    help="Largest number of parallel cycles searched",
)
@json_option
def bound(dfa_file, k_max, as_json):
    """Upper bound on QFA recognition probability for the language of a DFA."""
    analyzer = BoundAnalyzer(dfa_file, k_max=k_max, as_json=as_json)
    analyzer.show(analyzer.analyze())
