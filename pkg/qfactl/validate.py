"""Validate functionality for qfactl."""

import click

from .dfa import validate_dfa
from .loader import QFA_KIND, json_option, load_automaton
from .qfa import validate as validate_qfa
from .report import INPUT_ERROR, ReportBase


class Validator(ReportBase):
    def __init__(self, path, as_json=False):
        super().__init__(as_json=as_json)
        self.path = path

    def check(self):
        """Load the file and list the invariants it breaks."""
        kind, spec = self.guarded(load_automaton, self.path)
        violations = validate_qfa(spec) if kind == QFA_KIND else validate_dfa(spec)
        return {
            "file": str(self.path),
            "kind": kind,
            "valid": not violations,
            "violations": [
                {"invariant": v.invariant, "subject": v.subject, "detail": v.detail}
                for v in violations
            ],
        }

    def show(self, document):
        if self.as_json:
            self.print_json(document)
        elif document["valid"]:
            click.echo(f"{document['file']}: valid {document['kind'].upper()}")
        else:
            table = self.create_table(
                f"{document['file']}: {len(document['violations'])} violation(s)",
                ["Invariant", "Subject", "Detail"],
            )
            for v in document["violations"]:
                table.add_row(v["invariant"], v["subject"], v["detail"])
            self.console.print(table)
        if not document["valid"]:
            raise SystemExit(INPUT_ERROR)


@click.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@json_option
def validate(path, as_json):
    """Check a QFA or DFA file against its structural invariants."""
    validator = Validator(path, as_json=as_json)
    validator.show(validator.check())
