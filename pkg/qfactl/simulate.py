"""Simulate functionality for qfactl."""

import click

from .automata import DFA_NAMES, language_oracle
from .loader import csv_options, format_word, json_option, load_valid_qfa, tokenize
from .qfa import correct_probability, enumerate_words, run, trace
from .report import ReportBase, fmt


class Simulator(ReportBase):
    csv_fields = ("File", "Word", "P(accept)", "P(reject)", "Residual", "Correct")

    def __init__(self, qfa_file, oracle=None, k=None, run_id=None, csv_file=None, as_json=False):
        super().__init__(run_id=run_id, csv_file=csv_file, as_json=as_json)
        self.qfa_file = qfa_file
        self.spec = None
        self.oracle_name = oracle
        self.oracle = language_oracle(oracle, k=k) if oracle else None

    def load(self):
        self.spec = self.guarded(load_valid_qfa, self.qfa_file)
        return self.spec

    def measure(self, word):
        result = run(self.spec, word)
        row = {
            "word": format_word(word),
            "p_acc": result.p_acc,
            "p_rej": result.p_rej,
            "residual_norm_sq": result.residual_norm_sq,
        }
        if self.oracle:
            row["member"] = self.oracle(word)
            row["p_correct"] = correct_probability(self.spec, self.oracle, word)
        return row

    def simulate(self, words):
        """Measure every word; the margin is the smallest correct-answer probability."""
        rows = [self.measure(word) for word in words]
        document = {"file": str(self.qfa_file), "words": rows}
        if self.oracle:
            worst = min(rows, key=lambda r: r["p_correct"])
            document.update(
                oracle=self.oracle_name, margin=worst["p_correct"], worst_word=worst["word"]
            )
        return document

    def show(self, document, trace_word=None):
        if self.as_json:
            if trace_word is not None:
                document["trace"] = [
                    {
                        "letter": letter,
                        "p_acc_step": outcome.p_acc_step,
                        "p_rej_step": outcome.p_rej_step,
                    }
                    for letter, outcome in trace(self.spec, trace_word)
                ]
            self.print_json(document)
        else:
            columns = ["Word", "P(accept)", "P(reject)", "|residual|^2"]
            if self.oracle:
                columns += ["Member", "P(correct)"]
            table = self.create_table(f"Simulation of {self.qfa_file}", columns)
            for row in document["words"]:
                cells = [
                    row["word"] or "ε",
                    fmt(row["p_acc"]),
                    fmt(row["p_rej"]),
                    fmt(row["residual_norm_sq"], 3),
                ]
                if self.oracle:
                    cells += ["yes" if row["member"] else "no", fmt(row["p_correct"])]
                table.add_row(*cells)
            self.console.print(table)
            if trace_word is not None:
                self.show_trace(trace_word)
            if self.oracle:
                click.echo(
                    f"Recognition margin ({self.oracle_name}): {document['margin']:.10f}"
                    f" at word '{document['worst_word']}'"
                )

        self.append_to_csv(
            [
                {
                    "File": self.qfa_file,
                    "Word": row["word"],
                    "P(accept)": row["p_acc"],
                    "P(reject)": row["p_rej"],
                    "Residual": row["residual_norm_sq"],
                    "Correct": row.get("p_correct", ""),
                }
                for row in document["words"]
            ]
        )

    def show_trace(self, word):
        table = self.create_table(
            f"Trace of '{format_word(word)}'", ["Letter", "P(accept) step", "P(reject) step"]
        )
        for letter, outcome in trace(self.spec, word):
            table.add_row(letter, fmt(outcome.p_acc_step), fmt(outcome.p_rej_step))
        self.console.print(table)


@click.command()
@click.argument("qfa_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("word", required=False)
@click.option(
    "--enumerate",
    "max_len",
    type=click.IntRange(min=0),
    default=None,
    help="Simulate every word up to this length instead of WORD",
)
@click.option("--oracle", type=click.Choice(DFA_NAMES), default=None, help="Language to score against")
@click.option("--k", type=click.IntRange(min=2), default=None, help="k for the l1 language")
@click.option("--trace", "show_trace", is_flag=True, help="Show per-letter probabilities of WORD")
@json_option
@csv_options
def simulate(qfa_file, word, max_len, oracle, k, show_trace, as_json, csv_file, run_id):
    """Run a QFA file on WORD, or on every word up to --enumerate letters."""
    simulator = Simulator(
        qfa_file, oracle=oracle, k=k, run_id=run_id, csv_file=csv_file, as_json=as_json
    )
    spec = simulator.load()
    if word is None and max_len is None:
        simulator.fail("give a WORD or --enumerate N")
    if word is not None and max_len is not None:
        simulator.fail("WORD and --enumerate are mutually exclusive")

    if max_len is not None:
        words = list(enumerate_words(spec.alphabet, max_len))
        trace_word = None
    else:
        words = [simulator.guarded(tokenize, word, spec.alphabet)]
        trace_word = words[0] if show_trace else None
    simulator.show(simulator.simulate(words), trace_word=trace_word)
