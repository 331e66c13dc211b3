"""Main CLI module for qfactl."""

import logging

import click
from rich.console import Console
from rich.logging import RichHandler

from .bound import bound
from .decompose import decompose
from .export import export
from .optimize import optimize
from .reproduce import reproduce
from .simulate import simulate
from .validate import validate


def setup_logging(debug: bool) -> None:
    """Route library logging through rich on stderr."""
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=debug)],
        force=True,
    )


@click.group()
@click.version_option()
@click.option("--debug", is_flag=True, help="Enable debug logging")
def main(debug):
    """A CLI tool for measure-many quantum finite automata.

    Simulates QFAs, splits their state space, bounds recognition
    probabilities from DFA constructions and solves the optimization
    problems behind those bounds.
    """
    setup_logging(debug)


# Add the commands to the main group
main.add_command(simulate)
main.add_command(decompose)
main.add_command(bound)
main.add_command(optimize)
main.add_command(reproduce)
main.add_command(validate)
main.add_command(export)


if __name__ == "__main__":
    main()
