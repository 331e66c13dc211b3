"""Optimize functionality for qfactl."""

import click
from rich.panel import Panel

from .loader import json_option
from .optimizer import (
    DEFAULT_DIM,
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    MAX_DIM,
    ClosedFormMismatch,
    solve_problem1,
    solve_problem2,
    solve_problem3,
)
from .report import MISMATCH, ReportBase, fmt


class OptimizationRunner(ReportBase):
    def __init__(self, problem, dim=DEFAULT_DIM, restarts=DEFAULT_RESTARTS, seed=DEFAULT_SEED,
                 accept_dim=None, as_json=False):
        super().__init__(as_json=as_json)
        self.problem = problem
        self.dim = dim
        self.restarts = restarts
        self.seed = seed
        self.accept_dim = accept_dim

    def solve(self):
        try:
            if self.problem == 1:
                return solve_problem1()
            if self.problem == 3:
                return solve_problem3()
            if self.accept_dim is not None and self.accept_dim > self.dim:
                self.fail("--accept-dim cannot exceed --dim")
            return self.guarded(
                solve_problem2,
                dim=self.dim,
                restarts=self.restarts,
                seed=self.seed,
                accept_dim=self.accept_dim,
            )
        except ClosedFormMismatch as e:
            self.fail(str(e), code=MISMATCH)

    def show(self, result):
        document = result.to_dict()
        if self.as_json:
            self.print_json(document)
            return
        lines = [f"[bold]p[/bold] = {fmt(result.p, 10)}"]
        if result.numeric_p is not None:
            lines.append(
                f"numeric cross-check = {fmt(result.numeric_p, 10)} "
                f"(difference {abs(result.p - result.numeric_p):.2e})"
            )
        lines.append(f"feasibility residual = {result.feasibility_residual:.2e}")
        if result.seed is not None:
            lines.append(f"seed = {result.seed}, restarts = {result.restarts}")
        witness = document["witness"] or {}
        for key in sorted(witness):
            value = witness[key]
            if isinstance(value, float):
                value = fmt(value, 10)
            elif isinstance(value, list):
                value = "[" + ", ".join(fmt(x, 6) for x in value) + "]"
            lines.append(f"{key} = {value}")
        self.console.print(
            Panel("\n".join(lines), title=f"Optimization problem {self.problem}", border_style="blue")
        )


@click.command()
@click.argument("problem", type=click.Choice(["1", "2", "3"]))
@click.option("--dim", type=click.IntRange(1, MAX_DIM), default=DEFAULT_DIM, show_default=True,
              help="Vector dimension for problem 2")
@click.option("--restarts", type=click.IntRange(min=1), default=DEFAULT_RESTARTS, show_default=True,
              help="Random restarts for problem 2")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True, help="Random seed for problem 2")
@click.option("--accept-dim", type=click.IntRange(min=1), default=None,
              help="Pin the accepting subspace dimension for problem 2")
@json_option
def optimize(problem, dim, restarts, seed, accept_dim, as_json):
    """Solve optimization problem 1, 2 or 3."""
    runner = OptimizationRunner(
        int(problem), dim=dim, restarts=restarts, seed=seed, accept_dim=accept_dim, as_json=as_json
    )
    runner.show(runner.solve())
