"""Human-readable rendering of reports on a rich Console."""
import json
import math
from typing import Iterable, List, Optional, Sequence, Tuple

from rich.console import Console
from rich.table import Table

from models.reports import (
    AxiomCheck,
    AxiomReport,
    ClassificationReport,
    CorpusEntryResult,
    GaugeReport,
    TransformReport,
    WedgeSupWitness,
)
from models.spaces import FiniteApproachSpace, LambdaTable

PASS = "[green]✓[/green]"
FAIL = "[red]✗[/red]"


def fmt(value: float) -> str:
    """Shortest round-trip repr, inf as "inf"."""
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return repr(value)


def _mark(passed: bool) -> str:
    return PASS if passed else FAIL


def _witness(check: AxiomCheck) -> str:
    if check.witness is None:
        return ""
    return json.dumps(check.witness, sort_keys=True)


def _verdict(console: Console, passed: bool, what: str) -> None:
    if passed:
        console.print(f"[bold green]{what}: all checks passed[/bold green]")
    else:
        console.print(f"[bold red]{what}: checks failed[/bold red]")


def render_axiom_report(console: Console, report: AxiomReport, title: Optional[str] = None) -> None:
    table = Table(title=title or report.subject)
    table.add_column("check")
    table.add_column("", justify="center")
    table.add_column("detail")
    table.add_column("witness", overflow="fold")
    for check in report.checks:
        detail = check.detail + (" (sampled)" if check.sampled else "")
        table.add_row(check.name, _mark(check.passed), detail, _witness(check))
    console.print(table)
    if report.unchecked:
        console.print(f"[yellow]⚠[/yellow] {len(report.unchecked)} triple(s) checked on a sampled grid only")
    _verdict(console, report.passed, report.subject)


def render_transform_report(console: Console, report: TransformReport) -> None:
    console.print(f"[bold]{report.name}[/bold]: {report.input_tnorm.name} → {report.output_tnorm.name}")
    if report.stages:
        console.print(f"  stages: {' → '.join(report.stages)}")
    for note in report.notes:
        console.print(f"  [yellow]note:[/yellow] {note}")
    render_axiom_report(console, report.axioms, title=f"output axioms ({report.output_tnorm.name})")
    if report.delta_preserved:
        console.print(f"  {PASS} approach distance preserved")
    else:
        console.print(f"  {FAIL} approach distance changed at {json.dumps(report.delta_witness)}")
    _verdict(console, report.passed, report.name)


def render_classification(console: Console, report: ClassificationReport) -> None:
    console.print(f"[bold]Classification over {report.tnorm.name}[/bold] (k* = {fmt(report.k_star)})")
    console.print(f"  minimum certificate: {_mark(report.minimum_certificate)}")
    console.print(f"  product certificate: {_mark(report.product_certificate)}")
    if report.product_error:
        console.print(f"  [yellow]product pipeline:[/yellow] {report.product_error}")
    console.print(f"  case {report.case}")
    for family in report.certified_families:
        console.print(f"  certified for {family}")
    for note in report.notes:
        console.print(f"  [dim]{note}[/dim]")
    _verdict(console, report.passed, "classify")


def render_delta_table(console: Console, A: FiniteApproachSpace) -> None:
    table = Table(title=f"approach distance over {A.size} points")
    table.add_column("subset")
    for x in A.carrier:
        table.add_column(x, justify="right")
    for mask in range(1, A.full_mask + 1):
        labels = A.labels_of(mask)
        table.add_row("{" + ",".join(labels) + "}", *(fmt(A.delta[i][mask]) for i in range(A.size)))
    console.print(table)


def render_closures(console: Console, rows: Iterable[Tuple[Sequence[str], Sequence[str]]]) -> None:
    table = Table(title="closure")
    table.add_column("S")
    table.add_column("cl(S)")
    for subset, closed in rows:
        table.add_row("{" + ",".join(subset) + "}", "{" + ",".join(closed) + "}")
    console.print(table)


def render_neighborhoods(console: Console, x: str, rows: Iterable[Tuple[float, Sequence[str]]]) -> None:
    table = Table(title=f"neighborhoods of {x}")
    table.add_column("t", justify="right")
    table.add_column("U(t)")
    for t, points in rows:
        table.add_row(fmt(t), "{" + ",".join(points) + "}")
    console.print(table)


def render_lambda_tables(console: Console, tables: List[LambdaTable]) -> None:
    if not tables:
        return
    table = Table(title=f"lambda tables for {tables[0].x}")
    table.add_column("n", justify="right")
    table.add_column("threshold", justify="right")
    labels = list(tables[0].values)
    for y in labels:
        table.add_column(y, justify="right")
    for entry in tables:
        table.add_row(str(entry.n), fmt(entry.threshold), *(fmt(entry.values[y]) for y in labels))
    console.print(table)


def render_gauge(console: Console, report: GaugeReport) -> None:
    table = Table(title=f"d_{report.n}")
    table.add_column("")
    for y in report.carrier:
        table.add_column(y, justify="right")
    for x, row in zip(report.carrier, report.matrix):
        table.add_row(x, *(fmt(v) for v in row))
    console.print(table)
    render_axiom_report(console, report.checks)


def render_wedge_witness(console: Console, witness: Optional[WedgeSupWitness]) -> None:
    if witness is None:
        console.print("  k* = 1: no sequence below 1 keeps its idempotent floors away from 1")
        return
    console.print(f"  floors stay at k* = {fmt(witness.k_star)} while the sequence tends to {fmt(witness.limit)}")
    console.print(f"  last term {fmt(witness.sequence[-1])}, sup of floors {fmt(witness.floor_sup)}")


def render_corpus(console: Console, results: List[CorpusEntryResult]) -> None:
    table = Table(title="corpus replay")
    table.add_column("seed", justify="right")
    table.add_column("t-norm")
    table.add_column("points", justify="right")
    table.add_column("", justify="center")
    table.add_column("failed / error", overflow="fold")
    for result in results:
        failed = [name for name, ok in result.checks.items() if not ok]
        table.add_row(str(result.seed), result.tnorm, str(result.n_points), _mark(result.passed),
                      result.error or ", ".join(failed))
    console.print(table)
    passed = sum(1 for result in results if result.passed)
    console.print(f"{passed} of {len(results)} entries passed")
    _verdict(console, passed == len(results), "corpus")
