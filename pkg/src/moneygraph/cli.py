"""Command-line entry point.

    moneygraph run SCENARIO.mgs [--trace out.jsonl] [--csv out.csv] [--dot out.dot]
    moneygraph pegsim --reserves N --deltas "+1:1/2,-1:1/2" --horizon H --trials T --seed S [--oracle]
    moneygraph serve [--port P]   (MONEYGRAPH_PORT overrides the default)

Exit codes: run returns 0 iff every assertion passes (1 otherwise); pegsim
returns 2 on an invalid distribution or flags.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import scenario as scenario_mod
from .errors import BadDistributionError, ParseError, TooLargeError
from .ledger import parse_rational
from .pegsim import (
    DemandProcess,
    PegConfig,
    absorption_oracle,
    dp_absorption_oracle,
    parse_deltas,
    simulate,
)


@click.group()
def main() -> None:
    """Balance-sheet graph engine: scenarios, peg simulations, session service."""


@main.command(name="run")
@click.argument("path", type=click.Path(path_type=Path))
@click.option("--trace", "trace_path", type=click.Path(path_type=Path), help="write the trace as JSON lines")
@click.option("--csv", "csv_path", type=click.Path(path_type=Path), help="write the measure time-series as CSV")
@click.option("--dot", "dot_path", type=click.Path(path_type=Path), help="write the final graph as DOT")
def run_command(path: Path, trace_path: Path | None, csv_path: Path | None, dot_path: Path | None) -> None:
    """Run a .mgs scenario; exit 0 iff all assertions pass."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        click.echo(f"error: no such file: {path} ({e.strerror})", err=True)
        sys.exit(1)
    try:
        scenario = scenario_mod.parse(text)
    except ParseError as e:
        click.echo(f"{path}:{e.line}:{e.column}: {e.detail}", err=True)
        sys.exit(1)
    trace = scenario_mod.run(scenario)
    for rel, content in trace.artifacts.items():
        out = Path(rel)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(content, encoding="utf-8")
    if trace_path:
        trace_path.write_text(trace.to_jsonl(), encoding="utf-8")
    if csv_path:
        csv_path.write_text(trace.series_csv(), encoding="utf-8")
    if dot_path:
        from .measures import export_dot
        from .ledger import load_snapshot

        dot_path.write_text(export_dot(load_snapshot(trace.final_snapshot)), encoding="utf-8")
    if not trace.ok:
        err = trace.error or {}
        click.echo(f"{path}:{err.get('line')}: {err.get('code')}: {err.get('message')}", err=True)
        sys.exit(1)
    click.echo(f"ok: {sum(1 for e in trace.events if e['status'] == 'ok')} statements")


@main.command(name="pegsim")
@click.option("--reserves", type=int, required=True)
@click.option("--rate", default="1/1", show_default=True, help="reserve units per domestic unit, p/q")
@click.option("--deltas", "deltas_spec", required=True, help='net redemption per step, e.g. "+1:1/2,-1:1/2"')
@click.option("--horizon", type=int, required=True)
@click.option("--trials", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--oracle", is_flag=True, help="also compute the exact depletion probability")
@click.option("--per-trial-csv", "per_trial", type=click.Path(path_type=Path), help="write per-trial depletion steps")
def pegsim_command(reserves, rate, deltas_spec, horizon, trials, seed, oracle, per_trial) -> None:
    """Monte Carlo reserve-depletion run, optionally checked against the exact oracle."""
    try:
        deltas = parse_deltas(deltas_spec)
        peg = PegConfig(domestic="DOM", reserve_asset="RES", rate=parse_rational(rate),
                        initial_reserves=reserves)
        demand = DemandProcess(deltas=deltas, horizon=horizon, trials=trials, seed=seed)
    except (BadDistributionError, ValueError, ZeroDivisionError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    outcome = simulate(peg, demand)
    payload = outcome.to_json_dict()
    if oracle:
        try:
            exact = absorption_oracle(reserves, deltas, horizon)
        except TooLargeError:
            exact = dp_absorption_oracle(reserves, deltas, horizon)
        deviation = abs(outcome.frequency - exact)
        payload["exact"] = f"{exact.numerator}/{exact.denominator}"
        payload["deviation"] = float(deviation)
    click.echo(json.dumps(payload, indent=2))
    if per_trial:
        rows = ["trial,depletion_step"]
        rows += [f"{i},{'' if s is None else s}" for i, s in enumerate(outcome.depletion_steps)]
        per_trial.write_text("".join(r + "\n" for r in rows), encoding="utf-8")


@main.command(name="serve")
@click.option("--port", type=int, default=None, help="defaults to MONEYGRAPH_PORT or 8000")
@click.option("--host", default="127.0.0.1", show_default=True)
def serve_command(port, host) -> None:
    """Start the session service."""
    import uvicorn

    from .service import create_app

    if port is None:
        port = int(os.environ.get("MONEYGRAPH_PORT", "8000"))
    uvicorn.run(create_app(), host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
