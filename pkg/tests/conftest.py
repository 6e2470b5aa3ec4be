"""Shared fixtures and independent measurement oracles.

The raw_* helpers recompute aggregates by scanning edges directly, without
touching the measures module or the graph's cached positions, so tests can
check both implementations against each other.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from moneygraph import AgentKind, InstrumentKind

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def scenario_paths() -> list[Path]:
    return sorted(SCENARIO_DIR.glob("*.mgs"))


def government_ids(g, currency: str) -> set[int]:
    return {
        a.id
        for a in g.agents.values()
        if a.currency == currency and a.kind in (AgentKind.CENTRAL_BANK, AgentKind.TREASURY)
    }


def raw_base(g, currency: str) -> int:
    gov = government_ids(g, currency)
    return sum(
        i.amount
        for i in g.instruments.values()
        if i.currency == currency
        and i.kind in (InstrumentKind.NOTE, InstrumentKind.RESERVE)
        and i.debtor in gov
        and i.creditor not in gov
    )


def raw_broad(g, currency: str) -> int:
    return sum(
        i.amount
        for i in g.instruments.values()
        if i.currency == currency
        and i.kind in (InstrumentKind.DEPOSIT, InstrumentKind.NOTE)
        and g.agents[i.creditor].kind is AgentKind.NONBANK
    )


def raw_net(g, currency: str) -> int:
    gov = government_ids(g, currency)
    total = 0
    for i in g.instruments.values():
        if i.currency != currency:
            continue
        if i.debtor in gov and i.creditor not in gov:
            total += i.amount
        elif i.creditor in gov and i.debtor not in gov:
            total -= i.amount
    return total


def raw_net_worth(g, agent: int, unit: str) -> int:
    total = 0
    for i in g.instruments.values():
        if i.currency != unit:
            continue
        if i.creditor == agent:
            total += i.amount
        elif i.debtor == agent:
            total -= i.amount
    if unit in g.commodities:
        total += g.agents[agent].commodities.get(unit, 0)
    return total


def raw_positions(g) -> dict[tuple, int]:
    """Net financial position per (agent, currency), straight from edges."""
    pos: dict[tuple, int] = {}
    for i in g.instruments.values():
        pos[(i.creditor, i.currency)] = pos.get((i.creditor, i.currency), 0) + i.amount
        pos[(i.debtor, i.currency)] = pos.get((i.debtor, i.currency), 0) - i.amount
    return {k: v for k, v in pos.items() if v}


@pytest.fixture
def fiat_fixture():
    """cb, treasury, two banks, two households on a fresh fiat graph."""
    from moneygraph import Regime, new_graph

    g = new_graph(Regime.fiat(), cb_intraday_credit=False, treasury_overdraft=False)
    g.add_currency("DOM")
    cb = g.add_agent(AgentKind.CENTRAL_BANK, "DOM", label="cb")
    tsy = g.add_agent(AgentKind.TREASURY, currency="DOM", label="tsy")
    b1 = g.add_agent(AgentKind.BANK, label="b1")
    b2 = g.add_agent(AgentKind.BANK, label="b2")
    h1 = g.add_agent(AgentKind.NONBANK, label="h1")
    h2 = g.add_agent(AgentKind.NONBANK, label="h2")
    return g, {"cb": cb, "tsy": tsy, "b1": b1, "b2": b2, "h1": h1, "h2": h2}
