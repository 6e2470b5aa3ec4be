"""Monetary aggregates and graph exports.

All functions here are pure reads over a graph snapshot.

Conventions (documented so they can be audited):

* "Government" for a currency is the set {its central bank, its treasury}.
  Everyone else, including foreign agents and other currencies' authorities,
  is non-government for that currency.
* Base money: central-bank note and reserve liabilities held outside
  government.
* Broad money: deposits and notes whose creditor is a nonbank. Foreign
  holdings of domestic money count in net money but not in broad money.
* Net money: the non-government sector's net financial claims on the
  government, i.e. the consolidated government's net liability position.
  Bank lending cannot move it; only treasury spending and taxation do.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownCurrencyError
from .ledger import AgentId, AgentKind, BalanceGraph, CurrencyId, InstrumentKind


def _government(g: BalanceGraph, currency: CurrencyId) -> set[AgentId]:
    gov = set()
    for a in g.agents.values():
        if a.currency == currency and a.kind in (AgentKind.CENTRAL_BANK, AgentKind.TREASURY):
            gov.add(a.id)
    return gov


def _require_currency(g: BalanceGraph, currency: CurrencyId) -> None:
    if currency not in g.currencies:
        raise UnknownCurrencyError(f"currency {currency} not declared")


def base_money(g: BalanceGraph, currency: CurrencyId) -> int:
    """Central-bank liabilities (notes + reserves) held outside government."""
    _require_currency(g, currency)
    gov = _government(g, currency)
    total = 0
    for inst in g.instruments.values():
        if (
            inst.currency == currency
            and inst.kind in (InstrumentKind.NOTE, InstrumentKind.RESERVE)
            and inst.debtor in gov
            and inst.creditor not in gov
        ):
            total += inst.amount
    return total


def broad_money(g: BalanceGraph, currency: CurrencyId) -> int:
    """Deposits and notes held by the nonbank sector."""
    _require_currency(g, currency)
    total = 0
    for inst in g.instruments.values():
        if (
            inst.currency == currency
            and inst.kind in (InstrumentKind.DEPOSIT, InstrumentKind.NOTE)
            and g.agents[inst.creditor].kind is AgentKind.NONBANK
        ):
            total += inst.amount
    return total


def net_money(g: BalanceGraph, currency: CurrencyId) -> int:
    """Non-government net claims on the consolidated government (signed)."""
    _require_currency(g, currency)
    gov = _government(g, currency)
    total = 0
    for inst in g.instruments.values():
        if inst.currency != currency:
            continue
        if inst.debtor in gov and inst.creditor not in gov:
            total += inst.amount
        elif inst.creditor in gov and inst.debtor not in gov:
            total -= inst.amount
    return total


@dataclass(frozen=True)
class MeasureReport:
    currency: CurrencyId
    base_money: int
    broad_money: int
    net_money: int
    sector_positions: tuple  # ((kind, net financial position), ...) all kinds

    def to_json_dict(self) -> dict:
        return {
            "currency": self.currency,
            "base_money": str(self.base_money),
            "broad_money": str(self.broad_money),
            "net_money": str(self.net_money),
            "sector_positions": {k: str(v) for k, v in self.sector_positions},
        }


def measure_report(g: BalanceGraph, currency: CurrencyId) -> MeasureReport:
    """All aggregates plus per-sector net financial positions (which sum to
    zero: one sector's asset is another's liability)."""
    _require_currency(g, currency)
    sectors = {k.value: 0 for k in AgentKind}
    for inst in g.instruments.values():
        if inst.currency != currency:
            continue
        sectors[g.agents[inst.creditor].kind.value] += inst.amount
        sectors[g.agents[inst.debtor].kind.value] -= inst.amount
    return MeasureReport(
        currency=currency,
        base_money=base_money(g, currency),
        broad_money=broad_money(g, currency),
        net_money=net_money(g, currency),
        sector_positions=tuple(sorted(sectors.items())),
    )


def all_reports(g: BalanceGraph) -> list[MeasureReport]:
    return [measure_report(g, cur) for cur in sorted(g.currencies)]


def export_dot(g: BalanceGraph) -> str:
    """Deterministic DOT rendering: nodes sorted by agent id with kind and
    per-unit net worth, one arrow per instrument (debtor -> creditor) sorted
    by instrument id. Byte-stable for equal snapshots."""
    lines = ["digraph G {", "  rankdir=LR;", '  node [shape=box fontname="monospace"];']
    units = sorted(g.currencies | g.commodities)
    for a in sorted(g.agents.values(), key=lambda a: a.id):
        name = a.label or f"a{a.id}"
        worth = []
        for unit in units:
            sheet = g.balance_sheet(a.id, unit)
            if sheet.net_worth or sheet.assets or sheet.liabilities:
                worth.append(f"{unit}: {sheet.net_worth}")
        label = "\\n".join([f"{name} ({a.kind.value})"] + worth)
        lines.append(f'  a{a.id} [label="{label}"];')
    for inst in sorted(g.instruments.values(), key=lambda i: i.id):
        label = f"{inst.kind.value}:{inst.amount} {inst.currency}"
        if inst.redemption is not None:
            label += f" ->{inst.redemption.target}@{inst.redemption.rate.numerator}/{inst.redemption.rate.denominator}"
        lines.append(f'  a{inst.debtor} -> a{inst.creditor} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
