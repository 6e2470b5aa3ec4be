"""moneygraph: a graph-based double-entry balance-sheet engine.

Agents are nodes, financial instruments are directed debtor->creditor edges,
and monetary operations are invariant-preserving graph rewrites. See
README.md for the data model, the scenario DSL and the HTTP API.
"""

from .errors import EngineError
from .ledger import (
    Agent,
    AgentKind,
    BalanceGraph,
    BalanceSheet,
    CommodityDelta,
    EdgeDelta,
    Instrument,
    InstrumentKind,
    Redemption,
    Regime,
    RegimeKind,
    load_snapshot,
    new_graph,
)
from .measures import all_reports, base_money, broad_money, export_dot, measure_report, net_money
from .ops import (
    OpRecord,
    aggregate_sector,
    cb_open_market_purchase,
    consolidate,
    create_loan,
    deposit_cash,
    issue_convertible_note,
    mint_commodity,
    pay_deposit,
    repay_loan,
    tax,
    transfer_commodity,
    treasury_issue_bond,
    treasury_spend,
    withdraw_cash,
)
from .pegsim import (
    DemandProcess,
    PegConfig,
    RunOutcome,
    SplitMix64,
    absorption_oracle,
    dp_absorption_oracle,
    redeem,
    simulate,
)
from .scenario import Scenario, parse, print_scenario, run

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "AgentKind",
    "BalanceGraph",
    "BalanceSheet",
    "CommodityDelta",
    "DemandProcess",
    "EdgeDelta",
    "EngineError",
    "Instrument",
    "InstrumentKind",
    "OpRecord",
    "PegConfig",
    "Redemption",
    "Regime",
    "RegimeKind",
    "RunOutcome",
    "Scenario",
    "SplitMix64",
    "absorption_oracle",
    "aggregate_sector",
    "all_reports",
    "base_money",
    "broad_money",
    "cb_open_market_purchase",
    "consolidate",
    "create_loan",
    "deposit_cash",
    "dp_absorption_oracle",
    "export_dot",
    "issue_convertible_note",
    "load_snapshot",
    "measure_report",
    "mint_commodity",
    "net_money",
    "new_graph",
    "parse",
    "pay_deposit",
    "print_scenario",
    "redeem",
    "repay_loan",
    "run",
    "simulate",
    "tax",
    "transfer_commodity",
    "treasury_issue_bond",
    "treasury_spend",
    "withdraw_cash",
]
