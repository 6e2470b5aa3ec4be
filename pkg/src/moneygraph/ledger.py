"""Balance-sheet graph core.

Agents are nodes; financial instruments are directed edges from debtor to
creditor. Because every claim is a single shared edge, double-entry is
structural: an instrument simultaneously *is* one agent's asset and the other
agent's liability, so per-currency zero-sum holds by construction and is
re-verified from scratch by :meth:`BalanceGraph.check_invariants`.

Exactness contract: all amounts are nonnegative Python ints (minor units or
commodity units); rates and probabilities are :class:`fractions.Fraction`.
No floating point touches ledger state.

Edges are canonical: at most one instrument exists per
(kind, debtor, creditor, currency, redemption) key. Deltas in
:meth:`BalanceGraph.post` address edges by that key; an edge whose amount
reaches zero is removed, which keeps snapshots canonical and makes snapshot
equality meaningful.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Union

from .errors import (
    BadSnapshotError,
    DuplicateCentralBankError,
    DuplicateTreasuryError,
    InsufficientBackingError,
    IssuerRequiredError,
    KindMismatchError,
    NegativeAmountError,
    RegimeViolationError,
    SelfClaimError,
    UnknownAgentError,
    UnknownCommodityError,
    UnknownCurrencyError,
    UnknownInstrumentError,
)

AgentId = int
InstrumentId = int
Amount = int
CurrencyId = str
CommodityId = str
UnitId = str  # a CurrencyId or CommodityId


class AgentKind(str, Enum):
    CENTRAL_BANK = "central_bank"
    TREASURY = "treasury"
    BANK = "bank"
    NONBANK = "nonbank"
    FOREIGN = "foreign"


class InstrumentKind(str, Enum):
    NOTE = "note"                          # currency in circulation, CB liability
    RESERVE = "reserve"                    # CB liability to a bank
    DEPOSIT = "deposit"                    # bank (or CB) liability
    LOAN = "loan"                          # claim of a bank (or CB) on a borrower
    BOND = "bond"                          # tradable debt
    CONVERTIBLE_NOTE = "convertible_note"  # redeemable into a reserve asset at a fixed rate


class RegimeKind(str, Enum):
    PURE_COMMODITY = "pure_commodity"
    CONVERTIBLE = "convertible"
    FIAT = "fiat"


@dataclass(frozen=True)
class Regime:
    kind: RegimeKind
    full_backing: bool = False  # meaningful only for CONVERTIBLE

    @classmethod
    def fiat(cls) -> "Regime":
        return cls(RegimeKind.FIAT)

    @classmethod
    def pure_commodity(cls) -> "Regime":
        return cls(RegimeKind.PURE_COMMODITY)

    @classmethod
    def convertible(cls, full_backing: bool = False) -> "Regime":
        return cls(RegimeKind.CONVERTIBLE, full_backing)

    @property
    def allows_credit(self) -> bool:
        """Whether bank lending (loan-funded deposits) is permitted."""
        if self.kind is RegimeKind.FIAT:
            return True
        return self.kind is RegimeKind.CONVERTIBLE and not self.full_backing


@dataclass(frozen=True)
class Redemption:
    """Fixed-rate conversion promise: ``rate`` reserve units per note unit."""

    target: UnitId
    rate: Fraction


@dataclass(frozen=True)
class Agent:
    id: AgentId
    kind: AgentKind
    currency: Optional[CurrencyId] = None  # set for central_bank and treasury
    commodities: dict = field(default_factory=dict)
    label: Optional[str] = None

    @property
    def issues(self) -> Optional[CurrencyId]:
        return self.currency if self.kind is AgentKind.CENTRAL_BANK else None


@dataclass(frozen=True)
class Instrument:
    id: InstrumentId
    kind: InstrumentKind
    debtor: AgentId
    creditor: AgentId
    currency: CurrencyId
    amount: Amount
    redemption: Optional[Redemption] = None

    @property
    def key(self) -> tuple:
        return (self.kind, self.debtor, self.creditor, self.currency, self.redemption)


@dataclass(frozen=True)
class EdgeDelta:
    """Signed change to the canonical edge identified by the key fields."""

    kind: InstrumentKind
    debtor: AgentId
    creditor: AgentId
    currency: CurrencyId
    change: int
    redemption: Optional[Redemption] = None

    @property
    def key(self) -> tuple:
        return (self.kind, self.debtor, self.creditor, self.currency, self.redemption)


@dataclass(frozen=True)
class CommodityDelta:
    agent: AgentId
    commodity: CommodityId
    change: int


Delta = Union[EdgeDelta, CommodityDelta]


@dataclass(frozen=True)
class BalanceSheet:
    """Derived per-unit view of one agent; never stored.

    Entries aggregate claims by instrument kind so the view is stable under
    the merge operations (consolidation, sector aggregation), which re-attach
    edges without changing any outside agent's per-kind totals.
    """

    agent: AgentId
    unit: UnitId
    assets: tuple  # ((source, amount), ...) sorted by source
    liabilities: tuple
    net_worth: int

    def to_json_dict(self) -> dict:
        return {
            "agent": self.agent,
            "unit": self.unit,
            "assets": [[s, str(a)] for s, a in self.assets],
            "liabilities": [[s, str(a)] for s, a in self.liabilities],
            "net_worth": str(self.net_worth),
        }

    def text(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))


def format_rational(r: Fraction) -> str:
    return f"{r.numerator}/{r.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q`` (or a bare integer) into an exact Fraction."""
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


# Instrument kinds that may not exist in a pure commodity system. The set is
# exhaustive: a commodity-money world has no financial claims at all.
_COMMODITY_FORBIDDEN = frozenset(InstrumentKind)


class BalanceGraph:
    """The whole system state: agents, instruments, regime, config flags.

    Single-writer value semantics: all mutation goes through the methods
    below, each of which either commits atomically or leaves the graph
    byte-identical to before. Reads are pure.
    """

    def __init__(
        self,
        regime: Regime,
        *,
        cb_intraday_credit: bool = False,
        treasury_overdraft: bool = False,
        record_ops: bool = True,
    ):
        self.regime = regime
        self.cb_intraday_credit = cb_intraday_credit
        self.treasury_overdraft = treasury_overdraft
        self.record_ops = record_ops
        self.agents: dict[AgentId, Agent] = {}
        self.instruments: dict[InstrumentId, Instrument] = {}
        self.currencies: set[CurrencyId] = set()
        self.commodities: set[CommodityId] = set()
        self.log: list = []  # OpRecord entries appended by the operations layer
        self._next_agent_id = 1
        self._next_instrument_id = 1
        self._by_key: dict[tuple, InstrumentId] = {}
        # Incrementally maintained net financial position per (agent, currency).
        # check_invariants recomputes this from raw edges and cross-checks, so
        # tampering with an edge outside post() is detectable.
        self._positions: dict[tuple, int] = {}

    # ------------------------------------------------------------------
    # registration
    # ------------------------------------------------------------------

    def add_currency(self, currency: CurrencyId) -> None:
        if not currency:
            raise UnknownCurrencyError("currency id must be nonempty")
        self.currencies.add(currency)

    def add_commodity(self, commodity: CommodityId) -> None:
        if not commodity:
            raise UnknownCommodityError("commodity id must be nonempty")
        self.commodities.add(commodity)

    def add_agent(
        self,
        kind: AgentKind,
        issues: Optional[CurrencyId] = None,
        *,
        currency: Optional[CurrencyId] = None,
        label: Optional[str] = None,
    ) -> AgentId:
        """Add a node. Central banks must state the currency they issue;
        treasuries carry a currency affiliation via ``currency``."""
        kind = AgentKind(kind)
        if kind is AgentKind.CENTRAL_BANK:
            cur = issues or currency
            if cur is None:
                raise IssuerRequiredError("central_bank requires an issued currency")
            if any(
                a.kind is AgentKind.CENTRAL_BANK and a.currency == cur
                for a in self.agents.values()
            ):
                raise DuplicateCentralBankError(f"currency {cur} already has a central bank")
            self.add_currency(cur)
        elif kind is AgentKind.TREASURY:
            cur = currency or issues
            if cur is None:
                raise IssuerRequiredError("treasury requires a currency affiliation")
            if any(
                a.kind is AgentKind.TREASURY and a.currency == cur
                for a in self.agents.values()
            ):
                raise DuplicateTreasuryError(f"currency {cur} already has a treasury")
            self.add_currency(cur)
        else:
            if issues is not None or currency is not None:
                raise KindMismatchError(f"{kind.value} does not issue or affiliate with a currency")
            cur = None
        agent_id = self._next_agent_id
        self._next_agent_id += 1
        self.agents[agent_id] = Agent(id=agent_id, kind=kind, currency=cur, label=label)
        return agent_id

    # ------------------------------------------------------------------
    # lookups (pure)
    # ------------------------------------------------------------------

    def agent(self, agent_id: AgentId) -> Agent:
        try:
            return self.agents[agent_id]
        except KeyError:
            raise UnknownAgentError(f"no agent {agent_id}") from None

    def instrument(self, instrument_id: InstrumentId) -> Instrument:
        try:
            return self.instruments[instrument_id]
        except KeyError:
            raise UnknownInstrumentError(f"no instrument {instrument_id}") from None

    def instrument_by_key(
        self,
        kind: InstrumentKind,
        debtor: AgentId,
        creditor: AgentId,
        currency: CurrencyId,
        redemption: Optional[Redemption] = None,
    ) -> Optional[Instrument]:
        iid = self._by_key.get((kind, debtor, creditor, currency, redemption))
        return self.instruments[iid] if iid is not None else None

    def edge_amount(
        self,
        kind: InstrumentKind,
        debtor: AgentId,
        creditor: AgentId,
        currency: CurrencyId,
        redemption: Optional[Redemption] = None,
    ) -> int:
        inst = self.instrument_by_key(kind, debtor, creditor, currency, redemption)
        return inst.amount if inst else 0

    def central_bank(self, currency: CurrencyId) -> Optional[Agent]:
        for a in self.agents.values():
            if a.kind is AgentKind.CENTRAL_BANK and a.currency == currency:
                return a
        return None

    def treasury(self, currency: CurrencyId) -> Optional[Agent]:
        for a in self.agents.values():
            if a.kind is AgentKind.TREASURY and a.currency == currency:
                return a
        return None

    def holding(self, agent_id: AgentId, commodity: CommodityId) -> int:
        return self.agent(agent_id).commodities.get(commodity, 0)

    # ------------------------------------------------------------------
    # the atomic rewrite
    # ------------------------------------------------------------------

    def post(self, deltas: Iterable[Delta]) -> None:
        """Apply a batch of edge/commodity deltas atomically.

        Either every delta lands and all invariants still hold, or the call
        raises and the graph is unchanged. Multiple deltas addressing the
        same edge (or the same commodity holding) are netted before checks.
        """
        edge_net: dict[tuple, int] = {}
        edge_order: list[tuple] = []
        comm_net: dict[tuple, int] = {}
        for d in deltas:
            if isinstance(d, EdgeDelta):
                k = d.key
                if k not in edge_net:
                    edge_net[k] = 0
                    edge_order.append(k)
                edge_net[k] += d.change
            elif isinstance(d, CommodityDelta):
                ck = (d.agent, d.commodity)
                comm_net[ck] = comm_net.get(ck, 0) + d.change
            else:
                raise TypeError(f"not a delta: {d!r}")

        regime = self.regime
        for key in edge_order:
            kind, debtor, creditor, currency, redemption = key
            if regime.kind is RegimeKind.PURE_COMMODITY and kind in _COMMODITY_FORBIDDEN:
                raise RegimeViolationError("financial instruments are incompatible with a pure commodity system")
            if debtor == creditor:
                raise SelfClaimError("a claim on oneself nets to zero and is forbidden")
            if debtor not in self.agents or creditor not in self.agents:
                raise UnknownAgentError(f"edge endpoints {debtor}->{creditor} not in graph")
            if currency not in self.currencies:
                raise UnknownCurrencyError(f"currency {currency} not declared")
            dk = self.agents[debtor].kind
            ck = self.agents[creditor].kind
            if kind in (InstrumentKind.NOTE, InstrumentKind.RESERVE):
                if dk is not AgentKind.CENTRAL_BANK or self.agents[debtor].currency != currency:
                    raise KindMismatchError(f"{kind.value} debtor must be the central bank of {currency}")
            elif kind is InstrumentKind.DEPOSIT:
                if dk not in (AgentKind.BANK, AgentKind.CENTRAL_BANK):
                    raise KindMismatchError("deposit debtor must be a bank or central bank")
            elif kind is InstrumentKind.LOAN:
                if ck not in (AgentKind.BANK, AgentKind.CENTRAL_BANK):
                    raise KindMismatchError("loan creditor must be a bank or central bank")
            if kind is InstrumentKind.CONVERTIBLE_NOTE:
                if regime.kind is not RegimeKind.CONVERTIBLE:
                    raise RegimeViolationError("convertible notes require a convertible regime")
                if redemption is None:
                    raise KindMismatchError("convertible_note requires a redemption target and rate")
                if redemption.rate <= 0:
                    raise KindMismatchError("redemption rate must be positive")
                if redemption.target not in self.commodities and redemption.target not in self.currencies:
                    raise UnknownCommodityError(f"redemption target {redemption.target} not declared")
            elif redemption is not None:
                raise KindMismatchError(f"{kind.value} carries no redemption promise")

        for (agent_id, commodity) in comm_net:
            if agent_id not in self.agents:
                raise UnknownAgentError(f"no agent {agent_id}")
            if commodity not in self.commodities:
                raise UnknownCommodityError(f"commodity {commodity} not declared")

        # Build the prospective state on copies; nothing below mutates self
        # until the final commit block.
        new_instruments = dict(self.instruments)
        new_by_key = dict(self._by_key)
        next_iid = self._next_instrument_id
        for key in edge_order:
            change = edge_net[key]
            old_id = new_by_key.get(key)
            old_amount = new_instruments[old_id].amount if old_id is not None else 0
            new_amount = old_amount + change
            if new_amount < 0:
                raise NegativeAmountError(
                    f"{key[0].value} {key[1]}->{key[2]} would go to {new_amount}"
                )
            if new_amount == 0:
                if old_id is not None:
                    del new_instruments[old_id]
                    del new_by_key[key]
            elif old_id is not None:
                new_instruments[old_id] = replace(new_instruments[old_id], amount=new_amount)
            else:
                kind, debtor, creditor, currency, redemption = key
                inst = Instrument(
                    id=next_iid,
                    kind=kind,
                    debtor=debtor,
                    creditor=creditor,
                    currency=currency,
                    amount=new_amount,
                    redemption=redemption,
                )
                new_instruments[next_iid] = inst
                new_by_key[key] = next_iid
                next_iid += 1

        new_agents = None
        if comm_net:
            new_agents = dict(self.agents)
            touched: dict[AgentId, dict] = {}
            for (agent_id, commodity), change in comm_net.items():
                holdings = touched.get(agent_id)
                if holdings is None:
                    holdings = dict(new_agents[agent_id].commodities)
                    touched[agent_id] = holdings
                new_q = holdings.get(commodity, 0) + change
                if new_q < 0:
                    raise NegativeAmountError(
                        f"agent {agent_id} holding of {commodity} would go to {new_q}"
                    )
                if new_q == 0:
                    holdings.pop(commodity, None)
                else:
                    holdings[commodity] = new_q
            for agent_id, holdings in touched.items():
                new_agents[agent_id] = replace(new_agents[agent_id], commodities=holdings)

        if regime.kind is RegimeKind.CONVERTIBLE and regime.full_backing:
            agents_view = new_agents if new_agents is not None else self.agents
            affected = {k[1] for k in edge_net} | {a for (a, _) in comm_net}
            self._check_full_backing(new_instruments, agents_view, affected)

        # Commit.
        self.instruments = new_instruments
        self._by_key = new_by_key
        self._next_instrument_id = next_iid
        if new_agents is not None:
            self.agents = new_agents
        positions = self._positions
        for key in edge_order:
            change = edge_net[key]
            if change == 0:
                continue
            _, debtor, creditor, currency, _ = key
            for aid, sign in ((creditor, change), (debtor, -change)):
                pk = (aid, currency)
                val = positions.get(pk, 0) + sign
                if val:
                    positions[pk] = val
                else:
                    positions.pop(pk, None)

    def _check_full_backing(self, instruments: dict, agents: dict, affected: set) -> None:
        """Under full backing, each issuer's convertible promises, converted
        at their rates, must not exceed its holdings of the backing asset."""
        required: dict[tuple, Fraction] = {}
        for inst in instruments.values():
            if inst.kind is InstrumentKind.CONVERTIBLE_NOTE and inst.debtor in affected:
                k = (inst.debtor, inst.redemption.target)
                required[k] = required.get(k, Fraction(0)) + inst.amount * inst.redemption.rate
        for (issuer, target), need in required.items():
            if target in self.commodities:
                have = Fraction(agents[issuer].commodities.get(target, 0))
            else:
                have = Fraction(
                    sum(
                        i.amount
                        for i in instruments.values()
                        if i.creditor == issuer and i.currency == target
                    )
                )
            if need > have:
                raise InsufficientBackingError(
                    f"agent {issuer} promises {need} of {target} against {have}"
                )

    # ------------------------------------------------------------------
    # derived views (pure)
    # ------------------------------------------------------------------

    def balance_sheet(self, agent_id: AgentId, unit: UnitId) -> BalanceSheet:
        agent = self.agent(agent_id)
        assets: dict[str, int] = {}
        liabilities: dict[str, int] = {}
        for inst in self.instruments.values():
            if inst.currency != unit:
                continue
            if inst.creditor == agent_id:
                assets[inst.kind.value] = assets.get(inst.kind.value, 0) + inst.amount
            elif inst.debtor == agent_id:
                liabilities[inst.kind.value] = liabilities.get(inst.kind.value, 0) + inst.amount
        if unit in self.commodities:
            q = agent.commodities.get(unit, 0)
            if q:
                assets["commodity"] = assets.get("commodity", 0) + q
        total_assets = sum(assets.values())
        total_liabilities = sum(liabilities.values())
        return BalanceSheet(
            agent=agent_id,
            unit=unit,
            assets=tuple(sorted(assets.items())),
            liabilities=tuple(sorted(liabilities.items())),
            net_worth=total_assets - total_liabilities,
        )

    def check_invariants(self) -> list[str]:
        """Re-verify every structural invariant from raw state.

        Returns a list of violation descriptions; an empty list means the
        graph is healthy. Never raises: violations are data.
        """
        v: list[str] = []
        agents = self.agents
        cb_by_cur: dict[str, int] = {}
        treas_by_cur: dict[str, int] = {}
        for a in agents.values():
            if a.kind is AgentKind.CENTRAL_BANK:
                if a.currency is None:
                    v.append(f"agent {a.id}: central_bank without issued currency")
                elif a.currency in cb_by_cur:
                    v.append(f"currency {a.currency}: more than one central bank")
                else:
                    cb_by_cur[a.currency] = a.id
            elif a.kind is AgentKind.TREASURY:
                if a.currency is None:
                    v.append(f"agent {a.id}: treasury without currency")
                elif a.currency in treas_by_cur:
                    v.append(f"currency {a.currency}: more than one treasury")
                else:
                    treas_by_cur[a.currency] = a.id
            elif a.currency is not None:
                v.append(f"agent {a.id}: non-government agent with currency affiliation")
            for c, q in a.commodities.items():
                if q <= 0:
                    v.append(f"agent {a.id}: nonpositive holding of {c}")
                if c not in self.commodities:
                    v.append(f"agent {a.id}: holding of undeclared commodity {c}")

        regime = self.regime
        pure = regime.kind is RegimeKind.PURE_COMMODITY
        convertible = regime.kind is RegimeKind.CONVERTIBLE
        positions: dict[tuple, int] = {}
        currencies_in_use: set[str] = set()
        CB, BANK = AgentKind.CENTRAL_BANK, AgentKind.BANK
        NOTE, RESERVE = InstrumentKind.NOTE, InstrumentKind.RESERVE
        DEPOSIT, LOAN = InstrumentKind.DEPOSIT, InstrumentKind.LOAN
        CONV = InstrumentKind.CONVERTIBLE_NOTE
        for iid, inst in self.instruments.items():
            if inst.id != iid:
                v.append(f"instrument {iid}: id field mismatch")
            if inst.amount <= 0:
                v.append(f"instrument {iid}: nonpositive amount {inst.amount}")
            d, c = inst.debtor, inst.creditor
            if d == c:
                v.append(f"instrument {iid}: self-claim on agent {d}")
                continue
            da, ca = agents.get(d), agents.get(c)
            if da is None or ca is None:
                v.append(f"instrument {iid}: dangling endpoint")
                continue
            cur = inst.currency
            if cur not in self.currencies:
                v.append(f"instrument {iid}: undeclared currency {cur}")
            currencies_in_use.add(cur)
            kind = inst.kind
            if pure:
                v.append(f"instrument {iid}: {kind.value} forbidden in pure commodity regime")
            if kind is NOTE or kind is RESERVE:
                if da.kind is not CB or da.currency != cur:
                    v.append(f"instrument {iid}: {kind.value} debtor is not the {cur} central bank")
            elif kind is DEPOSIT:
                if da.kind is not BANK and da.kind is not CB:
                    v.append(f"instrument {iid}: deposit debtor is not a bank")
            elif kind is LOAN:
                if ca.kind is not BANK and ca.kind is not CB:
                    v.append(f"instrument {iid}: loan creditor is not a bank")
            if kind is CONV:
                if not convertible:
                    v.append(f"instrument {iid}: convertible note outside convertible regime")
                if inst.redemption is None:
                    v.append(f"instrument {iid}: convertible note without redemption terms")
            elif inst.redemption is not None:
                v.append(f"instrument {iid}: redemption terms on non-convertible kind")
            amount = inst.amount
            pk = (c, cur)
            positions[pk] = positions.get(pk, 0) + amount
            pk = (d, cur)
            positions[pk] = positions.get(pk, 0) - amount

        positions = {k: n for k, n in positions.items() if n}
        if positions != self._positions:
            bad = {k for k in positions.items() ^ self._positions.items()}
            for cur in sorted({k[0][1] for k in bad}):
                v.append(f"currency {cur}: cached positions diverge from raw edges (zero-sum bookkeeping broken)")
        sums: dict[str, int] = {}
        for (_, cur), n in positions.items():
            sums[cur] = sums.get(cur, 0) + n
        for cur, total in sorted(sums.items()):
            if total != 0:
                v.append(f"currency {cur}: zero-sum violated, net {total}")

        if regime.kind is not RegimeKind.PURE_COMMODITY:
            for cur in sorted(currencies_in_use):
                if cur not in cb_by_cur:
                    v.append(f"currency {cur}: in use but has no issuing central bank")

        if convertible and regime.full_backing:
            try:
                self._check_full_backing(self.instruments, agents, set(agents))
            except InsufficientBackingError as e:
                v.append(f"full backing violated: {e.message}")
        return v

    # ------------------------------------------------------------------
    # snapshots
    # ------------------------------------------------------------------

    def snapshot(self) -> dict:
        """Canonical JSON-ready form: fixed key order, entries sorted by id,
        amounts as decimal strings. Equal graphs produce equal bytes."""
        regime: dict = {"kind": self.regime.kind.value}
        if self.regime.kind is RegimeKind.CONVERTIBLE:
            regime["full_backing"] = self.regime.full_backing
        agents = []
        for a in sorted(self.agents.values(), key=lambda a: a.id):
            agents.append(
                {
                    "id": a.id,
                    "kind": a.kind.value,
                    "currency": a.currency,
                    "label": a.label,
                    "commodities": {c: str(q) for c, q in sorted(a.commodities.items())},
                }
            )
        instruments = []
        for inst in sorted(self.instruments.values(), key=lambda i: i.id):
            red = None
            if inst.redemption is not None:
                red = {"target": inst.redemption.target, "rate": format_rational(inst.redemption.rate)}
            instruments.append(
                {
                    "id": inst.id,
                    "kind": inst.kind.value,
                    "debtor": inst.debtor,
                    "creditor": inst.creditor,
                    "currency": inst.currency,
                    "amount": str(inst.amount),
                    "redemption": red,
                }
            )
        return {
            "regime": regime,
            "config": {
                "cb_intraday_credit": self.cb_intraday_credit,
                "treasury_overdraft": self.treasury_overdraft,
            },
            "currencies": sorted(self.currencies),
            "commodities": sorted(self.commodities),
            "agents": agents,
            "instruments": instruments,
        }

    def snapshot_text(self) -> str:
        return json.dumps(self.snapshot(), indent=2) + "\n"

    def copy(self) -> "BalanceGraph":
        """Independent copy (fresh op log)."""
        g = BalanceGraph(
            self.regime,
            cb_intraday_credit=self.cb_intraday_credit,
            treasury_overdraft=self.treasury_overdraft,
            record_ops=self.record_ops,
        )
        g.agents = dict(self.agents)
        g.instruments = dict(self.instruments)
        g.currencies = set(self.currencies)
        g.commodities = set(self.commodities)
        g._next_agent_id = self._next_agent_id
        g._next_instrument_id = self._next_instrument_id
        g._by_key = dict(self._by_key)
        g._positions = dict(self._positions)
        return g


def new_graph(
    regime: Regime,
    *,
    cb_intraday_credit: bool = False,
    treasury_overdraft: bool = False,
    record_ops: bool = True,
) -> BalanceGraph:
    """Create an empty graph in the given regime; invariants hold vacuously."""
    return BalanceGraph(
        regime,
        cb_intraday_credit=cb_intraday_credit,
        treasury_overdraft=treasury_overdraft,
        record_ops=record_ops,
    )


def load_snapshot(data: Union[str, bytes, dict], *, validate: bool = True) -> BalanceGraph:
    """Rebuild a graph from its snapshot form.

    Id counters are not serialized; they restart above the highest id seen,
    so replaying the same operations on a loaded graph assigns the same ids.
    """
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise BadSnapshotError(f"not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise BadSnapshotError("snapshot root must be an object")
    try:
        rk = RegimeKind(data["regime"]["kind"])
        regime = Regime(rk, bool(data["regime"].get("full_backing", False)))
        config = data.get("config", {})
        g = BalanceGraph(
            regime,
            cb_intraday_credit=bool(config.get("cb_intraday_credit", False)),
            treasury_overdraft=bool(config.get("treasury_overdraft", False)),
        )
        g.currencies = set(data.get("currencies", []))
        g.commodities = set(data.get("commodities", []))
        for a in data["agents"]:
            agent = Agent(
                id=int(a["id"]),
                kind=AgentKind(a["kind"]),
                currency=a.get("currency"),
                commodities={c: int(q) for c, q in a.get("commodities", {}).items()},
                label=a.get("label"),
            )
            if agent.id in g.agents:
                raise BadSnapshotError(f"duplicate agent id {agent.id}")
            g.agents[agent.id] = agent
            g._next_agent_id = max(g._next_agent_id, agent.id + 1)
        for i in data["instruments"]:
            red = None
            if i.get("redemption") is not None:
                red = Redemption(
                    target=i["redemption"]["target"],
                    rate=parse_rational(i["redemption"]["rate"]),
                )
            inst = Instrument(
                id=int(i["id"]),
                kind=InstrumentKind(i["kind"]),
                debtor=int(i["debtor"]),
                creditor=int(i["creditor"]),
                currency=i["currency"],
                amount=int(i["amount"]),
                redemption=red,
            )
            if inst.id in g.instruments:
                raise BadSnapshotError(f"duplicate instrument id {inst.id}")
            if inst.key in g._by_key:
                raise BadSnapshotError(f"duplicate canonical edge {inst.key}")
            g.instruments[inst.id] = inst
            g._by_key[inst.key] = inst.id
            g._next_instrument_id = max(g._next_instrument_id, inst.id + 1)
            for aid, sign in ((inst.creditor, inst.amount), (inst.debtor, -inst.amount)):
                pk = (aid, inst.currency)
                val = g._positions.get(pk, 0) + sign
                if val:
                    g._positions[pk] = val
                else:
                    g._positions.pop(pk, None)
    except (KeyError, ValueError, TypeError) as e:
        raise BadSnapshotError(f"malformed snapshot: {e!r}") from None
    if validate:
        violations = g.check_invariants()
        if violations:
            raise BadSnapshotError("; ".join(violations))
    return g
