"""Composite monetary operations.

Each operation validates its preconditions, compiles to a delta list, and
lands it through one atomic :meth:`BalanceGraph.post`; a failed precondition
leaves the graph byte-identical to before. Successful calls append an
:class:`OpRecord` to the graph's log (when recording is enabled) whose delta
list replays to the identical post-state.

Delta laws (broad money, net money) per operation:

    create_loan              (+a, 0)     repay_loan            (-a, 0)
    pay_deposit              ( 0, 0)     withdraw/deposit_cash ( 0, 0)
    cb_open_market_purchase  ( 0, 0)     treasury_issue_bond   ( 0, 0)
    treasury_spend           (+a, +a)    tax                   (-a, -a)

To keep these laws universal over every valid call, the retail money ops
(create_loan, pay_deposit, withdraw/deposit_cash, treasury_spend, tax)
require nonbank counterparties; banks settle in reserves and governments in
their own instruments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .errors import (
    CurrencyMismatchError,
    ExceedsLoanError,
    InsufficientBackingError,
    InsufficientBondError,
    InsufficientCommodityError,
    InsufficientDepositError,
    InsufficientNotesError,
    InsufficientReservesError,
    InsufficientTreasuryBalanceError,
    KindMismatchError,
    MissingAgentError,
    NegativeAmountError,
    NoBankError,
    RegimeViolationError,
    UnknownInstrumentError,
    ZeroAmountError,
)
from .ledger import (
    Agent,
    AgentId,
    AgentKind,
    BalanceGraph,
    CommodityDelta,
    CommodityId,
    CurrencyId,
    EdgeDelta,
    Instrument,
    InstrumentId,
    InstrumentKind,
    Redemption,
    RegimeKind,
    format_rational,
    parse_rational,
)

RETAIL_KINDS = (AgentKind.NONBANK,)


@dataclass(frozen=True)
class OpRecord:
    """Audit-trail entry: replaying ``deltas`` on the pre-state reproduces
    the post-state exactly."""

    seq: int
    name: str
    params: dict
    deltas: tuple = field(default_factory=tuple)

    def to_json_dict(self) -> dict:
        out_deltas = []
        for d in self.deltas:
            if isinstance(d, EdgeDelta):
                entry = {
                    "edge": d.kind.value,
                    "debtor": d.debtor,
                    "creditor": d.creditor,
                    "currency": d.currency,
                    "change": d.change,
                }
                if d.redemption is not None:
                    entry["redemption"] = {
                        "target": d.redemption.target,
                        "rate": format_rational(d.redemption.rate),
                    }
            else:
                entry = {"commodity": d.commodity, "agent": d.agent, "change": d.change}
            out_deltas.append(entry)
        return {"seq": self.seq, "op": self.name, "params": self.params, "deltas": out_deltas}


def _apply(g: BalanceGraph, name: str, params: dict, deltas: list) -> None:
    g.post(deltas)
    if g.record_ops:
        g.log.append(OpRecord(seq=len(g.log) + 1, name=name, params=params, deltas=tuple(deltas)))


def oplog_jsonl(g: BalanceGraph) -> str:
    """The graph's op log as JSON lines; replay_oplog applies them to a
    pre-state copy and reproduces the post-state exactly."""
    return "".join(json.dumps(r.to_json_dict(), separators=(",", ":")) + "\n" for r in g.log)


def replay_oplog(g: BalanceGraph, jsonl: str) -> None:
    """Apply a serialized op log to a graph, line by line, via post()."""
    for line in jsonl.splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        deltas: list = []
        for d in record["deltas"]:
            if "edge" in d:
                redemption = None
                if "redemption" in d:
                    redemption = Redemption(
                        target=d["redemption"]["target"],
                        rate=parse_rational(d["redemption"]["rate"]),
                    )
                deltas.append(EdgeDelta(
                    InstrumentKind(d["edge"]), d["debtor"], d["creditor"], d["currency"],
                    d["change"], redemption,
                ))
            else:
                deltas.append(CommodityDelta(d["agent"], d["commodity"], d["change"]))
        g.post(deltas)


def _positive(amount: int, what: str = "amount") -> int:
    if not isinstance(amount, int) or isinstance(amount, bool):
        raise TypeError(f"{what} must be an int, got {type(amount).__name__}")
    if amount == 0:
        raise ZeroAmountError(f"{what} must be positive")
    if amount < 0:
        raise NegativeAmountError(f"{what} must be positive")
    return amount


def _require_kind(agent: Agent, kind: AgentKind, role: str) -> Agent:
    if agent.kind is not kind:
        raise KindMismatchError(f"{role} must be a {kind.value}, agent {agent.id} is a {agent.kind.value}")
    return agent


def _require_retail(agent: Agent, role: str) -> Agent:
    if agent.kind not in RETAIL_KINDS:
        raise KindMismatchError(f"{role} must be a nonbank, agent {agent.id} is a {agent.kind.value}")
    return agent


def _central_bank(g: BalanceGraph, currency: CurrencyId) -> Agent:
    cb = g.central_bank(currency)
    if cb is None:
        raise MissingAgentError(f"no central bank issues {currency}")
    return cb


def bank_of(
    g: BalanceGraph,
    agent_id: AgentId,
    currency: Optional[CurrencyId] = None,
    explicit: Optional[AgentId] = None,
) -> Agent:
    """Resolve the bank an agent transacts through.

    An explicit bank id wins; otherwise the bank holding the agent's
    oldest (lowest instrument id) deposit in the given currency.
    """
    if explicit is not None:
        return _require_kind(g.agent(explicit), AgentKind.BANK, "bank")
    candidates = [
        inst
        for inst in g.instruments.values()
        if inst.kind is InstrumentKind.DEPOSIT
        and inst.creditor == agent_id
        and g.agents[inst.debtor].kind is AgentKind.BANK
        and (currency is None or inst.currency == currency)
    ]
    if not candidates:
        raise NoBankError(f"agent {agent_id} has no bank deposit to transact through")
    return g.agents[min(candidates, key=lambda i: i.id).debtor]


# ----------------------------------------------------------------------
# commodity side
# ----------------------------------------------------------------------

def mint_commodity(g: BalanceGraph, agent: AgentId, commodity: CommodityId, qty: int) -> None:
    """Exogenous endowment (mining); the only source of new commodity supply."""
    _positive(qty, "qty")
    g.agent(agent)
    _apply(g, "mint_commodity", {"agent": agent, "commodity": commodity, "qty": qty},
           [CommodityDelta(agent, commodity, qty)])


def transfer_commodity(g: BalanceGraph, src: AgentId, dst: AgentId, commodity: CommodityId, qty: int) -> None:
    _positive(qty, "qty")
    if g.holding(src, commodity) < qty:
        raise InsufficientCommodityError(
            f"agent {src} holds {g.holding(src, commodity)} {commodity}, needs {qty}"
        )
    g.agent(dst)
    _apply(g, "transfer_commodity", {"from": src, "to": dst, "commodity": commodity, "qty": qty},
           [CommodityDelta(src, commodity, -qty), CommodityDelta(dst, commodity, qty)])


# ----------------------------------------------------------------------
# convertible issuance
# ----------------------------------------------------------------------

def issue_convertible_note(
    g: BalanceGraph,
    issuer: AgentId,
    holder: AgentId,
    amount: int,
    currency: CurrencyId,
    backing: str,
    rate: Fraction,
) -> InstrumentId:
    """Issue a note redeemable into ``backing`` at ``rate`` per note unit."""
    _positive(amount)
    if g.regime.kind is not RegimeKind.CONVERTIBLE:
        raise RegimeViolationError("convertible notes can only be issued in a convertible regime")
    g.agent(issuer)
    g.agent(holder)
    rate = Fraction(rate)
    red = Redemption(target=backing, rate=rate)
    if g.regime.full_backing:
        promised = sum(
            (i.amount * i.redemption.rate
             for i in g.instruments.values()
             if i.kind is InstrumentKind.CONVERTIBLE_NOTE
             and i.debtor == issuer and i.redemption.target == backing),
            Fraction(0),
        )
        if backing in g.commodities:
            have = Fraction(g.holding(issuer, backing))
        else:
            have = Fraction(sum(
                i.amount for i in g.instruments.values()
                if i.creditor == issuer and i.currency == backing
            ))
        if promised + amount * rate > have:
            raise InsufficientBackingError(
                f"free backing {have - promised} of {backing} cannot cover {amount * rate}"
            )
    _apply(g, "issue_convertible_note",
           {"issuer": issuer, "holder": holder, "amount": amount, "currency": currency,
            "backing": backing, "rate": format_rational(rate)},
           [EdgeDelta(InstrumentKind.CONVERTIBLE_NOTE, issuer, holder, currency, amount, red)])
    return g.instrument_by_key(InstrumentKind.CONVERTIBLE_NOTE, issuer, holder, currency, red).id


# ----------------------------------------------------------------------
# bank credit
# ----------------------------------------------------------------------

def create_loan(
    g: BalanceGraph, bank: AgentId, borrower: AgentId, amount: int, currency: CurrencyId
) -> tuple[InstrumentId, InstrumentId]:
    """Endogenous money creation: a loan and a matching deposit appear in one
    rewrite; nobody's net worth moves, broad money grows by ``amount``."""
    _positive(amount)
    if not g.regime.allows_credit:
        raise RegimeViolationError("bank credit is incompatible with this regime")
    _require_kind(g.agent(bank), AgentKind.BANK, "lender")
    _require_retail(g.agent(borrower), "borrower")
    _apply(g, "create_loan",
           {"bank": bank, "borrower": borrower, "amount": amount, "currency": currency},
           [
               EdgeDelta(InstrumentKind.LOAN, borrower, bank, currency, amount),
               EdgeDelta(InstrumentKind.DEPOSIT, bank, borrower, currency, amount),
           ])
    loan_id = g.instrument_by_key(InstrumentKind.LOAN, borrower, bank, currency).id
    deposit_id = g.instrument_by_key(InstrumentKind.DEPOSIT, bank, borrower, currency).id
    return loan_id, deposit_id


def repay_loan(g: BalanceGraph, loan_id: InstrumentId, amount: int) -> None:
    """Destruction side of endogenous money: loan and deposit shrink together.
    The deposit must sit at the lending bank."""
    _positive(amount)
    loan = g.instrument(loan_id)
    if loan.kind is not InstrumentKind.LOAN:
        raise UnknownInstrumentError(f"instrument {loan_id} is a {loan.kind.value}, not a loan")
    if amount > loan.amount:
        raise ExceedsLoanError(f"repaying {amount} of a {loan.amount} loan")
    bank, borrower, currency = loan.creditor, loan.debtor, loan.currency
    deposit = g.edge_amount(InstrumentKind.DEPOSIT, bank, borrower, currency)
    if deposit < amount:
        raise InsufficientDepositError(
            f"borrower {borrower} holds {deposit} at the lending bank, needs {amount}"
        )
    _apply(g, "repay_loan", {"loan": loan_id, "amount": amount},
           [
               EdgeDelta(InstrumentKind.LOAN, borrower, bank, currency, -amount),
               EdgeDelta(InstrumentKind.DEPOSIT, bank, borrower, currency, -amount),
           ])


# ----------------------------------------------------------------------
# payments
# ----------------------------------------------------------------------

def pay_deposit(
    g: BalanceGraph,
    payer: AgentId,
    payee: AgentId,
    amount: int,
    currency: CurrencyId,
    *,
    payer_bank: Optional[AgentId] = None,
    payee_bank: Optional[AgentId] = None,
) -> None:
    """Deposit transfer. Across banks the paying bank settles in reserves;
    with ``cb_intraday_credit`` set on the graph, a reserve shortfall is
    covered by an automatic central-bank loan inside the same rewrite."""
    _positive(amount)
    _require_retail(g.agent(payer), "payer")
    _require_retail(g.agent(payee), "payee")
    pb = bank_of(g, payer, currency, payer_bank)
    have = g.edge_amount(InstrumentKind.DEPOSIT, pb.id, payer, currency)
    if have < amount:
        raise InsufficientDepositError(f"payer {payer} holds {have} at bank {pb.id}, needs {amount}")
    try:
        qb = bank_of(g, payee, currency, payee_bank)
    except NoBankError:
        qb = pb  # a payee without an account is paid into one at the payer's bank
    params = {"payer": payer, "payee": payee, "amount": amount, "currency": currency,
              "payer_bank": pb.id, "payee_bank": qb.id}
    deltas = [
        EdgeDelta(InstrumentKind.DEPOSIT, pb.id, payer, currency, -amount),
        EdgeDelta(InstrumentKind.DEPOSIT, qb.id, payee, currency, amount),
    ]
    if pb.id != qb.id:
        cb = _central_bank(g, currency)
        reserves = g.edge_amount(InstrumentKind.RESERVE, cb.id, pb.id, currency)
        if reserves < amount:
            if not g.cb_intraday_credit:
                raise InsufficientReservesError(
                    f"bank {pb.id} holds {reserves} reserves, needs {amount}"
                )
            shortfall = amount - reserves
            deltas.append(EdgeDelta(InstrumentKind.LOAN, pb.id, cb.id, currency, shortfall))
            deltas.append(EdgeDelta(InstrumentKind.RESERVE, cb.id, pb.id, currency, shortfall))
        deltas.append(EdgeDelta(InstrumentKind.RESERVE, cb.id, pb.id, currency, -amount))
        deltas.append(EdgeDelta(InstrumentKind.RESERVE, cb.id, qb.id, currency, amount))
    _apply(g, "pay_deposit", params, deltas)


def withdraw_cash(
    g: BalanceGraph,
    holder: AgentId,
    amount: int,
    currency: Optional[CurrencyId] = None,
    *,
    bank: Optional[AgentId] = None,
) -> None:
    """Swap deposit for banknotes; the bank pays out reserves."""
    _positive(amount)
    _require_retail(g.agent(holder), "holder")
    if currency is None:
        deposits = [
            i for i in sorted(g.instruments.values(), key=lambda i: i.id)
            if i.kind is InstrumentKind.DEPOSIT and i.creditor == holder
            and (bank is None or i.debtor == bank)
            and g.agents[i.debtor].kind is AgentKind.BANK
        ]
        if not deposits:
            raise InsufficientDepositError(f"holder {holder} has no bank deposit")
        currency = deposits[0].currency
    b = bank_of(g, holder, currency, bank)
    have = g.edge_amount(InstrumentKind.DEPOSIT, b.id, holder, currency)
    if have < amount:
        raise InsufficientDepositError(f"holder {holder} holds {have} at bank {b.id}, needs {amount}")
    cb = _central_bank(g, currency)
    reserves = g.edge_amount(InstrumentKind.RESERVE, cb.id, b.id, currency)
    if reserves < amount:
        raise InsufficientReservesError(f"bank {b.id} holds {reserves} reserves, needs {amount}")
    _apply(g, "withdraw_cash", {"holder": holder, "amount": amount, "currency": currency, "bank": b.id},
           [
               EdgeDelta(InstrumentKind.DEPOSIT, b.id, holder, currency, -amount),
               EdgeDelta(InstrumentKind.RESERVE, cb.id, b.id, currency, -amount),
               EdgeDelta(InstrumentKind.NOTE, cb.id, holder, currency, amount),
           ])


def deposit_cash(
    g: BalanceGraph,
    holder: AgentId,
    amount: int,
    currency: Optional[CurrencyId] = None,
    *,
    bank: Optional[AgentId] = None,
) -> None:
    """Inverse of withdraw_cash: notes turn back into a deposit plus reserves."""
    _positive(amount)
    _require_retail(g.agent(holder), "holder")
    if currency is None:
        notes = [
            i for i in sorted(g.instruments.values(), key=lambda i: i.id)
            if i.kind is InstrumentKind.NOTE and i.creditor == holder
        ]
        if not notes:
            raise InsufficientNotesError(f"holder {holder} has no notes")
        currency = notes[0].currency
    cb = _central_bank(g, currency)
    have = g.edge_amount(InstrumentKind.NOTE, cb.id, holder, currency)
    if have < amount:
        raise InsufficientNotesError(f"holder {holder} holds {have} notes, needs {amount}")
    try:
        b = bank_of(g, holder, currency, bank)
    except NoBankError:
        raise NoBankError(f"holder {holder} needs a bank account to deposit cash") from None
    _apply(g, "deposit_cash", {"holder": holder, "amount": amount, "currency": currency, "bank": b.id},
           [
               EdgeDelta(InstrumentKind.NOTE, cb.id, holder, currency, -amount),
               EdgeDelta(InstrumentKind.DEPOSIT, b.id, holder, currency, amount),
               EdgeDelta(InstrumentKind.RESERVE, cb.id, b.id, currency, amount),
           ])


# ----------------------------------------------------------------------
# government
# ----------------------------------------------------------------------

def _treasury_credit(g: BalanceGraph, cb: Agent, treasury: AgentId,
                     currency: CurrencyId, amount: int) -> list:
    """Deltas crediting the treasury: receipts retire any outstanding
    overdraft loan first, then top up the account. Keeps spend/tax exact
    inverses even across an overdraft episode."""
    outstanding = g.edge_amount(InstrumentKind.LOAN, treasury, cb.id, currency)
    repay = min(outstanding, amount)
    deltas: list = []
    if repay:
        deltas.append(EdgeDelta(InstrumentKind.LOAN, treasury, cb.id, currency, -repay))
    if amount - repay:
        deltas.append(EdgeDelta(InstrumentKind.DEPOSIT, cb.id, treasury, currency, amount - repay))
    return deltas


def cb_open_market_purchase(
    g: BalanceGraph, cb: AgentId, counterparty_bank: AgentId, bond_id: InstrumentId, amount: int
) -> None:
    """Asset swap: part of a bond's creditor position moves to the central
    bank against newly credited reserves. Base money grows; net money does not."""
    _positive(amount)
    bank = _require_kind(g.agent(counterparty_bank), AgentKind.BANK, "counterparty")
    cb_agent = _require_kind(g.agent(cb), AgentKind.CENTRAL_BANK, "buyer")
    bond = g.instrument(bond_id)
    if bond.kind is not InstrumentKind.BOND:
        raise UnknownInstrumentError(f"instrument {bond_id} is a {bond.kind.value}, not a bond")
    if bond.creditor != counterparty_bank or bond.amount < amount:
        raise InsufficientBondError(
            f"bank {counterparty_bank} holds {bond.amount if bond.creditor == counterparty_bank else 0} "
            f"of bond {bond_id}, needs {amount}"
        )
    if cb_agent.currency != bond.currency:
        raise CurrencyMismatchError(f"bond is in {bond.currency}, central bank issues {cb_agent.currency}")
    currency = bond.currency
    _apply(g, "cb_open_market_purchase",
           {"cb": cb, "bank": counterparty_bank, "bond": bond_id, "amount": amount},
           [
               EdgeDelta(InstrumentKind.BOND, bond.debtor, counterparty_bank, currency, -amount),
               EdgeDelta(InstrumentKind.BOND, bond.debtor, cb, currency, amount),
               EdgeDelta(InstrumentKind.RESERVE, cb, counterparty_bank, currency, amount),
           ])


def treasury_issue_bond(
    g: BalanceGraph, treasury: AgentId, buyer_bank: AgentId, amount: int
) -> InstrumentId:
    """Bond sale to a bank: reserves drain into the treasury's account at the
    central bank. Net money is unchanged."""
    _positive(amount)
    t = _require_kind(g.agent(treasury), AgentKind.TREASURY, "issuer")
    _require_kind(g.agent(buyer_bank), AgentKind.BANK, "buyer")
    currency = t.currency
    cb = _central_bank(g, currency)
    reserves = g.edge_amount(InstrumentKind.RESERVE, cb.id, buyer_bank, currency)
    if reserves < amount:
        raise InsufficientReservesError(f"bank {buyer_bank} holds {reserves} reserves, needs {amount}")
    _apply(g, "treasury_issue_bond", {"treasury": treasury, "bank": buyer_bank, "amount": amount},
           [
               EdgeDelta(InstrumentKind.RESERVE, cb.id, buyer_bank, currency, -amount),
               EdgeDelta(InstrumentKind.BOND, treasury, buyer_bank, currency, amount),
               *(_treasury_credit(g, cb, treasury, currency, amount)),
           ])
    return g.instrument_by_key(InstrumentKind.BOND, treasury, buyer_bank, currency).id


def treasury_spend(
    g: BalanceGraph,
    treasury: AgentId,
    recipient: AgentId,
    amount: int,
    *,
    recipient_bank: Optional[AgentId] = None,
) -> None:
    """Government spending: the one operation (with tax) that moves net money.
    The recipient's bank is credited reserves and the recipient a deposit."""
    _positive(amount)
    t = _require_kind(g.agent(treasury), AgentKind.TREASURY, "spender")
    _require_retail(g.agent(recipient), "recipient")
    currency = t.currency
    cb = _central_bank(g, currency)
    balance = g.edge_amount(InstrumentKind.DEPOSIT, cb.id, treasury, currency)
    deltas = []
    if balance < amount:
        if not g.treasury_overdraft:
            raise InsufficientTreasuryBalanceError(
                f"treasury balance {balance} cannot cover {amount}"
            )
        # Overdraft: the central bank lends the treasury the shortfall.
        shortfall = amount - balance
        deltas.append(EdgeDelta(InstrumentKind.LOAN, treasury, cb.id, currency, shortfall))
        deltas.append(EdgeDelta(InstrumentKind.DEPOSIT, cb.id, treasury, currency, shortfall))
    rb = bank_of(g, recipient, currency, recipient_bank)
    deltas.extend([
        EdgeDelta(InstrumentKind.DEPOSIT, cb.id, treasury, currency, -amount),
        EdgeDelta(InstrumentKind.RESERVE, cb.id, rb.id, currency, amount),
        EdgeDelta(InstrumentKind.DEPOSIT, rb.id, recipient, currency, amount),
    ])
    _apply(g, "treasury_spend",
           {"treasury": treasury, "recipient": recipient, "amount": amount, "recipient_bank": rb.id},
           deltas)


def tax(
    g: BalanceGraph,
    treasury: AgentId,
    payer: AgentId,
    amount: int,
    *,
    payer_bank: Optional[AgentId] = None,
) -> None:
    """Exact inverse of treasury_spend."""
    _positive(amount)
    t = _require_kind(g.agent(treasury), AgentKind.TREASURY, "collector")
    _require_retail(g.agent(payer), "payer")
    currency = t.currency
    cb = _central_bank(g, currency)
    pb = bank_of(g, payer, currency, payer_bank)
    have = g.edge_amount(InstrumentKind.DEPOSIT, pb.id, payer, currency)
    if have < amount:
        raise InsufficientDepositError(f"payer {payer} holds {have} at bank {pb.id}, needs {amount}")
    reserves = g.edge_amount(InstrumentKind.RESERVE, cb.id, pb.id, currency)
    if reserves < amount:
        raise InsufficientReservesError(f"bank {pb.id} holds {reserves} reserves, needs {amount}")
    _apply(g, "tax", {"treasury": treasury, "payer": payer, "amount": amount, "payer_bank": pb.id},
           [
               EdgeDelta(InstrumentKind.DEPOSIT, pb.id, payer, currency, -amount),
               EdgeDelta(InstrumentKind.RESERVE, cb.id, pb.id, currency, -amount),
               *(_treasury_credit(g, cb, treasury, currency, amount)),
           ])


# ----------------------------------------------------------------------
# whole-graph transforms
# ----------------------------------------------------------------------

def _merge_agents(g: BalanceGraph, keep: AgentId, absorb: set[AgentId]) -> BalanceGraph:
    """Return a new graph with ``absorb`` merged into ``keep``.

    Edges strictly inside the merged set cancel (a claim on oneself is void);
    edges crossing the boundary re-attach to ``keep``, summing with any
    existing edge of the same canonical key (the surviving edge keeps the
    smaller id). Commodity holdings add up.
    """
    merged = absorb | {keep}
    out = g.copy()
    holdings: dict[str, int] = dict(out.agents[keep].commodities)
    for aid in absorb:
        for c, q in out.agents[aid].commodities.items():
            holdings[c] = holdings.get(c, 0) + q
    by_key: dict[tuple, Instrument] = {}
    for inst in sorted(out.instruments.values(), key=lambda i: i.id):
        d = keep if inst.debtor in merged else inst.debtor
        c = keep if inst.creditor in merged else inst.creditor
        if d == c:
            continue  # intra-set claim cancels
        key = (inst.kind, d, c, inst.currency, inst.redemption)
        prior = by_key.get(key)
        if prior is None:
            by_key[key] = replace(inst, debtor=d, creditor=c)
        else:
            by_key[key] = replace(prior, amount=prior.amount + inst.amount)
    out.instruments = {inst.id: inst for inst in by_key.values()}
    out._by_key = {key: inst.id for key, inst in by_key.items()}
    out.agents = {aid: a for aid, a in out.agents.items() if aid not in absorb}
    out.agents[keep] = replace(out.agents[keep], commodities=holdings)
    positions: dict[tuple, int] = {}
    for inst in out.instruments.values():
        for aid, sign in ((inst.creditor, inst.amount), (inst.debtor, -inst.amount)):
            pk = (aid, inst.currency)
            val = positions.get(pk, 0) + sign
            if val:
                positions[pk] = val
            else:
                positions.pop(pk, None)
    out._positions = positions
    return out


def consolidate(g: BalanceGraph, cb: AgentId, treasury: AgentId) -> BalanceGraph:
    """Merge the central bank and the treasury into one government node.

    Claims between them (the treasury's account, bonds the central bank
    holds) vanish; every other agent's balance sheet is untouched, and so is
    net money: the split between the two government bodies was bookkeeping.
    Returns a new graph; the input is not modified.
    """
    if cb not in g.agents or treasury not in g.agents:
        raise MissingAgentError("both the central bank and the treasury must exist")
    cba = _require_kind(g.agents[cb], AgentKind.CENTRAL_BANK, "cb")
    ta = _require_kind(g.agents[treasury], AgentKind.TREASURY, "treasury")
    if cba.currency != ta.currency:
        raise CurrencyMismatchError(f"{cba.currency} central bank cannot absorb a {ta.currency} treasury")
    return _merge_agents(g, cb, {treasury})


def aggregate_sector(g: BalanceGraph, kind: AgentKind) -> BalanceGraph:
    """Merge every agent of one kind into a single sector node; intra-sector
    claims cancel. Measures over other sectors are unchanged."""
    kind = AgentKind(kind)
    members = sorted(a.id for a in g.agents.values() if a.kind is kind)
    if not members:
        raise MissingAgentError(f"no agent of kind {kind.value}")
    keep, rest = members[0], set(members[1:])
    if kind in (AgentKind.CENTRAL_BANK, AgentKind.TREASURY) and rest:
        raise KindMismatchError(f"cannot merge {kind.value} nodes across currencies")
    return _merge_agents(g, keep, rest)
