"""Random valid-operation generator shared by fuzz and acceptance tests.

Every step applies one operation whose preconditions were checked against
the current state, so any engine error inside step() is a bug. The returned
(name, amount) pair feeds the delta-law checks.
"""

from __future__ import annotations

import random

from moneygraph import AgentKind, InstrumentKind, Regime, new_graph
from moneygraph import ops


class FiatWorld:
    """A 20-agent fiat economy: one central bank, one treasury, banks and
    households, with both config flags on so every operation is reachable."""

    def __init__(self, rng: random.Random, banks: int = 4, households: int = 14,
                 record_ops: bool = False):
        g = new_graph(Regime.fiat(), cb_intraday_credit=True, treasury_overdraft=True,
                      record_ops=record_ops)
        g.add_currency("DOM")
        g.add_commodity("GOLD")
        self.g = g
        self.rng = rng
        self.cb = g.add_agent(AgentKind.CENTRAL_BANK, "DOM", label="cb")
        self.tsy = g.add_agent(AgentKind.TREASURY, currency="DOM", label="tsy")
        self.banks = [g.add_agent(AgentKind.BANK, label=f"b{i}") for i in range(banks)]
        self.households = [g.add_agent(AgentKind.NONBANK, label=f"h{i}") for i in range(households)]
        self.home = {h: self.banks[i % len(self.banks)] for i, h in enumerate(self.households)}

    # -- state queries -------------------------------------------------

    def deposit(self, bank: int, holder: int) -> int:
        return self.g.edge_amount(InstrumentKind.DEPOSIT, bank, holder, "DOM")

    def reserves(self, bank: int) -> int:
        return self.g.edge_amount(InstrumentKind.RESERVE, self.cb, bank, "DOM")

    def notes(self, holder: int) -> int:
        return self.g.edge_amount(InstrumentKind.NOTE, self.cb, holder, "DOM")

    def loans(self) -> list:
        return [
            i for i in self.g.instruments.values()
            if i.kind is InstrumentKind.LOAN and i.debtor in self.home
        ]

    def bonds(self) -> list:
        return [
            i for i in self.g.instruments.values()
            if i.kind is InstrumentKind.BOND and i.debtor == self.tsy
            and self.g.agents[i.creditor].kind is AgentKind.BANK
        ]

    # -- candidate builders: return (name, amount, thunk) or None ------

    def _create_loan(self):
        h = self.rng.choice(self.households)
        a = self.rng.randint(1, 500)
        return "create_loan", a, lambda: ops.create_loan(self.g, self.home[h], h, a, "DOM")

    def _repay_loan(self):
        candidates = [
            lo for lo in self.loans()
            if min(lo.amount, self.deposit(lo.creditor, lo.debtor)) >= 1
        ]
        if not candidates:
            return None
        lo = self.rng.choice(candidates)
        a = self.rng.randint(1, min(lo.amount, self.deposit(lo.creditor, lo.debtor)))
        return "repay_loan", a, lambda: ops.repay_loan(self.g, lo.id, a)

    def _pay_deposit(self):
        payers = [h for h in self.households if self.deposit(self.home[h], h) >= 1]
        if not payers:
            return None
        payer = self.rng.choice(payers)
        payee = self.rng.choice([h for h in self.households if h != payer])
        a = self.rng.randint(1, self.deposit(self.home[payer], payer))
        return "pay_deposit", a, lambda: ops.pay_deposit(
            self.g, payer, payee, a, "DOM",
            payer_bank=self.home[payer], payee_bank=self.home[payee])

    def _withdraw_cash(self):
        candidates = [
            h for h in self.households
            if min(self.deposit(self.home[h], h), self.reserves(self.home[h])) >= 1
        ]
        if not candidates:
            return None
        h = self.rng.choice(candidates)
        a = self.rng.randint(1, min(self.deposit(self.home[h], h), self.reserves(self.home[h])))
        return "withdraw_cash", a, lambda: ops.withdraw_cash(self.g, h, a, "DOM", bank=self.home[h])

    def _deposit_cash(self):
        candidates = [h for h in self.households if self.notes(h) >= 1]
        if not candidates:
            return None
        h = self.rng.choice(candidates)
        a = self.rng.randint(1, self.notes(h))
        return "deposit_cash", a, lambda: ops.deposit_cash(self.g, h, a, "DOM", bank=self.home[h])

    def _treasury_spend(self):
        h = self.rng.choice(self.households)
        a = self.rng.randint(1, 400)
        return "treasury_spend", a, lambda: ops.treasury_spend(
            self.g, self.tsy, h, a, recipient_bank=self.home[h])

    def _tax(self):
        candidates = [
            h for h in self.households
            if min(self.deposit(self.home[h], h), self.reserves(self.home[h])) >= 1
        ]
        if not candidates:
            return None
        h = self.rng.choice(candidates)
        a = self.rng.randint(1, min(self.deposit(self.home[h], h), self.reserves(self.home[h])))
        return "tax", a, lambda: ops.tax(self.g, self.tsy, h, a, payer_bank=self.home[h])

    def _treasury_issue_bond(self):
        candidates = [b for b in self.banks if self.reserves(b) >= 1]
        if not candidates:
            return None
        b = self.rng.choice(candidates)
        a = self.rng.randint(1, self.reserves(b))
        return "treasury_issue_bond", a, lambda: ops.treasury_issue_bond(self.g, self.tsy, b, a)

    def _cb_open_market_purchase(self):
        candidates = self.bonds()
        if not candidates:
            return None
        bond = self.rng.choice(candidates)
        a = self.rng.randint(1, bond.amount)
        return "cb_open_market_purchase", a, lambda: ops.cb_open_market_purchase(
            self.g, self.cb, bond.creditor, bond.id, a)

    def _mint_commodity(self):
        who = self.rng.choice(self.households + self.banks)
        a = self.rng.randint(1, 50)
        return "mint_commodity", a, lambda: ops.mint_commodity(self.g, who, "GOLD", a)

    def _transfer_commodity(self):
        holders = [
            aid for aid in (self.households + self.banks)
            if self.g.holding(aid, "GOLD") >= 1
        ]
        if not holders:
            return None
        src = self.rng.choice(holders)
        dst = self.rng.choice([a for a in (self.households + self.banks) if a != src])
        a = self.rng.randint(1, self.g.holding(src, "GOLD"))
        return "transfer_commodity", a, lambda: ops.transfer_commodity(self.g, src, dst, "GOLD", a)

    # builders that grow the graph vs. ones that shrink or shuffle it
    GROW = ("_create_loan", "_treasury_spend", "_mint_commodity")
    OTHER = ("_repay_loan", "_pay_deposit", "_withdraw_cash", "_deposit_cash", "_tax",
             "_treasury_issue_bond", "_cb_open_market_purchase", "_transfer_commodity")

    def step(self) -> tuple[str, int]:
        """Apply one random valid operation; returns (op name, amount)."""
        crowded = len(self.g.instruments) > 60
        names = list(self.OTHER if crowded else self.GROW + self.OTHER)
        self.rng.shuffle(names)
        for name in names:
            built = getattr(self, name)()
            if built is not None:
                op_name, amount, thunk = built
                thunk()
                return op_name, amount
        # Always possible regardless of state.
        op_name, amount, thunk = self._treasury_spend()
        thunk()
        return op_name, amount
