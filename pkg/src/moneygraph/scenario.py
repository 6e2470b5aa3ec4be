"""Line-oriented scenario DSL: parser, canonical printer, deterministic runner.

Grammar (one statement per line, full-line ``#`` comments, blank lines kept
as trivia):

    regime <fiat|commodity|convertible> [full_backing] [cb_intraday_credit] [treasury_overdraft]
    currency <ID>                  # uppercase
    commodity <ID>
    agent <name> kind=<central_bank|treasury|bank|nonbank|foreign> [issues=<CUR>]
    op <opname> key=value ...
    assert <measure> <==|>=|<=> <int>
    expect_error <opname> key=value ... error=<ErrCode>
    snapshot <path>
    dot <path>

Measures: ``broad_money``/``base_money``/``net_money`` (optionally
``(CUR)``) and ``net_worth(<agent>[,UNIT])``. Identifiers are
``[a-z_][a-z0-9_]*``; currencies and commodities are uppercase. Agent names,
currencies and commodities must be declared before use, so a parsed scenario
can only fail at run time for state-dependent reasons.

There is no control flow and no expression language: a scenario is a
replayable construction, and two runs of the same text produce byte-identical
traces and snapshots.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional

from . import measures as measures_mod
from . import ops as ops_mod
from . import pegsim as pegsim_mod
from .errors import (
    CODE_REGISTRY,
    AssertFailedError,
    EngineError,
    InsufficientBondError,
    InsufficientDepositError,
    ParseError,
    UnexpectedOutcomeError,
)
from .ledger import (
    AgentKind,
    BalanceGraph,
    InstrumentKind,
    Regime,
    new_graph,
    parse_rational,
)

_IDENT = re.compile(r"[a-z_][a-z0-9_]*\Z")
_UPPER = re.compile(r"[A-Z][A-Z0-9_]*\Z")
_UINT = re.compile(r"[0-9]+\Z")
_INT = re.compile(r"-?[0-9]+\Z")
_RATIONAL = re.compile(r"[0-9]+(/[0-9]+)?\Z")
_ERRCODE = re.compile(r"Err[A-Za-z]+\Z")
_MEASURE = re.compile(r"(broad_money|base_money|net_money)(\(([A-Z][A-Z0-9_]*)\))?\Z")
_NET_WORTH = re.compile(r"net_worth\(([a-z_][a-z0-9_]*)(,([A-Z][A-Z0-9_]*))?\)\Z")

_REGIME_WORDS = {"fiat": Regime.fiat, "commodity": Regime.pure_commodity, "convertible": Regime.convertible}
_REGIME_FLAGS = ("full_backing", "cb_intraday_credit", "treasury_overdraft")

# Parameter type tags: agent names resolve to ids at run time; everything
# else is validated during parsing.
OP_SPECS: dict[str, dict] = {
    "mint_commodity": {"required": {"agent": "agent", "commodity": "commodity", "qty": "uint"}, "optional": {}},
    "transfer_commodity": {"required": {"from": "agent", "to": "agent", "commodity": "commodity", "qty": "uint"}, "optional": {}},
    "issue_convertible_note": {
        "required": {"issuer": "agent", "holder": "agent", "amount": "uint", "backing": "unit", "rate": "rational"},
        "optional": {"currency": "currency"},
    },
    "create_loan": {"required": {"bank": "agent", "borrower": "agent", "amount": "uint"}, "optional": {"currency": "currency"}},
    "repay_loan": {"required": {"bank": "agent", "borrower": "agent", "amount": "uint"}, "optional": {"currency": "currency"}},
    "pay_deposit": {
        "required": {"payer": "agent", "payee": "agent", "amount": "uint"},
        "optional": {"currency": "currency", "payer_bank": "agent", "payee_bank": "agent"},
    },
    "withdraw_cash": {"required": {"holder": "agent", "amount": "uint"}, "optional": {"currency": "currency", "bank": "agent"}},
    "deposit_cash": {"required": {"holder": "agent", "amount": "uint"}, "optional": {"currency": "currency", "bank": "agent"}},
    "cb_open_market_purchase": {
        "required": {"cb": "agent", "bank": "agent", "treasury": "agent", "amount": "uint"},
        "optional": {"currency": "currency"},
    },
    "treasury_issue_bond": {"required": {"treasury": "agent", "bank": "agent", "amount": "uint"}, "optional": {}},
    "treasury_spend": {"required": {"treasury": "agent", "recipient": "agent", "amount": "uint"}, "optional": {"recipient_bank": "agent"}},
    "tax": {"required": {"treasury": "agent", "payer": "agent", "amount": "uint"}, "optional": {"payer_bank": "agent"}},
    "consolidate": {"required": {"cb": "agent", "treasury": "agent"}, "optional": {}},
    "aggregate_sector": {"required": {"kind": "kind"}, "optional": {}},
    "redeem": {"required": {"holder": "agent", "amount": "uint", "asset": "unit", "rate": "rational"}, "optional": {"currency": "currency"}},
}


@dataclass(frozen=True)
class Trivia:
    line: int
    text: str  # "" for blank lines, "# ..." for comments


@dataclass(frozen=True)
class RegimeDecl:
    line: int
    word: str
    flags: tuple


@dataclass(frozen=True)
class CurrencyDecl:
    line: int
    currency: str


@dataclass(frozen=True)
class CommodityDecl:
    line: int
    commodity: str


@dataclass(frozen=True)
class AgentDecl:
    line: int
    name: str
    kind: str
    issues: Optional[str]


@dataclass(frozen=True)
class OpStmt:
    line: int
    op: str
    args: tuple  # ((key, canonical value string), ...) in source order


@dataclass(frozen=True)
class ExpectErrorStmt:
    line: int
    op: str
    args: tuple
    error: str


@dataclass(frozen=True)
class AssertStmt:
    line: int
    measure: str  # broad_money | base_money | net_money | net_worth
    agent: Optional[str]
    unit: Optional[str]
    cmp: str
    value: int


@dataclass(frozen=True)
class SnapshotStmt:
    line: int
    path: str


@dataclass(frozen=True)
class DotStmt:
    line: int
    path: str


@dataclass(frozen=True)
class Scenario:
    statements: tuple

    @property
    def default_unit(self) -> Optional[str]:
        for s in self.statements:
            if isinstance(s, CurrencyDecl):
                return s.currency
        for s in self.statements:
            if isinstance(s, CommodityDecl):
                return s.commodity
        return None


def _tokens(line: str) -> list[tuple[str, int]]:
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]


class _Parser:
    def __init__(self) -> None:
        self.agents: dict[str, str] = {}  # name -> kind
        self.currencies: list[str] = []
        self.commodities: list[str] = []
        self.regime_seen = False

    def fail(self, line: int, col: int, msg: str) -> None:
        raise ParseError(line, col, msg)

    def parse(self, text: str) -> Scenario:
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()  # final newline is a terminator, not a blank statement
        statements = [self.parse_line(i + 1, raw) for i, raw in enumerate(lines)]
        return Scenario(statements=tuple(statements))

    def parse_line(self, lineno: int, raw: str):
        stripped = raw.strip()
        if stripped == "":
            return Trivia(lineno, "")
        if stripped.startswith("#"):
            return Trivia(lineno, stripped)
        toks = _tokens(raw)
        head, col = toks[0]
        rest = toks[1:]
        if head != "regime" and not self.regime_seen:
            self.fail(lineno, col, "the regime line must come first")
        if head == "regime":
            return self.parse_regime(lineno, col, rest)
        if head == "currency":
            return self.parse_unit_decl(lineno, col, rest, CurrencyDecl, self.currencies, "currency")
        if head == "commodity":
            return self.parse_unit_decl(lineno, col, rest, CommodityDecl, self.commodities, "commodity")
        if head == "agent":
            return self.parse_agent(lineno, col, rest)
        if head == "op":
            op, args = self.parse_op(lineno, col, rest, allow_error_key=False)
            return OpStmt(lineno, op, args)
        if head == "expect_error":
            op, args, err = self.parse_op(lineno, col, rest, allow_error_key=True)
            return ExpectErrorStmt(lineno, op, args, err)
        if head == "assert":
            return self.parse_assert(lineno, col, rest)
        if head in ("snapshot", "dot"):
            if len(rest) != 1:
                self.fail(lineno, col, f"{head} takes exactly one path")
            path, pcol = rest[0]
            if path.startswith("/") or ".." in path.split("/"):
                self.fail(lineno, pcol, "path must be relative and not escape the output directory")
            cls = SnapshotStmt if head == "snapshot" else DotStmt
            return cls(lineno, path)
        self.fail(lineno, col, f"unknown statement {head!r}")

    def parse_regime(self, lineno: int, col: int, rest: list):
        if self.regime_seen:
            self.fail(lineno, col, "duplicate regime line")
        if not rest:
            self.fail(lineno, col, "regime requires fiat, commodity or convertible")
        word, wcol = rest[0]
        if word not in _REGIME_WORDS:
            self.fail(lineno, wcol, f"unknown regime {word!r}")
        flags = []
        for tok, tcol in rest[1:]:
            if tok not in _REGIME_FLAGS:
                self.fail(lineno, tcol, f"unknown regime flag {tok!r}")
            if tok == "full_backing" and word != "convertible":
                self.fail(lineno, tcol, "full_backing applies only to convertible")
            if tok in flags:
                self.fail(lineno, tcol, f"duplicate flag {tok!r}")
            flags.append(tok)
        self.regime_seen = True
        return RegimeDecl(lineno, word, tuple(f for f in _REGIME_FLAGS if f in flags))

    def parse_unit_decl(self, lineno, col, rest, cls, registry: list, what: str):
        if len(rest) != 1:
            self.fail(lineno, col, f"{what} takes exactly one identifier")
        ident, icol = rest[0]
        if not _UPPER.match(ident):
            self.fail(lineno, icol, f"{what} id must be uppercase, got {ident!r}")
        if ident in self.currencies or ident in self.commodities:
            self.fail(lineno, icol, f"{ident} already declared")
        registry.append(ident)
        return cls(lineno, ident)

    def parse_agent(self, lineno: int, col: int, rest: list):
        if not rest:
            self.fail(lineno, col, "agent requires a name")
        name, ncol = rest[0]
        if not _IDENT.match(name):
            self.fail(lineno, ncol, f"bad agent name {name!r}")
        if name in self.agents:
            self.fail(lineno, ncol, f"agent {name} already declared")
        kind = None
        issues = None
        for tok, tcol in rest[1:]:
            key, eq, value = tok.partition("=")
            if not eq:
                self.fail(lineno, tcol, f"expected key=value, got {tok!r}")
            if key == "kind":
                try:
                    kind = AgentKind(value).value
                except ValueError:
                    self.fail(lineno, tcol, f"unknown kind {value!r}")
            elif key == "issues":
                if value not in self.currencies:
                    self.fail(lineno, tcol, f"currency {value} not declared")
                issues = value
            else:
                self.fail(lineno, tcol, f"unknown agent attribute {key!r}")
        if kind is None:
            self.fail(lineno, col, "agent requires kind=")
        if kind in ("central_bank", "treasury") and issues is None:
            self.fail(lineno, col, f"{kind} requires issues=<CUR>")
        if kind not in ("central_bank", "treasury") and issues is not None:
            self.fail(lineno, col, f"{kind} does not take issues=")
        self.agents[name] = kind
        return AgentDecl(lineno, name, kind, issues)

    def parse_op(self, lineno: int, col: int, rest: list, *, allow_error_key: bool):
        if not rest:
            self.fail(lineno, col, "missing operation name")
        op, ocol = rest[0]
        spec = OP_SPECS.get(op)
        if spec is None:
            self.fail(lineno, ocol, f"unknown operation {op!r}")
        args: list[tuple[str, str]] = []
        seen: set[str] = set()
        error_code = None
        for tok, tcol in rest[1:]:
            key, eq, value = tok.partition("=")
            if not eq:
                self.fail(lineno, tcol, f"expected key=value, got {tok!r}")
            if key == "error":
                if not allow_error_key:
                    self.fail(lineno, tcol, "error= is only valid in expect_error")
                if not _ERRCODE.match(value) or value not in CODE_REGISTRY:
                    self.fail(lineno, tcol, f"unknown error code {value!r}")
                error_code = value
                continue
            tag = spec["required"].get(key) or spec["optional"].get(key)
            if tag is None:
                self.fail(lineno, tcol, f"{op} does not take {key}=")
            if key in seen:
                self.fail(lineno, tcol, f"duplicate parameter {key}=")
            seen.add(key)
            args.append((key, self.check_value(lineno, tcol, tag, value)))
        missing = [k for k in spec["required"] if k not in seen]
        if missing:
            self.fail(lineno, col, f"{op} missing required parameter(s): {', '.join(missing)}")
        # With one declared currency it is the default; with several it must be
        # explicit. With none, the op reaches the engine and fails on state
        # (e.g. create_loan in a commodity regime fails on the regime itself).
        needs_currency = "currency" in spec["optional"] and "currency" not in seen
        if needs_currency and len(self.currencies) > 1:
            self.fail(lineno, col, f"{op} needs currency= when several currencies are declared")
        if allow_error_key:
            if error_code is None:
                self.fail(lineno, col, "expect_error requires error=<ErrCode>")
            return op, tuple(args), error_code
        return op, tuple(args)

    def check_value(self, lineno: int, col: int, tag: str, value: str) -> str:
        if tag == "agent":
            if value not in self.agents:
                self.fail(lineno, col, f"agent {value!r} not declared")
            return value
        if tag == "uint":
            if not _UINT.match(value):
                self.fail(lineno, col, f"expected unsigned integer, got {value!r}")
            return str(int(value))
        if tag == "currency":
            if value not in self.currencies:
                self.fail(lineno, col, f"currency {value} not declared")
            return value
        if tag == "commodity":
            if value not in self.commodities:
                self.fail(lineno, col, f"commodity {value} not declared")
            return value
        if tag == "unit":
            if value not in self.currencies and value not in self.commodities:
                self.fail(lineno, col, f"unit {value} not declared")
            return value
        if tag == "rational":
            if not _RATIONAL.match(value):
                self.fail(lineno, col, f"expected p/q, got {value!r}")
            r = parse_rational(value)
            if r <= 0:
                self.fail(lineno, col, "rate must be positive")
            return f"{r.numerator}/{r.denominator}"
        if tag == "kind":
            try:
                return AgentKind(value).value
            except ValueError:
                self.fail(lineno, col, f"unknown kind {value!r}")
        raise AssertionError(f"unhandled tag {tag}")

    def parse_assert(self, lineno: int, col: int, rest: list):
        if len(rest) != 3:
            self.fail(lineno, col, "assert takes: <measure> <==|>=|<=> <int>")
        (mtok, mcol), (ctok, ccol), (vtok, vcol) = rest
        m = _MEASURE.match(mtok)
        n = _NET_WORTH.match(mtok)
        if m:
            measure = m.group(1)
            agent = None
            unit = m.group(3)
            if unit is not None and unit not in self.currencies:
                self.fail(lineno, mcol, f"currency {unit} not declared")
            if unit is None and len(self.currencies) != 1:
                self.fail(lineno, mcol, f"{measure} needs an explicit (CUR) here")
        elif n:
            measure = "net_worth"
            agent = n.group(1)
            unit = n.group(3)
            if agent not in self.agents:
                self.fail(lineno, mcol, f"agent {agent!r} not declared")
            if unit is not None and unit not in self.currencies and unit not in self.commodities:
                self.fail(lineno, mcol, f"unit {unit} not declared")
            if unit is None and not (self.currencies or self.commodities):
                self.fail(lineno, mcol, "net_worth needs a declared unit")
        else:
            self.fail(lineno, mcol, f"unknown measure {mtok!r}")
        if ctok not in ("==", ">=", "<="):
            self.fail(lineno, ccol, f"comparator must be ==, >= or <=, got {ctok!r}")
        if not _INT.match(vtok):
            self.fail(lineno, vcol, f"expected integer, got {vtok!r}")
        return AssertStmt(lineno, measure, agent, unit, ctok, int(vtok))


def parse(text: str) -> Scenario:
    """Parse scenario text; the first error aborts with line and column."""
    return _Parser().parse(text)


def print_scenario(s: Scenario) -> str:
    """Canonical text: single spaces, canonical value spellings, trivia kept.
    ``parse(print_scenario(s)) == s``."""
    lines = []
    for st in s.statements:
        if isinstance(st, Trivia):
            lines.append(st.text)
        elif isinstance(st, RegimeDecl):
            lines.append(" ".join(["regime", st.word, *st.flags]))
        elif isinstance(st, CurrencyDecl):
            lines.append(f"currency {st.currency}")
        elif isinstance(st, CommodityDecl):
            lines.append(f"commodity {st.commodity}")
        elif isinstance(st, AgentDecl):
            parts = [f"agent {st.name} kind={st.kind}"]
            if st.issues:
                parts.append(f"issues={st.issues}")
            lines.append(" ".join(parts))
        elif isinstance(st, OpStmt):
            lines.append(" ".join(["op", st.op, *[f"{k}={v}" for k, v in st.args]]))
        elif isinstance(st, ExpectErrorStmt):
            lines.append(" ".join(["expect_error", st.op, *[f"{k}={v}" for k, v in st.args], f"error={st.error}"]))
        elif isinstance(st, AssertStmt):
            if st.measure == "net_worth":
                m = f"net_worth({st.agent},{st.unit})" if st.unit else f"net_worth({st.agent})"
            else:
                m = f"{st.measure}({st.unit})" if st.unit else st.measure
            lines.append(f"assert {m} {st.cmp} {st.value}")
        elif isinstance(st, SnapshotStmt):
            lines.append(f"snapshot {st.path}")
        elif isinstance(st, DotStmt):
            lines.append(f"dot {st.path}")
        else:
            raise AssertionError(f"unhandled statement {st!r}")
    return "".join(line + "\n" for line in lines)


# ----------------------------------------------------------------------
# runner
# ----------------------------------------------------------------------

@dataclass
class RunTrace:
    """Per-statement outcomes plus measure time-series and final snapshot.
    Deterministic: identical scenario text yields byte-identical traces."""

    ok: bool = True
    error: Optional[dict] = None  # {"line", "code", "message"}
    events: list = field(default_factory=list)
    series: list = field(default_factory=list)  # (step, currency, base, broad, net)
    artifacts: dict = field(default_factory=dict)  # path -> text
    final_snapshot: str = ""

    def to_jsonl(self) -> str:
        lines = [json.dumps(e, separators=(",", ":")) for e in self.events]
        tail = {"final": self.ok}
        if self.error:
            tail["error"] = self.error
        lines.append(json.dumps(tail, separators=(",", ":")))
        return "".join(line + "\n" for line in lines)

    def series_csv(self) -> str:
        rows = ["step,currency,base_money,broad_money,net_money"]
        for step, cur, base, broad, net in self.series:
            rows.append(f"{step},{cur},{base},{broad},{net}")
        return "".join(r + "\n" for r in rows)


class _Runner:
    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.trace = RunTrace()
        self.graph: Optional[BalanceGraph] = None
        self.names: dict[str, int] = {}
        self.step = 0

    def agent_id(self, name: str) -> int:
        return self.names[name]

    def run(self) -> RunTrace:
        for st in self.scenario.statements:
            if isinstance(st, Trivia):
                continue
            try:
                self.execute(st)
            except EngineError as e:
                # assertion failures keep their own code; anything else the
                # scenario did not declare is an unexpected outcome
                if isinstance(e, AssertFailedError):
                    code, inner = e.code, None
                elif isinstance(e, UnexpectedOutcomeError):
                    code, inner = e.code, e.code_seen
                else:
                    code, inner = "ErrUnexpected", e.code
                self.trace.ok = False
                self.trace.error = {"line": st.line, "code": code, "message": e.message}
                if inner is not None:
                    self.trace.error["inner"] = inner
                self.trace.events.append({"line": st.line, "status": "error", "code": code})
                break
        if self.graph is not None:
            self.trace.final_snapshot = self.graph.snapshot_text()
        return self.trace

    def execute(self, st) -> None:
        g = self.graph
        if isinstance(st, RegimeDecl):
            if st.word == "convertible":
                regime = Regime.convertible("full_backing" in st.flags)
            else:
                regime = _REGIME_WORDS[st.word]()
            self.graph = new_graph(
                regime,
                cb_intraday_credit="cb_intraday_credit" in st.flags,
                treasury_overdraft="treasury_overdraft" in st.flags,
            )
            self.ok_event(st, "regime")
            return
        assert g is not None  # the parser guarantees regime comes first
        if isinstance(st, CurrencyDecl):
            g.add_currency(st.currency)
            self.ok_event(st, "currency")
        elif isinstance(st, CommodityDecl):
            g.add_commodity(st.commodity)
            self.ok_event(st, "commodity")
        elif isinstance(st, AgentDecl):
            self.names[st.name] = g.add_agent(AgentKind(st.kind), issues=st.issues, label=st.name)
            self.ok_event(st, "agent")
        elif isinstance(st, OpStmt):
            self.run_op(st.op, dict(st.args))
            self.step += 1
            row_measures = self.emit_series()
            self.trace.events.append(
                {"line": st.line, "status": "ok", "op": st.op, "measures": row_measures}
            )
        elif isinstance(st, ExpectErrorStmt):
            before = self.graph.snapshot_text()
            try:
                self.run_op(st.op, dict(st.args))
            except EngineError as e:
                if e.code != st.error:
                    raise UnexpectedOutcomeError(st.line, e.code, f"expected {st.error}") from None
                if self.graph.snapshot_text() != before:
                    raise UnexpectedOutcomeError(st.line, e.code, "state changed despite error") from None
                self.trace.events.append({"line": st.line, "status": "ok", "expected_error": e.code})
                return
            raise UnexpectedOutcomeError(st.line, "ErrNone", f"expected {st.error}, op succeeded")
        elif isinstance(st, AssertStmt):
            actual = self.evaluate_measure(st)
            passed = {"==": actual == st.value, ">=": actual >= st.value, "<=": actual <= st.value}[st.cmp]
            if not passed:
                raise AssertFailedError(st.line, f"{st.cmp} {st.value}", str(actual))
            self.trace.events.append({"line": st.line, "status": "ok", "assert": actual})
        elif isinstance(st, SnapshotStmt):
            self.trace.artifacts[st.path] = self.graph.snapshot_text()
            self.ok_event(st, "snapshot")
        elif isinstance(st, DotStmt):
            self.trace.artifacts[st.path] = measures_mod.export_dot(self.graph)
            self.ok_event(st, "dot")
        else:
            raise AssertionError(f"unhandled statement {st!r}")

    def ok_event(self, st, kind: str) -> None:
        self.trace.events.append({"line": st.line, "status": "ok", "stmt": kind})

    def emit_series(self) -> dict:
        out = {}
        for cur in sorted(self.graph.currencies):
            base = measures_mod.base_money(self.graph, cur)
            broad = measures_mod.broad_money(self.graph, cur)
            net = measures_mod.net_money(self.graph, cur)
            self.trace.series.append((self.step, cur, base, broad, net))
            out[cur] = {"base": str(base), "broad": str(broad), "net": str(net)}
        return out

    def default_currency(self) -> str:
        return sorted(self.graph.currencies)[0] if self.graph.currencies else ""

    def evaluate_measure(self, st: AssertStmt) -> int:
        g = self.graph
        if st.measure == "net_worth":
            unit = st.unit or self.scenario.default_unit
            return g.balance_sheet(self.agent_id(st.agent), unit).net_worth
        unit = st.unit or self.default_currency()
        fn = {"broad_money": measures_mod.broad_money, "base_money": measures_mod.base_money,
              "net_money": measures_mod.net_money}[st.measure]
        return fn(g, unit)

    def resolve_loan(self, bank: int, borrower: int, currency: str) -> int:
        inst = self.graph.instrument_by_key(InstrumentKind.LOAN, borrower, bank, currency)
        if inst is None:
            raise InsufficientDepositError(f"no loan from bank {bank} to borrower {borrower}")
        return inst.id

    def resolve_bond(self, treasury: int, bank: int, currency: str) -> int:
        inst = self.graph.instrument_by_key(InstrumentKind.BOND, treasury, bank, currency)
        if inst is None:
            raise InsufficientBondError(f"bank {bank} holds no bond issued by {treasury}")
        return inst.id

    def run_op(self, op: str, args: dict) -> None:
        g = self.graph
        a = self.agent_id
        cur = args.get("currency") or self.default_currency()
        if op == "mint_commodity":
            ops_mod.mint_commodity(g, a(args["agent"]), args["commodity"], int(args["qty"]))
        elif op == "transfer_commodity":
            ops_mod.transfer_commodity(g, a(args["from"]), a(args["to"]), args["commodity"], int(args["qty"]))
        elif op == "issue_convertible_note":
            ops_mod.issue_convertible_note(
                g, a(args["issuer"]), a(args["holder"]), int(args["amount"]), cur,
                args["backing"], parse_rational(args["rate"]),
            )
        elif op == "create_loan":
            ops_mod.create_loan(g, a(args["bank"]), a(args["borrower"]), int(args["amount"]), cur)
        elif op == "repay_loan":
            loan_id = self.resolve_loan(a(args["bank"]), a(args["borrower"]), cur)
            ops_mod.repay_loan(g, loan_id, int(args["amount"]))
        elif op == "pay_deposit":
            ops_mod.pay_deposit(
                g, a(args["payer"]), a(args["payee"]), int(args["amount"]), cur,
                payer_bank=a(args["payer_bank"]) if "payer_bank" in args else None,
                payee_bank=a(args["payee_bank"]) if "payee_bank" in args else None,
            )
        elif op == "withdraw_cash":
            ops_mod.withdraw_cash(
                g, a(args["holder"]), int(args["amount"]), args.get("currency"),
                bank=a(args["bank"]) if "bank" in args else None,
            )
        elif op == "deposit_cash":
            ops_mod.deposit_cash(
                g, a(args["holder"]), int(args["amount"]), args.get("currency"),
                bank=a(args["bank"]) if "bank" in args else None,
            )
        elif op == "cb_open_market_purchase":
            bond_id = self.resolve_bond(a(args["treasury"]), a(args["bank"]), cur)
            ops_mod.cb_open_market_purchase(g, a(args["cb"]), a(args["bank"]), bond_id, int(args["amount"]))
        elif op == "treasury_issue_bond":
            ops_mod.treasury_issue_bond(g, a(args["treasury"]), a(args["bank"]), int(args["amount"]))
        elif op == "treasury_spend":
            ops_mod.treasury_spend(
                g, a(args["treasury"]), a(args["recipient"]), int(args["amount"]),
                recipient_bank=a(args["recipient_bank"]) if "recipient_bank" in args else None,
            )
        elif op == "tax":
            ops_mod.tax(
                g, a(args["treasury"]), a(args["payer"]), int(args["amount"]),
                payer_bank=a(args["payer_bank"]) if "payer_bank" in args else None,
            )
        elif op == "consolidate":
            merged = ops_mod.consolidate(g, a(args["cb"]), a(args["treasury"]))
            self.names = {n: i for n, i in self.names.items() if i in merged.agents}
            self.graph = merged
        elif op == "aggregate_sector":
            kind = AgentKind(args["kind"])
            members = {ag.id for ag in g.agents.values() if ag.kind is kind}
            merged = ops_mod.aggregate_sector(g, kind)
            keep = min(members)
            self.names = {n: (keep if i in members else i) for n, i in self.names.items()}
            self.graph = merged
        elif op == "redeem":
            peg = pegsim_mod.PegConfig(
                domestic=cur,
                reserve_asset=args["asset"],
                rate=parse_rational(args["rate"]),
                initial_reserves=0,
            )
            pegsim_mod.redeem(g, a(args["holder"]), int(args["amount"]), peg)
        else:
            raise AssertionError(f"unhandled op {op}")


def run(scenario: Scenario) -> RunTrace:
    """Execute a parsed scenario on a fresh graph."""
    return _Runner(scenario).run()
