"""JSON-over-HTTP session service.

A thin adapter over the engine: every endpoint maps 1:1 onto an engine call
with identical semantics, so a request sequence and the equivalent direct
calls produce byte-identical snapshots. Sessions are in-memory; persistence
is snapshot download (GET state) and upload (POST /sessions with a snapshot).

Error mapping: engine errors -> 422 {code, message}; unknown session -> 404;
malformed request body -> 400. Requests against one session are serialized;
distinct sessions are independent.
"""

from __future__ import annotations

import threading
import uuid
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import measures as measures_mod
from . import ops as ops_mod
from . import pegsim as pegsim_mod
from .errors import (
    EngineError,
    KindMismatchError,
    NothingToRedoError,
    NothingToUndoError,
    UnknownOperationError,
)
from .ledger import (
    AgentKind,
    BalanceGraph,
    Regime,
    RegimeKind,
    load_snapshot,
    new_graph,
    parse_rational,
)

UNDO_LIMIT = 256


@dataclass
class Session:
    id: str
    graph: BalanceGraph
    undo: deque = field(default_factory=lambda: deque(maxlen=UNDO_LIMIT))
    redo: list = field(default_factory=list)
    lock: threading.RLock = field(default_factory=threading.RLock)
    ops_applied: int = 0


class SessionRegistry:
    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, graph: BalanceGraph) -> Session:
        session = Session(id=uuid.uuid4().hex, graph=graph)
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Optional[Session]:
        with self._lock:
            return self._sessions.get(session_id)

    def drop(self, session_id: str) -> bool:
        with self._lock:
            return self._sessions.pop(session_id, None) is not None


def _int_param(params: dict, key: str) -> int:
    value = params.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise KindMismatchError(f"parameter {key!r} must be an integer, got {value!r}")
    return value


def _str_param(params: dict, key: str) -> str:
    value = params.get(key)
    if not isinstance(value, str) or not value:
        raise KindMismatchError(f"parameter {key!r} must be a nonempty string, got {value!r}")
    return value


def _opt_int(params: dict, key: str) -> Optional[int]:
    return _int_param(params, key) if key in params and params[key] is not None else None


def apply_op(g: BalanceGraph, name: str, params: dict) -> tuple[BalanceGraph, dict]:
    """Dispatch one named operation; returns the (possibly new) graph and a
    result payload of created ids. Raises EngineError subclasses on failure."""
    result: dict = {}
    if name == "add_currency":
        g.add_currency(_str_param(params, "currency"))
    elif name == "add_commodity":
        g.add_commodity(_str_param(params, "commodity"))
    elif name == "add_agent":
        kind = AgentKind(_str_param(params, "kind"))
        issues = params.get("issues")
        label = params.get("label")
        result["agent"] = g.add_agent(kind, issues=issues, label=label)
    elif name == "mint_commodity":
        ops_mod.mint_commodity(g, _int_param(params, "agent"), _str_param(params, "commodity"),
                               _int_param(params, "qty"))
    elif name == "transfer_commodity":
        ops_mod.transfer_commodity(g, _int_param(params, "from"), _int_param(params, "to"),
                                   _str_param(params, "commodity"), _int_param(params, "qty"))
    elif name == "issue_convertible_note":
        result["note"] = ops_mod.issue_convertible_note(
            g, _int_param(params, "issuer"), _int_param(params, "holder"),
            _int_param(params, "amount"), _str_param(params, "currency"),
            _str_param(params, "backing"), parse_rational(_str_param(params, "rate")),
        )
    elif name == "create_loan":
        loan_id, deposit_id = ops_mod.create_loan(
            g, _int_param(params, "bank"), _int_param(params, "borrower"),
            _int_param(params, "amount"), _str_param(params, "currency"),
        )
        result["loan"] = loan_id
        result["deposit"] = deposit_id
    elif name == "repay_loan":
        ops_mod.repay_loan(g, _int_param(params, "loan"), _int_param(params, "amount"))
    elif name == "pay_deposit":
        ops_mod.pay_deposit(
            g, _int_param(params, "payer"), _int_param(params, "payee"),
            _int_param(params, "amount"), _str_param(params, "currency"),
            payer_bank=_opt_int(params, "payer_bank"), payee_bank=_opt_int(params, "payee_bank"),
        )
    elif name == "withdraw_cash":
        ops_mod.withdraw_cash(g, _int_param(params, "holder"), _int_param(params, "amount"),
                              params.get("currency"), bank=_opt_int(params, "bank"))
    elif name == "deposit_cash":
        ops_mod.deposit_cash(g, _int_param(params, "holder"), _int_param(params, "amount"),
                             params.get("currency"), bank=_opt_int(params, "bank"))
    elif name == "cb_open_market_purchase":
        ops_mod.cb_open_market_purchase(g, _int_param(params, "cb"), _int_param(params, "bank"),
                                        _int_param(params, "bond"), _int_param(params, "amount"))
    elif name == "treasury_issue_bond":
        result["bond"] = ops_mod.treasury_issue_bond(
            g, _int_param(params, "treasury"), _int_param(params, "bank"), _int_param(params, "amount"))
    elif name == "treasury_spend":
        ops_mod.treasury_spend(g, _int_param(params, "treasury"), _int_param(params, "recipient"),
                               _int_param(params, "amount"), recipient_bank=_opt_int(params, "recipient_bank"))
    elif name == "tax":
        ops_mod.tax(g, _int_param(params, "treasury"), _int_param(params, "payer"),
                    _int_param(params, "amount"), payer_bank=_opt_int(params, "payer_bank"))
    elif name == "consolidate":
        g = ops_mod.consolidate(g, _int_param(params, "cb"), _int_param(params, "treasury"))
        result["government"] = _int_param(params, "cb")
    elif name == "aggregate_sector":
        kind = AgentKind(_str_param(params, "kind"))
        g = ops_mod.aggregate_sector(g, kind)
        result["sector"] = min(a.id for a in g.agents.values() if a.kind is kind)
    elif name == "redeem":
        peg = pegsim_mod.PegConfig(
            domestic=_str_param(params, "currency"),
            reserve_asset=_str_param(params, "asset"),
            rate=parse_rational(_str_param(params, "rate")),
            initial_reserves=0,
        )
        pegsim_mod.redeem(g, _int_param(params, "holder"), _int_param(params, "amount"), peg)
    else:
        raise UnknownOperationError(f"unknown operation {name!r}")
    return g, result


def _measures_payload(g: BalanceGraph) -> list[dict]:
    return [r.to_json_dict() for r in measures_mod.all_reports(g)]


def create_app(registry: Optional[SessionRegistry] = None) -> FastAPI:
    app = FastAPI(title="moneygraph", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    sessions = registry if registry is not None else SessionRegistry()
    app.state.sessions = sessions

    @app.exception_handler(EngineError)
    async def engine_error_handler(_request: Request, exc: EngineError):
        return JSONResponse(status_code=422, content={"code": exc.code, "message": exc.message})

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"code": "ErrBadRequest", "message": str(exc)})

    class _NotFound(Exception):
        def __init__(self, session_id: str):
            self.session_id = session_id

    def require(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise _NotFound(session_id)
        return session

    @app.exception_handler(_NotFound)
    async def not_found_handler(_request: Request, exc: _NotFound):
        return JSONResponse(
            status_code=404,
            content={"code": "ErrUnknownSession", "message": f"no session {exc.session_id}"},
        )

    @app.post("/sessions")
    def create_session(body: dict):
        if "snapshot" in body:
            graph = load_snapshot(body["snapshot"])
        else:
            regime_spec = body.get("regime", {})
            if isinstance(regime_spec, str):
                regime_spec = {"kind": regime_spec}
            try:
                kind = RegimeKind(regime_spec.get("kind", "fiat"))
            except ValueError:
                raise KindMismatchError(f"unknown regime {regime_spec.get('kind')!r}") from None
            regime = Regime(kind, bool(regime_spec.get("full_backing", False)))
            config = body.get("config", {})
            graph = new_graph(
                regime,
                cb_intraday_credit=bool(config.get("cb_intraday_credit", False)),
                treasury_overdraft=bool(config.get("treasury_overdraft", False)),
            )
        session = sessions.create(graph)
        return {"id": session.id}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        session = require(session_id)
        with session.lock:
            return session.graph.snapshot()

    @app.get("/sessions/{session_id}/measures")
    def get_measures(session_id: str):
        session = require(session_id)
        with session.lock:
            return _measures_payload(session.graph)

    @app.get("/sessions/{session_id}/dot")
    def get_dot(session_id: str):
        session = require(session_id)
        with session.lock:
            return PlainTextResponse(measures_mod.export_dot(session.graph))

    @app.get("/sessions/{session_id}/sheets")
    def get_sheets(session_id: str):
        """Engine-computed balance sheets for every agent and unit in use, so
        clients can render net worth without doing ledger arithmetic."""
        session = require(session_id)
        with session.lock:
            g = session.graph
            units = sorted(g.currencies | g.commodities)
            out = []
            for agent_id in sorted(g.agents):
                for unit in units:
                    sheet = g.balance_sheet(agent_id, unit)
                    if sheet.assets or sheet.liabilities:
                        out.append(sheet.to_json_dict())
            return out

    @app.get("/sessions/{session_id}/history")
    def get_history(session_id: str):
        session = require(session_id)
        with session.lock:
            return {
                "ops_applied": session.ops_applied,
                "undo_depth": len(session.undo),
                "redo_depth": len(session.redo),
                "log": [r.to_json_dict() for r in session.graph.log],
            }

    @app.post("/sessions/{session_id}/ops")
    def post_op(session_id: str, body: dict):
        session = require(session_id)
        name = body.get("name")
        params = body.get("params", {})
        if not isinstance(name, str) or not isinstance(params, dict):
            raise KindMismatchError("op body must be {name: str, params: object}")
        with session.lock:
            before = session.graph.snapshot_text()
            new_graph_obj, result = apply_op(session.graph, name, params)
            session.graph = new_graph_obj
            session.undo.append(before)
            session.redo.clear()
            session.ops_applied += 1
            return {"ok": True, "result": result, "measures": _measures_payload(session.graph)}

    @app.post("/sessions/{session_id}/undo")
    def post_undo(session_id: str):
        session = require(session_id)
        with session.lock:
            if not session.undo:
                raise NothingToUndoError("nothing to undo")
            session.redo.append(session.graph.snapshot_text())
            session.graph = load_snapshot(session.undo.pop())
            return {"ok": True, "measures": _measures_payload(session.graph)}

    @app.post("/sessions/{session_id}/redo")
    def post_redo(session_id: str):
        session = require(session_id)
        with session.lock:
            if not session.redo:
                raise NothingToRedoError("nothing to redo")
            session.undo.append(session.graph.snapshot_text())
            session.graph = load_snapshot(session.redo.pop())
            return {"ok": True, "measures": _measures_payload(session.graph)}

    @app.post("/sessions/{session_id}/fork")
    def post_fork(session_id: str):
        session = require(session_id)
        with session.lock:
            forked = sessions.create(load_snapshot(session.graph.snapshot()))
        return {"id": forked.id}

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        if not sessions.drop(session_id):
            raise _NotFound(session_id)
        return {"ok": True}

    frontend = Path(__file__).resolve().parents[2] / "frontend"
    if (frontend / "index.html").exists():
        app.mount("/ui", StaticFiles(directory=frontend, html=True), name="ui")

    return app


app = create_app()
