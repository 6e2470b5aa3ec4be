"""Regenerate the recorded API walkthrough fixtures.

Run from the repository root with the Python package installed:

    python3 frontend/tools/capture_fixtures.py

The recorded request sequence mirrors the SessionStore protocol exactly:
every session creation, op attempt, undo and fork is followed by a
state/measures/sheets refresh, so the replay mock in the tests can assert
strict request-for-request equality.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from moneygraph.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


class Recorder:
    def __init__(self):
        self.client = TestClient(create_app())
        self.steps = []
        self.sid = None
        self.fork_id = None

    def call(self, method, path, body=None):
        if method == "GET":
            r = self.client.get(path)
        elif method == "DELETE":
            r = self.client.delete(path)
        else:
            r = self.client.post(path, json=body)
        self.steps.append({
            "request": {"method": method, "path": path, "body": body},
            "response": {"status": r.status_code, "body": r.json()},
        })
        return r.json()

    def refresh(self, sid):
        self.call("GET", f"/sessions/{sid}/state")
        self.call("GET", f"/sessions/{sid}/measures")
        self.call("GET", f"/sessions/{sid}/sheets")

    def create(self, body):
        self.sid = self.call("POST", "/sessions", body)["id"]
        self.refresh(self.sid)
        return self.sid

    def op(self, name, params, sid=None):
        sid = sid or self.sid
        self.call("POST", f"/sessions/{sid}/ops", {"name": name, "params": params})
        self.refresh(sid)

    def undo(self, sid=None):
        sid = sid or self.sid
        self.call("POST", f"/sessions/{sid}/undo")
        self.refresh(sid)

    def fork(self):
        self.fork_id = self.call("POST", f"/sessions/{self.sid}/fork")["id"]
        self.refresh(self.fork_id)
        return self.fork_id

    def save(self, name):
        FIXTURES.mkdir(parents=True, exist_ok=True)
        (FIXTURES / name).write_text(json.dumps(self.steps, indent=2) + "\n")
        print(name, len(self.steps), "steps")


def standard_agents(rec):
    rec.op("add_currency", {"currency": "DOM"})
    rec.op("add_agent", {"kind": "central_bank", "issues": "DOM", "label": "cb"})   # id 1
    rec.op("add_agent", {"kind": "treasury", "issues": "DOM", "label": "tsy"})      # id 2
    rec.op("add_agent", {"kind": "bank", "label": "b1"})                            # id 3
    rec.op("add_agent", {"kind": "nonbank", "label": "h1"})                         # id 4


def main():
    rec = Recorder()
    rec.create({"regime": {"kind": "fiat"}})
    standard_agents(rec)
    rec.op("create_loan", {"bank": 3, "borrower": 4, "amount": 100, "currency": "DOM"})
    rec.undo()
    rec.op("create_loan", {"bank": 3, "borrower": 4, "amount": 100, "currency": "DOM"})
    rec.save("walkthrough_loan.json")

    rec = Recorder()
    rec.create({"regime": {"kind": "fiat"}, "config": {"treasury_overdraft": True}})
    standard_agents(rec)
    rec.op("treasury_spend", {"treasury": 2, "recipient": 4, "amount": 100, "recipient_bank": 3})
    rec.save("walkthrough_spend.json")

    rec = Recorder()
    rec.create({"regime": {"kind": "fiat"}, "config": {"treasury_overdraft": True}})
    standard_agents(rec)
    rec.op("treasury_spend", {"treasury": 2, "recipient": 4, "amount": 100, "recipient_bank": 3})
    rec.op("treasury_issue_bond", {"treasury": 2, "bank": 3, "amount": 50})
    rec.op("cb_open_market_purchase", {"cb": 1, "bank": 3, "bond": 4, "amount": 20})
    fork = rec.fork()
    rec.op("consolidate", {"cb": 1, "treasury": 2}, sid=fork)
    rec.save("walkthrough_consolidation.json")

    rec = Recorder()
    rec.create({"regime": {"kind": "pure_commodity"}})
    rec.op("add_agent", {"kind": "bank", "label": "b"})
    rec.op("add_agent", {"kind": "nonbank", "label": "h"})
    rec.op("create_loan", {"bank": 1, "borrower": 2, "amount": 100, "currency": "DOM"})
    rec.save("walkthrough_commodity_reject.json")


if __name__ == "__main__":
    main()
