"""Session-scoped REST + WebSocket server around the orchestrator.

One turn in flight per session; events stream over the socket in order and
every turn ends with a final or error frame. Session state snapshots to
JSON after each turn when a persist directory is configured, so sessions
survive restarts.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import threading
import time
import uuid
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from . import bundled
from .agents import Workbench
from .errors import NetmedError, ProviderUnreachable
from .evalkit import EvalCase, score_run
from .orchestrator import STEP_BUDGET, SessionState, run_turn
from .provider import ChatMessage, HTTPProvider
from .research import RecordedSearchBackend


class RuleProvider:
    """Deterministic offline stand-in used when no model URL is configured.

    Routes planner prompts by keyword, emits minimal well-formed replies for
    the other prompt kinds. Good enough to exercise the full pipeline
    without a model server; not a language model.
    """

    def complete(self, messages, tools=None, temperature=0.0, max_tokens=None):
        system = messages[0].content if messages else ""
        user = messages[-1].content if messages else ""
        return ChatMessage("assistant", self._reply(system, user))

    def stream_complete(self, messages, tools=None, sink=None, **kw):
        msg = self.complete(messages, tools)
        if sink is not None and msg.content:
            sink(msg.content)
        return msg

    def _reply(self, system: str, user: str) -> str:
        lowered = user.lower()
        if system.startswith("You route a biomedical analysis session"):
            done = "Prior agent outputs:\n(none)" not in system
            if done:
                return "FINALIZE ->results gathered; ready to answer"
            if any(w in lowered for w in ("enrich", "coherence", "pathway")):
                return "CALL_DIGEST_TOOL ->coherence/enrichment requested"
            if any(w in lowered for w in ("diamond", "module", "trustrank",
                                          "closeness", "rank")):
                return "CALL_NEDREX_TOOL ->network tool requested"
            if any(w in lowered for w in ("literature", "paper", "publication")):
                return "FETCH_RESEARCH ->literature search requested"
            if any(w in lowered for w in ("hide", "color", "style", "legend")):
                return "ADJUST_NETWORK ->style change requested"
            return "FETCH_KG ->knowledge-graph lookup"
        if "three distinct" in system:
            base = user.splitlines()[0]
            return f"{base}\n{base} review\n{base} clinical trial"
        if system.startswith("Break the user question"):
            return json.dumps({"nodes": [{"type": "gene", "value": "",
                                          "subquestion": user,
                                          "needs_filter": False}],
                               "target": 0})
        if system.startswith("Write the final Markdown answer"):
            results = user.split("Results:\n", 1)[-1]
            return f"## Results\n\n{results}"
        return "Summary of the session so far."


class SessionEntry:
    def __init__(self, kg_name: str):
        self.id = uuid.uuid4().hex[:12]
        self.kg_name = kg_name
        self.state = SessionState()
        self.busy = threading.Lock()
        self.created = time.time()
        self.updated = self.created


def create_app(kg_dir=None, persist_dir=None, provider_factory=None,
               search_backend=None) -> FastAPI:
    app = FastAPI(title="network-medicine workbench")
    graph = bundled.load_sample_graph(kg_dir)
    annotations = bundled.load_annotations()
    graphs = {"sample": graph}
    sessions: dict[str, SessionEntry] = {}
    app.state.sessions = sessions
    persist = Path(persist_dir) if persist_dir else None
    if persist:
        persist.mkdir(parents=True, exist_ok=True)

    if provider_factory is None:
        def provider_factory():
            if os.environ.get("CHATD_MODEL_URL"):
                return HTTPProvider()
            return RuleProvider()

    providers: dict[str, object] = {}

    def workbench(entry: SessionEntry) -> Workbench:
        if entry.id not in providers:
            providers[entry.id] = provider_factory()
        return Workbench(graphs[entry.kg_name], annotations,
                         providers[entry.id], search_backend=search_backend)

    def snapshot(entry: SessionEntry):
        if not persist:
            return
        with open(persist / f"{entry.id}.json", "w", encoding="utf-8") as fh:
            json.dump({"session_id": entry.id, "kg": entry.kg_name,
                       "created": entry.created, "updated": entry.updated,
                       "state": entry.state.to_json()}, fh)

    def lookup(sid: str) -> SessionEntry | None:
        if sid in sessions:
            return sessions[sid]
        if persist and (persist / f"{sid}.json").exists():
            with open(persist / f"{sid}.json", encoding="utf-8") as fh:
                raw = json.load(fh)
            entry = SessionEntry(raw["kg"])
            entry.id = raw["session_id"]
            entry.created = raw["created"]
            entry.updated = raw["updated"]
            entry.state = SessionState.from_json(raw["state"])
            sessions[sid] = entry
            return entry
        return None

    @app.get("/healthz")
    def healthz():
        provider_ok = True
        if os.environ.get("CHATD_MODEL_URL"):
            try:
                HTTPProvider()
            except ProviderUnreachable:
                provider_ok = False
        return {"status": "ok", "kg_loaded": bool(graphs),
                "kg_stats": graph.stats(), "provider_configured": provider_ok}

    @app.post("/api/sessions")
    def create_session(body: dict | None = None):
        kg_name = (body or {}).get("kg", "sample")
        if kg_name not in graphs:
            return JSONResponse({"error": f"unknown KG {kg_name!r}"}, status_code=404)
        entry = SessionEntry(kg_name)
        sessions[entry.id] = entry
        snapshot(entry)
        return {"session_id": entry.id, "kg": kg_name,
                "steps_remaining": STEP_BUDGET}

    @app.get("/api/sessions/{sid}/network/{analysis_id}")
    def get_network(sid: str, analysis_id: str):
        entry = lookup(sid)
        if entry is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        art = entry.state.artifacts.get(analysis_id)
        if art is None or "network" not in art:
            return JSONResponse({"error": f"unknown analysis {analysis_id!r}"},
                                status_code=404)
        return art["network"]

    @app.post("/api/eval/run")
    def eval_run(body: dict):
        cases = [EvalCase(case_id=c["case_id"], question=c["question"],
                          agent=c["agent"], tool=c["tool"],
                          expected_action=c["expected_action"],
                          silver_records=c.get("silver_records", []))
                 for c in body.get("cases", [])]
        try:
            table = score_run(cases, body.get("transcripts", {}))
        except NetmedError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        return {"table": table.to_json(), "rendered": table.render()}

    @app.websocket("/ws/sessions/{sid}")
    async def session_socket(ws: WebSocket, sid: str):
        await ws.accept()
        entry = lookup(sid)
        if entry is None:
            await ws.send_json({"type": "error", "message": "unknown session"})
            await ws.close()
            return
        try:
            while True:
                frame = await ws.receive_json()
                if frame.get("type") != "user_message":
                    await ws.send_json({"type": "error",
                                        "message": "expected user_message frame"})
                    continue
                if not entry.busy.acquire(blocking=False):
                    await ws.send_json({"type": "error", "message": "session busy"})
                    continue
                try:
                    wb = workbench(entry)
                    _, entry.state, events = run_turn(
                        entry.state, frame.get("text", ""), wb.registry(),
                        wb.provider)
                    entry.updated = time.time()
                    snapshot(entry)
                    for event in events:
                        await ws.send_json(event)
                except NetmedError as exc:
                    await ws.send_json({"type": "error", "message": str(exc)})
                finally:
                    entry.busy.release()
        except WebSocketDisconnect:
            pass

    return app


def main(argv=None):
    parser = argparse.ArgumentParser(description="workbench API server")
    parser.add_argument("--kg-dir", default=os.environ.get("CHATD_KG_DIR"))
    parser.add_argument("--listen", default=os.environ.get("CHATD_LISTEN",
                                                           "127.0.0.1:8000"))
    parser.add_argument("--persist-dir", default=os.environ.get("CHATD_PERSIST_DIR"))
    parser.add_argument("--fixtures-dir",
                        default=os.environ.get("CHATD_S2_FIXTURES"),
                        help="recorded literature fixtures (offline mode)")
    args = parser.parse_args(argv)

    backend = RecordedSearchBackend(args.fixtures_dir) if args.fixtures_dir else None
    app = create_app(kg_dir=args.kg_dir, persist_dir=args.persist_dir,
                     search_backend=backend)
    host, _, port = args.listen.partition(":")
    import uvicorn
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000))


if __name__ == "__main__":
    main()
