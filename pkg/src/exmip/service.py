"""JSON-over-HTTP service around the explanation pipeline.

Session lifecycle: POST /instances (parse + build) -> POST /sessions/{id}/solve
-> POST /sessions/{id}/explain (any number of times) -> GET /sessions/{id}/history.

Sessions and explanation artifacts persist as JSON files under a data
directory; artifacts are content-addressed by SHA-256.  Handlers are
synchronous; a per-session lock serialises work on one session and a global
semaphore bounds concurrent solves across sessions.
"""

from __future__ import annotations

import hashlib
import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse

from . import __version__
from .errors import (
    ExmipError,
    FormatError,
    InvalidQueryError,
    SolveTimeout,
    TimeOutOfWindowError,
    UnknownEntityError,
)
from .iis import verify_iis
from .model import parse_model, write_model
from .queries import Query, explain
from .rcpsp import RcpspContext, build_rcpsp_context, parse_psplib, start_time
from .reasons import graph_to_dict
from .solver import MilpStatus, solve_milp
from .wdp import WdpContext, build_wdp_context, parse_cats

MAX_BODY_BYTES = 2 * 1024 * 1024
DEFAULT_EXPLAIN_CAP = 120.0  # seconds; server-side cap on explain work


@dataclass
class Session:
    id: str
    family: str
    name: str
    payload: str
    ctx: object  # RcpspContext | WdpContext | None (canonical family)
    model: object
    status: str = "created"  # created | solving | solved | infeasible
    f_star: float | None = None
    assignment: tuple[float, ...] | None = None
    solution: dict | None = None
    history: list[dict] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


def _build_session(family: str, payload: str, name: str) -> Session:
    sid = secrets.token_hex(8)
    if family == "psplib":
        inst = parse_psplib(payload, name=name)
        ctx = build_rcpsp_context(inst)
        return Session(sid, family, name, payload, ctx, ctx.model)
    if family == "cats":
        inst = parse_cats(payload, name=name)
        ctx = build_wdp_context(inst)
        return Session(sid, family, name, payload, ctx, ctx.model)
    if family == "canonical":
        model = parse_model(payload)
        return Session(sid, family, name, payload, None, model)
    raise FormatError(f"unknown family {family!r}; expected psplib, cats, or canonical")


def _solution_view(session: Session) -> dict:
    """Family-specific rendering of the optimal solution."""
    ctx = session.ctx
    from .model import Assignment

    assignment = Assignment(session.assignment)
    if isinstance(ctx, RcpspContext):
        completions = ctx.decode_completions(assignment)
        rows = []
        for a in ctx.instance.activities:
            rows.append(
                {
                    "activity": a.id,
                    "start": start_time(a, completions[a.id]),
                    "completion": completions[a.id],
                    "duration": a.duration,
                    "predecessors": sorted(ctx.instance.predecessors(a.id)),
                    "resources": list(a.demands),
                    "is_dummy": a.id in (ctx.instance.source.id, ctx.instance.sink.id),
                    "window": [ctx.windows.ef[a.id], ctx.windows.lf[a.id]],
                }
            )
        return {"kind": "schedule", "rows": rows, "horizon": ctx.instance.horizon}
    if isinstance(ctx, WdpContext):
        selected = ctx.decode_selection(assignment)
        rows = [
            {
                "bid": b.id,
                "price": b.price,
                "goods": sorted(b.goods),
                "selected": b.id in selected,
            }
            for b in ctx.instance.bids
        ]
        return {"kind": "auction", "rows": rows, "goods": ctx.instance.goods}
    return {
        "kind": "assignment",
        "rows": [
            {"variable": v.name, "value": session.assignment[v.id]}
            for v in session.model.variables
        ],
    }


class SessionStore:
    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        os.makedirs(os.path.join(data_dir, "sessions"), exist_ok=True)
        os.makedirs(os.path.join(data_dir, "artifacts"), exist_ok=True)

    def add(self, session: Session) -> None:
        with self._lock:
            self.sessions[session.id] = session
        self.persist(session)

    def get(self, sid: str) -> Session | None:
        with self._lock:
            session = self.sessions.get(sid)
        if session is not None:
            return session
        return self._restore(sid)

    def persist(self, session: Session) -> None:
        doc = {
            "id": session.id,
            "family": session.family,
            "name": session.name,
            "payload": session.payload,
            "status": session.status,
            "f_star": session.f_star,
            "assignment": list(session.assignment) if session.assignment else None,
            "history": session.history,
        }
        path = os.path.join(self.data_dir, "sessions", f"{session.id}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)

    def _restore(self, sid: str) -> Session | None:
        path = os.path.join(self.data_dir, "sessions", f"{sid}.json")
        if not os.path.exists(path):
            return None
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        session = _build_session(doc["family"], doc["payload"], doc["name"])
        session.id = doc["id"]
        session.status = doc["status"]
        session.f_star = doc["f_star"]
        session.assignment = tuple(doc["assignment"]) if doc["assignment"] else None
        session.history = doc["history"]
        with self._lock:
            self.sessions[session.id] = session
        return session

    def store_artifact(self, doc: dict) -> str:
        blob = json.dumps(doc, sort_keys=True, indent=2).encode()
        digest = hashlib.sha256(blob).hexdigest()
        path = os.path.join(self.data_dir, "artifacts", f"{digest}.json")
        if not os.path.exists(path):
            with open(path, "wb") as fh:
                fh.write(blob)
        return digest

    def load_artifact(self, digest: str) -> dict | None:
        path = os.path.join(self.data_dir, "artifacts", f"{digest}.json")
        if not os.path.exists(path):
            return None
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)


def make_artifact(session: Session, query: Query | None, result) -> dict:
    """Self-contained explanation record: enough to re-audit the IIS later."""
    doc = {
        "session": session.id,
        "family": session.family,
        "instance": session.name,
        "f_star": session.f_star,
        "query": query.to_json() if query else None,
        "case": result.case.value,
        "extended_objective": result.extended_objective,
        "asp_model": write_model(result.asp.model),
        "t_iis": result.t_iis,
    }
    if result.iis is not None:
        doc["iis"] = {
            "algorithm": result.iis.algorithm,
            "constraint_ids": list(result.iis.constraint_ids),
            "size": len(result.iis),
            "oracle_calls": result.iis.stats.oracle_calls,
            "wall_time": result.iis.stats.wall_time,
        }
        doc["graph"] = graph_to_dict(result.graph)
    if result.notice is not None:
        doc["notice"] = {
            "case": "optimality",
            "message": result.notice.message,
            "f_star": result.notice.f_star,
            "witness": list(result.notice.witness.values),
        }
    return doc


def iis_report(result) -> dict | None:
    if result.iis is None:
        return None
    model = result.asp.model
    return {
        "algorithm": result.iis.algorithm,
        "constraint_ids": list(result.iis.constraint_ids),
        "tags": [model.constraint(cid).tag.kind.value for cid in result.iis.constraint_ids],
        "size": len(result.iis),
        "oracle_calls": result.iis.stats.oracle_calls,
        "wall_time": result.iis.stats.wall_time,
    }


def _error(status: int, kind: str, message: str, **extra) -> JSONResponse:
    return JSONResponse({"error": kind, "message": message, **extra}, status_code=status)


def create_app(
    data_dir: str | None = None,
    max_workers: int = 4,
    explain_cap: float = DEFAULT_EXPLAIN_CAP,
    ui_dir: str | None = None,
) -> FastAPI:
    data_dir = data_dir or os.environ.get("EXMIP_DATA_DIR") or os.path.join(".", "exmip_data")
    store = SessionStore(data_dir)
    solver_slots = threading.BoundedSemaphore(max_workers)
    app = FastAPI(title="exmip", version=__version__)

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/instances", status_code=201)
    async def create_instance(request: Request):
        body = await request.body()
        if len(body) > MAX_BODY_BYTES:
            return _error(413, "too_large", f"payload exceeds {MAX_BODY_BYTES} bytes")
        try:
            doc = json.loads(body)
        except json.JSONDecodeError as exc:
            return _error(400, "bad_json", str(exc))
        family = doc.get("family")
        content = doc.get("content")
        if not isinstance(family, str) or not isinstance(content, str):
            return _error(400, "bad_request", "body needs string fields 'family' and 'content'")
        try:
            session = _build_session(family, content, doc.get("name", "instance"))
        except FormatError as exc:
            return _error(400, "parse_error", str(exc), line=exc.line, section=exc.section)
        except ExmipError as exc:
            return _error(400, type(exc).__name__, str(exc))
        store.add(session)
        return JSONResponse({"session_id": session.id, "family": family}, status_code=201)

    @app.get("/sessions/{sid}")
    def session_status(sid: str):
        session = store.get(sid)
        if session is None:
            return _error(404, "unknown_session", f"no session {sid!r}")
        return {
            "id": session.id,
            "family": session.family,
            "name": session.name,
            "status": session.status,
            "f_star": session.f_star,
            "history_length": len(session.history),
        }

    @app.post("/sessions/{sid}/solve")
    async def solve(sid: str, request: Request):
        session = store.get(sid)
        if session is None:
            return _error(404, "unknown_session", f"no session {sid!r}")
        body = await request.body()
        doc = json.loads(body) if body else {}
        time_limit = doc.get("time_limit", explain_cap)

        if session.status == "solved":
            return {
                "f_star": session.f_star,
                "sense": session.model.sense.value,
                "status": "solved",
                "solution": session.solution or _solution_view(session),
            }
        if not session.lock.acquire(blocking=False):
            return _error(409, "busy", "session is already solving")
        try:
            session.status = "solving"
            with solver_slots:
                result = solve_milp(session.model, time_limit=time_limit)
            if result.status is MilpStatus.TIMEOUT:
                session.status = "created"
                return _error(504, "timeout", "solve hit the time limit", partial=True)
            if result.status is MilpStatus.INFEASIBLE:
                session.status = "infeasible"
                store.persist(session)
                return _error(422, "infeasible", "main problem infeasible")
            session.status = "solved"
            session.f_star = result.objective
            session.assignment = result.assignment.values
            session.solution = _solution_view(session)
            store.persist(session)
            return {
                "f_star": session.f_star,
                "sense": session.model.sense.value,
                "status": "solved",
                "solution": session.solution,
                "stats": {
                    "nodes": result.stats.nodes,
                    "lp_solves": result.stats.lp_solves,
                    "wall_time": result.stats.wall_time,
                },
            }
        finally:
            session.lock.release()

    @app.post("/sessions/{sid}/explain")
    async def explain_endpoint(sid: str, request: Request):
        session = store.get(sid)
        if session is None:
            return _error(404, "unknown_session", f"no session {sid!r}")
        if session.status != "solved":
            return _error(409, "not_solved", "solve the session before asking for explanations")
        if session.ctx is None:
            return _error(400, "unsupported_family", "canonical models have no query vocabulary")
        body = await request.body()
        try:
            doc = json.loads(body) if body else {}
        except json.JSONDecodeError as exc:
            return _error(400, "bad_json", str(exc))
        algorithm = doc.get("algorithm", "deletion")
        time_limit = min(float(doc.get("time_limit", explain_cap)), explain_cap)
        try:
            query = Query.from_json(doc.get("query", {}))
        except InvalidQueryError as exc:
            return _error(400, "InvalidQueryError", str(exc))

        with session.lock:
            try:
                with solver_slots:
                    result = explain(session.ctx, session.f_star, query,
                                     algorithm=algorithm, time_limit=time_limit)
            except (UnknownEntityError, TimeOutOfWindowError, InvalidQueryError) as exc:
                return _error(400, type(exc).__name__, str(exc))
            except SolveTimeout as exc:
                return _error(504, "timeout", str(exc))

            artifact = make_artifact(session, query, result)
            digest = store.store_artifact(artifact)
            entry = {
                "index": len(session.history),
                "query": query.to_json(),
                "algorithm": algorithm,
                "case": result.case.value,
                "artifact": digest,
                "iis_report": iis_report(result),
                "created_at": time.time(),
            }
            session.history.append(entry)
            store.persist(session)

        response = {
            "case": result.case.value,
            "extended_objective": result.extended_objective,
            "artifact": digest,
            "t_iis": result.t_iis,
        }
        if result.graph is not None:
            response["graph"] = graph_to_dict(result.graph)
            response["iis_report"] = entry["iis_report"]
        if result.notice is not None:
            response["notice"] = {
                "case": "optimality",
                "message": result.notice.message,
                "f_star": result.notice.f_star,
                "witness": list(result.notice.witness.values),
                "solution": _witness_view(session, result.notice.witness),
            }
        return response

    @app.get("/sessions/{sid}/history")
    def history(sid: str):
        session = store.get(sid)
        if session is None:
            return _error(404, "unknown_session", f"no session {sid!r}")
        return session.history

    @app.get("/artifacts/{digest}")
    def artifact(digest: str):
        doc = store.load_artifact(digest)
        if doc is None:
            return _error(404, "unknown_artifact", f"no artifact {digest!r}")
        return doc

    @app.post("/artifacts/{digest}/verify")
    def verify_artifact(digest: str):
        doc = store.load_artifact(digest)
        if doc is None:
            return _error(404, "unknown_artifact", f"no artifact {digest!r}")
        if "iis" not in doc:
            return _error(400, "no_iis", "artifact carries no IIS (optimality case)")
        model = parse_model(doc["asp_model"])
        audit = verify_iis(model, tuple(doc["iis"]["constraint_ids"]))
        return {
            "valid": audit.valid,
            "whole_infeasible": audit.whole_infeasible,
            "redundant_ids": list(audit.redundant_ids),
            "oracle_calls": audit.oracle_calls,
        }

    def _witness_view(session: Session, witness) -> dict:
        saved = session.assignment
        session.assignment = witness.values
        try:
            return _solution_view(session)
        finally:
            session.assignment = saved

    if ui_dir and os.path.isdir(ui_dir):

        @app.get("/")
        def index():
            return FileResponse(os.path.join(ui_dir, "index.html"))

        @app.get("/ui/{path:path}")
        def ui_assets(path: str):
            full = os.path.realpath(os.path.join(ui_dir, path))
            if not full.startswith(os.path.realpath(ui_dir)) or not os.path.isfile(full):
                return _error(404, "not_found", path)
            return FileResponse(full)

    return app
