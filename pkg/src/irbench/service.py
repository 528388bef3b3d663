"""HTTP backend for assessment campaigns.

Serves topics and pooled documents, records binary relevance judgments and
exports them in the judgment file format. Documents are presented in the
pool's shuffled order and responses never carry service attribution, so
assessors cannot tell which arm returned a document.

Endpoints::

    GET  /topics
    POST /sessions                     {assessor_id, topic_id}
    GET  /sessions/{id}/documents
    POST /sessions/{id}/judgments      {doc_id, relevant}
    GET  /export/judgments

Judgments are appended to a single log file and fsynced before the request
is acknowledged; replaying the log on startup restores state, with the last
write per (assessor, topic, document) winning.
"""

from __future__ import annotations

import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .corpus import DocumentRecord, Topic, load_corpus, load_topics
from .evalkit import Judgment, NOT_RELEVANT, Pool, RELEVANT
from .formats import load_pools, parse_judgment_line, write_judgments

CORPUS_FILE = "corpus.jsonl"
TOPICS_FILE = "topics.json"
POOLS_FILE = "pools.json"
JUDGMENTS_LOG = "judgments.log"


class JudgmentStore:
    """Append-only judgment log with last-write-wins upsert semantics.

    Writes are serialized through one lock and flushed to disk before the
    caller gets an acknowledgment; reads work on snapshots.
    """

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._latest: dict[tuple[str, int, str], Judgment] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line_no, line in enumerate(fh, start=1):
                    if line.strip():
                        j = parse_judgment_line(line, line_no)
                        self._latest[(j.assessor_id, j.topic_id, j.doc_id)] = j
        else:
            self.path.touch()

    def submit(self, judgment: Judgment) -> None:
        line = (
            f"{judgment.assessor_id}\t{judgment.topic_id}\t{judgment.doc_id}\t"
            f"{1 if judgment.label == RELEVANT else 0}\t{judgment.timestamp:.3f}\n"
        )
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
            self._latest[(judgment.assessor_id, judgment.topic_id, judgment.doc_id)] = judgment

    def snapshot(self) -> list[Judgment]:
        with self._lock:
            return sorted(
                self._latest.values(),
                key=lambda j: (j.assessor_id, j.topic_id, j.doc_id),
            )

    def label_for(self, assessor_id: str, topic_id: int, doc_id: str) -> str | None:
        with self._lock:
            j = self._latest.get((assessor_id, topic_id, doc_id))
        return j.label if j else None

    def judged_docs(self, assessor_id: str, topic_id: int) -> set[str]:
        with self._lock:
            return {
                doc_id
                for (a, t, doc_id) in self._latest
                if a == assessor_id and t == topic_id
            }

    def __len__(self) -> int:
        with self._lock:
            return len(self._latest)


@dataclass
class AssessmentSession:
    session_id: str
    assessor_id: str
    topic_id: int
    doc_order: tuple[str, ...]
    created: float


@dataclass
class Campaign:
    corpus: dict[str, DocumentRecord]
    topics: dict[int, Topic]
    pools: dict[int, Pool]
    store: JudgmentStore
    sessions: dict[str, AssessmentSession] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def create_session(self, assessor_id: str, topic_id: int) -> AssessmentSession:
        if topic_id not in self.topics:
            raise LookupError(f"unknown topic {topic_id}")
        if topic_id not in self.pools:
            raise LookupError(f"no pool built for topic {topic_id}")
        with self._lock:
            for s in self.sessions.values():
                if s.assessor_id == assessor_id and s.topic_id == topic_id:
                    raise FileExistsError(s.session_id)
            session = AssessmentSession(
                session_id=uuid.uuid4().hex[:12],
                assessor_id=assessor_id,
                topic_id=topic_id,
                doc_order=tuple(self.pools[topic_id].doc_ids()),
                created=time.time(),
            )
            self.sessions[session.session_id] = session
        return session

    def topic_session_counts(self) -> dict[int, int]:
        with self._lock:
            counts = dict.fromkeys(self.topics, 0)
            for s in self.sessions.values():
                counts[s.topic_id] += 1
        return counts


def load_campaign(directory) -> Campaign:
    directory = Path(directory)
    records = load_corpus(directory / CORPUS_FILE)
    topics = load_topics(directory / TOPICS_FILE)
    pools = load_pools(directory / POOLS_FILE)
    return Campaign(
        corpus={r.doc_id: r for r in records},
        topics={t.topic_id: t for t in topics},
        pools=pools,
        store=JudgmentStore(directory / JUDGMENTS_LOG),
    )


class SessionRequest(BaseModel):
    assessor_id: str
    topic_id: int


class JudgmentRequest(BaseModel):
    doc_id: str
    relevant: bool


def create_app(campaign: Campaign, ui_dir=None) -> FastAPI:
    app = FastAPI(title="irbench assessment service")
    app.state.campaign = campaign

    def session_or_404(session_id: str) -> AssessmentSession:
        session = campaign.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return session

    def progress(session: AssessmentSession) -> tuple[int, int]:
        judged = campaign.store.judged_docs(session.assessor_id, session.topic_id)
        return len(judged & set(session.doc_order)), len(session.doc_order)

    @app.get("/topics")
    def list_topics():
        counts = campaign.topic_session_counts()
        return {
            "topics": [
                {
                    "id": t.topic_id,
                    "title": t.title,
                    "description": t.description,
                    "sessions": counts[t.topic_id],
                }
                for t in sorted(campaign.topics.values(), key=lambda t: t.topic_id)
            ]
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionRequest):
        if not body.assessor_id.strip():
            raise HTTPException(status_code=422, detail="assessor_id must be non-empty")
        try:
            session = campaign.create_session(body.assessor_id.strip(), body.topic_id)
        except LookupError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        except FileExistsError as exc:
            raise HTTPException(
                status_code=409,
                detail={
                    "message": "session already exists for this assessor and topic",
                    "session_id": str(exc),
                },
            ) from None
        judged, total = progress(session)
        return {
            "session_id": session.session_id,
            "assessor_id": session.assessor_id,
            "topic_id": session.topic_id,
            "pool_size": total,
            "judged": judged,
        }

    @app.get("/sessions/{session_id}/documents")
    def get_documents(session_id: str):
        session = session_or_404(session_id)
        topic = campaign.topics[session.topic_id]
        cards = []
        for doc_id in session.doc_order:
            rec = campaign.corpus[doc_id]
            cards.append(
                {
                    "doc_id": rec.doc_id,
                    "authors": list(rec.authors),
                    "year": rec.year,
                    "title": rec.title,
                    "abstract": rec.abstract,
                    "keywords": list(rec.keywords),
                    "judgment": campaign.store.label_for(
                        session.assessor_id, session.topic_id, doc_id
                    ),
                }
            )
        judged, total = progress(session)
        return {
            "session_id": session.session_id,
            "topic": {
                "id": topic.topic_id,
                "title": topic.title,
                "description": topic.description,
            },
            "documents": cards,
            "judged": judged,
            "total": total,
        }

    @app.post("/sessions/{session_id}/judgments")
    def submit_judgment(session_id: str, body: JudgmentRequest):
        session = session_or_404(session_id)
        if body.doc_id not in session.doc_order:
            raise HTTPException(
                status_code=404,
                detail=f"document {body.doc_id} is not in this session's pool",
            )
        label = RELEVANT if body.relevant else NOT_RELEVANT
        campaign.store.submit(
            Judgment(
                assessor_id=session.assessor_id,
                topic_id=session.topic_id,
                doc_id=body.doc_id,
                label=label,
                timestamp=time.time(),
            )
        )
        judged, total = progress(session)
        return {
            "doc_id": body.doc_id,
            "label": label,
            "judged": judged,
            "total": total,
            "complete": judged == total,
        }

    @app.get("/export/judgments", response_class=PlainTextResponse)
    def export_judgments():
        import io

        buf = io.StringIO()
        write_judgments(campaign.store.snapshot(), buf)
        return buf.getvalue()

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
