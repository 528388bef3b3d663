"""On-disk interchange formats: run files, judgment files, pool files.

Run file: one tab-separated line per result entry,
``topic_id  doc_id  rank  score  service_label``.

Judgment file: one tab-separated line per judgment,
``assessor_id  topic_id  doc_id  label  timestamp`` with label 1 (relevant)
or 0 (not relevant).

Pool file: JSON, one object per topic with the presentation order and the
contributing services per document.
"""

from __future__ import annotations

import json
from typing import Iterable, TextIO

from .evalkit import Judgment, NOT_RELEVANT, Pool, PoolEntry, RELEVANT
from .index import RankedList, RankEntry


class FormatError(ValueError):
    """Raised for malformed run, judgment or pool files."""


def write_runs(runs: Iterable[RankedList], fh: TextIO) -> None:
    for run in runs:
        for e in run.entries:
            fh.write(
                f"{run.topic_id}\t{e.doc_id}\t{e.rank}\t{e.score:.6f}\t{run.service_label}\n"
            )


def save_runs(runs: Iterable[RankedList], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_runs(runs, fh)


def load_runs(path) -> list[RankedList]:
    """Read a run file back into RankedLists, one per (topic, service)."""
    grouped: dict[tuple[int, str], list[RankEntry]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise FormatError(f"run file line {line_no}: expected 5 fields, got {len(parts)}")
            try:
                topic_id, doc_id, rank, score, label = (
                    int(parts[0]), parts[1], int(parts[2]), float(parts[3]), parts[4],
                )
            except ValueError as exc:
                raise FormatError(f"run file line {line_no}: {exc}") from None
            grouped.setdefault((topic_id, label), []).append(RankEntry(rank, doc_id, score))

    runs = []
    for (topic_id, label), entries in grouped.items():
        entries.sort(key=lambda e: e.rank)
        if [e.rank for e in entries] != list(range(1, len(entries) + 1)):
            raise FormatError(
                f"run for topic {topic_id} / {label}: ranks are not contiguous from 1"
            )
        runs.append(RankedList(label, topic_id, tuple(entries)))
    return runs


def write_judgments(judgments: Iterable[Judgment], fh: TextIO) -> None:
    for j in judgments:
        flag = 1 if j.label == RELEVANT else 0
        fh.write(f"{j.assessor_id}\t{j.topic_id}\t{j.doc_id}\t{flag}\t{j.timestamp:.3f}\n")


def save_judgments(judgments: Iterable[Judgment], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_judgments(judgments, fh)


def parse_judgment_line(line: str, line_no: int = 0) -> Judgment:
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 5:
        raise FormatError(f"judgment file line {line_no}: expected 5 fields, got {len(parts)}")
    assessor_id, topic_id, doc_id, flag, timestamp = parts
    if flag not in ("0", "1"):
        raise FormatError(f"judgment file line {line_no}: label must be 0 or 1, got {flag!r}")
    try:
        return Judgment(
            assessor_id=assessor_id,
            topic_id=int(topic_id),
            doc_id=doc_id,
            label=RELEVANT if flag == "1" else NOT_RELEVANT,
            timestamp=float(timestamp),
        )
    except ValueError as exc:
        raise FormatError(f"judgment file line {line_no}: {exc}") from None


def load_judgments(path) -> list[Judgment]:
    judgments = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if line.strip():
                judgments.append(parse_judgment_line(line, line_no))
    return judgments


def pool_to_dict(pool: Pool) -> dict:
    return {
        "topic_id": pool.topic_id,
        "entries": [
            {"doc_id": e.doc_id, "services": sorted(e.services), "position": e.position}
            for e in pool.entries
        ],
    }


def pool_from_dict(obj: dict) -> Pool:
    entries = tuple(
        PoolEntry(e["doc_id"], frozenset(e["services"]), e["position"])
        for e in obj["entries"]
    )
    return Pool(int(obj["topic_id"]), entries)


def save_pools(pools: Iterable[Pool], path) -> None:
    payload = {"pools": [pool_to_dict(p) for p in pools]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=1)


def load_pools(path) -> dict[int, Pool]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if "pools" not in payload:
        raise FormatError(f"not a pool file: {path}")
    pools = {}
    for obj in payload["pools"]:
        pool = pool_from_dict(obj)
        if pool.topic_id in pools:
            raise FormatError(f"duplicate pool for topic {pool.topic_id}")
        pools[pool.topic_id] = pool
    return pools
