"""Topology files, result tables and recovery traces.

Topologies and traces are JSON, results are CSV (or JSON with the same
fields). Every file carries format version 1 and is written atomically.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable

from .geometry import Position
from .recovery import Message, RecoveryReport, Relocation
from .topology import Node, Topology, TopologyError

FORMAT_VERSION = 1

RESULT_COLUMNS = (
    "trial",
    "algorithm",
    "failed_node",
    "relocated_nodes",
    "total_distance",
    "max_node_distance",
    "messages",
    "extended_paths",
    "paths_not_extended",
    "recovered",
    "nodes_bound_ok",
    "node_distance_bound_ok",
    "total_distance_bound_ok",
)
RESULTS_HEADER = ",".join(RESULT_COLUMNS)

_INT_COLUMNS = {"trial", "failed_node", "relocated_nodes", "messages", "extended_paths", "paths_not_extended"}
_FLOAT_COLUMNS = {"total_distance", "max_node_distance"}
_BOOL_COLUMNS = {"recovered", "nodes_bound_ok", "node_distance_bound_ok", "total_distance_bound_ok"}


class FileFormatError(ValueError):
    pass


def atomic_write(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


# -- topology ---------------------------------------------------------------


def topology_to_dict(topo: Topology) -> dict:
    return {
        "version": FORMAT_VERSION,
        "comm_range": topo.comm_range,
        "nodes": [{"id": n.id, "x": n.position.x, "y": n.position.y} for n in topo.nodes],
    }


def write_topology(path, topo: Topology) -> None:
    atomic_write(path, _dumps(topology_to_dict(topo)))


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise FileFormatError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def topology_from_dict(doc) -> Topology:
    if not isinstance(doc, dict):
        raise FileFormatError("top level: expected a JSON object")
    version = doc.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise FileFormatError(f"version: unsupported topology format {version!r}")
    if "comm_range" not in doc:
        raise FileFormatError("comm_range: missing")
    r = _number(doc["comm_range"], "comm_range")
    if r <= 0:
        raise FileFormatError(f"comm_range: must be > 0, got {r!r}")
    raw = doc.get("nodes")
    if not isinstance(raw, list):
        raise FileFormatError("nodes: expected a list")
    nodes = []
    seen = set()
    for k, item in enumerate(raw):
        where = f"nodes[{k}]"
        if not isinstance(item, dict):
            raise FileFormatError(f"{where}: expected an object")
        for key in ("id", "x", "y"):
            if key not in item:
                raise FileFormatError(f"{where}.{key}: missing")
        nid = item["id"]
        if isinstance(nid, bool) or not isinstance(nid, int) or nid < 0:
            raise FileFormatError(f"{where}.id: expected a non-negative integer, got {nid!r}")
        if nid in seen:
            raise FileFormatError(f"{where}.id: duplicate id {nid}")
        seen.add(nid)
        nodes.append(Node(nid, Position(_number(item["x"], f"{where}.x"), _number(item["y"], f"{where}.y"))))
    try:
        return Topology(tuple(nodes), r)
    except TopologyError as exc:
        raise FileFormatError(str(exc)) from None


def load_topology(path) -> Topology:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return topology_from_dict(doc)
    except FileFormatError as exc:
        raise FileFormatError(f"{path}: {exc}") from None


# -- results ----------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return "na"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def results_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# version: {FORMAT_VERSION}\n")
    buf.write(RESULTS_HEADER + "\n")
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([_cell(row[c]) for c in RESULT_COLUMNS])
    return buf.getvalue()


def results_json(rows: Iterable[dict]) -> str:
    return _dumps({"version": FORMAT_VERSION, "columns": list(RESULT_COLUMNS), "rows": [dict(r) for r in rows]})


def _parse_cell(column: str, text: str, where: str):
    try:
        if column in _BOOL_COLUMNS:
            if text == "na":
                return None
            if text not in ("true", "false"):
                raise ValueError(text)
            return text == "true"
        if column in _INT_COLUMNS:
            return int(text)
        if column in _FLOAT_COLUMNS:
            return float(text)
        return text
    except ValueError:
        raise FileFormatError(f"{where}: bad value {text!r} for {column}") from None


def read_results(path) -> list[dict]:
    """Rows from a results file written by :func:`results_csv` or :func:`results_json`."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return _read_results_json(path, text)
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise FileFormatError(f"{path}: empty results file")
    lineno, header = lines[0]
    if header != RESULTS_HEADER:
        raise FileFormatError(f"{path}: line {lineno}: header does not match the results schema")
    rows = []
    for lineno, ln in lines[1:]:
        cells = next(csv.reader([ln]))
        if len(cells) != len(RESULT_COLUMNS):
            raise FileFormatError(f"{path}: line {lineno}: expected {len(RESULT_COLUMNS)} fields, got {len(cells)}")
        rows.append({c: _parse_cell(c, v, f"{path}: line {lineno}") for c, v in zip(RESULT_COLUMNS, cells)})
    return rows


def _read_results_json(path, text) -> list[dict]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    if doc.get("version") != FORMAT_VERSION or tuple(doc.get("columns", ())) != RESULT_COLUMNS:
        raise FileFormatError(f"{path}: not a version {FORMAT_VERSION} results document")
    rows = doc.get("rows")
    if not isinstance(rows, list):
        raise FileFormatError(f"{path}: rows: expected a list")
    for k, row in enumerate(rows):
        if not isinstance(row, dict) or set(row) != set(RESULT_COLUMNS):
            raise FileFormatError(f"{path}: rows[{k}]: fields do not match the results schema")
    return rows


# -- traces -----------------------------------------------------------------


def _event(e: Message | Relocation) -> dict:
    if isinstance(e, Message):
        return {
            "order": e.order,
            "type": "message",
            "kind": e.kind.value,
            "sender": e.sender,
            "scope": "broadcast" if e.scope is None else e.scope,
            "payload": None if e.payload is None else [e.payload.x, e.payload.y],
        }
    return {
        "order": e.order,
        "type": "relocation",
        "node": e.node,
        "from": [e.start.x, e.start.y],
        "to": [e.end.x, e.end.y],
        "cause": e.cause.value,
        "distance": e.distance,
    }


def trace_run(trial: int, report: RecoveryReport) -> dict:
    return {
        "trial": trial,
        "algorithm": report.algorithm.value.lower(),
        "failed_node": report.failed,
        "detected_by": sorted(report.event.detected_by),
        "missed_heartbeats": report.event.missed_heartbeats,
        "recovered": report.recovered,
        "residual_cut_vertices": list(report.residual_cut_vertices),
        "note": report.note,
        "events": [_event(e) for e in report.events()],
    }


def trace_document(runs: Iterable[tuple[int, RecoveryReport]]) -> str:
    return _dumps({"version": FORMAT_VERSION, "runs": [trace_run(t, r) for t, r in runs]})
