"""Dynamic task distribution: master, workers, local threads, checkpointing.

The wire protocol is four message kinds over length-prefixed frames, all
integers big-endian:

    frame   := u32 length | u8 kind | payload
    REQUEST  (0) no payload            worker asks for work
    ASSIGN   (1) u64 task_index        master hands out the lowest free task
    RESULT   (2) u64 task_index, u64 count, u8 has_best, u64 best_numerator,
                 u64 best_denominator, u32 champion_count, u64 elapsed_ms
    SHUTDOWN (3) no payload            no work left; worker exits

A worker holds one connection, loops REQUEST -> ASSIGN -> RESULT, and
disconnects after SHUTDOWN, so a run with T tasks and W workers exchanges
exactly T assigns, T results, W shutdowns and T+W requests.

Champion graphs never cross the wire (RESULT has no room for them); remote
runs aggregate best ASPL and champion counts, while champion graph6 lists
are exact in mono/local modes and can be dumped per worker via run_worker's
champions hook. Likewise raw (pre-filter) counts are exact locally but the
frame carries only the filtered count, so filtered remote runs report
raw_count as unknown.

The checkpoint is an append-only TSV: one header line naming the job (order,
degree, split level, task count, filter digest), then one row per completed
task, flushed as results land. Counting jobs write the pinned three columns
task_index, count, elapsed_ms; ASPL-tracking jobs append raw_count,
best_numerator, best_denominator, champion_count so a resumed run rebuilds
the same aggregate. A torn final line is dropped (that task just re-runs); a
header that does not match the job is refused outright.
"""

from __future__ import annotations

import heapq
import logging
import selectors
import socket
import struct
import threading
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .codec import encode_rows
from .errors import JobMismatchError, RegenumError, UnknownTaskError
from .filters import FilterSpec, SearchResult, accumulate_rows, empty_result, merge
from .generate import _call_kernel, count_prefixes
from .graphs import DegreeSpec

log = logging.getLogger("regenum.scheduling")

REQUEST, ASSIGN, RESULT, SHUTDOWN = 0, 1, 2, 3

_LEN = struct.Struct(">I")
_ASSIGN_BODY = struct.Struct(">Q")
_RESULT_BODY = struct.Struct(">QQBQQIQ")
_MAX_FRAME = 1 << 16


@dataclass(frozen=True)
class WireMessage:
    kind: int
    task_index: int = 0
    count: int = 0
    best_num: int = 0
    best_den: int = 0
    champion_count: int = 0
    elapsed_ms: int = 0

    @property
    def best(self) -> Optional[Fraction]:
        return Fraction(self.best_num, self.best_den) if self.best_den else None


def encode_message(msg: WireMessage) -> bytes:
    if msg.kind in (REQUEST, SHUTDOWN):
        body = b""
    elif msg.kind == ASSIGN:
        body = _ASSIGN_BODY.pack(msg.task_index)
    elif msg.kind == RESULT:
        body = _RESULT_BODY.pack(
            msg.task_index, msg.count, 1 if msg.best_den else 0,
            msg.best_num, msg.best_den, msg.champion_count, msg.elapsed_ms)
    else:
        raise ValueError(f"unknown message kind {msg.kind}")
    return _LEN.pack(1 + len(body)) + bytes([msg.kind]) + body


def decode_payload(payload: bytes) -> WireMessage:
    """Decode one frame body (kind byte plus fields); ValueError on any
    malformation so one bad frame can never take down the serving loop."""
    if not payload:
        raise ValueError("empty frame")
    kind = payload[0]
    body = payload[1:]
    if kind in (REQUEST, SHUTDOWN):
        if body:
            raise ValueError("unexpected payload")
        return WireMessage(kind)
    if kind == ASSIGN:
        if len(body) != _ASSIGN_BODY.size:
            raise ValueError(f"assign payload is {len(body)} bytes")
        (idx,) = _ASSIGN_BODY.unpack(body)
        return WireMessage(ASSIGN, task_index=idx)
    if kind == RESULT:
        if len(body) != _RESULT_BODY.size:
            raise ValueError(f"result payload is {len(body)} bytes")
        idx, count, has_best, num, den, champs, elapsed = _RESULT_BODY.unpack(body)
        if has_best not in (0, 1) or (has_best == 1) != (den != 0):
            raise ValueError("inconsistent best-ASPL fields")
        return WireMessage(RESULT, task_index=idx, count=count, best_num=num,
                           best_den=den, champion_count=champs, elapsed_ms=elapsed)
    raise ValueError(f"unknown message kind {kind}")


class FrameBuffer:
    """Reassembles frames from a byte stream; yields decoded messages."""

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data: bytes) -> list[WireMessage]:
        self._buf.extend(data)
        out = []
        while True:
            if len(self._buf) < 4:
                return out
            (length,) = _LEN.unpack(self._buf[:4])
            if not (1 <= length <= _MAX_FRAME):
                raise ValueError(f"frame length {length} out of bounds")
            if len(self._buf) < 4 + length:
                return out
            payload = bytes(self._buf[4:4 + length])
            del self._buf[:4 + length]
            out.append(decode_payload(payload))


def read_message(sock: socket.socket) -> Optional[WireMessage]:
    """Blocking read of one frame; None on clean EOF at a frame boundary."""
    head = _read_exact(sock, 4)
    if head is None:
        return None
    (length,) = _LEN.unpack(head)
    if not (1 <= length <= _MAX_FRAME):
        raise ValueError(f"frame length {length} out of bounds")
    payload = _read_exact(sock, length)
    if payload is None:
        raise ConnectionError("connection closed mid-frame")
    return decode_payload(payload)


def _read_exact(sock: socket.socket, nbytes: int) -> Optional[bytes]:
    buf = bytearray()
    while len(buf) < nbytes:
        chunk = sock.recv(nbytes - len(buf))
        if not chunk:
            if buf:
                raise ConnectionError("connection closed mid-frame")
            return None
        buf.extend(chunk)
    return bytes(buf)


# ---------------------------------------------------------------------------
# per-task results and the ledger

@dataclass
class ResultRow:
    """One completed task as recorded in the ledger and the checkpoint."""

    task_index: int
    count: int                      # graphs counted toward the job total
    elapsed_ms: int
    raw_count: Optional[int] = None  # accepted leaves before filtering
    best_num: int = 0
    best_den: int = 0
    champion_count: int = 0

    @property
    def best(self) -> Optional[Fraction]:
        return Fraction(self.best_num, self.best_den) if self.best_den else None


AVAILABLE, ASSIGNED, DONE = 0, 1, 2


class TaskLedger:
    """Authoritative task state: available -> assigned -> done, exactly once.

    Reassignment is allowed only through release() (timeout or lost worker);
    the first completion wins and later duplicates are reported back as such.
    Not thread-safe by itself; callers serialize access.
    """

    def __init__(self, task_count: int):
        if task_count < 1:
            raise ValueError("task_count must be at least 1")
        self.task_count = task_count
        self.state = [AVAILABLE] * task_count
        self.owner: list[Optional[object]] = [None] * task_count
        self.assigned_at = [0.0] * task_count
        self.rows: dict[int, ResultRow] = {}
        self._avail = list(range(task_count))
        heapq.heapify(self._avail)

    def acquire(self, worker: object, now: Optional[float] = None) -> Optional[int]:
        """Lowest-index available task, or None."""
        while self._avail:
            idx = heapq.heappop(self._avail)
            if self.state[idx] == AVAILABLE:
                self.state[idx] = ASSIGNED
                self.owner[idx] = worker
                self.assigned_at[idx] = time.monotonic() if now is None else now
                return idx
        return None

    def complete(self, row: ResultRow) -> bool:
        """Record a result; False when the task was already done."""
        idx = row.task_index
        if not (0 <= idx < self.task_count):
            raise UnknownTaskError(f"task {idx} out of range")
        if self.state[idx] == DONE:
            return False
        self.state[idx] = DONE
        self.owner[idx] = None
        self.rows[idx] = row
        return True

    def restore_done(self, row: ResultRow) -> None:
        """Checkpoint replay: mark a task done without an assignment."""
        if not (0 <= row.task_index < self.task_count):
            raise UnknownTaskError(f"task {row.task_index} out of range")
        self.state[row.task_index] = DONE
        self.rows[row.task_index] = row

    def release(self, idx: int) -> None:
        """Return an assigned task to the pool (lost or timed-out worker)."""
        if self.state[idx] == ASSIGNED:
            self.state[idx] = AVAILABLE
            self.owner[idx] = None
            heapq.heappush(self._avail, idx)

    def release_owned_by(self, worker: object) -> list[int]:
        out = [i for i in range(self.task_count)
               if self.state[i] == ASSIGNED and self.owner[i] == worker]
        for i in out:
            self.release(i)
        return out

    def stale_tasks(self, now: float, timeout_secs: float) -> list[int]:
        return [i for i in range(self.task_count)
                if self.state[i] == ASSIGNED and now - self.assigned_at[i] > timeout_secs]

    @property
    def done_count(self) -> int:
        return len(self.rows)

    @property
    def all_done(self) -> bool:
        return len(self.rows) == self.task_count

    def remaining(self) -> list[int]:
        return [i for i in range(self.task_count) if self.state[i] != DONE]

    def median_elapsed_secs(self) -> Optional[float]:
        if not self.rows:
            return None
        xs = sorted(r.elapsed_ms for r in self.rows.values())
        return xs[len(xs) // 2] / 1000.0


# ---------------------------------------------------------------------------
# checkpoint file

_CKPT_MAGIC = "regenum-checkpoint"


def checkpoint_header(spec: DegreeSpec, split_level: int, task_count: int,
                      f: FilterSpec) -> str:
    return (f"{_CKPT_MAGIC} v1 n={spec.n} k={spec.k} split_level={split_level} "
            f"tasks={task_count} filter={f.digest()}")


def format_row(row: ResultRow, extended: bool) -> str:
    base = f"{row.task_index}\t{row.count}\t{row.elapsed_ms}"
    if not extended:
        return base
    raw = -1 if row.raw_count is None else row.raw_count
    return (f"{base}\t{raw}\t{row.best_num}\t{row.best_den}\t{row.champion_count}")


def parse_row(line: str, extended: bool) -> ResultRow:
    parts = line.split("\t")
    want = 7 if extended else 3
    if len(parts) != want:
        raise ValueError(f"expected {want} columns, got {len(parts)}")
    nums = [int(p) for p in parts]
    if extended:
        idx, count, elapsed, raw, bn, bd, cc = nums
        return ResultRow(idx, count, elapsed, None if raw < 0 else raw, bn, bd, cc)
    idx, count, elapsed = nums
    return ResultRow(idx, count, elapsed, raw_count=count)


def load_checkpoint(path: str, spec: DegreeSpec, split_level: int,
                    task_count: int, f: FilterSpec) -> dict[int, ResultRow]:
    """Replay a checkpoint; {} for a missing or empty file.

    The header must match the job identity exactly (JobMismatch otherwise).
    A torn final line is dropped; corruption anywhere else is an error.
    """
    try:
        with open(path, "r", encoding="ascii") as fh:
            blob = fh.read()
    except FileNotFoundError:
        return {}
    if not blob:
        return {}
    lines = blob.split("\n")
    # a complete file ends with "\n" so the popped tail is empty; anything
    # else is a row torn by a crash mid-write and is dropped
    torn_tail = lines.pop()
    if not lines:
        raise JobMismatchError(f"checkpoint {path} holds a torn header")
    header = lines[0]
    expect = checkpoint_header(spec, split_level, task_count, f)
    if header != expect:
        raise JobMismatchError(
            f"checkpoint {path} belongs to a different job:\n  found    {header}\n  expected {expect}")
    extended = f.track_min_aspl
    rows: dict[int, ResultRow] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        try:
            row = parse_row(line, extended)
        except ValueError as exc:
            raise RegenumError(f"corrupt checkpoint row at {path}:{lineno}: {exc}") from exc
        if not (0 <= row.task_index < task_count):
            raise RegenumError(f"checkpoint row at {path}:{lineno} names task {row.task_index}")
        if row.task_index not in rows:
            rows[row.task_index] = row
    if torn_tail:
        log.warning("dropping torn checkpoint line in %s", path)
    return rows


class CheckpointWriter:
    """Append-only result log, one flushed line per completed task."""

    def __init__(self, path: str, spec: DegreeSpec, split_level: int,
                 task_count: int, f: FilterSpec, fresh: bool):
        self.extended = f.track_min_aspl
        if fresh:
            self._fh = open(path, "w", encoding="ascii")
            self._fh.write(checkpoint_header(spec, split_level, task_count, f) + "\n")
            self._fh.flush()
        else:
            # cut any torn final line so appended rows start clean
            self._fh = open(path, "r+", encoding="ascii")
            blob = self._fh.read()
            self._fh.seek(blob.rfind("\n") + 1)
            self._fh.truncate()

    def append(self, row: ResultRow) -> None:
        self._fh.write(format_row(row, self.extended) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()


# ---------------------------------------------------------------------------
# task execution

def execute_task(spec: DegreeSpec, split_level: int, task_index: int, f: FilterSpec,
                 keep_graphs: bool = False) -> tuple[ResultRow, SearchResult, Optional[list[str]]]:
    """Run one subtree: returns its ledger row, partial result and, when
    keep_graphs, the generation-order graph6 strings."""
    t0 = time.perf_counter()
    state = empty_result(spec, f)
    state.tasks_done = 1
    graphs: Optional[list[str]] = [] if keep_graphs else None
    total = count_prefixes(spec, split_level)
    if not (0 <= task_index < total):
        raise UnknownTaskError(f"task {task_index} out of range for {total} prefixes")
    lo, hi = task_index, task_index + 1
    if spec.k == 0:
        # degenerate: single empty graph on one vertex, or nothing
        if spec.n == 1:
            rows_flat = np.zeros(1, dtype=np.uint64)
            accumulate_rows(state, rows_flat, 1)
            if keep_graphs:
                graphs.append(encode_rows([0], 1))
        stored = 0
    elif f.inert and not keep_graphs:
        accepted, _, _, _, _, _ = _call_kernel(spec, split_level=split_level, lo=lo, hi=hi)
        state.raw_count = accepted
        state.total_count = accepted
        stored = 0
    else:
        cap = 1 << 16
        while True:
            accepted, stored, _, rows_flat, _, _ = _call_kernel(
                spec, split_level=split_level, lo=lo, hi=hi, collect_cap=cap)
            if stored == accepted:
                break
            cap = accepted
        accumulate_rows(state, rows_flat, stored)
        if keep_graphs:
            n = spec.n
            for i in range(stored):
                graphs.append(encode_rows(rows_flat[i * n:(i + 1) * n], n))
    state.per_task_counts = {task_index: state.raw_count}
    elapsed_ms = max(int((time.perf_counter() - t0) * 1000), 0)
    best = state.best_aspl
    row = ResultRow(
        task_index=task_index,
        count=state.total_count,
        elapsed_ms=elapsed_ms,
        raw_count=state.raw_count,
        best_num=best.numerator if best is not None else 0,
        best_den=best.denominator if best is not None else 0,
        champion_count=state.champion_count,
    )
    return row, state, graphs


def row_to_result(spec: DegreeSpec, f: FilterSpec, row: ResultRow) -> SearchResult:
    """Lift a ledger row back into a mergeable partial result (no champions)."""
    state = empty_result(spec, f)
    state.total_count = row.count
    state.raw_count = row.raw_count
    state.tasks_done = 1
    state.per_task_counts = {
        row.task_index: row.raw_count if row.raw_count is not None else row.count}
    if row.best_den:
        state.best_aspl = Fraction(row.best_num, row.best_den)
        state.champion_count = row.champion_count
    return state


@dataclass
class RunReport:
    """Everything a front end needs to print or test one run."""

    result: SearchResult
    stats: dict[str, int]
    rows: dict[int, ResultRow]
    elapsed_secs: float
    graph6_by_task: Optional[dict[int, list[str]]] = None
    resumed_tasks: int = 0


# ---------------------------------------------------------------------------
# local modes

def run_mono(spec: DegreeSpec, f: FilterSpec, keep_graphs: bool = False) -> RunReport:
    """Single-threaded, single-walk enumeration under a filter."""
    t0 = time.perf_counter()
    state = empty_result(spec, f)
    state.tasks_done = 1
    graphs: Optional[list[str]] = [] if keep_graphs else None
    if spec.k == 0:
        if spec.n == 1:
            accumulate_rows(state, np.zeros(1, dtype=np.uint64), 1)
            if keep_graphs:
                graphs.append(encode_rows([0], 1))
    elif f.inert and not keep_graphs:
        accepted, _, _, _, _, _ = _call_kernel(spec)
        state.raw_count = accepted
        state.total_count = accepted
    else:
        cap = 1 << 19
        while True:
            accepted, stored, _, rows_flat, _, _ = _call_kernel(spec, collect_cap=cap)
            if stored == accepted:
                break
            cap = accepted
        accumulate_rows(state, rows_flat, stored)
        if keep_graphs:
            n = spec.n
            for i in range(stored):
                graphs.append(encode_rows(rows_flat[i * n:(i + 1) * n], n))
    elapsed = time.perf_counter() - t0
    report = RunReport(result=state, stats={}, rows={}, elapsed_secs=elapsed)
    if keep_graphs:
        report.graph6_by_task = {0: graphs}
    return report


def run_local(spec: DegreeSpec, split_level: int, worker_count: int, f: FilterSpec,
              checkpoint_path: Optional[str] = None,
              keep_graphs: bool = False) -> RunReport:
    """Threaded in-process run with the same ledger semantics as the wire.

    Results merge in ascending task order regardless of which thread ran
    what, so the outcome is bit-identical to a monolithic run and to a
    master/worker composition under the same filter.
    """
    if worker_count < 1:
        raise ValueError("worker_count must be at least 1")
    t0 = time.perf_counter()
    task_count = count_prefixes(spec, split_level)
    ledger = TaskLedger(task_count)
    resumed = 0
    writer = None
    if checkpoint_path is not None:
        replay = load_checkpoint(checkpoint_path, spec, split_level, task_count, f)
        for row in replay.values():
            ledger.restore_done(row)
        resumed = len(replay)
        writer = CheckpointWriter(checkpoint_path, spec, split_level, task_count, f,
                                  fresh=not replay)
    lock = threading.Lock()
    partials: dict[int, SearchResult] = {}
    streams: dict[int, list[str]] = {}
    failures: list[BaseException] = []
    stats = {"assigns": 0, "results": 0, "requests": 0, "shutdowns": 0, "duplicates": 0}

    def loop(worker_id: int):
        try:
            while True:
                with lock:
                    stats["requests"] += 1
                    idx = ledger.acquire(worker_id)
                    if idx is None:
                        stats["shutdowns"] += 1
                        return
                    stats["assigns"] += 1
                row, state, graphs = execute_task(spec, split_level, idx, f,
                                                  keep_graphs=keep_graphs)
                with lock:
                    fresh = ledger.complete(row)
                    if fresh:
                        stats["results"] += 1
                        partials[idx] = state
                        if graphs is not None:
                            streams[idx] = graphs
                        if writer is not None:
                            writer.append(row)
                    else:
                        stats["duplicates"] += 1
        except BaseException as exc:  # noqa: BLE001 - propagated to caller
            with lock:
                failures.append(exc)

    threads = [threading.Thread(target=loop, args=(i,), daemon=True)
               for i in range(worker_count)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    if failures:
        raise failures[0]
    if writer is not None:
        writer.close()

    # champion recovery for resumed ASPL-tracking runs: the checkpoint holds
    # counts and best values but never graphs, so re-run the tasks that carry
    # the global best (idempotent: the ledger rows stay as replayed)
    if resumed and f.track_min_aspl and f.champion_limit > 0:
        best = None
        for row in ledger.rows.values():
            b = row.best
            if b is not None and (best is None or b < best):
                best = b
        if best is not None:
            for idx in sorted(ledger.rows):
                if idx in partials:
                    continue
                row = ledger.rows[idx]
                if row.best == best:
                    _, state, graphs = execute_task(spec, split_level, idx, f,
                                                    keep_graphs=keep_graphs)
                    partials[idx] = state
                    if graphs is not None:
                        streams[idx] = graphs

    final = empty_result(spec, f)
    final.per_task_counts = {}
    for idx in range(task_count):
        part = partials.get(idx)
        if part is None:
            part = row_to_result(spec, f, ledger.rows[idx])
        final = merge(final, part)
    report = RunReport(result=final, stats=stats, rows=dict(ledger.rows),
                       elapsed_secs=time.perf_counter() - t0, resumed_tasks=resumed)
    if keep_graphs:
        report.graph6_by_task = streams
    return report


# ---------------------------------------------------------------------------
# networked master

def _parse_endpoint(endpoint) -> tuple[str, int]:
    if isinstance(endpoint, tuple):
        return endpoint[0], int(endpoint[1])
    host, _, port = str(endpoint).rpartition(":")
    if not host:
        raise ValueError(f"endpoint {endpoint!r} is not host:port")
    return host, int(port)


class _Conn:
    __slots__ = ("sock", "addr", "buf", "out", "assigned_ever", "closing")

    def __init__(self, sock, addr):
        self.sock = sock
        self.addr = addr
        self.buf = FrameBuffer()
        self.out = bytearray()
        self.assigned_ever: set[int] = set()
        self.closing = False


def run_master(task_count: int, listen, checkpoint_path: Optional[str], *,
               spec: DegreeSpec, split_level: int, f: FilterSpec,
               task_timeout_secs: Optional[float] = None,
               on_listening: Optional[Callable[[tuple[str, int]], None]] = None,
               linger_secs: float = 10.0) -> RunReport:
    """Serve tasks until every one is done and every worker has drained.

    Assignment is lowest-index-first; a worker requesting while everything
    is assigned is parked and answered when a task frees up (timeout or
    disconnect) or the job completes (SHUTDOWN). First result per task wins;
    duplicates are logged and dropped. A malformed frame drops the
    connection and leaves its tasks to the reclaim path.
    """
    t0 = time.perf_counter()
    ledger = TaskLedger(task_count)
    resumed = 0
    writer = None
    if checkpoint_path is not None:
        replay = load_checkpoint(checkpoint_path, spec, split_level, task_count, f)
        for row in replay.values():
            ledger.restore_done(row)
        resumed = len(replay)
        writer = CheckpointWriter(checkpoint_path, spec, split_level, task_count, f,
                                  fresh=not replay)
    host, port = _parse_endpoint(listen)
    lsock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    lsock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    lsock.bind((host, port))
    lsock.listen(64)
    lsock.setblocking(False)
    if on_listening is not None:
        on_listening(lsock.getsockname()[:2])
    sel = selectors.DefaultSelector()
    sel.register(lsock, selectors.EVENT_READ, None)
    conns: dict[socket.socket, _Conn] = {}
    pending: list[_Conn] = []
    stats = {"requests": 0, "assigns": 0, "results": 0, "shutdowns": 0,
             "duplicates": 0, "reclaimed": 0, "dropped_connections": 0}
    all_done_since: Optional[float] = None

    def send(conn: _Conn, msg: WireMessage) -> None:
        conn.out += encode_message(msg)
        _update_interest(conn)

    def _update_interest(conn: _Conn) -> None:
        events = selectors.EVENT_READ
        if conn.out:
            events |= selectors.EVENT_WRITE
        try:
            sel.modify(conn.sock, events, conn)
        except (KeyError, ValueError):
            pass

    def drop(conn: _Conn, reason: str) -> None:
        if conn.sock not in conns:
            return
        log.info("dropping worker %s: %s", conn.addr, reason)
        stats["dropped_connections"] += 1
        _close(conn)
        freed = ledger.release_owned_by(conn)
        if freed:
            stats["reclaimed"] += len(freed)
            serve_pending()

    def _close(conn: _Conn) -> None:
        conns.pop(conn.sock, None)
        if conn in pending:
            pending.remove(conn)
        try:
            sel.unregister(conn.sock)
        except (KeyError, ValueError):
            pass
        try:
            conn.sock.close()
        except OSError:
            pass

    def answer_request(conn: _Conn) -> None:
        idx = ledger.acquire(conn)
        if idx is not None:
            conn.assigned_ever.add(idx)
            stats["assigns"] += 1
            send(conn, WireMessage(ASSIGN, task_index=idx))
        elif ledger.all_done:
            stats["shutdowns"] += 1
            conn.closing = True
            send(conn, WireMessage(SHUTDOWN))
        else:
            if conn not in pending:
                pending.append(conn)

    def serve_pending() -> None:
        while pending:
            if ledger.all_done:
                conn = pending.pop(0)
                stats["shutdowns"] += 1
                conn.closing = True
                send(conn, WireMessage(SHUTDOWN))
            else:
                idx = ledger.acquire(pending[0])
                if idx is None:
                    return
                conn = pending.pop(0)
                conn.assigned_ever.add(idx)
                stats["assigns"] += 1
                send(conn, WireMessage(ASSIGN, task_index=idx))

    def handle(conn: _Conn, msg: WireMessage) -> None:
        if msg.kind == REQUEST:
            stats["requests"] += 1
            answer_request(conn)
        elif msg.kind == RESULT:
            if msg.task_index not in conn.assigned_ever:
                raise ValueError(f"result for task {msg.task_index} never assigned here")
            stats["results"] += 1
            # only a diameter cap makes count diverge from raw leaves, and
            # the frame carries the filtered count alone
            row = ResultRow(
                task_index=msg.task_index,
                count=msg.count,
                elapsed_ms=msg.elapsed_ms,
                raw_count=msg.count if f.max_diameter is None else None,
                best_num=msg.best_num,
                best_den=msg.best_den,
                champion_count=msg.champion_count,
            )
            if ledger.complete(row):
                if writer is not None:
                    writer.append(row)
            else:
                stats["duplicates"] += 1
                log.info("duplicate result for task %d ignored", msg.task_index)
            serve_pending()
        else:
            raise ValueError(f"unexpected message kind {msg.kind} from worker")

    try:
        while True:
            if ledger.all_done and not conns and not pending:
                break
            if ledger.all_done:
                if all_done_since is None:
                    all_done_since = time.monotonic()
                elif time.monotonic() - all_done_since > linger_secs:
                    for conn in list(conns.values()):
                        drop(conn, "lingering after completion")
                    break
            timeout = _current_timeout(ledger, task_timeout_secs)
            now = time.monotonic()
            if timeout is not None:
                stale = ledger.stale_tasks(now, timeout)
                for idx in stale:
                    log.info("task %d timed out; reclaiming", idx)
                    ledger.release(idx)
                if stale:
                    stats["reclaimed"] += len(stale)
                    serve_pending()
            for key, events in sel.select(timeout=0.05):
                if key.data is None:
                    try:
                        csock, addr = lsock.accept()
                    except OSError:
                        continue
                    csock.setblocking(False)
                    csock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
                    conn = _Conn(csock, addr)
                    conns[csock] = conn
                    sel.register(csock, selectors.EVENT_READ, conn)
                    continue
                conn = key.data
                if events & selectors.EVENT_WRITE and conn.out:
                    try:
                        sent = conn.sock.send(conn.out)
                        del conn.out[:sent]
                    except (BlockingIOError, InterruptedError):
                        pass
                    except OSError:
                        drop(conn, "send failed")
                        continue
                    if not conn.out and conn.closing:
                        _close(conn)
                        continue
                    _update_interest(conn)
                if events & selectors.EVENT_READ:
                    try:
                        data = conn.sock.recv(65536)
                    except (BlockingIOError, InterruptedError):
                        continue
                    except OSError:
                        drop(conn, "recv failed")
                        continue
                    if not data:
                        drop(conn, "disconnected")
                        continue
                    try:
                        msgs = conn.buf.feed(data)
                        for msg in msgs:
                            handle(conn, msg)
                    except ValueError as exc:
                        drop(conn, f"malformed message: {exc}")
    finally:
        sel.close()
        lsock.close()
        for conn in list(conns.values()):
            _close(conn)
        if writer is not None:
            writer.close()

    final = empty_result(spec, f)
    final.per_task_counts = {}
    final.raw_count = 0
    for idx in range(task_count):
        final = merge(final, row_to_result(spec, f, ledger.rows[idx]))
    return RunReport(result=final, stats=stats, rows=dict(ledger.rows),
                     elapsed_secs=time.perf_counter() - t0, resumed_tasks=resumed)


def _current_timeout(ledger: TaskLedger, override: Optional[float]) -> Optional[float]:
    if override is not None:
        return override
    if ledger.done_count < 3:
        return None
    med = ledger.median_elapsed_secs() or 0.0
    return max(60.0, 10.0 * med)


# ---------------------------------------------------------------------------
# worker

def run_worker(master, spec: DegreeSpec, split_level: int, f: FilterSpec, *,
               champions_path: Optional[str] = None,
               connect_retries: int = 5, retry_delay: float = 0.2,
               task_runner: Optional[Callable[[int], tuple[ResultRow, SearchResult]]] = None
               ) -> RunReport:
    """Request/execute/report loop against a master; exits on SHUTDOWN.

    Connection loss triggers bounded reconnect with doubling backoff (the
    master reclaims anything in flight); retries exhausted raises. The
    worker keeps its own champion aggregate across tasks and can write it to
    champions_path at exit, since champion graphs never ride the wire.
    """
    host, port = _parse_endpoint(master)
    t0 = time.perf_counter()
    stats = {"requests": 0, "assigns": 0, "results": 0, "shutdowns": 0, "reconnects": 0}
    local = empty_result(spec, f)
    local.per_task_counts = {}
    rows: dict[int, ResultRow] = {}
    attempts = 0
    sock: Optional[socket.socket] = None
    try:
        while True:
            if sock is None:
                try:
                    sock = socket.create_connection((host, port), timeout=10.0)
                    sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
                    sock.settimeout(None)
                except OSError:
                    attempts += 1
                    if attempts > connect_retries:
                        raise RegenumError(
                            f"cannot reach master at {host}:{port} "
                            f"after {connect_retries} retries")
                    time.sleep(retry_delay * (2 ** (attempts - 1)))
                    continue
                if attempts:
                    stats["reconnects"] += 1
                attempts = 0
            try:
                stats["requests"] += 1
                sock.sendall(encode_message(WireMessage(REQUEST)))
                msg = read_message(sock)
                if msg is None:
                    raise ConnectionError("master closed the connection")
                if msg.kind == SHUTDOWN:
                    stats["shutdowns"] += 1
                    break
                if msg.kind != ASSIGN:
                    raise RegenumError(f"unexpected message kind {msg.kind} from master")
                stats["assigns"] += 1
                idx = msg.task_index
                if task_runner is not None:
                    row, state = task_runner(idx)
                else:
                    row, state, _ = execute_task(spec, split_level, idx, f)
                rows[idx] = row
                local = merge(local, state)
                sock.sendall(encode_message(WireMessage(
                    RESULT, task_index=idx, count=row.count,
                    best_num=row.best_num, best_den=row.best_den,
                    champion_count=row.champion_count, elapsed_ms=row.elapsed_ms)))
                stats["results"] += 1
            except (ConnectionError, OSError, socket.timeout):
                try:
                    sock.close()
                except OSError:
                    pass
                sock = None
                attempts = 1
    finally:
        if sock is not None:
            try:
                sock.close()
            except OSError:
                pass
    if champions_path is not None and f.track_min_aspl:
        with open(champions_path, "w", encoding="ascii") as fh:
            for g6 in local.champions:
                fh.write(g6 + "\n")
    return RunReport(result=local, stats=stats, rows=rows,
                     elapsed_secs=time.perf_counter() - t0)
