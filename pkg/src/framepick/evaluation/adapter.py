"""Client side of the adapter wire protocol.

One JSON document per line over the adapter process's stdin/stdout:

    request   {"id": str, "prompt": str, "images": [str, ...]}
    response  {"id": str, "text": str}

Responses are matched to requests by id, never by arrival order, so the
adapter may pipeline and reorder freely. A reader thread resolves
per-id futures; requests in flight are bounded by a semaphore. A late
response for a request that already timed out is dropped silently; a
response whose id was never issued, or a line that is not a valid
response document, kills the run (the cell cannot be trusted after a
protocol violation).
"""

from __future__ import annotations

import json
import subprocess
import threading
from collections import deque
from concurrent import futures as _futures

from ..errors import AdapterError, AdapterTimeout, ProtocolError, ValidationError

DEFAULT_MAX_IN_FLIGHT = 4
DEFAULT_TIMEOUT_S = 60.0


class AdapterClient:
    """Owns one adapter subprocess for the duration of a run."""

    def __init__(
        self,
        cmd: list[str],
        *,
        max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
        timeout_s: float = DEFAULT_TIMEOUT_S,
    ) -> None:
        if not cmd:
            raise ValidationError("adapter command must be non-empty")
        if max_in_flight < 1:
            raise ValidationError(f"max_in_flight must be >= 1, got {max_in_flight}")
        if not timeout_s > 0:
            raise ValidationError(f"timeout_s must be > 0, got {timeout_s}")
        self._cmd = list(cmd)
        self._timeout_s = timeout_s
        self._slots = threading.Semaphore(max_in_flight)
        self._lock = threading.Lock()
        self._write_lock = threading.Lock()
        self._pending: dict[str, _futures.Future] = {}
        self._abandoned: set[str] = set()
        self._fatal: Exception | None = None
        self._stderr_tail: deque[str] = deque(maxlen=50)
        self._proc: subprocess.Popen | None = None
        self._reader: threading.Thread | None = None
        self._drainer: threading.Thread | None = None

    def start(self) -> None:
        try:
            self._proc = subprocess.Popen(
                self._cmd,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise AdapterError(f"cannot start adapter {self._cmd[0]!r}: {exc}") from exc
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()
        self._drainer = threading.Thread(target=self._drain_stderr, daemon=True)
        self._drainer.start()

    def __enter__(self) -> "AdapterClient":
        self.start()
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    @property
    def returncode(self) -> int | None:
        return self._proc.returncode if self._proc else None

    def stderr_tail(self) -> str:
        return "".join(self._stderr_tail).strip()

    def query(self, request_id: str, prompt: str, image_paths: list[str]) -> str:
        """Send one request and block for its response text."""
        if self._proc is None:
            raise AdapterError("adapter not started")
        self._slots.acquire()
        try:
            future: _futures.Future = _futures.Future()
            with self._lock:
                if self._fatal is not None:
                    raise self._fatal
                if request_id in self._pending or request_id in self._abandoned:
                    raise ValidationError(f"duplicate request id {request_id!r}")
                self._pending[request_id] = future
            line = json.dumps(
                {"id": request_id, "prompt": prompt, "images": list(image_paths)},
                ensure_ascii=False,
            )
            try:
                with self._write_lock:
                    assert self._proc.stdin is not None
                    self._proc.stdin.write(line + "\n")
                    self._proc.stdin.flush()
            except (OSError, ValueError) as exc:
                with self._lock:
                    self._pending.pop(request_id, None)
                raise self._fail(
                    AdapterError(f"adapter stdin closed: {exc}; {self._diag()}")
                )
            try:
                return future.result(timeout=self._timeout_s)
            except _futures.TimeoutError:
                with self._lock:
                    if self._pending.pop(request_id, None) is not None:
                        self._abandoned.add(request_id)
                raise AdapterTimeout(
                    f"no response for {request_id!r} within {self._timeout_s}s"
                ) from None
        finally:
            self._slots.release()

    def close(self) -> None:
        proc = self._proc
        if proc is None:
            return
        if proc.stdin and not proc.stdin.closed:
            try:
                proc.stdin.close()
            except OSError:
                pass
        try:
            proc.wait(timeout=10)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait()
        if self._reader:
            self._reader.join(timeout=5)
        if self._drainer:
            self._drainer.join(timeout=5)

    def _diag(self) -> str:
        tail = self.stderr_tail()
        return f"adapter stderr: {tail!r}" if tail else "adapter stderr empty"

    def _fail(self, error: Exception) -> Exception:
        """Record a fatal error and wake every pending caller with it."""
        with self._lock:
            if self._fatal is None:
                self._fatal = error
            pending = list(self._pending.values())
            self._pending.clear()
        for future in pending:
            future.set_exception(error)
        return error

    def _read_loop(self) -> None:
        assert self._proc is not None and self._proc.stdout is not None
        for line in self._proc.stdout:
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError:
                self._fail(
                    ProtocolError(f"adapter wrote invalid JSON: {line!r}; {self._diag()}")
                )
                return
            if (
                not isinstance(doc, dict)
                or not isinstance(doc.get("id"), str)
                or not isinstance(doc.get("text"), str)
            ):
                self._fail(
                    ProtocolError(
                        f"adapter response must be {{id, text}}: {line!r}; {self._diag()}"
                    )
                )
                return
            with self._lock:
                future = self._pending.pop(doc["id"], None)
                if future is None and doc["id"] in self._abandoned:
                    self._abandoned.discard(doc["id"])
                    continue
            if future is None:
                self._fail(
                    ProtocolError(
                        f"adapter answered unknown request id {doc['id']!r}; "
                        f"{self._diag()}"
                    )
                )
                return
            future.set_result(doc["text"])
        with self._lock:
            outstanding = len(self._pending)
        if outstanding:
            self._fail(
                ProtocolError(
                    f"adapter closed stdout with {outstanding} requests "
                    f"outstanding; {self._diag()}"
                )
            )

    def _drain_stderr(self) -> None:
        assert self._proc is not None and self._proc.stderr is not None
        for line in self._proc.stderr:
            self._stderr_tail.append(line)
