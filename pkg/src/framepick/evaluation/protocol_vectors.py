"""Conformance vectors for adapter implementations.

Any adapter claiming to speak the wire protocol can be checked with
run_protocol_vectors(cmd). The vectors drive the adapter process
directly (no AdapterClient) so they verify the process itself:

  1. a single request is answered with its own id
  2. 100 pipelined requests are all answered, arrival order free
  3. a non-JSON line does not kill the process; at most an id="" error
     response may precede the next real answer
  4. a JSON request with an id but missing fields draws an error
     response with the same id and empty text
  5. closing stdin ends the process with exit code 0

Failures raise AssertionError naming the vector.
"""

from __future__ import annotations

import json
import queue
import subprocess
import tempfile
import threading
from pathlib import Path

PIPELINE_COUNT = 100


class _AdapterUnderTest:
    def __init__(self, cmd: list[str], timeout_s: float) -> None:
        self.timeout_s = timeout_s
        self.proc = subprocess.Popen(
            cmd,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
            encoding="utf-8",
            bufsize=1,
        )
        self.lines: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._read, daemon=True)
        self._reader.start()

    def _read(self) -> None:
        assert self.proc.stdout is not None
        for line in self.proc.stdout:
            self.lines.put(line)

    def send(self, doc: dict | str) -> None:
        assert self.proc.stdin is not None
        line = doc if isinstance(doc, str) else json.dumps(doc, ensure_ascii=False)
        self.proc.stdin.write(line + "\n")
        self.proc.stdin.flush()

    def next_response(self, vector: str) -> dict:
        try:
            line = self.lines.get(timeout=self.timeout_s)
        except queue.Empty:
            raise AssertionError(f"{vector}: no response within {self.timeout_s}s")
        try:
            doc = json.loads(line)
        except json.JSONDecodeError:
            raise AssertionError(f"{vector}: adapter wrote invalid JSON: {line!r}")
        if (
            not isinstance(doc, dict)
            or not isinstance(doc.get("id"), str)
            or not isinstance(doc.get("text"), str)
        ):
            raise AssertionError(f"{vector}: response is not {{id, text}}: {line!r}")
        return doc


def run_protocol_vectors(
    cmd: list[str], *, image_file: str | None = None, timeout_s: float = 20.0
) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        if image_file is None:
            image = Path(tmp) / "frame_0.png"
            image.write_bytes(b"\x89PNG\r\n\x1a\n")
            image_file = str(image)
        adapter = _AdapterUnderTest(cmd, timeout_s)
        try:
            _vector_single(adapter, image_file)
            _vector_pipelined(adapter, image_file)
            _vector_garbage_recovery(adapter, image_file)
            _vector_wrong_shape(adapter)
            _vector_shutdown(adapter)
        finally:
            if adapter.proc.poll() is None:
                adapter.proc.kill()
                adapter.proc.wait()


def _request(request_id: str, image_file: str) -> dict:
    return {
        "id": request_id,
        "prompt": "Q\nA. yes\nB. no\nAnswer with the option's letter only.",
        "images": [image_file],
    }


def _vector_single(adapter: _AdapterUnderTest, image_file: str) -> None:
    adapter.send(_request("single-1", image_file))
    doc = adapter.next_response("vector 1 (single request)")
    assert doc["id"] == "single-1", (
        f"vector 1: responded to id {doc['id']!r}, expected 'single-1'"
    )


def _vector_pipelined(adapter: _AdapterUnderTest, image_file: str) -> None:
    ids = [f"pipe-{i:03d}" for i in range(PIPELINE_COUNT)]
    for request_id in ids:
        adapter.send(_request(request_id, image_file))
    seen = set()
    for _ in ids:
        doc = adapter.next_response("vector 2 (pipelined)")
        assert doc["id"] in ids, f"vector 2: unknown response id {doc['id']!r}"
        assert doc["id"] not in seen, f"vector 2: duplicate response {doc['id']!r}"
        seen.add(doc["id"])
    assert len(seen) == PIPELINE_COUNT


def _vector_garbage_recovery(adapter: _AdapterUnderTest, image_file: str) -> None:
    adapter.send("this is not json {{{")
    adapter.send(_request("after-garbage", image_file))
    while True:
        doc = adapter.next_response("vector 3 (garbage recovery)")
        if doc["id"] == "after-garbage":
            return
        assert doc["id"] == "", (
            f"vector 3: unexpected response id {doc['id']!r} after garbage line"
        )


def _vector_wrong_shape(adapter: _AdapterUnderTest) -> None:
    adapter.send({"id": "shape-1"})
    while True:
        doc = adapter.next_response("vector 4 (wrong-shape request)")
        if doc["id"] == "":
            continue  # stray garbage-line error from vector 3, reordered
        assert doc["id"] == "shape-1", (
            f"vector 4: error response must reuse the request id, got {doc['id']!r}"
        )
        assert doc["text"] == "", (
            f"vector 4: error response text must be empty, got {doc['text']!r}"
        )
        return


def _vector_shutdown(adapter: _AdapterUnderTest) -> None:
    assert adapter.proc.stdin is not None
    adapter.proc.stdin.close()
    try:
        code = adapter.proc.wait(timeout=adapter.timeout_s)
    except subprocess.TimeoutExpired:
        raise AssertionError("vector 5: adapter did not exit after stdin closed")
    assert code == 0, f"vector 5: exit code {code}, expected 0"
