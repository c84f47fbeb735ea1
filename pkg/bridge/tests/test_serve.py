import io
import json
import subprocess
import sys

import pytest

from framebridge.errors import UsageError
from framebridge.serve import build_model, serve

SERVE_CMD = [sys.executable, "-m", "framebridge", "serve", "--model", "fixed:b"]


def _run_lines(lines):
    out = io.StringIO()
    serve(build_model("fixed:b"), stdin=io.StringIO("".join(lines)), stdout=out)
    return [json.loads(line) for line in out.getvalue().splitlines()]


def _request(request_id):
    return (
        json.dumps({"id": request_id, "prompt": "Q?", "images": ["/tmp/f.png"]})
        + "\n"
    )


def test_fixed_model_answers_uppercased_letter():
    got = _run_lines([_request("q1")])
    assert got == [{"id": "q1", "text": "B"}]


def test_every_request_gets_exactly_one_response_in_order():
    got = _run_lines([_request(f"q{i}") for i in range(20)])
    assert [doc["id"] for doc in got] == [f"q{i}" for i in range(20)]


def test_malformed_json_keeps_serving():
    got = _run_lines(["not json {{{\n", _request("q2")])
    assert got[0] == {"id": "", "text": ""}
    assert got[1]["id"] == "q2"


def test_wrong_shape_reuses_the_request_id():
    got = _run_lines([json.dumps({"id": "q3"}) + "\n", _request("q4")])
    assert got[0] == {"id": "q3", "text": ""}
    assert got[1] == {"id": "q4", "text": "B"}


@pytest.mark.parametrize(
    "doc",
    [
        {"id": 7, "prompt": "Q?", "images": []},
        {"prompt": "Q?", "images": []},
        {"id": "x", "prompt": "Q?", "images": "f.png"},
        {"id": "x", "prompt": "Q?", "images": [3]},
        ["id", "prompt"],
    ],
)
def test_invalid_requests_draw_empty_text(doc):
    got = _run_lines([json.dumps(doc) + "\n"])
    assert len(got) == 1
    assert got[0]["text"] == ""


def test_blank_lines_are_ignored():
    got = _run_lines(["\n", "   \n", _request("q5")])
    assert len(got) == 1


@pytest.mark.parametrize("spec", ["fixed:", "fixed:AB", "fixed:9", "gpt4", "hosted:x"])
def test_bad_model_specs(spec):
    with pytest.raises(UsageError):
        build_model(spec)


def test_process_exits_zero_on_eof():
    proc = subprocess.run(
        SERVE_CMD,
        input=_request("only"),
        capture_output=True,
        text=True,
        timeout=30,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout.strip()) == {"id": "only", "text": "B"}


def test_unknown_model_exits_with_usage_code():
    proc = subprocess.run(
        [sys.executable, "-m", "framebridge", "serve", "--model", "oracle"],
        input="",
        capture_output=True,
        text=True,
        timeout=30,
    )
    assert proc.returncode == 1
    assert "unknown model" in proc.stderr
