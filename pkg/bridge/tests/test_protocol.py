"""Protocol conformance of the bridge request loop."""

import io
import json
import math

from scorer_bridge.backends import StubBackend
from scorer_bridge.server import handle_line, serve_stdio


def _exchange(line):
    return json.loads(handle_line(StubBackend(), line))


class TestScore:
    def test_one_float_per_candidate(self):
        response = _exchange(json.dumps({
            "id": 9, "op": "score", "table": "name[Aromi]",
            "candidates": ["a", "b", "c", "d", "e"]}))
        assert response["id"] == 9
        assert len(response["log_probs"]) == 5
        assert all(isinstance(v, float) and math.isfinite(v)
                   for v in response["log_probs"])

    def test_duplicate_candidates_equal(self):
        response = _exchange(json.dumps({
            "id": 1, "op": "score", "table": "a[1]",
            "candidates": ["same text", "other", "same text"]}))
        lp = response["log_probs"]
        assert lp[0] == lp[2] and lp[0] != lp[1]

    def test_empty_batch(self):
        response = _exchange(json.dumps({
            "id": 2, "op": "score", "table": "a[1]", "candidates": []}))
        assert response["log_probs"] == []

    def test_unicode_candidates(self):
        response = _exchange(json.dumps({
            "id": 3, "op": "score", "table": "near[Café Rouge]",
            "candidates": ["near Café Rouge £20-25"]}))
        assert len(response["log_probs"]) == 1

    def test_wrong_candidate_type(self):
        response = _exchange(json.dumps({
            "id": 4, "op": "score", "table": "a[1]", "candidates": [1, 2]}))
        assert response["id"] == 4 and "error" in response


class TestGenerate:
    def test_text_response(self):
        response = _exchange(json.dumps({
            "id": 5, "op": "generate", "table": "name[The Mill]area[riverside]",
            "max_len": 10}))
        assert response["id"] == 5
        assert "The Mill" in response["text"]

    def test_deterministic(self):
        req = json.dumps({"id": 6, "op": "generate", "table": "a[x]"})
        assert handle_line(StubBackend(), req) == handle_line(StubBackend(), req)


class TestErrors:
    def test_bad_json_gets_id_minus_one(self):
        response = _exchange("{broken")
        assert response["id"] == -1 and "error" in response

    def test_non_object_request(self):
        response = _exchange("[1, 2, 3]")
        assert response["id"] == -1

    def test_unknown_op_echoes_id(self):
        response = _exchange(json.dumps({"id": 11, "op": "dance"}))
        assert response["id"] == 11 and "error" in response

    def test_missing_field(self):
        response = _exchange(json.dumps({"id": 12, "op": "score"}))
        assert response["id"] == 12 and "missing field" in response["error"]


class TestLoop:
    def test_connection_survives_garbage(self):
        requests = [
            "garbage",
            json.dumps({"id": 1, "op": "nope"}),
            json.dumps({"id": 2, "op": "score", "table": "a[1]",
                        "candidates": ["ok"]}),
        ]
        stdin = io.StringIO("\n".join(requests) + "\n")
        stdout = io.StringIO()
        serve_stdio(StubBackend(), stdin, stdout)
        lines = stdout.getvalue().splitlines()
        assert len(lines) == 3  # one response per request, in order
        assert json.loads(lines[0])["id"] == -1
        assert json.loads(lines[1])["id"] == 1
        assert json.loads(lines[2])["log_probs"]

    def test_responses_in_request_order(self):
        requests = [json.dumps({"id": i, "op": "score", "table": "a[1]",
                                "candidates": [f"c{i}"]}) for i in range(5)]
        stdin = io.StringIO("\n".join(requests) + "\n")
        stdout = io.StringIO()
        serve_stdio(StubBackend(), stdin, stdout)
        ids = [json.loads(line)["id"] for line in stdout.getvalue().splitlines()]
        assert ids == [0, 1, 2, 3, 4]
