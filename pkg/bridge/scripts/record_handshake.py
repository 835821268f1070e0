#!/usr/bin/env python3
"""Record the golden handshake transcript against the stub backend.

Rerunning must reproduce the committed fixture byte for byte; the
selftest and the protocol-conformance test replay it.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from scorer_bridge.backends import StubBackend  # noqa: E402
from scorer_bridge.server import handle_line  # noqa: E402

REQUESTS = [
    '{"id": 1, "op": "score", "table": "name[Aromi]area[riverside]", '
    '"candidates": ["Aromi is in riverside.", "Aromi.", '
    '"in riverside area Aromi is."]}',
    '{"id": 2, "op": "score", "table": "name[Café Rouge]pricerange[£20-25]", '
    '"candidates": ["Café Rouge costs £20-25.", "Café Rouge costs £20-25."]}',
    '{"id": 3, "op": "score", "table": "a[1]", "candidates": []}',
    '{"id": 4, "op": "generate", "table": "name[The Mill]eattype[pub]", '
    '"max_len": 12}',
    '{"id": 5, "op": "score", "table": "a[1]"}',
    '{"id": 6, "op": "teleport", "table": "a[1]"}',
    'this is not json',
    '{"id": 7, "op": "score", "table": "a[1]", "candidates": ["still alive"]}',
]


def main():
    backend = StubBackend()
    lines = ["# Golden handshake: '>' request bytes, '<' expected response bytes.",
             "# Recorded by scripts/record_handshake.py against the stub backend."]
    for request in REQUESTS:
        lines.append("> " + request)
        lines.append("< " + handle_line(backend, request))
    out = Path(__file__).resolve().parent.parent / "src" / "scorer_bridge" \
        / "fixtures" / "golden_handshake.txt"
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(REQUESTS)} exchanges -> {out}")


if __name__ == "__main__":
    main()
