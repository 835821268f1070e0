"""Golden-handshake replay.

The fixture is a transcript: ``>`` lines are raw request bytes, ``<``
lines the exact response bytes the stub backend must produce.  The
replay feeds each request through the live handler and compares the
output byte for byte.
"""

from __future__ import annotations

from importlib import resources

from .backends import StubBackend
from .server import handle_line

FIXTURE = "golden_handshake.txt"


def fixture_text() -> str:
    return resources.files("scorer_bridge.fixtures").joinpath(FIXTURE) \
        .read_text("utf-8")


def transcript_pairs(text: str | None = None) -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = []
    request = None
    for line_no, raw in enumerate((text or fixture_text()).splitlines(), 1):
        if not raw or raw.startswith("#"):
            continue
        if raw.startswith("> "):
            if request is not None:
                raise ValueError(f"line {line_no}: request without response")
            request = raw[2:]
        elif raw.startswith("< "):
            if request is None:
                raise ValueError(f"line {line_no}: response without request")
            pairs.append((request, raw[2:]))
            request = None
        else:
            raise ValueError(f"line {line_no}: expected '> ' or '< ' prefix")
    if request is not None:
        raise ValueError("transcript ends with an unanswered request")
    return pairs


def run_selftest(verbose: bool = True) -> list[str]:
    """Replay the golden transcript; returns byte-level mismatches."""
    backend = StubBackend()
    failures = []
    pairs = transcript_pairs()
    for i, (request, expected) in enumerate(pairs, 1):
        got = handle_line(backend, request)
        if got != expected:
            failures.append(
                f"exchange {i}:\n  request:  {request}\n"
                f"  expected: {expected}\n  got:      {got}")
    if verbose:
        state = "ok" if not failures else "FAILED"
        print(f"selftest: {len(pairs)} exchanges, {len(failures)} mismatches "
              f"({state})")
        for f in failures:
            print(f)
    return failures
