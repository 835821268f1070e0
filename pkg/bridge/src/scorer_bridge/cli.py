"""scorer-bridge entry point."""

from __future__ import annotations

import argparse
import sys

from .backends import load_backend
from .selftest import run_selftest
from .server import BridgeConfig, serve


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scorer-bridge",
        description="Serve a sentence scorer over newline-delimited JSON.")
    parser.add_argument("--model", default="stub",
                        help="'stub' or a seq2seq model id / local path")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--max-batch", type=int, default=32)
    parser.add_argument("--sampling", action="store_true",
                        help="allow sampled generation (default: deterministic)")
    parser.add_argument("--transport", default="stdio",
                        help="'stdio' or 'tcp:PORT'")
    parser.add_argument("--selftest", action="store_true",
                        help="replay the golden handshake against the stub")
    return parser


def cli(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.selftest:
        return 1 if run_selftest() else 0
    config = BridgeConfig(
        model=args.model,
        device=args.device,
        max_batch=args.max_batch,
        deterministic=not args.sampling,
        transport=args.transport,
    )
    backend = load_backend(config.model, config.device, config.max_batch,
                           config.deterministic)
    try:
        serve(backend, config)
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
    return 0


def main() -> None:
    sys.exit(cli(sys.argv[1:]))
