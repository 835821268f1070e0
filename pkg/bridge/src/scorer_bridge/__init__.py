"""Serve any pretrained seq2seq model as a wire-protocol sentence scorer."""

from .backends import StubBackend, TransformersBackend, load_backend
from .server import BridgeConfig, BridgeServer, handle_line, serve, serve_stdio
from .selftest import run_selftest

__version__ = "0.1.0"
