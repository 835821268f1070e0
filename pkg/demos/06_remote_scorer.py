#!/usr/bin/env python3
"""Plugging a remote scorer into the search.

The insertion search only needs something that scores candidate
sentences, so the builtin model can be swapped for any process that
speaks the newline-delimited JSON protocol.  Here the reference server
hosts the builtin model over TCP and the search consumes it remotely;
the scorer-bridge package serves a neural model the same way.
"""

from pathlib import Path

from tabletext import detokenize, e2e_rules, fit, parse_mr, tokenize
from tabletext.corpusio import read_parallel
from tabletext.lm import LocalScorer
from tabletext.remote import ModelServer, RemoteScorer
from tabletext.search import project_to_feasible

data = Path(__file__).resolve().parent.parent / "data" / "toy"
model = fit(read_parallel(data / "parallel.tsv"))

server = ModelServer(model)
server.start_background()
print("reference server listening on", server.endpoint)

remote = RemoteScorer(server.endpoint, timeout=10.0)
table = parse_mr("name[Strada], food[French], area[city centre]")
candidates = [tokenize("Strada serves French food ."),
              tokenize("Strada serves French food city centre area .")]
print("\nremote scores:")
for sentence, score in zip(candidates,
                           remote.score_batch(table, candidates)):
    local = LocalScorer(model).log_prob(table, sentence)
    print(f"  {score:9.3f} (local {local:9.3f})  {detokenize(sentence)}")

repaired, trace = project_to_feasible(
    remote, table, tokenize("Strada is popular ."), e2e_rules())
print("\nsearch with the remote scorer:", detokenize(repaired))
print("insertions:", [(s.slot_name, s.position) for s in trace.steps])

remote.close()
server.shutdown()
print("server stopped.")
