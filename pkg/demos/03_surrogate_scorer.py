#!/usr/bin/env python3
"""The count-based conditional scorer P(sentence | table).

Fit the delexicalized n-gram model on the bundled 100-pair corpus,
inspect a next-token distribution, score candidates, and decode.
"""

from pathlib import Path

from tabletext import LocalScorer, decode, detokenize, fit, log_prob, \
    next_token_dist, parse_mr, tokenize
from tabletext.corpusio import read_parallel

data = Path(__file__).resolve().parent.parent / "data" / "toy"
pairs = read_parallel(data / "parallel.tsv")
model = fit(pairs, order=3)
print(f"fitted on {len(pairs)} pairs; vocabulary of {model.vocab_size} tokens")

table = parse_mr("name[Zizzi], eatType[pub], food[Chinese], area[riverside]")
dist = next_token_dist(model, ["is", "a"], table)
top = sorted(dist.items(), key=lambda kv: -kv[1])[:5]
print("\nP(token | ... 'is a') for this table:")
for token, p in top:
    print(f"  {token:<22} {p:.4f}")
print("  (placeholders of absent slots carry exactly zero:",
      f"P(__near__) = {dist['__near__']})")

scorer = LocalScorer(model)
candidates = [
    "Zizzi is a Chinese pub riverside area .",
    "Zizzi is a Chinese pub .",
    "riverside pub a is Zizzi .",
]
print("\ncandidate log probabilities:")
for text in candidates:
    print(f"  {log_prob(scorer, table, tokenize(text)):9.3f}  {text}")

out = decode(model, table, max_len=40, beam_width=1)
print("\ngreedy decode:", detokenize(out))
