#!/usr/bin/env python3
"""The whole loop: train, repair the unlabeled decodes, retrain.

Compares held-out slot coverage of the first-stage model, the
self-training baseline (retrain on raw decodes), and the
search-and-learn model (retrain on repaired decodes), then shows why
inference skips the search.
"""

import time
from pathlib import Path

from tabletext import corpus_coverage, detokenize, e2e_rules
from tabletext.corpusio import read_parallel, read_unlabeled
from tabletext.lm import LocalScorer, decode
from tabletext.pipeline import (
    Corpus,
    ParallelSample,
    PipelineConfig,
    build_pseudo_corpus,
    infer,
    self_train,
    stage1,
    stage2,
)
from tabletext.search import project_to_feasible

data = Path(__file__).resolve().parent.parent / "data" / "toy"
config = PipelineConfig()
corpus = Corpus(tuple(
    ParallelSample(t, s) for t, s in read_parallel(data / "parallel.tsv")))
tables_u = read_unlabeled(data / "unlabeled.txt")
test_pairs = read_parallel(data / "test.tsv")
test_tables = [t for t, _ in test_pairs]

print(f"parallel: {len(corpus.parallel)}  unlabeled: {len(tables_u)}  "
      f"held-out: {len(test_tables)}")

m1 = stage1(corpus, config)
cov = lambda m: float(corpus_coverage(
    [(t, infer(m, t, config)) for t in test_tables]))
print(f"\nstage-1 held-out coverage:        {cov(m1):.2%}")

pseudo = build_pseudo_corpus(m1, tables_u, e2e_rules(), config)
pseudo_cov = corpus_coverage([(s.table, s.sentence) for s in pseudo])
print(f"pseudo corpus coverage (search):  {float(pseudo_cov):.2%}")

m_st = self_train(m1, corpus, tables_u, config)
print(f"self-train held-out coverage:     {cov(m_st):.2%}")

m2 = stage2(corpus, pseudo, config)
print(f"search-and-learn held-out cover:  {cov(m2):.2%}")

print("\nsample outputs of the final model:")
for t in test_tables[:4]:
    print("  ", detokenize(infer(m2, t, config)))

start = time.perf_counter()
for t in test_tables:
    infer(m2, t, config)
plain = time.perf_counter() - start
scorer = LocalScorer(m2)
start = time.perf_counter()
for t in test_tables:
    raw = decode(m2, t, max_len=config.max_len, beam_width=config.beam_width)
    project_to_feasible(scorer, t, raw, e2e_rules())
with_search = time.perf_counter() - start
print(f"\ninference: {plain:.3f}s plain vs {with_search:.3f}s with search "
      f"({with_search / plain:.1f}x), which is why deployment decodes only.")
