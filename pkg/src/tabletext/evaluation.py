"""Pooled evaluation report: coverage, slot error rate, length, BLEU.

All rates are micro-averaged exact fractions over pooled counts, so the
identities soft_coverage = 1 - SER and SER = added + missing + wrong
hold by construction.  The BLEU here is plain modified n-gram precision
with a brevity penalty against a single reference; it is diagnostic
plumbing, not the official script, and is labeled as such.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .errors import EmptyCorpus, LengthMismatch
from .match import MatchPatterns, classify_soft, find_missing_hard


@dataclass(frozen=True)
class EvalReport:
    n_samples: int
    n_slots: int
    n_hard_missing: int
    n_added: int
    n_missing: int
    n_wrong: int
    hard_coverage: Fraction
    ser: Fraction
    soft_coverage: Fraction
    added_rate: Fraction
    missing_rate: Fraction
    wrong_rate: Fraction
    avg_len: Fraction
    bleu_plumbing: float | None

    def to_dict(self) -> dict:
        d = {
            "n_samples": self.n_samples,
            "n_slots": self.n_slots,
            "n_hard_missing": self.n_hard_missing,
            "n_added": self.n_added,
            "n_missing": self.n_missing,
            "n_wrong": self.n_wrong,
            "hard_coverage": float(self.hard_coverage),
            "ser": float(self.ser),
            "soft_coverage": float(self.soft_coverage),
            "added_rate": float(self.added_rate),
            "missing_rate": float(self.missing_rate),
            "wrong_rate": float(self.wrong_rate),
            "avg_len": float(self.avg_len),
            "bleu_plumbing": self.bleu_plumbing,
        }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def format(self) -> str:
        pct = lambda f: f"{float(f) * 100:.2f}%"
        lines = [
            f"samples          {self.n_samples}",
            f"slots            {self.n_slots}",
            f"hard coverage    {pct(self.hard_coverage)}",
            f"SER              {pct(self.ser)}  "
            f"(add {pct(self.added_rate)}, miss {pct(self.missing_rate)}, "
            f"wrong {pct(self.wrong_rate)})",
            f"soft coverage    {pct(self.soft_coverage)}",
            f"avg length       {float(self.avg_len):.2f}",
        ]
        if self.bleu_plumbing is not None:
            lines.append(f"BLEU (plumbing)  {self.bleu_plumbing:.4f}")
        return "\n".join(lines) + "\n"


def _ngrams(tokens, n):
    return [tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def bleu_plumbing(outputs, refs, max_n: int = 4) -> float:
    """Corpus BLEU with one reference per output; 0 when any p_n is 0."""
    if len(outputs) != len(refs):
        raise LengthMismatch("outputs and refs differ in length")
    clipped = [0] * max_n
    totals = [0] * max_n
    cand_len = 0
    ref_len = 0
    for out, ref in zip(outputs, refs):
        cand_len += len(out.tokens)
        ref_len += len(ref.tokens)
        for n in range(1, max_n + 1):
            counts = Counter(_ngrams(out.tokens, n))
            ref_counts = Counter(_ngrams(ref.tokens, n))
            totals[n - 1] += sum(counts.values())
            clipped[n - 1] += sum(min(c, ref_counts[g]) for g, c in counts.items())
    if cand_len == 0 or any(t == 0 for t in totals):
        return 0.0
    if any(c == 0 for c in clipped):
        return 0.0
    log_mean = math.fsum(math.log(c / t) for c, t in zip(clipped, totals)) / max_n
    bp = 1.0 if cand_len > ref_len else math.exp(1 - ref_len / cand_len)
    return bp * math.exp(log_mean)


def evaluate(outputs, tables, refs=None,
             patterns: MatchPatterns | None = None) -> EvalReport:
    """Pooled report over aligned outputs and tables (refs optional)."""
    outputs = list(outputs)
    tables = list(tables)
    if len(outputs) != len(tables):
        raise LengthMismatch(
            f"{len(outputs)} outputs vs {len(tables)} tables")
    if refs is not None:
        refs = list(refs)
        if len(refs) != len(outputs):
            raise LengthMismatch(
                f"{len(refs)} refs vs {len(outputs)} outputs")
    if not outputs:
        raise EmptyCorpus("nothing to evaluate")
    patterns = patterns or MatchPatterns.empty()

    n_slots = 0
    n_hard_missing = 0
    n_added = n_missing = n_wrong = 0
    total_tokens = 0
    for out, table in zip(outputs, tables):
        total_tokens += len(out.tokens)
        n_slots += len(table.slots)
        n_hard_missing += len(find_missing_hard(table, out))
        report = classify_soft(table, out, patterns)
        n_added += len(report.added)
        n_missing += len(report.missing)
        n_wrong += len(report.wrong)
    if n_slots == 0:
        raise EmptyCorpus("tables contain no slots")

    ser = Fraction(n_added + n_missing + n_wrong, n_slots)
    return EvalReport(
        n_samples=len(outputs),
        n_slots=n_slots,
        n_hard_missing=n_hard_missing,
        n_added=n_added,
        n_missing=n_missing,
        n_wrong=n_wrong,
        hard_coverage=Fraction(n_slots - n_hard_missing, n_slots),
        ser=ser,
        soft_coverage=1 - ser,
        added_rate=Fraction(n_added, n_slots),
        missing_rate=Fraction(n_missing, n_slots),
        wrong_rate=Fraction(n_wrong, n_slots),
        avg_len=Fraction(total_tokens, len(outputs)),
        bleu_plumbing=bleu_plumbing(outputs, refs) if refs is not None else None,
    )
