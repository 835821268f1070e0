"""Slot matching and the coverage / slot-error-rate arithmetic.

Hard matching asks whether a slot value occurs verbatim in the output
(whole-token, case-insensitive).  Soft matching classifies each table
slot as covered, missing, or wrong via per-value regexes, and flags
mentions of slot types that are not in the table as added.  The slot
error rate is (added + missing + wrong) / slots, kept as an exact
fraction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .errors import EmptyCorpus, PatternError, ZeroSlots
from .tabular import Sentence, Slot, Table, detokenize, tokenize


@dataclass(frozen=True)
class MatchReport:
    """Per-sample (or pooled) soft-match classification counts."""

    missing: tuple[Slot, ...]
    added: tuple[str, ...]
    wrong: tuple[Slot, ...]
    n_slots: int


class MatchPatterns:
    """Per-(slot, value) regexes plus per-slot catch-all detectors.

    A (slot, value) without an explicit pattern matches through the
    implicit pattern: the escaped value, case-insensitive, bounded so
    it cannot match inside a longer word.
    """

    def __init__(self, value_patterns=None, detectors=None):
        self.value_patterns: dict[str, dict[str, list[re.Pattern]]] = value_patterns or {}
        self.detectors: dict[str, list[re.Pattern]] = detectors or {}

    @classmethod
    def empty(cls) -> "MatchPatterns":
        return cls()

    def patterns_for(self, slot: Slot) -> list[re.Pattern]:
        explicit = self.value_patterns.get(slot.name, {}).get(slot.value.casefold())
        if explicit:
            return explicit
        return [implicit_pattern(slot.value)]

    def sibling_patterns(self, slot: Slot) -> list[re.Pattern]:
        """Patterns of other values recorded for the same slot name."""
        out: list[re.Pattern] = []
        for value, pats in self.value_patterns.get(slot.name, {}).items():
            if value != slot.value.casefold():
                out.extend(pats)
        return out


def implicit_pattern(value: str) -> re.Pattern:
    # \b misbehaves next to non-word characters such as currency signs,
    # so use explicit look-arounds.
    return re.compile(rf"(?<!\w){re.escape(value.strip())}(?!\w)", re.IGNORECASE)


def _compile(line_no: int, pattern: str) -> re.Pattern:
    try:
        return re.compile(pattern, re.IGNORECASE)
    except re.error as exc:
        raise PatternError(f"line {line_no}: bad regex {pattern!r}: {exc}") from None


def parse_patterns(text: str) -> MatchPatterns:
    value_patterns: dict[str, dict[str, list[re.Pattern]]] = {}
    detectors: dict[str, list[re.Pattern]] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(";")]
        entries = {}
        for part in fields:
            key, sep, val = part.partition("=")
            if not sep:
                raise PatternError(f"line {line_no}: expected key=value, got {part!r}")
            entries[key.strip()] = val.strip()
        slot = entries.pop("slot", "").casefold()
        if not slot:
            raise PatternError(f"line {line_no}: missing slot=")
        if "detect" in entries and len(entries) == 1:
            detectors.setdefault(slot, []).append(_compile(line_no, entries["detect"]))
        elif {"value", "pattern"} == set(entries):
            value = entries["value"].casefold()
            if not value:
                raise PatternError(f"line {line_no}: empty value=")
            pat = _compile(line_no, entries["pattern"])
            value_patterns.setdefault(slot, {}).setdefault(value, []).append(pat)
        else:
            raise PatternError(
                f"line {line_no}: expected 'slot=; value=; pattern=' or 'slot=; detect='")
    return MatchPatterns(value_patterns, detectors)


def load_patterns(path) -> MatchPatterns:
    with open(path, encoding="utf-8") as fh:
        return parse_patterns(fh.read())


def e2e_patterns() -> MatchPatterns:
    """The bundled restaurant-domain soft-match patterns."""
    text = resources.files("tabletext.data").joinpath("patterns_e2e.txt").read_text("utf-8")
    return parse_patterns(text)


# ---------------------------------------------------------------------------
# Hard matching


def find_missing_hard(table: Table, sentence: Sentence) -> list[Slot]:
    """Slots whose value is not a whole-token subsequence of the output."""
    folded = [t.casefold() for t in sentence.tokens]
    missing = []
    for slot in table.slots:
        vtoks = [t.casefold() for t in tokenize(slot.value).tokens]
        L = len(vtoks)
        found = any(folded[i:i + L] == vtoks for i in range(len(folded) - L + 1))
        if not found:
            missing.append(slot)
    return missing


def corpus_coverage(samples) -> Fraction:
    """Fraction of slots whose value occurs verbatim, pooled over samples."""
    total = 0
    missing = 0
    n_samples = 0
    for table, sentence in samples:
        n_samples += 1
        total += len(table.slots)
        missing += len(find_missing_hard(table, sentence))
    if n_samples == 0 or total == 0:
        raise EmptyCorpus("coverage needs at least one sample with slots")
    return Fraction(total - missing, total)


# ---------------------------------------------------------------------------
# Soft matching


def classify_soft(table: Table, sentence: Sentence,
                  patterns: MatchPatterns) -> MatchReport:
    """Classify each table slot as covered / wrong / missing, plus added.

    A slot is wrong when its own value pattern fails but a sibling
    value's pattern for the same slot name fires.  A slot name with a
    catch-all detector that fires while absent from the table counts as
    added.
    """
    text = detokenize(sentence)
    missing: list[Slot] = []
    wrong: list[Slot] = []
    for slot in table.slots:
        if any(p.search(text) for p in patterns.patterns_for(slot)):
            continue
        if any(p.search(text) for p in patterns.sibling_patterns(slot)):
            wrong.append(slot)
        else:
            missing.append(slot)
    table_names = set(table.names)
    added = tuple(
        name for name, dets in patterns.detectors.items()
        if name not in table_names and any(p.search(text) for p in dets)
    )
    return MatchReport(tuple(missing), added, tuple(wrong), len(table.slots))


def ser(report: MatchReport) -> Fraction:
    """(added + missing + wrong) / slots, exact."""
    if report.n_slots <= 0:
        raise ZeroSlots("slot error rate undefined for zero slots")
    errors = len(report.added) + len(report.missing) + len(report.wrong)
    return Fraction(errors, report.n_slots)
