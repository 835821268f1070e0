"""Greedy projection of an output into the set of feasible sentences.

A sentence is feasible for a table when every required slot is present:
non-boolean slots by their verbatim value, boolean (yes/no) slots by
their rendered phrase.  For each missing slot, in table order, the
rendered phrase is tried at every token boundary and the position with
the highest scorer probability wins; ties go to the leftmost position.
Earlier insertions are never revisited.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import EmptyCorpus
from .lm import score_batch
from .match import find_missing_hard
from .tabular import Sentence, Slot, Table, detokenize, is_boolean_value, tokenize
from .templates import RuleSet, render


@dataclass(frozen=True)
class InsertionStep:
    slot_name: str
    phrase: str
    position: int
    score: float
    n_candidates: int

    def to_record(self) -> dict:
        return {
            "slot": self.slot_name,
            "phrase": self.phrase,
            "position": self.position,
            "score": self.score,
            "n_candidates": self.n_candidates,
        }


@dataclass(frozen=True)
class InsertionTrace:
    steps: tuple[InsertionStep, ...] = ()


def _tokens_present(sentence: Sentence, phrase: Sentence) -> bool:
    folded = [t.casefold() for t in sentence.tokens]
    want = [t.casefold() for t in phrase.tokens]
    L = len(want)
    if L == 0:
        return True
    return any(folded[i:i + L] == want for i in range(len(folded) - L + 1))


def slot_satisfied(slot: Slot, sentence: Sentence, ruleset: RuleSet) -> bool:
    """Value present verbatim; for boolean values, the phrase instead."""
    if is_boolean_value(slot.value):
        return _tokens_present(sentence, render(ruleset, slot))
    return not find_missing_hard(Table((slot,)), sentence)


def _satisfying_span(slot: Slot, sentence: Sentence, ruleset: RuleSet):
    """First (start, end) token span that makes the slot count as covered."""
    if is_boolean_value(slot.value):
        want = [t.casefold() for t in render(ruleset, slot).tokens]
    else:
        want = [t.casefold() for t in tokenize(slot.value).tokens]
    folded = [t.casefold() for t in sentence.tokens]
    L = len(want)
    for i in range(len(folded) - L + 1):
        if folded[i:i + L] == want:
            return (i, i + L)
    return None


def best_insertion(scorer, table: Table, sentence: Sentence,
                   phrase: Sentence, positions=None):
    """Try the phrase at token boundaries, keep the scorer argmax.

    All len+1 boundaries by default; ``positions`` restricts the
    candidate set.  Returns (new sentence, position, score, trace
    step).  Candidates are scored as one batch; ties go to the smaller
    position; the original tokens are never reordered.
    """
    if not phrase.tokens:
        raise ValueError("cannot insert an empty phrase")
    if positions is None:
        positions = range(len(sentence.tokens) + 1)
    positions = list(positions)
    candidates = [sentence.insert(pos, phrase) for pos in positions]
    scores = score_batch(scorer, table, candidates)
    best = 0
    for i in range(1, len(candidates)):
        if scores[i] > scores[best]:
            best = i
    step = InsertionStep(
        slot_name="",
        phrase=detokenize(phrase),
        position=positions[best],
        score=scores[best],
        n_candidates=len(candidates),
    )
    return candidates[best], positions[best], scores[best], step


def project_to_feasible(scorer, table: Table, sentence: Sentence,
                        ruleset: RuleSet, slot_filter=None):
    """Insert a rendered phrase for every missing filtered slot.

    ``slot_filter`` is a collection of slot names (None means all
    slots).  Missing slots are handled greedily in table order; a
    feasible input comes back unchanged with an empty trace.
    """
    if slot_filter is None:
        selected = [s for s in table.slots]
    else:
        wanted = set(slot_filter)
        selected = [s for s in table.slots if s.name in wanted]
    missing = [s for s in selected if not slot_satisfied(s, sentence, ruleset)]
    steps: list[InsertionStep] = []
    for slot in missing:
        phrase = render(ruleset, slot)
        sentence, _, _, step = best_insertion(scorer, table, sentence, phrase)
        steps.append(replace(step, slot_name=slot.name))
    # A scorer is free to drop a phrase inside an earlier multi-token
    # span and un-cover its slot ("The Mill" + "pub" -> "The pub Mill").
    # Repair rounds reinsert with span interiors off limits, so each
    # round settles at least one slot for good and the loop is bounded.
    for _ in range(len(selected)):
        still = [s for s in selected if not slot_satisfied(s, sentence, ruleset)]
        if not still:
            break
        spans = [
            span for s in selected
            if (span := _satisfying_span(s, sentence, ruleset)) is not None
        ]
        allowed = [
            pos for pos in range(len(sentence.tokens) + 1)
            if not any(start < pos < end for start, end in spans)
        ]
        phrase = render(ruleset, still[0])
        sentence, _, _, step = best_insertion(scorer, table, sentence, phrase,
                                              positions=allowed)
        steps.append(replace(step, slot_name=still[0].name))
    still = [s for s in selected if not slot_satisfied(s, sentence, ruleset)]
    if still:
        raise AssertionError(
            f"projection left slots uncovered: {[s.name for s in still]}")
    return sentence, InsertionTrace(tuple(steps))


def select_slots_by_stats(corpus_p, table: Table, tau_table: float,
                          tau_ref: float) -> list[Slot]:
    """Slots worth inserting, by corpus statistics.

    Keeps a slot when its name occurs in at least ``tau_table`` of the
    corpus tables and, among samples having that slot, its value is
    verbatim-present in at least ``tau_ref`` of their references.  A
    name never seen in the corpus has no reference evidence and is kept
    only when both thresholds are zero.
    """
    pairs = list(corpus_p)
    if not pairs:
        raise EmptyCorpus("slot statistics need a non-empty corpus")
    # Binary floats would turn a threshold like 0.1 into something
    # slightly above 1/10 and break the "at least 10%" boundary case.
    tau_table = Fraction(tau_table).limit_denominator(10**9)
    tau_ref = Fraction(tau_ref).limit_denominator(10**9)
    n_tables = len(pairs)
    with_name: dict[str, int] = {}
    present: dict[str, int] = {}
    for t, ref in pairs:
        missing = {s.name for s in find_missing_hard(t, ref)}
        for s in t.slots:
            with_name[s.name] = with_name.get(s.name, 0) + 1
            if s.name not in missing:
                present[s.name] = present.get(s.name, 0) + 1
    selected = []
    for slot in table.slots:
        occ = with_name.get(slot.name, 0)
        table_freq = Fraction(occ, n_tables)
        ref_freq = Fraction(present.get(slot.name, 0), occ) if occ else Fraction(0)
        if table_freq >= tau_table and ref_freq >= tau_ref:
            selected.append(slot)
    return selected
