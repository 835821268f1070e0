"""Conditional sentence scorer: a delexicalized interpolated n-gram model.

The model estimates P(sentence | table) as the product of per-token
probabilities over the delexicalized token stream.  Conditioning on the
table happens two ways: slot values are abstracted into ``__name__``
placeholders before counting, and at prediction time the placeholders
of slots absent from the table get probability zero with the mass
renormalized over the rest.

Probabilities interpolate all orders from unigram up, each order
add-epsilon smoothed, so every token in the vocabulary keeps strictly
positive mass and log probabilities are always finite:

    P(t | c) = sum_k  lambda_k * (count_k(c_k, t) + eps) /
                      (total_k(c_k) + eps * |V|)

with c_k the last k-1 context tokens.  An unseen context at some order
degrades that order's term to uniform, which is the backoff behavior.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .errors import EmptyCorpus
from .tabular import (
    DelexSentence,
    Sentence,
    Table,
    delexicalize,
    detokenize,
    linearize,
    placeholder_for,
    placeholder_name,
    relexicalize,
)

START = "<s>"
END = "</s>"

DEFAULT_ORDER = 3
DEFAULT_LAMBDAS = (0.1, 0.3, 0.6)   # unigram, bigram, trigram
DEFAULT_EPSILON = 1e-6

MODEL_FORMAT = "tabletext-delex-ngram"
MODEL_VERSION = 1


@dataclass(frozen=True)
class DelexModel:
    """Counts of an interpolated n-gram model over delexicalized tokens.

    ``counts`` maps a context tuple (0 to order-1 tokens) to the counts
    of its observed next tokens; ``totals`` caches each context's sum.
    Instances are immutable after fitting and safe to share across
    threads.
    """

    order: int
    lambdas: tuple[float, ...]
    epsilon: float
    vocab: tuple[str, ...]
    counts: dict[tuple[str, ...], dict[str, int]]
    totals: dict[tuple[str, ...], int]
    placeholders: tuple[str, ...]
    meta: dict = field(default_factory=dict)

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)


def default_lambdas(order: int) -> tuple[float, ...]:
    if order == DEFAULT_ORDER:
        return DEFAULT_LAMBDAS
    return tuple(1.0 / order for _ in range(order))


def corpus_fingerprint(pairs) -> str:
    """Stable digest of a parallel corpus's content."""
    h = hashlib.sha256()
    for table, sentence in pairs:
        h.update(linearize(table).encode("utf-8"))
        h.update(b"\t")
        h.update(detokenize(sentence).encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def fit(pairs, order: int = DEFAULT_ORDER, lambdas=None,
        epsilon: float = DEFAULT_EPSILON) -> DelexModel:
    """Count delexicalized n-grams of every (table, sentence) pair.

    Deterministic for a fixed input order; the corpus fingerprint and
    pair count go into the model metadata.
    """
    pairs = list(pairs)
    if not pairs:
        raise EmptyCorpus("cannot fit a model on an empty corpus")
    if order < 2:
        raise ValueError("model order must be at least 2")
    if lambdas is None:
        lambdas = default_lambdas(order)
    lambdas = tuple(float(x) for x in lambdas)
    if len(lambdas) != order:
        raise ValueError(f"need {order} interpolation weights, got {len(lambdas)}")
    if any(x < 0 for x in lambdas) or abs(sum(lambdas) - 1.0) > 1e-9:
        raise ValueError("interpolation weights must be nonnegative and sum to 1")

    counts: dict[tuple[str, ...], dict[str, int]] = {}
    totals: dict[tuple[str, ...], int] = {}
    vocab: set[str] = {END}
    for table, sentence in pairs:
        delex = delexicalize(sentence, table)
        vocab.update(delex.tokens)
        padded = (START,) * (order - 1) + delex.tokens + (END,)
        for pos in range(order - 1, len(padded)):
            target = padded[pos]
            for k in range(1, order + 1):
                ctx = padded[pos - k + 1:pos]
                nxt = counts.setdefault(ctx, {})
                nxt[target] = nxt.get(target, 0) + 1
                totals[ctx] = totals.get(ctx, 0) + 1

    placeholders = tuple(sorted(t for t in vocab if placeholder_name(t)))
    return DelexModel(
        order=order,
        lambdas=lambdas,
        epsilon=float(epsilon),
        vocab=tuple(sorted(vocab)),
        counts=counts,
        totals=totals,
        placeholders=placeholders,
        meta={"n_pairs": len(pairs), "fingerprint": corpus_fingerprint(pairs)},
    )


# ---------------------------------------------------------------------------
# Probabilities


def _context(model: DelexModel, tokens) -> tuple[str, ...]:
    """Last order-1 tokens, left-padded with start markers."""
    need = model.order - 1
    tokens = tuple(tokens)
    if len(tokens) >= need:
        return tokens[len(tokens) - need:]
    return (START,) * (need - len(tokens)) + tokens


def _interp_prob(model: DelexModel, context: tuple[str, ...], token: str) -> float:
    """Interpolated probability of ``token`` after the padded context."""
    eps = model.epsilon
    v = model.vocab_size
    p = 0.0
    for k in range(1, model.order + 1):
        ctx = context[len(context) - (k - 1):] if k > 1 else ()
        total = model.totals.get(ctx, 0)
        cnt = model.counts.get(ctx, {}).get(token, 0)
        p += model.lambdas[k - 1] * (cnt + eps) / (total + eps * v)
    return p


def _banned_placeholders(model: DelexModel, table: Table) -> tuple[str, ...]:
    allowed = {placeholder_for(s.name) for s in table.slots}
    return tuple(ph for ph in model.placeholders if ph not in allowed)


def next_token_dist(model: DelexModel, context, table: Table) -> dict[str, float]:
    """Distribution over the vocabulary for the next token.

    Placeholders of slots absent from the table get probability 0 and
    their mass is redistributed over the remaining tokens; the values
    sum to 1 within 1e-9.
    """
    ctx = _context(model, context)
    eps = model.epsilon
    v = model.vocab_size
    base = 0.0
    bumps: list[tuple[float, dict[str, int]]] = []
    for k in range(1, model.order + 1):
        c_k = ctx[len(ctx) - (k - 1):] if k > 1 else ()
        total = model.totals.get(c_k, 0)
        denom = total + eps * v
        base += model.lambdas[k - 1] * eps / denom
        seen = model.counts.get(c_k)
        if seen:
            bumps.append((model.lambdas[k - 1] / denom, seen))
    dist = dict.fromkeys(model.vocab, base)
    for scale, seen in bumps:
        for token, cnt in seen.items():
            dist[token] += scale * cnt
    banned_mass = 0.0
    for ph in _banned_placeholders(model, table):
        banned_mass += dist[ph]
        dist[ph] = 0.0
    if banned_mass:
        keep = 1.0 - banned_mass
        for token, p in dist.items():
            if p:
                dist[token] = p / keep
    return dist


def _restricted_log_prob(model: DelexModel, context: tuple[str, ...],
                         token: str, banned: tuple[str, ...]) -> float:
    p = 0.0 if token in banned else _interp_prob(model, context, token)
    if banned:
        keep = 1.0
        for ph in banned:
            keep -= _interp_prob(model, context, ph)
        p = p / keep if keep > 0 else 0.0
    if p <= 0.0:
        # Scoring a token the restriction zeroed (a foreign placeholder
        # typed into the text, or an out-of-vocabulary token after
        # renormalization underflow): floor it so the result is finite.
        p = model.epsilon / model.vocab_size
    return math.log(p)


class LocalScorer:
    """In-process scorer over a fitted model.

    ``length_normalize`` divides the total log probability by the token
    count (end marker included), for insertion comparisons that should
    not penalize longer candidates.  Off by default: the search
    optimizes the raw conditional probability.
    """

    def __init__(self, model: DelexModel, length_normalize: bool = False):
        self.model = model
        self.length_normalize = length_normalize

    def log_prob(self, table: Table, sentence: Sentence) -> float:
        model = self.model
        banned = _banned_placeholders(model, table)
        delex = delexicalize(sentence, table)
        total = 0.0
        history: list[str] = []
        for token in (*delex.tokens, END):
            ctx = _context(model, history)
            total += _restricted_log_prob(model, ctx, token, banned)
            history.append(token)
        if self.length_normalize:
            total /= len(delex.tokens) + 1
        return total

    def score_batch(self, table: Table, sentences) -> list[float]:
        return [self.log_prob(table, s) for s in sentences]


# Anything with log_prob(table, sentence) and score_batch(table,
# sentences) can drive the search; LocalScorer here and RemoteScorer in
# the remote module are the two shipped kinds.
if TYPE_CHECKING:
    from .remote import RemoteScorer

    ScorerHandle = LocalScorer | RemoteScorer


def log_prob(scorer, table: Table, sentence: Sentence) -> float:
    """Total log P(sentence | table) under a local or remote scorer."""
    return scorer.log_prob(table, sentence)


def score_batch(scorer, table: Table, sentences) -> list[float]:
    return scorer.score_batch(table, sentences)


# ---------------------------------------------------------------------------
# Decoding


def decode(model: DelexModel, table: Table, max_len: int = 40,
           beam_width: int = 1) -> Sentence:
    """Beam-search decode (width 1 is greedy), then relexicalize.

    Deterministic: ties between equally scored hypotheses go to the
    lexicographically smaller token sequence.  A beam ends at the end
    marker or at ``max_len`` tokens.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    if beam_width < 1:
        raise ValueError("beam_width must be at least 1")

    beams: list[tuple[float, tuple[str, ...]]] = [(0.0, ())]
    finished: list[tuple[float, tuple[str, ...]]] = []
    while beams:
        expansions: list[tuple[float, tuple[str, ...], str]] = []
        for score, tokens in beams:
            dist = next_token_dist(model, tokens, table)
            for token, p in dist.items():
                if p > 0.0:
                    expansions.append((score + math.log(p), tokens, token))
        expansions.sort(key=lambda e: (-e[0], e[1] + (e[2],)))
        beams = []
        for score, tokens, token in expansions[:beam_width]:
            if token == END:
                finished.append((score, tokens))
            elif len(tokens) + 1 >= max_len:
                finished.append((score, tokens + (token,)))
            else:
                beams.append((score, tokens + (token,)))
        # Raw log probabilities only decrease along a path, so once the
        # best finished hypothesis beats every live beam, nothing live
        # can overtake it.
        if finished and beams:
            best_done = max(s for s, _ in finished)
            if all(s <= best_done for s, _ in beams):
                break
    finished.sort(key=lambda e: (-e[0], e[1]))
    best = finished[0][1]
    delex = DelexSentence(
        tokens=best,
        spacing=(" ",) * (len(best) - 1) + ("",) if best else (),
        prefix="",
    )
    return relexicalize(delex, table)


# ---------------------------------------------------------------------------
# Persistence


def save_model(model: DelexModel, path) -> None:
    """Write the model as canonical JSON; identical models give identical bytes."""
    contexts = sorted(model.counts)
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "order": model.order,
        "lambdas": list(model.lambdas),
        "epsilon": model.epsilon,
        "vocab": list(model.vocab),
        "counts": [
            [list(ctx), sorted(model.counts[ctx].items())]
            for ctx in contexts
        ],
        "meta": model.meta,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True,
                  separators=(",", ":"))
        fh.write("\n")


def load_model(path) -> DelexModel:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a {MODEL_FORMAT} file: {path}")
    if payload.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {payload.get('version')}")
    counts: dict[tuple[str, ...], dict[str, int]] = {}
    totals: dict[tuple[str, ...], int] = {}
    for ctx_list, items in payload["counts"]:
        ctx = tuple(ctx_list)
        nxt = {token: int(cnt) for token, cnt in items}
        counts[ctx] = nxt
        totals[ctx] = sum(nxt.values())
    vocab = tuple(payload["vocab"])
    return DelexModel(
        order=int(payload["order"]),
        lambdas=tuple(float(x) for x in payload["lambdas"]),
        epsilon=float(payload["epsilon"]),
        vocab=vocab,
        counts=counts,
        totals=totals,
        placeholders=tuple(sorted(t for t in vocab if placeholder_name(t))),
        meta=dict(payload.get("meta", {})),
    )
