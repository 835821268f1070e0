"""Tables, sentences, and the delexicalization machinery.

A table is an ordered set of slot name/value pairs; a sentence is a
tokenized text that can be detokenized back byte-for-byte.  Slot values
can be swapped for ``__slotname__`` placeholder tokens (delexicalize)
and substituted back (relexicalize), which is how the count-based
surrogate model conditions on table content.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import MalformedMR, UnboundPlaceholder

SPLIT_PUNCT = ".,!?;:"

# Values treated as boolean flags.  They match far too promiscuously to
# be delexicalized or verbatim-matched; templates and soft matching
# handle them instead.
BOOLEAN_VALUES = frozenset({"yes", "no"})


def is_boolean_value(value: str) -> bool:
    return value.strip().casefold() in BOOLEAN_VALUES


@dataclass(frozen=True)
class Slot:
    """One name/value pair of a table.

    Names are normalized to trimmed lowercase; values keep their case
    but are trimmed.  Neither may contain brackets (they delimit the
    linearized form), and names may not contain commas.
    """

    name: str
    value: str

    def __post_init__(self):
        name = self.name.strip().lower()
        value = self.value.strip()
        if not name:
            raise MalformedMR("empty slot name")
        if "[" in name or "]" in name:
            raise MalformedMR(f"slot name contains a bracket: {name!r}")
        if "," in name:
            raise MalformedMR(f"slot name contains a comma: {name!r}")
        if not value:
            raise MalformedMR(f"empty value for slot {name!r}")
        if "[" in value or "]" in value:
            raise MalformedMR(f"value contains a bracket: {value!r}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "value", value)


@dataclass(frozen=True)
class Table:
    """Ordered slots of one sample; slot names are pairwise distinct."""

    slots: tuple[Slot, ...]
    sample_id: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        if not self.slots:
            raise MalformedMR("a table needs at least one slot")
        names = [s.name for s in self.slots]
        if len(set(names)) != len(names):
            dup = sorted(n for n in set(names) if names.count(n) > 1)
            raise MalformedMR(f"repeated slot name(s): {', '.join(dup)}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.slots)

    def get(self, name: str) -> Slot | None:
        for s in self.slots:
            if s.name == name:
                return s
        return None


@dataclass(frozen=True)
class Sentence:
    """Tokenized text that detokenizes back to the exact source bytes.

    ``spacing[i]`` is the whitespace that followed ``tokens[i]`` in the
    source; ``prefix`` is whitespace before the first token.
    """

    tokens: tuple[str, ...] = ()
    spacing: tuple[str, ...] = ()
    prefix: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "spacing", tuple(self.spacing))
        if len(self.tokens) != len(self.spacing):
            raise ValueError("tokens and spacing must have equal length")
        if any(not t for t in self.tokens):
            raise ValueError("empty token")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def text(self) -> str:
        return detokenize(self)

    @classmethod
    def from_tokens(cls, tokens) -> "Sentence":
        """Build a sentence with single spaces and no trailing space."""
        tokens = tuple(tokens)
        if not tokens:
            return cls()
        spacing = (" ",) * (len(tokens) - 1) + ("",)
        return cls(tokens, spacing)

    def insert(self, position: int, phrase: "Sentence") -> "Sentence":
        """Splice ``phrase`` in at a token boundary.

        Boundary 0 is before the first token; boundary ``len(self)`` is
        after the last.  The whitespace that sat on the boundary moves
        to the end of the inserted phrase, so tight punctuation stays
        tight ("a pub." -> "a pub in riverside area.").
        """
        if not 0 <= position <= len(self.tokens):
            raise ValueError(f"insertion position {position} out of range")
        if not phrase.tokens:
            return self
        toks = list(self.tokens)
        sp = list(self.spacing)
        ph_toks = list(phrase.tokens)
        ph_sp = [" "] * (len(ph_toks) - 1) + [""]
        ph_sp[:-1] = phrase.spacing[:-1]
        if position == 0:
            ph_sp[-1] = " " if toks else ""
            return Sentence(tuple(ph_toks + toks), tuple(ph_sp + sp), self.prefix)
        sep = sp[position - 1]
        sp[position - 1] = sep if sep else " "
        ph_sp[-1] = sep
        new_toks = toks[:position] + ph_toks + toks[position:]
        new_sp = sp[:position] + ph_sp + sp[position:]
        return Sentence(tuple(new_toks), tuple(new_sp), self.prefix)


@dataclass(frozen=True)
class DelexSentence:
    """A sentence whose slot-value spans were replaced by placeholders.

    ``binding`` keeps the source text of each replaced span so that
    relexicalizing restores the original bytes even when the match was
    case-insensitive.
    """

    tokens: tuple[str, ...] = ()
    spacing: tuple[str, ...] = ()
    prefix: str = ""
    binding: tuple[tuple[str, str], ...] = field(default_factory=tuple)

    @property
    def binding_map(self) -> dict[str, str]:
        return dict(self.binding)


def placeholder_for(name: str) -> str:
    return f"__{name}__"


def placeholder_name(token: str) -> str | None:
    """The slot name a placeholder token stands for, else None."""
    if len(token) > 4 and token.startswith("__") and token.endswith("__"):
        return token[2:-2]
    return None


# ---------------------------------------------------------------------------
# Meaning representations


def parse_mr(text: str) -> Table:
    """Parse a "name[value]" meaning representation into a Table.

    Pairs may be separated by commas (the corpus convention) or
    directly juxtaposed (the linearized form); both parse to the same
    table.  Names are lowercased, names and values trimmed.
    """
    slots: list[Slot] = []
    i, n = 0, len(text)
    while True:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        if text[i] == ",":
            if not slots:
                raise MalformedMR("meaning representation starts with a comma")
            i += 1
            continue
        j = text.find("[", i)
        if j < 0:
            raise MalformedMR(f"expected '[' after {text[i:]!r}")
        name = text[i:j]
        if "]" in name:
            raise MalformedMR(f"unbalanced ']' in {name!r}")
        if "," in name:
            raise MalformedMR(f"missing brackets around {name.strip()!r}")
        k = text.find("]", j + 1)
        if k < 0:
            raise MalformedMR(f"unbalanced '[' in {text[i:]!r}")
        value = text[j + 1:k]
        if "[" in value:
            raise MalformedMR(f"nested '[' in value {value!r}")
        slot = Slot(name, value)
        if any(s.name == slot.name for s in slots):
            raise MalformedMR(f"repeated slot name: {slot.name}")
        slots.append(slot)
        i = k + 1
    if not slots:
        raise MalformedMR("no slots found")
    return Table(tuple(slots))


def linearize(table: Table) -> str:
    """Serialize a table as name1[value1]name2[value2]... in slot order."""
    return "".join(f"{s.name}[{s.value}]" for s in table.slots)


# ---------------------------------------------------------------------------
# Tokenization

_WORD_RE = re.compile(r"(\S+)(\s*)")


def tokenize(text: str) -> Sentence:
    """Split on whitespace, then peel leading/trailing .,!?;: into tokens.

    Whitespace runs are recorded verbatim so detokenize is byte-exact.
    """
    m = re.match(r"\s*", text)
    prefix = m.group(0)
    tokens: list[str] = []
    spacing: list[str] = []
    for m in _WORD_RE.finditer(text, m.end()):
        word, ws = m.group(1), m.group(2)
        leading: list[str] = []
        while len(word) > 1 and word[0] in SPLIT_PUNCT:
            leading.append(word[0])
            word = word[1:]
        trailing: list[str] = []
        while len(word) > 1 and word[-1] in SPLIT_PUNCT:
            trailing.append(word[-1])
            word = word[:-1]
        parts = leading + [word] + trailing[::-1]
        for p in parts[:-1]:
            tokens.append(p)
            spacing.append("")
        tokens.append(parts[-1])
        spacing.append(ws)
    return Sentence(tuple(tokens), tuple(spacing), prefix)


def detokenize(sentence: Sentence | DelexSentence) -> str:
    return sentence.prefix + "".join(
        t + w for t, w in zip(sentence.tokens, sentence.spacing)
    )


# ---------------------------------------------------------------------------
# Delexicalization

def _casefold_tokens(tokens) -> list[str]:
    return [t.casefold() for t in tokens]


def _span_source(sentence: Sentence, start: int, end: int) -> str:
    """Source text of tokens[start:end] without the trailing whitespace."""
    parts = []
    for i in range(start, end):
        parts.append(sentence.tokens[i])
        if i < end - 1:
            parts.append(sentence.spacing[i])
    return "".join(parts)


def delexicalize(sentence: Sentence, table: Table) -> DelexSentence:
    """Replace every whole-token occurrence of a slot value by its placeholder.

    Matching is case-insensitive and non-overlapping; longer values win,
    ties go to the earlier table position.  Boolean-like values (yes/no)
    are never replaced.
    """
    folded = _casefold_tokens(sentence.tokens)
    n = len(folded)
    consumed = [False] * n
    matches: list[tuple[int, int, str]] = []  # (start, end, placeholder)
    binding: dict[str, str] = {}

    candidates = []
    for idx, slot in enumerate(table.slots):
        if is_boolean_value(slot.value):
            continue
        vtoks = _casefold_tokens(tokenize(slot.value).tokens)
        if vtoks:
            candidates.append((-len(vtoks), idx, vtoks, slot))
    for _, _, vtoks, slot in sorted(candidates, key=lambda c: (c[0], c[1])):
        L = len(vtoks)
        i = 0
        while i + L <= n:
            if not any(consumed[i:i + L]) and folded[i:i + L] == vtoks:
                ph = placeholder_for(slot.name)
                matches.append((i, i + L, ph))
                binding.setdefault(ph, _span_source(sentence, i, i + L))
                for k in range(i, i + L):
                    consumed[k] = True
                i += L
            else:
                i += 1

    matches.sort()
    out_tokens: list[str] = []
    out_spacing: list[str] = []
    next_match = 0
    i = 0
    while i < n:
        if next_match < len(matches) and matches[next_match][0] == i:
            start, end, ph = matches[next_match]
            out_tokens.append(ph)
            out_spacing.append(sentence.spacing[end - 1])
            i = end
            next_match += 1
        else:
            out_tokens.append(sentence.tokens[i])
            out_spacing.append(sentence.spacing[i])
            i += 1
    ordered = tuple(
        (ph, binding[ph]) for ph in dict.fromkeys(m[2] for m in matches)
    )
    return DelexSentence(tuple(out_tokens), tuple(out_spacing), sentence.prefix, ordered)


def relexicalize(delex: DelexSentence, table: Table) -> Sentence:
    """Substitute slot values back for placeholder tokens.

    The recorded binding text is preferred (exact round trip); a
    placeholder without a binding (e.g. model output) takes the table's
    value.  A placeholder whose slot is not in the table raises
    UnboundPlaceholder.
    """
    binding = delex.binding_map
    out_tokens: list[str] = []
    out_spacing: list[str] = []
    for tok, ws in zip(delex.tokens, delex.spacing):
        name = placeholder_name(tok)
        if name is None:
            out_tokens.append(tok)
            out_spacing.append(ws)
            continue
        slot = table.get(name)
        if slot is None:
            raise UnboundPlaceholder(f"no slot {name!r} in table for {tok}")
        value = tokenize(binding.get(tok, slot.value))
        out_tokens.extend(value.tokens)
        out_spacing.extend(value.spacing[:-1])
        out_spacing.append(ws)
    return Sentence(tuple(out_tokens), tuple(out_spacing), delex.prefix)


def contains_value(sentence_tokens_folded: list[str], value: str) -> bool:
    """Whole-token, case-insensitive containment of ``value``."""
    vtoks = _casefold_tokens(tokenize(value).tokens)
    L = len(vtoks)
    if L == 0:
        return True
    n = len(sentence_tokens_folded)
    return any(sentence_tokens_folded[i:i + L] == vtoks for i in range(n - L + 1))
