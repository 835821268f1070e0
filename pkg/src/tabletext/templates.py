"""Slot-conditioned phrase rules for inserting missing slot values.

A rule file has one rule per line::

    slot=area; when=always; phrase=in {SV} area

``when`` is one of ``always``, ``value_equals(v)``, ``value_in(a,b)``,
``value_is_numeric`` or ``value_is_non_numeric``.  Rules are tried in
file order; the first match renders with ``{SV}`` replaced by the slot
value.  When nothing matches, the bare value is the phrase.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .errors import DuplicateRule, RuleSyntax
from .tabular import Sentence, Slot, tokenize

_KINDS = ("always", "value_equals", "value_in", "value_is_numeric",
          "value_is_non_numeric")


@dataclass(frozen=True)
class Condition:
    kind: str
    values: tuple[str, ...] = ()

    def matches(self, value: str) -> bool:
        v = value.strip().casefold()
        if self.kind == "always":
            return True
        if self.kind == "value_equals":
            return v == self.values[0]
        if self.kind == "value_in":
            return v in self.values
        if self.kind == "value_is_numeric":
            return any(c.isdigit() for c in v)
        if self.kind == "value_is_non_numeric":
            return not any(c.isdigit() for c in v)
        raise AssertionError(self.kind)


def parse_condition(text: str) -> Condition:
    text = text.strip()
    if "(" in text:
        head, _, rest = text.partition("(")
        if not rest.endswith(")"):
            raise ValueError(f"missing ')' in condition {text!r}")
        args = tuple(a.strip().casefold() for a in rest[:-1].split(","))
        if head not in ("value_equals", "value_in"):
            raise ValueError(f"condition {head!r} takes no arguments")
        if any(not a for a in args):
            raise ValueError(f"empty argument in condition {text!r}")
        if head == "value_equals" and len(args) != 1:
            raise ValueError("value_equals takes exactly one argument")
        return Condition(head, args)
    if text not in ("always", "value_is_numeric", "value_is_non_numeric"):
        raise ValueError(f"unknown condition {text!r}")
    return Condition(text)


@dataclass(frozen=True)
class PhraseRule:
    slot_name: str
    condition: Condition
    pattern: str

    def applies(self, slot: Slot) -> bool:
        return slot.name == self.slot_name and self.condition.matches(slot.value)

    def render(self, slot: Slot) -> Sentence:
        return tokenize(self.pattern.replace("{SV}", slot.value))


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[PhraseRule, ...] = ()

    def render(self, slot: Slot) -> Sentence:
        for rule in self.rules:
            if rule.applies(slot):
                return rule.render(slot)
        return tokenize(slot.value)


def render(ruleset: RuleSet, slot: Slot) -> Sentence:
    """Phrase for inserting ``slot``, per the first matching rule."""
    return ruleset.render(slot)


def _parse_rule_line(line_no: int, line: str) -> PhraseRule:
    fields = [f.strip() for f in line.split(";")]
    if len(fields) != 3:
        raise RuleSyntax(line_no, "expected 'slot=...; when=...; phrase=...'")
    parsed = {}
    for want, part in zip(("slot", "when", "phrase"), fields):
        key, sep, val = part.partition("=")
        if key.strip() != want or not sep:
            raise RuleSyntax(line_no, f"expected '{want}=...', got {part!r}")
        parsed[want] = val.strip()
    if not parsed["slot"]:
        raise RuleSyntax(line_no, "empty slot name")
    try:
        condition = parse_condition(parsed["when"])
    except ValueError as exc:
        raise RuleSyntax(line_no, str(exc)) from None
    pattern = parsed["phrase"]
    if not pattern.replace("{SV}", "x").strip():
        raise RuleSyntax(line_no, "phrase renders empty")
    return PhraseRule(parsed["slot"].casefold(), condition, pattern)


def parse_rules(text: str) -> RuleSet:
    rules: list[PhraseRule] = []
    seen: set[tuple[str, Condition]] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rule = _parse_rule_line(line_no, line)
        key = (rule.slot_name, rule.condition)
        if key in seen:
            raise DuplicateRule(
                f"line {line_no}: duplicate rule for "
                f"({rule.slot_name}, {rule.condition.kind})")
        seen.add(key)
        rules.append(rule)
    return RuleSet(tuple(rules))


def load_rules(path) -> RuleSet:
    """Read a rule file; rules keep file order."""
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh.read())


def _bundled(name: str) -> str:
    return resources.files("tabletext.data").joinpath(name).read_text("utf-8")


def e2e_rules() -> RuleSet:
    """The bundled restaurant-domain rules."""
    return parse_rules(_bundled("rules_e2e.txt"))


def wikibio_rules() -> RuleSet:
    """The bundled biography-domain rules."""
    return parse_rules(_bundled("rules_wikibio.txt"))
