"""Phrase rule loading and rendering."""

import pytest

from tabletext.errors import DuplicateRule, RuleSyntax
from tabletext.tabular import Slot, detokenize, is_boolean_value
from tabletext.templates import (
    RuleSet,
    e2e_rules,
    load_rules,
    parse_rules,
    render,
    wikibio_rules,
)


class TestParseRules:
    def test_single_rule(self):
        rs = parse_rules("slot=area; when=always; phrase=in {SV} area")
        assert len(rs.rules) == 1
        assert rs.rules[0].slot_name == "area"

    def test_conditional_rule(self):
        rs = parse_rules("slot=familyfriendly; when=value_equals(yes); phrase=family friendly")
        rule = rs.rules[0]
        assert rule.condition.matches("yes") and not rule.condition.matches("no")

    def test_missing_separators(self):
        with pytest.raises(RuleSyntax):
            parse_rules("slot=area phrase=x")

    def test_bad_condition(self):
        with pytest.raises(RuleSyntax):
            parse_rules("slot=a; when=sometimes; phrase=x")

    def test_empty_phrase(self):
        with pytest.raises(RuleSyntax):
            parse_rules("slot=a; when=always; phrase=")

    def test_duplicate_rule(self):
        text = ("slot=a; when=always; phrase=x\n"
                "slot=a; when=always; phrase=y\n")
        with pytest.raises(DuplicateRule):
            parse_rules(text)

    def test_line_number_reported(self):
        with pytest.raises(RuleSyntax) as err:
            parse_rules("# comment\n\nslot=broken\n")
        assert err.value.line_no == 3

    def test_comments_and_order(self):
        text = ("# header\n"
                "slot=a; when=value_is_numeric; phrase=n {SV}\n"
                "slot=a; when=always; phrase=s {SV}\n")
        rs = parse_rules(text)
        assert [r.condition.kind for r in rs.rules] == ["value_is_numeric", "always"]

    def test_load_rules_file(self, tmp_path):
        p = tmp_path / "rules.txt"
        p.write_text("slot=near; when=always; phrase=near {SV}\n", encoding="utf-8")
        rs = load_rules(p)
        assert detokenize(render(rs, Slot("near", "Café Rouge"))) == "near Café Rouge"


class TestRender:
    def test_area_phrase(self):
        out = render(e2e_rules(), Slot("area", "riverside"))
        assert detokenize(out) == "in riverside area"

    def test_family_friendly_no(self):
        out = render(e2e_rules(), Slot("familyfriendly", "no"))
        assert detokenize(out) == "not family friendly"

    def test_family_friendly_yes(self):
        out = render(e2e_rules(), Slot("familyfriendly", "yes"))
        assert detokenize(out) == "family friendly"

    def test_fallback_bare_value(self):
        out = render(RuleSet(), Slot("name", "Aromi"))
        assert detokenize(out) == "Aromi"

    def test_pricerange_numeric_vs_string(self):
        rs = e2e_rules()
        assert detokenize(render(rs, Slot("pricerange", "£20-25"))) == "price range £20-25"
        assert detokenize(render(rs, Slot("pricerange", "cheap"))) == "cheap price range"

    def test_first_matching_rule_wins(self):
        text = ("slot=x; when=value_equals(a); phrase=first {SV}\n"
                "slot=x; when=always; phrase=second {SV}\n")
        rs = parse_rules(text)
        assert detokenize(render(rs, Slot("x", "a"))) == "first a"
        assert detokenize(render(rs, Slot("x", "b"))) == "second b"

    def test_deterministic(self):
        rs = e2e_rules()
        slot = Slot("customer rating", "5 out of 5")
        assert render(rs, slot) == render(rs, slot)
        assert detokenize(render(rs, slot)) == "5 out of 5 customer rating"


class TestBundledRules:
    def test_e2e_slots_present(self):
        names = {r.slot_name for r in e2e_rules().rules}
        assert names == {"food", "pricerange", "eattype", "name", "near",
                         "familyfriendly", "customer rating", "area"}

    def test_wikibio_slots_present(self):
        names = {r.slot_name for r in wikibio_rules().rules}
        assert names == {"fullname", "birth date", "currentclub", "nationality",
                         "position", "occupation", "death rate", "party",
                         "birth place"}

    def test_nonboolean_phrases_contain_value(self):
        # This property is what makes the insertion search feasible.
        samples = {
            "food": "Chinese", "pricerange": "moderate", "eattype": "pub",
            "name": "The Mill", "near": "Café Rouge", "familyfriendly": "yes",
            "customer rating": "high", "area": "riverside",
            "fullname": "jane doe", "birth date": "4 may 1941",
            "currentclub": "fc basel", "nationality": "danish",
            "position": "defender", "occupation": "painter",
            "death rate": "12 june 2001", "party": "whig",
            "birth place": "oslo",
        }
        for rs in (e2e_rules(), wikibio_rules()):
            for rule in rs.rules:
                value = samples[rule.slot_name]
                if is_boolean_value(value) or not rule.condition.matches(value):
                    continue
                rendered = detokenize(rule.render(Slot(rule.slot_name, value)))
                assert value in rendered
