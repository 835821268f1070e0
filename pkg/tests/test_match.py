"""Hard/soft slot matching, SER, and coverage arithmetic."""

from fractions import Fraction

import pytest

from tabletext.errors import EmptyCorpus, PatternError, ZeroSlots
from tabletext.match import (
    MatchPatterns,
    MatchReport,
    classify_soft,
    corpus_coverage,
    e2e_patterns,
    find_missing_hard,
    parse_patterns,
    ser,
)
from tabletext.tabular import Slot, parse_mr, tokenize


class TestFindMissingHard:
    def test_both_missing(self):
        t = parse_mr("name[The Mill], area[riverside], familyFriendly[yes]")
        s = tokenize("The Mill is a nice pub.")
        missing = find_missing_hard(t, s)
        assert [m.name for m in missing] == ["area", "familyfriendly"]

    def test_full_coverage(self):
        t = parse_mr("name[Aromi], area[riverside]")
        s = tokenize("Aromi sits in the riverside area.")
        assert find_missing_hard(t, s) == []

    def test_case_insensitive_multiword(self):
        t = parse_mr("near[Café Rouge]")
        assert find_missing_hard(t, tokenize("it is near café rouge")) == []

    def test_no_substring_matches(self):
        # "he" inside "The" must not count as coverage
        t = parse_mr("name[he]")
        assert len(find_missing_hard(t, tokenize("The pub"))) == 1

    def test_empty_sentence(self):
        t = parse_mr("name[Aromi]")
        assert len(find_missing_hard(t, tokenize(""))) == 1


class TestClassifySoft:
    def _patterns(self):
        return parse_patterns(
            "slot=pricerange; value=cheap; pattern=cheap|low\n"
            "slot=pricerange; value=high; pattern=high|expensive\n"
            "slot=near; detect=near\n"
        )

    def test_wrong_value(self):
        t = parse_mr("pricerange[cheap]")
        report = classify_soft(t, tokenize("prices are high"), self._patterns())
        assert [s.name for s in report.wrong] == ["pricerange"]
        assert report.missing == () and report.added == ()

    def test_perfect_sentence(self):
        t = parse_mr("name[Aromi], pricerange[cheap]")
        report = classify_soft(t, tokenize("Aromi is cheap"), self._patterns())
        assert report.missing == report.wrong == () and report.added == ()
        assert report.n_slots == 2

    def test_added_slot(self):
        t = parse_mr("name[Aromi]")
        report = classify_soft(t, tokenize("Aromi is near Café Rouge"),
                               self._patterns())
        assert report.added == ("near",)

    def test_implicit_pattern_word_bounded(self):
        t = parse_mr("name[he]")
        report = classify_soft(t, tokenize("The pub"), MatchPatterns.empty())
        assert [s.name for s in report.missing] == ["name"]

    def test_detector_ignored_when_slot_in_table(self):
        t = parse_mr("near[Café Rouge]")
        report = classify_soft(t, tokenize("near Café Rouge"), self._patterns())
        assert report.added == ()

    def test_disjoint_lists(self):
        t = parse_mr("pricerange[cheap], name[Aromi]")
        report = classify_soft(t, tokenize("expensive place"), self._patterns())
        names = [s.name for s in report.missing] + [s.name for s in report.wrong]
        assert sorted(names) == ["name", "pricerange"]
        assert len(set(names)) == len(names)

    def test_bad_pattern_line(self):
        with pytest.raises(PatternError):
            parse_patterns("slot=a; value=b; pattern=([)\n")
        with pytest.raises(PatternError):
            parse_patterns("slot=a; nonsense=1\n")

    def test_bundled_e2e_patterns(self):
        pats = e2e_patterns()
        t = parse_mr("familyFriendly[yes]")
        ok = classify_soft(t, tokenize("It is family friendly."), pats)
        assert ok.missing == () and ok.wrong == ()
        flipped = classify_soft(t, tokenize("It is not family friendly."), pats)
        assert [s.name for s in flipped.wrong] == ["familyfriendly"]


class TestSer:
    def test_pooled_table5_breakdown(self):
        # 0.07% added + 1.77% missing + 0% wrong over 10000 slots
        report = MatchReport(
            missing=tuple(Slot("m", str(i + 1)) for i in range(177)),
            added=tuple(f"a{i}" for i in range(7)),
            wrong=(),
            n_slots=10000,
        )
        rate = ser(report)
        assert rate == Fraction(184, 10000)
        assert 1 - rate == Fraction(9816, 10000)

    def test_no_errors(self):
        assert ser(MatchReport((), (), (), 4)) == 0

    def test_one_in_five(self):
        report = MatchReport((Slot("a", "x"),), (), (), 5)
        assert ser(report) == Fraction(1, 5)

    def test_zero_slots(self):
        with pytest.raises(ZeroSlots):
            ser(MatchReport((), (), (), 0))

    def test_can_exceed_one(self):
        report = MatchReport((), ("a", "b"), (), 1)
        assert ser(report) == 2


class TestCorpusCoverage:
    def test_micro_average(self):
        t1 = parse_mr("a[1], b[2], c[3], d[4]")
        t2 = parse_mr("e[5], f[6], g[7], h[8]")
        s1 = tokenize("1 2 3")      # 3 of 4
        s2 = tokenize("5 6 7 x")    # 3 of 4
        assert corpus_coverage([(t1, s1), (t2, s2)]) == Fraction(6, 8)

    def test_single_sample_fully_missing(self):
        t = parse_mr("a[x], b[y]")
        assert corpus_coverage([(t, tokenize("nothing"))]) == 0

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            corpus_coverage([])

    def test_agrees_with_find_missing_hard(self):
        t = parse_mr("name[Aromi], food[Italian]")
        s = tokenize("Aromi serves Italian food")
        assert find_missing_hard(t, s) == []
        assert corpus_coverage([(t, s)]) == 1
