"""Two-stage pipeline, baselines, recombination, persistence."""

import math
from fractions import Fraction
from pathlib import Path

import pytest

from tabletext import corpusio
from tabletext.errors import ConfigError, EmptyCorpus
from tabletext.lm import LocalScorer, load_model, log_prob, save_model
from tabletext.match import corpus_coverage, find_missing_hard
from tabletext.pipeline import (
    Corpus,
    ParallelSample,
    PipelineConfig,
    build_pseudo_corpus,
    infer,
    recombine,
    self_train,
    stage1,
    stage2,
)
from tabletext.tabular import Slot, Table, linearize, parse_mr, tokenize
from tabletext.templates import e2e_rules

DATA = Path(__file__).resolve().parent.parent / "data" / "toy"


@pytest.fixture(scope="module")
def toy():
    pairs = corpusio.read_parallel(DATA / "parallel.tsv")
    corpus = Corpus(tuple(ParallelSample(t, s) for t, s in pairs))
    tables_u = corpusio.read_unlabeled(DATA / "unlabeled.txt")
    test_pairs = corpusio.read_parallel(DATA / "test.tsv")
    return corpus, tables_u, test_pairs


@pytest.fixture(scope="module")
def config():
    return PipelineConfig()


@pytest.fixture(scope="module")
def toy_model(toy, config):
    corpus, _, _ = toy
    return stage1(corpus, config)


class TestStage1:
    def test_persistence_round_trip(self, toy_model, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        save_model(toy_model, a)
        save_model(load_model(a), b)
        assert a.read_bytes() == b.read_bytes()

    def test_deterministic_fingerprint(self, toy, config):
        corpus, _, _ = toy
        m1, m2 = stage1(corpus, config), stage1(corpus, config)
        assert m1.meta["fingerprint"] == m2.meta["fingerprint"]
        assert m1.meta["n_pairs"] == 100

    def test_heldout_perplexity_beats_uniform(self, toy, toy_model):
        _, _, test_pairs = toy
        scorer = LocalScorer(toy_model)
        total_lp = 0.0
        total_tokens = 0
        for table, ref in test_pairs:
            total_lp += log_prob(scorer, table, ref)
            total_tokens += len(ref.tokens) + 1
        perplexity = math.exp(-total_lp / total_tokens)
        uniform = toy_model.vocab_size
        assert perplexity < uniform

    def test_empty_corpus(self, config):
        with pytest.raises(EmptyCorpus):
            stage1(Corpus(), config)


class TestBuildPseudoCorpus:
    def test_slice_has_full_coverage(self, toy, toy_model, config):
        _, tables_u, _ = toy
        pseudo = build_pseudo_corpus(toy_model, tables_u[:50], e2e_rules(), config)
        assert len(pseudo) == 50
        # independent recount through the match oracle
        assert corpus_coverage(
            [(s.table, s.sentence) for s in pseudo]) == Fraction(1)
        assert all(s.provenance == corpusio.PSEUDO_SEARCH for s in pseudo)

    def test_feasible_decode_kept_verbatim(self, toy, toy_model, config):
        _, tables_u, _ = toy
        for table in tables_u[:50]:
            raw = infer(toy_model, table, config)
            if find_missing_hard(table, raw):
                continue
            pseudo = build_pseudo_corpus(toy_model, [table], e2e_rules(), config)
            assert pseudo[0].sentence == raw
            break

    def test_empty_decode_gets_phrases(self, config):
        # a model fitted on empty references decodes to the empty
        # sentence; projection must still produce a feasible output
        pairs = [(parse_mr("name[Aromi]"), tokenize(""))]
        model = stage1(
            Corpus((ParallelSample(*pairs[0]),)), config)
        table = parse_mr("name[Cotto], area[riverside]")
        assert infer(model, table, config).tokens == ()
        pseudo = build_pseudo_corpus(model, [table], e2e_rules(), config)
        text = " ".join(pseudo[0].sentence.tokens)
        assert "Cotto" in text and "in riverside area" in text

    def test_empty_tables(self, toy_model, config):
        with pytest.raises(EmptyCorpus):
            build_pseudo_corpus(toy_model, [], e2e_rules(), config)

    def test_slot_thresholds_need_stats_corpus(self, toy, toy_model):
        _, tables_u, _ = toy
        config = PipelineConfig(tau_table=0.1, tau_ref=0.1)
        with pytest.raises(EmptyCorpus):
            build_pseudo_corpus(toy_model, tables_u[:2], e2e_rules(), config)

    def test_slot_thresholds_filter(self, toy, toy_model):
        corpus, tables_u, _ = toy
        config = PipelineConfig(tau_table=0.1, tau_ref=0.95)
        pseudo = build_pseudo_corpus(toy_model, tables_u[:20], e2e_rules(),
                                     config, stats_corpus=corpus.pairs)
        # only near-universally referenced slots (the name) must be
        # guaranteed; others may stay missing
        for sample in pseudo:
            missing = {s.name for s in
                       find_missing_hard(sample.table, sample.sentence)}
            assert "name" not in missing


class TestStage2:
    def test_union_pair_count(self, toy, toy_model, config):
        corpus, tables_u, _ = toy
        pseudo = build_pseudo_corpus(toy_model, tables_u, e2e_rules(), config)
        model = stage2(corpus, pseudo, config)
        assert model.meta["n_pairs"] == 500  # 100 human + 400 pseudo

    def test_empty_pseudo_equals_stage1(self, toy, toy_model, config, tmp_path):
        corpus, _, _ = toy
        a, b = tmp_path / "s1.json", tmp_path / "s2.json"
        save_model(toy_model, a)
        save_model(stage2(corpus, [], config), b)
        assert a.read_bytes() == b.read_bytes()

    def test_coverage_improves_on_heldout(self, toy, toy_model, config):
        corpus, tables_u, test_pairs = toy
        tables = [t for t, _ in test_pairs]
        pseudo = build_pseudo_corpus(toy_model, tables_u, e2e_rules(), config)
        m2 = stage2(corpus, pseudo, config)
        cov1 = corpus_coverage(
            [(t, infer(toy_model, t, config)) for t in tables])
        cov2 = corpus_coverage([(t, infer(m2, t, config)) for t in tables])
        assert cov2 >= cov1


class TestSelfTrain:
    def test_pseudo_refs_keep_the_misses(self, toy, toy_model, config):
        _, tables_u, _ = toy
        decodes = [(t, infer(toy_model, t, config)) for t in tables_u[:50]]
        assert corpus_coverage(decodes) < 1  # raw decodes do miss slots
        model = self_train(
            toy_model,
            Corpus(tuple(ParallelSample(t, s) for t, s in decodes[:10])),
            tables_u[:50], config)
        assert model.meta["n_pairs"] == 60

    def test_not_better_than_search_and_learn(self, toy, toy_model, config):
        corpus, tables_u, test_pairs = toy
        tables = [t for t, _ in test_pairs]
        pseudo = build_pseudo_corpus(toy_model, tables_u, e2e_rules(), config)
        sl = stage2(corpus, pseudo, config)
        st = self_train(toy_model, corpus, tables_u, config)
        cov_sl = corpus_coverage([(t, infer(sl, t, config)) for t in tables])
        cov_st = corpus_coverage([(t, infer(st, t, config)) for t in tables])
        assert cov_st <= cov_sl

    def test_empty_tables(self, toy, toy_model, config):
        corpus, _, _ = toy
        with pytest.raises(EmptyCorpus):
            self_train(toy_model, corpus, [], config)


class TestRecombine:
    def test_membership_oracle(self, toy):
        corpus, _, _ = toy
        sources = [s.table for s in corpus.parallel]
        observed = set()
        for t in sources:
            observed.update((s.name, s.value) for s in t.slots)
        synthetic = recombine(sources, 400, seed=5)
        assert len(synthetic) == 400
        for t in synthetic:
            for s in t.slots:
                assert (s.name, s.value) in observed

    def test_name_sets_come_from_sources(self, toy):
        corpus, _, _ = toy
        sources = [s.table for s in corpus.parallel]
        shapes = {tuple(t.names) for t in sources}
        for t in recombine(sources, 100, seed=9):
            assert tuple(t.names) in shapes

    def test_single_source_degenerates(self):
        source = parse_mr("name[Aromi], area[riverside]")
        out = recombine([source], 1, seed=1)
        assert len(out) == 1
        assert linearize(out[0]) == linearize(source)

    def test_deterministic(self, toy):
        corpus, _, _ = toy
        sources = [s.table for s in corpus.parallel]
        a = [linearize(t) for t in recombine(sources, 50, seed=3)]
        b = [linearize(t) for t in recombine(sources, 50, seed=3)]
        assert a == b
        c = [linearize(t) for t in recombine(sources, 50, seed=4)]
        assert a != c


class TestInfer:
    def test_deterministic(self, toy, toy_model, config):
        _, _, test_pairs = toy
        table = test_pairs[0][0]
        assert infer(toy_model, table, config) == infer(toy_model, table, config)

    def test_stage2_memorizes_unique_patterns(self, config):
        # disjoint slot names give each pair a private decode path
        pairs = [
            (parse_mr("food[Italian]"), tokenize("Italian dishes served daily .")),
            (parse_mr("area[riverside]"), tokenize("located in riverside zone .")),
        ]
        corpus = Corpus(tuple(ParallelSample(t, s) for t, s in pairs))
        model = stage1(corpus, config)
        pseudo = build_pseudo_corpus(
            model, [parse_mr("food[Thai]")], e2e_rules(), config)
        m2 = stage2(corpus, pseudo, config)
        out = infer(m2, pairs[0][0], config)
        assert out.tokens == pairs[0][1].tokens


class TestCorpusType:
    def test_duplicate_ids_rejected(self):
        t1 = Table((Slot("a", "1"),), sample_id="x")
        t2 = Table((Slot("b", "2"),), sample_id="x")
        with pytest.raises(ValueError):
            Corpus((ParallelSample(t1, tokenize("1")),), (t2,))

    def test_bad_provenance_rejected(self):
        t = Table((Slot("a", "1"),))
        with pytest.raises(ValueError):
            Corpus((ParallelSample(t, tokenize("1"), "alien"),))


class TestConfig:
    def test_from_file(self, tmp_path):
        p = tmp_path / "cfg"
        p.write_text(
            "# toy settings\n"
            "order = 4\n"
            "lambdas = 0.1, 0.2, 0.3, 0.4\n"
            "beam_width = 2\n"
            "tau_table = 0.1\n"
            "length_normalize = true\n"
            "seed = 11\n",
            encoding="utf-8")
        cfg = PipelineConfig.from_file(p)
        assert cfg.order == 4
        assert cfg.lambdas == (0.1, 0.2, 0.3, 0.4)
        assert cfg.beam_width == 2 and cfg.seed == 11
        assert cfg.length_normalize is True

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "cfg"
        p.write_text("volume = 11\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            PipelineConfig.from_file(p)

    def test_bad_value_rejected(self, tmp_path):
        p = tmp_path / "cfg"
        p.write_text("order = three\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            PipelineConfig.from_file(p)
