"""The two-stage train / search / retrain loop and its baselines.

Stage 1 fits the surrogate generator on the small parallel corpus.
Each unlabeled table is then decoded and repaired by the insertion
search; the repaired outputs become a pseudo-parallel corpus, and
stage 2 refits on human plus pseudo pairs.  Self-training does the
same without the repair step.  For count models, refitting from
scratch on the union is exactly what "further fine-tuning" means, so
stage 2 builds a fresh model.

Everything is deterministic given (files, config, seed); the seed only
feeds table recombination.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import corpusio
from .errors import ConfigError, EmptyCorpus
from .lm import DelexModel, LocalScorer, decode, fit
from .search import project_to_feasible, select_slots_by_stats
from .tabular import Sentence, Slot, Table, linearize
from .templates import RuleSet


@dataclass(frozen=True)
class ParallelSample:
    table: Table
    sentence: Sentence
    provenance: str = corpusio.HUMAN


@dataclass(frozen=True)
class Corpus:
    """Parallel and unlabeled partitions with per-sample provenance."""

    parallel: tuple[ParallelSample, ...] = ()
    unlabeled: tuple[Table, ...] = ()

    def __post_init__(self):
        ids = [s.table.sample_id for s in self.parallel if s.table.sample_id]
        ids += [t.sample_id for t in self.unlabeled if t.sample_id]
        if len(ids) != len(set(ids)):
            raise ValueError("sample ids must be unique across partitions")
        for s in self.parallel:
            if s.provenance not in corpusio.PROVENANCES:
                raise ValueError(f"bad provenance {s.provenance!r}")

    @property
    def pairs(self) -> list[tuple[Table, Sentence]]:
        return [(s.table, s.sentence) for s in self.parallel]


@dataclass(frozen=True)
class PipelineConfig:
    order: int = 3
    lambdas: tuple[float, ...] = (0.1, 0.3, 0.6)
    epsilon: float = 1e-6
    beam_width: int = 1
    max_len: int = 40
    tau_table: float = 0.0
    tau_ref: float = 0.0
    seed: int = 0
    scorer: str = "builtin"
    length_normalize: bool = False

    _FIELDS = ("order", "lambdas", "epsilon", "beam_width", "max_len",
               "tau_table", "tau_ref", "seed", "scorer", "length_normalize")

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        """Flat key=value file; unknown keys are rejected."""
        values = {}
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                key, value = key.strip(), value.strip()
                if not sep or not key:
                    raise ConfigError(f"{path}:{line_no}: expected key=value")
                if key not in cls._FIELDS:
                    raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
                try:
                    values[key] = cls._parse_value(key, value)
                except ValueError as exc:
                    raise ConfigError(f"{path}:{line_no}: {exc}") from None
        return cls(**values)

    @staticmethod
    def _parse_value(key: str, value: str):
        if key in ("order", "beam_width", "max_len", "seed"):
            return int(value)
        if key in ("epsilon", "tau_table", "tau_ref"):
            return float(value)
        if key == "lambdas":
            return tuple(float(x) for x in value.split(","))
        if key == "length_normalize":
            if value.lower() in ("true", "1", "yes"):
                return True
            if value.lower() in ("false", "0", "no"):
                return False
            raise ValueError(f"bad boolean {value!r}")
        return value


def stage1(corpus_p: Corpus, config: PipelineConfig) -> DelexModel:
    """Fit the first-stage model on the human parallel corpus."""
    if not corpus_p.parallel:
        raise EmptyCorpus("stage 1 needs a parallel corpus")
    return fit(corpus_p.pairs, order=config.order, lambdas=config.lambdas,
               epsilon=config.epsilon)


def _slot_filter_for(table: Table, stats_corpus, config: PipelineConfig):
    if config.tau_table <= 0 and config.tau_ref <= 0:
        return None
    if stats_corpus is None:
        raise EmptyCorpus(
            "slot-selection thresholds require the parallel corpus for statistics")
    keep = select_slots_by_stats(stats_corpus, table,
                                 config.tau_table, config.tau_ref)
    return [s.name for s in keep]


def build_pseudo_corpus(model: DelexModel, tables_u, ruleset: RuleSet,
                        config: PipelineConfig, stats_corpus=None,
                        scorer=None, trace_sink=None):
    """Decode and repair each unlabeled table into a pseudo pair.

    ``scorer`` defaults to the model itself; ``trace_sink`` receives one
    insertion-step record dict per insertion when given.  Every output
    is checked feasible before it is admitted.
    """
    tables_u = list(tables_u)
    if not tables_u:
        raise EmptyCorpus("no unlabeled tables to search over")
    scorer = scorer or LocalScorer(model, config.length_normalize)
    out = []
    for table in tables_u:
        raw = decode(model, table, max_len=config.max_len,
                     beam_width=config.beam_width)
        slot_filter = _slot_filter_for(table, stats_corpus, config)
        repaired, trace = project_to_feasible(scorer, table, raw, ruleset,
                                              slot_filter)
        if trace_sink is not None:
            for step in trace.steps:
                record = step.to_record()
                record["sample_id"] = table.sample_id
                trace_sink(record)
        out.append(ParallelSample(table, repaired, corpusio.PSEUDO_SEARCH))
    return out


def stage2(corpus_p: Corpus, pseudo_pairs, config: PipelineConfig) -> DelexModel:
    """Refit on human pairs followed by pseudo pairs (stable order)."""
    pairs = corpus_p.pairs + [(s.table, s.sentence) for s in pseudo_pairs]
    if not pairs:
        raise EmptyCorpus("stage 2 needs training pairs")
    return fit(pairs, order=config.order, lambdas=config.lambdas,
               epsilon=config.epsilon)


def self_train(model: DelexModel, corpus_p: Corpus, tables_u,
               config: PipelineConfig) -> DelexModel:
    """Retrain on raw decodes as pseudo-groundtruth (no repair step)."""
    tables_u = list(tables_u)
    if not tables_u:
        raise EmptyCorpus("self-training needs unlabeled tables")
    pseudo = [
        ParallelSample(
            t,
            decode(model, t, max_len=config.max_len, beam_width=config.beam_width),
            corpusio.PSEUDO_SELFTRAIN,
        )
        for t in tables_u
    ]
    return stage2(corpus_p, pseudo, config)


def recombine(tables_p, n: int, seed: int) -> list[Table]:
    """Synthesize tables by resampling observed values per slot name.

    Each synthetic table copies the slot-name set of a uniformly drawn
    source table and fills every name with a value drawn uniformly from
    the distinct values observed for that name.  Exact copies of source
    tables are rejected and redrawn a bounded number of times.
    """
    tables_p = list(tables_p)
    if n < 1:
        raise ValueError("n must be at least 1")
    if not tables_p:
        raise EmptyCorpus("recombination needs source tables")
    values_by_name: dict[str, list[str]] = {}
    for t in tables_p:
        for s in t.slots:
            vals = values_by_name.setdefault(s.name, [])
            if s.value not in vals:
                vals.append(s.value)
    for vals in values_by_name.values():
        vals.sort()
    existing = {linearize(t) for t in tables_p}
    rng = random.Random(seed)
    out = []
    for i in range(n):
        for _ in range(20):  # bounded duplicate rejection
            source = rng.choice(tables_p)
            slots = tuple(
                Slot(s.name, rng.choice(values_by_name[s.name]))
                for s in source.slots
            )
            candidate = Table(slots, sample_id=f"r{i + 1}")
            if linearize(candidate) not in existing:
                break
        out.append(candidate)
    return out


def infer(model: DelexModel, table: Table, config: PipelineConfig) -> Sentence:
    """Deployed path: decode only, no insertion search."""
    return decode(model, table, max_len=config.max_len,
                  beam_width=config.beam_width)


def load_parallel_corpus(path) -> Corpus:
    pairs = corpusio.read_parallel(path)
    return Corpus(tuple(ParallelSample(t, s) for t, s in pairs))


def load_pseudo_samples(path) -> list[ParallelSample]:
    return [ParallelSample(t, s, prov) for t, s, prov in corpusio.read_pseudo(path)]
