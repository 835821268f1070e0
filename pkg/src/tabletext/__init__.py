"""Few-shot data-to-text generation with slot-coverage repair.

Train a conditional generator on a small table/text corpus, repair
low-coverage outputs by greedy template insertion at the scorer-argmax
position, build a pseudo-parallel corpus from the repaired outputs, and
retrain on it.
"""

from .errors import (
    ConfigError,
    CorpusFormat,
    DataError,
    DuplicateRule,
    EmptyCorpus,
    LengthMismatch,
    MalformedMR,
    PatternError,
    RemoteUnavailable,
    RuleSyntax,
    TabletextError,
    UnboundPlaceholder,
    ZeroSlots,
)
from .tabular import (
    DelexSentence,
    Sentence,
    Slot,
    Table,
    delexicalize,
    detokenize,
    linearize,
    parse_mr,
    relexicalize,
    tokenize,
)
from .templates import RuleSet, e2e_rules, load_rules, render, wikibio_rules
from .match import (
    MatchPatterns,
    MatchReport,
    classify_soft,
    corpus_coverage,
    e2e_patterns,
    find_missing_hard,
    load_patterns,
    ser,
)
from .lm import (
    DelexModel,
    LocalScorer,
    decode,
    fit,
    load_model,
    log_prob,
    next_token_dist,
    save_model,
)
from .remote import ModelServer, RemoteScorer, serve_stdio
from .search import (
    InsertionStep,
    InsertionTrace,
    best_insertion,
    project_to_feasible,
    select_slots_by_stats,
)
from .pipeline import (
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
from .evaluation import EvalReport, bleu_plumbing, evaluate

__version__ = "0.1.0"
