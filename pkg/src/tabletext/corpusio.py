"""Corpus file formats.

Parallel corpus: one sample per line, ``MR<TAB>reference``.
Unlabeled corpus: one MR per line.
Pseudo corpus: ``MR<TAB>reference<TAB>provenance``.

All files are UTF-8; blank lines and lines starting with ``#`` are
skipped.
"""

from __future__ import annotations

from dataclasses import replace

from .errors import CorpusFormat, MalformedMR
from .tabular import Sentence, Table, detokenize, linearize, parse_mr, tokenize

HUMAN = "human"
PSEUDO_SEARCH = "pseudo_search"
PSEUDO_SELFTRAIN = "pseudo_selftrain"
RECOMBINED = "recombined"
PROVENANCES = frozenset({HUMAN, PSEUDO_SEARCH, PSEUDO_SELFTRAIN, RECOMBINED})


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield line_no, line


def _parse_mr_at(path, line_no, text, prefix) -> Table:
    try:
        table = parse_mr(text)
    except MalformedMR as exc:
        raise CorpusFormat(f"{path}:{line_no}: {exc}") from None
    return replace(table, sample_id=f"{prefix}{line_no}")


def read_parallel(path) -> list[tuple[Table, Sentence]]:
    pairs = []
    for line_no, line in _data_lines(path):
        mr, sep, ref = line.partition("\t")
        if not sep:
            raise CorpusFormat(f"{path}:{line_no}: missing TAB separator")
        pairs.append((_parse_mr_at(path, line_no, mr, "p"), tokenize(ref)))
    return pairs


def read_unlabeled(path) -> list[Table]:
    return [_parse_mr_at(path, line_no, line, "u")
            for line_no, line in _data_lines(path)]


def read_pseudo(path) -> list[tuple[Table, Sentence, str]]:
    samples = []
    for line_no, line in _data_lines(path):
        parts = line.split("\t")
        if len(parts) != 3:
            raise CorpusFormat(
                f"{path}:{line_no}: expected MR<TAB>text<TAB>provenance")
        mr, ref, provenance = parts
        if provenance not in PROVENANCES:
            raise CorpusFormat(f"{path}:{line_no}: bad provenance {provenance!r}")
        samples.append(
            (_parse_mr_at(path, line_no, mr, "q"), tokenize(ref), provenance))
    return samples


def read_outputs(path) -> list[Sentence]:
    """One generated sentence per line; blank/comment lines skipped."""
    return [tokenize(line) for _, line in _data_lines(path)]


def _checked(field: str, kind: str) -> str:
    if "\t" in field or "\n" in field:
        raise CorpusFormat(f"{kind} may not contain tabs or newlines: {field!r}")
    return field


def write_parallel(path, pairs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for table, sentence in pairs:
            fh.write(_checked(linearize(table), "MR"))
            fh.write("\t")
            fh.write(_checked(detokenize(sentence), "reference"))
            fh.write("\n")


def write_unlabeled(path, tables) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for table in tables:
            fh.write(_checked(linearize(table), "MR") + "\n")


def write_pseudo(path, samples) -> None:
    """``samples`` holds (table, sentence, provenance) triples."""
    with open(path, "w", encoding="utf-8") as fh:
        for table, sentence, provenance in samples:
            if provenance not in PROVENANCES:
                raise CorpusFormat(f"bad provenance {provenance!r}")
            fh.write(_checked(linearize(table), "MR"))
            fh.write("\t")
            fh.write(_checked(detokenize(sentence), "reference"))
            fh.write("\t")
            fh.write(provenance)
            fh.write("\n")


def write_outputs(path, sentences) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sentence in sentences:
            fh.write(_checked(detokenize(sentence), "output") + "\n")
