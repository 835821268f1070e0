"""Model backends: a deterministic stub and a transformers wrapper.

A backend answers two questions about a linearized table:

    score(table, candidates) -> one total log probability per candidate
    generate(table, max_len) -> one text

The stub needs nothing installed and is what the golden handshake and
the protocol tests run against.  The transformers backend wraps any
seq2seq checkpoint (model id or local path) and computes teacher-forced
sums of token log probabilities.
"""

from __future__ import annotations

import re


class StubBackend:
    """Arithmetic stand-in for a neural scorer.

    Scores are a pure function of (table, candidate) built from dyadic
    fractions, so they are finite, platform-stable, and identical for
    duplicate candidates.  Generation concatenates the table's values,
    which conveniently makes the output cover every slot.
    """

    name = "stub"

    def score(self, table: str, candidates: list[str]) -> list[float]:
        return [self._score_one(table, c) for c in candidates]

    @staticmethod
    def _score_one(table: str, candidate: str) -> float:
        total = 0
        for i, ch in enumerate(table + "\x1f" + candidate):
            total += (i % 13 + 1) * ord(ch)
        n_tokens = len(candidate.split())
        return -(total % 4096) / 256.0 - n_tokens / 2.0 - len(candidate) / 64.0

    def generate(self, table: str, max_len: int) -> str:
        values = re.findall(r"\[([^\]]*)\]", table)
        words = " ".join(values).split()[:max_len]
        return " ".join(words) + " ."


class TransformersBackend:
    """Teacher-forced scoring and greedy decoding for a seq2seq checkpoint."""

    def __init__(self, model, tokenizer, device: str = "cpu",
                 max_batch: int = 32, deterministic: bool = True):
        import torch

        self._torch = torch
        self.model = model.to(device).eval()
        self.tokenizer = tokenizer
        self.device = device
        self.max_batch = max(1, max_batch)
        self.deterministic = deterministic
        if deterministic:
            torch.manual_seed(0)
        self.name = getattr(model.config, "name_or_path", "") or "transformers"

    @classmethod
    def load(cls, model_id_or_path: str, device: str = "cpu",
             max_batch: int = 32, deterministic: bool = True):
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        model = AutoModelForSeq2SeqLM.from_pretrained(model_id_or_path)
        tokenizer = AutoTokenizer.from_pretrained(model_id_or_path)
        return cls(model, tokenizer, device, max_batch, deterministic)

    def score(self, table: str, candidates: list[str]) -> list[float]:
        scores: list[float] = []
        for start in range(0, len(candidates), self.max_batch):
            scores.extend(self._score_chunk(
                table, candidates[start:start + self.max_batch]))
        return scores

    def _score_chunk(self, table: str, candidates: list[str]) -> list[float]:
        torch = self._torch
        tok = self.tokenizer
        with torch.no_grad():
            enc = tok([table] * len(candidates), return_tensors="pt",
                      padding=True).to(self.device)
            lab = tok(candidates, return_tensors="pt", padding=True)
            labels = lab.input_ids.to(self.device)
            out = self.model(input_ids=enc.input_ids,
                             attention_mask=enc.attention_mask,
                             labels=labels)
            log_probs = torch.log_softmax(out.logits, dim=-1)
            token_lp = log_probs.gather(2, labels.unsqueeze(-1)).squeeze(-1)
            mask = lab.attention_mask.to(self.device)
            totals = (token_lp * mask).sum(dim=1)
        return [float(v) for v in totals.cpu()]

    def generate(self, table: str, max_len: int) -> str:
        torch = self._torch
        tok = self.tokenizer
        with torch.no_grad():
            enc = tok([table], return_tensors="pt").to(self.device)
            ids = self.model.generate(
                enc.input_ids,
                attention_mask=enc.attention_mask,
                max_length=max_len,
                do_sample=not self.deterministic,
                num_beams=1,
            )
        return tok.batch_decode(ids, skip_special_tokens=True)[0]


def load_backend(model: str, device: str = "cpu", max_batch: int = 32,
                 deterministic: bool = True):
    """'stub' or a transformers model id / local path."""
    if model == "stub":
        return StubBackend()
    return TransformersBackend.load(model, device, max_batch, deterministic)
