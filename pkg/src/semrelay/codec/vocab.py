"""Vocabulary and token sequences.

Indices 0..3 are reserved for PAD/BOS/EOS/UNK; the vocabulary file format is
one token per line, line number = index - 4.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import ContractViolationError, VocabularyError

PAD, BOS, EOS, UNK = 0, 1, 2, 3
RESERVED_TOKENS = ("<pad>", "<bos>", "<eos>", "<unk>")


def tokenize(text: str) -> list[str]:
    """Whitespace tokenization, lowercased."""
    return text.lower().split()


@dataclass(frozen=True)
class TokenSequence:
    """A sentence as vocabulary indices, tagged with its vocabulary id."""

    indices: tuple[int, ...]
    vocab_id: str

    def __post_init__(self):
        if len(self.indices) < 1:
            raise ContractViolationError("token sequence must be non-empty")
        if EOS in self.indices and self.indices.index(EOS) != len(self.indices) - 1:
            raise ContractViolationError("EOS must be terminal when present")

    def __len__(self) -> int:
        return len(self.indices)


class Vocabulary:
    """Bijective token <-> index map with four reserved entries."""

    def __init__(self, tokens: Sequence[str], vocab_id: str = "default"):
        self.vocab_id = vocab_id
        self._tokens = list(RESERVED_TOKENS) + list(tokens)
        if len(set(self._tokens)) != len(self._tokens):
            raise VocabularyError("duplicate tokens in vocabulary")
        if len(self._tokens) < 5:
            raise VocabularyError("vocabulary needs at least one non-reserved token")
        self._index = {t: i for i, t in enumerate(self._tokens)}

    @classmethod
    def from_corpus(cls, sentences: Iterable[Sequence[str]],
                    vocab_id: str = "default") -> "Vocabulary":
        seen = sorted({w for s in sentences for w in s})
        for w in seen:
            if w in RESERVED_TOKENS:
                raise VocabularyError(f"corpus contains reserved token {w!r}")
        return cls(seen, vocab_id=vocab_id)

    @property
    def size(self) -> int:
        return len(self._tokens)

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def index_of(self, token: str) -> int:
        return self._index.get(token, UNK)

    def token_at(self, index: int) -> str:
        if not 0 <= index < len(self._tokens):
            raise VocabularyError(f"index {index} out of range for V={self.size}")
        return self._tokens[index]

    def encode(self, words: Sequence[str]) -> list[int]:
        return [self.index_of(w) for w in words]

    def decode(self, indices: Sequence[int], skip_special: bool = True) -> list[str]:
        words = []
        for i in indices:
            token = self.token_at(int(i))
            if skip_special and int(i) in (PAD, BOS, EOS):
                continue
            words.append(token)
        return words

    def sequence(self, words: Sequence[str]) -> TokenSequence:
        """Validated TokenSequence for this vocabulary."""
        idx = self.encode(words)
        for i in idx:
            if not 0 <= i < self.size:
                raise VocabularyError(f"index {i} out of range for V={self.size}")
        return TokenSequence(tuple(idx), vocab_id=self.vocab_id)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            "".join(t + "\n" for t in self._tokens[len(RESERVED_TOKENS):]),
            encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, vocab_id: str | None = None) -> "Vocabulary":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        tokens = [ln for ln in lines if ln]
        return cls(tokens, vocab_id=vocab_id or Path(path).stem)
