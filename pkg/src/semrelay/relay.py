"""Relay forwarding protocols.

AF rescales the received analog block under a power constraint. DF
regenerates at the autoencoder layer: equalize, reconstruct the semantic
rows, re-encode cleanly. The semantic variants decode all the way to a
sentence: df-semantic re-encodes it under the same background knowledge,
SF first rewrites it into the destination's background knowledge through a
phrase lexicon.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from .autoencoder import AutoEncoderModel, ae_decode, ae_encode
from .channel import ChannelRealization, SymbolBlock, equalize, normalize_power
from .codec.model import SemanticCodecModel, encode_sentence, sem_decode_infer
from .codec.vocab import UNK, tokenize
from .errors import ContractViolationError, LexiconError

if TYPE_CHECKING:
    from .corpus import BackgroundKnowledge

STRATEGIES = ("af", "df", "df-semantic", "sf")


@dataclass(frozen=True)
class RelayStrategy:
    """Forwarding mode tag plus the relay's transmit power budget."""

    tag: str
    power: float = 1.0

    def __post_init__(self):
        if self.tag not in STRATEGIES:
            raise ContractViolationError(
                f"unknown strategy {self.tag!r}, expected one of {STRATEGIES}")
        if self.power <= 0:
            raise ContractViolationError("relay power must be positive")


@dataclass
class RelayOutput:
    """Forwarded block plus what the relay understood along the way."""

    block: Optional[SymbolBlock]
    af_gain: Optional[float] = None
    decoded_words: Optional[list[str]] = None
    forwarded_words: Optional[list[str]] = None
    semantic_failure: bool = False


class TranslationLexicon:
    """Ordered phrase-substitution rules between two background knowledges.

    Rules are canonically sorted longest-source-first so left-to-right
    longest-match application is well defined. Construction rejects
    duplicate sources and any rule whose source phrase reappears inside a
    target phrase (which would break idempotence).
    """

    def __init__(self, pairs: Sequence[tuple[str, str]]):
        rules: list[tuple[tuple[str, ...], tuple[str, ...]]] = []
        seen: set[tuple[str, ...]] = set()
        for src, dst in pairs:
            s = tuple(tokenize(src))
            d = tuple(tokenize(dst))
            if not s or not d:
                raise LexiconError(f"empty phrase in rule {src!r} -> {dst!r}")
            if s in seen:
                raise LexiconError(f"duplicate source phrase {src!r}")
            seen.add(s)
            rules.append((s, d))
        rules.sort(key=lambda r: (-len(r[0]), r[0]))
        for s, _ in rules:
            for _, d in rules:
                for i in range(len(d) - len(s) + 1):
                    if d[i:i + len(s)] == s:
                        raise LexiconError(
                            f"source phrase {' '.join(s)!r} occurs inside target "
                            f"{' '.join(d)!r}; application would not be idempotent")
        self.rules = rules

    def __len__(self) -> int:
        return len(self.rules)

    def apply(self, words: Sequence[str]) -> list[str]:
        """One left-to-right pass, longest match first at each position."""
        words = [w.lower() for w in words]
        out: list[str] = []
        i = 0
        while i < len(words):
            for src, dst in self.rules:
                if tuple(words[i:i + len(src)]) == src:
                    out.extend(dst)
                    i += len(src)
                    break
            else:
                out.append(words[i])
                i += 1
        return out

    def save(self, path: str | Path) -> None:
        lines = ["# source phrase\ttarget phrase"]
        lines += [f"{' '.join(s)}\t{' '.join(d)}" for s, d in self.rules]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TranslationLexicon":
        pairs = []
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "\t" not in line:
                raise LexiconError(f"malformed lexicon line (no tab): {raw!r}")
            src, dst = line.split("\t", 1)
            pairs.append((src, dst))
        return cls(pairs)


def translate_bk(words: Sequence[str], lexicon: TranslationLexicon,
                 target_vocab=None) -> list[str]:
    """Rewrite a sentence into the target background knowledge.

    Phrase substitution is longest-match-first, left to right; untouched
    tokens pass through and map to UNK later if the target vocabulary does
    not know them.
    """
    translated = lexicon.apply(words)
    if target_vocab is not None:
        return [w if w in target_vocab else target_vocab.token_at(UNK)
                for w in translated]
    return translated


def forward_af(y_hat: SymbolBlock, ch1: ChannelRealization, p_r: float,
               p_s: float = 1.0) -> RelayOutput:
    """Amplify-and-forward: z = alpha * received, with alpha chosen so the
    expected relay output power equals p_r given the hop-1 realization."""
    if p_r <= 0:
        raise ContractViolationError("relay power must be positive")
    alpha = float(np.sqrt(p_r / (abs(ch1.h) ** 2 * p_s + ch1.sigma2)))
    z = SymbolBlock(alpha * y_hat.symbols, power=p_r)
    return RelayOutput(block=z, af_gain=alpha)


def forward_df(y_hat: SymbolBlock, ch1: ChannelRealization,
               ae: AutoEncoderModel, p_r: float) -> RelayOutput:
    """Decode-and-forward at the autoencoder layer: equalize, reconstruct the
    semantic rows, re-encode, re-normalize to the relay budget."""
    eq = equalize(y_hat, ch1)
    rows = ae_decode(eq, ae)
    z = ae_encode(rows, ae)
    return RelayOutput(block=normalize_power(z, p_r))


def _decode_sentence(y_hat: SymbolBlock, ch1: ChannelRealization,
                     ae: AutoEncoderModel, codec: SemanticCodecModel,
                     max_len: Optional[int] = None) -> list[int]:
    eq = equalize(y_hat, ch1)
    rows = ae_decode(eq, ae)
    ids, _ = sem_decode_infer(rows, codec, max_len=max_len)
    return ids


def forward_df_semantic(y_hat: SymbolBlock, ch1: ChannelRealization,
                        ae: AutoEncoderModel, bk: "BackgroundKnowledge",
                        p_r: float) -> RelayOutput:
    """DF with a full semantic decode and re-encode under one shared BK."""
    ids = _decode_sentence(y_hat, ch1, ae, bk.codec)
    words = bk.vocab.decode(ids)
    if not words:
        return RelayOutput(block=None, decoded_words=[], semantic_failure=True)
    x = encode_sentence(np.array(bk.vocab.encode(words)), bk.codec)
    z = ae_encode(x, ae)
    return RelayOutput(block=normalize_power(z, p_r), decoded_words=words,
                       forwarded_words=words)


def forward_sf(y_hat: SymbolBlock, ch1: ChannelRealization,
               bk_sr: "BackgroundKnowledge", bk_rd: "BackgroundKnowledge",
               lexicon: TranslationLexicon, ae: AutoEncoderModel,
               p_r: float) -> RelayOutput:
    """Semantic forward: decode the sentence under the source-relay BK,
    rewrite it through the lexicon into the relay-destination BK, re-encode.

    A translation that still contains out-of-vocabulary tokens is recorded as
    a semantic failure; the trial is flagged rather than crashed."""
    ids = _decode_sentence(y_hat, ch1, ae, bk_sr.codec)
    decoded = bk_sr.vocab.decode(ids)
    if not decoded:
        return RelayOutput(block=None, decoded_words=[], semantic_failure=True)
    translated = lexicon.apply(decoded)
    target_ids = bk_rd.vocab.encode(translated)
    failure = UNK in target_ids
    x = encode_sentence(np.array(target_ids), bk_rd.codec)
    z = ae_encode(x, ae)
    return RelayOutput(block=normalize_power(z, p_r), decoded_words=decoded,
                       forwarded_words=translated, semantic_failure=failure)
