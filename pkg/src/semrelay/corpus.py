"""Synthetic paired corpora for background-knowledge experiments.

Two nodes share sentence templates but realize some slot phrases with
divergent surface forms (abbreviation vs. expansion, family role vs. name).
The generator renders every drawn sentence twice, once per side, so the
destination corpus is exactly the lexicon translation of the source corpus
and each trial has an aligned reference sentence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .codec.model import SemanticCodecModel
from .codec.vocab import Vocabulary, tokenize
from .errors import LexiconError, TemplateError
from .relay import TranslationLexicon

_SLOT_RE = re.compile(r"\{([a-z_]+)\}")


@dataclass
class BackgroundKnowledge:
    """One node's corpus, vocabulary and (once trained) codec handle."""

    bk_id: str
    sentences: list[list[str]]
    vocab: Vocabulary
    codec: Optional[SemanticCodecModel] = None

    @classmethod
    def from_sentences(cls, bk_id: str, sentences: Sequence[Sequence[str]]
                       ) -> "BackgroundKnowledge":
        sents = [list(s) for s in sentences]
        return cls(bk_id, sents, Vocabulary.from_corpus(sents, vocab_id=bk_id))


@dataclass(frozen=True)
class SlotChoice:
    source: str
    target: str

    @property
    def divergent(self) -> bool:
        return self.source != self.target


@dataclass(frozen=True)
class TemplateBank:
    templates: tuple[str, ...]
    slots: dict[str, tuple[SlotChoice, ...]]

    def __post_init__(self):
        if not self.templates:
            raise TemplateError("template bank is empty")
        for t in self.templates:
            for name in _SLOT_RE.findall(t):
                if name not in self.slots:
                    raise TemplateError(f"template {t!r} references undefined slot {name!r}")
        seen: dict[str, str] = {}
        for choices in self.slots.values():
            for c in choices:
                if c.source in seen and seen[c.source] != c.target:
                    raise LexiconError(
                        f"source phrase {c.source!r} maps to both "
                        f"{seen[c.source]!r} and {c.target!r}")
                seen[c.source] = c.target


def default_template_bank() -> TemplateBank:
    return TemplateBank(
        templates=(
            "{subject} is very good at {topic}",
            "{subject} is learning {topic} now",
            "{subject} teaches {topic} on {day}",
            "{subject} often plays {game} after work",
            "{subject} really enjoys {hobby}",
            "{subject} wrote a paper about {topic}",
        ),
        slots={
            "subject": (
                SlotChoice("my son", "bob"),
                SlotChoice("my daughter", "alice"),
                SlotChoice("our teacher", "dr chen"),
                SlotChoice("the new intern", "carol"),
                SlotChoice("my neighbor", "dave"),
            ),
            "topic": (
                SlotChoice("cs", "computer science"),
                SlotChoice("ml", "machine learning"),
                SlotChoice("math", "math"),
                SlotChoice("physics", "physics"),
                SlotChoice("biology", "biology"),
            ),
            "day": (
                SlotChoice("mon", "monday"),
                SlotChoice("fri", "friday"),
                SlotChoice("sunday", "sunday"),
            ),
            "game": (
                SlotChoice("chess", "chess"),
                SlotChoice("go", "go"),
                SlotChoice("poker", "poker"),
            ),
            "hobby": (
                SlotChoice("hiking", "hiking"),
                SlotChoice("cooking", "cooking"),
                SlotChoice("gardening", "gardening"),
            ),
        },
    )


@dataclass(frozen=True)
class CorpusSpec:
    n_sentences: int = 180
    divergence: float = 1.0
    source_id: str = "source"
    dest_id: str = "dest"

    def __post_init__(self):
        if self.n_sentences < 1:
            raise TemplateError("n_sentences must be >= 1")
        if not 0.0 <= self.divergence <= 1.0:
            raise TemplateError("divergence must be in [0, 1]")


@dataclass
class GeneratedCorpora:
    """Aligned source/destination corpora plus the lexicon that links them."""

    bk_source: BackgroundKnowledge
    bk_dest: BackgroundKnowledge
    lexicon: TranslationLexicon
    pairs: list[tuple[list[str], list[str]]] = field(default_factory=list)


def _render(template: str, fill: dict[str, SlotChoice], side: str) -> list[str]:
    def sub(m: re.Match) -> str:
        choice = fill[m.group(1)]
        return choice.source if side == "source" else choice.target

    return tokenize(_SLOT_RE.sub(sub, template))


def generate_corpus(bank: TemplateBank, spec: CorpusSpec,
                    rng: np.random.Generator) -> GeneratedCorpora:
    """Realize the bank into two aligned corpora and their lexicon.

    Divergent slot surfaces are kept with probability `divergence` (decided
    once per slot choice); the rest collapse to the source form. The full
    template cross product is enumerated, shuffled, and truncated to
    n_sentences, so small banks yield every combination.
    """
    # decide, per divergent choice, whether the two sides actually diverge
    effective: dict[str, tuple[SlotChoice, ...]] = {}
    kept_pairs: list[SlotChoice] = []
    for name, choices in bank.slots.items():
        out = []
        for c in choices:
            if c.divergent and rng.random() < spec.divergence:
                out.append(c)
                kept_pairs.append(c)
            else:
                out.append(SlotChoice(c.source, c.source))
        effective[name] = tuple(out)

    draws: list[tuple[str, dict[str, SlotChoice]]] = []
    for template in bank.templates:
        names = _SLOT_RE.findall(template)
        fills: list[dict[str, SlotChoice]] = [{}]
        for name in names:
            fills = [dict(f, **{name: c}) for f in fills for c in effective[name]]
        draws.extend((template, f) for f in fills)
    order = rng.permutation(len(draws))[:spec.n_sentences]

    src_sents, dst_sents = [], []
    for i in order:
        template, fill = draws[i]
        src_sents.append(_render(template, fill, "source"))
        dst_sents.append(_render(template, fill, "dest"))

    used_sources = {tuple(tokenize(c.source)) for c in kept_pairs}
    lexicon = TranslationLexicon(
        [(c.source, c.target) for c in sorted(kept_pairs, key=lambda c: c.source)
         if tuple(tokenize(c.source)) in used_sources])

    bk_source = BackgroundKnowledge.from_sentences(spec.source_id, src_sents)
    bk_dest = BackgroundKnowledge.from_sentences(spec.dest_id, dst_sents)

    for src, dst in zip(src_sents, dst_sents):
        translated = lexicon.apply(src)
        if translated != dst:
            raise LexiconError(
                f"lexicon does not reproduce the destination rendering: "
                f"{' '.join(src)!r} -> {' '.join(translated)!r} != {' '.join(dst)!r}")
        if any(w not in bk_dest.vocab for w in translated):
            raise LexiconError(
                f"translated sentence leaves the destination vocabulary: {translated}")

    return GeneratedCorpora(bk_source, bk_dest, lexicon,
                            pairs=list(zip(src_sents, dst_sents)))
