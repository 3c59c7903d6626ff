"""Sentence quality metrics: clipped k-gram precision, brevity penalty,
composite BLEU, and cosine similarity of semantic vectors.

Token comparison is case-insensitive. Orders longer than the candidate are
dropped and the remaining weights renormalized; an order with zero precision
zeroes the whole score (no smoothing).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import ContractViolationError, DimensionError, UndefinedSimilarityError


@dataclass(frozen=True)
class BleuConfig:
    """Maximum k-gram order and per-order weights (default uniform)."""

    max_order: int = 2
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        if self.max_order < 1:
            raise ContractViolationError("max_order must be >= 1")
        w = self.weights or tuple(1.0 / self.max_order for _ in range(self.max_order))
        if len(w) != self.max_order:
            raise ContractViolationError(
                f"{len(w)} weights given for max_order {self.max_order}")
        if any(x <= 0 for x in w):
            raise ContractViolationError("weights must be positive")
        if abs(sum(w) - 1.0) > 1e-9:
            raise ContractViolationError(f"weights must sum to 1, got {sum(w)}")
        object.__setattr__(self, "weights", w)


@dataclass
class MetricReport:
    bleu: float
    precisions: dict[int, Optional[Fraction]] = field(default_factory=dict)
    brevity_penalty: float = 1.0
    cosine: Optional[float] = None
    candidate_len: int = 0
    reference_len: int = 0


def _norm(tokens: Sequence[str]) -> list[str]:
    return [t.lower() for t in tokens]


def _ngrams(tokens: Sequence[str], k: int) -> Counter:
    return Counter(tuple(tokens[i:i + k]) for i in range(len(tokens) - k + 1))


def kgram_precision(candidate: Sequence[str], reference: Sequence[str],
                    k: int) -> Optional[Fraction]:
    """Clipped (modified) k-gram precision as an exact rational.

    Candidate k-gram counts are clipped to the reference's k-gram multiset
    counts. Returns None when the candidate is shorter than k (order
    undefined; callers drop it).
    """
    if k < 1:
        raise ContractViolationError(f"k must be >= 1, got {k}")
    cand = _norm(candidate)
    ref = _norm(reference)
    if len(cand) < k:
        return None
    cand_counts = _ngrams(cand, k)
    ref_counts = _ngrams(ref, k)
    clipped = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
    total = sum(cand_counts.values())
    return Fraction(clipped, total)


def brevity_penalty(c: int, r: int) -> float:
    """1 if the candidate is longer than the reference, else exp(1 - r/c)."""
    if c < 1 or r < 1:
        raise ContractViolationError(f"lengths must be >= 1, got c={c}, r={r}")
    if c > r:
        return 1.0
    return math.exp(1.0 - r / c)


def bleu(candidate: Sequence[str], reference: Sequence[str],
         config: BleuConfig = BleuConfig()) -> float:
    """Brevity penalty times the weighted geometric mean of k-gram precisions."""
    return bleu_report(candidate, reference, config).bleu


def bleu_report(candidate: Sequence[str], reference: Sequence[str],
                config: BleuConfig = BleuConfig()) -> MetricReport:
    cand = _norm(candidate)
    ref = _norm(reference)
    report = MetricReport(bleu=0.0, candidate_len=len(cand), reference_len=len(ref))
    if len(cand) == 0 or len(ref) == 0:
        return report

    available: list[tuple[float, Fraction]] = []
    for k in range(1, config.max_order + 1):
        p = kgram_precision(cand, ref, k)
        report.precisions[k] = p
        if p is not None:
            available.append((config.weights[k - 1], p))
    report.brevity_penalty = brevity_penalty(len(cand), len(ref))
    if not available:
        return report
    if any(p == 0 for _, p in available):
        return report
    total_w = sum(w for w, _ in available)
    log_mean = sum((w / total_w) * math.log(p) for w, p in available)
    report.bleu = report.brevity_penalty * math.exp(log_mean)
    # guard against float dust just above 1 for identical sentences
    report.bleu = min(report.bleu, 1.0)
    return report


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two equal-length nonzero vectors."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise DimensionError(f"vector lengths differ: {a.size} vs {b.size}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise UndefinedSimilarityError("cosine similarity of a zero vector")
    value = float(np.dot(a, b) / (na * nb))
    return max(-1.0, min(1.0, value))
