"""Exact joint probabilities of indicator patterns under the window rule.

A pattern constrains U on a block of consecutive times; ``None`` entries leave
a time unconstrained, which expresses patterns on non-consecutive index sets
such as ``{1, 2, 4, 5}``.  Probabilities are obtained by brute-force
enumeration of every configuration of the underlying Bernoulli event bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import EnumerationTooLargeError
from .processes import WindowRuleParams, window_rule

DEFAULT_CAP = 24
_CHUNK = 1 << 16


@dataclass(frozen=True)
class BinaryPattern:
    bits: tuple

    def __post_init__(self):
        bits = tuple(None if b is None else int(b) for b in self.bits)
        if not bits:
            raise ValueError("a pattern needs at least one position")
        if any(b not in (0, 1, None) for b in bits):
            raise ValueError("pattern entries must be 0, 1 or None")
        if bits[0] is None or bits[-1] is None:
            raise ValueError("pattern must start and end on a constrained position")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def on_indices(cls, indices: Sequence[int], bits: Sequence[int]) -> "BinaryPattern":
        """Pattern with ``U_{indices[k]} = bits[k]`` (indices increasing)."""
        if len(indices) != len(bits):
            raise ValueError("indices and bits differ in length")
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("indices must be strictly increasing")
        lo = indices[0]
        out: list = [None] * (indices[-1] - lo + 1)
        for i, b in zip(indices, bits):
            out[i - lo] = b
        return cls(tuple(out))

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join("." if b is None else str(b) for b in self.bits)


@dataclass(frozen=True)
class PatternProb:
    pattern: BinaryPattern
    probability: float


def _as_pattern(pattern) -> BinaryPattern:
    return pattern if isinstance(pattern, BinaryPattern) else BinaryPattern(tuple(pattern))


def _weight(k: int, length: int, p: float) -> float:
    return (p**k) * ((1.0 - p) ** (length - k))


def pattern_prob_exact(
    pattern, params: WindowRuleParams, cap: int = DEFAULT_CAP
) -> PatternProb:
    """Exact P(U_t = pattern) under the window rule.

    Every configuration of the ``s + kappa - 1`` event bits feeding the
    pattern's window is enumerated.  Matching configurations are tallied by
    their number of ones, so the result is the exact polynomial
    ``sum_k c_k p^k (1-p)^(L-k)`` evaluated with ``math.fsum``.

    Raises
    ------
    EnumerationTooLargeError
        If ``s + kappa - 1`` exceeds ``cap``.
    """
    pat = _as_pattern(pattern)
    kappa = params.kappa
    s = len(pat)
    length = s + kappa - 1
    if length > cap:
        raise EnumerationTooLargeError(
            f"pattern of length {s} with kappa={kappa} needs 2^{length} states (cap {cap})"
        )
    pos = np.array([i for i, b in enumerate(pat.bits) if b is not None])
    want = np.array([b for b in pat.bits if b is not None], dtype=np.int8)
    counts = np.zeros(length + 1, dtype=np.int64)
    shifts = np.arange(length, dtype=np.int64)
    total = 1 << length
    for start in range(0, total, _CHUNK):
        states = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        bits = ((states[:, None] >> shifts) & 1).astype(np.int8)
        u = _window_rule_rows(bits, kappa)
        hit = np.all(u[:, pos] == want, axis=1)
        counts += np.bincount(bits[hit].sum(axis=1), minlength=length + 1)
    prob = math.fsum(int(c) * _weight(k, length, params.p) for k, c in enumerate(counts) if c)
    return PatternProb(pat, prob)


def _window_rule_rows(bits: np.ndarray, kappa: int) -> np.ndarray:
    w = kappa - 1
    if w == 0:
        return np.ones_like(bits)
    csum = np.concatenate((np.zeros((bits.shape[0], 1), dtype=np.int64), np.cumsum(bits, axis=1)), axis=1)
    prev = csum[:, w:-1] - csum[:, : bits.shape[1] - w]
    return np.where(prev == 0, 1, bits[:, w:]).astype(np.int8)


def prob(pattern, params: WindowRuleParams, cap: int = DEFAULT_CAP) -> float:
    return pattern_prob_exact(pattern, params, cap).probability


def fresh_gap_pattern(j: int) -> tuple:
    """The pattern ``(1, 0^j, 1)``: a fresh record, j failures, a fresh record."""
    return (1,) + (0,) * j + (1,)


def fresh_gap_probs(params: WindowRuleParams, max_j: Optional[int] = None) -> list:
    """``[P(1, 0^j, 1) for j = 0..max_j]``; ``max_j`` defaults to ``kappa - 1``.

    Summed over the full range the values give P(U = 1).
    """
    if max_j is None:
        max_j = params.kappa - 1
    if not 0 <= max_j <= params.kappa - 1:
        raise ValueError(f"max_j must lie in [0, {params.kappa - 1}], got {max_j}")
    return [prob(fresh_gap_pattern(j), params) for j in range(max_j + 1)]


def all_patterns(s: int):
    for k in range(1 << s):
        yield tuple((k >> (s - 1 - i)) & 1 for i in range(s))


# Closed forms for the window rule, used as cross-checks of the enumeration.


def closed_p0(p: float, kappa: int) -> float:
    return 1.0 - p - (1.0 - p) ** kappa


def closed_p00(p: float, kappa: int) -> float:
    """P(0, 0), valid for kappa > 2."""
    return (1.0 - p) ** 2 - (1.0 - p) ** kappa


def closed_p10(p: float, kappa: int) -> float:
    return p * (1.0 - p)


def pattern_frequency(u, pattern) -> float:
    """Empirical frequency of ``pattern`` over all anchors of a 0/1 series."""
    pat = _as_pattern(pattern)
    uv = np.asarray(getattr(u, "values", u))
    s = len(pat)
    n_anchor = uv.size - s + 1
    if n_anchor < 1:
        raise ValueError("series shorter than pattern")
    hit = np.ones(n_anchor, dtype=bool)
    for i, b in enumerate(pat.bits):
        if b is not None:
            hit &= uv[i : i + n_anchor] == b
    return float(hit.mean())
