"""Logistic-weight ordered error patterns (the 1-line ORBGRAND schedule).

A pattern is a strictly increasing tuple of 1-based reliability ranks; rank 1
is the least reliable bit. Patterns are emitted by increasing logistic weight
(sum of ranks), then by Hamming weight, then lexicographically. Each weight
class is the set of partitions of W into distinct parts no larger than n.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import islice


@dataclass(frozen=True)
class RankPattern:
    ranks: tuple

    @property
    def logistic_weight(self):
        return sum(self.ranks)

    @property
    def hamming_weight(self):
        return len(self.ranks)


def logistic_weight(ranks):
    prev = 0
    for r in ranks:
        if r <= prev:
            raise ValueError(f"ranks must be strictly increasing and >= 1: {tuple(ranks)}")
        prev = r
    return sum(ranks)


def _distinct_parts(total, count, lo, hi):
    """Increasing tuples of ``count`` parts in [lo, hi] summing to ``total``, lex order."""
    if count == 1:
        if lo <= total <= hi:
            yield (total,)
        return
    rest_count = count - 1
    top = rest_count * (rest_count - 1) // 2
    for a in range(lo, hi + 1):
        rest = total - a
        if rest < rest_count * (a + 1) + top:
            break
        if rest > rest_count * hi - top:
            continue
        for tail in _distinct_parts(rest, rest_count, a + 1, hi):
            yield (a,) + tail


def patterns_of_weight(weight, n):
    """All rank patterns of a given logistic weight, in emission order."""
    h = 1
    while h * (h + 1) // 2 <= weight:
        yield from _distinct_parts(weight, h, 1, n)
        h += 1


def iter_ranks(n):
    """Unbounded-in-spirit stream of rank tuples; ends after all 2^n - 1 patterns."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for weight in range(1, n * (n + 1) // 2 + 1):
        yield from patterns_of_weight(weight, n)


def pattern_iterator(n, q_max):
    """The first ``q_max`` nonzero patterns for length n, as RankPattern objects."""
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    for ranks in islice(iter_ranks(n), q_max):
        yield RankPattern(ranks)


@lru_cache(maxsize=32)
def pattern_table(n, q_max):
    """Cached first ``q_max`` patterns as 0-based rank tuples (rank 1 -> 0).

    Decoders index the reliability permutation directly with these.
    """
    return tuple(tuple(r - 1 for r in ranks) for ranks in islice(iter_ranks(n), q_max))


def apply_permutation(pattern, pi):
    """Bit positions of the ranked symbols: {pi[r - 1] for r in ranks}."""
    ranks = pattern.ranks if isinstance(pattern, RankPattern) else tuple(pattern)
    n = len(pi)
    out = []
    for r in ranks:
        if not 1 <= r <= n:
            raise ValueError(f"rank {r} out of range 1..{n}")
        out.append(int(pi[r - 1]))
    return frozenset(out)
