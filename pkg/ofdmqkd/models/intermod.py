"""
Third-order intermodulation counters.

A mixing product lands on subcarrier k when the carrier indices satisfy one of

    M1: 2m + n = k        M2: 2m - n = k
    M3: n - 2m = k        (folds onto k from the image at -f_k)
    W1: m + n + l = k     W2: m + n - l = k     W3: m - n - l = k

with every index in [1, N]. The counts are taken over ordered tuples unless
unordered counting is requested, and the admissible tuples are restricted by
a distinctness rule (see DistinctnessRule).

Counting is done by inclusion-exclusion over the forbidden coincidences
(m = n, m = k, ...): for every subset of coincidences the indices merge into
groups, groups tied to k are fixed, and the number of free assignments solving
the linear relation for all k at once is read off a convolution of indicator
kernels. This is exact and costs O(N^2) per relation.
"""
import logging
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, NamedTuple, Tuple

import numpy as np

from ofdmqkd.models.enums import DistinctnessRule, TupleCounting

LOG = logging.getLogger('ofdmqkd.models.intermod')

K = 'k'

RELATIONS = {
    'm1': {'m': 2, 'n': 1},
    'm2': {'m': 2, 'n': -1},
    'm3': {'m': -2, 'n': 1},
    'w1': {'m': 1, 'n': 1, 'l': 1},
    'w2': {'m': 1, 'n': 1, 'l': -1},
    'w3': {'m': 1, 'n': -1, 'l': -1}
}

# orderings of one mixing product that appear as separate ordered tuples
ORDERINGS = {'m1': 1, 'm2': 1, 'm3': 1, 'w1': 6, 'w2': 2, 'w3': 2}

COUNTERS = ('m1', 'm2', 'w1', 'w2', 'w3')


class IntermodCounts(NamedTuple):
    m1: int
    m2: int
    w1: int
    w2: int
    w3: int
    n_total: int
    k: int


def forbidden_events(variables: Tuple[str, ...], rule: DistinctnessRule) -> List[Tuple[str, str]]:
    """Coincidences excluded from the admissible tuples of one relation."""
    events = list(combinations(variables, 2))
    three_index = len(variables) == 3
    if rule == DistinctnessRule.ExcludeK or (three_index and rule == DistinctnessRule.Strict):
        events += [(v, K) for v in variables]
    return events


def _groups(variables: Tuple[str, ...], events) -> List[List[str]]:
    parent = {v: v for v in variables + (K,)}

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    for a, b in events:
        ra, rb = find(a), find(b)
        if ra != rb:
            # keep k as the root of any group it joins
            if rb == K:
                ra, rb = rb, ra
            parent[rb] = ra

    groups = {}  # type: Dict[str, List[str]]
    for v in variables + (K,):
        groups.setdefault(find(v), []).append(v)
    return list(groups.values())


def _kernel(coefficient: int, n_total: int) -> Tuple[int, np.ndarray]:
    """Distribution of coefficient * y for y uniform on [1, N], as (offset, counts)."""
    if coefficient == 0:
        return 0, np.array([n_total], dtype=np.int64)
    step = abs(coefficient)
    counts = np.zeros(step * (n_total - 1) + 1, dtype=np.int64)
    counts[::step] = 1
    offset = coefficient if coefficient > 0 else coefficient * n_total
    return offset, counts


def _solutions(groups: List[List[str]], coefficients: Dict[str, int], n_total: int) -> np.ndarray:
    """Number of assignments solving the relation for every k = 1..N given merged groups."""
    offset, dist = 0, np.array([1], dtype=np.int64)
    fixed = 0
    for group in groups:
        c = sum(coefficients.get(v, 0) for v in group)
        if K in group:
            fixed = c
            continue
        o, kernel = _kernel(c, n_total)
        offset += o
        dist = np.convolve(dist, kernel)

    k = np.arange(1, n_total + 1)
    index = (1 - fixed) * k - offset
    inside = (index >= 0) & (index < len(dist))
    out = np.zeros(n_total, dtype=np.int64)
    out[inside] = dist[index[inside]]
    return out


@lru_cache(maxsize=4096)
def _count(relation: str, n_total: int, rule: DistinctnessRule) -> Tuple[int, ...]:
    coefficients = RELATIONS[relation]
    variables = tuple(coefficients)
    events = forbidden_events(variables, rule)

    # many coincidence subsets collapse to the same partition of the indices
    signs = {}  # type: Dict[Tuple[Tuple[str, ...], ...], int]
    for size in range(len(events) + 1):
        for subset in combinations(events, size):
            partition = tuple(sorted(tuple(sorted(g)) for g in _groups(variables, subset)))
            signs[partition] = signs.get(partition, 0) + (-1) ** size

    total = np.zeros(n_total, dtype=np.int64)
    for partition, sign in signs.items():
        if sign:
            total += sign * _solutions([list(g) for g in partition], coefficients, n_total)
    return tuple(int(c) for c in total)


def count_arrays(n_total: int, rule: DistinctnessRule = DistinctnessRule.Strict,
                 counting: TupleCounting = TupleCounting.Ordered) -> Dict[str, np.ndarray]:
    """Counters for k = 1..N as arrays indexed by k - 1."""
    if n_total < 1:
        raise ValueError(f'total carrier number must be at least 1, not {n_total}')
    rule = DistinctnessRule(rule)
    counting = TupleCounting(counting)

    arrays = {}
    for name in COUNTERS:
        counts = np.array(_count(name, n_total, rule), dtype=np.int64)
        if counting == TupleCounting.Unordered:
            counts = counts // ORDERINGS[name]
        arrays[name] = counts
    return arrays


def image_counts(n_total: int, rule: DistinctnessRule = DistinctnessRule.Pairwise) -> np.ndarray:
    """M3 products for k = 1..N, indexed by k - 1. Each one is a single ordered tuple."""
    if n_total < 1:
        raise ValueError(f'total carrier number must be at least 1, not {n_total}')
    return np.array(_count('m3', n_total, DistinctnessRule(rule)), dtype=np.int64)


def count_intermod(n_total: int, k: int, rule: DistinctnessRule = DistinctnessRule.Strict,
                   counting: TupleCounting = TupleCounting.Ordered) -> IntermodCounts:
    if not 1 <= k <= n_total:
        raise ValueError(f'subcarrier index k={k} is outside [1, {n_total}]')
    arrays = count_arrays(n_total, rule, counting)
    return IntermodCounts(*(int(arrays[name][k - 1]) for name in COUNTERS), n_total=n_total, k=k)


def count_table(n_total: int, rule: DistinctnessRule = DistinctnessRule.Strict,
                counting: TupleCounting = TupleCounting.Ordered) -> List[IntermodCounts]:
    arrays = count_arrays(n_total, rule, counting)
    LOG.debug('Intermod table for N=%d (%s, %s)', n_total, DistinctnessRule(rule).value, TupleCounting(counting).value)
    return [
        IntermodCounts(*(int(arrays[name][k - 1]) for name in COUNTERS), n_total=n_total, k=k)
        for k in range(1, n_total + 1)
    ]


def enumerate_table(n_total: int, rule: DistinctnessRule = DistinctnessRule.Strict,
                    counting: TupleCounting = TupleCounting.Ordered) -> Dict[str, np.ndarray]:
    """Brute-force counters by exhaustive enumeration of all index tuples."""
    rule = DistinctnessRule(rule)
    idx = np.arange(1, n_total + 1)
    exclude_k_pairs = rule == DistinctnessRule.ExcludeK
    exclude_k_triples = rule in (DistinctnessRule.Strict, DistinctnessRule.ExcludeK)

    def tally(values, keep, fixed):
        # a tuple lands on k = values; fixed indices must then differ from it
        mask = keep & (values >= 1) & (values <= n_total)
        for v in fixed:
            mask &= v != values
        return np.bincount(values[mask] - 1, minlength=n_total).astype(np.int64)

    out = {}
    m, n = np.meshgrid(idx, idx, indexing='ij')
    for name, values in (('m1', 2 * m + n), ('m2', 2 * m - n), ('m3', n - 2 * m)):
        out[name] = tally(values, m != n, (m, n) if exclude_k_pairs else ())

    m, n, l = np.meshgrid(idx, idx, idx, indexing='ij')
    distinct = (m != n) & (m != l) & (n != l)
    for name, values in (('w1', m + n + l), ('w2', m + n - l), ('w3', m - n - l)):
        out[name] = tally(values, distinct, (m, n, l) if exclude_k_triples else ())

    if TupleCounting(counting) == TupleCounting.Unordered:
        out = {name: counts // ORDERINGS[name] for name, counts in out.items()}
    return out
