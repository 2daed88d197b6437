"""Shared brute-force oracles, independent of the library's code paths."""

import itertools

import pytest

from zerosum import Sequence, make_group


def brute_subsums(seq):
    """Every (element, length) pair realizable as a subsum, by iterating
    all sub-multiplicity vectors."""
    group = seq.group
    out = {e: set() for e in range(group.order)}
    ranges = [range(v + 1) for v in seq.mult]
    for combo in itertools.product(*ranges):
        total = 0
        length = 0
        for i, c in enumerate(combo):
            if c:
                total = group.add_index(total, group.scale_index(c, i))
                length += c
        out[total].add(length)
    return out


def brute_minimal_zero_sums(seq):
    """All minimal zero-sum sub-multisets as multiplicity tuples."""
    group = seq.group
    result = set()
    for combo in itertools.product(*(range(v + 1) for v in seq.mult)):
        length = sum(combo)
        if length == 0:
            continue
        total = 0
        for i, c in enumerate(combo):
            if c:
                total = group.add_index(total, group.scale_index(c, i))
        if total:
            continue
        minimal = True
        for sub in itertools.product(*(range(c + 1) for c in combo)):
            sub_len = sum(sub)
            if sub_len in (0, length):
                continue
            t = 0
            for i, c in enumerate(sub):
                if c:
                    t = group.add_index(t, group.scale_index(c, i))
            if t == 0:
                minimal = False
                break
        if minimal:
            result.add(combo)
    return result


def brute_max_disjoint(seq, cap=12):
    """Exact disjoint zero-sum count by unpruned recursion over minimal
    zero-sum removals."""
    from zerosum.engine import _iter_minimal_zero_sums

    group = seq.group

    def rec(mult):
        best = 0
        for part in _iter_minimal_zero_sums(group, mult):
            nxt = list(mult)
            for i in part:
                nxt[i] -= 1
            best = max(best, 1 + rec(nxt))
            if best >= cap:
                return best
        return best

    return min(cap, rec(list(seq.mult)))


def random_sequence(rng, group, max_len):
    length = rng.randrange(0, max_len + 1)
    return Sequence.from_indices(
        group, [rng.randrange(group.order) for _ in range(length)])


@pytest.fixture(scope="session")
def small_groups():
    return [make_group(f) for f in
            ([2], [3], [4], [5], [6], [8], [9], [2, 2], [2, 4], [3, 3],
             [2, 6], [2, 2, 2], [12], [16])]
