"""Zero-sum invariants of finite abelian groups, by exact search.

Each constant is 1 + the maximum length of a sequence avoiding the
defining property, found by DFS over non-decreasing multisets with an
incremental pruning state.  Closed-form values for the covered families
(rank at most two, and rank three of the form C_2 + C_2m + C_2mn) are
available through formula_oracle for cross-validation; every search
result re-verifies its own witness through the engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import (
    has_nonempty_zero_sum,
    has_short_zero_sum,
    has_zero_sum_of_length,
    lifts_disjoint_count,
    max_disjoint_zero_sums,
)
from .errors import InvalidInputError
from .groups import Group
from .search import (
    Budget,
    DavenportState,
    SearchStats,
    dfs_run,
    exact_length_state,
    short_zero_sum_state,
)
from .sequences import Sequence

KIND_D = "d"
KIND_DK = "dk"
KIND_ETA = "eta"
KIND_S = "s"
KINDS = (KIND_D, KIND_DK, KIND_ETA, KIND_S)


# ---------------------------------------------------------------------------
# Closed-form values

def property_d_known(m: int) -> bool:
    """True when m is known to have Property D (all prime factors in 2,3,5,7)."""
    if m < 1:
        return False
    for p in (2, 3, 5, 7):
        while m % p == 0:
            m //= p
    return m == 1


def _rank_two_params(group: Group):
    """(m, n) with group = C_m + C_mn, or None above rank two."""
    f = group.invariant_factors
    if len(f) == 0:
        return 1, 1
    if len(f) == 1:
        return 1, f[0]
    if len(f) == 2:
        return f[0], f[1] // f[0]
    return None


def _rank_three_params(group: Group):
    """(m, n) with group = C_2 + C_2m + C_2mn, or None."""
    f = group.invariant_factors
    if len(f) == 3 and f[0] == 2:
        return f[1] // 2, f[2] // f[1]
    return None


def formula_oracle(group: Group, kind: str, k: int | None = None):
    """Exact value for a covered family, else None.

    For kind "s" on the rank-three family with n >= 2 the value is only
    emitted when m is known to have Property D.
    """
    if kind == KIND_DK and (k is None or k < 1):
        raise InvalidInputError("kind 'dk' needs k >= 1")
    two = _rank_two_params(group)
    if two is not None:
        m, n = two
        if kind == KIND_D:
            return m + m * n - 1
        if kind == KIND_DK:
            return m + k * m * n - 1
        if kind == KIND_ETA:
            return 2 * m + m * n - 2
        if kind == KIND_S:
            return 2 * m + 2 * m * n - 3
        if kind == "d0":
            return m - 1
        if kind == "kd":
            return 1
        raise InvalidInputError(f"unknown kind {kind!r}")
    three = _rank_three_params(group)
    if three is not None:
        m, n = three
        if kind == KIND_D:
            return 2 * m + 2 * m * n
        if kind == KIND_DK:
            if n >= 2:
                return 2 * m + k * 2 * m * n
            if k == 1:
                return 4 * m
            return (2 * m + 1) + k * 2 * m
        if kind == KIND_ETA:
            return 6 * m + 2 if n == 1 else 4 * m + 2 * m * n
        if kind == KIND_S:
            if n == 1:
                return 8 * m + 1
            return 4 * m + 4 * m * n - 1 if property_d_known(m) else None
        if kind == "d0":
            return 2 * m if n >= 2 else 2 * m + 1
        if kind == "kd":
            return 1 if n >= 2 else 2
        raise InvalidInputError(f"unknown kind {kind!r}")
    if kind not in KINDS and kind not in ("d0", "kd"):
        raise InvalidInputError(f"unknown kind {kind!r}")
    return None


# ---------------------------------------------------------------------------
# Search results

@dataclass
class InvariantResult:
    group: Group
    kind: str
    value: int
    method: str                      # "search" | "formula"
    k: int | None = None
    witness: Sequence | None = None
    stats: SearchStats = field(default_factory=SearchStats)
    status: str = "complete"         # "complete" | "partial"
    checkpoint: dict | None = None

    def to_json(self):
        return {
            "group": list(self.group.invariant_factors),
            "kind": self.kind,
            "k": self.k,
            "value": self.value,
            "method": self.method,
            "status": self.status,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "stats": self.stats.to_json(),
        }


class _DkState:
    """Prefixes with fewer than k disjoint zero-sum subsequences.

    The count can only grow by one per appended element, and only when the
    new element closes some zero-sum, i.e. -g is already a subsum; the
    running subsum bitmask gates the exact lift test.  Decisions are
    memoized across the whole search.
    """

    __slots__ = ("group", "k", "mult", "counts", "sums", "memo")

    def __init__(self, group: Group, k: int):
        self.group = group
        self.k = k
        self.mult = [0] * group.order
        self.counts = [0]
        self.sums = [0]
        self.memo = {}

    def try_push(self, g: int) -> bool:
        count = self.counts[-1]
        sums = self.sums[-1]
        group = self.group
        if g == 0 or (sums >> group.neg_table()[g]) & 1:
            self.mult[g] += 1
            lifted = lifts_disjoint_count(group, self.mult, g, count + 1,
                                          memo=self.memo)
            if lifted:
                if count + 1 >= self.k:
                    self.mult[g] -= 1
                    return False
                count += 1
        else:
            self.mult[g] += 1
        row = group.add_row(g)
        shifted = 0
        m = sums
        while m:
            low = m & -m
            shifted |= 1 << row[low.bit_length() - 1]
            m ^= low
        self.sums.append(sums | shifted | (1 << g))
        self.counts.append(count)
        return True

    def pop(self, g: int):
        self.mult[g] -= 1
        self.counts.pop()
        self.sums.pop()

    def slack(self):
        return None


def _search(group, kind, state, budget, orbit_pruning, anchor_zero,
            resume, restrict_prefix, k=None, verify=None) -> InvariantResult:
    out = dfs_run(group, state, budget=budget, orbit_pruning=orbit_pruning,
                  anchor_zero=anchor_zero, resume=resume,
                  restrict_prefix=restrict_prefix)
    witness = Sequence.from_indices(group, out.witness) if out.witness is not None else None
    if witness is not None and verify is not None:
        # a valid witness must fail the defining property at length best
        if len(witness) != out.best or verify(witness):
            raise InvalidInputError(
                f"search witness fails re-verification for {kind} over {group.label()}")
    return InvariantResult(group, kind, out.best + 1, "search", k=k,
                           witness=witness, stats=out.stats,
                           status=out.status, checkpoint=out.checkpoint)


def compute_davenport(group: Group, budget: Budget | None = None, *,
                      orbit_pruning=True, resume=None,
                      restrict_prefix=None) -> InvariantResult:
    """D(G): 1 + maximum length of a zero-sum-free sequence."""
    return _search(group, KIND_D, DavenportState(group), budget,
                   orbit_pruning, False, resume, restrict_prefix,
                   verify=has_nonempty_zero_sum)


def compute_eta(group: Group, budget: Budget | None = None, *,
                orbit_pruning=True, resume=None,
                restrict_prefix=None) -> InvariantResult:
    """eta(G): 1 + maximum length avoiding short zero-sum subsequences."""
    return _search(group, KIND_ETA, short_zero_sum_state(group), budget,
                   orbit_pruning, False, resume, restrict_prefix,
                   verify=has_short_zero_sum)


def compute_s(group: Group, budget: Budget | None = None, *,
              orbit_pruning=True, resume=None,
              restrict_prefix=None) -> InvariantResult:
    """s(G): 1 + maximum length avoiding zero-sums of length exp(G).

    The property is translation invariant, so the search anchors the
    smallest element at 0; every extremal translation class has such a
    representative.
    """
    exp = group.exponent
    return _search(group, KIND_S, exact_length_state(group, exp), budget,
                   orbit_pruning, True, resume, restrict_prefix,
                   verify=lambda w: has_zero_sum_of_length(w, exp))


def compute_dk(group: Group, k: int, budget: Budget | None = None, *,
               orbit_pruning=True, resume=None,
               restrict_prefix=None) -> InvariantResult:
    """D_k(G): 1 + maximum length without k disjoint zero-sum subsequences."""
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    return _search(group, KIND_DK, _DkState(group, k), budget,
                   orbit_pruning, False, resume, restrict_prefix, k=k,
                   verify=lambda w: max_disjoint_zero_sums(w, k) >= k)


def compute(group: Group, kind: str, k: int | None = None,
            budget: Budget | None = None, **kwargs) -> InvariantResult:
    if kind == KIND_D:
        return compute_davenport(group, budget, **kwargs)
    if kind == KIND_ETA:
        return compute_eta(group, budget, **kwargs)
    if kind == KIND_S:
        return compute_s(group, budget, **kwargs)
    if kind == KIND_DK:
        if k is None:
            raise InvalidInputError("kind 'dk' needs k")
        return compute_dk(group, k, budget, **kwargs)
    raise InvalidInputError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# Arithmetic tail of (D_k)

@dataclass
class TailReport:
    group: Group
    horizon: int
    dk_values: list
    d0: int | None
    kd: int | None
    status: str                       # "provisional" | "inconclusive" | "partial"

    def to_json(self):
        return {
            "group": list(self.group.invariant_factors),
            "horizon": self.horizon,
            "dk": self.dk_values,
            "d0": self.d0,
            "kd": self.kd,
            "status": self.status,
        }


def detect_arithmetic_tail(group: Group, k_max: int,
                           budget: Budget | None = None, *,
                           orbit_pruning=True) -> TailReport:
    """Least k_0 with D_k - k*exp(G) constant on [k_0, k_max], plus that
    constant.  Certified only up to the horizon, hence always provisional.
    """
    if k_max < 2:
        raise InvalidInputError("need k_max >= 2 to observe a tail")
    values = []
    for k in range(1, k_max + 1):
        res = compute_dk(group, k, budget, orbit_pruning=orbit_pruning)
        if res.status != "complete":
            return TailReport(group, k_max, values, None, None, "partial")
        values.append(res.value)
    exp = group.exponent
    offsets = [v - (i + 1) * exp for i, v in enumerate(values)]
    k0 = k_max
    while k0 > 1 and offsets[k0 - 2] == offsets[-1]:
        k0 -= 1
    if k0 > k_max - 2:
        # require the constant stretch to reach stabilization + 2
        return TailReport(group, k_max, values, None, None, "inconclusive")
    return TailReport(group, k_max, values, offsets[-1], k0, "provisional")


# ---------------------------------------------------------------------------
# Property D

@dataclass
class PropertyDReport:
    m: int
    holds: bool
    extremal_count: int
    counterexample: Sequence | None
    status: str = "complete"
    stats: SearchStats = field(default_factory=SearchStats)

    def to_json(self):
        return {
            "m": self.m,
            "holds": self.holds,
            "extremal_count": self.extremal_count,
            "counterexample": (self.counterexample.to_json()
                               if self.counterexample is not None else None),
            "status": self.status,
            "stats": self.stats.to_json(),
        }


def check_property_d(m: int, budget: Budget | None = None) -> PropertyDReport:
    """Scan every length-(4m-4) sequence over C_m^2 without a zero-sum of
    length m; Property D holds when each is a perfect (m-1)-th power,
    i.e. every multiplicity is divisible by m-1.
    """
    if m < 1:
        raise InvalidInputError("m must be >= 1")
    if m == 1:
        return PropertyDReport(1, True, 1, None)
    group = Group((m, m))
    target_len = 4 * m - 4
    found = {"count": 0, "bad": None}

    def emit(prefix):
        found["count"] += 1
        if found["bad"] is None:
            mult = [0] * group.order
            for i in prefix:
                mult[i] += 1
            if any(v % (m - 1) for v in mult):
                found["bad"] = Sequence.from_indices(group, prefix)

    out = dfs_run(group, exact_length_state(group, m), target_length=target_len,
                  emit=emit, budget=budget)
    status = "complete" if out.status == "complete" else "inconclusive"
    return PropertyDReport(m, found["bad"] is None, found["count"],
                           found["bad"], status, out.stats)
