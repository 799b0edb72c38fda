"""Optimal block sequences for continuous designs.

A block contributes ``c(s)`` (model ``M1``) or ``c~(s)`` (model ``M2``) to
the trace bound, where ``s`` is the block's sequence up to relabelling of
treatments.  The best sequences keep every treatment in one contiguous run
and balance the run lengths; :func:`f_value` and :func:`f_tilde_value` give
the resulting objective in closed form and :func:`brute_force_best` checks
them by enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .designs import canonical_form
from .information import DomainError, EffectModel, c_from_counts

BRUTE_FORCE_MAX_K = 12


def f_value(k: int, v: int) -> Fraction:
    """Best ``c(s)`` over sequences with exactly ``v`` distinct treatments (``2 <= v``)."""
    if k < 3 or not 1 <= v <= k:
        raise DomainError(f"f(v) needs k >= 3 and 1 <= v <= k (got k={k}, v={v})")
    q = k // v
    return -1 + k - Fraction(v, 2) - (2 - Fraction(v, k)) * q + Fraction(v, k) * q * q


def f_tilde_value(k: int, v1: int, v2: int) -> Fraction:
    """Two-sided analogue of :func:`f_value`.

    ``v1`` treatments occur once and ``v2`` occur at least twice.  The
    all-distinct block ``(v1, v2) = (k, 0)`` is evaluated as ``(k-3)/3``.
    """
    if k < 4:
        raise DomainError(f"f~ needs k >= 4 (got k={k})")
    if v2 == 0:
        if v1 != k:
            raise DomainError("v2 = 0 is only valid for the all-distinct block v1 = k")
        return Fraction(k - 3, 3)
    if v1 < 0 or v2 < 1 or v1 + 2 * v2 > k:
        raise DomainError(f"(v1, v2) = ({v1}, {v2}) is not attainable for k={k}")
    q = (k - v1) // v2
    return (-1 + k - Fraction(2 * v1, 3) - Fraction(8 * v2, 9)
            - (2 - Fraction(2 * v1, k) - Fraction(v2, k)) * q + Fraction(v2, k) * q * q)


@dataclass(frozen=True)
class Composition:
    """Occurrence counts of one optimal sequence, ascending."""

    model: EffectModel
    k: int
    counts: tuple[int, ...]
    value: Fraction

    @property
    def v(self) -> int:
        return len(self.counts)

    # one-sided description
    @property
    def n_minus(self) -> int:
        return self.k // self.v

    @property
    def n_plus(self) -> int:
        return self.n_minus + 1

    @property
    def v_plus(self) -> int:
        return self.k - self.v * self.n_minus

    @property
    def v_minus(self) -> int:
        return self.v - self.v_plus

    # two-sided description
    @property
    def v1(self) -> int:
        return sum(1 for c in self.counts if c == 1)

    @property
    def v2(self) -> int:
        return sum(1 for c in self.counts if c >= 2)

    @property
    def runs(self) -> tuple[int, ...]:
        return tuple(c for c in self.counts if c >= 2)


@dataclass(frozen=True)
class OptimalComposition:
    model: EffectModel
    k: int
    t: int
    value: Fraction
    compositions: tuple[Composition, ...]
    sqrt_bound: float | None  # k - sqrt(2k), one-sided model only

    @property
    def maximizers(self) -> tuple[int, ...]:
        return tuple(c.v for c in self.compositions)


def _balanced_counts(total: int, parts: int) -> list[int]:
    q, r = divmod(total, parts)
    return [q] * (parts - r) + [q + 1] * r


def _m2_domain(k: int, t: int):
    for v2 in range(1, k // 2 + 1):
        for v1 in range(0, k - 2 * v2 + 1):
            if v1 + v2 <= t:
                yield v1, v2
    if t >= k:
        yield k, 0


def optimal_composition(k: int, t: int, m) -> OptimalComposition:
    """All optimal occurrence patterns for blocks of length ``k`` over ``t`` treatments.

    Under ``M1`` the number of distinct treatments ``v`` ranges over
    ``2..min(t, k)``; ties are all returned.  Under ``M2`` the search runs
    over ``(v1, v2)`` with ``v1 + 2 v2 <= k`` and ``v1 + v2 <= t``, plus the
    all-distinct block when ``t >= k``.
    """
    m = EffectModel.parse(m)
    if t < 2:
        raise DomainError("optimal sequences need t >= 2")
    if m is EffectModel.M1:
        if k < 3:
            raise DomainError(f"M1 sequences need k >= 3 (got k={k})")
        scored = [(f_value(k, v), tuple(_balanced_counts(k, v)))
                  for v in range(2, min(t, k) + 1)]
        bound = k - math.sqrt(2 * k)
    else:
        if k < 4:
            raise DomainError(f"M2 sequences need k >= 4 (got k={k})")
        scored = []
        for v1, v2 in _m2_domain(k, t):
            counts = (1,) * v1 + tuple(_balanced_counts(k - v1, v2)) if v2 else (1,) * k
            scored.append((f_tilde_value(k, v1, v2), counts))
        bound = None
    best = max(val for val, _ in scored)
    comps = sorted({counts for val, counts in scored if val == best}, key=lambda c: (len(c), c))
    return OptimalComposition(m, k, t, best,
                              tuple(Composition(m, k, c, best) for c in comps), bound)


def representative_sequence(comp) -> tuple[int, ...]:
    """One sequence realising ``comp``: contiguous runs, shorter runs first.

    Accepts a :class:`Composition` or an :class:`OptimalComposition` (its
    first composition is used).
    """
    if isinstance(comp, OptimalComposition):
        comp = comp.compositions[0]
    seq: list[int] = []
    for label, count in enumerate(comp.counts, 1):
        seq += [label] * count
    return tuple(seq)


def upper_bound_trace(b: int, k: int, t: int, m) -> Fraction:
    """``b`` times the best per-block value: no design of this size has a larger trace."""
    return b * optimal_composition(k, t, m).value


def brute_force_best(k: int, t: int, m):
    """Enumerate every block sequence up to relabelling and return the best value.

    Returns ``(value, classes)`` with ``classes`` the sorted restricted growth
    strings attaining it.  Counts are accumulated along the enumeration tree
    and closed circularly at the leaves.
    """
    m = EffectModel.parse(m)
    if k > BRUTE_FORCE_MAX_K:
        raise DomainError(f"enumeration budget exceeded: k={k} > {BRUTE_FORCE_MAX_K}")
    if k < 1 or t < 1:
        raise DomainError("k and t must be positive")
    # leaves are ranked by an integer multiple of the block value; the
    # winning counts are converted back through c_from_counts
    if m is EffectModel.M1:
        def key(n2, sm, sp):
            return k * k - 2 * n2 + k * sm
    else:
        def key(n2, sm, sp):
            return 3 * k * k - 9 * n2 + 4 * k * sm + 2 * k * sp
    best_key = None
    best_counts = None
    arg: list[tuple[int, ...]] = []
    seq = [0] * k
    counts = [0] * (t + 2)

    def leaf(sum_n2, sum_m, sum_p):
        nonlocal best_key, best_counts, arg
        if k < 3:
            sum_m = sum(1 for j in range(k) if seq[j - 1] == seq[j])
            sum_p = sum(1 for j in range(k) if seq[j - 1] == seq[(j + 1) % k])
        else:
            sum_m += seq[-1] == seq[0]
            sum_p += (seq[-2] == seq[0]) + (seq[-1] == seq[1])
        kv = key(sum_n2, sum_m, sum_p)
        if best_key is None or kv > best_key:
            best_key, best_counts, arg = kv, (sum_n2, sum_m, sum_p), [tuple(seq)]
        elif kv == best_key:
            arg.append(tuple(seq))

    def rec(j, used, sum_n2, sum_m, sum_p):
        if j == k:
            leaf(sum_n2, sum_m, sum_p)
            return
        for x in range(1, min(used + 1, t) + 1):
            seq[j] = x
            c = counts[x]
            counts[x] = c + 1
            dm = 1 if j >= 1 and seq[j - 1] == x else 0
            dp = 1 if j >= 2 and seq[j - 2] == x else 0
            rec(j + 1, max(used, x), sum_n2 + 2 * c + 1, sum_m + dm, sum_p + dp)
            counts[x] = c

    rec(0, 0, 0, 0, 0)
    return c_from_counts(k, *best_counts, m), sorted(arg)


def dihedral_classes(sequences) -> list[tuple[int, ...]]:
    """Collapse sequences that agree up to rotation, reflection and relabelling.

    Each class is represented by its smallest restricted growth string.
    """
    reps = set()
    for s in sequences:
        s = tuple(s)
        k = len(s)
        variants = []
        for r in range(k):
            rot = s[r:] + s[:r]
            variants += [canonical_form(rot), canonical_form(rot[::-1])]
        reps.add(min(variants))
    return sorted(reps)
