"""Circular block designs with border plots.

A design stores only its inner plots.  Border plots are implied by
circularity: the left border of a block repeats its last inner plot and the
right border repeats its first.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np


class DesignParseError(ValueError):
    """Malformed design file; ``lineno`` is 1-based when known."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Design:
    t: int
    b: int
    k: int
    layout: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for name in ("t", "b", "k"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        layout = tuple(tuple(int(x) for x in row) for row in self.layout)
        object.__setattr__(self, "layout", layout)
        if len(layout) != self.b:
            raise ValueError(f"expected {self.b} blocks, got {len(layout)}")
        for i, row in enumerate(layout, 1):
            if len(row) != self.k:
                raise ValueError(f"block {i} has {len(row)} plots, expected {self.k}")
            for x in row:
                if not 1 <= x <= self.t:
                    raise ValueError(f"label {x} out of range 1..{self.t}")

    @classmethod
    def from_blocks(cls, blocks, t: int | None = None) -> "Design":
        blocks = [tuple(int(x) for x in row) for row in blocks]
        if not blocks:
            raise ValueError("a design needs at least one block")
        if t is None:
            t = max(max(row) for row in blocks)
        return cls(t=t, b=len(blocks), k=len(blocks[0]), layout=tuple(blocks))

    def plot(self, i: int, j: int) -> int:
        """Treatment on plot ``j`` of block ``i`` (both 0-based), borders included.

        ``j = -1`` and ``j = k`` address the border plots.
        """
        return self.layout[i][j % self.k]

    def with_borders(self) -> list[tuple[int, ...]]:
        return [(row[-1],) + row + (row[0],) for row in self.layout]

    def relabel(self, perm) -> "Design":
        """Apply ``perm`` (mapping label -> label, 1-based) to every plot."""
        return Design(self.t, self.b, self.k,
                      tuple(tuple(perm[x] for x in row) for row in self.layout))

    def permute_blocks(self, order) -> "Design":
        return Design(self.t, self.b, self.k, tuple(self.layout[i] for i in order))


_HEADER = re.compile(r"^\s*t\s*=\s*(\d+)\s+b\s*=\s*(\d+)\s+k\s*=\s*(\d+)\s*$")


def parse_design(text: str) -> Design:
    """Parse the text design format.

    Comment lines start with ``#``.  The first other line is
    ``t=<int> b=<int> k=<int>``, followed by ``b`` rows of ``k`` labels.
    A row may also carry explicit borders written as ``L | inner | R``;
    these must agree with circularity.
    """
    header = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            m = _HEADER.match(line)
            if not m:
                raise DesignParseError(f"expected header 't=<int> b=<int> k=<int>', got {line!r}", lineno)
            header = tuple(int(g) for g in m.groups())
            if min(header) < 1:
                raise DesignParseError("t, b and k must be positive", lineno)
            continue
        rows.append((lineno, _parse_row(line, lineno, header)))
    if header is None:
        raise DesignParseError("missing header line")
    t, b, k = header
    if len(rows) != b:
        where = rows[-1][0] if rows else None
        raise DesignParseError(f"header declares b={b} blocks but {len(rows)} rows follow", where)
    for lineno, row in rows:
        if len(row) != k:
            raise DesignParseError(f"row has {len(row)} labels, header declares k={k}", lineno)
        for x in row:
            if not 1 <= x <= t:
                raise DesignParseError(f"label {x} out of range 1..{t}", lineno)
    return Design(t, b, k, tuple(row for _, row in rows))


def _parse_row(line: str, lineno: int, header) -> tuple[int, ...]:
    parts = line.split("|")
    if len(parts) not in (1, 3):
        raise DesignParseError("border syntax is 'L | inner plots | R'", lineno)
    try:
        fields = [[int(tok) for tok in p.split()] for p in parts]
    except ValueError as exc:
        raise DesignParseError(f"non-integer label ({exc})", lineno) from None
    if len(parts) == 1:
        return tuple(fields[0])
    left, inner, right = fields
    if len(left) != 1 or len(right) != 1 or not inner:
        raise DesignParseError("each border holds exactly one label", lineno)
    if left[0] != inner[-1] or right[0] != inner[0]:
        raise DesignParseError("border plots contradict circularity", lineno)
    return tuple(inner)


def format_design(d: Design, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines += [f"# {c}" for c in comment.splitlines()]
    lines.append(f"t={d.t} b={d.b} k={d.k}")
    lines += [" ".join(str(x) for x in row) for row in d.layout]
    return "\n".join(lines) + "\n"


def load_design(path) -> Design:
    with open(path, encoding="utf-8") as fh:
        return parse_design(fh.read())


def fixture_text(name: str) -> str:
    return resources.files("nbdesign").joinpath("fixtures", name).read_text(encoding="utf-8")


def load_fixture(name: str) -> Design:
    """Load one of the bundled designs, e.g. ``"cnbd2_t5.design"``."""
    return parse_design(fixture_text(name))


@dataclass(frozen=True)
class IncidenceSet:
    T: np.ndarray
    L: np.ndarray
    R: np.ndarray
    B: np.ndarray


def incidence_matrices(d: Design) -> IncidenceSet:
    """Plot-by-factor 0/1 incidence matrices, plots ordered block by block."""
    n = d.b * d.k
    T = np.zeros((n, d.t), dtype=np.int64)
    L = np.zeros_like(T)
    R = np.zeros_like(T)
    B = np.zeros((n, d.b), dtype=np.int64)
    for i, row in enumerate(d.layout):
        for j, x in enumerate(row):
            r = i * d.k + j
            T[r, x - 1] = 1
            L[r, row[j - 1] - 1] = 1
            R[r, row[(j + 1) % d.k] - 1] = 1
            B[r, i] = 1
    for M in (T, L, R, B):
        M.setflags(write=False)
    return IncidenceSet(T, L, R, B)


def canonical_form(seq) -> tuple[int, ...]:
    """Relabel by order of first appearance (restricted growth string)."""
    seen: dict[int, int] = {}
    out = []
    for x in seq:
        if x not in seen:
            seen[x] = len(seen) + 1
        out.append(seen[x])
    return tuple(out)


@dataclass(frozen=True)
class BlockProfile:
    """Circular neighbour counts for one block.

    ``n[x]`` occurrences of treatment x, ``m[x]`` plots whose left neighbour
    is x and which carry x themselves, ``p[x]`` plots with x on both sides.
    """

    sequence: tuple[int, ...]
    n: dict[int, int]
    m: dict[int, int]
    p: dict[int, int]

    @property
    def k(self) -> int:
        return len(self.sequence)

    @property
    def canonical(self) -> tuple[int, ...]:
        return canonical_form(self.sequence)

    @property
    def sum_n2(self) -> int:
        return sum(v * v for v in self.n.values())

    @property
    def sum_m(self) -> int:
        return sum(self.m.values())

    @property
    def sum_p(self) -> int:
        return sum(self.p.values())


def block_profile(seq) -> BlockProfile:
    seq = tuple(int(x) for x in seq)
    k = len(seq)
    n = Counter(seq)
    m = Counter(seq[j] for j in range(k) if seq[j - 1] == seq[j])
    p = Counter(seq[j - 1] for j in range(k) if seq[j - 1] == seq[(j + 1) % k])
    return BlockProfile(seq, dict(n), dict(m), dict(p))


@dataclass(frozen=True)
class SequenceProfile:
    blocks: tuple[BlockProfile, ...]
    histogram: dict[tuple[int, ...], Fraction] = field(default_factory=dict)


def sequence_profile(d: Design) -> SequenceProfile:
    blocks = tuple(block_profile(row) for row in d.layout)
    counts = Counter(bp.canonical for bp in blocks)
    hist = {cls: Fraction(c, d.b) for cls, c in sorted(counts.items())}
    return SequenceProfile(blocks, hist)


@dataclass(frozen=True)
class ClassificationReport:
    is_binary: bool
    is_balanced_block: bool
    is_cnbd: bool
    is_cnbd2: bool
    no_self_neighbor_d1: bool
    no_self_neighbor_d2: bool
    ell: Fraction
    ell_integral: bool


def _pair_counts(d: Design, offset_a: int, offset_b: int) -> Counter:
    c: Counter = Counter()
    for i in range(d.b):
        for j in range(d.k):
            c[(d.plot(i, j + offset_a), d.plot(i, j + offset_b))] += 1
    return c


def _is_balanced_block(d: Design) -> bool:
    # binary, equireplicate, and constant pairwise concurrence
    if any(len(set(row)) != d.k for row in d.layout):
        return False
    reps = Counter(x for row in d.layout for x in row)
    if len({reps[x] for x in range(1, d.t + 1)}) != 1:
        return False
    if d.t == 1:
        return True
    conc = Counter()
    for row in d.layout:
        s = sorted(row)
        for a in range(len(s)):
            for b_ in range(a + 1, len(s)):
                conc[(s[a], s[b_])] += 1
    vals = {conc[(x, y)] for x in range(1, d.t + 1) for y in range(x + 1, d.t + 1)}
    return len(vals) == 1


def _all_ordered_pairs_exactly(counts: Counter, t: int, ell: Fraction) -> bool:
    if ell.denominator != 1:
        return False
    return all(counts[(x, y)] == ell
               for x in range(1, t + 1) for y in range(1, t + 1) if x != y)


def classify(d: Design) -> ClassificationReport:
    """Check binarity, block balance, and neighbour balance at distances 1 and 2."""
    ell = Fraction(d.b * d.k, d.t * (d.t - 1)) if d.t > 1 else Fraction(0)
    ell_integral = d.t > 1 and ell.denominator == 1
    binary = all(len(set(row)) == d.k for row in d.layout)
    balanced = _is_balanced_block(d)
    right = _pair_counts(d, 0, 1)
    outer = _pair_counts(d, -1, 1)
    no_self1 = all(right[(x, x)] == 0 for x in range(1, d.t + 1))
    no_self2 = all(outer[(x, x)] == 0 for x in range(1, d.t + 1))
    cnbd = binary and balanced and d.t > 1 and _all_ordered_pairs_exactly(right, d.t, ell)
    cnbd2 = cnbd and _all_ordered_pairs_exactly(outer, d.t, ell)
    return ClassificationReport(binary, balanced, cnbd, cnbd2, no_self1, no_self2, ell, ell_integral)
