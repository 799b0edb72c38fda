"""Optimality verdicts, Phi_p criteria and efficiency factors."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

import numpy as np

from . import matrixkit as mk
from .designs import Design, classify
from .information import DomainError, EffectModel, InfoMatrix, info_total_exact
from .sequences import optimal_composition, representative_sequence, upper_bound_trace

MAX_SYMMETRIC_BLOCKS = 100_000

_ALIASES = {0: "D", 1: "A", math.inf: "E", -1: "trace-reciprocal"}


@dataclass(frozen=True)
class CriterionResult:
    p: float
    value: float
    singular: bool = False

    @property
    def alias(self) -> str | None:
        return _ALIASES.get(self.p)


def phi_p(C, p: float) -> CriterionResult:
    """Kiefer's ``Phi_p`` on the contrast space of a ``t x t`` information matrix.

    Uses the ``t - 1`` largest eigenvalues (``C`` annihilates the all-ones
    vector).  ``p = 0`` is the geometric-mean limit, ``p = inf`` gives
    ``1 / lambda_min``.  The mean is normalised by ``t - 1`` for every ``p``,
    so ``p = -1`` gives ``(t - 1) / tr(C)``.  Singular contrast information
    returns ``inf`` with ``singular`` set.
    """
    M = C.matrix if isinstance(C, InfoMatrix) else C
    ev = mk.eig_sym(M)
    t = len(ev)
    lam = np.sort(ev)[1:] if t > 1 else ev
    scale = max(np.max(np.abs(ev)), 0.0)
    if scale == 0.0 or lam.min() <= mk.RANK_CUTOFF * scale:
        return CriterionResult(p, math.inf, singular=True)
    inv = 1.0 / lam
    if p == 0:
        value = float(np.exp(np.mean(np.log(inv))))
    elif math.isinf(p):
        value = float(inv.max()) if p > 0 else float(inv.min())
    else:
        value = float(np.mean(inv ** p) ** (1.0 / p))
    return CriterionResult(p, value)


@dataclass(frozen=True)
class OptimalityVerdict:
    completely_symmetric: bool
    trace: Fraction
    trace_bound: Fraction
    bound_kind: str  # "no-self-neighbor" | "unrestricted"
    conclusive: bool
    bound_based: bool = False


def restricted_trace_bound(b: int, k: int, m) -> Fraction:
    """Largest trace among designs with no self neighbours, ``b(k-2)/2`` or ``b(k-3)/3``."""
    m = EffectModel.parse(m)
    c = m.n_factors
    return Fraction(b * (k - c), c)


def kiefer_verdict(d: Design, m, class_kind: str = "no-self-neighbor") -> OptimalityVerdict:
    """Universal-optimality check: complete symmetry plus maximal trace.

    ``class_kind`` selects the competing class: ``"no-self-neighbor"``
    (designs where no treatment neighbours itself; at distance 1 for ``M1``,
    at distances 1 and 2 for ``M2``) or ``"unrestricted"`` (all designs of
    the same size, bounded through the best block sequence).
    """
    m = EffectModel.parse(m)
    if class_kind not in ("no-self-neighbor", "unrestricted"):
        raise ValueError(f"unknown class {class_kind!r}")
    C = info_total_exact(d, m)
    sym, _, _ = mk.complete_symmetry(C.matrix)
    trace = C.trace
    if class_kind == "no-self-neighbor":
        rep = classify(d)
        if not rep.no_self_neighbor_d1 or (m is EffectModel.M2 and not rep.no_self_neighbor_d2):
            raise DomainError("design has self neighbours and is outside the restricted class")
        if d.k > d.t:
            raise DomainError("restricted-class bound needs k <= t")
        bound = restricted_trace_bound(d.b, d.k, m)
        bound_based = False
    else:
        bound = upper_bound_trace(d.b, d.k, d.t, m)
        bound_based = m is EffectModel.M2
    return OptimalityVerdict(sym, trace, bound, class_kind, bool(sym and trace == bound), bound_based)


def round2(x) -> Decimal:
    """Round a rational half away from zero to two decimals."""
    x = Fraction(x)
    q = Decimal(x.numerator) / Decimal(x.denominator)
    return q.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


@dataclass(frozen=True)
class Efficiency:
    exact: Fraction
    approximation: float | None  # large-k approximation, one-sided model

    @property
    def rounded(self) -> Decimal:
        return round2(self.exact)


def approx_efficiency(k: int) -> float:
    """Large-``k`` approximation ``(k - 2) / (2 (k - sqrt(2k)))``; tends to 1/2."""
    return (k - 2) / (2 * (k - math.sqrt(2 * k)))


def efficiency(d: Design, m) -> Efficiency:
    """Trace of the design's total-effect information over the best attainable trace."""
    m = EffectModel.parse(m)
    tr = info_total_exact(d, m).trace
    best = upper_bound_trace(d.b, d.k, d.t, m)
    approx = approx_efficiency(d.k) if m is EffectModel.M1 else None
    return Efficiency(tr / best, approx)


def cnbd_efficiency(k: int, m, t: int | None = None) -> Fraction:
    """Efficiency of any CNBD (``M1``) or CNBD2 (``M2``) with blocks of length ``k``.

    Per block the neighbour-balanced trace is ``(k-2)/2`` or ``(k-3)/3``;
    it is divided by the best per-block value for ``t`` treatments
    (default ``t = k``, where the best sequence is always realisable).
    """
    m = EffectModel.parse(m)
    t = k if t is None else t
    return restricted_trace_bound(1, k, m) / optimal_composition(k, t, m).value


def symmetric_design(k: int, t: int, m, composition_index: int = 0) -> Design:
    """All distinct relabellings of an optimal block sequence, one block each.

    The sequence is optimal over an unlimited supply of treatments, so ``t``
    must be at least its number of distinct treatments.  Such a design has
    completely symmetric information.  Under ``M1`` it is universally optimal
    among all designs of its size; under ``M2`` the construction is provided
    but its optimality is not established.
    """
    m = EffectModel.parse(m)
    oc = optimal_composition(k, k, m)
    comp = oc.compositions[composition_index]
    seq = representative_sequence(comp)
    v = comp.v
    if t < v:
        raise DomainError(f"t={t} < {v} distinct treatments in the optimal sequence")
    n_blocks = math.perm(t, v)
    if n_blocks > MAX_SYMMETRIC_BLOCKS:
        raise DomainError(f"{n_blocks} blocks exceeds the limit of {MAX_SYMMETRIC_BLOCKS}")
    blocks = []
    seen = set()
    for labels in itertools.permutations(range(1, t + 1), v):
        row = tuple(labels[x - 1] for x in seq)
        if row not in seen:
            seen.add(row)
            blocks.append(row)
    return Design(t, len(blocks), k, tuple(blocks))

