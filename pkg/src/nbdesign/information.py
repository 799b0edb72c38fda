"""Information matrices for total effects under neighbour models.

Model ``M1`` has a left-neighbour effect only, so the total effect is
``phi = tau + lambda``.  Model ``M2`` adds a right-neighbour effect and the
total effect is ``psi = tau + lambda + rho``.  All matrices here are exact
(object arrays of Fractions); see :mod:`nbdesign.matrixkit`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import matrixkit as mk
from .designs import BlockProfile, Design, incidence_matrices


class DomainError(ValueError):
    """Arguments outside the range where a closed form or search applies."""


class EffectModel(enum.Enum):
    M1 = "m1"
    M2 = "m2"

    @property
    def n_factors(self) -> int:
        """Number of treatment-indexed factors (direct plus neighbour)."""
        return 2 if self is EffectModel.M1 else 3

    @classmethod
    def parse(cls, value) -> "EffectModel":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())

    def k_matrix(self, t: int) -> np.ndarray:
        """``K`` with ``K' alpha`` the total effect: stacked identities."""
        return mk.as_exact(np.vstack([np.eye(t, dtype=int)] * self.n_factors))


@dataclass(frozen=True)
class InfoMatrix:
    matrix: np.ndarray
    kind: str  # "joint" | "total-exact" | "total-upper"
    model: EffectModel
    t: int

    @property
    def trace(self) -> Fraction:
        return sum(np.diagonal(self.matrix), Fraction(0))

    def block(self, i: int, j: int) -> np.ndarray:
        """``t x t`` sub-block (i, j) of a joint matrix; 0=direct, 1=left, 2=right."""
        t = self.t
        return self.matrix[i * t:(i + 1) * t, j * t:(j + 1) * t]

    def float(self) -> np.ndarray:
        return mk.as_float(self.matrix)


def _effect_columns(d: Design, m: EffectModel) -> np.ndarray:
    inc = incidence_matrices(d)
    parts = [inc.T, inc.L] if m is EffectModel.M1 else [inc.T, inc.L, inc.R]
    return np.hstack(parts)


def _within_block_gram(A: np.ndarray, d: Design) -> np.ndarray:
    """Exact ``A' pr_perp(B) A`` for integer ``A``.

    ``pr(B)`` averages within blocks, so this is ``A'A - S'S / k`` with ``S``
    the per-block column sums of ``A``.
    """
    S = A.reshape(d.b, d.k, -1).sum(axis=1)
    num = d.k * (A.T @ A) - S.T @ S
    return mk.as_exact(num) * Fraction(1, d.k)


def info_joint(d: Design, m) -> InfoMatrix:
    """Information ``(T|L)' pr_perp(B) (T|L)`` (``M1``), or with ``R`` appended (``M2``)."""
    m = EffectModel.parse(m)
    return InfoMatrix(_within_block_gram(_effect_columns(d, m), d), "joint", m, d.t)


def _total_from_joint(C: np.ndarray, m: EffectModel, t: int, reduce: bool) -> np.ndarray:
    K = m.k_matrix(t)
    c = m.n_factors
    P = K @ K.T * Fraction(1, c)
    KtC = K.T @ C * Fraction(1, c)
    if not reduce:
        return KtC @ K * Fraction(1, c)
    M = mk.identity(c * t) - P
    # remove the part of the effect space orthogonal to K before reducing
    CM = C @ M
    adj = KtC @ M @ mk.ginv_psd(M @ C @ M) @ CM.T @ K * Fraction(1, c)
    return KtC @ K * Fraction(1, c) - adj


def info_total_exact(d: Design, m) -> InfoMatrix:
    """Exact information matrix for the total effects.

    The nuisance space is spanned by the blocks and by ``A M`` where ``M``
    projects onto the complement of ``range(K)``; reducing the joint
    information ``C[alpha]`` over that complement gives
    ``K'C K/c^2 - K'C M (M C M)^- M C K / c^2`` with ``c = K'K`` scale.
    """
    m = EffectModel.parse(m)
    if d.k < 2:
        raise DomainError("exact total-effect information needs k >= 2")
    C = info_joint(d, m).matrix
    return InfoMatrix(_total_from_joint(C, m, d.t, reduce=True), "total-exact", m, d.t)


def _block_upper(T, L, R, k: int, m: EffectModel) -> np.ndarray:
    TQT = k * (T.T @ T) - np.outer(T.sum(0), T.sum(0))
    TT = T.T @ T
    TL = T.T @ L
    if m is EffectModel.M1:
        # 1/4 {4 T'Q T + T'L + L'T - 2 T'T}, kept over the common denominator 4k
        num = 4 * TQT + k * (TL + TL.T - 2 * TT)
        return mk.as_exact(num) * Fraction(1, 4 * k)
    LR = L.T @ R
    num = 9 * TQT + k * (2 * (TL + TL.T) + LR + LR.T - 6 * TT)
    return mk.as_exact(num) * Fraction(1, 9 * k)


def info_total_upper(d: Design, m, per_block: bool = False):
    """Upper bound for the total-effect information, whole design or per block.

    For ``M1`` this is ``1/4 {4 T'pr_perp(B) T + T'L + L'T - 2 T'T}``; for
    ``M2`` ``1/9 {9 T'pr_perp(B) T + 2(T'L + L'T) + L'R + R'L - 6 T'T}``.
    ``pr_perp(B)`` is block-diagonal in ``Q_k``, so the whole-design bound is
    the sum of the per-block matrices.
    """
    m = EffectModel.parse(m)
    inc = incidence_matrices(d)
    k = d.k
    mats = []
    for u in range(d.b):
        sl = slice(u * k, (u + 1) * k)
        mats.append(_block_upper(inc.T[sl], inc.L[sl], inc.R[sl], k, m))
    if per_block:
        return [InfoMatrix(M, "total-upper", m, d.t) for M in mats]
    total = sum(mats[1:], mats[0].copy())
    return InfoMatrix(total, "total-upper", m, d.t)


def info_total_upper_from_joint(d: Design, m) -> InfoMatrix:
    """The same bound computed as ``(K'K)^+ K' C[alpha] K (K'K)^+``."""
    m = EffectModel.parse(m)
    C = info_joint(d, m).matrix
    return InfoMatrix(_total_from_joint(C, m, d.t, reduce=False), "total-upper", m, d.t)


def commutes_with_k(d: Design, m) -> bool:
    """Whether ``C[alpha]`` commutes with ``pr(K)``, the equality condition for the bound."""
    m = EffectModel.parse(m)
    C = info_joint(d, m).matrix
    K = m.k_matrix(d.t)
    P = K @ K.T * Fraction(1, m.n_factors)
    return bool(np.all(C @ P == P @ C))


def closed_form_cnbd(t: int, b: int, k: int, m) -> InfoMatrix:
    """Total-effect information of a neighbour-balanced design.

    ``b(k-2)/(2(t-1)) Q_t`` for a CNBD under ``M1`` (needs ``3 <= k <= t``)
    and ``b(k-3)/(3(t-1)) Q_t`` for a CNBD2 under ``M2`` (needs ``4 <= k <= t``).
    """
    m = EffectModel.parse(m)
    lo = 3 if m is EffectModel.M1 else 4
    if not lo <= k <= t:
        raise DomainError(f"closed form under {m.name} requires {lo} <= k <= t (got k={k}, t={t})")
    c = m.n_factors
    coef = Fraction(b * (k - c), c * (t - 1))
    return InfoMatrix(mk.q_matrix(t) * coef, "total-exact", m, t)


def c_from_counts(k: int, sum_n2: int, sum_m: int, sum_p: int, m) -> Fraction:
    """Per-block trace of the bound from the circular neighbour counts."""
    m = EffectModel.parse(m)
    if m is EffectModel.M1:
        return Fraction(1, 2) * (k - Fraction(2 * sum_n2, k) + sum_m)
    return Fraction(1, 9) * (3 * k - Fraction(9 * sum_n2, k) + 4 * sum_m + 2 * sum_p)


def c_values(block: BlockProfile, m) -> Fraction:
    if sum(block.n.values()) != block.k:
        raise DomainError("occurrence counts must sum to the block length")
    return c_from_counts(block.k, block.sum_n2, block.sum_m, block.sum_p, m)
