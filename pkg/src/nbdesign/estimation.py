"""Simulation and least-squares estimation of total-effect contrasts.

Used to check the information matrices empirically: the variance of the
best linear unbiased estimator of ``h' phi`` is ``sigma^2 h' C^+ h``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import matrixkit as mk
from .designs import Design, incidence_matrices
from .information import DomainError, EffectModel, info_total_exact


@dataclass(frozen=True)
class ModelParams:
    beta: np.ndarray
    tau: np.ndarray
    lam: np.ndarray
    rho: np.ndarray | None = None
    sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        t = len(self.tau)
        if len(self.lam) != t or (self.rho is not None and len(self.rho) != t):
            raise ValueError("effect vectors must all have length t")

    @classmethod
    def zeros(cls, d: Design, m, sigma: float = 1.0, seed: int = 0) -> "ModelParams":
        m = EffectModel.parse(m)
        rho = np.zeros(d.t) if m is EffectModel.M2 else None
        return cls(np.zeros(d.b), np.zeros(d.t), np.zeros(d.t), rho, sigma, seed)

    def theta(self, m: EffectModel) -> np.ndarray:
        parts = [self.beta, self.tau, self.lam]
        if m is EffectModel.M2:
            if self.rho is None:
                raise ValueError("model M2 needs right-neighbour effects rho")
            parts.append(self.rho)
        return np.concatenate([np.asarray(p, dtype=float) for p in parts])


@dataclass(frozen=True)
class ContrastEstimate:
    h: np.ndarray
    estimate: float
    theoretical_variance: float
    estimable: bool


def model_matrix(d: Design, m) -> np.ndarray:
    """Full design matrix ``[B | T | L]`` (``M1``) or ``[B | T | L | R]`` (``M2``)."""
    m = EffectModel.parse(m)
    inc = incidence_matrices(d)
    parts = [inc.B, inc.T, inc.L] + ([inc.R] if m is EffectModel.M2 else [])
    return np.hstack(parts).astype(float)


def simulate_responses(d: Design, m, params: ModelParams, rng=None) -> np.ndarray:
    m = EffectModel.parse(m)
    X = model_matrix(d, m)
    theta = params.theta(m)
    if len(params.beta) != d.b or len(params.tau) != d.t:
        raise ValueError("parameter lengths do not match the design")
    rng = np.random.default_rng(params.seed) if rng is None else rng
    return X @ theta + params.sigma * rng.standard_normal(X.shape[0])


def _contrast_vector(h, t: int) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.shape != (t,):
        raise ValueError(f"contrast must have length t={t}")
    if abs(h.sum()) > 1e-12 * max(1.0, np.abs(h).max()):
        raise ValueError("h is not a contrast: its entries must sum to zero")
    return h


def _exact_variance_factor(d: Design, m: EffectModel, h: np.ndarray):
    """``(estimable, h' C^+ h)`` from the exact total-effect information."""
    C = info_total_exact(d, m).matrix
    hq = [Fraction(x).limit_denominator(10**9) for x in h]
    # h already passed the float sum test; centre exactly so rounding cannot leave span(1)
    mean = sum(hq) / len(hq)
    hq = mk.as_exact(np.array([x - mean for x in hq], dtype=object))
    estimable = bool(np.all(mk.projector(C) @ hq == hq)) if np.any(C != 0) else not np.any(hq != 0)
    if not estimable:
        return False, np.inf
    return True, float(hq @ mk.pinv_sym(C) @ hq)


def _estimator_weights(d: Design, m: EffectModel, h: np.ndarray) -> np.ndarray:
    # coefficient vector of h'(tau + lambda [+ rho]) on theta
    X = model_matrix(d, m)
    c = np.concatenate([np.zeros(d.b)] + [h] * m.n_factors)
    return np.linalg.pinv(X).T @ c


def estimate_contrast(d: Design, m, Y, h, sigma: float = 1.0) -> ContrastEstimate:
    """Least-squares estimate of the total-effect contrast ``h' phi``.

    Only the contrast is identified; the split of effects between direct and
    neighbour parameters is not.  Non-estimable contrasts return ``nan``.
    """
    m = EffectModel.parse(m)
    h = _contrast_vector(h, d.t)
    estimable, factor = _exact_variance_factor(d, m, h)
    if not estimable:
        return ContrastEstimate(h, float("nan"), float("inf"), False)
    w = _estimator_weights(d, m, h)
    return ContrastEstimate(h, float(w @ np.asarray(Y, dtype=float)), sigma**2 * factor, True)


@dataclass(frozen=True)
class MonteCarloResult:
    empirical_variance: float
    theoretical_variance: float
    ratio: float
    replicates: int


def monte_carlo_check(d: Design, m, h, sigma: float = 1.0, n: int = 20000,
                      seed: int = 0, params: ModelParams | None = None) -> MonteCarloResult:
    """Compare the empirical variance of the contrast estimator with ``sigma^2 h'C^+h``."""
    m = EffectModel.parse(m)
    if n < 1000:
        raise ValueError("use at least 1000 replicates")
    h = _contrast_vector(h, d.t)
    estimable, factor = _exact_variance_factor(d, m, h)
    if not estimable:
        raise DomainError("contrast is not estimable in this design")
    params = params or ModelParams.zeros(d, m, sigma, seed)
    X = model_matrix(d, m)
    mean = X @ params.theta(m)
    w = _estimator_weights(d, m, h)
    rng = np.random.default_rng(seed)
    Y = mean + sigma * rng.standard_normal((n, X.shape[0]))
    est = Y @ w
    emp = float(np.var(est, ddof=1)) if sigma > 0 else 0.0
    theo = sigma**2 * factor
    ratio = emp / theo if theo > 0 else 0.0
    return MonteCarloResult(emp, theo, ratio, n)
