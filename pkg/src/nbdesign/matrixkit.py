"""Small dense symmetric linear algebra with an exact and a float path.

Exact matrices are numpy arrays of ``dtype=object`` holding
:class:`fractions.Fraction` entries; float matrices are ordinary ``float64``
arrays.  Every function dispatches on the dtype of its input, so rational
inputs stay rational end to end.

The matrices handled here are tiny (order at most a few dozen), so the exact
path uses plain Gauss-Jordan elimination.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

# eigenvalues with |lambda| <= RANK_CUTOFF * max|lambda| count as zero
RANK_CUTOFF = 1e-10
# relative tolerance for float complete-symmetry fits
SYMMETRY_RTOL = 1e-9


def is_exact(M) -> bool:
    return np.asarray(M).dtype == object


def as_exact(M) -> np.ndarray:
    """Convert an integer/Fraction array to an object array of Fractions."""
    A = np.asarray(M)
    if A.dtype.kind == "f":
        raise TypeError("refusing to convert a float array to exact form")
    out = np.empty(A.shape, dtype=object)
    for idx, x in np.ndenumerate(A):
        # numpy integers inside Fractions would overflow silently
        out[idx] = Fraction(int(x)) if isinstance(x, (int, np.integer)) else Fraction(x)
    return out


def as_float(M) -> np.ndarray:
    A = np.asarray(M)
    if A.dtype == object:
        return np.vectorize(float, otypes=[float])(A) if A.size else A.astype(float)
    return A.astype(float)


def identity(n: int, exact: bool = True) -> np.ndarray:
    return as_exact(np.eye(n, dtype=int)) if exact else np.eye(n)


def ones(n: int, exact: bool = True) -> np.ndarray:
    return as_exact(np.ones((n, n), dtype=int)) if exact else np.ones((n, n))


def q_matrix(n: int, exact: bool = True) -> np.ndarray:
    """Centering matrix ``I_n - J_n / n``."""
    if n < 1:
        raise ValueError("order must be positive")
    if exact:
        return identity(n) - ones(n) * Fraction(1, n)
    return np.eye(n) - np.ones((n, n)) / n


def _pivot_columns(M: np.ndarray) -> list[int]:
    """Pivot columns of the reduced row echelon form of an exact matrix."""
    A = M.copy()
    n_rows, n_cols = A.shape
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        nz = [i for i in range(r, n_rows) if A[i, c] != 0]
        if not nz:
            continue
        i = nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = A[r] / A[r, c]
        for i in range(n_rows):
            if i != r and A[i, c] != 0:
                A[i] = A[i] - A[i, c] * A[r]
        pivots.append(c)
        r += 1
    return pivots


def rank(M) -> int:
    if is_exact(M):
        return len(_pivot_columns(np.asarray(M)))
    ev = np.linalg.svd(as_float(M), compute_uv=False)
    if ev.size == 0 or ev[0] == 0:
        return 0
    return int(np.sum(ev > RANK_CUTOFF * ev[0]))


def inverse(M: np.ndarray) -> np.ndarray:
    """Exact inverse of a nonsingular rational matrix."""
    n = M.shape[0]
    A = np.concatenate([M, identity(n)], axis=1)
    for c in range(n):
        nz = [i for i in range(c, n) if A[i, c] != 0]
        if not nz:
            raise np.linalg.LinAlgError("matrix is singular")
        i = nz[0]
        if i != c:
            A[[c, i]] = A[[i, c]]
        A[c] = A[c] / A[c, c]
        for i in range(n):
            if i != c and A[i, c] != 0:
                A[i] = A[i] - A[i, c] * A[c]
    return A[:, n:]


def ginv_psd(G: np.ndarray) -> np.ndarray:
    """A generalized inverse of an exact symmetric PSD matrix.

    The principal submatrix on a maximal set of independent columns is
    nonsingular for a Gram matrix, so inverting it and padding with zeros
    gives ``G G^- G = G``.
    """
    n = G.shape[0]
    out = np.full((n, n), Fraction(0), dtype=object)
    piv = _pivot_columns(G)
    if piv:
        out[np.ix_(piv, piv)] = inverse(G[np.ix_(piv, piv)])
    return out


def projector(A) -> np.ndarray:
    """Orthogonal projector ``A (A'A)^+ A'`` onto the column span of ``A``.

    Any generalized inverse of ``A'A`` gives the same projector, which is
    what the exact path relies on.
    """
    A = np.asarray(A)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.size == 0:
        raise ValueError("projector of an empty matrix")
    if is_exact(A):
        return A @ ginv_psd(A.T @ A) @ A.T
    A = A.astype(float)
    return A @ pinv_sym(A.T @ A) @ A.T


def pinv_sym(M) -> np.ndarray:
    """Moore-Penrose inverse of a symmetric matrix."""
    M = np.asarray(M)
    if is_exact(M):
        n = M.shape[0]
        null = identity(n) - projector(M)
        return inverse(M + null) - null
    w, V = np.linalg.eigh(as_float(M))
    scale = np.max(np.abs(w)) if w.size else 0.0
    if scale == 0.0:
        return np.zeros_like(M, dtype=float)
    keep = np.abs(w) > RANK_CUTOFF * scale
    return (V[:, keep] / w[keep]) @ V[:, keep].T


def eig_sym(M) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, ascending, as floats."""
    return np.linalg.eigvalsh(as_float(M))


def is_symmetric(M) -> bool:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    if is_exact(M):
        return bool(np.all(M == M.T))
    scale = np.max(np.abs(M)) if M.size else 0.0
    return bool(np.max(np.abs(M - M.T), initial=0.0) <= 1e-12 * scale)


def complete_symmetry(M, tol: float = SYMMETRY_RTOL):
    """Test whether ``M = a I + b J`` and return ``(flag, a, b)``.

    ``b`` is the mean off-diagonal entry and ``a`` the mean diagonal entry
    minus ``b``.  Exact inputs are compared exactly; float inputs to
    ``tol`` relative to the largest entry.
    """
    M = np.asarray(M)
    n = M.shape[0]
    diag = np.diagonal(M)
    if n == 1:
        return True, diag[0], 0 * diag[0]
    off = M[~np.eye(n, dtype=bool)]
    b = sum(off) / len(off)
    a = sum(diag) / n - b
    if is_exact(M):
        fitted = identity(n) * a + b
        return bool(np.all(M == fitted)), a, b
    fitted = a * np.eye(n) + b
    scale = max(np.max(np.abs(M)), 1.0)
    ok = np.max(np.abs(M - fitted)) <= tol * scale
    return bool(ok), float(a), float(b)


def is_psd(M, tol: float = 1e-9) -> bool:
    """Nonnegative definiteness; exact inputs use an LDL' sweep."""
    M = np.asarray(M)
    if not is_exact(M):
        ev = eig_sym(M)
        scale = max(np.max(np.abs(ev), initial=0.0), 1.0)
        return bool(ev.min(initial=0.0) >= -tol * scale)
    A = M.copy()
    n = A.shape[0]
    for c in range(n):
        d = A[c, c]
        if d < 0:
            return False
        if d == 0:
            if any(A[c, j] != 0 for j in range(c + 1, n)):
                return False
            continue
        for i in range(c + 1, n):
            if A[i, c] != 0:
                A[i, c:] = A[i, c:] - (A[i, c] / d) * A[c, c:]
    return True
