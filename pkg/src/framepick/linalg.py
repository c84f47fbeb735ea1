"""Numerical core: truncated SVD and square/rectangular maximum-volume
row-subset selection.

The SVD is a one-sided Jacobi implementation (rotations orthogonalize the
columns of the working matrix; a per-sweep Gram cache avoids recomputing
column inner products). No external decomposition routine is used, so the
selection pipeline is reproducible down to the math kernel.

MaxVol finds rows R of a tall matrix Qs (n x s, full column rank) whose
submatrix A = Qs[R] has locally maximal volume. The square phase enforces
the dominance property max |C_ij| <= 1 + delta for C = Qs A^-1; the
rectangular phase greedily appends rows while some row of the
least-squares coefficient matrix C = Qs A^+ has 2-norm above
1 + growth_delta. All argmax ties break toward the lowest row index.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, ValidationError

# Rank test: sigma_s <= RANK_RTOL * sigma_1 counts as rank-deficient.
RANK_RTOL = 1e-10

# One-sided Jacobi stops once every column pair satisfies
# |<w_i, w_j>| <= _JACOBI_TOL * ||w_i|| * ||w_j||.
_JACOBI_TOL = 1e-11
_JACOBI_MAX_SWEEPS = 60


@dataclass(frozen=True)
class SvdResult:
    """Thin truncated SVD: A ~ left @ diag(singular_values) @ right.T."""

    singular_values: np.ndarray  # (s,), non-increasing, >= 0
    left_vectors: np.ndarray  # (n, s), orthonormal columns
    right_vectors: np.ndarray  # (d, s), orthonormal columns

    def __post_init__(self) -> None:
        sig = self.singular_values
        if sig.ndim != 1 or np.any(sig < 0) or np.any(np.diff(sig) > 0):
            raise ValidationError("singular values must be non-negative and sorted")

    @property
    def rank_cut(self) -> int:
        return int(self.singular_values.size)

    def reduced(self) -> np.ndarray:
        """Rows of A projected onto the retained spectral axes: U * sigma."""
        return self.left_vectors * self.singular_values


@dataclass(frozen=True)
class MaxVolSelection:
    """Row subset chosen by rectangular MaxVol.

    row_indices is sorted ascending; selection_order preserves the order
    rows were pivoted/appended. coefficient_max is the largest row 2-norm
    of C = Qs (Qs[rows])^+ at termination. converged is False when the
    square phase hit its iteration cap before reaching dominance.
    """

    row_indices: tuple[int, ...]
    selection_order: tuple[int, ...]
    coefficient_max: float
    converged: bool


def _jacobi_orthogonalize(work: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rotate column pairs of ``work`` (tall, n >= m) until mutually
    orthogonal. Returns (work, V) with work = original @ V."""
    _, m = work.shape
    vmat = np.eye(m)
    tol_sq = _JACOBI_TOL * _JACOBI_TOL
    for _ in range(_JACOBI_MAX_SWEEPS):
        # Per-sweep recompute bounds cache drift; rotations then keep the
        # cache in sync so skip checks stay O(1).
        gram = work.T @ work
        rotated = 0
        for i in range(m - 1):
            for j in range(i + 1, m):
                a = float(gram[i, i])
                b = float(gram[j, j])
                c = float(gram[i, j])
                # a, b <= 0 only through rounding on a zero column: skip.
                if a <= 0.0 or b <= 0.0 or c * c <= tol_sq * a * b:
                    continue
                rotated += 1
                tau = (b - a) / (2.0 * c)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                cs = 1.0 / math.hypot(1.0, t)
                sn = cs * t
                wi = work[:, i].copy()
                work[:, i] = cs * wi - sn * work[:, j]
                work[:, j] = sn * wi + cs * work[:, j]
                vi = vmat[:, i].copy()
                vmat[:, i] = cs * vi - sn * vmat[:, j]
                vmat[:, j] = sn * vi + cs * vmat[:, j]
                # Gram cache: G <- R^T G R touches only rows/columns i, j;
                # the 2x2 block is set exactly (trace-preserving update)
                # so diagonals cannot drift negative within a sweep.
                gi = gram[:, i].copy()
                gj = gram[:, j].copy()
                gram[:, i] = cs * gi - sn * gj
                gram[:, j] = sn * gi + cs * gj
                gram[i, :] = gram[:, i]
                gram[j, :] = gram[:, j]
                gram[i, i] = a - t * c
                gram[j, j] = b + t * c
                gram[i, j] = 0.0
                gram[j, i] = 0.0
        if rotated == 0:
            break
    return work, vmat


def _complete_orthonormal(u: np.ndarray, filled: int) -> None:
    """Fill columns filled..end of u with vectors orthonormal to the rest.

    Deterministic Gram-Schmidt over the standard basis, lowest axis first.
    """
    n, m = u.shape
    col = filled
    for axis in range(n):
        if col == m:
            return
        cand = np.zeros(n)
        cand[axis] = 1.0
        cand -= u[:, :col] @ (u[:, :col].T @ cand)
        norm = np.linalg.norm(cand)
        if norm > 0.5:
            u[:, col] = cand / norm
            col += 1
    if col < m:  # n columns always suffice; guard against misuse
        raise ValidationError("cannot complete orthonormal basis")


def full_svd(matrix: np.ndarray) -> SvdResult:
    """One-sided Jacobi SVD with all min(n, d) spectral components."""
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got shape {a.shape}")
    n, d = a.shape
    if n < 1 or d < 1:
        raise ValidationError(f"matrix must be at least 1x1, got {n}x{d}")
    if not np.isfinite(a).all():
        raise ValidationError("matrix contains NaN or Inf")

    transposed = n < d
    work = (a.T if transposed else a).copy()
    work, vmat = _jacobi_orthogonalize(work)

    sigma = np.sqrt(np.einsum("ij,ij->j", work, work))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    work = work[:, order]
    vmat = vmat[:, order]

    m = sigma.size
    u = np.zeros_like(work)
    cutoff = sigma[0] * np.finfo(np.float64).eps * max(work.shape)
    filled = m
    for k in range(m):
        if sigma[k] > cutoff:
            u[:, k] = work[:, k] / sigma[k]
        else:
            filled = min(filled, k)
    if filled < m:
        sigma[filled:] = 0.0
        _complete_orthonormal(u, filled)

    if transposed:
        left, right = vmat, u
    else:
        left, right = u, vmat
    return SvdResult(
        singular_values=sigma, left_vectors=left, right_vectors=right
    )


def truncated_svd(matrix: np.ndarray, energy: float) -> SvdResult:
    """Truncated SVD keeping the smallest rank s whose squared singular
    values cover ``energy`` of the total spectral energy, clamped to
    [2, min(n, d)].

    Raises DegenerateInputError for an all-zero matrix; the caller owns
    the fallback policy.
    """
    if not 0 < energy <= 1:
        raise ValidationError(f"energy must be in (0, 1], got {energy}")
    res = full_svd(matrix)
    sigma = res.singular_values
    if sigma[0] == 0.0:
        raise DegenerateInputError("all-zero matrix has no informative subspace")
    sq = sigma * sigma
    cum = np.cumsum(sq)
    threshold = energy * cum[-1]
    s_energy = int(np.searchsorted(cum, threshold, side="left")) + 1
    s = min(max(s_energy, 2), sigma.size)
    return SvdResult(
        singular_values=sigma[:s],
        left_vectors=res.left_vectors[:, :s],
        right_vectors=res.right_vectors[:, :s],
    )


def _check_tall_full_rank(qs: np.ndarray) -> None:
    n, s = qs.shape
    if n < s or s < 1:
        raise ValidationError(f"matrix must be tall (n >= s >= 1), got {n}x{s}")
    sigma = full_svd(qs).singular_values
    if sigma[s - 1] <= RANK_RTOL * sigma[0]:
        raise DegenerateInputError(
            f"rank-deficient matrix: sigma_{s}={sigma[s - 1]:.3e} vs "
            f"sigma_1={sigma[0]:.3e}"
        )


def _pivoted_init(qs: np.ndarray) -> np.ndarray:
    """Initial row set from Gaussian elimination with partial pivoting."""
    n, s = qs.shape
    m = qs.astype(np.float64, copy=True)
    perm = np.arange(n)
    for k in range(s):
        p = k + int(np.argmax(np.abs(m[k:, k])))
        if p != k:
            m[[k, p]] = m[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        pivot = m[k, k]
        if pivot != 0.0:
            m[k + 1 :, k:] -= np.outer(m[k + 1 :, k] / pivot, m[k, k:])
    return perm[:s]


# Swapping the selected rows at slot set J for new rows I multiplies the
# selected determinant by det(C[I, J]) exactly, so minors of C measure the
# gain of any multi-row exchange. When the number of s-subsets is within
# this budget, scanning every minor finds the global optimum directly;
# above it only single and double exchanges are searched.
_EXACT_SUBSET_BUDGET = 20000


def _greedy_swaps(
    rows: np.ndarray, coeff: np.ndarray, bound: float, budget: int
) -> tuple[np.ndarray, int, bool]:
    """Single-row exchanges at the largest |C_ij| until dominance holds
    or the swap budget runs out. Mutates ``rows``; returns the updated
    coefficients, swaps used, and whether dominance was reached."""
    _, s = coeff.shape
    used = 0
    while True:
        flat = int(np.argmax(np.abs(coeff)))
        i, j = divmod(flat, s)
        if abs(coeff[i, j]) <= bound:
            return coeff, used, True
        if used == budget:
            return coeff, used, False
        col_j = coeff[:, j].copy()
        row_i = coeff[i, :].copy()
        row_i[j] -= 1.0
        coeff -= np.outer(col_j, row_i / coeff[i, j])
        rows[j] = i
        used += 1


def _best_pair_exchange(
    coeff: np.ndarray, bound: float
) -> tuple[int, int, int, int] | None:
    """Largest 2x2 coefficient minor above ``bound``: the double row
    exchange (i1->slot j1, i2->slot j2) with the biggest volume gain.
    Rows already selected yield zero minors, so they exclude themselves."""
    n, s = coeff.shape
    best_gain = bound
    best = None
    for j1 in range(s - 1):
        for j2 in range(j1 + 1, s):
            minors = np.abs(
                np.outer(coeff[:, j1], coeff[:, j2])
                - np.outer(coeff[:, j2], coeff[:, j1])
            )
            flat = int(np.argmax(minors))
            i1, i2 = divmod(flat, n)
            if minors[i1, i2] > best_gain:
                best_gain = float(minors[i1, i2])
                best = (i1, i2, j1, j2)
    return best


def _best_subset_exchange(
    coeff: np.ndarray, bound: float
) -> np.ndarray | None:
    """Exhaustive scan of all s-subset minors of C; returns the subset
    with |det(C[S, :])| maximal if it beats ``bound``, else None."""
    n, s = coeff.shape
    subsets = np.array(list(itertools.combinations(range(n), s)))
    minors = np.abs(np.linalg.det(coeff[subsets]))
    k = int(np.argmax(minors))
    if minors[k] > bound:
        return subsets[k]
    return None


def maxvol_square(
    qs: np.ndarray, delta: float, max_iters: int | None = None
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Square MaxVol: s rows of the n x s matrix ``qs`` approaching
    maximal |det|.

    Starts from partial-pivoted elimination, then swaps the row pair
    with the largest coefficient magnitude until max |C_ij| <= 1 + delta
    (dominance). Greedy single swaps can park at a dominant selection
    several exchanges short of the maximum-volume subset, so after
    convergence the selection is polished: a full subset-minor scan when
    the subset count fits _EXACT_SUBSET_BUDGET (global optimum for small
    problems), otherwise the best double exchange. If the swap budget of
    10n runs out before dominance, the current rows are returned with
    converged=False.

    Returns (row_indices sorted ascending, C, converged) where
    C = qs @ inv(qs[rows]) has shape n x s and C[rows] is the identity.
    """
    qs = np.asarray(qs, dtype=np.float64)
    if not delta > 0:
        raise ValidationError(f"delta must be > 0, got {delta}")
    _check_tall_full_rank(qs)
    n, s = qs.shape
    if n == s:
        return np.arange(n), np.eye(n), True

    rows = _pivoted_init(qs)
    coeff = np.linalg.solve(qs[rows].T, qs.T).T
    budget = (10 * n) if max_iters is None else max_iters
    bound = 1.0 + delta
    exact = math.comb(n, s) <= _EXACT_SUBSET_BUDGET

    coeff, used, converged = _greedy_swaps(rows, coeff, bound, budget)
    budget -= used
    while converged:
        if exact:
            subset = _best_subset_exchange(coeff, bound**s)
            if subset is None:
                break
            rows = subset.copy()
        else:
            move = _best_pair_exchange(coeff, bound**2)
            if move is None:
                break
            i1, i2, j1, j2 = move
            rows[j1], rows[j2] = i1, i2
        # Recompute C from scratch: polish jumps would compound rank-1
        # update error, and dominance must hold for the exact C.
        coeff = np.linalg.solve(qs[rows].T, qs.T).T
        coeff, used, converged = _greedy_swaps(rows, coeff, bound, budget)
        budget -= used

    order = np.argsort(rows)
    rows = rows[order]
    coeff = coeff[:, order]
    coeff[rows] = np.eye(s)
    return rows, coeff, converged


def maxvol_rect(
    qs: np.ndarray,
    delta: float,
    growth_delta: float,
    cap: int,
) -> MaxVolSelection:
    """Rectangular MaxVol: grow the square selection while the worst
    unselected row of C = qs (qs[rows])^+ has 2-norm above
    1 + growth_delta, up to ``cap`` rows.

    Each append multiplies the squared selected volume det(A^T A) by
    (1 + ||c_i||^2), so volume grows monotonically.
    """
    qs = np.asarray(qs, dtype=np.float64)
    if qs.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got shape {qs.shape}")
    n, s = qs.shape
    if cap < s:
        raise ValidationError(f"cap ({cap}) must be >= column count ({s})")
    if growth_delta < 0:
        raise ValidationError(f"growth_delta must be >= 0, got {growth_delta}")
    cap = min(cap, n)

    square_rows, coeff, converged = maxvol_square(qs, delta)
    rows = list(int(r) for r in square_rows)
    chosen = np.zeros(n, dtype=bool)
    chosen[square_rows] = True

    row_norm_sq = np.einsum("ij,ij->i", coeff, coeff)
    threshold_sq = (1.0 + growth_delta) ** 2
    while len(rows) < cap:
        masked = np.where(chosen, -np.inf, row_norm_sq)
        i = int(np.argmax(masked))
        if not row_norm_sq[i] > threshold_sq:
            break
        c_i = coeff[i, :].copy()
        v = coeff @ c_i
        scale = 1.0 / (1.0 + v[i])
        coeff = np.hstack([coeff - scale * np.outer(v, c_i), scale * v[:, None]])
        row_norm_sq = row_norm_sq - scale * v * v
        chosen[i] = True
        rows.append(i)

    coefficient_max = float(np.sqrt(max(row_norm_sq.max(), 0.0)))
    return MaxVolSelection(
        row_indices=tuple(sorted(rows)),
        selection_order=tuple(rows),
        coefficient_max=coefficient_max,
        converged=converged,
    )
