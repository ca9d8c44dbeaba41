"""Dense real symmetric linear algebra.

Eigendecomposition (cyclic Jacobi), Loewner-order comparison, simultaneous
diagonalization of commuting families and seeded sampling of commuting
tuples and ordered pairs of tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np

from .errors import (
    DegeneracyUnresolvedError,
    DimMismatchError,
    NoConvergenceError,
    NonSymmetricError,
    NotCommutingError,
)

SYMMETRY_TOL = 1e-12
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
COMM_TOL = 1e-10
CLUSTER_TOL = 1e-7
JOINT_MAX_DEPTH = 5
JOINT_RESIDUAL_TOL = 1e-8
ORDER_TOL = 1e-12
SHIFT_SLACK = 1e-10

REGIMES = ("cross", "tuple")


def as_symmetric(M, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Return `M` as a float64 square array, checking symmetry.

    Raises
    ------
    NonSymmetricError
        If `M` is not square or ``|M[i,j] - M[j,i]| > tol * max(1, max|M|)``.
    """
    M = np.array(M, dtype=np.float64, copy=True)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise NonSymmetricError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonSymmetricError("matrix has non-finite entries")
    bound = tol * max(1.0, float(np.max(np.abs(M))))
    if np.max(np.abs(M - M.T)) > bound:
        raise NonSymmetricError(f"asymmetry {np.max(np.abs(M - M.T)):.3e} exceeds {bound:.3e}")
    return M


def _frozen(M: np.ndarray) -> np.ndarray:
    M.setflags(write=False)
    return M


@numba.njit(cache=True)
def _jacobi_sweeps(a, v, tol, max_sweeps):
    # In-place cyclic Jacobi on `a`, accumulating rotations into `v`.
    # Returns the number of sweeps used, or -1 if the budget ran out.
    d = a.shape[0]
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(d):
            for j in range(d):
                if i != j:
                    off += a[i, j] * a[i, j]
        if math.sqrt(off) <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(d):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(d):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(d):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return -1


class SpectralDecomposition(NamedTuple):
    """Eigenvalues in ascending order and the orthogonal eigenvector basis (columns)."""

    eigenvalues: np.ndarray
    basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.basis * self.eigenvalues) @ self.basis.T


def sym_eig(M, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> SpectralDecomposition:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    M : array_like, shape (d, d)
        Symmetric matrix.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm is at most
        ``tol * max(1, ||M||_F)``.
    max_sweeps : int
        Sweep budget.

    Returns
    -------
    SpectralDecomposition
        Ascending eigenvalues and orthonormal eigenvectors.

    Raises
    ------
    NonSymmetricError
    NoConvergenceError
        If the off-diagonal mass is still above threshold after `max_sweeps`.
    """
    a = as_symmetric(M)
    # exact symmetrization keeps the rotations from drifting
    a = 0.5 * (a + a.T)
    scale = max(1.0, float(np.linalg.norm(a)))
    v = np.eye(a.shape[0])
    used = _jacobi_sweeps(a, v, tol * scale, max_sweeps)
    if used < 0:
        raise NoConvergenceError(f"Jacobi did not converge within {max_sweeps} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return SpectralDecomposition(w[order], v[:, order])


def lambda_min(M, tol: float = JACOBI_TOL) -> float:
    return float(sym_eig(M, tol=tol).eigenvalues[0])


def loewner_leq(A, B, eps: float | None = None) -> tuple[bool, float]:
    """Test ``A <= B`` in the Loewner order.

    Returns ``(holds, margin)`` where ``margin = lambda_min(B - A)`` and
    ``holds`` is ``margin >= -eps``. The default `eps` is
    ``1e-9 * max(1, ||A||_F, ||B||_F)``.
    """
    A = as_symmetric(A)
    B = as_symmetric(B)
    if A.shape != B.shape:
        raise DimMismatchError(f"shapes {A.shape} and {B.shape} differ")
    if eps is None:
        eps = 1e-9 * max(1.0, float(np.linalg.norm(A)), float(np.linalg.norm(B)))
    margin = lambda_min(B - A)
    return margin >= -eps, margin


def commutator_norm(A: np.ndarray, B: np.ndarray) -> float:
    return float(np.linalg.norm(A @ B - B @ A))


def _commute(A: np.ndarray, B: np.ndarray, tol: float) -> bool:
    bound = tol * max(1.0, float(np.linalg.norm(A)) * float(np.linalg.norm(B)))
    return commutator_norm(A, B) <= bound


@dataclass(frozen=True)
class CommutingTuple:
    """``n`` pairwise-commuting symmetric matrices of a common dimension.

    Matrices are stored as read-only float64 arrays. Construction fails with
    :class:`NotCommutingError` if some pair has
    ``||A_i A_j - A_j A_i||_F > comm_tol * max(1, ||A_i||_F ||A_j||_F)``.
    """

    matrices: tuple[np.ndarray, ...]
    comm_tol: float = COMM_TOL

    def __post_init__(self):
        mats = tuple(_frozen(as_symmetric(m)) for m in self.matrices)
        if not mats:
            raise DimMismatchError("a commuting tuple needs at least one matrix")
        if len({m.shape for m in mats}) != 1:
            raise DimMismatchError("matrices of a tuple must share one dimension")
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                if not _commute(mats[i], mats[j], self.comm_tol):
                    raise NotCommutingError(
                        f"matrices {i} and {j} do not commute "
                        f"(||[A_i, A_j]||_F = {commutator_norm(mats[i], mats[j]):.3e})"
                    )
        object.__setattr__(self, "matrices", mats)

    @property
    def n(self) -> int:
        return len(self.matrices)

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    def __len__(self):
        return self.n

    def __getitem__(self, j):
        return self.matrices[j]


@dataclass(frozen=True)
class JointSpectralDecomposition:
    """Shared orthonormal eigenbasis and joint spectrum of a commuting tuple.

    ``spectrum[k, j]`` is the eigenvalue of ``A_j`` on basis column ``k``.
    """

    basis: np.ndarray
    spectrum: np.ndarray

    @property
    def n(self) -> int:
        return self.spectrum.shape[1]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


def _is_scalar_block(block: np.ndarray, tol: float) -> bool:
    mean = np.trace(block) / block.shape[0]
    return float(np.linalg.norm(block - mean * np.eye(block.shape[0]))) <= tol


def _split(mats, tols, rng, depth: int, cluster_tol: float, max_depth: int, eig_tol: float):
    c = rng.standard_normal(len(mats))
    c /= np.linalg.norm(c)
    combo = sum(cj * m for cj, m in zip(c, mats))
    w, V = sym_eig(combo, tol=eig_tol)
    scale = max(1.0, float(np.max(np.abs(w))))
    d = len(w)
    start = 0
    while start < d:
        stop = start + 1
        while stop < d and w[stop] - w[stop - 1] < cluster_tol * scale:
            stop += 1
        if stop - start > 1:
            Vc = V[:, start:stop]
            blocks = [Vc.T @ m @ Vc for m in mats]
            if not all(_is_scalar_block(b, t) for b, t in zip(blocks, tols)):
                if depth >= max_depth:
                    raise DegeneracyUnresolvedError(
                        f"eigenvalue cluster of size {stop - start} not split after {max_depth} recursions"
                    )
                blocks = [0.5 * (b + b.T) for b in blocks]
                W = _split(blocks, tols, rng, depth + 1, cluster_tol, max_depth, eig_tol)
                V[:, start:stop] = Vc @ W
        start = stop
    return V


def joint_diagonalize(
    T: CommutingTuple,
    cluster_tol: float = CLUSTER_TOL,
    max_depth: int = JOINT_MAX_DEPTH,
    residual_tol: float = JOINT_RESIDUAL_TOL,
    seed: int = 0,
    eig_tol: float = JACOBI_TOL,
) -> JointSpectralDecomposition:
    """Simultaneously diagonalize a commuting tuple.

    A random linear combination ``sum_j c_j A_j`` is diagonalized; clusters of
    its eigenvalues closer than ``cluster_tol * scale`` are re-split on the
    restricted blocks with fresh coefficients, at most `max_depth` times.
    Blocks on which every ``A_j`` is already scalar are accepted as joint
    eigenspaces. The coefficients come from `seed`, so the result is a pure
    function of the input.

    Raises
    ------
    NotCommutingError
        If `T` is not a :class:`CommutingTuple` of commuting matrices.
    DegeneracyUnresolvedError
        If splitting fails within budget or the final off-diagonal residual
        of some ``A_j`` exceeds ``residual_tol * max(1, ||A_j||_F)``.
    """
    if not isinstance(T, CommutingTuple):
        T = CommutingTuple(tuple(T))
    mats = list(T.matrices)
    tols = [residual_tol * max(1.0, float(np.linalg.norm(m))) for m in mats]
    rng = np.random.default_rng(seed)
    V = _split(mats, tols, rng, 0, cluster_tol, max_depth, eig_tol)
    spectrum = np.empty((T.dim, T.n))
    for j, (m, tol) in enumerate(zip(mats, tols)):
        D = V.T @ m @ V
        diag = np.diag(D).copy()
        if np.linalg.norm(D - np.diag(diag)) > tol:
            raise DegeneracyUnresolvedError(f"matrix {j} is not diagonal in the computed basis")
        spectrum[:, j] = diag
    return JointSpectralDecomposition(_frozen(V), _frozen(spectrum))


def projection_defect(T: CommutingTuple, J: JointSpectralDecomposition) -> float:
    """Largest distance from a joint-spectrum coordinate to the spectrum of its matrix."""
    worst = 0.0
    for j, m in enumerate(T.matrices):
        eig = sym_eig(m).eigenvalues
        dist = np.min(np.abs(J.spectrum[:, j][:, None] - eig[None, :]), axis=1)
        worst = max(worst, float(np.max(dist)))
    return worst


def random_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.where(np.diag(r) < 0, -1.0, 1.0)


def _conjugate(Q: np.ndarray, diag: np.ndarray) -> np.ndarray:
    M = (Q * diag) @ Q.T
    return 0.5 * (M + M.T)


def _check_box(box, name="box") -> tuple[float, float]:
    lo, hi = (float(x) for x in box)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise ValueError(f"{name} must be a finite interval lo <= hi, got {box!r}")
    return lo, hi


def _check_shape(n: int, d: int):
    if int(n) != n or int(d) != d or n < 1 or d < 1:
        raise ValueError(f"arity and dimension must be positive integers, got n={n}, d={d}")


def sample_commuting_tuple(n: int, d: int, box=(0.1, 10.0), seed: int = 0) -> CommutingTuple:
    """Sample ``Q diag(a_j) Q^T`` for ``j < n`` with a shared Haar ``Q``.

    Diagonal entries are uniform on `box`. The output is a pure function of
    the arguments.
    """
    _check_shape(n, d)
    lo, hi = _check_box(box)
    rng = np.random.default_rng(seed)
    Q = random_orthogonal(d, rng)
    vals = rng.uniform(lo, hi, size=(n, d))
    return CommutingTuple(tuple(_conjugate(Q, vals[j]) for j in range(n)))


@dataclass(frozen=True)
class DominatingPair:
    """Tuples with ``A_j <= B_j`` for every ``j``.

    In the ``cross`` regime all ``2n`` matrices commute pairwise; in the
    ``tuple`` regime only matrices within one tuple are guaranteed to.
    """

    A: CommutingTuple
    B: CommutingTuple
    regime: str

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}, got {self.regime!r}")
        if self.A.n != self.B.n or self.A.dim != self.B.dim:
            raise DimMismatchError("tuples of a pair must share arity and dimension")
        for j, (a, b) in enumerate(zip(self.A.matrices, self.B.matrices)):
            scale = max(1.0, float(np.linalg.norm(a)), float(np.linalg.norm(b)))
            margin = lambda_min(b - a)
            if margin < -ORDER_TOL * scale:
                raise ValueError(f"A_{j} <= B_{j} fails with margin {margin:.3e}")
        if self.regime == "cross":
            mats = self.A.matrices + self.B.matrices
            tol = min(self.A.comm_tol, self.B.comm_tol)
            for i in range(len(mats)):
                for j in range(i + 1, len(mats)):
                    if not _commute(mats[i], mats[j], tol):
                        raise NotCommutingError("cross regime requires all matrices to commute")

    @property
    def n(self) -> int:
        return self.A.n

    @property
    def dim(self) -> int:
        return self.A.dim


def sample_dominating_pair(
    regime: str,
    n: int,
    d: int,
    box=(0.1, 10.0),
    gap_box=(0.0, 1.0),
    seed: int = 0,
) -> DominatingPair:
    """Sample an ordered pair of commuting tuples.

    ``cross``: one shared eigenbasis; ``b = a + gap`` entrywise with the gap
    uniform on `gap_box` (clipped to the box width) and ``a`` drawn so that
    both stay inside `box`.

    ``tuple``: independent eigenbases for ``A`` and ``B`` with spectra uniform
    on `box`; then each pair ``(A_j, B_j)`` is separated by
    ``mu_j = max(0, -lambda_min(B_j - A_j)) + 1e-10 ||B_j||_F``. The shift is
    applied as ``B_j + mu_j I``, or as ``A_j - mu_j I`` when the box lies in
    ``(-inf, 0]`` so that spectra keep their sign.
    """
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")
    _check_shape(n, d)
    lo, hi = _check_box(box)
    glo, ghi = _check_box(gap_box, "gap_box")
    if glo < 0:
        raise ValueError("gap_box must lie in [0, inf)")
    rng = np.random.default_rng(seed)
    if regime == "cross":
        Q = random_orthogonal(d, rng)
        gap = np.minimum(rng.uniform(glo, ghi, size=(n, d)), hi - lo)
        a = lo + rng.uniform(0.0, 1.0, size=(n, d)) * (hi - lo - gap)
        b = a + gap
        A = [_conjugate(Q, a[j]) for j in range(n)]
        B = [_conjugate(Q, b[j]) for j in range(n)]
    else:
        QA = random_orthogonal(d, rng)
        QB = random_orthogonal(d, rng)
        a = rng.uniform(lo, hi, size=(n, d))
        b = rng.uniform(lo, hi, size=(n, d))
        A = [_conjugate(QA, a[j]) for j in range(n)]
        B = [_conjugate(QB, b[j]) for j in range(n)]
        eye = np.eye(d)
        for j in range(n):
            mu = max(0.0, -lambda_min(B[j] - A[j])) + SHIFT_SLACK * float(np.linalg.norm(B[j]))
            if hi <= 0.0:
                A[j] = A[j] - mu * eye
            else:
                B[j] = B[j] + mu * eye
    return DominatingPair(CommutingTuple(tuple(A)), CommutingTuple(tuple(B)), regime)

