"""Joint-spectrum functional calculus and fractional matrix powers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    AlphaOutOfRangeError,
    ArityMismatchError,
    NonFiniteValueError,
    NotPositiveDefiniteError,
)
from .linalg import JointSpectralDecomposition, as_symmetric, sym_eig

PD_TOL = 1e-12
DEFAULT_NODES = 400
TAIL_TOL = 1e-13


@dataclass(frozen=True)
class ScalarField:
    """A real function of ``arity`` real variables.

    ``fn`` receives a 1-D float array of length ``arity`` and returns a float.
    """

    arity: int
    fn: Callable[[np.ndarray], float]

    def __call__(self, x) -> float:
        return self.fn(np.asarray(x, dtype=np.float64))


def apply_function(J: JointSpectralDecomposition, f) -> np.ndarray:
    """Evaluate ``f(A)`` for the commuting tuple whose joint decomposition is `J`.

    ``f(A) = V diag(f(s_1), ..., f(s_d)) V^T`` where ``s_k`` are the rows of
    ``J.spectrum``. `f` is a :class:`ScalarField` (arity checked) or any
    callable taking a point of the joint spectrum.

    Raises
    ------
    ArityMismatchError
    NonFiniteValueError
        If `f` is not finite at some spectrum point, i.e. the joint spectrum
        leaves the domain of `f`.
    """
    arity = getattr(f, "arity", None)
    if arity is not None and arity != J.n:
        raise ArityMismatchError(f"function of arity {arity} applied to a {J.n}-tuple")
    values = np.empty(J.dim)
    for k, point in enumerate(J.spectrum):
        v = float(f(point))
        if not math.isfinite(v):
            raise NonFiniteValueError(f"f is not finite at joint eigenvalue {point.tolist()}")
        values[k] = v
    V = J.basis
    M = (V * values) @ V.T
    return 0.5 * (M + M.T)


def _is_nonneg_integer(beta: float) -> bool:
    return beta >= 0 and float(beta).is_integer()


def frac_power_eigen(C, beta: float) -> np.ndarray:
    """``C**beta`` through the eigendecomposition of `C`.

    `C` must be positive definite unless `beta` is a non-negative integer.
    """
    decomp = sym_eig(C)
    w = decomp.eigenvalues
    if not _is_nonneg_integer(beta):
        scale = max(1.0, float(np.max(np.abs(w))))
        if w[0] <= PD_TOL * scale:
            raise NotPositiveDefiniteError(f"lambda_min = {w[0]:.3e} is not positive")
    V = decomp.basis
    M = (V * np.power(w, float(beta))) @ V.T
    return 0.5 * (M + M.T)


def inv_frac_power_integral(C, alpha: float, nodes: int = DEFAULT_NODES, tail_tol: float = TAIL_TOL) -> np.ndarray:
    """``C**(-alpha)`` for ``0 < alpha < 1`` from its resolvent integral.

    Computes ``sin(alpha pi)/pi * int_0^inf t^(-alpha) (t I + C)^(-1) dt`` by
    the trapezoid rule in ``u = log t``. The integrand is analytic in the
    strip ``|Im u| < pi`` and decays like ``exp((1 - alpha) u)`` on the left and
    ``exp(-alpha u)`` on the right, so the window is sized from both rates so
    that each neglected tail is below `tail_tol` relative to the result.

    Resolvents are formed by batched linear solves, independently of any
    eigenvector computation; the eigenvalues of `C` only set the window.

    Parameters
    ----------
    C : array_like
        Symmetric positive definite matrix.
    alpha : float
        Exponent in the open interval (0, 1).
    nodes : int
        Number of trapezoid nodes.

    Raises
    ------
    AlphaOutOfRangeError
    NotPositiveDefiniteError
    """
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRangeError(f"alpha must lie in (0, 1), got {alpha}")
    if nodes < 2:
        raise ValueError("need at least two quadrature nodes")
    C = as_symmetric(C)
    w = sym_eig(C).eigenvalues
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] <= PD_TOL * scale:
        raise NotPositiveDefiniteError(f"lambda_min = {w[0]:.3e} is not positive")

    log_tol = -math.log(tail_tol)
    left = math.log(w[0]) - (log_tol - math.log(1.0 - alpha)) / (1.0 - alpha)
    right = math.log(w[-1]) + (log_tol - math.log(alpha)) / alpha
    u, h = np.linspace(left, right, nodes, retstep=True)
    weights = np.full(nodes, h)
    weights[[0, -1]] *= 0.5

    d = C.shape[0]
    eye = np.eye(d)
    terms = np.empty((nodes, d, d))
    # t <= 1: t^(1-alpha) (tI + C)^-1 ; t > 1: t^(-alpha) (I + C/t)^-1, avoids overflow
    small = u <= 0.0
    t = np.exp(u[small])
    terms[small] = np.linalg.solve(t[:, None, None] * eye + C, eye) * (t ** (1.0 - alpha))[:, None, None]
    s = np.exp(-u[~small])
    terms[~small] = np.linalg.solve(eye + s[:, None, None] * C, eye) * (s**alpha)[:, None, None]

    M = math.sin(alpha * math.pi) / math.pi * np.tensordot(weights, terms, axes=1)
    return 0.5 * (M + M.T)
