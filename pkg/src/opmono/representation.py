"""Inverse representation of Q^alpha functions of a commuting tuple.

For ``1/f = gamma + S^alpha tau`` and a commuting tuple ``A`` with joint
spectrum in ``(0, inf)^n``::

    f(A)^{-1} = gamma I + sum_k w_k (prod_j (xi_kj I + A_j))^{-alpha}

:func:`lemma1_rhs` builds the right-hand side directly from matrix products;
:func:`verify_lemma1` compares it to the inverse of the functional-calculus
value ``f(A)``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .calculus import DEFAULT_NODES, apply_function, frac_power_eigen, inv_frac_power_integral
from .errors import AlphaOutOfRangeError, ArityMismatchError, SpectrumOutsideDomainError
from .linalg import CommutingTuple, joint_diagonalize
from .stieltjes import QAlphaFunction

ROUTES = ("eigen", "integral")


def shifted_product(T: CommutingTuple, shifts: Sequence[float]) -> np.ndarray:
    """``prod_j (shifts[j] I + A_j)`` as an ordinary (symmetrized) matrix product."""
    eye = np.eye(T.dim)
    P = eye
    for s, m in zip(shifts, T.matrices, strict=True):
        P = P @ (float(s) * eye + m)
    return 0.5 * (P + P.T)


def inverse_spd(M) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix through its eigendecomposition."""
    return frac_power_eigen(M, -1.0)


def _check_inputs(T: CommutingTuple, F: QAlphaFunction, route: str):
    if route not in ROUTES:
        raise ValueError(f"route must be one of {ROUTES}, got {route!r}")
    if F.n != T.n:
        raise ArityMismatchError(f"function of arity {F.n} applied to a {T.n}-tuple")
    if not 0.0 <= F.alpha <= 1.0:
        raise AlphaOutOfRangeError(f"the representation needs 0 <= alpha <= 1, got {F.alpha}")


def lemma1_rhs(T: CommutingTuple, F: QAlphaFunction, route: str = "eigen", nodes: int = DEFAULT_NODES) -> np.ndarray:
    """``gamma I + sum_k w_k P_k^{-alpha}`` with ``P_k = prod_j (xi_kj I + A_j)``.

    `route` selects how ``P^{-alpha}`` is computed for ``0 < alpha < 1``:
    ``"eigen"`` (eigendecomposition of ``P``) or ``"integral"`` (resolvent
    quadrature with `nodes` nodes). ``alpha = 1`` is a plain inverse and
    ``alpha = 0`` contributes ``w_k I`` per atom.

    Raises
    ------
    SpectrumOutsideDomainError
        The joint spectrum of `T` is not inside ``(0, inf)^n``.
    NotPositiveDefiniteError
        Some ``P_k`` is not positive definite.
    """
    if not isinstance(T, CommutingTuple):
        T = CommutingTuple(tuple(T))
    _check_inputs(T, F, route)
    J = joint_diagonalize(T)
    if np.any(J.spectrum <= 0):
        raise SpectrumOutsideDomainError("joint spectrum is not contained in (0, inf)^n")

    d = T.dim
    alpha = F.alpha
    total = F.gamma * np.eye(d)
    for xi, w in zip(F.measure.points, F.measure.weights):
        if alpha == 0.0:
            total = total + w * np.eye(d)
            continue
        P = shifted_product(T, xi)
        if alpha == 1.0:
            term = inverse_spd(P)
        elif route == "eigen":
            term = frac_power_eigen(P, -alpha)
        else:
            term = inv_frac_power_integral(P, alpha, nodes=nodes)
        total = total + w * term
    return 0.5 * (total + total.T)


def verify_lemma1(T: CommutingTuple, F: QAlphaFunction, route: str = "eigen", nodes: int = DEFAULT_NODES) -> float:
    """Relative Frobenius residual between ``f(A)^{-1}`` and :func:`lemma1_rhs`.

    ``f(A)`` comes from the joint functional calculus and is inverted through
    its own eigendecomposition; the residual is normalized by
    ``max(1, ||f(A)^{-1}||_F)``.
    """
    if not isinstance(T, CommutingTuple):
        T = CommutingTuple(tuple(T))
    _check_inputs(T, F, route)
    fA = apply_function(joint_diagonalize(T), F)
    lhs = inverse_spd(fA)
    rhs = lemma1_rhs(T, F, route, nodes)
    return float(np.linalg.norm(lhs - rhs) / max(1.0, float(np.linalg.norm(lhs))))
