"""Atomic measures on the closed positive orthant and their Stieltjes transforms.

The function classes handled here are

* ``QAlphaFunction``: positive ``f`` with ``1/f(z) = gamma + S^alpha tau(z)``,
* ``RMinusFunction``: ``psi`` with ``1/(lambda - psi(-z)) = gamma + S tau(z)``,

where ``S^alpha tau(z) = sum_k w_k / (prod_j (xi_kj + z_j))^alpha``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BranchCutError,
    DimMismatchError,
    DomainViolationError,
    NonPositiveDenominatorError,
    SingularAtomError,
)

DENOMINATOR_TOL = 1e-14
GROUPINGS = ("product", "factor")


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite positive combination of point masses on ``[0, inf)^n``."""

    n: int
    points: np.ndarray = field(default=None)
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.n}")
        pts = np.zeros((0, self.n)) if self.points is None else np.array(self.points, dtype=np.float64)
        wts = np.zeros(0) if self.weights is None else np.array(self.weights, dtype=np.float64)
        pts = pts.reshape(-1, self.n) if pts.size else np.zeros((0, self.n))
        wts = wts.reshape(-1)
        if pts.shape[0] != wts.shape[0]:
            raise DimMismatchError(f"{pts.shape[0]} atom locations but {wts.shape[0]} weights")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(wts))):
            raise ValueError("atoms must be finite")
        if np.any(pts < 0):
            raise ValueError("atom locations must lie in the closed positive orthant")
        if np.any(wts <= 0):
            raise ValueError("atom weights must be positive")
        pts.setflags(write=False)
        wts.setflags(write=False)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @classmethod
    def from_atoms(cls, n: int, atoms) -> AtomicMeasure:
        """Build from an iterable of ``(xi, w)`` pairs."""
        atoms = list(atoms)
        for xi, _ in atoms:
            if len(np.atleast_1d(xi)) != n:
                raise DimMismatchError(f"atom {xi!r} is not a point of R^{n}")
        return cls(n, [np.atleast_1d(xi) for xi, _ in atoms], [w for _, w in atoms])

    @classmethod
    def dirac(cls, point, weight: float = 1.0) -> AtomicMeasure:
        point = np.atleast_1d(np.asarray(point, dtype=np.float64))
        return cls(len(point), [point], [weight])

    @classmethod
    def zero(cls, n: int) -> AtomicMeasure:
        return cls(n)

    @property
    def atoms(self) -> list[tuple[tuple[float, ...], float]]:
        return [(tuple(p.tolist()), float(w)) for p, w in zip(self.points, self.weights)]

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def __len__(self):
        return len(self.weights)

    def __add__(self, other: AtomicMeasure) -> AtomicMeasure:
        if other.n != self.n:
            raise DimMismatchError("cannot add measures of different dimension")
        return AtomicMeasure(
            self.n,
            np.vstack([self.points, other.points]),
            np.concatenate([self.weights, other.weights]),
        )

    def scaled(self, c: float) -> AtomicMeasure:
        if c < 0:
            raise ValueError("a positive measure can only be scaled by c >= 0")
        if c == 0:
            return AtomicMeasure.zero(self.n)
        return AtomicMeasure(self.n, self.points, self.weights * c)


def _is_integer(alpha: float) -> bool:
    return float(alpha).is_integer()


def stieltjes_transform(m: AtomicMeasure, z, alpha: float = 1.0, grouping: str = "product"):
    """Generalized n-dimensional Stieltjes transform ``S^alpha m(z)``.

    Parameters
    ----------
    m : AtomicMeasure
    z : array_like, real or complex, length ``m.n``
    alpha : float
    grouping : {"product", "factor"}
        ``"product"`` forms ``prod_j (xi_j + z_j)`` first and raises it to
        ``alpha`` on the principal branch. ``"factor"`` uses
        ``prod_j (xi_j + z_j)**alpha`` with a principal power per factor,
        which is the holomorphic continuation of the real function from
        ``(0, inf)^n`` to the product of upper half-planes. Both agree when
        every factor is positive.

    Returns
    -------
    float for real `z`, complex otherwise.

    Raises
    ------
    SingularAtomError
        Some factor ``xi_j + z_j`` vanishes.
    BranchCutError
        A non-integer power of a negative real number is requested.
    """
    if grouping not in GROUPINGS:
        raise ValueError(f"grouping must be one of {GROUPINGS}")
    z = np.asarray(z)
    is_complex = np.iscomplexobj(z)
    z = z.astype(np.complex128 if is_complex else np.float64).reshape(-1)
    if z.shape[0] != m.n:
        raise DimMismatchError(f"point of length {z.shape[0]} for a measure on R^{m.n}")
    if len(m) == 0:
        return 0j if is_complex else 0.0
    factors = m.points + z[None, :]
    if np.any(factors == 0):
        k = int(np.argmax(np.any(factors == 0, axis=1)))
        raise SingularAtomError(f"factor xi + z vanishes for atom {m.points[k].tolist()} at z = {z.tolist()}")
    integer = _is_integer(alpha)

    def on_cut(v: np.ndarray) -> np.ndarray:
        return (np.imag(v) == 0) & (np.real(v) < 0)

    if grouping == "product":
        prod = np.prod(factors, axis=1)
        if not integer and np.any(on_cut(prod)):
            raise BranchCutError(f"product of factors is a negative real and alpha={alpha} is not an integer")
        if not is_complex and (integer or np.all(prod > 0)):
            terms = prod ** (-float(alpha))
        else:
            terms = np.power(prod.astype(np.complex128), -float(alpha))
    else:
        if not integer and np.any(on_cut(factors)):
            raise BranchCutError(f"some factor is a negative real and alpha={alpha} is not an integer")
        if not is_complex and (integer or np.all(factors > 0)):
            terms = np.prod(factors ** (-float(alpha)), axis=1)
        else:
            terms = np.prod(np.power(factors.astype(np.complex128), -float(alpha)), axis=1)
    total = np.sum(m.weights * terms)
    if is_complex:
        return complex(total)
    return float(np.real(total))


def _positive_denominator(denom: float) -> float:
    if not denom > DENOMINATOR_TOL:
        raise NonPositiveDenominatorError(f"gamma + S tau = {denom:.3e} is not positive")
    return denom


@dataclass(frozen=True)
class QAlphaFunction:
    """``f`` with ``1/f = gamma + S^alpha tau`` (gamma any real, alpha >= 0)."""

    alpha: float
    gamma: float
    measure: AtomicMeasure

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"alpha must be a finite number >= 0, got {self.alpha}")
        if not math.isfinite(self.gamma):
            raise ValueError("gamma must be finite")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def n(self) -> int:
        return self.measure.n

    @property
    def arity(self) -> int:
        return self.measure.n

    def transform(self, z, grouping: str = "product"):
        return stieltjes_transform(self.measure, z, self.alpha, grouping)

    def __call__(self, x) -> float:
        return q_alpha_eval(self, x)

    def complex_eval(self, z) -> complex:
        """Holomorphic extension ``1/(gamma + S^alpha tau(z))`` (per-factor principal powers)."""
        denom = self.gamma + stieltjes_transform(self.measure, np.asarray(z, dtype=np.complex128), self.alpha, "factor")
        if denom == 0:
            raise NonPositiveDenominatorError("gamma + S tau vanishes")
        return 1.0 / denom


def q_alpha_eval(F: QAlphaFunction, x) -> float:
    """``1 / (gamma + S^alpha tau(x))`` at a point of ``(0, inf)^n``.

    Raises
    ------
    SingularAtomError
    DomainViolationError
        Some coordinate of `x` is not positive.
    NonPositiveDenominatorError
        ``gamma + S^alpha tau(x) <= 1e-14``.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    s = stieltjes_transform(F.measure, x, F.alpha)
    if np.any(x <= 0):
        raise DomainViolationError(f"point {x.tolist()} is outside (0, inf)^{F.n}")
    return 1.0 / _positive_denominator(F.gamma + s)


def power_function_repr(n: int, alpha: float) -> QAlphaFunction:
    """``(x_1 ... x_n)**alpha`` as a member of Q^alpha: unit mass at the origin, gamma = 0."""
    if not alpha >= 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    return QAlphaFunction(alpha, 0.0, AtomicMeasure.dirac(np.zeros(n)))


@dataclass(frozen=True)
class RMinusFunction:
    """``psi`` with ``1/(lambda - psi(-z)) = gamma + S tau(z)``, lambda > 0, gamma >= 0."""

    lambda_: float
    gamma: float
    measure: AtomicMeasure

    def __post_init__(self):
        if not (math.isfinite(self.lambda_) and self.lambda_ > 0):
            raise ValueError(f"lambda must be > 0, got {self.lambda_}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        object.__setattr__(self, "lambda_", float(self.lambda_))
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def n(self) -> int:
        return self.measure.n

    @property
    def arity(self) -> int:
        return self.measure.n

    def transform(self, z):
        return stieltjes_transform(self.measure, z, 1.0)

    def __call__(self, w) -> float:
        return r_minus_eval(self, w)

    def complex_eval(self, z) -> complex:
        z = np.asarray(z, dtype=np.complex128)
        denom = self.gamma + stieltjes_transform(self.measure, -z, 1.0)
        if denom == 0:
            raise NonPositiveDenominatorError("gamma + S tau vanishes")
        return self.lambda_ - 1.0 / denom


def r_minus_eval(P: RMinusFunction, w) -> float:
    """``lambda - 1/(gamma + S tau(-w))`` at a point of ``(-inf, 0]^n``."""
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    s = stieltjes_transform(P.measure, -w, 1.0)
    if np.any(w > 0):
        raise DomainViolationError(f"point {w.tolist()} is outside (-inf, 0]^{P.n}")
    return P.lambda_ - 1.0 / _positive_denominator(P.gamma + s)


def product_measure(parts) -> AtomicMeasure:
    """Tensor product of one-dimensional atomic measures.

    Atoms are the Cartesian product of the parts' atoms with multiplied
    weights, so ``S^alpha(tau_1 x ... x tau_n)(z) = prod_j S^alpha tau_j(z_j)``.
    """
    parts = list(parts)
    if not parts:
        raise DimMismatchError("need at least one factor measure")
    for p in parts:
        if p.n != 1:
            raise DimMismatchError(f"factor measures must be one-dimensional, got n={p.n}")
    n = len(parts)
    if any(len(p) == 0 for p in parts):
        return AtomicMeasure.zero(n)
    points, weights = [], []
    for combo in itertools.product(*(range(len(p)) for p in parts)):
        points.append([p.points[k, 0] for p, k in zip(parts, combo)])
        weights.append(math.prod(p.weights[k] for p, k in zip(parts, combo)))
    return AtomicMeasure(n, points, weights)


# --- JSON definition files -------------------------------------------------

_QALPHA_KEYS = {"kind", "n", "alpha", "gamma", "atoms"}
_RMINUS_KEYS = {"kind", "n", "lambda", "gamma", "atoms"}


def _number(v, name: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"field {name!r} must be a number, got {v!r}")
    return float(v)


def function_from_dict(spec: dict):
    """Parse a ``qalpha`` or ``rminus`` definition; unknown fields are rejected."""
    if not isinstance(spec, dict):
        raise ValueError("function definition must be a JSON object")
    kind = spec.get("kind")
    allowed = {"qalpha": _QALPHA_KEYS, "rminus": _RMINUS_KEYS}.get(kind)
    if allowed is None:
        raise ValueError(f"unknown function kind {kind!r}; expected 'qalpha' or 'rminus'")
    extra = set(spec) - allowed
    missing = allowed - set(spec)
    if extra:
        raise ValueError(f"unknown fields for {kind}: {sorted(extra)}")
    if missing:
        raise ValueError(f"missing fields for {kind}: {sorted(missing)}")
    n = spec["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValueError(f"field 'n' must be a positive integer, got {n!r}")
    if not isinstance(spec["atoms"], list):
        raise ValueError("field 'atoms' must be a list")
    atoms = []
    for a in spec["atoms"]:
        if not isinstance(a, dict) or set(a) != {"xi", "w"}:
            raise ValueError(f"each atom must be an object with exactly 'xi' and 'w', got {a!r}")
        if not isinstance(a["xi"], list):
            raise ValueError("atom 'xi' must be a list")
        atoms.append(([_number(v, "xi") for v in a["xi"]], _number(a["w"], "w")))
    measure = AtomicMeasure.from_atoms(n, atoms)
    gamma = _number(spec["gamma"], "gamma")
    if kind == "qalpha":
        return QAlphaFunction(_number(spec["alpha"], "alpha"), gamma, measure)
    return RMinusFunction(_number(spec["lambda"], "lambda"), gamma, measure)


def function_to_dict(F) -> dict:
    atoms = [{"xi": list(xi), "w": w} for xi, w in F.measure.atoms]
    if isinstance(F, QAlphaFunction):
        return {"kind": "qalpha", "n": F.n, "alpha": F.alpha, "gamma": F.gamma, "atoms": atoms}
    if isinstance(F, RMinusFunction):
        return {"kind": "rminus", "n": F.n, "lambda": F.lambda_, "gamma": F.gamma, "atoms": atoms}
    raise TypeError(f"cannot serialize {type(F).__name__}")


def load_function(path):
    """Read a function definition from a JSON file."""
    def reject(token):
        raise ValueError(f"non-finite number {token} in function definition")

    with Path(path).open() as fh:
        return function_from_dict(json.load(fh, parse_constant=reject))
