"""Randomized checks of operator monotonicity for functions of commuting tuples.

A function ``f`` of ``n`` variables is tested on pairs of commuting tuples
``A <= B`` (coordinatewise Loewner order) by computing the scaled margin
``lambda_min(f(B) - f(A))``. Pairs are drawn either with all ``2n``
matrices commuting (``cross``) or with commutation only inside each tuple
(``tuple``). A complementary necessary condition is checked by sampling the
holomorphic extension of ``f`` on the product of upper half-planes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .calculus import apply_function
from .errors import DomainViolationError, MissingComplexExtensionError, OpMonoError
from .linalg import (
    JACOBI_TOL,
    REGIMES,
    CommutingTuple,
    DominatingPair,
    joint_diagonalize,
    lambda_min,
    sample_dominating_pair,
)
from .stieltjes import (
    AtomicMeasure,
    QAlphaFunction,
    function_to_dict,
    RMinusFunction,
    power_function_repr,
    product_measure,
)

PASS_EPS = 1e-9
VIOLATION_FLOOR = 1e-6
PICK_TOL = 1e-10
TIGHT_JACOBI_TOL = 1e-15

POSITIVE_BOX = (0.1, 10.0)
NEGATIVE_BOX = (-10.0, -0.01)
DOMAINS = ("positive", "nonpositive")


@dataclass(frozen=True)
class FunctionUnderTest:
    """A named function with its trial domain and optional holomorphic extension.

    ``domain`` is ``"positive"`` for ``(0, inf)^n`` and ``"nonpositive"`` for
    ``(-inf, 0]^n``. ``params`` is echoed into reports.
    """

    name: str
    arity: int
    real_eval: Callable[[np.ndarray], float]
    complex_eval: Callable[[np.ndarray], complex] | None = None
    source: QAlphaFunction | RMinusFunction | None = None
    domain: str = "positive"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ValueError(f"domain must be one of {DOMAINS}")

    def __call__(self, x) -> float:
        return float(self.real_eval(np.asarray(x, dtype=np.float64)))

    def contains(self, points: np.ndarray) -> bool:
        if self.domain == "positive":
            return bool(np.all(points > 0))
        return bool(np.all(points <= 0))

    @property
    def default_box(self) -> tuple[float, float]:
        return POSITIVE_BOX if self.domain == "positive" else NEGATIVE_BOX


# --- registry ---------------------------------------------------------------


def power(n: int, alpha: float) -> FunctionUnderTest:
    """``(z_1 ... z_n)**alpha`` on ``(0, inf)^n``."""
    F = power_function_repr(n, alpha)
    return FunctionUnderTest(
        name="power",
        arity=n,
        real_eval=F,
        complex_eval=F.complex_eval,
        source=F,
        params={"n": n, "alpha": float(alpha)},
    )


def qalpha(F: QAlphaFunction, name: str = "qalpha") -> FunctionUnderTest:
    return FunctionUnderTest(name, F.n, F, F.complex_eval, F, "positive", function_to_dict(F))


def rminus(P: RMinusFunction, name: str = "rminus") -> FunctionUnderTest:
    return FunctionUnderTest(name, P.n, P, P.complex_eval, P, "nonpositive", function_to_dict(P))


def bilinear(lambda_: float = 1.0) -> FunctionUnderTest:
    """``lambda - z_1 z_2`` on ``(-inf, 0]^2``; equals the R^-_2 function with tau = delta_0, gamma = 0."""
    P = RMinusFunction(lambda_, 0.0, AtomicMeasure.dirac([0.0, 0.0]))
    return FunctionUnderTest(
        name="bilinear",
        arity=2,
        real_eval=lambda s: lambda_ - s[0] * s[1],
        complex_eval=lambda z: lambda_ - complex(z[0]) * complex(z[1]),
        source=P,
        domain="nonpositive",
        params={"lambda": float(lambda_)},
    )


def polyproduct(coeffs, alphas) -> FunctionUnderTest:
    """``sum_j c_j (z_1 ... z_j)**alpha_j`` on ``(0, inf)^n`` with ``n = len(coeffs)``."""
    coeffs = [float(c) for c in coeffs]
    alphas = [float(a) for a in alphas]
    if len(coeffs) != len(alphas) or not coeffs:
        raise ValueError("coeffs and alphas must be non-empty and of equal length")
    if any(c < 0 for c in coeffs) or any(a < 0 for a in alphas):
        raise ValueError("coefficients and exponents must be >= 0")
    n = len(coeffs)

    def real_eval(s):
        prefix = np.cumprod(s)
        return float(sum(c * prefix[j] ** a for j, (c, a) in enumerate(zip(coeffs, alphas))))

    def complex_eval(z):
        total = 0j
        for j, (c, a) in enumerate(zip(coeffs, alphas)):
            term = complex(c)
            for zi in z[: j + 1]:
                term *= complex(zi) ** a
            total += term
        return total

    return FunctionUnderTest(
        name="polyproduct",
        arity=n,
        real_eval=real_eval,
        complex_eval=complex_eval,
        params={"coeffs": coeffs, "alphas": alphas},
    )


def product_qalpha(parts, alpha: float, gamma: float = 0.0) -> FunctionUnderTest:
    """``1/(gamma + prod_j f_j(z_j))`` with ``f_j`` the 1-D transform of ``parts[j]``."""
    return qalpha(QAlphaFunction(alpha, gamma, product_measure(parts)), name="product")


# --- reports ----------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """A pair violating monotonicity, reproducible from ``seed``."""

    seed: int
    index: int
    n: int
    d: int
    matrices_a: list
    matrices_b: list
    margin: float

    @classmethod
    def from_pair(cls, seed: int, index: int, P: DominatingPair, margin: float) -> Witness:
        return cls(
            seed=int(seed),
            index=int(index),
            n=P.n,
            d=P.dim,
            matrices_a=[m.tolist() for m in P.A.matrices],
            matrices_b=[m.tolist() for m in P.B.matrices],
            margin=float(margin),
        )

    def pair(self, regime: str = "tuple") -> DominatingPair:
        A = CommutingTuple(tuple(np.array(m) for m in self.matrices_a))
        B = CommutingTuple(tuple(np.array(m) for m in self.matrices_b))
        return DominatingPair(A, B, regime)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MonotonicityReport:
    function: str
    regime: str
    trials: int = 0
    violations: int = 0
    inconclusive: int = 0
    worst_margin: float | None = None
    witness: Witness | None = None
    config: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.inconclusive == 0

    def merge(self, other: MonotonicityReport) -> MonotonicityReport:
        """Combine reports over disjoint trial sets; order-independent."""
        if (self.function, self.regime) != (other.function, other.regime):
            raise ValueError("can only merge reports of the same function and regime")
        margins = [m for m in (self.worst_margin, other.worst_margin) if m is not None]
        witnesses = [w for w in (self.witness, other.witness) if w is not None]
        witness = min(witnesses, key=lambda w: (w.margin, w.index)) if witnesses else None
        return MonotonicityReport(
            self.function,
            self.regime,
            self.trials + other.trials,
            self.violations + other.violations,
            self.inconclusive + other.inconclusive,
            min(margins) if margins else None,
            witness,
            self.config,
        )

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "regime": self.regime,
            "trials": self.trials,
            "violations": self.violations,
            "inconclusive": self.inconclusive,
            "worst_margin": self.worst_margin,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "config": self.config,
        }


@dataclass(frozen=True)
class TrialConfig:
    """Sampling and tolerance settings for trial runs.

    ``dims`` cycles with the trial index; ``box`` defaults to the function's
    domain box when left as ``None``.
    """

    n: int | None = None
    dims: tuple[int, ...] = (2, 3, 4, 5)
    box: tuple[float, float] | None = None
    gap_box: tuple[float, float] = (0.0, 1.0)
    seed: int = 0
    eps: float = PASS_EPS
    floor: float = VIOLATION_FLOOR

    def resolve(self, f: FunctionUnderTest) -> TrialConfig:
        n = f.arity if self.n is None else self.n
        if n != f.arity:
            raise ValueError(f"config arity {n} does not match function arity {f.arity}")
        if isinstance(self.dims, int):
            dims = (self.dims,)
        else:
            dims = tuple(int(d) for d in self.dims)
        if not dims or min(dims) < 1:
            raise ValueError("dims must be positive integers")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        box = f.default_box if self.box is None else tuple(float(b) for b in self.box)
        return TrialConfig(n, dims, box, tuple(float(g) for g in self.gap_box), int(self.seed), self.eps, self.floor)

    def echo(self) -> dict:
        return {
            "n": self.n,
            "dims": list(self.dims),
            "box": list(self.box) if self.box is not None else None,
            "gap_box": list(self.gap_box),
            "seed": self.seed,
            "eps": self.eps,
            "floor": self.floor,
        }


def derive_seed(seed: int, index: int) -> int:
    """64-bit seed for trial `index` of a run with master `seed`."""
    lo, hi = np.random.SeedSequence([int(seed), int(index)]).generate_state(2, np.uint32)
    return int(hi) << 32 | int(lo)


# --- checks -----------------------------------------------------------------


def check_pair(f: FunctionUnderTest, P: DominatingPair, tight: bool = False) -> float:
    """Scaled margin ``lambda_min(f(B) - f(A)) / max(1, ||f(A)||_F, ||f(B)||_F)``.

    With ``tight=True`` eigen-solves use a stricter stopping threshold and the
    joint diagonalizations draw different combination coefficients.

    Raises
    ------
    DomainViolationError
        A joint spectrum leaves the declared domain of `f`, or `f` cannot be
        evaluated there.
    """
    tol = TIGHT_JACOBI_TOL if tight else JACOBI_TOL
    jd_seed = 1 if tight else 0
    values = []
    for T in (P.A, P.B):
        J = joint_diagonalize(T, seed=jd_seed, eig_tol=tol)
        if not f.contains(J.spectrum):
            raise DomainViolationError(f"joint spectrum leaves the {f.domain} domain of {f.name}")
        try:
            values.append(apply_function(J, f))
        except OpMonoError as exc:
            if isinstance(exc, DomainViolationError):
                raise
            raise DomainViolationError(f"{f.name} cannot be evaluated on the joint spectrum: {exc}") from exc
    fA, fB = values
    scale = max(1.0, float(np.linalg.norm(fA)), float(np.linalg.norm(fB)))
    return lambda_min(fB - fA, tol=tol) / scale


def classify(margin: float, eps: float = PASS_EPS, floor: float = VIOLATION_FLOOR) -> str:
    """``"pass"`` if ``margin >= -eps``, ``"violation"`` below ``-floor``, else ``"inconclusive"``."""
    if margin >= -eps:
        return "pass"
    if margin < -floor:
        return "violation"
    return "inconclusive"


def _trial(f: FunctionUnderTest, regime: str, cfg: TrialConfig, index: int):
    seed = derive_seed(cfg.seed, index)
    d = cfg.dims[index % len(cfg.dims)]
    P = sample_dominating_pair(regime, cfg.n, d, cfg.box, cfg.gap_box, seed)
    margin = check_pair(f, P)
    verdict = classify(margin, cfg.eps, cfg.floor)
    if verdict == "inconclusive":
        margin = check_pair(f, P, tight=True)
        verdict = classify(margin, cfg.eps, cfg.floor)
    return seed, P, margin, verdict


def run_trials(f: FunctionUnderTest, regime: str, trials: int, cfg: TrialConfig | None = None) -> MonotonicityReport:
    """Check `trials` sampled pairs and aggregate the outcomes.

    Trial ``k`` samples its pair from ``derive_seed(cfg.seed, k)`` with
    dimension ``cfg.dims[k % len(cfg.dims)]``, so the report is a pure
    function of the arguments. Margins between ``-floor`` and ``-eps`` are
    re-checked with tighter eigen-solver settings; if they stay there they
    are counted as inconclusive. The witness is the most negative violating
    pair.
    """
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")
    if trials < 0:
        raise ValueError("trials must be >= 0")
    cfg = (cfg or TrialConfig()).resolve(f)
    violations = inconclusive = 0
    worst = None
    witness = None
    for k in range(trials):
        seed, P, margin, verdict = _trial(f, regime, cfg, k)
        worst = margin if worst is None else min(worst, margin)
        if verdict == "inconclusive":
            inconclusive += 1
        elif verdict == "violation":
            violations += 1
            if witness is None or margin < witness.margin:
                witness = Witness.from_pair(seed, k, P, margin)
    config = {"function": {"name": f.name, **f.params}, "regime": regime, "trials": trials, **cfg.echo()}
    return MonotonicityReport(f.name, regime, trials, violations, inconclusive, worst, witness, config)


def counterexample_search(
    f: FunctionUnderTest,
    regime: str,
    budget: int,
    cfg: TrialConfig | None = None,
    start: int = 0,
) -> Witness | None:
    """First pair with margin below ``-cfg.floor`` among trials ``start .. start+budget-1``.

    Pairs are generated exactly as in :func:`run_trials`; resuming with
    ``start = witness.index + 1`` continues the same sequence.
    """
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")
    cfg = (cfg or TrialConfig()).resolve(f)
    for k in range(start, start + budget):
        seed = derive_seed(cfg.seed, k)
        d = cfg.dims[k % len(cfg.dims)]
        P = sample_dominating_pair(regime, cfg.n, d, cfg.box, cfg.gap_box, seed)
        margin = check_pair(f, P)
        if margin < -cfg.floor:
            return Witness.from_pair(seed, k, P, margin)
    return None


# --- upper half-plane condition ---------------------------------------------


@dataclass(frozen=True)
class PickViolation:
    z: tuple[complex, ...]
    imag: float

    def to_dict(self) -> dict:
        return {"z": [[c.real, c.imag] for c in self.z], "imag": self.imag}


def pick_probes(n: int) -> list[np.ndarray]:
    """Fixed probe points prepended to every sample: ``z_j = exp(3 pi i / 4)``."""
    return [np.full(n, cmath.exp(0.75j * math.pi))]


def pick_check(f: FunctionUnderTest, samples: int, seed: int = 0, tol: float = PICK_TOL) -> list[PickViolation]:
    """Sample the extension of `f` on the product of upper half-planes.

    Points are the fixed probes followed by `samples` draws with
    ``Re z_j ~ U(-5, 5)`` and ``Im z_j ~ U(0.01, 5)``. A point is a violation
    when ``Im f(z) < -tol``. Points where the extension cannot be evaluated
    are skipped.
    """
    if f.complex_eval is None:
        raise MissingComplexExtensionError(f"{f.name} has no holomorphic extension")
    if samples < 0:
        raise ValueError("samples must be >= 0")
    rng = np.random.default_rng(seed)
    re = rng.uniform(-5.0, 5.0, size=(samples, f.arity))
    im = rng.uniform(0.01, 5.0, size=(samples, f.arity))
    points = pick_probes(f.arity) + list(re + 1j * im)
    found = []
    for z in points:
        try:
            value = complex(f.complex_eval(z))
        except OpMonoError:
            continue
        if value.imag < -tol:
            found.append(PickViolation(tuple(complex(c) for c in z), value.imag))
    return found
