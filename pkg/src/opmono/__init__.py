"""Operator-monotone functions of commuting symmetric matrices.

Joint spectral calculus, multivariate generalized Stieltjes representations
and randomized monotonicity checks on finite-dimensional tuples.
"""

from .calculus import ScalarField, apply_function, frac_power_eigen, inv_frac_power_integral
from .linalg import (
    CommutingTuple,
    DominatingPair,
    JointSpectralDecomposition,
    SpectralDecomposition,
    joint_diagonalize,
    loewner_leq,
    sample_commuting_tuple,
    sample_dominating_pair,
    sym_eig,
)
from .monotonicity import (
    FunctionUnderTest,
    MonotonicityReport,
    TrialConfig,
    check_pair,
    counterexample_search,
    pick_check,
    run_trials,
)
from .representation import lemma1_rhs, verify_lemma1
from .stieltjes import (
    AtomicMeasure,
    QAlphaFunction,
    RMinusFunction,
    power_function_repr,
    product_measure,
    q_alpha_eval,
    r_minus_eval,
    stieltjes_transform,
)

__version__ = "0.1.0"
