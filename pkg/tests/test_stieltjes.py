import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opmono.errors import (
    BranchCutError,
    DimMismatchError,
    DomainViolationError,
    NonPositiveDenominatorError,
    SingularAtomError,
)
from opmono.stieltjes import (
    AtomicMeasure,
    QAlphaFunction,
    RMinusFunction,
    function_from_dict,
    function_to_dict,
    load_function,
    power_function_repr,
    product_measure,
    q_alpha_eval,
    r_minus_eval,
    stieltjes_transform,
)


def random_measure(rng, n, atoms, spread=3.0):
    return AtomicMeasure(n, rng.uniform(0, spread, (atoms, n)), rng.uniform(0.1, 2.0, atoms))


class TestAtomicMeasure:
    def test_validation(self):
        with pytest.raises(ValueError):
            AtomicMeasure(2, [[-1.0, 0.0]], [1.0])
        with pytest.raises(ValueError):
            AtomicMeasure(2, [[1.0, 0.0]], [0.0])
        with pytest.raises(DimMismatchError):
            AtomicMeasure.from_atoms(2, [([1.0], 1.0)])

    def test_zero_measure(self):
        m = AtomicMeasure.zero(3)
        assert len(m) == 0 and m.total_mass == 0.0
        assert stieltjes_transform(m, [1.0, 2.0, 3.0], 0.5) == 0.0

    def test_atoms_roundtrip(self):
        m = AtomicMeasure.from_atoms(2, [((0.0, 1.0), 2.0), ((3.0, 0.5), 0.25)])
        assert m.atoms == [((0.0, 1.0), 2.0), ((3.0, 0.5), 0.25)]


class TestTransform:
    def test_dirac_at_origin(self):
        assert stieltjes_transform(AtomicMeasure.dirac([0.0, 0.0]), [1.0, 2.0], 1.0) == 0.5

    def test_half_power(self):
        m = AtomicMeasure.from_atoms(2, [((1.0, 1.0), 2.0)])
        assert stieltjes_transform(m, [1.0, 1.0], 0.5) == pytest.approx(1.0, rel=1e-15)

    def test_additive_over_atoms(self, rng):
        a, b = random_measure(rng, 2, 1), random_measure(rng, 2, 1)
        z = [0.7, 2.5]
        for alpha in (0.3, 1.0):
            total = stieltjes_transform(a + b, z, alpha)
            assert total == pytest.approx(stieltjes_transform(a, z, alpha) + stieltjes_transform(b, z, alpha), rel=1e-12)

    def test_hand_computed_two_atoms(self):
        m = AtomicMeasure.from_atoms(2, [((0.0, 0.0), 1.0), ((1.0, 2.0), 3.0)])
        # 1/(2*3)^0.5 + 3/((3)*(5))^0.5
        assert stieltjes_transform(m, [2.0, 3.0], 0.5) == pytest.approx(6**-0.5 + 3 * 15**-0.5, rel=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(
        c=st.floats(0.01, 100.0),
        alpha=st.floats(0.0, 1.0),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_linear_in_measure(self, c, alpha, seed):
        rng = np.random.default_rng(seed)
        a, b = random_measure(rng, 3, 2), random_measure(rng, 3, 3)
        z = rng.uniform(0.1, 5.0, 3)
        lhs = stieltjes_transform(a + b.scaled(c), z, alpha)
        rhs = stieltjes_transform(a, z, alpha) + c * stieltjes_transform(b, z, alpha)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_real_in_real_out(self, rng):
        m = random_measure(rng, 2, 3)
        assert isinstance(stieltjes_transform(m, [0.5, 0.5], 0.4), float)
        assert isinstance(stieltjes_transform(m, [0.5 + 1j, 0.5j], 0.4), complex)

    def test_singular_atom(self):
        with pytest.raises(SingularAtomError):
            stieltjes_transform(AtomicMeasure.dirac([0.0, 0.0]), [0.0, 1.0], 0.5)
        with pytest.raises(SingularAtomError):
            stieltjes_transform(AtomicMeasure.dirac([2.0]), [-2.0], 1.0)

    def test_branch_cut(self):
        m = AtomicMeasure.dirac([0.0, 0.0])
        with pytest.raises(BranchCutError):
            stieltjes_transform(m, [-2.0, 1.0], 0.5)
        with pytest.raises(BranchCutError):
            stieltjes_transform(m, [-2.0 + 0j, 1.0 + 0j], 0.5, grouping="factor")
        # integer powers are fine on the negative axis
        assert stieltjes_transform(m, [-2.0, 1.0], 1.0) == -0.5

    def test_product_grouping_uses_principal_branch_of_product(self):
        z = np.full(2, cmath.exp(0.75j * math.pi))
        m = AtomicMeasure.dirac([0.0, 0.0])
        # z1 z2 = -i; principal (-i)^(-1/2) = exp(i pi/4)
        assert stieltjes_transform(m, z, 0.5) == pytest.approx(cmath.exp(0.25j * math.pi), abs=1e-15)
        # per-factor branch: (exp(3 pi i/4))^(-1/2) squared = exp(-3 pi i/4)
        assert stieltjes_transform(m, z, 0.5, grouping="factor") == pytest.approx(cmath.exp(-0.75j * math.pi), abs=1e-15)

    def test_groupings_agree_on_positive_points(self, rng):
        m = random_measure(rng, 3, 4)
        for _ in range(20):
            z = rng.uniform(0.01, 10.0, 3)
            a = stieltjes_transform(m, z, 0.37)
            b = stieltjes_transform(m, z, 0.37, grouping="factor")
            assert a == pytest.approx(b, rel=1e-13)


class TestQAlpha:
    def test_product(self):
        assert q_alpha_eval(QAlphaFunction(1.0, 0.0, AtomicMeasure.dirac([0.0, 0.0])), [2.0, 3.0]) == pytest.approx(6.0, rel=1e-15)

    def test_geometric(self):
        assert q_alpha_eval(QAlphaFunction(0.5, 0.0, AtomicMeasure.dirac([0.0, 0.0])), [4.0, 9.0]) == pytest.approx(6.0, rel=1e-15)

    def test_constant(self, rng):
        F = QAlphaFunction(0.7, 2.0, AtomicMeasure.zero(2))
        for _ in range(5):
            assert q_alpha_eval(F, rng.uniform(0.1, 10.0, 2)) == 0.5

    def test_nonpositive_denominator(self):
        with pytest.raises(NonPositiveDenominatorError):
            q_alpha_eval(QAlphaFunction(1.0, -1.0, AtomicMeasure.zero(1)), [1.0])
        F = QAlphaFunction(1.0, -1.0, AtomicMeasure.dirac([0.0]))
        assert q_alpha_eval(F, [0.5]) == pytest.approx(1.0)  # 1/(-1 + 2)
        with pytest.raises(NonPositiveDenominatorError):
            q_alpha_eval(F, [2.0])  # -1 + 1/2 < 0

    def test_domain(self):
        F = QAlphaFunction(1.0, 0.0, AtomicMeasure.dirac([1.0, 1.0]))
        with pytest.raises(DomainViolationError):
            q_alpha_eval(F, [-0.5, 1.0])

    def test_rejects_negative_alpha(self):
        with pytest.raises(ValueError):
            QAlphaFunction(-0.1, 0.0, AtomicMeasure.zero(1))


class TestPowerRepr:
    @pytest.mark.parametrize(
        "n,alpha,x,want",
        [(2, 0.5, (4.0, 9.0), 6.0), (3, 1 / 3, (1.0, 8.0, 27.0), 6.0), (1, 1.0, (5.0,), 5.0)],
    )
    def test_examples(self, n, alpha, x, want):
        assert q_alpha_eval(power_function_repr(n, alpha), x) == pytest.approx(want, rel=1e-14)

    def test_structure(self):
        F = power_function_repr(3, 0.2)
        assert F.gamma == 0.0 and F.measure.atoms == [((0.0, 0.0, 0.0), 1.0)]

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_consistency(self, rng, n):
        for alpha in (0.0, 1 / n, 0.7, 1.0):
            F = power_function_repr(n, alpha)
            for _ in range(100):
                x = rng.uniform(0.1, 10.0, n)
                assert q_alpha_eval(F, x) == pytest.approx(np.prod(x**alpha), rel=1e-12)


class TestRMinus:
    def test_bilinear(self):
        P = RMinusFunction(1.0, 0.0, AtomicMeasure.dirac([0.0, 0.0]))
        assert r_minus_eval(P, [-1.0, -2.0]) == pytest.approx(-1.0, abs=1e-15)

    def test_constant(self, rng):
        P = RMinusFunction(1.0, 1.0, AtomicMeasure.zero(2))
        assert r_minus_eval(P, -rng.uniform(0, 5, 2)) == 0.0

    def test_single_atom(self):
        P = RMinusFunction(2.0, 0.0, AtomicMeasure.from_atoms(2, [((1.0, 1.0), 1.0)]))
        assert r_minus_eval(P, [0.0, 0.0]) == pytest.approx(1.0, abs=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            RMinusFunction(0.0, 0.0, AtomicMeasure.zero(1))
        with pytest.raises(ValueError):
            RMinusFunction(1.0, -0.5, AtomicMeasure.zero(1))

    def test_domain(self):
        P = RMinusFunction(1.0, 0.0, AtomicMeasure.dirac([1.0]))
        with pytest.raises(DomainViolationError):
            r_minus_eval(P, [0.5])

    def test_zero_denominator(self):
        P = RMinusFunction(1.0, 0.0, AtomicMeasure.zero(2))
        with pytest.raises(NonPositiveDenominatorError):
            r_minus_eval(P, [-1.0, -1.0])

    def test_complex_matches_real(self, rng):
        P = RMinusFunction(1.5, 0.3, random_measure(rng, 2, 3))
        for _ in range(10):
            w = -rng.uniform(0.01, 10, 2)
            assert P.complex_eval(w.astype(complex)) == pytest.approx(r_minus_eval(P, w), abs=1e-10)


class TestProductMeasure:
    def test_diracs(self):
        m = product_measure([AtomicMeasure.dirac([0.0]), AtomicMeasure.dirac([0.0])])
        assert m.atoms == [((0.0, 0.0), 1.0)]

    def test_weights_multiply(self):
        m = product_measure([AtomicMeasure.dirac([1.0], 2.0), AtomicMeasure.dirac([3.0], 5.0)])
        assert m.atoms == [((1.0, 3.0), 10.0)]

    def test_factorizes(self, rng):
        parts = [random_measure(rng, 1, 2), random_measure(rng, 1, 3)]
        m = product_measure(parts)
        assert len(m) == 6
        for alpha in (0.2, 0.5, 1.0):
            for _ in range(10):
                z = rng.uniform(0.05, 5.0, 2)
                direct = stieltjes_transform(parts[0], z[:1], alpha) * stieltjes_transform(parts[1], z[1:], alpha)
                assert stieltjes_transform(m, z, alpha) == pytest.approx(direct, rel=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatchError):
            product_measure([AtomicMeasure.dirac([0.0, 0.0])])


class TestPickImage:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_upper_half_plane_image(self, n):
        rng = np.random.default_rng(n)
        for _ in range(20):
            alpha = rng.uniform(0, 1 / n)
            F = QAlphaFunction(alpha, rng.uniform(-1.0, 2.0), random_measure(rng, n, int(rng.integers(1, 5))))
            for _ in range(50):
                z = rng.uniform(-5, 5, n) + 1j * rng.uniform(0.01, 5, n)
                assert F.complex_eval(z).imag >= -1e-10

    def test_product_grouping_would_break_it(self):
        # the principal branch of the product is not holomorphic on the polydisc of half-planes
        F = power_function_repr(2, 0.5)
        z = np.full(2, cmath.exp(0.75j * math.pi))
        product_value = 1.0 / stieltjes_transform(F.measure, z, 0.5)
        assert product_value.imag < 0
        assert F.complex_eval(z).imag > 0

    def test_complex_matches_real(self, rng):
        F = QAlphaFunction(0.3, 0.4, random_measure(rng, 3, 4))
        for _ in range(10):
            x = rng.uniform(0.1, 10, 3)
            assert F.complex_eval(x.astype(complex)) == pytest.approx(q_alpha_eval(F, x), abs=1e-10)


class TestJson:
    def test_roundtrip(self, rng):
        for F in (
            QAlphaFunction(0.5, 0.25, random_measure(rng, 2, 3)),
            RMinusFunction(1.0, 0.0, random_measure(rng, 3, 2)),
        ):
            G = function_from_dict(json.loads(json.dumps(function_to_dict(F))))
            assert type(G) is type(F)
            assert function_to_dict(G) == function_to_dict(F)

    def test_documented_examples(self):
        q = function_from_dict({"kind": "qalpha", "n": 2, "alpha": 0.5, "gamma": 0.0, "atoms": [{"xi": [0.0, 0.0], "w": 1.0}]})
        assert q_alpha_eval(q, [4.0, 9.0]) == pytest.approx(6.0)
        r = function_from_dict({"kind": "rminus", "n": 2, "lambda": 1.0, "gamma": 0.0, "atoms": [{"xi": [0.0, 0.0], "w": 1.0}]})
        assert r_minus_eval(r, [-1.0, -2.0]) == pytest.approx(-1.0)

    @pytest.mark.parametrize(
        "spec",
        [
            {"kind": "qalpha", "n": 1, "alpha": 1.0, "gamma": 0.0, "atoms": [], "extra": 1},
            {"kind": "qalpha", "n": 1, "alpha": 1.0, "atoms": []},
            {"kind": "other", "n": 1},
            {"kind": "rminus", "n": 1, "lambda": 1.0, "gamma": 0.0, "atoms": [{"xi": [0.0], "w": 1.0, "tag": 1}]},
            {"kind": "rminus", "n": 2, "lambda": 1.0, "gamma": 0.0, "atoms": [{"xi": [0.0], "w": 1.0}]},
            {"kind": "qalpha", "n": 1, "alpha": "1", "gamma": 0.0, "atoms": []},
            {"kind": "qalpha", "n": 1.5, "alpha": 1.0, "gamma": 0.0, "atoms": []},
        ],
    )
    def test_rejects_malformed(self, spec):
        with pytest.raises(ValueError):
            function_from_dict(spec)

    def test_load_file(self, tmp_path):
        path = tmp_path / "f.json"
        path.write_text('{"kind":"qalpha","n":1,"alpha":1,"gamma":0,"atoms":[{"xi":[2],"w":3}]}')
        F = load_function(path)
        assert F.measure.atoms == [((2.0,), 3.0)]
        path.write_text('{"kind":"qalpha","n":1,"alpha":NaN,"gamma":0,"atoms":[]}')
        with pytest.raises(ValueError):
            load_function(path)
