import random
from fractions import Fraction

import numpy as np
import pytest

from diraclab._numeric import FlowConfig
from diraclab.errors import DegreeError, PreconditionError, ShapeError
from diraclab.fields import (
    Chart,
    PolyKForm,
    PolyKVector,
    PolyScalar,
    coordinate_vector,
    differential,
    vector_bracket,
)
from diraclab.poisson import (
    LieAlgebroidData,
    PoissonBivector,
    TimePolyForm,
    algebroid_to_linear_poisson,
    bracket,
    euler_linearize,
    extract_structure_constants,
    from_components,
    gauge_matrix_at,
    hamiltonian_vf,
    is_poisson,
    jacobiator,
    leaf_data_at_point,
    lie_poisson,
    linear_poisson_to_algebroid,
    moser_verify,
    so3_constants,
    standard_symplectic_poisson,
    structure_jacobi_defect,
)

from conftest import random_poly, random_vector


def jac_oracle(pi, f, g, h):
    """Independent route: Jac(f,g,h) by nested brackets."""
    return (
        bracket(pi, f, bracket(pi, g, h))
        + bracket(pi, g, bracket(pi, h, f))
        + bracket(pi, h, bracket(pi, f, g))
    )


def nonpoisson_r3():
    """pi = z dx^dy + x dy^dz + x dz^dx on R^3."""
    chart = Chart(3, ("x", "y", "z"))
    x, y, z = chart.coordinates()
    return from_components(chart, {(0, 1): z, (1, 2): x, (2, 0): x})


class TestBracket:
    def test_phase_space(self):
        pi = standard_symplectic_poisson(1)
        q, p = pi.chart.coordinates()
        assert bracket(pi, q, p) == PolyScalar.constant(pi.chart, 1)

    def test_antisymmetry_diag(self, rng):
        pi = nonpoisson_r3()
        for _ in range(5):
            f = random_poly(rng, pi.chart)
            assert bracket(pi, f, f).is_zero()

    def test_so3_lie_poisson(self):
        pi = lie_poisson(so3_constants(), 3)
        m1, m2, m3 = pi.chart.coordinates()
        assert bracket(pi, m1, m2) == m3
        assert bracket(pi, m2, m3) == m1

    def test_leibniz(self, rng):
        pi = nonpoisson_r3()
        for _ in range(10):
            f, g, h = (random_poly(rng, pi.chart, 2) for _ in range(3))
            assert bracket(pi, f, g * h) == bracket(pi, f, g) * h + g * bracket(pi, f, h)


class TestJacobiator:
    def test_constant_is_poisson(self):
        for n in (1, 2, 3):
            assert jacobiator(standard_symplectic_poisson(n)).is_zero()

    def test_dim2_always_poisson(self, rng):
        chart = Chart(2)
        for _ in range(10):
            pi = PoissonBivector(random_vector(rng, chart, degree=2))
            assert is_poisson(pi)

    def test_r3_example_component(self):
        pi = nonpoisson_r3()
        z = pi.chart.coordinate(2)
        J = jacobiator(pi)
        assert J.components == {(0, 1, 2): -z}
        assert not is_poisson(pi)

    def test_matches_nested_bracket_oracle(self, rng):
        pi = nonpoisson_r3()
        x, y, z = pi.chart.coordinates()
        assert jac_oracle(pi, x, y, z) == -z
        for _ in range(5):
            chart = Chart(3)
            pib = PoissonBivector(random_vector(rng, chart, degree=2, max_degree=2))
            J = jacobiator(pib)
            coords = chart.coordinates()
            for (i, j, k) in [(0, 1, 2)]:
                assert J.component((i, j, k)) == jac_oracle(
                    pib, coords[i], coords[j], coords[k]
                )

    def test_oracle_antisymmetry(self, rng):
        pi = nonpoisson_r3()
        f, g, h = (random_poly(rng, pi.chart, 2) for _ in range(3))
        assert jac_oracle(pi, f, g, h) == -jac_oracle(pi, g, f, h)
        assert jac_oracle(pi, f, g, h) == jac_oracle(pi, g, h, f)


class TestHamiltonian:
    def test_standard(self):
        pi = standard_symplectic_poisson(1)
        q, p = pi.chart.coordinates()
        # oracle: bracket with coordinates
        Xq = hamiltonian_vf(pi, q)
        assert Xq == coordinate_vector(pi.chart, 1)
        assert bracket(pi, q, q) == PolyScalar.zero(pi.chart)
        assert bracket(pi, q, p) == PolyScalar.constant(pi.chart, 1)

    def test_constant_hamiltonian(self):
        pi = standard_symplectic_poisson(2)
        f = PolyScalar.constant(pi.chart, 7)
        assert hamiltonian_vf(pi, f).is_zero()

    def test_bracket_homomorphism(self, rng):
        pi = lie_poisson(so3_constants(), 3)
        for _ in range(8):
            f = random_poly(rng, pi.chart, 2)
            g = random_poly(rng, pi.chart, 2)
            lhs = vector_bracket(hamiltonian_vf(pi, f), hamiltonian_vf(pi, g))
            rhs = hamiltonian_vf(pi, bracket(pi, f, g))
            assert lhs == rhs

    def test_xf_applies_as_bracket(self, rng):
        pi = standard_symplectic_poisson(2)
        from diraclab.fields import apply_vector

        f = random_poly(rng, pi.chart, 2)
        g = random_poly(rng, pi.chart, 2)
        assert apply_vector(hamiltonian_vf(pi, f), g) == bracket(pi, f, g)


class TestLiePoisson:
    def test_so3_formula(self):
        pi = lie_poisson(so3_constants(), 3)
        m1, m2, m3 = pi.chart.coordinates()
        assert pi.pi.components == {(0, 1): m3, (1, 2): m1, (0, 2): -m2}
        assert is_poisson(pi)

    def test_abelian(self):
        assert lie_poisson({}, 3).pi.is_zero()

    def test_two_dim_algebra(self):
        pi = lie_poisson({(0, 1, 0): Fraction(1)}, 2)
        x = pi.chart.coordinate(0)
        assert pi.pi.components == {(0, 1): x}

    def test_poisson_iff_jacobi(self):
        broken = so3_constants()
        broken[(0, 1, 0)] = Fraction(1)  # [e1,e2] = e3 + e1 breaks Jacobi
        assert structure_jacobi_defect(broken, 3) is not None
        assert not is_poisson(lie_poisson(broken, 3))
        assert structure_jacobi_defect(so3_constants(), 3) is None

    def test_extract_round_trip(self):
        from diraclab.poisson import normalize_structure_constants

        c = so3_constants()
        pi = lie_poisson(c, 3)
        got = normalize_structure_constants(extract_structure_constants(pi), 3)
        assert got == normalize_structure_constants(c, 3)
        assert lie_poisson(got, 3, chart=pi.chart).pi == pi.pi

    def test_rejects_symmetric(self):
        with pytest.raises(ShapeError):
            lie_poisson({(0, 0, 1): Fraction(1)}, 2)


class TestAlgebroidDictionary:
    def tangent_algebroid_1d(self):
        base = Chart(1, ("x",))
        return LieAlgebroidData(base, 1, (coordinate_vector(base, 0),), {})

    def test_tangent_bundle_case(self):
        pi = algebroid_to_linear_poisson(self.tangent_algebroid_1d())
        # pi = d/dy ^ d/dx = -(d/dx ^ d/dy)
        assert pi.pi.components == {(0, 1): PolyScalar.constant(pi.chart, -1)}
        assert is_poisson(pi)

    def test_zero_anchor_reduces_to_lie_poisson(self):
        base = Chart(0, ())
        zero = PolyKVector(base, 1, {})
        A = LieAlgebroidData(
            base, 3, (zero,) * 3,
            {k: PolyScalar.constant(base, v) for k, v in so3_constants().items()},
        )
        pi = algebroid_to_linear_poisson(A)
        ref = lie_poisson(so3_constants(), 3, chart=pi.chart)
        assert pi.pi == ref.pi

    def test_round_trip_random(self, rng):
        base = Chart(2)
        for _ in range(10):
            rank = rng.randint(1, 3)
            anchors = tuple(random_vector(rng, base, max_degree=2) for _ in range(rank))
            constants = {}
            for i in range(rank):
                for j in range(i + 1, rank):
                    for k in range(rank):
                        if rng.random() < 0.5:
                            constants[(i, j, k)] = random_poly(rng, base, 1)
            A = LieAlgebroidData(base, rank, anchors, constants)
            pi = algebroid_to_linear_poisson(A)
            B = linear_poisson_to_algebroid(pi, base.dim)
            assert B.anchors == A.anchors
            assert B.constants == A.constants

    def test_broken_constants_fail_jacobi(self):
        base = Chart(0, ())
        zero = PolyKVector(base, 1, {})
        broken = so3_constants()
        broken[(0, 1, 0)] = Fraction(1)
        A = LieAlgebroidData(
            base, 3, (zero,) * 3,
            {k: PolyScalar.constant(base, v) for k, v in broken.items()},
        )
        assert not is_poisson(algebroid_to_linear_poisson(A))

    def test_split_extraction_example(self):
        # pi = x d/dx ^ d/dy with split 1|1: rank-1 data, anchor -x d/dx
        chart = Chart(2, ("x", "y"))
        x = chart.coordinate(0)
        pi = from_components(chart, {(0, 1): x})
        A = linear_poisson_to_algebroid(pi, 1)
        assert A.rank == 1 and A.constants == {}
        assert A.anchors[0].components == {(0,): -A.base.coordinate(0)}

    def test_so3_split_0_3(self):
        from diraclab.poisson import normalize_structure_constants

        pi = lie_poisson(so3_constants(), 3)
        A = linear_poisson_to_algebroid(pi, 0)
        got = {k: v.terms[()] for k, v in A.constants.items()}
        assert got == normalize_structure_constants(so3_constants(), 3)

    def test_nonlinear_rejected_with_components(self):
        chart = Chart(2, ("x", "y"))
        y = chart.coordinate(1)
        pi = from_components(chart, {(0, 1): y * y})
        with pytest.raises(DegreeError) as e:
            linear_poisson_to_algebroid(pi, 1)
        assert "(1, 2" in str(e.value)

    def test_fiber_homogeneity(self):
        A = self.tangent_algebroid_1d()
        pi = algebroid_to_linear_poisson(A)
        m = A.base.dim
        for (i, j), p in pi.pi.components.items():
            want = (1 if i >= m else 0) + (1 if j >= m else 0) - 1
            degs = {sum(e[m:]) for e in p.terms}
            assert degs == {want}


class TestLeafData:
    def test_symplectic_full_rank(self):
        pi = standard_symplectic_poisson(2)
        leaf = leaf_data_at_point(pi, (0.3, -1.0, 2.0, 0.7))
        assert leaf.rank == 4
        P = pi.matrix_at(leaf.point)
        piS = leaf.basis.T @ P @ leaf.basis
        assert np.abs(leaf.omega @ (-piS) - np.eye(4)).max() < 1e-10

    def test_so3_origin_rank_zero(self):
        pi = lie_poisson(so3_constants(), 3)
        assert leaf_data_at_point(pi, (0.0, 0.0, 0.0)).rank == 0

    def test_so3_sphere_leaf(self):
        pi = lie_poisson(so3_constants(), 3)
        leaf = leaf_data_at_point(pi, (0.0, 0.0, 1.0))
        assert leaf.rank == 2
        # leaf tangent lies in span(d/dmu1, d/dmu2)
        assert np.abs(leaf.basis[2, :]).max() < 1e-12
        piS = leaf.basis.T @ pi.matrix_at((0.0, 0.0, 1.0)) @ leaf.basis
        assert np.abs(leaf.omega @ (-piS) - np.eye(2)).max() < 1e-10


class TestGaugePointwise:
    def test_constant_closed_form(self):
        pi = from_components(
            Chart(2, ("x", "y")), {(0, 1): PolyScalar.constant(Chart(2, ("x", "y")), 1)}
        )
        P = pi.matrix_at((0.0, 0.0))
        for c in (0.25, -1.0, 0.9):
            W = np.array([[0.0, c], [-c, 0.0]])
            got = gauge_matrix_at(P, W)
            assert np.abs(got - P / (1 - c)).max() < 1e-12

    def test_degenerate_raises(self):
        from diraclab.errors import TransversalityError

        P = np.array([[0.0, 1.0], [-1.0, 0.0]])
        W = np.array([[0.0, 1.0], [-1.0, 0.0]])
        with pytest.raises(TransversalityError):
            gauge_matrix_at(P, W, point=(0.0, 0.0))


class TestMoser:
    def chart(self):
        return Chart(2, ("x", "y"))

    def pi0(self):
        chart = self.chart()
        return from_components(chart, {(0, 1): PolyScalar.constant(chart, 1)})

    def grid(self):
        vals = [-0.4, 0.0, 0.5]
        return [(a, b) for a in vals for b in vals]

    def test_zero_family_identity(self):
        chart = self.chart()
        a = TimePolyForm({0: PolyKForm(chart, 1, {})})
        rep = moser_verify(self.pi0(), a, [0.5], self.grid())
        assert rep.max_residual < 1e-14

    def test_constant_gauge_example(self):
        # a_t = -x dy, so omega_t = t dx^dy and pi_t = (1-t)^{-1} pi_0
        chart = self.chart()
        x = chart.coordinate(0)
        a = TimePolyForm({0: PolyKForm(chart, 1, {(1,): -x})})
        rep = moser_verify(self.pi0(), a, [0.5, -0.5, 0.25], self.grid(),
                           FlowConfig(step=1e-3))
        assert rep.max_residual < 1e-6

    def test_exact_hamiltonian_case(self):
        # a_t = df: the gauge family is trivial and the flow is Hamiltonian
        chart = self.chart()
        x, y = chart.coordinates()
        f = x * x * y
        a = TimePolyForm({0: differential(f)})
        rep = moser_verify(self.pi0(), a, [0.5], self.grid(), FlowConfig(step=1e-3))
        assert rep.max_residual < 1e-8


class TestEulerLinearize:
    def euler_plus(self, extra):
        chart = Chart(2, ("x", "y"))
        x, y = chart.coordinates()
        comps = {(0,): x, (1,): y}
        for idx, p in extra.items():
            comps[idx] = comps.get(idx, PolyScalar.zero(chart)) + p
        return PolyKVector(chart, 1, comps)

    def ball_samples(self, r=0.3, k=12):
        rng = random.Random(7)
        out = []
        while len(out) < k:
            p = (rng.uniform(-r, r), rng.uniform(-r, r))
            if p[0] ** 2 + p[1] ** 2 <= r * r:
                out.append(p)
        return out

    def test_pure_euler_identity(self):
        X = self.euler_plus({})
        rep = euler_linearize(X, self.ball_samples())
        assert rep.max_residual == 0.0
        assert np.abs(rep.images - rep.points).max() == 0.0

    def test_quadratic_perturbation(self):
        chart = Chart(2, ("x", "y"))
        x, y = chart.coordinates()
        X = self.euler_plus({(0,): x * x})
        rep = euler_linearize(X, self.ball_samples(), FlowConfig(step=1e-3))
        assert rep.max_residual < 1e-5

    def test_mixed_perturbation(self):
        chart = Chart(2, ("x", "y"))
        x, y = chart.coordinates()
        X = self.euler_plus({(0,): x * y, (1,): x * x})
        rep = euler_linearize(X, self.ball_samples(), FlowConfig(step=1e-3))
        assert rep.max_residual < 1e-5

    def test_flow_conjugation_oracle(self):
        # independent route: phi_1(Phi^X_t(x)) = e^{-t} phi_1(x)
        chart = Chart(2, ("x", "y"))
        x, y = chart.coordinates()
        X = self.euler_plus({(0,): x * x})
        pts = np.array(self.ball_samples(k=6))
        rep = euler_linearize(X, pts, FlowConfig(step=1e-3))
        from diraclab._numeric import CompiledVectorField, FlowConfig as FC, flow_points

        cf = CompiledVectorField(X)
        t = 0.37
        moved, _ = flow_points(cf, pts, t, FC(step=1e-3), with_jacobian=False)
        rep2 = euler_linearize(X, moved, FlowConfig(step=1e-3))
        assert np.abs(rep2.images - np.exp(-t) * rep.images).max() < 1e-6

    def test_non_euler_rejected(self):
        chart = Chart(2, ("x", "y"))
        x, y = chart.coordinates()
        X = PolyKVector(chart, 1, {(0,): 2 * x, (1,): y})
        with pytest.raises(PreconditionError):
            euler_linearize(X, [(0.1, 0.1)])


class TestMoserTransversality:
    def test_degenerate_gauge_named_point(self):
        from diraclab.errors import TransversalityError

        chart = Chart(2, ("x", "y"))
        pi0 = from_components(chart, {(0, 1): PolyScalar.constant(chart, 1)})
        x = chart.coordinate(0)
        a = TimePolyForm({0: PolyKForm(chart, 1, {(1,): -x})})
        # at t = 1 the family pi_t = (1-t)^{-1} pi_0 degenerates
        with pytest.raises(TransversalityError):
            moser_verify(pi0, a, [1.0], [(0.2, 0.3)], FlowConfig(step=1e-2))


class TestStructureConstantJSON:
    def test_round_trip_through_codec(self):
        from diraclab import jsonio

        data = {
            "n": 3,
            "c": [
                {"i": 1, "j": 2, "k": 3, "value": 1},
                {"i": 2, "j": 3, "k": 1, "value": [1, 1]},
                {"i": 3, "j": 1, "k": 2, "value": {"num": 1, "den": 1}},
            ],
        }
        n, c = jsonio.structure_constants_from_json(data)
        pi = lie_poisson(c, n)
        ref = lie_poisson(so3_constants(), 3, chart=pi.chart)
        assert pi.pi == ref.pi


class TestTimeDependentFlowConvention:
    """Pin the time-dependent flow convention at the observable level.

    For pi0 = x dx^dy and a_t = -(1 + t x) dy the gauge fields at different
    times do not commute, and the pushforward-invariance identity holds only
    for the flow defined through its action on functions (the inverse of the
    forward solution map).  Integrating dz/dt = -a_t(z) with frozen time
    instead leaves a residual around 3e-3 on this data, so a conventions
    regression shows up many orders of magnitude above the tolerance.
    """

    def test_noncommuting_family_residual(self):
        chart = Chart(2, ("x", "y"))
        x = chart.coordinate(0)
        pi0 = from_components(chart, {(0, 1): x})
        one = PolyScalar.constant(chart, 1)
        a = TimePolyForm({
            0: PolyKForm(chart, 1, {(1,): -one}),
            1: PolyKForm(chart, 1, {(1,): -x}),
        })
        grid = [(0.5, 0.3), (-0.4, 0.7), (0.25, -0.5)]
        rep = moser_verify(pi0, a, [0.5], grid, FlowConfig(step=1e-3))
        assert rep.max_residual < 1e-8
