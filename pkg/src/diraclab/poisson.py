"""Poisson structures as bivector fields.

Sign conventions (used consistently package-wide):

* pi(df, dg) = {f, g}, so the component matrix Pi with Pi[i][j] = pi(dx_i, dx_j)
  gives {f, g} = sum_ij Pi^{ij} d_i f d_j g;
* the sharp map is pi^#(mu) = pi(mu, .), i.e. Pi^T mu in components;
* a vector field with coefficients a(x) generates the flow of dx/dt = -a(x).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from ._numeric import (
    CompiledScalar,
    CompiledVectorField,
    FlowConfig,
    compile_bivector,
    flow_points_td,
    orthonormal_basis,
)
from .errors import (
    ChartMismatchError,
    DegreeError,
    PreconditionError,
    ShapeError,
    TransversalityError,
)
from .fields import (
    Chart,
    PolyKForm,
    PolyKVector,
    PolyScalar,
    differential,
    exterior_derivative,
)


class PoissonBivector:
    """A bivector field; `is_poisson` is decided exactly and cached."""

    __slots__ = ("pi", "_jacobiator", "_poisson")

    def __init__(self, pi: PolyKVector):
        if pi.degree != 2:
            raise DegreeError("PoissonBivector needs a degree-2 multivector")
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "_jacobiator", None)
        object.__setattr__(self, "_poisson", None)

    def __setattr__(self, *a):
        raise AttributeError("PoissonBivector is immutable")

    @property
    def chart(self) -> Chart:
        return self.pi.chart

    def component_matrix(self):
        """Full antisymmetric matrix of PolyScalars Pi^{ij}."""
        n = self.chart.dim
        zero = PolyScalar.zero(self.chart)
        M = [[zero for _ in range(n)] for _ in range(n)]
        for (i, j), p in self.pi.components.items():
            M[i][j] = p
            M[j][i] = -p
        return M

    def matrix_at(self, point) -> np.ndarray:
        return self.pi.evaluate_at(point)

    def compiled_matrix(self):
        return compile_bivector(self.pi)

    def __eq__(self, other):
        return isinstance(other, PoissonBivector) and self.pi == other.pi

    def __repr__(self):
        return f"PoissonBivector({self.pi!r})"


def from_components(chart: Chart, comps: Mapping) -> PoissonBivector:
    return PoissonBivector(PolyKVector(chart, 2, dict(comps)))


def standard_symplectic_poisson(n: int) -> PoissonBivector:
    """sum_i d/dq_i ^ d/dp_i on the chart (q1..qn, p1..pn)."""
    from .fields import cotangent_chart

    chart = cotangent_chart(n)
    comps = {(i, n + i): PolyScalar.constant(chart, 1) for i in range(n)}
    return from_components(chart, comps)


def sharp_apply(pi: PoissonBivector, alpha: PolyKForm) -> PolyKVector:
    """pi^#(alpha) for a 1-form: components (Pi^T alpha)_j = sum_i Pi^{ij} alpha_i."""
    if alpha.degree != 1:
        raise DegreeError("sharp_apply needs a 1-form")
    if alpha.chart != pi.chart:
        raise ChartMismatchError("form on the wrong chart")
    chart = pi.chart
    M = pi.component_matrix()
    comps = {}
    for j in range(chart.dim):
        s = PolyScalar.zero(chart)
        for (i,), a in alpha.components.items():
            s = s + M[i][j] * a
        if not s.is_zero():
            comps[(j,)] = s
    return PolyKVector(chart, 1, comps)


def bracket(pi: PoissonBivector, f: PolyScalar, g: PolyScalar) -> PolyScalar:
    """{f, g} = sum_{i<j} Pi^{ij} (d_i f d_j g - d_j f d_i g)."""
    if f.chart != pi.chart or g.chart != pi.chart:
        raise ChartMismatchError("bracket arguments must share the bivector's chart")
    out = PolyScalar.zero(pi.chart)
    for (i, j), p in pi.pi.components.items():
        out = out + p * (f.partial(i) * g.partial(j) - f.partial(j) * g.partial(i))
    return out


def hamiltonian_vf(pi: PoissonBivector, f: PolyScalar) -> PolyKVector:
    """X_f = pi^#(df); satisfies X_f(g) = {f, g}."""
    return sharp_apply(pi, differential(f))


def jacobiator(pi: PoissonBivector) -> PolyKVector:
    """The 3-vector field whose (i,j,k) component is Jac(x_i, x_j, x_k).

    Computed from the components directly:
    Jac^{ijk} = sum_m ( Pi^{im} d_m Pi^{jk} + Pi^{jm} d_m Pi^{ki}
                        + Pi^{km} d_m Pi^{ij} ).
    """
    if pi._jacobiator is not None:
        return pi._jacobiator
    chart = pi.chart
    n = chart.dim
    M = pi.component_matrix()
    comps = {}
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                s = PolyScalar.zero(chart)
                for m in range(n):
                    s = s + M[i][m] * M[j][k].partial(m)
                    s = s + M[j][m] * M[k][i].partial(m)
                    s = s + M[k][m] * M[i][j].partial(m)
                if not s.is_zero():
                    comps[(i, j, k)] = s
    out = PolyKVector(chart, 3, comps)
    object.__setattr__(pi, "_jacobiator", out)
    return out


def is_poisson(pi: PoissonBivector) -> bool:
    if pi._poisson is None:
        object.__setattr__(pi, "_poisson", jacobiator(pi).is_zero())
    return pi._poisson


# -- Lie-Poisson / structure constants ---------------------------------------


def normalize_structure_constants(c: Mapping, n: int) -> dict:
    """Canonical store: keys (i,j,k) with i<j.  Rejects symmetric input."""
    out: dict = {}
    for (i, j, k), v in c.items():
        v = Fraction(v)
        if v == 0:
            continue
        if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
            raise ShapeError(f"structure constant index {(i, j, k)} out of range")
        if i == j:
            raise ShapeError(f"c[{i},{i}]^{k} must vanish by antisymmetry")
        key = (i, j, k) if i < j else (j, i, k)
        sign = 1 if i < j else -1
        cur = out.get(key, Fraction(0)) + sign * v
        if cur == 0:
            out.pop(key, None)
        else:
            out[key] = cur
    # reject input that listed both (i,j,k) and (j,i,k) without antisymmetry
    for (i, j, k), v in c.items():
        if (j, i, k) in c and Fraction(c[(j, i, k)]) != -Fraction(v):
            raise ShapeError(f"constants not antisymmetric at {(i, j, k)}")
    return out


def structure_jacobi_defect(c: Mapping, n: int):
    """First violated Jacobi triple of antisymmetric constants, or None."""
    cc = normalize_structure_constants(c, n)

    def get(i, j, k):
        if i == j:
            return Fraction(0)
        if i < j:
            return cc.get((i, j, k), Fraction(0))
        return -cc.get((j, i, k), Fraction(0))

    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for l in range(n):
                    s = sum(
                        get(i, j, m) * get(m, k, l)
                        + get(j, k, m) * get(m, i, l)
                        + get(k, i, m) * get(m, j, l)
                        for m in range(n)
                    )
                    if s != 0:
                        return (i, j, k, l)
    return None


def lie_poisson(c: Mapping, n: int, chart: Chart | None = None) -> PoissonBivector:
    """The fiberwise-linear bivector sum_{i<j,k} c_{ij}^k mu_k d_i ^ d_j.

    Its Jacobi identity holds exactly iff the constants do.
    """
    cc = normalize_structure_constants(c, n)
    if chart is None:
        chart = Chart(n, tuple(f"mu{i+1}" for i in range(n)))
    elif chart.dim != n:
        raise ShapeError("chart dimension does not match n")
    comps: dict = {}
    for (i, j, k), v in cc.items():
        exp = tuple(1 if m == k else 0 for m in range(n))
        term = PolyScalar(chart, {exp: v})
        cur = comps.get((i, j))
        comps[(i, j)] = term if cur is None else cur + term
    return from_components(chart, comps)


def extract_structure_constants(pi: PoissonBivector) -> dict:
    """Inverse of lie_poisson on fiberwise-linear bivectors (exact)."""
    n = pi.chart.dim
    c: dict = {}
    for (i, j), p in pi.pi.components.items():
        for exp, v in p.terms.items():
            if sum(exp) != 1:
                raise DegreeError(
                    f"component ({i+1},{j+1}) is not linear: exponent {exp}"
                )
            k = exp.index(1)
            c[(i, j, k)] = v
    return c


def so3_constants() -> dict:
    """[e1,e2]=e3 and cyclic."""
    return {(0, 1, 2): Fraction(1), (1, 2, 0): Fraction(1), (2, 0, 1): Fraction(1)}


# -- the Lie algebroid dictionary ---------------------------------------------


@dataclass(frozen=True)
class LieAlgebroidData:
    """Anchored bracket data in a trivialization over a chart.

    anchors[i] is the image of the i-th frame section (a vector field on the
    base); constants[(i,j,k)] (i<j) are the bracket coefficients, functions on
    the base.
    """

    base: Chart
    rank: int
    anchors: tuple
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rank < 1:
            raise ShapeError("rank must be >= 1")
        if len(self.anchors) != self.rank:
            raise ShapeError("need one anchor field per frame section")
        for a in self.anchors:
            if not isinstance(a, PolyKVector) or a.degree != 1:
                raise ShapeError("anchors must be degree-1 fields")
            if a.chart != self.base:
                raise ChartMismatchError("anchor not on the base chart")
        clean: dict = {}
        for (i, j, k), p in self.constants.items():
            if not (0 <= i < self.rank and 0 <= j < self.rank and 0 <= k < self.rank):
                raise ShapeError("constant index out of range")
            if not isinstance(p, PolyScalar):
                p = PolyScalar.constant(self.base, p)
            if i == j:
                if not p.is_zero():
                    raise ShapeError(f"c[{i},{i}]^{k} must vanish by antisymmetry")
                continue
            key = (i, j, k) if i < j else (j, i, k)
            q = p if i < j else -p
            cur = clean.get(key)
            s = q if cur is None else cur + q
            if s.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = s
        object.__setattr__(self, "constants", clean)

    def structure_function(self, i, j, k) -> PolyScalar:
        if i == j:
            return PolyScalar.zero(self.base)
        if i < j:
            return self.constants.get((i, j, k), PolyScalar.zero(self.base))
        return -self.constants.get((j, i, k), PolyScalar.zero(self.base))


def total_chart(base: Chart, rank: int) -> Chart:
    names = base.names + tuple(f"y{i+1}" for i in range(rank))
    return Chart(base.dim + rank, names)


def algebroid_to_linear_poisson(A: LieAlgebroidData) -> PoissonBivector:
    """The dual-bundle bivector of anchored bracket data.

    On the chart (x, y) = base x fiber:
        pi = sum_{i<j,k} c_{ij}^k(x) y_k  d/dy_i ^ d/dy_j
             + sum_i d/dy_i ^ a_i ,
    which is fiberwise linear by construction.
    """
    m, n = A.base.dim, A.rank
    chart = total_chart(A.base, n)

    def lift(p: PolyScalar, fiber_exp=None) -> PolyScalar:
        terms = {}
        for exp, c in p.terms.items():
            fe = (0,) * n if fiber_exp is None else fiber_exp
            terms[tuple(exp) + fe] = c
        return PolyScalar(chart, terms)

    comps: dict = {}

    def add(i, j, p):
        sidx = (i, j) if i < j else (j, i)
        q = p if i < j else -p
        cur = comps.get(sidx)
        s = q if cur is None else cur + q
        if s.is_zero():
            comps.pop(sidx, None)
        else:
            comps[sidx] = s

    for (i, j, k), c in A.constants.items():
        fe = tuple(1 if t == k else 0 for t in range(n))
        add(m + i, m + j, lift(c, fe))
    for i, a in enumerate(A.anchors):
        for (j,), aj in a.components.items():
            # d/dy_i ^ a_i^j d/dx_j = -a_i^j d/dx_j ^ d/dy_i
            add(j, m + i, -lift(aj))
    return from_components(chart, comps)


def linear_poisson_to_algebroid(pi: PoissonBivector, base_dim: int) -> LieAlgebroidData:
    """Extract anchored bracket data from a fiberwise-linear bivector.

    The declared splitting is (x_1..x_m | y_1..y_n).  Components must have the
    fiber degrees a linear structure forces: base-base zero, base-fiber of
    fiber-degree 0, fiber-fiber of fiber-degree exactly 1.  Violations raise
    with the offending components listed.
    """
    m = base_dim
    n = pi.chart.dim - m
    if n < 1:
        raise ShapeError("splitting leaves no fiber directions")
    fiber_vars = tuple(range(m, m + n))
    base = Chart(m, pi.chart.names[:m]) if m > 0 else Chart(0, ())

    def project_base(p: PolyScalar) -> PolyScalar:
        terms = {}
        for exp, c in p.terms.items():
            terms[tuple(exp[:m])] = c
        return PolyScalar(base, terms)

    offending = []
    anchors_comp: dict = {}
    constants: dict = {}
    for (i, j), p in pi.pi.components.items():
        i_base, j_base = i < m, j < m
        fdeg_terms = {sum(e[m:]) for e in p.terms}
        if i_base and j_base:
            offending.append((i + 1, j + 1, "base-base component must vanish"))
        elif i_base and not j_base:
            if fdeg_terms - {0}:
                offending.append((i + 1, j + 1, "base-fiber component must be fiber-constant"))
                continue
            # component (x_i, y_a) = -a_a^i
            a = j - m
            anchors_comp.setdefault(a, {})[(i,)] = -project_base(p)
        else:
            if fdeg_terms - {1}:
                offending.append((i + 1, j + 1, "fiber-fiber component must be fiber-linear"))
                continue
            a, b = i - m, j - m
            for exp, c in p.terms.items():
                k = next(t for t in range(n) if exp[m + t] == 1)
                be = tuple(exp[:m])
                cur = constants.get((a, b, k), PolyScalar.zero(base))
                constants[(a, b, k)] = cur + PolyScalar(base, {be: c})
    if offending:
        raise DegreeError(f"bivector is not fiberwise linear for split {m}|{n}: {offending}")
    anchors = tuple(
        PolyKVector(base, 1, anchors_comp.get(a, {})) for a in range(n)
    )
    return LieAlgebroidData(base, n, anchors, constants)


def fiber_degree_profile(pi: PoissonBivector, base_dim: int) -> bool:
    """True iff every component has the fiber degree forced by linearity."""
    try:
        linear_poisson_to_algebroid(pi, base_dim)
        return True
    except DegreeError:
        return False


# -- pointwise leaf data -------------------------------------------------------


@dataclass(frozen=True)
class LeafData:
    """Rank, tangent basis and induced symplectic matrix at one point.

    The basis is an (n x 2k) orthonormal matrix spanning ran(pi^#); it is an
    arbitrary SVD choice, so any basis-dependent output must be read as such.
    omega is minus the inverse of the restricted bivector: omega (-pi_S) = I.
    """

    point: tuple
    rank: int
    basis: np.ndarray
    omega: np.ndarray


def leaf_data_at_point(pi: PoissonBivector, point, rank_tol: float = 1e-10) -> LeafData:
    P = pi.matrix_at(point)
    B = orthonormal_basis(P, tol=rank_tol)
    r = B.shape[1]
    if r == 0:
        return LeafData(tuple(float(x) for x in point), 0, B, np.zeros((0, 0)))
    piS = B.T @ P @ B
    omega = -np.linalg.inv(piS)
    omega = 0.5 * (omega - omega.T)
    return LeafData(tuple(float(x) for x in point), r, B, omega)


# -- gauge transformations (pointwise) ----------------------------------------


def gauge_matrix_at(pi_mat: np.ndarray, omega_mat: np.ndarray, point=None) -> np.ndarray:
    """Pointwise gauge of a bivector matrix by a 2-form matrix.

    Returns (I + Pi W)^{-1} Pi, the component matrix of the transformed
    bivector; raises if the graph loses transversality to the tangent space.
    """
    n = pi_mat.shape[0]
    A = np.eye(n) + pi_mat @ omega_mat
    det = np.linalg.det(A)
    if abs(det) < 1e-12:
        raise TransversalityError(
            "gauge transform not transverse to the tangent bundle", point
        )
    out = np.linalg.solve(A, pi_mat)
    return 0.5 * (out - out.T)


# -- Moser verification ---------------------------------------------------------


class TimePolyForm:
    """A k-form family polynomial in a time parameter: sum_d t^d alpha_d."""

    __slots__ = ("chart", "degree", "coeffs")

    def __init__(self, coeffs: Mapping[int, PolyKForm]):
        items = {int(d): a for d, a in coeffs.items()}
        if not items:
            raise ShapeError("need at least one coefficient form to fix chart/degree")
        charts = {a.chart for a in items.values()}
        degrees = {a.degree for a in items.values()}
        if len(charts) != 1 or len(degrees) != 1:
            raise ShapeError("coefficients must share chart and degree")
        if min(items) < 0:
            raise ShapeError("time powers must be >= 0")
        object.__setattr__(self, "chart", charts.pop())
        object.__setattr__(self, "degree", degrees.pop())
        object.__setattr__(
            self, "coeffs", {d: a for d, a in items.items() if not a.is_zero()}
        )

    def __setattr__(self, *a):
        raise AttributeError("TimePolyForm is immutable")

    @staticmethod
    def constant(alpha: PolyKForm) -> "TimePolyForm":
        return TimePolyForm({0: alpha})

    def at_time(self, t: float) -> list:
        return [(float(t) ** d, a) for d, a in self.coeffs.items()]

    def exterior_derivative(self) -> "TimePolyForm":
        out = {d: exterior_derivative(a) for d, a in self.coeffs.items()}
        out.setdefault(0, PolyKForm(self.chart, self.degree + 1, {}))
        return TimePolyForm(out)

    def time_integral(self) -> "TimePolyForm":
        """- integral_0^t of the family in s (note the sign)."""
        out = {d + 1: a * Fraction(-1, d + 1) for d, a in self.coeffs.items()}
        out.setdefault(0, PolyKForm(self.chart, self.degree, {}))
        return TimePolyForm(out)


@dataclass(frozen=True)
class MoserReport:
    max_residual: float
    worst_point: tuple
    worst_time: float
    samples: int

    def as_dict(self):
        return {
            "max_residual": self.max_residual,
            "worst_point": list(self.worst_point),
            "worst_time": self.worst_time,
            "samples": self.samples,
        }


def moser_verify(
    pi0: PoissonBivector,
    a_t: TimePolyForm,
    times: Sequence[float],
    grid: Sequence[Sequence[float]],
    config: FlowConfig = FlowConfig(),
) -> MoserReport:
    """Certify the gauge-flow invariance (Phi_T)_* pi_T = pi0 on a grid.

    The closed family omega_t = -int_0^t d a_s ds deforms pi0 by gauge
    transformations; the flow of X_t = pi_t^#(a_t) must carry pi_T back to
    pi0.  Returns the max pushforward residual over grid x times.
    """
    if not is_poisson(pi0):
        raise PreconditionError("pi0 must be Poisson")
    if a_t.degree != 1:
        raise PreconditionError("a_t must be a family of 1-forms")
    if a_t.chart != pi0.chart:
        raise ChartMismatchError("a_t on the wrong chart")
    n = pi0.chart.dim
    pi_fn = pi0.compiled_matrix()
    omega_t = a_t.exterior_derivative().time_integral()  # omega_t = -int d a_s
    omega_terms = [
        (d, idx, CompiledScalar(p))
        for d, a in omega_t.coeffs.items()
        for idx, p in a.components.items()
    ]
    a_terms = [
        (d, i, CompiledScalar(p))
        for d, a in a_t.coeffs.items()
        for (i,), p in a.components.items()
    ]

    def W_at(t, pts):
        out = np.zeros(pts.shape[:-1] + (n, n))
        for d, (i, j), c in omega_terms:
            v = (t**d) * c(pts)
            out[..., i, j] += v
            out[..., j, i] -= v
        return out

    def alpha_at(t, pts):
        out = np.zeros(pts.shape)
        for d, i, c in a_terms:
            out[..., i] += (t**d) * c(pts)
        return out

    def pi_t_at(t, pts):
        P = pi_fn(pts)
        W = W_at(t, pts)
        A = np.eye(n) + np.einsum("...ij,...jk->...ik", P, W)
        dets = np.linalg.det(A)
        bad = np.abs(dets) < 1e-12
        if np.any(bad):
            b = int(np.argmax(bad))
            raise TransversalityError(
                f"gauge family degenerate at t={t}", np.atleast_2d(pts)[b]
            )
        return np.linalg.solve(A, P)

    def field(t, pts):
        # X_t = pi_t^#(a_t): components (Pi_t^T a)_j
        Pt = pi_t_at(t, pts)
        al = alpha_at(t, pts)
        return np.einsum("...ij,...i->...j", Pt, al)

    def field_jac(t, pts, h=1e-6):
        out = np.zeros(pts.shape + (pts.shape[-1],))
        for j in range(pts.shape[-1]):
            e = np.zeros(pts.shape[-1])
            e[j] = h
            out[..., :, j] = (field(t, pts + e) - field(t, pts - e)) / (2 * h)
        return out

    grid_arr = np.array([list(map(float, g)) for g in grid])
    worst = (0.0, grid_arr[0], 0.0)
    for T in times:
        if T == 0.0:
            continue
        x_end, J = flow_points_td(field, field_jac, grid_arr, float(T), config)
        piT = pi_t_at(float(T), grid_arr)
        pushed = np.einsum("bij,bjk,blk->bil", J, piT, J)
        target = pi_fn(x_end)
        res = np.abs(pushed - target).reshape(len(grid_arr), -1).max(axis=1)
        b = int(res.argmax())
        if res[b] > worst[0]:
            worst = (float(res[b]), grid_arr[b], float(T))
    return MoserReport(worst[0], tuple(worst[1]), worst[2], len(grid_arr) * len(times))


# -- Euler-like linearization ----------------------------------------------------


@dataclass(frozen=True)
class EulerReport:
    max_residual: float
    worst_point: tuple
    samples: int
    points: np.ndarray
    images: np.ndarray
    jacobians: np.ndarray

    def as_dict(self):
        return {
            "max_residual": self.max_residual,
            "worst_point": list(self.worst_point),
            "samples": self.samples,
        }


def euler_linearize(
    X: PolyKVector,
    sample_points: Sequence[Sequence[float]],
    config: FlowConfig = FlowConfig(),
) -> EulerReport:
    """Normalize a vector field with Euler-type linear part to the Euler field.

    Requires X(0) = 0 with linear part exactly E = sum_i x_i d/dx_i (checked
    symbolically).  The time-1 flow of Z_t, where Z is the nonlinear part and
    Z_t(x) = Z(tx)/t^2 componentwise, conjugates X to E; the report carries
    the sampled map phi_1 with Jacobians and the residual
    |Dphi_1 X - E o phi_1| over the samples.
    """
    if X.degree != 1:
        raise DegreeError("euler_linearize needs a vector field")
    chart = X.chart
    n = chart.dim
    # split X = linear part + Z; demand linear part == Euler field, Z >= quadratic
    z_comps = {}
    for j in range(n):
        p = X.components.get((j,), PolyScalar.zero(chart))
        lin = {e: c for e, c in p.terms.items() if sum(e) <= 1}
        want = {tuple(1 if i == j else 0 for i in range(n)): Fraction(1)}
        if lin != want:
            raise PreconditionError(
                f"component {j+1}: linear part is not the Euler field"
            )
        rest = {e: c for e, c in p.terms.items() if sum(e) >= 2}
        if rest:
            z_comps[(j,)] = PolyScalar(chart, rest)
    Z = PolyKVector(chart, 1, z_comps)

    # Z_t: a monomial of total degree d picks up the factor t^(d-2)
    by_power: dict = {}
    for (j,), p in Z.components.items():
        for exp, c in p.terms.items():
            d = sum(exp) - 2
            by_power.setdefault(d, {}).setdefault((j,), {})[exp] = c
    powers = [
        (d, CompiledVectorField(PolyKVector(chart, 1, {
            idx: PolyScalar(chart, terms) for idx, terms in comps.items()
        })))
        for d, comps in sorted(by_power.items())
    ]

    def value(t, pts):
        out = np.zeros(pts.shape)
        for d, f in powers:
            out += (t**d) * f.value(pts)
        return out

    def jac(t, pts):
        out = np.zeros(pts.shape + (pts.shape[-1],))
        for d, f in powers:
            out += (t**d) * f.jacobian(pts)
        return out

    pts = np.array([list(map(float, p)) for p in sample_points])
    if powers:
        images, J = flow_points_td(value, jac, pts, 1.0, config)
    else:
        images = pts.copy()
        J = np.broadcast_to(np.eye(n), (len(pts), n, n)).copy()
    Xvals = np.array([[X.components.get((j,), PolyScalar.zero(chart)).evaluate(p)
                       for j in range(n)] for p in pts])
    pushed = np.einsum("bij,bj->bi", J, Xvals)
    res = np.abs(pushed - images).max(axis=1)
    b = int(res.argmax())
    return EulerReport(float(res[b]), tuple(pts[b]), len(pts), pts, images, J)
