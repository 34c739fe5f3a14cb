"""The generalized tangent bundle TM + T*M: pairing, Courant bracket,
Lagrangian frames, integrability, gauge transformations and pullbacks.

Fiber vectors are written (v, mu) and stacked as 2n-vectors with the tangent
part first.  The split-signature pairing is
    <v1 + mu1, v2 + mu2> = <mu1, v2> + <mu2, v1>,
and a gauge transformation by a closed 2-form omega acts as
    (v, mu) -> (v, mu + i_v omega).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._numeric import nullspace_basis, orthonormal_basis
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
    PolyMap,
    PolyScalar,
    coordinate_form,
    exterior_derivative,
    interior_product,
    lie_derivative,
    vector_bracket,
)
from .poisson import PoissonBivector, sharp_apply


class GeneralizedSection:
    """A section X + alpha of TM + T*M with polynomial components."""

    __slots__ = ("X", "alpha")

    def __init__(self, X: PolyKVector, alpha: PolyKForm):
        if X.degree != 1 or alpha.degree != 1:
            raise DegreeError("generalized sections pair a vector field with a 1-form")
        if X.chart != alpha.chart:
            raise ChartMismatchError("vector and form parts on different charts")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "alpha", alpha)

    def __setattr__(self, *a):
        raise AttributeError("GeneralizedSection is immutable")

    @property
    def chart(self) -> Chart:
        return self.X.chart

    @staticmethod
    def from_vector(X: PolyKVector) -> "GeneralizedSection":
        return GeneralizedSection(X, PolyKForm(X.chart, 1, {}))

    @staticmethod
    def from_form(alpha: PolyKForm) -> "GeneralizedSection":
        return GeneralizedSection(PolyKVector(alpha.chart, 1, {}), alpha)

    def __add__(self, other):
        return GeneralizedSection(self.X + other.X, self.alpha + other.alpha)

    def __sub__(self, other):
        return GeneralizedSection(self.X - other.X, self.alpha - other.alpha)

    def __mul__(self, f):
        return GeneralizedSection(self.X * f, self.alpha * f)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, GeneralizedSection)
            and self.X == other.X
            and self.alpha == other.alpha
        )

    def value_at(self, point) -> np.ndarray:
        """Fiber value stacked as (v, mu) in R^{2n}."""
        return np.concatenate([self.X.evaluate_at(point), self.alpha.evaluate_at(point)])

    def __repr__(self):
        return f"GeneralizedSection(X={self.X!r}, alpha={self.alpha!r})"


def anchor(s: GeneralizedSection) -> PolyKVector:
    return s.X


def pairing(s1: GeneralizedSection, s2: GeneralizedSection) -> PolyScalar:
    """<X1 + a1, X2 + a2> = a1(X2) + a2(X1)."""
    if s1.chart != s2.chart:
        raise ChartMismatchError("pairing across charts")
    p = interior_product(s2.X, s1.alpha) if not s1.alpha.is_zero() else None
    q = interior_product(s1.X, s2.alpha) if not s2.alpha.is_zero() else None
    out = PolyScalar.zero(s1.chart)
    if p is not None:
        out = out + p.components.get((), PolyScalar.zero(s1.chart))
    if q is not None:
        out = out + q.components.get((), PolyScalar.zero(s1.chart))
    return out


def courant_bracket(s1: GeneralizedSection, s2: GeneralizedSection) -> GeneralizedSection:
    """[[s1, s2]] = [X1, X2] + L_{X1} a2 - i_{X2} d a1 (non-skew convention)."""
    if s1.chart != s2.chart:
        raise ChartMismatchError("bracket across charts")
    Xout = vector_bracket(s1.X, s2.X)
    form = lie_derivative(s1.X, s2.alpha)
    da1 = exterior_derivative(s1.alpha)
    form = form - interior_product(s2.X, da1)
    return GeneralizedSection(Xout, form)


def one_form_bracket(pi: PoissonBivector, a: PolyKForm, b: PolyKForm) -> PolyKForm:
    """The cotangent-algebroid bracket [a, b] = L_{pi#a} b - i_{pi#b} da.

    For a Poisson bivector it satisfies [df, dg] = d{f, g}.
    """
    Xa = sharp_apply(pi, a)
    Xb = sharp_apply(pi, b)
    return lie_derivative(Xa, b) - interior_product(Xb, exterior_derivative(a))


def gauge_section(omega: PolyKForm, s: GeneralizedSection) -> GeneralizedSection:
    """R_omega on sections: X + alpha -> X + alpha + i_X omega.

    Preserves the pairing for any omega; preserves the Courant bracket iff
    omega is closed (no closedness check here; see GaugeTransform).
    """
    if omega.degree != 2:
        raise DegreeError("gauge transformations use 2-forms")
    return GeneralizedSection(s.X, s.alpha + interior_product(s.X, omega))


@dataclass(frozen=True)
class GaugeTransform:
    """A gauge transformation by an exactly closed 2-form."""

    omega: PolyKForm

    def __post_init__(self):
        if self.omega.degree != 2:
            raise DegreeError("gauge transformations use 2-forms")
        if not exterior_derivative(self.omega).is_zero():
            raise PreconditionError("gauge 2-form must be closed (d omega = 0 exactly)")

    def matrix_at(self, point) -> np.ndarray:
        return self.omega.evaluate_at(point)

    def apply(self, s: GeneralizedSection) -> GeneralizedSection:
        return gauge_section(self.omega, s)


class LagrangianFrame:
    """n spanning sections of a Lagrangian subbundle of TM + T*M.

    Symbolic mode stores GeneralizedSections; pointwise mode a 2n x n numeric
    matrix of fiber vectors at one point.
    """

    __slots__ = ("chart", "sections", "matrix", "mode")

    def __init__(self, chart, sections=None, matrix=None):
        if (sections is None) == (matrix is None):
            raise ShapeError("provide exactly one of sections / matrix")
        mode = "symbolic" if sections is not None else "pointwise"
        if sections is not None:
            sections = tuple(sections)
            if len(sections) != chart.dim:
                raise ShapeError("need dim-many spanning sections")
            for s in sections:
                if s.chart != chart:
                    raise ChartMismatchError("section on the wrong chart")
        else:
            matrix = np.asarray(matrix, dtype=float)
            if matrix.shape != (2 * chart.dim, chart.dim):
                raise ShapeError("pointwise frame must be a 2n x n matrix")
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "sections", sections)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "mode", mode)

    def __setattr__(self, *a):
        raise AttributeError("LagrangianFrame is immutable")

    @staticmethod
    def symbolic(sections: Sequence[GeneralizedSection]) -> "LagrangianFrame":
        sections = tuple(sections)
        if not sections:
            raise ShapeError("empty frame")
        return LagrangianFrame(sections[0].chart, sections=sections)

    @staticmethod
    def pointwise(chart: Chart, matrix) -> "LagrangianFrame":
        return LagrangianFrame(chart, matrix=matrix)

    def value_at(self, point) -> np.ndarray:
        """The 2n x n matrix of fiber values."""
        if self.mode == "pointwise":
            return self.matrix
        return np.column_stack([s.value_at(point) for s in self.sections])

    def gram_polynomials(self):
        if self.mode != "symbolic":
            raise ShapeError("symbolic mode required")
        n = len(self.sections)
        return [
            [pairing(self.sections[a], self.sections[b]) for b in range(n)]
            for a in range(n)
        ]

    def check_lagrangian(self, point, tol: float = 1e-10):
        """Rank-n and Gram-zero check of the fiber at a point."""
        V = self.value_at(point)
        n = self.chart.dim
        gram = V[:n].T @ V[n:] + V[n:].T @ V[:n]
        gram_norm = float(np.abs(gram).max()) if gram.size else 0.0
        r = np.linalg.matrix_rank(V, tol=tol if tol > 0 else None)
        return r == n and gram_norm < max(tol, 1e-10) * max(1.0, abs(V).max() ** 2)


def pairing_gram(V: np.ndarray) -> np.ndarray:
    """Split-pairing Gram matrix of stacked fiber columns (v; mu)."""
    n = V.shape[0] // 2
    return V[:n].T @ V[n:] + V[n:].T @ V[:n]


def graph_of_poisson(pi: PoissonBivector) -> LagrangianFrame:
    """Frame (pi^#(dx_i) + dx_i); spans Gr(pi), transverse to TM."""
    chart = pi.chart
    sections = []
    for i in range(chart.dim):
        dxi = coordinate_form(chart, i)
        sections.append(GeneralizedSection(sharp_apply(pi, dxi), dxi))
    return LagrangianFrame(chart, sections=sections)


def graph_of_form(omega: PolyKForm) -> LagrangianFrame:
    """Frame (d/dx_i + i_{d/dx_i} omega); spans Gr(omega)."""
    if omega.degree != 2:
        raise DegreeError("graph_of_form needs a 2-form")
    chart = omega.chart
    from .fields import coordinate_vector

    sections = []
    for i in range(chart.dim):
        ei = coordinate_vector(chart, i)
        sections.append(GeneralizedSection(ei, interior_product(ei, omega)))
    return LagrangianFrame(chart, sections=sections)


def integrability_tensor(E: LagrangianFrame, point) -> np.ndarray:
    """Frame components of <s_a, [[s_b, s_c]]> at a point.

    Totally antisymmetric; identically zero on a neighborhood iff the frame
    spans a Dirac structure there.
    """
    if E.mode != "symbolic":
        raise ShapeError("integrability tensor needs a symbolic frame")
    if not E.check_lagrangian(point):
        raise PreconditionError("frame is not Lagrangian at the given point")
    n = len(E.sections)
    out = np.zeros((n, n, n))
    for b in range(n):
        for c in range(b + 1, n):
            br = courant_bracket(E.sections[b], E.sections[c])
            for a in range(n):
                v = pairing(E.sections[a], br).evaluate(point)
                out[a, b, c] = v
                out[a, c, b] = -v
    return out


def gauge_transform_fiber(E: LagrangianFrame, gauge: GaugeTransform, point) -> LagrangianFrame:
    """Apply R_omega to the fiber of a frame at a point (pairing-preserving)."""
    V = E.value_at(point).copy()
    n = E.chart.dim
    W = gauge.matrix_at(point)
    # mu -> mu + i_v omega with (i_v omega)_j = sum_i v_i W_ij
    V[n:] += W.T @ V[:n]
    out = LagrangianFrame.pointwise(E.chart, V)
    if np.abs(pairing_gram(V) - pairing_gram(E.value_at(point))).max() > 1e-12 * max(
        1.0, np.abs(V).max() ** 2
    ):
        raise AssertionError("gauge transform failed to preserve the pairing")
    return out


def gauge_poisson(pi: PoissonBivector, gauge: GaugeTransform, point) -> np.ndarray:
    """Pointwise component matrix of the gauged bivector.

    Returns (I + Pi W)^{-1} Pi at the point (equivalently the sharp map
    Pi^T (I + W^T Pi^T)^{-1} transposed); raises TransversalityError when the
    sheared graph meets TM.  The range of the sharp map is preserved.
    """
    from .poisson import gauge_matrix_at

    P = pi.matrix_at(point)
    W = gauge.matrix_at(point)
    return gauge_matrix_at(P, W, point)


def gauge_poisson_symbolic(pi: PoissonBivector, gauge: GaugeTransform) -> PoissonBivector:
    """Symbolic gauge transform, available when det(I + Pi W) is constant.

    Polynomial matrix inverses leave the polynomial class in general; when the
    determinant is a nonzero constant the adjugate formula stays polynomial.
    """
    chart = pi.chart
    n = chart.dim
    P = pi.component_matrix()
    Wfull = [[PolyScalar.zero(chart) for _ in range(n)] for _ in range(n)]
    for (i, j), p in gauge.omega.components.items():
        Wfull[i][j] = p
        Wfull[j][i] = -p
    # A = I + P W
    A = [[PolyScalar.zero(chart) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            s = PolyScalar.constant(chart, 1) if i == j else PolyScalar.zero(chart)
            for k in range(n):
                s = s + P[i][k] * Wfull[k][j]
            A[i][j] = s

    def det(mat):
        m = len(mat)
        if m == 1:
            return mat[0][0]
        out = PolyScalar.zero(chart)
        for j in range(m):
            minor = [row[:j] + row[j + 1 :] for row in mat[1:]]
            term = mat[0][j] * det(minor)
            out = out + (term if j % 2 == 0 else -term)
        return out

    d = det(A)
    if d.is_zero() or d.total_degree() > 0:
        raise TransversalityError(
            "det(I + Pi W) is not a nonzero constant; symbolic gauge unavailable"
        )
    c = d.terms[chart.zero_exp()]
    # adjugate: adj(A)_{ij} = (-1)^{i+j} det(minor_ji)
    adj = [[PolyScalar.zero(chart) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [A[r][s] for s in range(n) if s != i] for r in range(n) if r != j
            ]
            m = det(minor) if minor else PolyScalar.constant(chart, 1)
            adj[i][j] = m if (i + j) % 2 == 0 else -m
    inv_c = 1 / c
    comps = {}
    for i in range(n):
        for j in range(i + 1, n):
            s = PolyScalar.zero(chart)
            for k in range(n):
                s = s + adj[i][k] * P[k][j]
            s = s * inv_c
            if not s.is_zero():
                comps[(i, j)] = s
    return PoissonBivector(PolyKVector(chart, 2, comps))


def pullback_dirac_at_point(phi: PolyMap, E: LagrangianFrame, point) -> np.ndarray:
    """Fiber of the pulled-back Dirac structure at a source point.

    Elements (w, nu) with d phi(w) = v and nu = d phi^T mu for some
    (v, mu) in the fiber of E at phi(point).  Requires the anchor image of E
    plus ran(d phi) to fill the target tangent space.  Returns an orthonormal
    2k x k basis.
    """
    k = phi.source.dim
    m = phi.target.dim
    target_pt = phi(point)
    V = E.value_at(target_pt)
    vectors, forms = V[:m], V[m:]
    J = phi.jacobian_at(point)
    if np.linalg.matrix_rank(np.column_stack([vectors, J]), tol=1e-10) < m:
        raise TransversalityError(
            "anchor of the frame plus the map differential do not span the target",
            point,
        )
    # solve J w = vectors c for (w, c)
    A = np.column_stack([J, -vectors])
    K = nullspace_basis(A)
    w = K[:k, :]
    c = K[k:, :]
    nu = J.T @ (forms @ c)
    basis = orthonormal_basis(np.vstack([w, nu]))
    if basis.shape[1] != k:
        raise AssertionError(
            f"pullback fiber has dimension {basis.shape[1]}, expected {k}"
        )
    return basis


def cosymplectic_check(pi: PoissonBivector, vanishing: Sequence[int], points):
    """Check TM = TN + pi^#(ann TN) at each point of a coordinate subspace.

    The submanifold is cut out by the listed vanishing coordinates (0-based).
    Returns (ok, certificate): on success the certificate carries, per point,
    the fiber basis of pi^#(ann TN); on failure the first witness point.
    """
    chart = pi.chart
    n = chart.dim
    vanishing = sorted(set(int(i) for i in vanishing))
    if any(not 0 <= i < n for i in vanishing):
        raise ShapeError("vanishing coordinate out of range")
    tangent_idx = [i for i in range(n) if i not in vanishing]
    fibers = []
    for pt in points:
        P = pi.matrix_at(pt)
        # sharp(dx_i) = Pi^T e_i = the i-th row of Pi
        sharp_cols = np.column_stack([P[i, :] for i in vanishing]) if vanishing else np.zeros((n, 0))
        TN = np.eye(n)[:, tangent_idx]
        full = np.column_stack([TN, sharp_cols])
        if np.linalg.matrix_rank(full, tol=1e-10) < n:
            return False, {"witness_point": tuple(float(x) for x in pt)}
        fibers.append(sharp_cols)
    return True, {"fibers": fibers, "points": [tuple(float(x) for x in p) for p in points]}


@dataclass(frozen=True)
class MapCheckReport:
    exact: bool | None
    max_residual: float | None
    worst_point: tuple | None
    anti: bool

    def passed(self, tol: float = 1e-10) -> bool:
        if self.exact is not None:
            return self.exact
        return self.max_residual is not None and self.max_residual <= tol

    def as_dict(self):
        return {
            "exact": self.exact,
            "max_residual": "exact-zero" if self.exact else self.max_residual,
            "worst_point": None if self.worst_point is None else list(self.worst_point),
            "anti": self.anti,
        }


def check_poisson_map(
    phi,
    pi_source: PoissonBivector,
    pi_target: PoissonBivector,
    anti: bool = False,
    samples: Sequence[Sequence[float]] | None = None,
    jacobian: Callable | None = None,
) -> MapCheckReport:
    """Certify d phi . Pi_source . d phi^T = (+/-) Pi_target o phi.

    A PolyMap is checked as an exact polynomial identity.  A callable map
    (with `jacobian` supplied, for non-polynomial maps) is checked at the
    sample points and reported as a max residual.
    """
    sign = -1 if anti else 1
    if isinstance(phi, PolyMap):
        if phi.source != pi_source.chart or phi.target != pi_target.chart:
            raise ChartMismatchError("map charts do not match the bivectors")
        J = phi.jacobian()
        n, ncols = phi.target.dim, phi.source.dim
        S = pi_source.component_matrix()
        ok = True
        for i in range(n):
            for j in range(i + 1, n):
                s = PolyScalar.zero(phi.source)
                for a in range(ncols):
                    for b in range(ncols):
                        if S[a][b].is_zero():
                            continue
                        s = s + J[i][a] * S[a][b] * J[j][b]
                target = pi_target.pi.component((i, j))
                s = s - sign * phi.compose_scalar(target)
                if not s.is_zero():
                    ok = False
                    break
            if not ok:
                break
        return MapCheckReport(exact=ok, max_residual=None, worst_point=None, anti=anti)

    if samples is None or jacobian is None:
        raise ShapeError("callable maps need sample points and a jacobian callback")
    src_fn = pi_source.compiled_matrix()
    tgt_fn = pi_target.compiled_matrix()
    worst = (-1.0, None)
    for pt in samples:
        pt = np.asarray(pt, dtype=float)
        J = np.asarray(jacobian(pt), dtype=float)
        res = J @ src_fn(pt[None, :])[0] @ J.T - sign * tgt_fn(
            np.asarray(phi(pt), dtype=float)[None, :]
        )[0]
        r = float(np.abs(res).max())
        if r > worst[0]:
            worst = (r, tuple(float(x) for x in pt))
    return MapCheckReport(exact=None, max_residual=worst[0], worst_point=worst[1], anti=anti)
