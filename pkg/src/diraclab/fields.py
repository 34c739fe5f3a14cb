"""Exterior calculus with exact polynomial coefficients on coordinate charts.

All coefficients are rational numbers (``fractions.Fraction``), so algebraic
identities are decided exactly: a bracket or differential either is the zero
polynomial or it is not.  Floating point enters only through the
``evaluate_*`` / ``*_at_point`` boundaries.

Conventions used throughout the package:

* multivector and form components are stored on strictly increasing index
  tuples; any other input order is sign-normalized,
* the canonical term order of a polynomial is graded lexicographic
  (total degree first, ties broken lexicographically),
* equality is structural equality of canonical forms.

Everything here is immutable after construction; all operations are pure
functions and safe to share between threads.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import ChartMismatchError, DegreeError, ShapeError

Rat = Union[int, Fraction]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def sort_index(idx: Sequence[int]):
    """Sort an index tuple, returning (sorted tuple, sign) or (None, 0) on repeats."""
    idx = list(idx)
    sign = 1
    # insertion sort; counts transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return None, 0
    return tuple(idx), sign


class Chart:
    """A coordinate chart on R^n, identified by dimension and coordinate names.

    ``dim == 0`` is permitted and denotes a point (all polynomials are
    constants); it is needed to treat Lie algebras as the rank-only case of
    the algebroid dictionary.
    """

    __slots__ = ("dim", "names")

    def __init__(self, dim: int, names: Sequence[str] | None = None):
        if dim < 0:
            raise ShapeError("chart dimension must be >= 0")
        if names is None:
            names = tuple(f"x{i+1}" for i in range(dim))
        else:
            names = tuple(names)
        if len(names) != dim:
            raise ShapeError(f"chart of dim {dim} got {len(names)} names")
        if len(set(names)) != dim:
            raise ShapeError("coordinate names must be unique")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "names", names)

    def __setattr__(self, *a):
        raise AttributeError("Chart is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Chart)
            and self.dim == other.dim
            and self.names == other.names
        )

    def __hash__(self):
        return hash((self.dim, self.names))

    def __repr__(self):
        return f"Chart({self.dim}, {list(self.names)})"

    def coordinate(self, i: int) -> "PolyScalar":
        """The coordinate function x_i (0-based index)."""
        if not 0 <= i < self.dim:
            raise ShapeError(f"coordinate index {i} out of range for dim {self.dim}")
        exp = tuple(1 if j == i else 0 for j in range(self.dim))
        return PolyScalar(self, {exp: Fraction(1)})

    def coordinates(self):
        return tuple(self.coordinate(i) for i in range(self.dim))

    def zero_exp(self):
        return (0,) * self.dim


def cotangent_chart(n: int) -> Chart:
    """Chart (q1..qn, p1..pn) used for realizations on T*R^n."""
    names = tuple(f"q{i+1}" for i in range(n)) + tuple(f"p{i+1}" for i in range(n))
    return Chart(2 * n, names)


def grlex_key(exp):
    return (sum(exp), exp)


class PolyScalar:
    """A polynomial with exact rational coefficients on a chart.

    Canonical form: a map from exponent multi-indices to nonzero Fractions.
    """

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: Mapping[tuple, Rat] | None = None):
        clean = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != chart.dim or any(e < 0 for e in exp):
                    raise ShapeError(f"bad exponent {exp} for chart of dim {chart.dim}")
                c = _frac(c)
                if c != 0:
                    cur = clean.get(exp)
                    if cur is None:
                        clean[exp] = c
                    else:
                        s = cur + c
                        if s == 0:
                            del clean[exp]
                        else:
                            clean[exp] = s
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("PolyScalar is immutable")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(chart: Chart) -> "PolyScalar":
        return PolyScalar(chart, {})

    @staticmethod
    def constant(chart: Chart, c: Rat) -> "PolyScalar":
        return PolyScalar(chart, {chart.zero_exp(): _frac(c)})

    @staticmethod
    def monomial(chart: Chart, exp: Sequence[int], c: Rat = 1) -> "PolyScalar":
        return PolyScalar(chart, {tuple(exp): _frac(c)})

    # -- ring structure ------------------------------------------------------

    def _check(self, other):
        if self.chart != other.chart:
            raise ChartMismatchError(f"{self.chart} vs {other.chart}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PolyScalar.constant(self.chart, other)
        self._check(other)
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            s = terms.get(exp, Fraction(0)) + c
            if s == 0:
                terms.pop(exp, None)
            else:
                terms[exp] = s
        return PolyScalar(self.chart, terms)

    __radd__ = __add__

    def __neg__(self):
        return PolyScalar(self.chart, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PolyScalar.constant(self.chart, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _frac(other)
            if c == 0:
                return PolyScalar.zero(self.chart)
            return PolyScalar(self.chart, {e: k * c for e, k in self.terms.items()})
        if not isinstance(other, PolyScalar):
            return NotImplemented
        self._check(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return PolyScalar(self.chart, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = PolyScalar.constant(self.chart, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PolyScalar.constant(self.chart, other)
        return (
            isinstance(other, PolyScalar)
            and self.chart == other.chart
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.chart, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, variables: Iterable[int]) -> int:
        """Max total degree in the listed variables; -1 for zero."""
        vs = tuple(variables)
        return max((sum(e[i] for i in vs) for e in self.terms), default=-1)

    def sorted_terms(self):
        """Terms in descending graded-lex order (the canonical listing)."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    # -- calculus ------------------------------------------------------------

    def partial(self, i: int) -> "PolyScalar":
        terms = {}
        for exp, c in self.terms.items():
            if exp[i] == 0:
                continue
            e = list(exp)
            k = e[i]
            e[i] -= 1
            e = tuple(e)
            s = terms.get(e, Fraction(0)) + c * k
            if s == 0:
                terms.pop(e, None)
            else:
                terms[e] = s
        return PolyScalar(self.chart, terms)

    def evaluate_exact(self, point: Sequence[Rat]) -> Fraction:
        if len(point) != self.chart.dim:
            raise ShapeError("point/chart dimension mismatch")
        pt = [_frac(x) for x in point]
        total = Fraction(0)
        for exp, c in self.terms.items():
            v = c
            for x, e in zip(pt, exp):
                if e:
                    v *= x**e
            total += v
        return total

    def evaluate(self, point: Sequence[float]) -> float:
        if len(point) != self.chart.dim:
            raise ShapeError("point/chart dimension mismatch")
        total = 0.0
        for exp, c in self.terms.items():
            v = float(c)
            for x, e in zip(point, exp):
                if e:
                    v *= float(x) ** e
            total += v
        return total

    def compose(self, polys: Sequence["PolyScalar"]) -> "PolyScalar":
        """Substitute polys[i] (all on one source chart) for the i-th coordinate."""
        if len(polys) != self.chart.dim:
            raise ShapeError("substitution list length != chart dim")
        if self.chart.dim == 0:
            raise ShapeError("cannot infer source chart for a dim-0 composition")
        src = polys[0].chart
        out = PolyScalar.zero(src)
        for exp, c in self.terms.items():
            term = PolyScalar.constant(src, c)
            for p, e in zip(polys, exp):
                if e:
                    term = term * p**e
            out = out + term
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                f"{self.chart.names[i]}^{e}" if e > 1 else self.chart.names[i]
                for i, e in enumerate(exp)
                if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


class _AlternatingTensor:
    """Shared skeleton of multivectors and forms.

    Components live on strictly increasing index tuples of length ``degree``;
    constructor input with arbitrary index order is sign-normalized, repeated
    indices drop out.
    """

    __slots__ = ("chart", "degree", "components")

    def __init__(self, chart: Chart, degree: int, components=None):
        if degree < 0:
            raise DegreeError("tensor degree must be >= 0")
        if degree > chart.dim and components:
            raise DegreeError(f"degree {degree} tensor on dim {chart.dim} must be zero")
        clean: dict = {}
        if components:
            for idx, p in components.items():
                idx = tuple(int(i) for i in idx)
                if len(idx) != degree:
                    raise DegreeError(f"index {idx} has wrong length for degree {degree}")
                if any(not 0 <= i < chart.dim for i in idx):
                    raise ShapeError(f"index {idx} out of range for dim {chart.dim}")
                if not isinstance(p, PolyScalar):
                    p = PolyScalar.constant(chart, p)
                if p.chart != chart:
                    raise ChartMismatchError("component polynomial on wrong chart")
                sidx, sign = sort_index(idx)
                if sidx is None or p.is_zero():
                    continue
                q = p if sign == 1 else -p
                cur = clean.get(sidx)
                s = q if cur is None else cur + q
                if s.is_zero():
                    clean.pop(sidx, None)
                else:
                    clean[sidx] = s
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "components", clean)

    def __setattr__(self, *a):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def _check(self, other):
        if type(self) is not type(other):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if self.chart != other.chart:
            raise ChartMismatchError(f"{self.chart} vs {other.chart}")

    def component(self, idx) -> PolyScalar:
        """Component at an arbitrary index tuple, including antisymmetry sign."""
        sidx, sign = sort_index(idx)
        if sidx is None:
            return PolyScalar.zero(self.chart)
        p = self.components.get(sidx)
        if p is None:
            return PolyScalar.zero(self.chart)
        return p if sign == 1 else -p

    def __add__(self, other):
        self._check(other)
        if self.degree != other.degree:
            raise DegreeError("cannot add tensors of different degree")
        comp = dict(self.components)
        for idx, p in other.components.items():
            s = comp.get(idx, PolyScalar.zero(self.chart)) + p
            if s.is_zero():
                comp.pop(idx, None)
            else:
                comp[idx] = s
        return type(self)(self.chart, self.degree, comp)

    def __neg__(self):
        return type(self)(
            self.chart, self.degree, {i: -p for i, p in self.components.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PolyScalar)):
            return type(self)(
                self.chart,
                self.degree,
                {i: p * other for i, p in self.components.items()},
            )
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.chart == other.chart
            and self.degree == other.degree
            and self.components == other.components
        )

    def __hash__(self):
        return hash(
            (type(self).__name__, self.chart, self.degree, frozenset(self.components))
        )

    def is_zero(self) -> bool:
        return not self.components

    def wedge(self, other):
        self._check(other)
        k = self.degree + other.degree
        comp: dict = {}
        for i1, p1 in self.components.items():
            for i2, p2 in other.components.items():
                sidx, sign = sort_index(i1 + i2)
                if sidx is None:
                    continue
                q = p1 * p2
                if sign == -1:
                    q = -q
                cur = comp.get(sidx)
                s = q if cur is None else cur + q
                if s.is_zero():
                    comp.pop(sidx, None)
                else:
                    comp[sidx] = s
        if k > self.chart.dim:
            return type(self)(self.chart, k, {})
        return type(self)(self.chart, k, comp)

    def evaluate_at(self, point) -> np.ndarray:
        """Dense fully antisymmetric numeric component array at a point.

        Degree 0 returns a scalar, degree 1 a vector, degree k the full
        (n,)*k array with all index permutations filled in.
        """
        n = self.chart.dim
        if self.degree == 0:
            p = self.components.get((), None)
            return float(p.evaluate(point)) if p is not None else 0.0
        out = np.zeros((n,) * self.degree)
        for idx, p in self.components.items():
            v = p.evaluate(point)
            if v == 0.0:
                continue
            for perm in itertools.permutations(range(self.degree)):
                _, sign = sort_index(perm)
                out[tuple(idx[a] for a in perm)] = sign * v
        return out

    def evaluate_components_exact(self, point) -> dict:
        """Exact values of the stored (increasing-index) components."""
        return {
            idx: p.evaluate_exact(point)
            for idx, p in self.components.items()
            if p.evaluate_exact(point) != 0
        }

    def __repr__(self):
        kind = type(self).__name__
        if not self.components:
            return f"{kind}(deg {self.degree}, 0)"
        parts = [
            f"[{','.join(str(i + 1) for i in idx)}]: {p!r}"
            for idx, p in sorted(self.components.items())
        ]
        return f"{kind}(deg {self.degree}, {'; '.join(parts)})"


class PolyKVector(_AlternatingTensor):
    """Antisymmetric multivector field with polynomial components."""


class PolyKForm(_AlternatingTensor):
    """Differential form with polynomial components."""


def zero_vector(chart: Chart, degree: int = 1) -> PolyKVector:
    return PolyKVector(chart, degree, {})


def zero_form(chart: Chart, degree: int = 1) -> PolyKForm:
    return PolyKForm(chart, degree, {})


def coordinate_vector(chart: Chart, i: int) -> PolyKVector:
    """The coordinate vector field d/dx_i."""
    return PolyKVector(chart, 1, {(i,): PolyScalar.constant(chart, 1)})


def coordinate_form(chart: Chart, i: int) -> PolyKForm:
    """The coordinate 1-form dx_i."""
    return PolyKForm(chart, 1, {(i,): PolyScalar.constant(chart, 1)})


def differential(f: PolyScalar) -> PolyKForm:
    """df as a 1-form."""
    chart = f.chart
    return PolyKForm(chart, 1, {(i,): f.partial(i) for i in range(chart.dim)})


def exterior_derivative(alpha: PolyKForm) -> PolyKForm:
    """Coordinate exterior derivative; satisfies d(d(alpha)) = 0 exactly."""
    chart = alpha.chart
    k = alpha.degree
    comp: dict = {}
    for idx, p in alpha.components.items():
        for j in range(chart.dim):
            dp = p.partial(j)
            if dp.is_zero():
                continue
            sidx, sign = sort_index((j,) + idx)
            if sidx is None:
                continue
            q = dp if sign == 1 else -dp
            cur = comp.get(sidx)
            s = q if cur is None else cur + q
            if s.is_zero():
                comp.pop(sidx, None)
            else:
                comp[sidx] = s
    if k + 1 > chart.dim:
        return PolyKForm(chart, k + 1, {})
    return PolyKForm(chart, k + 1, comp)


def interior_product(X: PolyKVector, alpha: PolyKForm) -> PolyKForm:
    """Contraction of a vector field into the first slot of a form."""
    if X.degree != 1:
        raise DegreeError("interior product needs a vector field (degree 1)")
    if alpha.degree == 0:
        raise DegreeError("cannot contract into a 0-form")
    if X.chart != alpha.chart:
        raise ChartMismatchError("interior product across charts")
    chart = alpha.chart
    comp: dict = {}
    for idx, p in alpha.components.items():
        for pos, i in enumerate(idx):
            xi = X.components.get((i,))
            if xi is None:
                continue
            rest = idx[:pos] + idx[pos + 1 :]
            q = xi * p
            if pos % 2 == 1:
                q = -q
            cur = comp.get(rest)
            s = q if cur is None else cur + q
            if s.is_zero():
                comp.pop(rest, None)
            else:
                comp[rest] = s
    return PolyKForm(chart, alpha.degree - 1, comp)


def apply_vector(X: PolyKVector, f: PolyScalar) -> PolyScalar:
    """X(f) = sum_i X^i df/dx_i."""
    if X.degree != 1:
        raise DegreeError("apply_vector needs a degree-1 field")
    out = PolyScalar.zero(f.chart)
    for (i,), xi in X.components.items():
        out = out + xi * f.partial(i)
    return out


def vector_bracket(X: PolyKVector, Y: PolyKVector) -> PolyKVector:
    """Lie bracket [X, Y] of vector fields."""
    if X.degree != 1 or Y.degree != 1:
        raise DegreeError("vector bracket needs degree-1 fields")
    if X.chart != Y.chart:
        raise ChartMismatchError("bracket across charts")
    chart = X.chart
    comp = {}
    for j in range(chart.dim):
        yj = Y.components.get((j,), PolyScalar.zero(chart))
        xj = X.components.get((j,), PolyScalar.zero(chart))
        p = apply_vector(X, yj) - apply_vector(Y, xj)
        if not p.is_zero():
            comp[(j,)] = p
    return PolyKVector(chart, 1, comp)


def lie_derivative(X: PolyKVector, T):
    """Lie derivative along a vector field.

    Forms use the Cartan formula L_X = d(i_X .) + i_X d(.); scalars are just
    X(f); multivectors use the derivation extension of [X, .] over wedges.
    """
    if X.degree != 1:
        raise DegreeError("lie_derivative needs a degree-1 field")
    if isinstance(T, PolyScalar):
        return apply_vector(X, T)
    if isinstance(T, PolyKForm):
        if T.degree == 0:
            p = T.components.get((), PolyScalar.zero(T.chart))
            return PolyKForm(T.chart, 0, {(): apply_vector(X, p)})
        return exterior_derivative(interior_product(X, T)) + interior_product(
            X, exterior_derivative(T)
        )
    if isinstance(T, PolyKVector):
        if X.chart != T.chart:
            raise ChartMismatchError("lie_derivative across charts")
        chart = T.chart
        if T.degree == 0:
            p = T.components.get((), PolyScalar.zero(chart))
            return PolyKVector(chart, 0, {(): apply_vector(X, p)})
        comp: dict = {}

        def add(idx, p):
            sidx, sign = sort_index(idx)
            if sidx is None or p.is_zero():
                return
            q = p if sign == 1 else -p
            cur = comp.get(sidx)
            s = q if cur is None else cur + q
            if s.is_zero():
                comp.pop(sidx, None)
            else:
                comp[sidx] = s

        for idx, f in T.components.items():
            add(idx, apply_vector(X, f))
            # [X, d/dx_i] = -sum_j (dX^j/dx_i) d/dx_j, applied in each slot
            for pos, i in enumerate(idx):
                for (j,), xj in X.components.items():
                    dxj = xj.partial(i)
                    if dxj.is_zero():
                        continue
                    add(idx[:pos] + (j,) + idx[pos + 1 :], -(f * dxj))
        return PolyKVector(chart, T.degree, comp)
    raise TypeError(f"cannot take Lie derivative of {type(T).__name__}")


def wedge(a, b):
    """Wedge product of two multivectors or two forms."""
    return a.wedge(b)


def evaluate_at(T, point):
    """Dense numeric component array of a tensor at a point."""
    return T.evaluate_at(point)


class PolyMap:
    """A polynomial map between charts, given by target-component polynomials."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source: Chart, target: Chart, components: Sequence[PolyScalar]):
        components = tuple(components)
        if len(components) != target.dim:
            raise ShapeError("component count must equal target dimension")
        for p in components:
            if p.chart != source:
                raise ChartMismatchError("map components must live on the source chart")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "components", components)

    def __setattr__(self, *a):
        raise AttributeError("PolyMap is immutable")

    @staticmethod
    def identity(chart: Chart) -> "PolyMap":
        return PolyMap(chart, chart, chart.coordinates())

    def __call__(self, point):
        return np.array([p.evaluate(point) for p in self.components])

    def evaluate_exact(self, point):
        return tuple(p.evaluate_exact(point) for p in self.components)

    def compose_scalar(self, f: PolyScalar) -> PolyScalar:
        """Pull back a scalar on the target: f o phi."""
        if f.chart != self.target:
            raise ChartMismatchError("scalar not on the target chart")
        if self.target.dim == 0:
            c = f.terms.get((), Fraction(0))
            return PolyScalar.constant(self.source, c)
        return f.compose(self.components)

    def jacobian(self):
        """Symbolic Jacobian: entry [i][j] = d phi^i / dx_j on the source."""
        return [
            [p.partial(j) for j in range(self.source.dim)] for p in self.components
        ]

    def jacobian_at(self, point) -> np.ndarray:
        J = np.zeros((self.target.dim, self.source.dim))
        for i, p in enumerate(self.components):
            for j in range(self.source.dim):
                J[i, j] = p.partial(j).evaluate(point)
        return J


def pullback_form(phi: PolyMap, alpha: PolyKForm) -> PolyKForm:
    """phi^* alpha; commutes with the exterior derivative."""
    if alpha.chart != phi.target:
        raise ChartMismatchError("form does not live on the map's target")
    src = phi.source
    if alpha.degree == 0:
        p = alpha.components.get((), PolyScalar.zero(alpha.chart))
        return PolyKForm(src, 0, {(): phi.compose_scalar(p)})
    dphi = [differential(p) for p in phi.components]  # d(phi^i) on the source
    out = PolyKForm(src, alpha.degree, {})
    for idx, p in alpha.components.items():
        term = PolyKForm(src, 0, {(): phi.compose_scalar(p)})
        for i in idx:
            term = term.wedge(dphi[i])
        out = out + term
    return out


def pushforward_vector_at_point(phi: PolyMap, point, v) -> np.ndarray:
    """The image (T phi) v of a tangent vector at a point of the source."""
    v = np.asarray(v, dtype=float)
    if v.shape != (phi.source.dim,):
        raise ShapeError("tangent vector has wrong dimension")
    return phi.jacobian_at(point) @ v
