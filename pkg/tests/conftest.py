import random
from fractions import Fraction

import pytest

from diraclab.fields import Chart, PolyKForm, PolyKVector, PolyScalar


def random_poly(rng: random.Random, chart: Chart, max_degree=3, terms=3) -> PolyScalar:
    out = {}
    for _ in range(rng.randint(1, terms)):
        deg = rng.randint(0, max_degree)
        exp = [0] * chart.dim
        for _ in range(deg):
            if chart.dim:
                exp[rng.randrange(chart.dim)] += 1
        c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        out[tuple(exp)] = out.get(tuple(exp), Fraction(0)) + c
    return PolyScalar(chart, out)


def random_form(rng, chart, degree, max_degree=3, terms=2) -> PolyKForm:
    comps = {}
    import itertools

    indices = list(itertools.combinations(range(chart.dim), degree))
    if not indices:
        return PolyKForm(chart, degree, {})
    for idx in rng.sample(indices, k=min(len(indices), rng.randint(1, len(indices)))):
        comps[idx] = random_poly(rng, chart, max_degree, terms)
    return PolyKForm(chart, degree, comps)


def random_vector(rng, chart, degree=1, max_degree=3, terms=2) -> PolyKVector:
    comps = {}
    import itertools

    indices = list(itertools.combinations(range(chart.dim), degree))
    if not indices:
        return PolyKVector(chart, degree, {})
    for idx in rng.sample(indices, k=min(len(indices), rng.randint(1, len(indices)))):
        comps[idx] = random_poly(rng, chart, max_degree, terms)
    return PolyKVector(chart, degree, comps)


def random_point(rng, dim, numerators=9, denominator=4):
    return tuple(Fraction(rng.randint(-numerators, numerators), denominator) for _ in range(dim))


@pytest.fixture
def rng():
    return random.Random(20240811)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    lines = getattr(test_acceptance, "RESULT_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
