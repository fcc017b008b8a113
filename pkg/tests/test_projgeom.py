import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brodylab.curves import ConstantCurve, ExponentialCurve, RationalCurve
from brodylab.errors import ChartError, InvalidPointError
from brodylab.projgeom import (
    ProjectiveJet,
    ProjectivePoint,
    chordal_distance,
    density_from_lift,
    energy_density,
    energy_density_fd,
    normalize,
)

cplx = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)
vec3 = st.lists(cplx, min_size=3, max_size=3).filter(lambda v: max(abs(c) for c in v) > 1e-3)


def test_zero_point_rejected():
    with pytest.raises(InvalidPointError):
        ProjectivePoint([0, 0])
    with pytest.raises(InvalidPointError):
        ProjectivePoint([1, float("nan")])


@pytest.mark.parametrize(
    "coords, expected",
    [([2, 0], [1, 0]), ([0, 3j], [0, 1]), ([1, 1], [1 / math.sqrt(2), 1 / math.sqrt(2)])],
)
def test_normalize_examples(coords, expected):
    assert np.allclose(normalize(ProjectivePoint(coords)).as_array(), expected, atol=1e-15)


@given(vec3, cplx.filter(lambda c: abs(c) > 1e-3))
def test_normalize_is_canonical(v, c):
    p, q = ProjectivePoint(v), ProjectivePoint(np.array(v) * c)
    a, b = normalize(p).as_array(), normalize(q).as_array()
    assert abs(np.linalg.norm(a) - 1) < 1e-12
    lead = a[np.flatnonzero(np.abs(a) > 1e-12)[0]]
    assert abs(lead.imag) < 1e-12 and lead.real > 0
    assert chordal_distance(p, normalize(p)) < 1e-7
    assert chordal_distance(normalize(p), normalize(q)) < 1e-7


def test_chordal_examples():
    e0, e1 = ProjectivePoint([1, 0]), ProjectivePoint([0, 1])
    assert chordal_distance(e0, e1) == pytest.approx(1.0)
    assert chordal_distance(e0, e0) == 0.0
    assert chordal_distance(ProjectivePoint([1, 1]), e0) == pytest.approx(1 / math.sqrt(2), abs=1e-15)


@given(vec3, vec3, vec3)
def test_chordal_metric_axioms(a, b, c):
    p, q, r = map(ProjectivePoint, (a, b, c))
    assert 0 <= chordal_distance(p, q) <= 1
    assert abs(chordal_distance(p, q) - chordal_distance(q, p)) < 1e-12
    assert chordal_distance(p, r) <= chordal_distance(p, q) + chordal_distance(q, r) + 1e-12


def test_density_examples():
    jet = ProjectiveJet(ProjectivePoint([1, 0]), [0, 1])
    assert energy_density(jet) == pytest.approx(1 / math.pi, rel=1e-14)
    jet = ProjectiveJet(ProjectivePoint([1, 1]), [0, 1])
    assert energy_density(jet) == pytest.approx(1 / (4 * math.pi), rel=1e-14)
    assert energy_density(ProjectiveJet(ProjectivePoint([1, 2, 3]), [0, 0, 0])) == 0.0


@settings(max_examples=50)
@given(vec3, vec3, cplx.filter(lambda c: abs(c) > 1e-2), cplx)
def test_density_lift_invariance(v, dv, c, dc):
    # (v, v') -> (c v, c v' + c' v) describes every other holomorphic lift
    v, dv = np.array(v), np.array(dv)
    base = density_from_lift(v, dv)
    other = density_from_lift(c * v, c * dv + dc * v)
    assert abs(other - base) <= 1e-9 * max(1.0, base)


def test_density_unitary_invariance():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        q, _ = np.linalg.qr(m)
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        dv = rng.normal(size=3) + 1j * rng.normal(size=3)
        a, b = density_from_lift(v, dv), density_from_lift(q @ v, q @ dv)
        assert abs(a - b) / a < 1e-10


def test_fd_examples():
    line = RationalCurve.monomial(1)
    assert abs(energy_density_fd(line, 0, 1e-3) - 1 / math.pi) < 1e-5
    assert abs(energy_density_fd(ConstantCurve(ProjectivePoint([1, 2])), 0.3, 1e-3)) < 1e-12
    ez = ExponentialCurve(((1, 0), (1, 1)))
    z = 1 + 1j
    assert abs(energy_density_fd(ez, z, 1e-3) - float(ez.density(z))) < 1e-5


def test_fd_second_order():
    ez = ExponentialCurve(((1, 0), (1, 1)))
    z = 0.4 - 0.3j
    exact = float(ez.density(z))
    g1 = abs(energy_density_fd(ez, z, 2e-2) - exact)
    g2 = abs(energy_density_fd(ez, z, 1e-2) - exact)
    assert 3.5 < g1 / g2 < 4.5


def test_fd_chart_error():
    # [z : 1] has a vanishing chart coordinate 0 at z = 0
    with pytest.raises(ChartError):
        energy_density_fd(RationalCurve(((0, 1), (1,))), 0.0, 1e-3, chart=0)
    assert energy_density_fd(RationalCurve(((0, 1), (1,))), 0.0, 1e-3, chart=1) == pytest.approx(1 / math.pi, abs=1e-5)
