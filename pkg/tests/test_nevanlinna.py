import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brodylab.curves import ConstantCurve, ExponentialCurve, RationalCurve, WeierstrassCurve
from brodylab.errors import QuadratureError
from brodylab.lattice import Lattice, lattice_points_in_disk
from brodylab.nevanlinna import (
    PoleDivisor,
    area_energy,
    characteristic,
    counting_function,
    energy_profile,
    mean_energy_estimate,
    packing_density_estimate,
)
from brodylab.projgeom import ProjectivePoint


@pytest.mark.parametrize("d", [1, 2, 3])
def test_monomial_profile_closed_form(d):
    radii = [0.5, 1.0, 2.0, 7.0]
    prof = energy_profile(RationalCurve.monomial(d), radii, tol=1e-9)
    for r, a, t in zip(prof.radii, prof.disk_energy, prof.characteristic):
        assert a == pytest.approx(d * r ** (2 * d) / (1 + r ** (2 * d)), rel=1e-8, abs=1e-12)
        ref_t = 0.5 * math.log((1 + r ** (2 * d)) / 2) if r > 1 else 0.0
        assert t == pytest.approx(ref_t, rel=1e-8, abs=1e-12)


def test_characteristic_of_line_at_e():
    assert characteristic(RationalCurve.monomial(1), math.e) == pytest.approx(0.5 * math.log((1 + math.e**2) / 2), abs=1e-7)
    assert characteristic(RationalCurve.monomial(1), 1.0) == 0.0
    with pytest.raises(ValueError):
        characteristic(RationalCurve.monomial(1), 0.5)


def test_exponential_characteristic_linear():
    # [1 : e^z]: T(r) = r / pi + O(log r)
    ez = ExponentialCurve(((1, 0), (1, 1)))
    t1, t2 = characteristic(ez, 20.0), characteristic(ez, 40.0)
    assert (t2 - t1) / 20 == pytest.approx(1 / math.pi, rel=2e-2)


def test_constant_curve_has_no_energy():
    prof = energy_profile(ConstantCurve(ProjectivePoint([1, 1])), [1, 5])
    assert np.all(prof.disk_energy == 0) and np.all(prof.characteristic == 0)


def test_profile_monotone_and_error_reported():
    prof = energy_profile(ExponentialCurve(((1, 0), (1, 1j))), np.linspace(1, 12, 12), tol=1e-7)
    assert np.all(np.diff(prof.disk_energy) >= 0)
    assert np.all(np.diff(prof.characteristic) >= 0)
    assert np.all(prof.quadrature_error >= 0)
    # |df|^2 <= 1/(4 pi) for this curve, so T(r) <= r^2 / 8
    assert np.all(prof.characteristic <= prof.radii**2 / 8 + prof.quadrature_error)


def test_threads_do_not_change_results():
    curve = WeierstrassCurve()
    a = energy_profile(curve, [2, 4, 6], tol=1e-6, threads=1)
    b = energy_profile(curve, [2, 4, 6], tol=1e-6, threads=4)
    assert np.array_equal(a.disk_energy, b.disk_energy)
    assert np.array_equal(a.characteristic, b.characteristic)


def test_profile_to_csv(tmp_path):
    prof = energy_profile(RationalCurve.monomial(1), [1, 2])
    prof.to_csv(tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "r,disk_energy,T,mean_running,packing_running,err"
    assert len(lines) == 3


def test_area_energy_and_errors():
    val, err = area_energy(RationalCurve.monomial(1), 1.0, tol=1e-8)
    assert val == pytest.approx(0.5, abs=1e-8) and err < 1e-6
    with pytest.raises(ValueError):
        area_energy(RationalCurve.monomial(1), 0)
    with pytest.raises(ValueError):
        energy_profile(RationalCurve.monomial(1), [])


def test_quadrature_error_carries_estimate():
    err = QuadratureError("x", 1.5)
    assert err.estimate == 1.5


def test_window_estimates_short_radius_rejected():
    with pytest.raises(ValueError):
        mean_energy_estimate(RationalCurve.monomial(1), 2.0)


def test_rational_curve_has_zero_mean_energy_trend():
    est = mean_energy_estimate(RationalCurve.monomial(2), 16.0)
    assert est.estimate < 0.05
    assert est.window_max == pytest.approx(8.0)


def test_wp_mean_energy_small_radius():
    # degree 2 per fundamental domain on the hexagonal lattice: 2 / covolume
    lat = Lattice(1, complex(0.5, math.sqrt(3) / 2))
    est = packing_density_estimate(WeierstrassCurve(lat), 8.0)
    assert est.estimate == pytest.approx(2 / lat.covolume, rel=0.08)


def test_counting_function_examples():
    assert counting_function(PoleDivisor(((0, 1),)), math.e) == pytest.approx(1.0)
    assert counting_function(PoleDivisor(((2, 3),)), 4.0) == pytest.approx(3 * math.log(2))
    assert counting_function(PoleDivisor(((5, 1),)), 4.0) == 0.0
    with pytest.raises(ValueError):
        PoleDivisor(((1, 0),))
    with pytest.raises(ValueError):
        PoleDivisor(((1, 1), (1, 2)))


@settings(max_examples=25)
@given(
    st.lists(st.complex_numbers(max_magnitude=30, allow_nan=False, allow_infinity=False), min_size=1, max_size=8, unique=True),
    st.integers(1, 4),
    st.integers(1, 4),
    st.floats(1, 40),
)
def test_counting_linear_in_multiplicity(points, m1, m2, r):
    d1 = PoleDivisor(tuple((z, m1) for z in points))
    d2 = PoleDivisor(tuple((z, m2) for z in points))
    d12 = PoleDivisor(tuple((z, m1 + m2) for z in points))
    assert counting_function(d12, r) == pytest.approx(counting_function(d1, r) + counting_function(d2, r), rel=1e-12, abs=1e-12)


def test_counting_over_lattice_quadratic():
    pts = lattice_points_in_disk(Lattice(), 20)
    n = counting_function(PoleDivisor.from_lattice(pts), 20)
    assert n == pytest.approx(math.pi * 400 / 2, rel=0.05)
