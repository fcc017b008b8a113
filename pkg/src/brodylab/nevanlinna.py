"""Disk energy, the Shimizu-Ahlfors characteristic and their growth rates.

All integrals are over disks centred at 0 in polar coordinates.  With
``a(rho) = rho * integral_0^{2 pi} |df|^2(rho e^{i theta}) d theta``::

    A(t) = int_0^t a(rho) d rho
    T(r) = int_1^r A(t) dt / t = int_0^r a(rho) log(r / max(1, rho)) d rho

The second form (Fubini) lets one radial pass produce every tabulated
radius.  The radial integral uses Gauss-Legendre panels whose
boundaries include 0, 1, every requested radius, the dyadic radii and,
for curves with a characteristic length, a uniform subdivision at that
length; panels are bisected until the estimate stabilizes.  The angular
integral is a trapezoid rule (spectrally accurate for periodic
integrands) doubled until converged.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .curves import CurveFamily
from .errors import QuadratureError

GL_ORDER = 10
MAX_BISECTIONS = 40
MAX_ANGULAR = 2**22
WINDOW_SAMPLES = 9

_GL_X, _GL_W = leggauss(GL_ORDER)


@dataclass
class EnergyProfile:
    """Energy integrals tabulated at increasing radii."""

    radii: np.ndarray
    disk_energy: np.ndarray
    characteristic: np.ndarray
    quadrature_error: np.ndarray

    @property
    def mean_energy_running(self) -> np.ndarray:
        return 2 * self.characteristic / (np.pi * self.radii**2)

    @property
    def packing_running(self) -> np.ndarray:
        return self.disk_energy / (np.pi * self.radii**2)

    def rows(self):
        for r, a, t, m, p, e in zip(
            self.radii,
            self.disk_energy,
            self.characteristic,
            self.mean_energy_running,
            self.packing_running,
            self.quadrature_error,
        ):
            yield r, a, t, m, p, e

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["r", "disk_energy", "T", "mean_running", "packing_running", "err"])
            for row in self.rows():
                w.writerow([format(float(x), ".17g") for x in row])


@dataclass(frozen=True)
class PoleDivisor:
    """Finitely many poles with positive integer multiplicities."""

    points: tuple = field(default_factory=tuple)

    def __post_init__(self):
        pts = tuple((complex(z), int(m)) for z, m in self.points)
        if any(m < 1 for _, m in pts):
            raise ValueError("multiplicities must be positive")
        locs = [z for z, _ in pts]
        if len(set(locs)) != len(locs):
            raise ValueError("pole locations must be distinct")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_lattice(cls, points, multiplicity: int = 1) -> "PoleDivisor":
        return cls(tuple((z, multiplicity) for z in points))


def _angular_integral(curve: CurveFamily, rho: np.ndarray, tol: float, feature: float | None):
    """``integral_0^{2pi} |df|^2(rho e^{i theta}) d theta`` for each rho, plus error."""
    length = feature if feature else 1.0
    n = int(max(32, 2 ** math.ceil(math.log2(max(1.0, 4 * math.pi * float(rho.max()) / length)))))
    theta = 2 * math.pi * np.arange(n) / n
    vals = curve.density(rho[:, None] * np.exp(1j * theta))
    coarse = vals.mean(axis=1) * 2 * math.pi
    while True:
        mid = theta + math.pi / n
        new = curve.density(rho[:, None] * np.exp(1j * mid))
        fine = 0.5 * (coarse + new.mean(axis=1) * 2 * math.pi)
        diff = np.abs(fine - coarse)
        if np.all(diff <= tol * np.abs(fine) + 1e-300):
            return fine, diff
        n *= 2
        if n > MAX_ANGULAR:
            raise QuadratureError(f"angular rule did not converge at rho={rho.max():.6g}", float(np.sum(fine)))
        theta = np.sort(np.concatenate([theta, mid]))
        coarse = fine


def _panel(curve, a, b, tol, feature):
    """Nodes, weights and a(rho) values of a Gauss-Legendre panel, with angular error."""
    half = 0.5 * (b - a)
    rho = a + half * (_GL_X + 1)
    ang, ang_err = _angular_integral(curve, rho, tol * 0.1, feature)
    w = half * _GL_W
    return rho, w, rho * ang, float(np.sum(w * rho * ang_err))


def _breakpoints(curve: CurveFamily, radii) -> np.ndarray:
    rmax = float(max(radii))
    pts = {0.0, 1.0, *map(float, radii)}
    k = 1
    while 2.0**k < rmax:
        pts.add(2.0**k)
        k += 1
    k = -1
    while 2.0**k > 1e-3:
        pts.add(2.0**k)
        k -= 1
    feat = curve.feature_length
    if feat:
        pts.update(np.arange(0, rmax, feat).tolist())
    return np.array(sorted(p for p in pts if p <= rmax))


def _integrate_interval(curve, a, b, tol, feature, total_scale):
    """Adaptive bisection on [a, b]; returns list of accepted panels and error."""
    stack = [(a, b, 0, _panel(curve, a, b, tol, feature))]
    done = []
    while stack:
        lo, hi, depth, coarse = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _panel(curve, lo, mid, tol, feature)
        right = _panel(curve, mid, hi, tol, feature)
        ic = float(np.sum(coarse[1] * coarse[2]))
        ifine = float(np.sum(left[1] * left[2]) + np.sum(right[1] * right[2]))
        diff = abs(ifine - ic)
        budget = tol * (abs(ifine) + total_scale * (hi - lo))
        if diff <= budget or diff < 1e-15 * max(abs(ifine), 1e-300):
            done.append((lo, hi, left, right, diff + left[3] + right[3]))
        elif depth >= MAX_BISECTIONS:
            raise QuadratureError(f"radial refinement did not converge on [{lo:.6g}, {hi:.6g}]", ifine)
        else:
            stack.append((mid, hi, depth + 1, right))
            stack.append((lo, mid, depth + 1, left))
    done.sort(key=lambda p: p[0])
    return done


def energy_profile(curve: CurveFamily, radii, tol: float = 1e-6, threads: int = 1) -> EnergyProfile:
    """Disk energy and characteristic at every radius in ``radii``.

    Raises
    ------
    QuadratureError
        If the radial or angular refinement does not reach ``tol``; the
        exception carries the last disk-energy estimate at the largest
        radius.
    """
    radii = np.asarray(sorted(set(float(r) for r in radii)))
    if radii.size == 0 or radii[0] <= 0:
        raise ValueError("radii must be positive")
    bps = _breakpoints(curve, radii)
    feature = curve.feature_length
    # rough scale for the absolute part of the panel budget
    probe = _panel(curve, 0.0, bps[-1], tol, feature)
    total_scale = abs(float(np.sum(probe[1] * probe[2]))) / bps[-1]

    intervals = list(zip(bps[:-1], bps[1:]))

    def work(iv):
        return _integrate_interval(curve, iv[0], iv[1], tol, feature, total_scale)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            chunks = list(ex.map(work, intervals))
    else:
        chunks = [work(iv) for iv in intervals]

    nodes, weights, values, errs, ends = [], [], [], [], []
    for panels in chunks:
        for lo, hi, left, right, err in panels:
            for part in (left, right):
                nodes.append(part[0])
                weights.append(part[1])
                values.append(part[2])
            errs.append(err)
            ends.append(hi)
    rho = np.concatenate(nodes)
    wa = np.concatenate(weights) * np.concatenate(values)
    ends = np.array(ends)
    errs = np.array(errs)

    disk = np.empty_like(radii)
    char = np.empty_like(radii)
    qerr = np.empty_like(radii)
    for k, r in enumerate(radii):
        inside = rho <= r
        disk[k] = np.sum(wa[inside])
        char[k] = np.sum(wa[inside] * np.log(r / np.maximum(1.0, rho[inside]))) if r > 1 else 0.0
        qerr[k] = np.sum(errs[ends <= r * (1 + 1e-14)]) * max(1.0, math.log(max(r, 1.0)))
    # the integrand is nonnegative, so cumulative sums are monotone up to rounding
    disk = np.maximum.accumulate(disk)
    char = np.maximum.accumulate(char)
    return EnergyProfile(radii, disk, char, qerr)


def area_energy(curve: CurveFamily, t: float, tol: float = 1e-6) -> tuple[float, float]:
    """``integral_{|z| <= t} |df|^2 dx dy`` and its error estimate."""
    if not t > 0:
        raise ValueError("t must be positive")
    prof = energy_profile(curve, [t], tol)
    return float(prof.disk_energy[0]), float(prof.quadrature_error[0])


def characteristic(curve: CurveFamily, r: float, tol: float = 1e-6) -> float:
    """Shimizu-Ahlfors characteristic ``T(r, f)`` (``r >= 1``)."""
    if r < 1:
        raise ValueError("r must be at least 1")
    if r == 1:
        return 0.0
    return float(energy_profile(curve, [r], tol).characteristic[0])


@dataclass(frozen=True)
class WindowEstimate:
    """Finite-radius summary of a growth rate over ``[r_max/2, r_max]``.

    ``estimate`` is the largest sampled value and ``window_max`` the
    radius where it occurs; ``trend_slope`` is the least-squares slope
    of the samples against ``1/r``.
    """

    estimate: float
    window_max: float
    trend_slope: float
    radii: tuple
    values: tuple
    error: float

    def __iter__(self):
        return iter((self.estimate, self.window_max, self.trend_slope))


def window_radii(r_max: float) -> np.ndarray:
    return r_max * 2.0 ** (np.linspace(-1.0, 0.0, WINDOW_SAMPLES))


def _window(values, radii, err) -> WindowEstimate:
    k = int(np.argmax(values))
    slope = float(np.polyfit(1 / radii, values, 1)[0])
    return WindowEstimate(float(values[k]), float(radii[k]), slope, tuple(radii.tolist()), tuple(values.tolist()), float(err))


def _check_rmax(r_max):
    if r_max < 4:
        raise ValueError("r_max must be at least 4")


def mean_energy_estimate(curve: CurveFamily, r_max: float, tol: float = 1e-6, threads: int = 1) -> WindowEstimate:
    """Window summary of ``2 T(r) / (pi r^2)``."""
    _check_rmax(r_max)
    radii = window_radii(r_max)
    prof = energy_profile(curve, radii, tol, threads)
    err = float(np.max(2 * prof.quadrature_error / (np.pi * radii**2)))
    return _window(prof.mean_energy_running, radii, err)


def packing_density_estimate(curve: CurveFamily, r_max: float, tol: float = 1e-6, threads: int = 1) -> WindowEstimate:
    """Window summary of ``A(r) / (pi r^2)``."""
    _check_rmax(r_max)
    radii = window_radii(r_max)
    prof = energy_profile(curve, radii, tol, threads)
    err = float(np.max(prof.quadrature_error / (np.pi * radii**2)))
    return _window(prof.packing_running, radii, err)


def counting_function(poles: PoleDivisor, r: float) -> float:
    """``N(r) = sum_{0<|l|<=r} m log(r/|l|) + m_0 log r`` (exact finite sum)."""
    if r < 1:
        raise ValueError("r must be at least 1")
    total = 0.0
    for z, m in poles.points:
        a = abs(z)
        if a == 0:
            total += m * math.log(r)
        elif a <= r:
            total += m * math.log(r / a)
    return total
