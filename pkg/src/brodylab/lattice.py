"""Rank-2 lattices in C and the lattice sums built on them.

Periodic sums ``sum_l (z - l)^-p`` are evaluated by reducing ``z`` to
``w = z - l0`` (``l0`` the nearest lattice point), summing directly over
the window ``0 < |mu| <= R`` and adding the exact tail expansion::

    sum_{|mu|>R} (w - mu)^-p = (-1)^p sum_k C(k+p-1, k) w^k S_{k+p}(R)

with ``S_m(R) = sum_{|mu|>R} mu^-m``.  Odd moments vanish because the
window is symmetric; even moments are ``G_m`` minus the window part, with
the Eisenstein series ``G_m`` taken from its q-expansion in extended
precision.  The remainder after ``K`` terms is bounded with
:func:`lattice_sum_tail_bound`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .errors import AmbiguousNearestPointError, DivergentSumError

SERIES_TERMS = 40
_MP_DPS = 50


def _gauss_reduce(b1: complex, b2: complex) -> tuple[complex, complex]:
    """Lagrange-Gauss reduction, oriented so that Im(b2/b1) > 0."""
    if abs(b1) > abs(b2):
        b1, b2 = b2, b1
    while True:
        mu = math.floor((b2 * b1.conjugate()).real / abs(b1) ** 2 + 0.5)
        b2 = b2 - mu * b1
        if abs(b2) < abs(b1) * (1 - 1e-15):
            b1, b2 = b2, b1
            continue
        break
    if (b2 / b1).imag < 0:
        b2 = -b2
    return b1, b2


@dataclass(frozen=True)
class Lattice:
    """The lattice ``Z omega1 + Z omega2``.

    ``delta`` defaults to half the shortest nonzero vector, the largest
    value with ``2 delta <= |l1 - l2|`` for distinct lattice points.
    """

    omega1: complex = 1.0
    omega2: complex = 1j
    delta: float | None = None
    reduced: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        w1, w2 = complex(self.omega1), complex(self.omega2)
        object.__setattr__(self, "omega1", w1)
        object.__setattr__(self, "omega2", w2)
        if abs((w1.conjugate() * w2).imag) <= 1e-14 * abs(w1) * abs(w2):
            raise ValueError("lattice generators are linearly dependent over R")
        object.__setattr__(self, "reduced", _gauss_reduce(w1, w2))
        shortest = abs(self.reduced[0])
        if self.delta is None:
            object.__setattr__(self, "delta", shortest / 2)
        elif not 0 < self.delta <= shortest / 2 * (1 + 1e-12):
            raise ValueError(f"delta={self.delta} violates 2*delta <= {shortest}")
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def covolume(self) -> float:
        """Area of a fundamental domain."""
        return abs((self.omega1.conjugate() * self.omega2).imag)

    @property
    def shortest_vector(self) -> float:
        return abs(self.reduced[0])

    @property
    def longest_generator(self) -> float:
        """Longer vector of the reduced basis."""
        return abs(self.reduced[1])

    @property
    def cell_radius(self) -> float:
        """Circumradius of the centered fundamental parallelogram of the reduced basis."""
        b1, b2 = self.reduced
        return max(abs(b1 + b2), abs(b1 - b2)) / 2

    def scaled(self, c: float) -> "Lattice":
        return Lattice(self.omega1 * c, self.omega2 * c, self.delta * abs(c))

    def sublattice(self, m1: int, m2: int) -> "Lattice":
        return Lattice(self.omega1 * m1, self.omega2 * m2)

    def coords(self, z) -> np.ndarray:
        """Real coordinates of ``z`` in the (omega1, omega2) basis, shape ``(..., 2)``."""
        z = np.asarray(z, dtype=complex)
        w1, w2 = self.omega1, self.omega2
        det = (w1.conjugate() * w2).imag
        x = -(np.conj(w2) * z).imag / det
        y = (np.conj(w1) * z).imag / det
        return np.stack([x, y], axis=-1)

    def to_dict(self) -> dict:
        return {
            "omega1": [self.omega1.real, self.omega1.imag],
            "omega2": [self.omega2.real, self.omega2.imag],
            "delta": self.delta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Lattice":
        return cls(complex(*d["omega1"]), complex(*d["omega2"]), d.get("delta"))


def _sort_key(lam: complex):
    arg = math.atan2(lam.imag, lam.real)
    if arg <= -math.pi + 1e-15:
        arg = math.pi
    return (round(abs(lam), 12), arg)


def lattice_points_in_disk(lat: Lattice, R: float) -> np.ndarray:
    """All lattice points with ``|l| <= R``, ordered by ``(|l|, arg l)``."""
    if R < 0:
        return np.zeros(0, dtype=complex)
    b1, b2 = lat.reduced
    det = (b1.conjugate() * b2).imag
    m_max = int(math.ceil(R * abs(b2) / det)) + 1
    n_max = int(math.ceil(R * abs(b1) / det)) + 1
    m, n = np.meshgrid(np.arange(-m_max, m_max + 1), np.arange(-n_max, n_max + 1), indexing="ij")
    pts = (m * b1 + n * b2).ravel()
    pts = pts[np.abs(pts) <= R * (1 + 1e-12)]
    # the origin is exactly 0; keep generated points free of -0.0 artefacts
    pts = pts + 0.0
    return np.array(sorted(pts.tolist(), key=_sort_key), dtype=complex)


def lattice_sum_tail_bound(lat: Lattice, s: float, R: float) -> float:
    """Upper bound on ``sum_{|l| > R} |l|^-s``.

    Every point outside the disk owns a translate of the centered
    fundamental parallelogram (area ``covolume``, circumradius ``r0``);
    comparing each term with the integral of ``(|x| - r0)^-s`` over its
    cell gives, with ``u = R - 2 r0``::

        (2 pi / covolume) * (u^(2-s) / (s-2) + r0 u^(1-s) / (s-1))
    """
    if s <= 2:
        raise DivergentSumError(f"sum of |l|^-s diverges for s={s} <= 2")
    r0 = lat.cell_radius
    if R < 2 * lat.longest_generator or R <= 2 * r0:
        raise ValueError(f"R={R} below 2 * longest generator / 2 * cell radius")
    u = R - 2 * r0
    return 2 * math.pi / lat.covolume * (u ** (2 - s) / (s - 2) + r0 * u ** (1 - s) / (s - 1))


def _candidates(lat: Lattice, z: np.ndarray) -> np.ndarray:
    b1, b2 = lat.reduced
    det = (b1.conjugate() * b2).imag
    x = np.floor(-(np.conj(b2) * z).imag / det + 0.5)
    y = np.floor((np.conj(b1) * z).imag / det + 0.5)
    base = x * b1 + y * b2
    offs = np.array([i * b1 + j * b2 for i in (0, -1, 1) for j in (0, -1, 1)])
    return base[..., None] + offs


def nearest_points(lat: Lattice, z) -> np.ndarray:
    """Vectorized nearest lattice point (ties resolved by candidate order)."""
    z = np.asarray(z, dtype=complex)
    cand = _candidates(lat, z)
    idx = np.argmin(np.abs(z[..., None] - cand), axis=-1)
    return np.take_along_axis(cand, idx[..., None], axis=-1)[..., 0]


def nearest_lattice_point(lat: Lattice, z: complex, strict: bool = False, tie_tol: float = 1e-12) -> complex:
    """Nearest lattice point; ties go to smaller ``|l|``, then smaller arg.

    With ``strict=True`` an equidistant pair raises
    :class:`AmbiguousNearestPointError` instead.
    """
    z = complex(z)
    cand = _candidates(lat, np.array(z))
    dist = np.abs(z - cand)
    best = dist.min()
    tied = [complex(c) + 0.0 for c, d in zip(cand, dist) if d <= best + tie_tol * max(1.0, best)]
    tied = sorted(set(tied), key=_sort_key)
    if strict and len(tied) > 1:
        raise AmbiguousNearestPointError(f"z={z} is equidistant from {tied}")
    return tied[0]


def _lattice_key(lat: Lattice) -> tuple:
    b1, b2 = lat.reduced
    return (b1.real, b1.imag, b2.real, b2.imag)


@lru_cache(maxsize=64)
def _eisenstein_mp(key: tuple, m: int):
    b1 = mpmath.mpc(key[0], key[1])
    b2 = mpmath.mpc(key[2], key[3])
    with mpmath.workdps(_MP_DPS):
        tau = b2 / b1
        q = mpmath.exp(2j * mpmath.pi * tau)
        lam = mpmath.mpf(0)
        n = 1
        qn = q
        while True:
            term = mpmath.mpf(n) ** (m - 1) * qn / (1 - qn)
            lam += term
            if n > 5 and abs(term) < mpmath.mpf(10) ** (-_MP_DPS + 5) * max(1, abs(lam)):
                break
            n += 1
            qn *= q
        g_tau = 2 * mpmath.zeta(m) + 2 * (2j * mpmath.pi) ** m / mpmath.factorial(m - 1) * lam
        return g_tau / b1**m


def eisenstein_series(lat: Lattice, m: int) -> complex:
    """``G_m = sum_{l != 0} l^-m`` for even ``m >= 4`` (q-expansion, 50 digits)."""
    if m < 4 or m % 2:
        raise ValueError("Eisenstein series needs even m >= 4")
    return complex(_eisenstein_mp(_lattice_key(lat), m))


def default_window_radius(lat: Lattice) -> float:
    """Radius of the coefficient window used by random patterns."""
    return max(6 * lat.cell_radius, 2 * lat.longest_generator)


def engine_radius(lat: Lattice) -> float:
    """Smallest direct-sum radius accepted by :class:`PeriodicSums`."""
    return max(3 * lat.cell_radius, 2 * lat.longest_generator)


@lru_cache(maxsize=64)
def _tail_moments(key: tuple, R: float, m_max: int) -> np.ndarray:
    lat = Lattice(complex(key[0], key[1]), complex(key[2], key[3]))
    pts = lattice_points_in_disk(lat, R)[1:]
    out = np.zeros(m_max + 1, dtype=complex)
    with mpmath.workdps(_MP_DPS):
        mp_pts = [mpmath.mpc(p.real, p.imag) for p in pts]
        for m in range(4, m_max + 1, 2):
            partial = mpmath.fsum(p ** (-m) for p in mp_pts)
            out[m] = complex(_eisenstein_mp(key, m) - partial)
    return out


class PeriodicSums:
    """Regular parts of the periodic sums ``sum_l (z - l)^-p``.

    For a point ``w`` measured from a chosen lattice point ``l0`` the
    *regular part* omits the ``l0`` term::

        p >= 3:  sum_{l != 0} (w - l)^-p
        p == 2:  sum_{l != 0} ((w - l)^-2 - l^-2)        (Weierstrass normalization)
    """

    def __init__(self, lat: Lattice, R: float | None = None, terms: int = SERIES_TERMS):
        self.lat = lat
        self.R = float(R) if R is not None else engine_radius(lat)
        if self.R < engine_radius(lat) * (1 - 1e-12):
            raise ValueError(f"window radius must be at least {engine_radius(lat):.6g}")
        self.terms = terms
        pts = lattice_points_in_disk(lat, self.R)
        self.window = pts[1:]
        # smallest modulus outside the window; the tail series in w
        # converges with ratio |w| / rho_out
        ring = lattice_points_in_disk(lat, self.R + 2 * lat.longest_generator + lat.cell_radius)
        self.rho_out = float(np.min(np.abs(ring[len(pts):])))
        self._inv_sq = np.sum(self.window ** -2.0)
        self._moments = _tail_moments(_lattice_key(lat), self.R, terms + 6)

    @property
    def max_offset(self) -> float:
        """Largest ``|w|`` accepted by :meth:`regular` (ratio 1/3 against ``rho_out``)."""
        return self.rho_out / 3

    def remainder_bound(self, p: int, w_abs: float | None = None) -> float:
        """Rigorous bound on the series terms beyond ``terms`` for ``|w| <= w_abs``.

        Uses ``|mu|^-(k+p) <= rho_out^-(k+p-3) |mu|^-3`` outside the window
        and the integral tail bound for the exponent 3.
        """
        if w_abs is None:
            w_abs = self.lat.cell_radius
        t3 = lattice_sum_tail_bound(self.lat, 3, self.R)
        x = w_abs / self.rho_out
        total = 0.0
        for k in range(self.terms + 1, self.terms + 400):
            t = math.comb(k + p - 1, k) * x**k * self.rho_out ** (3 - p) * t3
            total += t
            if t < 1e-40:
                break
        return total

    def regular(self, w, p: int) -> np.ndarray:
        return self.regular_pair(w, p)[0]

    def regular_pair(self, w, p: int) -> tuple[np.ndarray, np.ndarray]:
        """Regular sums of orders ``p`` and ``p + 1`` sharing one reciprocal table."""
        w = np.asarray(w, dtype=complex)
        if np.any(np.abs(w) > self.max_offset):
            raise ValueError("offset too far from its lattice point for the tail expansion")
        inv = 1.0 / (w[..., None] - self.window)
        pw = inv * inv
        for _ in range(p - 2):
            pw *= inv
        out = []
        for q in (p, p + 1):
            direct = pw.sum(axis=-1)
            out.append(direct + self._tail(w, q))
            if q == p:
                pw *= inv
        return out[0], out[1]

    def _tail(self, w, p):
        k0 = 0
        shift = 0.0
        if p == 2:
            shift = self._inv_sq
            k0 = 1
        # Horner on sum_k C(k+p-1, k) S_{k+p} w^k
        acc = np.zeros_like(w)
        for k in range(self.terms, k0 - 1, -1):
            acc = acc * w + math.comb(k + p - 1, k) * self._moments[k + p]
        if k0:
            acc = acc * w**k0
        return (-1) ** p * acc - shift

    def full(self, z, p: int) -> np.ndarray:
        """Complete sum at ``z`` (pole terms included); ``p >= 3`` or Weierstrass ``p == 2``."""
        z = np.asarray(z, dtype=complex)
        l0 = nearest_points(self.lat, z)
        w = z - l0
        return w ** (-float(p)) + self.regular(w, p)


@lru_cache(maxsize=64)
def periodic_sums(lat: Lattice) -> PeriodicSums:
    """Cached engine with the default window for ``lat``."""
    return PeriodicSums(lat)
