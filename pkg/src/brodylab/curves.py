"""Concrete holomorphic curves C -> CP^N with exact first-order jets.

Every curve exposes a vectorized :meth:`CurveFamily.lift` returning a
homogeneous lift ``v(z)`` and its z-derivative.  Pole-bearing families
(Weierstrass p and the lattice family) use the pole-free chart lift
around the nearest lattice point everywhere, so the lift is bounded and
never vanishes; :func:`eval_jet` gives the plain affine lift instead.

Curves are reparametrized as ``f(z) = base(z / scale + shift)``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import ClassVar

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import AmbiguousNearestPointError, ChartError, PoleProximityError
from .lattice import (
    Lattice,
    PeriodicSums,
    default_window_radius,
    lattice_points_in_disk,
    lattice_sum_tail_bound,
    nearest_lattice_point,
    nearest_points,
    periodic_sums,
)
from .projgeom import ProjectiveJet, ProjectivePoint, density_from_lift

__all__ = [
    "CoefficientPattern",
    "ConstantCurve",
    "CurveFamily",
    "ExponentialCurve",
    "Lattice",
    "LatticeFamilyCurve",
    "ProjectiveImage",
    "RationalCurve",
    "WeierstrassCurve",
    "curve_from_dict",
    "eval_chart",
    "eval_jet",
    "lattice_points_in_disk",
    "lattice_sum_tail_bound",
    "rescale",
    "translate",
]

RNG_NAME = "numpy.random.PCG64"


def _c(x) -> list:
    x = complex(x)
    return [x.real, x.imag]


def _uc(p) -> complex:
    return complex(p[0], p[1])


@dataclass(frozen=True, kw_only=True)
class CurveFamily:
    """Base class: ``f(z) = base(z / scale + shift)``."""

    scale: float = 1.0
    shift: complex = 0j
    kind: ClassVar[str] = "abstract"

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "shift", complex(self.shift))

    @property
    def n_coords(self) -> int:
        raise NotImplementedError

    def _base_lift(self, u: np.ndarray):
        raise NotImplementedError

    def lift(self, z):
        """Homogeneous lift and its z-derivative, shapes ``(..., N+1)``."""
        z = np.asarray(z, dtype=complex)
        v, dv = self._base_lift(z / self.scale + self.shift)
        return v, dv / self.scale

    def density(self, z) -> np.ndarray:
        """``|df|^2`` at ``z`` (vectorized)."""
        return density_from_lift(*self.lift(z))

    def _base_jet(self, u: complex):
        v, dv = self._base_lift(np.array([u]))
        return v[0], dv[0], 1.0

    @property
    def feature_length(self) -> float | None:
        """Length scale on which the density varies, if there is a uniform one."""
        return None

    @property
    def z_lattice(self) -> Lattice | None:
        """Period/pole lattice in the z variable, if any."""
        return None

    @property
    def z_origin(self) -> complex:
        """Image in the z plane of the base point ``u = 0``."""
        return -self.scale * self.shift

    def _reparam_dict(self) -> dict:
        return {"scale": self.scale, "shift": _c(self.shift)}

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantCurve(CurveFamily):
    point: ProjectivePoint
    kind: ClassVar[str] = "constant"

    def __post_init__(self):
        super().__post_init__()
        if not isinstance(self.point, ProjectivePoint):
            object.__setattr__(self, "point", ProjectivePoint(self.point))

    @property
    def n_coords(self) -> int:
        return len(self.point.coords)

    def _base_lift(self, u):
        v = np.broadcast_to(self.point.as_array(), u.shape + (self.n_coords,)).copy()
        return v, np.zeros_like(v)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "point": [_c(c) for c in self.point.coords], **self._reparam_dict()}


@dataclass(frozen=True)
class RationalCurve(CurveFamily):
    """``[p_0(z) : ... : p_N(z)]``; coefficients lowest degree first."""

    polys: tuple
    kind: ClassVar[str] = "rational"

    def __post_init__(self):
        super().__post_init__()
        polys = tuple(tuple(complex(c) for c in p) for p in self.polys)
        if len(polys) < 2 or not any(any(c != 0 for c in p) for p in polys):
            raise ValueError("need at least two polynomials, not all zero")
        object.__setattr__(self, "polys", polys)

    @classmethod
    def monomial(cls, d: int) -> "RationalCurve":
        """The curve ``[1 : z^d]``."""
        return cls(((1.0,), (0.0,) * d + (1.0,)))

    @property
    def n_coords(self) -> int:
        return len(self.polys)

    @property
    def degree(self) -> int:
        return max(len(np.trim_zeros(np.array(p), "b")) - 1 for p in self.polys)

    def _base_lift(self, u):
        v = np.stack([npoly.polyval(u, np.array(p)) for p in self.polys], axis=-1)
        dv = np.stack([npoly.polyval(u, npoly.polyder(np.array(p))) for p in self.polys], axis=-1)
        return v.astype(complex), dv.astype(complex)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "polys": [[_c(c) for c in p] for p in self.polys], **self._reparam_dict()}


@dataclass(frozen=True)
class ExponentialCurve(CurveFamily):
    """``[c_0 e^{a_0 z} : ... : c_N e^{a_N z}]`` given as pairs ``(c_n, a_n)``."""

    terms: tuple
    kind: ClassVar[str] = "exponential"

    def __post_init__(self):
        super().__post_init__()
        terms = tuple((complex(c), complex(a)) for c, a in self.terms)
        if len(terms) < 2 or all(c == 0 for c, _ in terms):
            raise ValueError("need at least two terms with some c_n != 0")
        object.__setattr__(self, "terms", terms)

    @property
    def n_coords(self) -> int:
        return len(self.terms)

    @property
    def feature_length(self):
        a = [a for c, a in self.terms if c != 0]
        spread = max(abs(x - y) for x in a for y in a)
        return self.scale / spread if spread > 0 else None

    def _base_lift(self, u):
        c = np.array([t[0] for t in self.terms])
        a = np.array([t[1] for t in self.terms])
        live = c != 0
        logc = np.where(live, np.log(np.where(live, np.abs(c), 1.0)), -np.inf)
        expo = a * u[..., None]
        # common real factor per point keeps the largest entry O(1); the
        # density formula is invariant under (v, v') -> (s v, s v')
        m = np.max(expo.real + logc, axis=-1, keepdims=True)
        v = np.where(live, c * np.exp(np.where(live, expo - m, 0)), 0)
        return v, a * v

    def to_dict(self) -> dict:
        return {"kind": self.kind, "terms": [[_c(c), _c(a)] for c, a in self.terms], **self._reparam_dict()}


class _PoleBearing(CurveFamily):
    """Shared pieces of the lattice-periodic pole-bearing families."""

    lattice: Lattice

    _probe_span: ClassVar[tuple] = (0.0, 1.0)

    @cached_property
    def probe_sup(self) -> float:
        """Coarse-grid maximum of ``|df|`` of the unscaled curve.

        Peaks of ``|df|`` have width about ``1 / |df|``; this sets the
        length scale used by the quadrature and search grids.
        """
        b1, b2 = self.lattice.reduced
        lo, hi = self._probe_span
        s = np.linspace(lo, hi, int(32 * (hi - lo)) + 1)
        S, T = np.meshgrid(s, s, indexing="ij")
        v, dv = self._base_lift(S * b1 + T * b2)
        return float(np.sqrt(density_from_lift(v, dv).max()))

    @property
    def feature_length(self):
        base = min(self.lattice.shortest_vector / 2, 2.0 / max(self.probe_sup, 1e-300))
        return self.scale * base

    @property
    def z_lattice(self):
        return self.lattice.scaled(self.scale)

    def _chart_offset(self, z: complex):
        u = complex(z) / self.scale + self.shift
        lam0 = nearest_lattice_point(self.lattice, u, strict=True)
        return u, lam0, u - lam0


@dataclass(frozen=True)
class WeierstrassCurve(_PoleBearing):
    """``[1 : p(z)]`` for the Weierstrass function of ``lattice``."""

    lattice: Lattice = field(default_factory=Lattice)
    kind: ClassVar[str] = "weierstrass_p"

    @property
    def n_coords(self) -> int:
        return 2

    @cached_property
    def _sums(self) -> PeriodicSums:
        return periodic_sums(self.lattice)

    def _parts(self, u):
        w = u - nearest_points(self.lattice, u)
        return (w, *self._sums.regular_pair(w, 2))

    def _base_lift(self, u):
        w, p2, p3 = self._parts(u)
        w2 = w * w
        v = np.stack([w2, 1 + w2 * p2], axis=-1)
        dv = np.stack([2 * w, 2 * w * p2 - 2 * w2 * p3], axis=-1)
        return v, dv

    def wp(self, z) -> tuple[np.ndarray, np.ndarray]:
        """``p`` and ``p'`` at ``z`` in the base variable (no reparametrization)."""
        w, p2, p3 = self._parts(np.asarray(z, dtype=complex))
        return w**-2.0 + p2, -2 * w**-3.0 - 2 * p3

    def _base_jet(self, u):
        w, p2, p3 = self._parts(np.array([u]))
        if abs(w[0]) < self.lattice.delta / 4:
            raise PoleProximityError(f"u={u} is within delta/4 of a pole; use eval_chart")
        wp = w[0] ** -2.0 + p2[0]
        dwp = -2 * w[0] ** -3.0 - 2 * p3[0]
        return np.array([1.0, wp]), np.array([0.0, dwp]), 1.0

    def chart(self, z):
        u, lam0, w = self._chart_offset(z)
        if abs(w) >= self.lattice.delta:
            raise ChartError(f"|z - l0| = {abs(w)} >= delta")
        p2, p3 = (x[0] for x in self._sums.regular_pair(np.array([w]), 2))
        g = np.array([1 + w * w * p2])
        dg = np.array([2 * w * p2 - 2 * w * w * p3]) / self.scale
        return g, dg, w * w

    def to_dict(self) -> dict:
        return {"kind": self.kind, "lattice": self.lattice.to_dict(), **self._reparam_dict()}


@dataclass(frozen=True)
class CoefficientPattern:
    """How the coefficients ``a_{n,l}`` of the lattice family are produced.

    ``random``: modulus uniform on ``[A, 2A]`` and phase uniform, drawn
    from PCG64(seed) on the curve's window; outside the window every
    point carries one background vector drawn from the same stream.
    ``constant``: the same vector at every lattice point.
    ``periodic``: a block of shape ``(M1, M2, N)`` repeated with period
    ``(M1 omega1, M2 omega2)``.
    """

    mode: str
    seed: int | None = None
    vector: tuple | None = None
    block: tuple | None = None

    def __post_init__(self):
        if self.mode not in ("random", "constant", "periodic"):
            raise ValueError(f"unknown pattern mode {self.mode!r}")
        if self.mode == "random" and self.seed is None:
            raise ValueError("random pattern needs a seed")
        if self.mode == "constant":
            object.__setattr__(self, "vector", tuple(complex(c) for c in self.vector))
        if self.mode == "periodic":
            arr = np.asarray(self.block, dtype=complex)
            if arr.ndim != 3:
                raise ValueError("periodic block must have shape (M1, M2, N)")
            object.__setattr__(self, "block", tuple(tuple(tuple(r) for r in row) for row in arr.tolist()))

    @classmethod
    def random(cls, seed: int) -> "CoefficientPattern":
        return cls("random", seed=int(seed))

    @classmethod
    def constant(cls, vector) -> "CoefficientPattern":
        return cls("constant", vector=tuple(vector))

    @classmethod
    def periodic(cls, block) -> "CoefficientPattern":
        return cls("periodic", block=block)

    def to_dict(self) -> dict:
        d = {"mode": self.mode}
        if self.mode == "random":
            d["seed"] = self.seed
            d["generator"] = RNG_NAME
        elif self.mode == "constant":
            d["vector"] = [_c(c) for c in self.vector]
        else:
            d["block"] = [[[_c(c) for c in col] for col in row] for row in self.block]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CoefficientPattern":
        if d["mode"] == "random":
            return cls.random(d["seed"])
        if d["mode"] == "constant":
            return cls.constant([_uc(c) for c in d["vector"]])
        return cls.periodic([[[_uc(c) for c in col] for col in row] for row in d["block"]])


def annulus_sample(rng: np.random.Generator, A: float, shape) -> np.ndarray:
    modulus = rng.uniform(A, 2 * A, size=shape)
    phase = rng.uniform(0.0, 2 * math.pi, size=shape)
    return modulus * np.exp(1j * phase)


@lru_cache(maxsize=256)
def _engine(lat: Lattice, R: float | None) -> PeriodicSums:
    return periodic_sums(lat) if R is None else PeriodicSums(lat, R)


@dataclass(frozen=True)
class LatticeFamilyCurve(_PoleBearing):
    """``[1 : f_1 : ... : f_N]`` with ``f_n = N^-1/2 sum_l a_{n,l} (z - l)^-3``.

    The periodic background of the coefficients is summed with the
    corrected engine of :mod:`brodylab.lattice`; the finitely many window
    deviations (random patterns) are summed exactly.
    """

    lattice: Lattice = field(default_factory=Lattice)
    A: float = 1.0
    N: int = 1
    pattern: CoefficientPattern = field(default_factory=lambda: CoefficientPattern.random(0))
    window: float | None = None
    r_cut: float | None = None
    tail_tol: float = 1e-10
    kind: ClassVar[str] = "lattice_family"
    _probe_span: ClassVar[tuple] = (-1.5, 1.5)

    def __post_init__(self):
        super().__post_init__()
        if self.N < 1 or self.A <= 0:
            raise ValueError("need N >= 1 and A > 0")
        if self.window is None:
            object.__setattr__(self, "window", default_window_radius(self.lattice))
        block = self._block
        if block.shape[2] != self.N:
            raise ValueError(f"pattern has {block.shape[2]} components, expected N={self.N}")
        mods = np.concatenate([np.abs(block).ravel(), np.abs(self._window_coeffs).ravel()])
        if np.any(mods < self.A * (1 - 1e-12)) or np.any(mods > 2 * self.A * (1 + 1e-12)):
            raise ValueError("coefficients must satisfy A <= |a| <= 2A")
        bound = self.tail_bound()
        if bound >= self.tail_tol:
            raise ValueError(f"truncation bound {bound:.3g} exceeds tail_tol {self.tail_tol:.3g}")

    @property
    def n_coords(self) -> int:
        return self.N + 1

    @cached_property
    def _random_draw(self):
        rng = np.random.Generator(np.random.PCG64(self.pattern.seed))
        background = annulus_sample(rng, self.A, self.N)
        window = annulus_sample(rng, self.A, (len(self.window_points), self.N))
        return background, window

    @cached_property
    def _block(self) -> np.ndarray:
        p = self.pattern
        if p.mode == "constant":
            return np.array(p.vector, dtype=complex).reshape(1, 1, -1)
        if p.mode == "periodic":
            return np.array(p.block, dtype=complex)
        return self._random_draw[0].reshape(1, 1, -1)

    @cached_property
    def window_points(self) -> np.ndarray:
        """Enumerated lattice window on which coefficients are stored."""
        return lattice_points_in_disk(self.lattice, self.window)

    @cached_property
    def _window_coeffs(self) -> np.ndarray:
        if self.pattern.mode == "random":
            return self._random_draw[1]
        return self._background_at(self.window_points)

    @cached_property
    def _deviations(self):
        dev = self._window_coeffs - self._background_at(self.window_points)
        keep = np.any(dev != 0, axis=1)
        return self.window_points[keep], dev[keep]

    def _int_coords(self, lam) -> np.ndarray:
        return np.rint(self.lattice.coords(lam)).astype(np.int64)

    def _background_at(self, lam) -> np.ndarray:
        ij = self._int_coords(lam)
        m1, m2 = self._block.shape[:2]
        return self._block[ij[..., 0] % m1, ij[..., 1] % m2]

    def coefficient(self, lam: complex) -> np.ndarray:
        """The vector ``(a_{1,l}, ..., a_{N,l})``."""
        hit = np.flatnonzero(np.abs(self.window_points - lam) < 1e-9 * (1 + abs(lam)))
        if hit.size:
            return self._window_coeffs[hit[0]].copy()
        return self._background_at(np.array(lam))

    @cached_property
    def _sublattice(self) -> Lattice:
        m1, m2 = self._block.shape[:2]
        return self.lattice.sublattice(m1, m2)

    def tail_bound(self) -> float:
        """Bound on the truncation error of the coefficient sums (values and derivatives).

        Series remainder of the periodic engine plus a floating-point
        allowance of ``1e-12`` per background block entry.
        """
        eng = _engine(self._sublattice, self.r_cut)
        m1, m2 = self._block.shape[:2]
        per = max(eng.remainder_bound(3), 3 * eng.remainder_bound(4)) + 1e-12
        return 2 * self.A / math.sqrt(self.N) * m1 * m2 * per

    def _sums(self, u):
        """Chart data: offset ``w``, pole coefficient ``a0`` and regular sums S3, S4."""
        u = np.asarray(u, dtype=complex)
        lam0 = nearest_points(self.lattice, u)
        w = u - lam0
        shape = u.shape
        a0 = np.zeros(shape + (self.N,), dtype=complex)
        s3 = np.zeros_like(a0)
        s4 = np.zeros_like(a0)
        m1, m2 = self._block.shape[:2]
        sub = self._sublattice
        eng = _engine(sub, self.r_cut)
        ij0 = self._int_coords(lam0)
        for i in range(m1):
            for j in range(m2):
                b = i * self.lattice.omega1 + j * self.lattice.omega2
                c = self._block[i, j]
                own = (ij0[..., 0] % m1 == i) & (ij0[..., 1] % m2 == j)
                center = np.where(own, lam0 - b, nearest_points(sub, u - b))
                wb = u - b - center
                r3, r4 = eng.regular_pair(wb, 3)
                inv = np.where(own, 0, 1.0 / np.where(own, 1.0, wb))
                inv3 = inv * inv * inv
                r3 = r3 + inv3
                r4 = r4 + inv3 * inv
                s3 += r3[..., None] * c
                s4 += r4[..., None] * c
                a0 += np.where(own, 1.0, 0.0)[..., None] * c
        pts, dev = self._deviations
        if len(pts):
            diff = u[..., None] - pts
            at = np.abs(pts - lam0[..., None]) < 1e-9 * (1 + np.abs(pts))
            inv = 1.0 / np.where(at, 1.0, diff)
            inv3 = np.where(at, 0, inv**3)
            s3 += inv3 @ dev
            s4 += np.where(at, 0, inv**4) @ dev
            a0 += at.astype(float) @ dev
        return w, a0, s3, s4

    def _base_lift(self, u):
        w, a0, s3, s4 = self._sums(u)
        rn = 1 / math.sqrt(self.N)
        w2 = (w * w)[..., None]
        w3 = w2 * w[..., None]
        g = (a0 + w3 * s3) * rn
        dg = 3 * w2 * (s3 - w[..., None] * s4) * rn
        v = np.concatenate([w3, g], axis=-1)
        dv = np.concatenate([3 * w2, dg], axis=-1)
        return v, dv

    def values(self, z) -> tuple[np.ndarray, np.ndarray]:
        """Affine coordinates ``f_n`` and derivatives at ``z`` (base variable)."""
        w, a0, s3, s4 = self._sums(np.asarray(z, dtype=complex))
        rn = 1 / math.sqrt(self.N)
        wc = w[..., None]
        return (a0 / wc**3 + s3) * rn, -3 * (a0 / wc**4 + s4) * rn

    def _base_jet(self, u):
        w = u - nearest_lattice_point(self.lattice, u)
        if abs(w) < self.lattice.delta / 4:
            raise PoleProximityError(f"u={u} is within delta/4 of a pole; use eval_chart")
        f, df = self.values(np.array([u]))
        return np.concatenate([[1.0], f[0]]), np.concatenate([[0.0], df[0]]), 1.0

    def chart(self, z):
        u, lam0, w = self._chart_offset(z)
        if abs(w) >= self.lattice.delta:
            raise ChartError(f"|z - l0| = {abs(w)} >= delta")
        v, dv = self._base_lift(np.array([u]))
        return v[0, 1:], dv[0, 1:] / self.scale, w**3

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "lattice": self.lattice.to_dict(),
            "A": self.A,
            "N": self.N,
            "pattern": self.pattern.to_dict(),
            "window": self.window,
            "r_cut": self.r_cut,
            "tail_tol": self.tail_tol,
            **self._reparam_dict(),
        }


@dataclass(frozen=True)
class ProjectiveImage(CurveFamily):
    """``M . base`` for an invertible matrix ``M`` acting on homogeneous coordinates."""

    base: CurveFamily
    matrix: tuple
    kind: ClassVar[str] = "image"

    def __post_init__(self):
        super().__post_init__()
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.base.n_coords,) * 2 or abs(np.linalg.det(m)) < 1e-14:
            raise ValueError("matrix must be square, invertible and match the base curve")
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in m.tolist()))

    @classmethod
    def swap(cls, base: CurveFamily, i: int = 0, j: int = 1) -> "ProjectiveImage":
        perm = np.eye(base.n_coords)
        perm[[i, j]] = perm[[j, i]]
        return cls(base, perm)

    @property
    def n_coords(self) -> int:
        return self.base.n_coords

    @property
    def feature_length(self):
        return self.base.feature_length

    @property
    def z_lattice(self):
        return self.base.z_lattice

    @property
    def z_origin(self):
        return self.base.z_origin

    def lift(self, z):
        v, dv = self.base.lift(np.asarray(z, dtype=complex) / self.scale + self.shift)
        m = np.array(self.matrix, dtype=complex)
        return v @ m.T, dv @ m.T / self.scale

    def _base_jet(self, u):
        jet = eval_jet(self.base, u)
        m = np.array(self.matrix, dtype=complex)
        return m @ jet.value.as_array(), m @ np.array(jet.derivative), jet.chart_scale

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "base": self.base.to_dict(),
            "matrix": [[_c(c) for c in row] for row in self.matrix],
            **self._reparam_dict(),
        }


def eval_jet(curve: CurveFamily, z: complex) -> ProjectiveJet:
    """Jet of the standard lift at ``z``.

    Pole-bearing families use the affine lift ``[1 : f]`` and raise
    :class:`PoleProximityError` within ``delta/4`` of a pole.
    """
    v, dv, cs = curve._base_jet(complex(z) / curve.scale + curve.shift)
    return ProjectiveJet(ProjectivePoint(v), np.asarray(dv) / curve.scale, cs)


def eval_chart(curve: CurveFamily, z: complex):
    """Pole-free chart data near the nearest lattice point ``l0``.

    Returns ``(g, g', local)`` with ``local = (u - l0)^k`` (k = 3 for the
    lattice family, 2 for Weierstrass p) and ``g = local * f`` so that
    ``[local : g]`` is a lift of the curve.  Raises
    :class:`AmbiguousNearestPointError` for equidistant points and
    :class:`ChartError` when ``|u - l0| >= delta``.
    """
    if not isinstance(curve, _PoleBearing):
        raise TypeError(f"{curve.kind} curves have no pole chart")
    return curve.chart(z)


def chart_jet(curve: CurveFamily, z: complex) -> ProjectiveJet:
    """Jet of the chart lift ``[local : g]`` (defined at the poles too)."""
    g, dg, local = eval_chart(curve, z)
    u = complex(z) / curve.scale + curve.shift
    w = u - nearest_lattice_point(curve.lattice, u)
    k = 3 if isinstance(curve, LatticeFamilyCurve) else 2
    dlocal = k * w ** (k - 1) / curve.scale
    return ProjectiveJet(ProjectivePoint(np.concatenate([[local], g])), np.concatenate([[dlocal], dg]), local)


def rescale(curve: CurveFamily, c: float) -> CurveFamily:
    """The curve ``z -> curve(z / c)``; coefficients are reparametrized when possible."""
    if not c > 0:
        raise ValueError("rescale factor must be positive")
    if c == 1:
        return curve
    plain = curve.scale == 1 and curve.shift == 0
    if isinstance(curve, RationalCurve) and plain:
        polys = tuple(tuple(a * c**-k for k, a in enumerate(p)) for p in curve.polys)
        return RationalCurve(polys)
    if isinstance(curve, ExponentialCurve) and plain:
        return ExponentialCurve(tuple((cn, an / c) for cn, an in curve.terms))
    if isinstance(curve, ConstantCurve):
        return curve
    return dataclasses.replace(curve, scale=curve.scale * c)


def translate(curve: CurveFamily, a: complex) -> CurveFamily:
    """The curve ``z -> curve(z + a)``."""
    return dataclasses.replace(curve, shift=curve.shift + complex(a) / curve.scale)


def curve_from_dict(d: dict) -> CurveFamily:
    kind = d["kind"]
    extra = {"scale": d.get("scale", 1.0), "shift": _uc(d.get("shift", [0.0, 0.0]))}
    if kind == "constant":
        return ConstantCurve(ProjectivePoint([_uc(c) for c in d["point"]]), **extra)
    if kind == "rational":
        return RationalCurve(tuple(tuple(_uc(c) for c in p) for p in d["polys"]), **extra)
    if kind == "exponential":
        return ExponentialCurve(tuple((_uc(c), _uc(a)) for c, a in d["terms"]), **extra)
    if kind == "weierstrass_p":
        return WeierstrassCurve(Lattice.from_dict(d["lattice"]), **extra)
    if kind == "lattice_family":
        return LatticeFamilyCurve(
            Lattice.from_dict(d["lattice"]),
            d["A"],
            d["N"],
            CoefficientPattern.from_dict(d["pattern"]),
            d["window"],
            d.get("r_cut"),
            d.get("tail_tol", 1e-10),
            **extra,
        )
    if kind == "image":
        matrix = [[_uc(c) for c in row] for row in d["matrix"]]
        return ProjectiveImage(curve_from_dict(d["base"]), matrix, **extra)
    raise ValueError(f"unknown curve kind {kind!r}")
