"""Complex projective space with the Fubini-Study metric.

The metric is normalized so that a projective line has area 1.  With
that normalization the pull-back of the Kahler form by a holomorphic
curve ``f`` with homogeneous lift ``v`` is ``|df|^2 dx dy`` where::

    pi |df|^2 = (|v|^2 |v'|^2 - |<v, v'>|^2) / |v|^4

The right-hand side does not depend on the lift, which is why it is the
canonical way densities are computed here.  The Laplacian form
``(1/4pi) Lap log(1 + sum |f_i|^2)`` is only used as a cross-check
(:func:`energy_density_fd`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartError, InvalidPointError

DENSITY_ATOL = 1e-10


def _as_coords(coords) -> tuple:
    arr = np.asarray(coords, dtype=complex).ravel()
    if arr.size < 2:
        raise InvalidPointError("need at least two homogeneous coordinates")
    if not np.all(np.isfinite(arr)):
        raise InvalidPointError(f"non-finite coordinates {arr!r}")
    if not np.any(np.abs(arr) > 0):
        raise InvalidPointError("all homogeneous coordinates are zero")
    return tuple(complex(c) for c in arr)


@dataclass(frozen=True)
class ProjectivePoint:
    """A point ``[z_0 : ... : z_N]`` of CP^N."""

    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", _as_coords(self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)

    def isclose(self, other: "ProjectivePoint", atol: float = 1e-10) -> bool:
        return chordal_distance(self, other) <= atol


@dataclass(frozen=True)
class ProjectiveJet:
    """First-order jet of a holomorphic curve at one point.

    ``derivative`` is the z-derivative of the homogeneous lift whose value
    at the point is ``value.coords``.  ``chart_scale`` records the factor
    the lift was multiplied by (1 for the plain affine lift, ``(z-l)^3``
    in a chart around a pole at ``l`` and so on).
    """

    value: ProjectivePoint
    derivative: tuple
    chart_scale: complex = 1.0

    def __post_init__(self):
        d = tuple(complex(c) for c in np.asarray(self.derivative, dtype=complex).ravel())
        if len(d) != len(self.value.coords):
            raise InvalidPointError("derivative length does not match the point")
        object.__setattr__(self, "derivative", d)
        object.__setattr__(self, "chart_scale", complex(self.chart_scale))


def normalize(p: ProjectivePoint) -> ProjectivePoint:
    """Unit-norm representative whose first nonzero coordinate is real positive."""
    v = p.as_array()
    return ProjectivePoint(_canonical_scalar(v) * v)


def _canonical_scalar(v: np.ndarray) -> complex:
    """Scalar c with c*v unit norm and first nonzero entry real positive."""
    norm = np.linalg.norm(v)
    if norm == 0:
        raise InvalidPointError("all homogeneous coordinates are zero")
    # "first nonzero" relative to the vector scale, so rounding noise in a
    # vanishing coordinate does not decide the phase
    idx = int(np.flatnonzero(np.abs(v) > 1e-14 * norm)[0])
    lead = v[idx]
    return complex(np.conj(lead) / (abs(lead) * norm))


def chordal_distance(p: ProjectivePoint, q: ProjectivePoint) -> float:
    """Fubini-Study chordal distance ``sqrt(1 - |<v,w>|^2 / (|v|^2 |w|^2))``."""
    v, w = p.as_array(), q.as_array()
    if v.shape != w.shape:
        raise InvalidPointError("points live in projective spaces of different dimension")
    v = v / np.linalg.norm(v)
    w = w / np.linalg.norm(w)
    # sin of the angle via the component of w orthogonal to v; this keeps
    # full relative accuracy for nearby points where 1 - cos^2 would not
    perp = w - np.vdot(v, w) * v
    return float(min(1.0, np.linalg.norm(perp)))


def density_from_lift(v: np.ndarray, dv: np.ndarray) -> np.ndarray:
    """Vectorized ``|df|^2`` from lifts of shape ``(..., N+1)``."""
    v = np.asarray(v, dtype=complex)
    dv = np.asarray(dv, dtype=complex)
    nv2 = np.sum(np.abs(v) ** 2, axis=-1)
    alpha = np.sum(np.conj(v) * dv, axis=-1) / nv2
    perp = dv - alpha[..., None] * v
    return np.sum(np.abs(perp) ** 2, axis=-1) / (np.pi * nv2)


def energy_density(jet: ProjectiveJet) -> float:
    """``|df|^2`` at the jet's base point."""
    v = jet.value.as_array()
    dv = np.array(jet.derivative, dtype=complex)
    return float(density_from_lift(v, dv))


def energy_density_fd(curve, z: complex, h: float = 1e-3, chart: int = 0) -> float:
    """Five-point Laplacian of ``(1/4pi) log(1 + sum |f_i|^2)``.

    ``f_i`` are the affine coordinates ``v_i / v_chart`` of the curve's lift,
    so only values (never derivatives) enter.  Raises :class:`ChartError`
    if the chart coordinate vanishes on the stencil; the caller can retry
    with another ``chart`` index.
    """
    z = complex(z)
    stencil = z + h * np.array([0, 1, -1, 1j, -1j])
    v, _ = curve.lift(stencil)
    denom = v[:, chart]
    scale = np.linalg.norm(v, axis=1)
    if np.any(np.abs(denom) <= 1e-12 * scale):
        raise ChartError(f"coordinate {chart} vanishes near z={z}")
    u = np.log(np.sum(np.abs(v / denom[:, None]) ** 2, axis=1))
    lap = (u[1] + u[2] + u[3] + u[4] - 4.0 * u[0]) / h**2
    return float(lap / (4.0 * np.pi))
