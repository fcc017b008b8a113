"""Restriction of curves (and their 1-jets) to a lattice window."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .curves import CurveFamily, ExponentialCurve, Lattice, _PoleBearing, annulus_sample, chart_jet, eval_jet
from .lattice import lattice_points_in_disk
from .nevanlinna import PoleDivisor, counting_function
from .projgeom import ProjectiveJet, ProjectivePoint, _canonical_scalar, chordal_distance, normalize


def _value_at(curve: CurveFamily, z: complex) -> ProjectivePoint:
    v, _ = curve.lift(np.array([z]))
    return normalize(ProjectivePoint(v[0]))


def _jet_at(curve: CurveFamily, z: complex) -> ProjectiveJet:
    """Jet of the canonical lift: unit norm, first nonzero entry real positive,
    derivative projected orthogonally to the value."""
    if isinstance(curve, _PoleBearing):
        # the chart lift is defined at poles too
        jet = chart_jet(curve, z)
    else:
        jet = eval_jet(curve, z)
    v = jet.value.as_array()
    dv = np.array(jet.derivative)
    c = _canonical_scalar(v)
    u = c * v
    du = c * dv
    # d/dz of the unit lift, up to a phase rotation, keeps only the
    # component orthogonal to the value; this is independent of the lift
    du = du - np.vdot(u, du) * u
    return ProjectiveJet(ProjectivePoint(u), du, 1.0)


@dataclass(frozen=True)
class DiscretizedCurve:
    lattice: Lattice
    R: float
    points: tuple
    samples: tuple
    jets: bool = False

    def to_dict(self) -> dict:
        out = []
        for lam, s in zip(self.points, self.samples):
            entry = {"lambda": [lam.real, lam.imag]}
            if self.jets:
                entry["value"] = [[c.real, c.imag] for c in s.value.coords]
                entry["derivative"] = [[c.real, c.imag] for c in s.derivative]
            else:
                entry["value"] = [[c.real, c.imag] for c in s.coords]
            out.append(entry)
        return {"lattice": self.lattice.to_dict(), "R": self.R, "jets": self.jets, "samples": out}

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")

    def sample_at(self, lam: complex):
        for p, s in zip(self.points, self.samples):
            if abs(p - lam) <= 1e-9 * (1 + abs(lam)):
                return s
        raise KeyError(lam)


def restrict(curve: CurveFamily, lat: Lattice, R: float) -> DiscretizedCurve:
    """Normalized values ``f(l)`` for ``|l| <= R`` in lattice enumeration order."""
    pts = lattice_points_in_disk(lat, R)
    samples = tuple(_value_at(curve, complex(p)) for p in pts)
    return DiscretizedCurve(lat, float(R), tuple(complex(p) for p in pts), samples)


def jet_restrict(curve: CurveFamily, lat: Lattice, R: float) -> DiscretizedCurve:
    """Canonical jets ``(f(l), df(l))`` for ``|l| <= R``."""
    pts = lattice_points_in_disk(lat, R)
    samples = tuple(_jet_at(curve, complex(p)) for p in pts)
    return DiscretizedCurve(lat, float(R), tuple(complex(p) for p in pts), samples, jets=True)


def jet_distance(a: ProjectiveJet, b: ProjectiveJet) -> float:
    """Chordal distance of the values plus the Euclidean gap of canonical derivatives."""
    gap = np.linalg.norm(np.array(a.derivative) - np.array(b.derivative))
    return chordal_distance(a.value, b.value) + float(gap)


def separation(c1: CurveFamily, c2: CurveFamily, lat: Lattice, R: float, use_jets: bool = False) -> float:
    """Largest sample distance between the two discretizations on the window."""
    if use_jets:
        d1, d2 = jet_restrict(c1, lat, R), jet_restrict(c2, lat, R)
        return max(jet_distance(a, b) for a, b in zip(d1.samples, d2.samples))
    d1, d2 = restrict(c1, lat, R), restrict(c2, lat, R)
    return max(chordal_distance(a, b) for a, b in zip(d1.samples, d2.samples))


@dataclass(frozen=True)
class PoleCount:
    N_of_r: float
    leading_term: float
    relative_gap: float

    def __iter__(self):
        return iter((self.N_of_r, self.leading_term, self.relative_gap))


def pole_counting_check(lat: Lattice, multiplicity: int, r: float) -> PoleCount:
    """Integrated pole count over the lattice against ``m pi r^2 / (2 covolume)``."""
    if multiplicity not in (1, 2):
        raise ValueError("multiplicity must be 1 or 2")
    if r < 2 * lat.longest_generator:
        raise ValueError("r must be at least twice the longest generator")
    poles = PoleDivisor.from_lattice(lattice_points_in_disk(lat, r), multiplicity)
    n = counting_function(poles, r)
    lead = multiplicity * math.pi * r**2 / (2 * lat.covolume)
    return PoleCount(n, lead, abs(n - lead) / lead)


def random_exponential_curve(rng: np.random.Generator, n_terms: int = 2) -> ExponentialCurve:
    """``[c_0 e^{a_0 z} : ...]`` with ``|c| in [1, 2]`` and ``a`` uniform in the unit disk.

    Every exponential curve has zero mean energy (its characteristic grows
    linearly in ``r``).
    """
    c = annulus_sample(rng, 1.0, n_terms)
    rad = np.sqrt(rng.uniform(0, 1, n_terms))
    a = rad * np.exp(2j * np.pi * rng.uniform(0, 1, n_terms))
    return ExponentialCurve(tuple(zip(c, a)))


def exponential_pair_trials(lat: Lattice, R: float, trials: int, seed: int, use_jets: bool = False) -> list[float]:
    """Separations of ``trials`` seeded pairs of random exponential curves."""
    out = []
    for t in range(trials):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, t])))
        f, g = random_exponential_curve(rng), random_exponential_curve(rng)
        out.append(separation(f, g, lat, R, use_jets))
    return out
