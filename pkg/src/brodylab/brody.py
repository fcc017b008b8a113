"""Sup-norm of ``|df|``, Brody rescaling and the N-independence experiment."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .curves import CoefficientPattern, CurveFamily, Lattice, LatticeFamilyCurve, rescale

COARSE_PER_FEATURE = 24
MAX_CANDIDATES = 256
MAX_LEVELS = 30
MIN_LEVELS = 3


@dataclass(frozen=True)
class Rectangle:
    """Axis-parallel rectangle ``[x0, x1] x [y0, y1]``."""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("empty rectangle")

    def to_dict(self) -> dict:
        return {"type": "rectangle", **asdict(self)}


@dataclass
class SupNormReport:
    curve_id: str
    region: dict
    levels: int
    sup_estimate: float
    refinement_deltas: list
    converged: bool
    argmax: complex
    evaluations: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["argmax"] = [self.argmax.real, self.argmax.imag]
        return d


@dataclass(frozen=True)
class BoundsReport:
    N: int
    e_value: float
    covolume: float
    lower_bound: float
    upper_bound: float
    consistent: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _region_frame(curve: CurveFamily, region):
    """Origin, two edge vectors and the parameter box ``[lo, hi]^2`` of the region."""
    if isinstance(region, Rectangle):
        return complex(region.x0, region.y0), complex(region.x1 - region.x0), complex(0, region.y1 - region.y0), 0.0, 1.0, region.to_dict()
    lat = curve.z_lattice
    if lat is None:
        raise ValueError(f"region {region!r} needs a lattice-periodic curve")
    b1, b2 = lat.reduced
    if region == "fundamental":
        if isinstance(curve, LatticeFamilyCurve) and curve.pattern.mode == "random":
            raise ValueError("a fundamental domain only gives the global sup for periodic patterns")
        return curve.z_origin, b1, b2, 0.0, 1.0, {"type": "fundamental"}
    if region == "block3":
        return curve.z_origin, b1, b2, -1.5, 1.5, {"type": "block3"}
    raise ValueError(f"unknown region {region!r}")


def _local_maxima(vals: np.ndarray) -> np.ndarray:
    """Flat indices of grid points not exceeded by any of their 8 neighbours."""
    pad = np.pad(vals, 1, mode="constant", constant_values=-np.inf)
    core = pad[1:-1, 1:-1]
    is_max = np.ones_like(vals, dtype=bool)
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            if dx or dy:
                is_max &= core >= pad[1 + dx : pad.shape[0] - 1 + dx, 1 + dy : pad.shape[1] - 1 + dy]
    return np.flatnonzero(is_max)


def sup_norm_estimate(curve: CurveFamily, region, tol: float = 1e-6, curve_id: str | None = None) -> SupNormReport:
    """Grid maximum of ``|df|`` with multilevel refinement.

    A uniform coarse grid (``COARSE_PER_FEATURE`` points per half lattice
    spacing, or per feature length for non-periodic curves) locates the local maxima; up to ``MAX_CANDIDATES``
    of them, largest first, are then refined independently, each level
    halving the spacing on a 5x5 stencil around the candidate's best
    point (clamped to the region).  Stops when the overall maximum rises
    by less than ``tol`` on two consecutive levels, after at least
    ``MIN_LEVELS`` levels, and ``h^2 sup^3 <= tol`` for the spacing ``h``
    (narrow peaks must be resolved before the stagnation test is
    trusted).
    """
    origin, e1, e2, lo, hi, desc = _region_frame(curve, region)
    span = hi - lo
    lat = curve.z_lattice
    # narrow peaks are left to the refinement stage, so the coarse grid
    # follows the lattice spacing rather than the peak width
    feat = lat.shortest_vector / 2 if lat is not None else (curve.feature_length or 1.0)
    lengths = (abs(e1) * span, abs(e2) * span)
    n = [max(8, int(math.ceil(COARSE_PER_FEATURE * L / feat))) for L in lengths]
    s = np.linspace(lo, hi, n[0] + 1)
    t = np.linspace(lo, hi, n[1] + 1)
    S, T = np.meshgrid(s, t, indexing="ij")

    def evaluate(S, T):
        z = origin + S * e1 + T * e2
        return np.sqrt(np.maximum(curve.density(z), 0.0))

    grid = evaluate(S, T)
    evals = grid.size
    cand = _local_maxima(grid)
    cand = cand[np.argsort(grid.ravel()[cand])[::-1][:MAX_CANDIDATES]]
    cs, ct, cv = S.ravel()[cand], T.ravel()[cand], grid.ravel()[cand]
    best = float(grid.max())
    deltas = []
    hs, ht = span / n[0], span / n[1]
    converged = False
    levels = 0
    offs = np.arange(-2, 3) / 2.0
    ds, dt = (a.ravel() for a in np.meshgrid(offs, offs, indexing="ij"))
    while levels < MAX_LEVELS:
        levels += 1
        S = np.clip(cs[:, None] + ds * hs, lo, hi)
        T = np.clip(ct[:, None] + dt * ht, lo, hi)
        vals = evaluate(S, T)
        evals += vals.size
        k = np.argmax(vals, axis=1)
        rows = np.arange(len(cs))
        better = vals[rows, k] > cv
        cs = np.where(better, S[rows, k], cs)
        ct = np.where(better, T[rows, k], ct)
        cv = np.where(better, vals[rows, k], cv)
        new = max(best, float(cv.max()))
        deltas.append(new - best)
        best = new
        hs, ht = hs / 2, ht / 2
        # |df| varies on the length scale 1/|df|, so a peak of height b has
        # curvature ~ b^3 and the grid error is ~ b^3 h^2
        resolved = max(hs * abs(e1), ht * abs(e2)) ** 2 * best**3 <= tol
        if levels >= MIN_LEVELS and resolved and max(deltas[-2:]) < tol:
            converged = True
            break
    j = int(np.argmax(cv))
    arg = complex(origin + cs[j] * e1 + ct[j] * e2)
    return SupNormReport(curve_id or curve.kind, desc, levels, best, deltas, converged, arg, int(evals))


def brody_rescale(curve: CurveFamily, sup: float) -> CurveFamily:
    """Rescale so that ``|df| <= 1`` given an upper bound ``sup`` of ``|df|``."""
    if not sup > 0:
        raise ValueError("sup must be positive")
    return rescale(curve, sup)


def trial_seed(seed: int, N: int, trial: int) -> int:
    """Independent per-trial seed derived from ``(seed, N, trial)``."""
    return int(np.random.SeedSequence([seed, N, trial]).generate_state(1, dtype=np.uint64)[0])


@dataclass
class ExperimentResult:
    """Rows ``(N, trial, sup, converged)`` plus per-N summary."""

    lattice: Lattice
    A: float
    seed: int
    rows: list = field(default_factory=list)
    rescaled_sups: list = field(default_factory=list)

    def summary(self) -> list[dict]:
        out = []
        for N in sorted({r[0] for r in self.rows}):
            sups = [r[2] for r in self.rows if r[0] == N]
            out.append({
                "N": N,
                "max_sup": max(sups),
                "mean_sup": float(np.mean(sups)),
                "all_converged": all(r[3] for r in self.rows if r[0] == N),
            })
        return out

    def band_check(self, factor: float = 2.0) -> dict:
        summ = self.summary()
        base = next((s["max_sup"] for s in summ if s["N"] == 1), None)
        worst = max(s["max_sup"] for s in summ)
        return {
            "factor": factor,
            "baseline_N1": base,
            "max_over_N": worst,
            "passed": None if base is None else bool(worst <= factor * base),
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["N", "trial", "sup", "converged"])
            for N, trial, sup, conv in self.rows:
                w.writerow([N, trial, format(sup, ".17g"), int(conv)])


def sup_independence_experiment(
    lat: Lattice,
    A: float,
    N_list,
    trials: int,
    seed: int,
    tol: float = 1e-6,
    verify_rescale: bool = False,
) -> ExperimentResult:
    """Sup of ``|df_a|`` over a 3x3 block of cells for seeded random draws.

    With ``verify_rescale`` each draw is Brody-rescaled by its estimate
    plus ``tol`` and the sup is re-estimated; those values go to
    ``rescaled_sups``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    res = ExperimentResult(lat, A, seed)
    for N in sorted(set(int(n) for n in N_list)):
        for trial in range(trials):
            pattern = CoefficientPattern.random(trial_seed(seed, N, trial))
            curve = LatticeFamilyCurve(lat, A, N, pattern)
            rep = sup_norm_estimate(curve, "block3", tol)
            res.rows.append((N, trial, rep.sup_estimate, rep.converged))
            if verify_rescale:
                scaled = brody_rescale(curve, rep.sup_estimate + tol)
                again = sup_norm_estimate(scaled, "block3", tol)
                res.rescaled_sups.append((N, trial, again.sup_estimate, again.converged))
    return res


def bounds_report(N: int, e_value: float, covolume: float) -> BoundsReport:
    """Lower bound ``2N/covolume`` and upper bound ``4 e N`` on the mean dimension."""
    if not 0 <= e_value <= 1:
        raise ValueError("e_value must lie in [0, 1]")
    if not covolume > 0:
        raise ValueError("covolume must be positive")
    lower = 2 * N / covolume
    upper = 4 * e_value * N
    return BoundsReport(int(N), float(e_value), float(covolume), lower, upper, bool(lower <= upper * (1 + 1e-12)))


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")
