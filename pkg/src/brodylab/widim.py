"""Cover orders of grid-box covers of cubes and cube shift spaces.

A box is a product of closed intervals ``[i/m, j/m]`` stored as integer
pairs ``(i, j)`` with ``0 <= i < j <= m``.  A point of the continuous
cube lies in the relative interior of exactly one face of the grid, and
which boxes contain it depends only on that face; the face centres are
the points of the half-step lattice ``{k/(2m)}``.  Coverage and
multiplicity checked there are therefore exact for the continuum.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import CoverError, SearchGuardError

NODE_LIMIT = 10**6


@dataclass(frozen=True)
class GridCube:
    N: int
    m: int

    def __post_init__(self):
        if self.N < 1 or self.m < 1:
            raise ValueError("need N >= 1 and m >= 1")


@dataclass(frozen=True)
class GridBoxCover:
    cube: GridCube
    boxes: tuple

    def __post_init__(self):
        boxes = tuple(tuple((int(i), int(j)) for i, j in b) for b in self.boxes)
        for b in boxes:
            if len(b) != self.cube.N or any(not (0 <= i < j <= self.cube.m) for i, j in b):
                raise CoverError(f"box {b} is not a nonempty grid box of the cube")
        object.__setattr__(self, "boxes", boxes)

    @property
    def mesh(self) -> float:
        """Largest box diameter in the sup metric."""
        return max(max(j - i for i, j in b) for b in self.boxes) / self.cube.m

    def to_dict(self) -> dict:
        return {"N": self.cube.N, "m": self.cube.m, "boxes": [[list(iv) for iv in b] for b in self.boxes]}


def _box_mask(box, m: int) -> np.ndarray:
    """Indicator of a box on the half-step lattice ``{0..2m}^N``."""
    axes = []
    for i, j in box:
        a = np.zeros(2 * m + 1, dtype=np.int32)
        a[2 * i : 2 * j + 1] = 1
        axes.append(a)
    out = axes[0]
    for a in axes[1:]:
        out = np.multiply.outer(out, a)
    return out


def multiplicity(cover: GridBoxCover) -> np.ndarray:
    m = cover.cube.m
    mult = np.zeros((2 * m + 1,) * cover.cube.N, dtype=np.int32)
    for b in cover.boxes:
        mult += _box_mask(b, m)
    return mult


def cover_order(cover: GridBoxCover) -> int:
    """Largest number of boxes sharing a point, minus one.

    Raises
    ------
    CoverError
        If some point of the cube is not covered; the message names a
        half-step lattice point outside every box.
    """
    mult = multiplicity(cover)
    if np.any(mult == 0):
        idx = tuple(int(k) for k in np.argwhere(mult == 0)[0])
        pt = tuple(f"{k}/{2 * cover.cube.m}" for k in idx)
        raise CoverError(f"point ({', '.join(pt)}) is not covered")
    return int(mult.max()) - 1


def _max_side(cube: GridCube, eps: float) -> int:
    return min(cube.m, int(math.floor(eps * cube.m + 1e-9)))


def min_order_box_cover(cube: GridCube, eps: float, node_limit: int = NODE_LIMIT):
    """Minimum order over grid-box covers with mesh ``<= eps``, with a witness.

    Exhaustive depth-first search: the first uncovered cell (lexicographic
    order of cell centres) must lie in some box of any cover, so branching
    over the admissible boxes containing it is complete.  For each bound
    ``b = 1, 2, ...`` on the multiplicity the search either finds a cover
    or proves none exists; the first feasible ``b`` gives order ``b - 1``.

    Raises
    ------
    CoverError
        If ``eps`` is below the grid spacing (no admissible box).
    SearchGuardError
        If more than ``node_limit`` search nodes are needed.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    L = _max_side(cube, eps)
    if L < 1:
        raise CoverError(f"eps={eps} is below the grid spacing 1/{cube.m}")
    m, N = cube.m, cube.N
    if L == m:
        cover = GridBoxCover(cube, (((0, m),) * N,))
        return 0, cover

    intervals = [(i, j) for i in range(m) for j in range(i + 1, min(m, i + L) + 1)]
    boxes = list(itertools.product(intervals, repeat=N))
    masks = [_box_mask(b, m).ravel() for b in boxes]
    cells = list(itertools.product(range(m), repeat=N))
    shape = (2 * m + 1,) * N
    cell_flat = [int(np.ravel_multi_index(tuple(2 * c + 1 for c in cell), shape)) for cell in cells]
    by_cell = []
    for cell in cells:
        by_cell.append([
            k for k, b in enumerate(boxes)
            if all(i <= c < j for (i, j), c in zip(b, cell))
        ])
    nodes = 0

    def search(bound: int):
        nonlocal nodes
        mult = np.zeros(int(np.prod(shape)), dtype=np.int32)
        chosen: list[int] = []

        def dfs() -> bool:
            nonlocal nodes
            nodes += 1
            if nodes > node_limit:
                raise SearchGuardError(f"search exceeded {node_limit} nodes")
            first = next((c for c, f in enumerate(cell_flat) if mult[f] == 0), None)
            if first is None:
                return True
            for k in by_cell[first]:
                if chosen and k in chosen:
                    continue
                new = mult + masks[k]
                if new.max() > bound:
                    continue
                old = mult.copy()
                mult[:] = new
                chosen.append(k)
                if dfs():
                    return True
                chosen.pop()
                mult[:] = old
            return False

        return sorted(boxes[k] for k in chosen) if dfs() else None

    for bound in range(1, len(cells) + 1):
        found = search(bound)
        if found is not None:
            cover = GridBoxCover(cube, tuple(found))
            return bound - 1, cover
    raise AssertionError("the cover by all unit cells is always feasible")


@dataclass(frozen=True)
class ShiftSystem:
    """Shift on ``([0,1]^N)^(Z^k)`` with weights ``2^-|a|`` (l1 norm)."""

    N: int
    k: int = 1
    scale: float = 1.0

    def __post_init__(self):
        if self.N < 1 or self.k < 1 or not self.scale > 0:
            raise ValueError("need N >= 1, k >= 1 and a positive scale")

    def shell_size(self, j: int) -> int:
        """Number of ``a`` in ``Z^k`` with ``|a|_1 = j``."""
        if j == 0:
            return 1
        return sum(2**i * math.comb(self.k, i) * math.comb(j - 1, i - 1) for i in range(1, min(self.k, j) + 1))

    def tail_constant(self, s: int) -> float:
        """``sum_{|a| >= s} 2^-|a|`` times the base diameter."""
        total = 0.0
        j = s
        while True:
            term = self.shell_size(j) * 2.0**-j
            total += term
            if j > s + 10 and term < 1e-18 * max(total, 1e-300):
                break
            j += 1
        return total * self.scale

    def projection_radius(self, eps: float) -> int:
        """Smallest ``s >= 1`` with tail constant below ``eps``."""
        s = 1
        while self.tail_constant(s) >= eps:
            s += 1
        return s


@dataclass(frozen=True)
class ScanRow:
    n: int
    L: float
    U: float
    L_rate: float
    U_rate: float
    s: int


@dataclass
class GrowthScan:
    system: ShiftSystem
    eps: float
    rows: list
    lower_applies: bool
    cross_checks: list

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "L", "U", "L_rate", "U_rate", "s"])
            for r in self.rows:
                w.writerow([r.n, format(r.L, ".17g"), format(r.U, ".17g"), format(r.L_rate, ".17g"), format(r.U_rate, ".17g"), r.s])


def widim_growth_scan(sys: ShiftSystem, eps: float, n_range, cross_check_m: int | None = None) -> GrowthScan:
    """Lower/upper bounds ``L(n) = N n^k`` and ``U(n) = N (n + 2s - 1)^k``.

    ``cross_check_m`` runs :func:`min_order_box_cover` on the embedded
    cube of dimension ``N n^k`` with that grid size for each ``n`` where
    the search fits in the node guard; results go to ``cross_checks`` as
    ``(n, order, L(n))``.
    """
    s = sys.projection_radius(eps)
    lower_ok = eps < 1
    rows, checks = [], []
    for n in n_range:
        n = int(n)
        if n < 1:
            raise ValueError("n must be positive")
        nk = n**sys.k
        lower = sys.N * nk if lower_ok else 0.0
        upper = sys.N * (n + 2 * s - 1) ** sys.k
        rows.append(ScanRow(n, float(lower), float(upper), lower / nk, upper / nk, s))
        if cross_check_m is not None:
            try:
                order, _ = min_order_box_cover(GridCube(sys.N * nk, cross_check_m), eps)
                checks.append((n, order, lower))
            except SearchGuardError:
                checks.append((n, None, lower))
    return GrowthScan(sys, float(eps), rows, lower_ok, checks)


def dynamical_distance(x, y, omega, origin=None, scale: float = 1.0) -> float:
    """``max_{g in omega} sum_a 2^-|a| d_inf(x_{g+a}, y_{g+a})``.

    ``x`` and ``y`` have shape ``(L_1, ..., L_k, N)``: finitely supported
    configurations, zero outside the array.  Array index ``i`` is the site
    ``i - origin`` (``origin`` defaults to all zeros).  The sum is exact
    because sites outside the array contribute nothing.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim < 2:
        raise ValueError("x and y must have the same shape (L_1, ..., L_k, N)")
    k = x.ndim - 1
    origin = np.zeros(k, dtype=int) if origin is None else np.atleast_1d(np.asarray(origin, dtype=int))
    site_gap = np.max(np.abs(x - y), axis=-1) * scale
    sites = np.argwhere(site_gap > 0) - origin
    gaps = site_gap[site_gap > 0]
    best = 0.0
    for g in omega:
        g = np.atleast_1d(np.asarray(g, dtype=int))
        if g.shape != (k,):
            raise ValueError(f"window element {g} does not match rank {k}")
        if len(gaps):
            w = 2.0 ** -np.abs(sites - g).sum(axis=1)
            best = max(best, float(np.sum(w * gaps)))
    return best


def mean_dim_normalize(rate_per_lattice: float, covolume: float) -> float:
    """Convert a growth rate per lattice point to a rate per unit area."""
    if not covolume > 0:
        raise ValueError("covolume must be positive")
    return rate_per_lattice / covolume


def write_cover_json(order: int, cover: GridBoxCover, path, extra: dict | None = None) -> None:
    with open(path, "w") as fh:
        json.dump({"order": order, **cover.to_dict(), **(extra or {})}, fh, sort_keys=True, indent=2)
        fh.write("\n")
