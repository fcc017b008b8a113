"""End-to-end acceptance checks, one test per criterion.

Each test prints (and records for the terminal summary) a single line
``criterion k: PASS|FAIL  <details>`` before asserting.
"""

import math
import time

import numpy as np
import pytest

from brodylab import cli
from brodylab.brody import brody_rescale, sup_independence_experiment, sup_norm_estimate
from brodylab.curves import (
    CoefficientPattern,
    ExponentialCurve,
    LatticeFamilyCurve,
    RationalCurve,
    WeierstrassCurve,
)
from brodylab.discretize import exponential_pair_trials, pole_counting_check, random_exponential_curve
from brodylab.lattice import Lattice
from brodylab.nevanlinna import area_energy, characteristic, energy_profile, window_radii
from brodylab.projgeom import energy_density_fd
from brodylab.widim import GridCube, ShiftSystem, min_order_box_cover, widim_growth_scan

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.slow

Z2 = Lattice()


def report(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_01_degree_identity():
    parts, ok = [], True
    for d in (1, 2, 3):
        t0 = time.perf_counter()
        val, err = area_energy(RationalCurve.monomial(d), 1e3, tol=1e-8)
        dt = time.perf_counter() - t0
        ok &= abs(val - d) < 1e-3 and dt < 10
        parts.append(f"d={d}: {val:.9f} ({dt:.2f}s)")
    report(1, ok, "; ".join(parts))


def test_criterion_02_line_characteristic():
    got = characteristic(RationalCurve.monomial(1), math.e, tol=1e-9)
    ref = 0.5 * math.log((1 + math.e**2) / 2)
    report(2, abs(got - ref) < 1e-5, f"T(e)={got:.10f} closed form {ref:.10f}")


def _check_brody_bound(curve, radii, tol=1e-6):
    prof = energy_profile(curve, radii, tol)
    slack = np.pi * prof.radii**2 / 2 + prof.quadrature_error - prof.characteristic
    return float(slack.min()), float(np.max(prof.characteristic / (np.pi * prof.radii**2 / 2)))


def test_criterion_03_brody_bound():
    curves = []
    wp = WeierstrassCurve()
    sup = sup_norm_estimate(wp, "block3", 1e-7).sup_estimate
    curves.append(("wp", brody_rescale(wp, sup + 1e-7)))
    for N in (1, 4, 16):
        c = LatticeFamilyCurve(Z2, 1.0, N, CoefficientPattern.random(100 + N))
        sup = sup_norm_estimate(c, "block3", 1e-7).sup_estimate
        curves.append((f"f_a N={N}", brody_rescale(c, sup + 1e-7)))
    parts, ok = [], True
    for name, c in curves:
        # tabulate past one and a half lattice spacings so poles are inside
        radii = np.linspace(1.0, max(20.0, 1.5 * c.z_lattice.shortest_vector), 20)
        slack, ratio = _check_brody_bound(c, radii)
        ok &= slack >= 0
        parts.append(f"{name}: max T/(pi r^2/2)={ratio:.4f}")
    report(3, ok, "; ".join(parts))


def test_criterion_04_elliptic_mean_energy():
    t0 = time.perf_counter()
    radii = window_radii(30.0)
    prof = energy_profile(WeierstrassCurve(Z2), radii, 1e-6)
    dt = time.perf_counter() - t0
    mean, pack = prof.mean_energy_running.max(), prof.packing_running.max()
    ok = abs(mean - 2) < 0.04 and abs(pack - 2) < 0.04 and dt < 120
    report(4, ok, f"mean={mean:.5f} packing={pack:.5f} target 2 ({dt:.1f}s)")


@pytest.fixture(scope="module")
def brody_run():
    # the N=1 baseline is the first block of rows computed
    return sup_independence_experiment(Z2, 1.0, [1, 2, 4, 8, 16], 20, seed=0, tol=1e-6, verify_rescale=True)


def test_criterion_05_band(brody_run):
    band = brody_run.band_check(2.0)
    conv = all(r[3] for r in brody_run.rows)
    by_n = ", ".join(f"N={s['N']}: {s['max_sup']:.3f}" for s in brody_run.summary())
    report(5, bool(band["passed"]) and conv, f"max sup {by_n}; baseline {band['baseline_N1']:.3f}, all converged={conv}")


def test_criterion_06_rescaled(brody_run):
    worst = max(r[2] for r in brody_run.rescaled_sups)
    conv = all(r[3] for r in brody_run.rescaled_sups)
    n = len(brody_run.rescaled_sups)
    report(6, worst <= 1 + 1e-6 and conv and n == 100, f"{n} rescaled draws, max sup {worst:.9f}")


def test_criterion_07_pole_counting():
    _, _, g1 = pole_counting_check(Z2, 1, 20.0)
    _, _, g2 = pole_counting_check(Z2, 2, 20.0)
    report(7, g1 < 0.05 and g2 < 0.05, f"relative gaps m=1: {g1:.4f}, m=2: {g2:.4f}")


def test_criterion_08_exponential_pairs():
    seps = exponential_pair_trials(Z2, 5.0, 100, seed=0)
    positive = sum(s > 0 for s in seps)
    report(8, positive == 100, f"{positive}/100 separated, min separation {min(seps):.3e}")


def test_criterion_09_cube_cover_order():
    t0 = time.perf_counter()
    got = {(N, m): min_order_box_cover(GridCube(N, m), 0.6)[0] for N, m in ((1, 2), (1, 3), (2, 2), (2, 3))}
    big = {(N, m): min_order_box_cover(GridCube(N, m), 1.0)[0] for N, m in ((1, 2), (2, 3))}
    dt = time.perf_counter() - t0
    ok = all(v == N for (N, _), v in got.items()) and all(v == 0 for v in big.values()) and dt < 300
    report(9, ok, f"orders at eps=0.6 {got}; at eps=1 {big} ({dt:.2f}s)")


def test_criterion_10_scan_rates():
    scan = widim_growth_scan(ShiftSystem(2, 1), 0.25, range(1, 401))
    rows_ok = all(r.L == 2 * r.n and r.U == 2 * (r.n + 9) for r in scan.rows)
    last = scan.rows[-1]
    gap = (last.U_rate - last.L_rate) / last.L_rate
    report(10, rows_ok and gap < 0.05, f"s={last.s}, rate gap at n=400: {gap:.4f}")


def _fd_gap(curve, z, h):
    v, _ = curve.lift(np.array([z]))
    chart = int(np.argmax(np.abs(v[0])))
    exact = float(curve.density(np.array([z]))[0])
    return abs(energy_density_fd(curve, z, h, chart=chart) - exact)


def test_criterion_11_finite_difference():
    rng = np.random.default_rng(0)
    families = {
        "rational": RationalCurve(((1, 0.5j), (0, 1, 0.3))),
        "exponential": random_exponential_curve(rng),
        "wp": WeierstrassCurve(Z2),
        "lattice_family": LatticeFamilyCurve(Z2, 1.0, 2, CoefficientPattern.random(0)),
    }
    parts, ok, ratios = [], True, []
    for name, curve in families.items():
        z = rng.uniform(-1.5, 1.5, 25) + 1j * rng.uniform(-1.5, 1.5, 25)
        g1 = np.array([_fd_gap(curve, p, 1e-3) for p in z])
        g2 = np.array([_fd_gap(curve, p, 5e-4) for p in z])
        big = g1 > 1e-9
        ratios.extend((g1[big] / g2[big]).tolist())
        ok &= bool(g1.max() < 1e-5)
        parts.append(f"{name}: max gap {g1.max():.2e}")
    med = float(np.median(ratios))
    ok &= 3.5 < med < 4.5
    report(11, ok, "; ".join(parts) + f"; median gap ratio on halving h {med:.2f}")


def test_criterion_12_cli_determinism(tmp_path):
    runs = {
        "energy": ["--r-max", "8"],
        "brody": ["--N-list", "1,4", "--trials", "2"],
        "widim": [],
        "discretize": ["--random-trials", "10"],
        "bounds": [],
    }
    same = {}
    for cmd, extra in runs.items():
        outs = []
        for tag in ("a", "b"):
            out = tmp_path / f"{cmd}_{tag}"
            code = cli.main([cmd, "--seed", "5", "--out-dir", str(out), *extra])
            outs.append((code, {p.name: p.read_bytes() for p in sorted(out.iterdir())}))
        same[cmd] = outs[0] == outs[1] and outs[0][0] == 0
    report(12, all(same.values()), f"byte-identical reruns {same}")
