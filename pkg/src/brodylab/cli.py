"""Command-line front end.

Each subcommand resolves its parameters from built-in defaults, then an
optional JSON config file (``--config``), then explicit flags, in that
order of increasing precedence.  Every output embeds the resolved
config, its SHA-256, the seed, the generator name and the package
version, and contains no timestamps, so identical inputs give
byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 numerical
non-convergence, 4 search guard exceeded.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .brody import bounds_report, sup_independence_experiment
from .curves import Lattice, curve_from_dict
from .discretize import exponential_pair_trials, pole_counting_check, separation
from .errors import CoverError, QuadratureError, SearchGuardError
from .nevanlinna import _window, energy_profile, window_radii
from .widim import GridCube, ShiftSystem, min_order_box_cover, widim_growth_scan

FORMAT_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_GUARD = 0, 2, 3, 4
GENERATOR = "numpy.random.PCG64"

_Z2 = {"omega1": [1.0, 0.0], "omega2": [0.0, 1.0], "delta": None}

DEFAULTS = {
    "energy": {"curve": {"kind": "weierstrass_p", "lattice": _Z2}, "r_max": 30.0},
    "brody": {"lattice": _Z2, "A": 1.0, "N_list": [1, 2, 4, 8, 16], "trials": 20, "factor": 2.0, "verify_rescale": True},
    "widim": {"N": 2, "m": 2, "eps": 0.6, "k": 1, "scan_eps": 0.25, "n_min": 1, "n_max": 20},
    "discretize": {
        "curves": [
            {"kind": "exponential", "terms": [[[1.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [1.0, 0.0]]]},
            {"kind": "exponential", "terms": [[[1.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [-1.0, 0.0]]]},
        ],
        "lattice": _Z2,
        "R": 5.0,
        "use_jets": False,
        "random_trials": 0,
        "pole_multiplicity": 1,
        "pole_r": 20.0,
    },
    "bounds": {"N": 2, "e": 1.0, "covolume": 4.0},
}
COMMON = {"seed": 0, "tol": 1e-6, "threads": 1}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Resolved parameters of one run."""

    command: str
    params: dict
    seed: int = 0
    tol: float = 1e-6
    threads: int = 1
    format_version: int = FORMAT_VERSION

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "tol": self.tol,
            "threads": self.threads,
            "format_version": self.format_version,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(d["command"], d["params"], d["seed"], d["tol"], d["threads"], d.get("format_version", FORMAT_VERSION))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @property
    def sha256(self) -> str:
        # threads never changes results, so it is left out of the identity
        d = self.to_dict()
        d.pop("threads")
        return hashlib.sha256(json.dumps(d, sort_keys=True, separators=(",", ":")).encode()).hexdigest()

    def meta(self) -> dict:
        d = self.to_dict()
        d.pop("threads")
        return {
            "config": d,
            "config_sha256": self.sha256,
            "seed": self.seed,
            "generator": GENERATOR,
            "version": __version__,
        }


def resolve_config(command: str, file_cfg: dict | None, overrides: dict) -> RunConfig:
    """Merge defaults < config file < flags."""
    params = copy.deepcopy(DEFAULTS[command])
    common = dict(COMMON)
    for src in (file_cfg or {}, {k: v for k, v in overrides.items() if v is not None}):
        for key, val in src.items():
            if key in common:
                common[key] = val
            elif key in params:
                params[key] = val
            elif key in ("command", "format_version"):
                continue
            elif key == "params" and isinstance(val, dict):
                for k2, v2 in val.items():
                    if k2 not in params:
                        raise ConfigError(f"unknown parameter {k2!r} for {command}")
                    params[k2] = v2
            else:
                raise ConfigError(f"unknown parameter {key!r} for {command}")
    try:
        seed = int(common["seed"])
        tol = float(common["tol"])
        threads = int(common["threads"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if seed < 0 or not tol > 0 or threads < 1:
        raise ConfigError("need seed >= 0, tol > 0 and threads >= 1")
    return RunConfig(command, params, seed, tol, threads)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _clean(obj):
    """JSON-safe copy with floats that survive a round trip."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path: Path, payload: dict, cfg: RunConfig) -> None:
    body = {"meta": cfg.meta(), **payload}
    path.write_text(json.dumps(_clean(body), sort_keys=True, indent=2) + "\n")


def write_csv(path: Path, header: list, rows, cfg: RunConfig) -> None:
    meta = cfg.meta()
    lines = [
        f"# config_sha256={meta['config_sha256']}",
        f"# seed={meta['seed']}",
        f"# generator={meta['generator']}",
        f"# version={meta['version']}",
        ",".join(header),
    ]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def _lattice(d) -> Lattice:
    try:
        return Lattice.from_dict(d)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad lattice {d!r}") from exc


def cmd_energy(cfg: RunConfig, out: Path) -> int:
    p = cfg.params
    curve = curve_from_dict(p["curve"])
    r_max = float(p["r_max"])
    if r_max < 4:
        raise ConfigError("r_max must be at least 4")
    win = window_radii(r_max)
    radii = sorted(set(np.arange(1.0, math.floor(r_max) + 1).tolist()) | set(win.tolist()))
    prof = energy_profile(curve, radii, cfg.tol, cfg.threads)
    write_csv(out / "energy_profile.csv", ["r", "disk_energy", "T", "mean_running", "packing_running", "err"], prof.rows(), cfg)
    idx = np.searchsorted(prof.radii, win)
    mean = _window(prof.mean_energy_running[idx], win, float(np.max(2 * prof.quadrature_error[idx] / (np.pi * win**2))))
    pack = _window(prof.packing_running[idx], win, float(np.max(prof.quadrature_error[idx] / (np.pi * win**2))))
    summary = {
        "curve": p["curve"],
        "r_max": r_max,
        "total_energy": float(prof.disk_energy[-1]),
        "total_energy_error": float(prof.quadrature_error[-1]),
        "mean_energy": {"estimate": mean.estimate, "window_max": mean.window_max, "trend_slope": mean.trend_slope, "error": mean.error},
        "packing_density": {"estimate": pack.estimate, "window_max": pack.window_max, "trend_slope": pack.trend_slope, "error": pack.error},
    }
    write_json(out / "energy_summary.json", summary, cfg)
    return EXIT_OK


def cmd_brody(cfg: RunConfig, out: Path) -> int:
    p = cfg.params
    lat = _lattice(p["lattice"])
    res = sup_independence_experiment(lat, float(p["A"]), list(p["N_list"]), int(p["trials"]), cfg.seed, cfg.tol, bool(p["verify_rescale"]))
    write_csv(out / "brody_trials.csv", ["N", "trial", "sup", "converged"], res.rows, cfg)
    payload = {"summary": res.summary(), "band_check": res.band_check(float(p["factor"]))}
    if p["verify_rescale"]:
        write_csv(out / "brody_rescaled.csv", ["N", "trial", "sup", "converged"], res.rescaled_sups, cfg)
        worst = max(r[2] for r in res.rescaled_sups)
        payload["rescaled"] = {"max_sup": worst, "bound": 1 + cfg.tol, "passed": bool(worst <= 1 + cfg.tol)}
    write_json(out / "brody_summary.json", payload, cfg)
    all_conv = all(r[3] for r in res.rows) and all(r[3] for r in res.rescaled_sups)
    return EXIT_OK if all_conv else EXIT_NUMERIC


def cmd_widim(cfg: RunConfig, out: Path) -> int:
    p = cfg.params
    order, cover = min_order_box_cover(GridCube(int(p["N"]), int(p["m"])), float(p["eps"]))
    write_json(out / "widim_cover.json", {"N": p["N"], "m": p["m"], "eps": p["eps"], "order": order, "mesh": cover.mesh,
                                          "boxes": cover.to_dict()["boxes"]}, cfg)
    scan = widim_growth_scan(ShiftSystem(int(p["N"]), int(p["k"])), float(p["scan_eps"]), range(int(p["n_min"]), int(p["n_max"]) + 1))
    rows = [(r.n, r.L, r.U, r.L_rate, r.U_rate, r.s) for r in scan.rows]
    write_csv(out / "widim_scan.csv", ["n", "L", "U", "L_rate", "U_rate", "s"], rows, cfg)
    return EXIT_OK


def cmd_discretize(cfg: RunConfig, out: Path) -> int:
    p = cfg.params
    lat = _lattice(p["lattice"])
    c1, c2 = (curve_from_dict(c) for c in p["curves"])
    report = {
        "separation": separation(c1, c2, lat, float(p["R"]), bool(p["use_jets"])),
        "R": p["R"],
        "use_jets": p["use_jets"],
    }
    if int(p["random_trials"]) > 0:
        seps = exponential_pair_trials(lat, float(p["R"]), int(p["random_trials"]), cfg.seed)
        report["random_exponential_pairs"] = {
            "trials": len(seps),
            "positive": int(sum(s > 0 for s in seps)),
            "min_separation": min(seps),
        }
    n, lead, gap = pole_counting_check(lat, int(p["pole_multiplicity"]), float(p["pole_r"]))
    report["pole_counting"] = {"multiplicity": p["pole_multiplicity"], "r": p["pole_r"], "N_of_r": n, "leading_term": lead, "relative_gap": gap}
    write_json(out / "discretize_report.json", report, cfg)
    return EXIT_OK


def cmd_bounds(cfg: RunConfig, out: Path) -> int:
    p = cfg.params
    rep = bounds_report(int(p["N"]), float(p["e"]), float(p["covolume"]))
    write_json(out / "bounds.json", rep.to_dict(), cfg)
    return EXIT_OK


COMMANDS = {
    "energy": cmd_energy,
    "brody": cmd_brody,
    "widim": cmd_widim,
    "discretize": cmd_discretize,
    "bounds": cmd_bounds,
}


def _json_arg(s: str):
    try:
        return json.loads(s)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc}") from exc


def _int_list(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with parameters (overridden by flags)")
    common.add_argument("--seed", type=int)
    common.add_argument("--out-dir", type=Path, default=Path("."))
    common.add_argument("--tol", type=float)
    common.add_argument("--threads", type=int)

    parser = argparse.ArgumentParser(prog="brodylab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("energy", parents=[common], help="disk energy, characteristic and growth rates")
    p.add_argument("--curve", type=_json_arg, help="curve as JSON (same schema as the config)")
    p.add_argument("--r-max", dest="r_max", type=float)

    p = sub.add_parser("brody", parents=[common], help="sup-norm experiment over random lattice-family draws")
    p.add_argument("--lattice", type=_json_arg)
    p.add_argument("--A", dest="A", type=float)
    p.add_argument("--N-list", dest="N_list", type=_int_list, help="comma separated, e.g. 1,2,4")
    p.add_argument("--trials", type=int)
    p.add_argument("--factor", type=float)

    p = sub.add_parser("widim", parents=[common], help="minimal box-cover order and growth scan")
    p.add_argument("--N", dest="N", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--scan-eps", dest="scan_eps", type=float)
    p.add_argument("--n-min", dest="n_min", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)

    p = sub.add_parser("discretize", parents=[common], help="separation of lattice restrictions and pole counting")
    p.add_argument("--curves", type=_json_arg, help="JSON list of two curves")
    p.add_argument("--lattice", type=_json_arg)
    p.add_argument("--R", dest="R", type=float)
    p.add_argument("--use-jets", dest="use_jets", action="store_true", default=None)
    p.add_argument("--random-trials", dest="random_trials", type=int)
    p.add_argument("--pole-multiplicity", dest="pole_multiplicity", type=int)
    p.add_argument("--pole-r", dest="pole_r", type=float)

    p = sub.add_parser("bounds", parents=[common], help="lower and upper mean-dimension bounds")
    p.add_argument("--N", dest="N", type=int)
    p.add_argument("--e", dest="e", type=float)
    p.add_argument("--covolume", type=float)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config", "out_dir")}
    try:
        file_cfg = json.loads(args.config.read_text()) if args.config else None
        if file_cfg is not None and not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        cfg = resolve_config(args.command, file_cfg, overrides)
        out = args.out_dir
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out)
    except (ConfigError, CoverError, OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureError as exc:
        print(f"non-convergence: {exc} (last estimate {exc.estimate})", file=sys.stderr)
        return EXIT_NUMERIC
    except SearchGuardError as exc:
        print(f"search guard: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
