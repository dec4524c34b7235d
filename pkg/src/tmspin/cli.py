"""Command-line front end.

Usage::

    tmspin --config CONFIG.json --out DIR [--threads N] COMMAND
    tmspin --config CONFIG.json --dump-config

Commands: sweep, transitions, matrixmap, fit, effective, wavefunction.
Data goes to files under ``--out``; diagnostics and summaries go to stderr.
``TMSPIN_THREADS`` sets the thread count when ``--threads`` is absent.

The electric drive is specified as ``delta_eta_delta_meV`` (the change of the
trigonal splitting, delta_eta * Delta, in meV). A dipole of about 0.2 e*Angstrom
turns 1 meV into roughly 50 V/um; that conversion is left to the user.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import effective, fitting, spectra
from .eigen import cluster_degenerate, label_clusters
from .hamiltonian import FieldConfig, ModelParams

COMMANDS = ("sweep", "transitions", "matrixmap", "fit", "effective", "wavefunction")

# Every accepted key with its default; None marks a required value.
DEFAULTS = {
    "model": {
        "delta_eV": None,
        "eta": None,
        "delta_A1_meV": None,
        "k": None,
        "lambda_meV": None,
        "a_hf_MHz": None,
        "g_n": None,
        "nuclear_spin": 2.5,
        "g_e": None,  # None -> free-electron value
        "include_hf": True,
    },
    "field": {
        "b_static_mT": [0.0, 0.0, 0.0],
        "b_drive_uT": [0.0, 0.0, 100.0],
        "delta_eta_delta_meV": 1.0,
    },
    "targets": None,
    "sweep": {
        "axis": "z",
        "b_min_mT": 0.0,
        "b_max_mT": 100.0,
        "n_points": 51,
        "n_levels": None,  # None -> 2(2I+1) ground levels, -1 -> all
        "include_hf": True,
        "track": False,
    },
    "transitions": {
        "drive": "Bpar",
        "axis": "z",
        "b_min_mT": 0.0,
        "b_max_mT": 100.0,
        "n_points": 11,
        "n_levels": None,
        "floor_Hz": 1.0,
    },
    "matrixmap": {"b0_mT": 20.0, "b1_uT": 100.0, "n_states": 24},
    "fit": {
        "k_values": [0.3],
        "eta_min": -1.0,
        "eta_max": 0.0,
        "eta_step": 0.02,
        "lambda_min_meV": 0.0,
        "lambda_max_meV": 30.0,
        "lambda_step_meV": 0.5,
    },
    "effective": {
        "doublet": 1,  # 1 = lowest Kramers doublet, 2 = the next one
        "b_min_mT": 0.0,
        "b_max_mT": 100.0,
        "n_points": 21,
        "calibrate_a_perp_MHz": None,
    },
    "wavefunction": {
        "state": 0,
        "include_hf": False,
        "orbital_coeffs": None,  # optional list of 5 [re, im] pairs overriding the state
        "n_theta": 61,
        "n_phi": 120,
    },
}

TARGET_KEYS = {
    "delta_gs_GHz": None,
    "delta_gs_tol_GHz": None,
    "g_par": None,
    "g_par_tol": None,
    "g_perp_max": None,
    "b0_mT": 100.0,
    "source": "",
}


class ConfigError(ValueError):
    pass


def _merge(section: str, defaults: dict, given: dict) -> dict:
    if not isinstance(given, dict):
        raise ConfigError(f"section '{section}' must be an object")
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown key(s) in '{section}': {', '.join(unknown)}")
    out = copy.deepcopy(defaults)
    out.update(given)
    missing = [k for k in _REQUIRED.get(section, ()) if out[k] is None]
    if missing:
        raise ConfigError(f"missing required key(s) in '{section}': {', '.join(missing)}")
    return out


_REQUIRED = {
    "model": ("delta_eV", "eta", "delta_A1_meV", "k", "lambda_meV", "a_hf_MHz", "g_n"),
    "targets": ("delta_gs_GHz", "delta_gs_tol_GHz", "g_par", "g_par_tol", "g_perp_max"),
}


def normalize_config(raw: dict) -> dict:
    """Validate a raw config mapping and fill in defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")
    if "model" not in raw:
        raise ConfigError("config needs a 'model' section")
    cfg = {}
    for name, defaults in DEFAULTS.items():
        if name == "targets":
            t = raw.get("targets")
            cfg["targets"] = None if t is None else _merge("targets", TARGET_KEYS, t)
        else:
            cfg[name] = _merge(name, defaults, raw.get(name, {}))
    # build the typed objects once so bad values fail here
    RunConfig.from_dict(cfg)
    return cfg


@dataclass
class RunConfig:
    model: ModelParams
    field: FieldConfig
    targets: fitting.ExperimentalTargets | None
    options: dict

    @classmethod
    def from_dict(cls, cfg: dict) -> "RunConfig":
        m = cfg["model"]
        try:
            kw = dict(
                delta_ev=float(m["delta_eV"]),
                eta=float(m["eta"]),
                delta_a1_mev=float(m["delta_A1_meV"]),
                k=float(m["k"]),
                lambda_mev=float(m["lambda_meV"]),
                a_hf_hz=float(m["a_hf_MHz"]) * 1e6,
                g_n=float(m["g_n"]),
                nuclear_spin=float(m["nuclear_spin"]),
                include_hf=bool(m["include_hf"]),
            )
            if m["g_e"] is not None:
                kw["g_e"] = float(m["g_e"])
            model = ModelParams(**kw)
            f = cfg["field"]
            field = FieldConfig(
                b_static=tuple(1e-3 * float(x) for x in f["b_static_mT"]),
                b_drive=tuple(1e-6 * float(x) for x in f["b_drive_uT"]),
                delta_eta=1e-3 * float(f["delta_eta_delta_meV"]) / model.delta_ev,
            )
            t = cfg["targets"]
            targets = None
            if t is not None:
                targets = fitting.ExperimentalTargets(
                    delta_gs_hz=float(t["delta_gs_GHz"]) * 1e9,
                    delta_gs_tol_hz=float(t["delta_gs_tol_GHz"]) * 1e9,
                    g_par=float(t["g_par"]),
                    g_par_tol=float(t["g_par_tol"]),
                    g_perp_max=float(t["g_perp_max"]),
                    b0=float(t["b0_mT"]) * 1e-3,
                )
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        options = {k: v for k, v in cfg.items() if k in COMMANDS}
        return cls(model, field, targets, options)


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return normalize_config(raw)


def dump_config(cfg: dict) -> str:
    return json.dumps(cfg, indent=2, sort_keys=True) + "\n"


# ---- output helpers -------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if v == 0.0:
        v = 0.0  # drop the sign of negative zero
    return "%.12g" % v


def write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _b_values(opt) -> np.ndarray:
    if opt["n_points"] < 1:
        raise ConfigError("n_points must be at least 1")
    if opt["b_max_mT"] < opt["b_min_mT"]:
        raise ConfigError("b_max_mT must not be below b_min_mT")
    return 1e-3 * np.linspace(opt["b_min_mT"], opt["b_max_mT"], int(opt["n_points"]))


# ---- commands -------------------------------------------------------------


def cmd_sweep(rc: RunConfig, out: Path, threads: int) -> None:
    o = rc.options["sweep"]
    res = spectra.sweep_field(
        rc.model,
        axis=o["axis"],
        b_range=(1e-3 * o["b_min_mT"], 1e-3 * o["b_max_mT"]),
        n_points=int(o["n_points"]),
        include_hf=bool(o["include_hf"]),
        n_levels=o["n_levels"],
        threads=threads,
        track=bool(o["track"]),
    )
    n = res.energies.shape[1]
    header = ["B_T"] + [f"level_{i:02d}" for i in range(n)]
    write_csv(out / "sweep.csv", header, ([b, *e] for b, e in zip(res.b_values, res.energies)))
    _say(
        f"sweep: {n} levels, B along {o['axis']} from {o['b_min_mT']:g} to {o['b_max_mT']:g} mT "
        f"({len(res.b_values)} points), hyperfine {'on' if o['include_hf'] else 'off'}"
    )


def cmd_transitions(rc: RunConfig, out: Path, threads: int) -> None:
    o = rc.options["transitions"]
    if o["drive"] not in spectra.DRIVES:
        raise ConfigError(f"drive must be one of {spectra.DRIVES}")
    if o["drive"] != "Ez" and rc.model.nuclear_spin == 0:
        _say("warning: nuclear spin is zero; hyperfine-enabled lines are absent")
    table = spectra.transition_sweep(
        rc.model,
        rc.field,
        o["drive"],
        _b_values(o),
        axis=o["axis"],
        n_levels=o["n_levels"],
        floor_hz=o["floor_Hz"],
        threads=threads,
    )
    rows = [(t.i, t.f, t.freq_hz, t.rabi_hz, t.drive, t.b_t) for t in table]
    write_csv(out / "transitions.csv", ["i", "f", "freq_Hz", "rabi_Hz", "drive", "B_T"], rows)
    _say(f"transitions: {len(table)} lines, drive {o['drive']}, max Rabi {table.max_rabi():.6g} Hz")


def cmd_matrixmap(rc: RunConfig, out: Path, threads: int) -> None:
    o = rc.options["matrixmap"]
    n = int(o["n_states"])
    if n > rc.model.basis.dim:
        raise ConfigError(f"n_states={n} exceeds the basis dimension {rc.model.basis.dim}")

    def run(hf):
        return spectra.matrix_map(rc.model, b1=1e-6 * o["b1_uT"], b0=1e-3 * o["b0_mT"], include_hf=hf, n_states=n)

    for hf, grid in zip((False, True), spectra._map(run, [False, True], threads)):
        rows = []
        for i in range(n):
            for j in range(n):
                rows.append((i, j, "Bpar" if j >= i else "Bperp", grid[i, j]))
        name = "matrixmap_hf_on.csv" if hf else "matrixmap_hf_off.csv"
        write_csv(out / name, ["i", "j", "drive", "abs_Hz"], rows)
        _say(f"matrixmap: {name} {n}x{n}, max entry {grid.max():.6g} Hz")


def cmd_fit(rc: RunConfig, out: Path, threads: int) -> None:
    if rc.targets is None:
        raise ConfigError("fit needs a 'targets' section")
    o = rc.options["fit"]
    grid = fitting.GridSpec(
        o["eta_min"], o["eta_max"], o["eta_step"], o["lambda_min_meV"], o["lambda_max_meV"], o["lambda_step_meV"]
    )
    with np.errstate(invalid="ignore"):
        grids, summaries = fitting.scan_k_range(rc.model, rc.targets, grid, o["k_values"], threads)
    rows = []
    for g in grids:
        for i, eta in enumerate(g.etas):
            for j, lam in enumerate(g.lambdas_mev):
                rows.append(
                    (
                        g.k,
                        eta,
                        lam,
                        g.delta_gs_hz[i, j],
                        g.g_par[i, j],
                        g.g_perp[i, j],
                        g.match_dgs[i, j],
                        g.match_gpar[i, j],
                        g.match_gperp[i, j],
                        g.match_all[i, j],
                    )
                )
    header = [
        "k",
        "eta",
        "lambda_meV",
        "delta_gs_Hz",
        "g_par",
        "g_perp",
        "match_dgs",
        "match_gpar",
        "match_gperp",
        "match_all",
    ]
    write_csv(out / "fit.csv", header, rows)
    summary = []
    for s in summaries:
        entry = {"k": s.k, "n_consistent": s.n_consistent}
        if s.nonempty:
            entry["eta_centroid"] = round(s.centroid[0], 12)
            entry["lambda_centroid_meV"] = round(s.centroid[1], 12)
            _say(f"fit: k={s.k:g}: {s.n_consistent} cells, centroid eta={s.centroid[0]:.4g}, lambda={s.centroid[1]:.4g} meV")
        else:
            _say(f"fit: k={s.k:g}: no overlap")
        summary.append(entry)
    with open(out / "fit_summary.json", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(summary, indent=2) + "\n")


def cmd_effective(rc: RunConfig, out: Path, threads: int) -> None:
    o = rc.options["effective"]
    d = int(o["doublet"])
    if d not in (1, 2):
        raise ConfigError("doublet must be 1 or 2")
    p = rc.model.with_(include_hf=True)
    if o["calibrate_a_perp_MHz"] is not None:
        a = effective.calibrate_a(p, 1e6 * float(o["calibrate_a_perp_MHz"]), doublet=d - 1)
        p = p.with_(a_hf_hz=a)
        _say(f"effective: calibrated A = {a:.9g} Hz")
    ep = effective.extract(p, d - 1)
    if p.a_hf_hz == 0:
        _say("effective: A = 0, hyperfine parameters vanish")
    with open(out / "effective.json", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(ep.to_json() + "\n")
    bs = _b_values(o)
    full, eff, rms = effective.compare_full(p, ep, d - 1, bs)
    n = full.shape[1]
    header = ["B_T"] + [f"full_{i:02d}" for i in range(n)] + [f"eff_{i:02d}" for i in range(n)]
    write_csv(out / "effective_comparison.csv", header, ([b, *f, *e] for b, f, e in zip(bs, full, eff)))
    _say(
        f"effective: {ep.irrep} a_par={ep.a_par:.6g} Hz a_perp={ep.a_perp:.6g} Hz "
        f"g_par={ep.g_par:.6g} g_perp={ep.g_perp:.6g}; RMS vs full {rms:.6g} Hz"
    )


def cmd_wavefunction(rc: RunConfig, out: Path, threads: int) -> None:
    o = rc.options["wavefunction"]
    if o["orbital_coeffs"] is not None:
        c = np.array([complex(re, im) for re, im in o["orbital_coeffs"]])
        label = "given coefficients"
    else:
        p = rc.model.with_(include_hf=bool(o["include_hf"]))
        es = spectra.solve(p, rc.field)
        s = int(o["state"])
        if not 0 <= s < len(es):
            raise ConfigError(f"state index {s} out of range")
        c = spectra.orbital_amplitudes(es.vectors[:, s], p.basis.dims)
        # label through the zero-field electronic doublet the state descends from
        q = p.with_(nuclear_spin=0.0, include_hf=False)
        el = label_clusters(cluster_degenerate(spectra.solve(q), 1e3), q.basis.dims)
        d = s // (2 * p.basis.dims[2])
        irrep = el.labels[d] if d < len(el.labels) else None
        label = f"state {s} (doublet {d + 1}, {irrep or 'unlabelled'})"
    grid = spectra.wavefunction_grid(c, int(o["n_theta"]), int(o["n_phi"]))
    rows = zip(grid.theta.ravel(), grid.phi.ravel(), grid.density.ravel(), grid.phase.ravel())
    write_csv(out / "wavefunction.csv", ["theta", "phi", "density", "phase"], rows)
    _say(f"wavefunction: {label}, azimuthal winding {spectra.azimuthal_winding(grid)}")


HANDLERS = {
    "sweep": cmd_sweep,
    "transitions": cmd_transitions,
    "matrixmap": cmd_matrixmap,
    "fit": cmd_fit,
    "effective": cmd_effective,
    "wavefunction": cmd_wavefunction,
}


def _threads(arg) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("TMSPIN_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"TMSPIN_THREADS must be an integer, got {env!r}") from None
    return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tmspin", description="Trigonal d-electron spin model.")
    ap.add_argument("--config", required=True, metavar="PATH", help="JSON run configuration")
    ap.add_argument("--out", metavar="PATH", default=".", help="output directory (created if missing)")
    ap.add_argument("--threads", type=int, default=None, metavar="N", help="worker threads for sweeps and scans")
    ap.add_argument("--dump-config", action="store_true", help="print the resolved configuration and exit")
    ap.add_argument("command", nargs="?", choices=COMMANDS)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.dump_config:
            sys.stdout.write(dump_config(cfg))
            return 0
        if args.command is None:
            raise ConfigError("a command is required")
        threads = _threads(args.threads)
        if threads < 1:
            raise ConfigError("thread count must be positive")
        rc = RunConfig.from_dict(cfg)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        # one BLAS thread per worker keeps results independent of the thread count
        with threadpool_limits(limits=1):
            HANDLERS[args.command](rc, out, threads)
    except (ConfigError, OSError, ValueError, RuntimeError) as exc:
        _say(f"error: {exc}")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
