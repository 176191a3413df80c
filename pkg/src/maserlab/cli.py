"""Command-line interface, written as a thin client over the HTTP service.

Without --url the service runs in-process through an ASGI transport, so no
server needs to be started; with --url requests go to a remote instance.
Exit codes: 0 success, 1 usage error, 2 configuration error, 3 numerical or
service failure, 4 golden-check failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Optional, Sequence

import httpx
import numpy as np

from . import __version__
from . import dynamics
from . import svgplot
from . import sweeps
from .client import LocalClient, RemoteClient, ServiceError
from .config import load_mapping
from .errors import ConfigError, MaserlabError, ParameterError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_GOLDEN = 4

# Built-in reference setup: 3 GHz cavity, Q = 1e5, NV-doped diamond at room
# temperature. Used when no --config file is given and by --check.
DEFAULT_PARAMS = {
    "nu_c_hz": 3.0e9,
    "q_factor": 1.0e5,
    "v_eff_m3": 2.0e-6,
    "rho_nv_per_m3": 1.0e23,
    "v_nv_m3": 4.5e-9,
    "t2_star_s": 0.5e-6,
    "gamma_eg_per_s": 200.0,
    "w_per_s": 1.0e5,
    "t_k": 300.0,
    "l_m": 0.05,
    "g_hz": 0.02,
}

# (flag, config key, help)
PARAM_FLAGS = (
    ("--nu-c", "nu_c_hz", "cavity frequency in Hz"),
    ("--q", "q_factor", "loaded cavity quality factor"),
    ("--v-eff", "v_eff_m3", "cavity mode volume in m^3"),
    ("--rho-nv", "rho_nv_per_m3", "NV density in m^-3"),
    ("--v-nv", "v_nv_m3", "active crystal volume in m^3"),
    ("--t2-star", "t2_star_s", "inhomogeneous spin dephasing time in s"),
    ("--gamma-eg", "gamma_eg_per_s", "spin-lattice relaxation rate in 1/s"),
    ("--w", "w_per_s", "optical pump rate in 1/s"),
    ("--q-pump", "q_pump", "pump overhead factor"),
    ("--t", "t_k", "temperature in K"),
    ("--l", "l_m", "cavity length in m"),
    ("--b", "b_gauss", "bias magnetic field in gauss"),
    ("--gamma-nv", "gamma_nv_hz_per_gauss", "gyromagnetic ratio in Hz/G"),
    ("--d-zfs", "d_zfs_hz", "zero-field splitting in Hz"),
    ("--orientation-divisor", "orientation_divisor",
     "divisor giving the pumpable fraction of the NV ensemble"),
    ("--kappa-ex-fraction", "kappa_ex_fraction",
     "fraction of cavity loss that is output coupling"),
    ("--g", "g_hz", "single-spin coupling in Hz (overrides the geometric value)"),
)

DEFAULT_SWEEP_X = {"name": "w", "min": 10.0, "max": 1.0e6, "points": 100,
                   "scale": "log"}
DEFAULT_SWEEP_Y = {"name": "Q", "min": 1.0e3, "max": 1.0e7, "points": 100,
                   "scale": "log"}
QUANTITY_ALIASES = {q.lower(): q for q in sweeps.QUANTITIES}


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with code 1 on usage errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="maserlab",
        description="Steady states, coherence, sensitivity and amplification "
                    "of a cavity-coupled spin ensemble.",
        epilog="exit codes: 0 ok, 1 usage, 2 config, 3 numerical/service, "
               "4 golden check",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--url", metavar="URL",
                        help="base URL of a running service; "
                             "default runs the service in-process")
    parser.add_argument("--check", action="store_true",
                        help="run the built-in golden-value suite and exit "
                             "(0 on success, 4 on failure)")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser,
                                metavar="COMMAND")

    def command(name: str, help_text: str, func, with_params: bool = True,
                svg: bool = False):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(func=func)
        if with_params:
            p.add_argument("--config", metavar="PATH",
                           help="TOML or JSON parameter file "
                                "(default: built-in reference setup)")
            for flag, key, help_str in PARAM_FLAGS:
                p.add_argument(flag, dest=f"param_{key}", type=float,
                               metavar="X", help=help_str)
            p.add_argument("--json", metavar="PATH",
                           help="write the full response as JSON")
            p.add_argument("--csv", metavar="PATH", help="write results as CSV")
        if svg:
            p.add_argument("--svg", metavar="PATH",
                           help="render a heatmap with overlay curves")
        return p

    command("rates", "derived cavity, coupling and ensemble rates", cmd_rates)
    command("steady", "mean-field steady state and masing threshold", cmd_steady)

    p = command("correlations",
                "second-order steady state with thermal and correlation terms",
                cmd_correlations)
    p.add_argument("--optimal-pump", action="store_true",
                   help="also report the pump rate maximising the "
                        "spin-spin correlation")

    p = command("linewidth", "emission linewidth and coherence time",
                cmd_linewidth)
    p.add_argument("--spectrum", action="store_true",
                   help="include the phase-noise spectrum in JSON/CSV output")
    p.add_argument("--optimal", action="store_true",
                   help="also report the coherence-optimal pump rate")

    command("sensitivity",
            "magnetic-field and displacement sensitivity of the oscillator",
            cmd_sensitivity)

    p = command("amplify", "driven steady state as a microwave amplifier",
                cmd_amplify)
    p.add_argument("--p-in", dest="p_in", type=float, metavar="W",
                   help="input signal power in W")
    p.add_argument("--omega-in", dest="omega_in", type=float, metavar="HZ",
                   help="input signal frequency in Hz (default: pulled "
                        "oscillation frequency)")

    p = command("dynamics", "time integration of the equations of motion",
                cmd_dynamics)
    p.add_argument("--t-end", dest="t_end", type=float, metavar="S",
                   help="integration span in s (default: auto)")
    p.add_argument("--p-in", dest="p_in", type=float, metavar="W",
                   help="drive power in W (default: undriven)")
    p.add_argument("--omega-in", dest="omega_in", type=float, metavar="HZ",
                   help="drive frequency in Hz (default: cavity frequency)")
    p.add_argument("--seed", type=int, default=0, metavar="N",
                   help="seed for the initial transverse spin phase")
    p.add_argument("--max-samples", dest="max_samples", type=int, default=500,
                   metavar="N", help="maximum number of stored samples")

    p = command("sweep", "evaluate quantities over a 2-D parameter grid",
                cmd_sweep, svg=True)
    p.add_argument("--x", metavar="SPEC",
                   help="x axis as name:min:max:points[:scale], "
                        "e.g. w:10:1e6:100:log")
    p.add_argument("--y", metavar="SPEC",
                   help="y axis as name:min:max:points[:scale], "
                        "e.g. Q:1e3:1e7:100:log")
    p.add_argument("--quantity", action="append", metavar="NAME",
                   help="quantity to evaluate (repeatable or comma-separated); "
                        f"one of {', '.join(sweeps.QUANTITIES)}")
    p.add_argument("--p-in", dest="p_in", type=float, metavar="W",
                   help="fixed drive power in W when P_in is not an axis")

    p = command("serve", "run the HTTP service", cmd_serve, with_params=False)
    p.add_argument("--host", default="127.0.0.1", help="bind address")
    p.add_argument("--port", type=int, default=8000, help="bind port")

    return parser


def _collect_params(args: argparse.Namespace) -> tuple[dict, dict]:
    """Parameter mapping plus non-parameter config sections (sweep, drive)."""
    sections: dict[str, dict] = {}
    if getattr(args, "config", None):
        data = dict(load_mapping(args.config))
        for key in ("sweep", "drive"):
            if key in data:
                section = data.pop(key)
                if not isinstance(section, dict):
                    raise ConfigError(f"config section {key!r} must be a table")
                sections[key] = section
        params = data
    else:
        params = dict(DEFAULT_PARAMS)
    for _flag, key, _help in PARAM_FLAGS:
        value = getattr(args, f"param_{key}", None)
        if value is not None:
            params[key] = value
    return params, sections


def _drive_settings(args: argparse.Namespace, sections: dict,
                    require_power: bool) -> tuple[float, Optional[float]]:
    drive = sections.get("drive", {})
    p_in = getattr(args, "p_in", None)
    if p_in is None:
        p_in = drive.get("p_in_w")
    omega_in = getattr(args, "omega_in", None)
    if omega_in is None:
        omega_in = drive.get("omega_in_hz")
    if p_in is None:
        if require_power:
            raise ConfigError(
                "an input power is required (--p-in or a drive.p_in_w entry)")
        p_in = 0.0
    if require_power and p_in <= 0.0:
        raise ConfigError("input power must be positive")
    return float(p_in), None if omega_in is None else float(omega_in)


def _show(pairs: Sequence[tuple[str, str]]) -> None:
    width = max(len(key) for key, _ in pairs)
    for key, value in pairs:
        print(f"{key:<{width}}  {value}")


def _num(value: Optional[float], unit: str = "") -> str:
    if value is None:
        return "n/a"
    text = f"{value:.6g}"
    return f"{text} {unit}".rstrip()


def _write_json(path: Optional[str], payload: Any) -> None:
    if not path:
        return
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_scalar_csv(path: Optional[str], payload: dict) -> None:
    """Flat key,value CSV; nested structures are left to the JSON output."""
    if not path:
        return
    lines = ["key,value"]
    for key, value in payload.items():
        if isinstance(value, (dict, list)):
            continue
        lines.append(f"{key},{_csv_cell(value)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_rates(client, args: argparse.Namespace) -> int:
    params, _ = _collect_params(args)
    out = client.post("/rates", {"params": params})
    _show([
        ("omega_c", _num(out["omega_c_rad_per_s"], "rad/s")),
        ("omega_s", _num(out["omega_s_rad_per_s"], "rad/s")),
        ("g", _num(out["g_rad_per_s"], "rad/s")),
        ("N", _num(out["n_spins"])),
        ("kappa_c", _num(out["kappa_c_per_s"], "1/s")),
        ("kappa_ex", _num(out["kappa_ex_per_s"], "1/s")),
        ("kappa_s", _num(out["kappa_s_per_s"], "1/s")),
        ("n_th", _num(out["n_th"])),
        ("resonant", str(out["resonant"]).lower()),
    ])
    _write_json(args.json, out)
    _write_scalar_csv(args.csv, out)
    return EXIT_OK


def cmd_steady(client, args: argparse.Namespace) -> int:
    params, _ = _collect_params(args)
    out = client.post("/steady-state", {"params": params})
    threshold = client.post("/threshold", {"params": params})
    _show([
        ("regime", out["regime"]),
        ("S_z", _num(out["s_z"])),
        ("n_c", _num(out["n_c"])),
        ("n_s", _num(out["n_s"])),
        ("P_out", _num(out["p_out_w"], "W")),
        ("omega", _num(out["omega_rad_per_s"], "rad/s")),
        ("delta_cs", _num(out["delta_cs"])),
        ("Q threshold", _num(threshold["q_threshold"])),
        ("w_max", _num(threshold["w_max_per_s"], "1/s")),
    ])
    _write_json(args.json, {"steady_state": out, "threshold": threshold})
    _write_scalar_csv(args.csv, out)
    return EXIT_OK


def cmd_correlations(client, args: argparse.Namespace) -> int:
    params, _ = _collect_params(args)
    out = client.post("/correlations", {"params": params})
    pairs = [
        ("masing", str(out["masing"]).lower()),
        ("S_z", _num(out["s_z"])),
        ("spin_corr", _num(out["spin_corr"])),
        ("n_c", _num(out["n_c"])),
        ("n_s", _num(out["n_s"])),
        ("photon flux", _num(out["flux_per_s"], "1/s")),
        ("P_out", _num(out["p_out_w"], "W")),
        ("closure residual", _num(out["residual_max"])),
    ]
    extra = None
    if args.optimal_pump:
        extra = client.post("/correlations/optimal-pump", {"params": params})
        pairs += [
            ("w_opt", _num(extra["w_opt_per_s"], "1/s")),
            ("corr_max", _num(extra["corr_max"])),
        ]
    _show(pairs)
    payload = out if extra is None else {"correlations": out,
                                         "optimal_pump": extra}
    _write_json(args.json, payload)
    _write_scalar_csv(args.csv, out)
    return EXIT_OK


def cmd_linewidth(client, args: argparse.Namespace) -> int:
    params, _ = _collect_params(args)
    out = client.post("/linewidth",
                      {"params": params, "spectrum": bool(args.spectrum)})
    pairs = [
        ("gamma_ST", _num(out["gamma_st_per_s"], "1/s")),
        ("FWHM", _num(out["fwhm_hz"], "Hz")),
        ("T_coh", _num(out["t_coh_s"], "s")),
        ("n_incoh", _num(out["n_incoh"])),
    ]
    extra = None
    if args.optimal:
        extra = client.post("/linewidth/optimal", {"params": params})
        pairs += [
            ("w_opt", _num(extra["w_numeric_per_s"], "1/s")),
            ("T_coh at w_opt", _num(extra["t_coh_numeric_s"], "s")),
        ]
    _show(pairs)
    payload = out if extra is None else {"linewidth": out, "optimal": extra}
    _write_json(args.json, payload)
    if args.csv:
        spectrum = out.get("spectrum")
        if spectrum:
            lines = ["omega_rad_per_s,total,spin_term,cavity_term"]
            for row in zip(spectrum["omega_rad_per_s"], spectrum["total"],
                           spectrum["spin_term"], spectrum["cavity_term"]):
                lines.append(",".join(f"{v:.17g}" for v in row))
            with open(args.csv, "w", encoding="utf-8") as fh:
                fh.write("\n".join(lines) + "\n")
        else:
            _write_scalar_csv(args.csv, out)
    return EXIT_OK


def cmd_sensitivity(client, args: argparse.Namespace) -> int:
    params, _ = _collect_params(args)
    out = client.post("/sensitivity", {"params": params})
    _show([
        ("delta_B", _num(out["delta_b_t_per_sqrt_hz"], "T/sqrt(Hz)")),
        ("bandwidth (B)", _num(out["omega_max_b_rad_per_s"], "rad/s")),
        ("delta_x", _num(out["delta_x_m_per_sqrt_hz"], "m/sqrt(Hz)")),
        ("bandwidth (x)", _num(out["omega_max_x_rad_per_s"], "rad/s")),
        ("gamma_ST", _num(out["gamma_st_per_s"], "1/s")),
    ])
    _write_json(args.json, out)
    _write_scalar_csv(args.csv, out)
    return EXIT_OK


def _amplify_csv(path: Optional[str], out: dict) -> None:
    if not path:
        return
    cols = ("s_z", "x", "gain", "gain_db", "p_out_w", "t_n_k", "stable",
            "max_re_eig")
    lines = [",".join(cols)]
    for branch in out["branches"]:
        lines.append(",".join(_csv_cell(branch[c]) for c in cols))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_amplify(client, args: argparse.Namespace) -> int:
    params, sections = _collect_params(args)
    p_in, omega_in = _drive_settings(args, sections, require_power=True)
    payload: dict[str, Any] = {"params": params, "p_in_w": p_in}
    if omega_in is not None:
        payload["omega_in_hz"] = omega_in
    out = client.post("/amplifier", payload)
    branch = out["branches"][out["stable_index"]]
    t_n = branch["t_n_k"]
    _show([
        ("regime", out["regime"]),
        ("input power", _num(p_in, "W")),
        ("gain", "n/a" if branch["gain_db"] is None
         else f"{branch['gain_db']:.1f} dB"),
        ("noise temperature", "n/a" if t_n is None else f"{t_n:.3f} K"),
        ("output power", _num(branch["p_out_w"], "W")),
        ("S_z", _num(branch["s_z"])),
        ("branches", f"{len(out['branches'])} (stable: {out['stable_index']})"),
    ])
    _write_json(args.json, out)
    _amplify_csv(args.csv, out)
    return EXIT_OK


def cmd_dynamics(client, args: argparse.Namespace) -> int:
    params, sections = _collect_params(args)
    p_in, omega_in = _drive_settings(args, sections, require_power=False)
    payload: dict[str, Any] = {
        "params": params,
        "seed": args.seed,
        "p_in_w": p_in,
        "max_samples": args.max_samples,
    }
    if args.t_end is not None:
        payload["t_end_s"] = args.t_end
    if omega_in is not None:
        payload["omega_in_hz"] = omega_in
    out = client.post("/dynamics", payload)
    n_e, n_g = out["n_e"][-1], out["n_g"][-1]
    s_mag = abs(complex(out["s_re"][-1], out["s_im"][-1]))
    a_mag = abs(complex(out["a_re"][-1], out["a_im"][-1]))
    _show([
        ("converged", str(out["converged"]).lower()),
        ("residual", _num(out["residual"])),
        ("t final", _num(out["t_s"][-1], "s")),
        ("S_z final", _num(n_e - n_g)),
        ("|S_minus| final", _num(s_mag)),
        ("n_c final", _num(a_mag ** 2)),
        ("samples", str(len(out["t_s"]))),
    ])
    _write_json(args.json, out)
    if args.csv:
        trace = dynamics.Trace(
            t=np.asarray(out["t_s"], dtype=float),
            y=np.column_stack([np.asarray(out[k], dtype=float) for k in
                               ("n_e", "n_g", "s_re", "s_im", "a_re", "a_im")]),
            frame=out["frame_rad_per_s"],
            converged=out["converged"],
            residual=out["residual"],
        )
        trace.to_csv(args.csv)
    return EXIT_OK


def _parse_axis(text: str) -> dict:
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise ConfigError(
            f"axis spec {text!r} must be name:min:max:points[:scale]")
    try:
        spec = {"name": parts[0], "min": float(parts[1]), "max": float(parts[2]),
                "points": int(parts[3])}
    except ValueError as exc:
        raise ConfigError(f"bad axis spec {text!r}: {exc}") from exc
    spec["scale"] = parts[4] if len(parts) == 5 else "log"
    return spec


def _axis_from_section(raw: Any, label: str) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError(f"sweep.{label} must be a table with "
                          "name/min/max/points[/scale]")
    missing = [k for k in ("name", "min", "max", "points") if k not in raw]
    if missing:
        raise ConfigError(f"sweep.{label} is missing {', '.join(missing)}")
    unknown = sorted(set(raw) - {"name", "min", "max", "points", "scale"})
    if unknown:
        raise ConfigError(f"sweep.{label} has unknown keys: {', '.join(unknown)}")
    return {"name": str(raw["name"]), "min": float(raw["min"]),
            "max": float(raw["max"]), "points": int(raw["points"]),
            "scale": str(raw.get("scale", "log"))}


def _resolve_quantities(args: argparse.Namespace, section: dict,
                        p_in: float) -> list[str]:
    raw: list[str] = []
    if args.quantity:
        for entry in args.quantity:
            raw.extend(part for part in entry.split(",") if part)
    elif "quantities" in section:
        raw = [str(q) for q in section["quantities"]]
    if not raw:
        names = ["S_z", "P_out", "spin_corr", "T_coh", "delta_B", "delta_x",
                 "regime"]
        if p_in > 0.0:
            names += ["gain_db", "T_n"]
        return names
    out = []
    for name in raw:
        canonical = QUANTITY_ALIASES.get(name.lower())
        if canonical is None:
            raise ConfigError(f"unknown quantity {name!r}; allowed: "
                              f"{', '.join(sweeps.QUANTITIES)}")
        if canonical not in out:
            out.append(canonical)
    return out


def cmd_sweep(client, args: argparse.Namespace) -> int:
    params, sections = _collect_params(args)
    section = sections.get("sweep", {})

    if args.x:
        x = _parse_axis(args.x)
    elif "x" in section:
        x = _axis_from_section(section["x"], "x")
    else:
        x = dict(DEFAULT_SWEEP_X)
    if args.y:
        y = _parse_axis(args.y)
    elif "y" in section:
        y = _axis_from_section(section["y"], "y")
    else:
        y = dict(DEFAULT_SWEEP_Y)

    p_in = args.p_in
    if p_in is None:
        p_in = section.get("p_in_w")
    if p_in is None:
        p_in = sections.get("drive", {}).get("p_in_w", 0.0)
    p_in = float(p_in)
    quantities = _resolve_quantities(args, section, p_in)

    out = client.post("/sweep", {
        "params": params,
        "x": x,
        "y": y,
        "quantities": quantities,
        "p_in_w": p_in,
    })
    grid = sweeps.grid_from_payload(out)

    cells = grid.x_values.size * grid.y_values.size
    defined = {q: int(np.sum(~np.isnan(m))) for q, m in grid.data.items()}
    pairs = [
        ("grid", f"{grid.x_values.size} x {grid.y_values.size} "
                 f"({x['name']} x {y['name']})"),
        ("quantities", ", ".join(quantities)),
        ("drive power", _num(p_in, "W")),
    ]
    for q in quantities:
        if q == "regime":
            kinds = sorted({str(v) for row in grid.regimes for v in row})
            pairs.append(("regimes seen", ", ".join(kinds)))
        else:
            pairs.append((f"{q} defined", f"{defined[q]}/{cells} cells"))
    _show(pairs)

    if args.csv:
        sweeps.write_csv(grid, args.csv)
        print(f"wrote {args.csv}")
    if args.json:
        sweeps.write_json(grid, args.json)
        print(f"wrote {args.json}")
    if args.svg:
        numeric = [q for q in quantities if q != "regime"]
        if not numeric:
            raise ConfigError("an SVG heatmap needs at least one "
                              "numeric quantity")
        svgplot.render_heatmap(grid, numeric[0], args.svg)
        print(f"wrote {args.svg} ({numeric[0]})")
    return EXIT_OK


def cmd_serve(client, args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def run_golden_check(client) -> int:
    """Compare headline observables of the reference setup against
    pre-registered windows; exit 4 if any lands outside."""
    base = dict(DEFAULT_PARAMS)
    amp = dict(base, q_factor=4.0e4)

    rates = client.post("/rates", {"params": base})
    lw = client.post("/linewidth", {"params": base})
    sens = client.post("/sensitivity", {"params": base})
    threshold = client.post("/threshold", {"params": base})
    ampl = client.post("/amplifier", {"params": amp, "p_in_w": 1.0e-15})
    branch = ampl["branches"][ampl["stable_index"]]

    checks = [
        ("thermal photon number", rates["n_th"], 2040.0, 2130.0, ""),
        ("coherence time", lw["t_coh_s"], 5.7e4, 6.3e4, "s"),
        ("linewidth FWHM", lw["fwhm_hz"], 4.5e-6, 6.0e-6, "Hz"),
        ("field sensitivity", sens["delta_b_t_per_sqrt_hz"],
         0.95e-12, 1.10e-12, "T/sqrt(Hz)"),
        ("displacement sensitivity", sens["delta_x_m_per_sqrt_hz"],
         15.2e-15, 16.8e-15, "m/sqrt(Hz)"),
        ("threshold quality factor", threshold["q_threshold"],
         4.3e4, 4.7e4, ""),
        ("amplifier gain", branch["gain_db"], 24.5, 25.5, "dB"),
        ("amplifier noise temperature", branch["t_n_k"], 0.147, 0.157, "K"),
    ]
    failures = 0
    for label, value, lo, hi, unit in checks:
        ok = value is not None and lo <= value <= hi
        status = "ok  " if ok else "FAIL"
        print(f"{status} {label}: {_num(value, unit)} "
              f"(expected [{lo:g}, {hi:g}])")
        if not ok:
            failures += 1
    if failures:
        print(f"{failures} golden check(s) failed")
        return EXIT_GOLDEN
    print("all golden checks passed")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        client = RemoteClient(args.url) if args.url else LocalClient()
        if args.check:
            return run_golden_check(client)
        if args.command is None:
            parser.error("a subcommand is required (or --check)")
        return args.func(client, args)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ServiceError as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return EXIT_CONFIG if exc.status_code == 422 else EXIT_NUMERICAL
    except MaserlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except httpx.HTTPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
