"""``wblab`` command line.

Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ambiguity import af_cuts, af_metrics, baf, default_delays, default_dopplers, naf
from .bearing import default_theta_grid, fi_profile
from .channel import LineSource, analysis_band, build_echo_model, filter_waveform
from .experiments import ExperimentConfig, run
from .export import (
    config_hash,
    export_af,
    export_coefficients,
    export_cut,
    export_echo_model,
    export_profile,
    export_spectrum,
    export_waveform,
    write_json,
)
from .gbf import gbf_coefficients
from .metrics import CrlbInputs, crlb_delay_doppler, waveform_metrics
from .mtsfm import (
    FourierModulation,
    LinearModulation,
    WaveformParams,
    random_mtsfm,
    sweep_center,
    synthesize,
    synthesize_cw,
    synthesize_lfm,
)
from .spectrum import lfm_spectrum, spectral_centroid, spectrum_closed_form, spectrum_fft, uniform_grid

# defaults for the single-stage commands; a config file may override any of them
STAGE_DEFAULTS = {
    "waveform": "mtsfm",
    "symmetry": "even",
    "K": 32,
    "q": 5.0,
    "tbp": 100.0,
    "T": 1.0,
    "seed": 0,
    "aperture_m": 30.0,
    "theta_deg": None,
    "fft": False,
    "zero_pad": 4,
    "snr": 10.0,
    "coupling": "printed",
    "max_range_rate": None,
    "surface_stride": 8,
}

FIGURES = {"fig2": "fig2_correlation", "fig3": "fig3_qsweep", "fig4": "fig4_af_filtering"}


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file of settings (all keys optional)")
    p.add_argument("--seed", type=int, help="master seed (64-bit)")
    p.add_argument("--out", type=Path, help="output directory (default: results)")
    p.add_argument("--paper-scale", action="store_true", help="use the paper's trial counts")


def _stage_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--waveform", choices=("mtsfm", "lfm", "cw"))
    p.add_argument("--symmetry", choices=("even", "odd", "mixed"))
    p.add_argument("--K", type=int, help="harmonic count")
    p.add_argument("--q", type=float, help="quality factor fc/delta_f")
    p.add_argument("--tbp", type=float, help="time-bandwidth product")
    p.add_argument("--T", type=float, help="pulse duration (s)")
    p.add_argument("--aperture-m", dest="aperture_m", type=float, help="line source length (m)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wblab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"wblab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a waveform")
    _common(p)
    _stage_opts(p)

    p = sub.add_parser("spectrum", help="closed-form (or FFT) spectrum and GBF coefficients")
    _common(p)
    _stage_opts(p)
    p.add_argument("--fft", action="store_true", default=None, help="use the DFT of the samples")
    p.add_argument("--zero-pad", dest="zero_pad", type=int)

    p = sub.add_parser("metrics", help="RMS bandwidth, pulse length, RDCF and CRLBs")
    _common(p)
    _stage_opts(p)
    p.add_argument("--snr", type=float)
    p.add_argument("--coupling", choices=("printed", "squared"))

    p = sub.add_parser("af", help="ambiguity surface, cuts and metrics")
    _common(p)
    _stage_opts(p)
    p.add_argument("--theta-deg", dest="theta_deg", type=float, help="filter through the line source at this bearing")
    p.add_argument("--max-range-rate", dest="max_range_rate", type=float,
                   help="compute the broadband AF over +-this range rate (m/s) instead")
    p.add_argument("--surface-stride", dest="surface_stride", type=int)

    p = sub.add_parser("fi", help="bearing Fisher information profile")
    _common(p)
    _stage_opts(p)

    for name in FIGURES:
        p = sub.add_parser(name, help=f"reproduce {name}")
        _common(p)
        p.add_argument("--trials", type=int)
        p.add_argument("--K", type=int)
    return parser


def _load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read config {path}: {e}") from e
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return data


def _stage_settings(args: argparse.Namespace) -> dict:
    cfg = _load_config(args.config)
    unknown = set(cfg) - set(STAGE_DEFAULTS) - {"output_dir"}
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    s = {**STAGE_DEFAULTS, **cfg}
    for k in STAGE_DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            s[k] = v
    s["out"] = Path(args.out or cfg.get("output_dir", "results"))
    return s


def _design(s: dict):
    params = WaveformParams.from_q_tbp(s["q"], s["tbp"], s["T"])
    if s["waveform"] == "lfm":
        return LinearModulation(params.delta_f, params.T), params
    if s["waveform"] == "cw":
        return FourierModulation.zeros(1, params.T), params
    return random_mtsfm(int(s["K"]), s["symmetry"], params.delta_f, params.T, int(s["seed"])), params


def _synth(mod, params, representation="baseband"):
    if isinstance(mod, LinearModulation):
        return synthesize_lfm(params, representation)
    return synthesize(mod, params, representation)


def _meta(s: dict, mod, params) -> dict:
    coeffs = mod.to_dict() if isinstance(mod, FourierModulation) else {"delta_f": mod.delta_f, "T": mod.T}
    return {"waveform": s["waveform"], "fc": params.fc, "delta_f": params.delta_f, "T": params.T, "fs": params.fs,
            "seed": s["seed"], "symmetry": s["symmetry"] if s["waveform"] == "mtsfm" else None,
            "coefficients": coeffs}


def cmd_synth(s: dict, h: str) -> dict:
    mod, params = _design(s)
    w = _synth(mod, params)
    export_waveform(s["out"] / "waveform.csv", w, _meta(s, mod, params), h)
    return {"n": w.n, "fs": w.fs, "energy": w.energy, **_meta(s, mod, params)}


def cmd_spectrum(s: dict, h: str) -> dict:
    mod, params = _design(s)
    out = {"fc": params.fc, "delta_f": params.delta_f}
    if s["fft"]:
        spec = spectrum_fft(_synth(mod, params), int(s["zero_pad"]))
    elif isinstance(mod, LinearModulation):
        grid = uniform_grid(params.fc, 2 * params.delta_f, int(64 * params.tbp) + 1)
        spec = lfm_spectrum(params, grid)
    else:
        g = gbf_coefficients(mod)
        export_coefficients(s["out"] / "coefficients.csv", g, h)
        center = params.fc + mod.a0 / 2
        half = g.M / params.T + params.delta_f / 2
        spec = spectrum_closed_form(g, params, uniform_grid(center, half, int(16 * 2 * half * params.T) + 1))
        out.update({"M": g.M, "coefficient_energy": g.energy})
    export_spectrum(s["out"] / "spectrum.csv", spec, h)
    f0 = spectral_centroid(spec)
    out.update({"centroid_hz": f0, "delta_f_hz": f0 - params.fc, "energy": spec.energy(), "df": spec.df})
    return out


def cmd_metrics(s: dict, h: str) -> dict:
    mod, params = _design(s)
    m = waveform_metrics(mod, params)
    out = m.to_dict()
    try:
        var_tau, var_nu = crlb_delay_doppler(m, CrlbInputs(float(s["snr"])), s["coupling"])
        out.update({"crlb_delay_s2": var_tau, "crlb_doppler": var_nu})
    except ValueError as e:
        out.update({"crlb_delay_s2": None, "crlb_doppler": None, "crlb_note": str(e)})
    out.update({"snr": s["snr"], "coupling": s["coupling"]})
    write_json(s["out"] / "metrics.json", out, h)
    return out


def cmd_af(s: dict, h: str) -> dict:
    mod, params = _design(s)
    out = {}
    if s["max_range_rate"] is not None:
        params = params.with_fs(params.carrier_fs())
        w = _synth(mod, params, "carrier")
        rr = np.linspace(-s["max_range_rate"], s["max_range_rate"], 41)
        af = baf(w, default_delays(params.T, params.fs), rr)
        export_af(s["out"] / "baf.csv", af, h)
        return {"kind": "broadband", "range_rates": [float(rr[0]), float(rr[-1])], "peak": float(af.values.max())}
    w = _synth(mod, params)
    if s["theta_deg"] is not None:
        w = filter_waveform(w, LineSource(s["aperture_m"]), math.radians(s["theta_deg"]), renormalize=True)
        out["theta_deg"] = s["theta_deg"]
    af = naf(w, default_delays(params.T, params.fs), default_dopplers(params.T))
    zd, zt = af_cuts(af)
    export_cut(s["out"] / "cut_zero_doppler.csv", af.delays, zd, h)
    export_cut(s["out"] / "cut_zero_delay.csv", af.dopplers, zt, h)
    stride = max(1, int(s["surface_stride"]))
    export_af(s["out"] / "af.csv", af.__class__(af.delays[::stride], af.dopplers, af.values[:, ::stride], af.kind, af.meta), h)
    m = af_metrics(af).to_dict()
    write_json(s["out"] / "af_metrics.json", m, h)
    out.update({"kind": "narrowband", **m})
    return out


def cmd_fi(s: dict, h: str) -> dict:
    mod, params = _design(s)
    ls = LineSource(s["aperture_m"])
    band = analysis_band(params.fc + sweep_center(mod), params.delta_f)
    if isinstance(mod, LinearModulation):
        spec = lfm_spectrum(params, band)
    else:
        spec = spectrum_closed_form(gbf_coefficients(mod), params, band, allow_partial=True)
    prof = fi_profile(spec, ls, default_theta_grid())
    export_profile(s["out"] / "profile.csv", prof, h)
    export_echo_model(s["out"] / "echo_model.csv", build_echo_model(spec, ls, prof.theta_star), h)
    i0 = int(np.argmin(np.abs(prof.thetas)))
    return {"theta_star_deg": math.degrees(prof.theta_star), "fi_max": prof.fi_max, "fi_at_zero": float(prof.fi[i0]),
            "grid_res_deg": math.degrees(prof.grid_res), "aperture_m": ls.L}


STAGES = {"synth": cmd_synth, "spectrum": cmd_spectrum, "metrics": cmd_metrics, "af": cmd_af, "fi": cmd_fi}


def _run_figure(args: argparse.Namespace) -> dict:
    d = _load_config(args.config)
    d["experiment"] = FIGURES[args.command]
    if args.seed is not None:
        d["seed"] = args.seed
    if args.out is not None:
        d["output_dir"] = str(args.out)
    if args.trials is not None:
        d["trials"] = args.trials
    if args.K is not None:
        d["K"] = args.K
    try:
        cfg = ExperimentConfig.from_dict(d, paper_scale=args.paper_scale)
    except (TypeError, ValueError) as e:
        raise UsageError(str(e)) from e
    res = run(cfg)
    return {k: v for k, v in res.summary.items() if k != "coefficients"} | {"files": [str(f) for f in res.files]}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in FIGURES:
            summary = _run_figure(args)
        else:
            s = _stage_settings(args)
            settings = {k: v for k, v in s.items() if k != "out"}
            summary = STAGES[args.command](s, config_hash(settings))
    except UsageError as e:
        print(f"wblab: error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
        print(f"wblab: numerical failure: {e}", file=sys.stderr)
        return 1
    json.dump(summary, sys.stdout, indent=2, sort_keys=True, default=_default)
    sys.stdout.write("\n")
    return 0


def _default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, Path):
        return str(x)
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(type(x).__name__)


if __name__ == "__main__":
    sys.exit(main())
