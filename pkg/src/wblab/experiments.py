"""Seeded reproductions of the three simulation studies.

Each run writes ``trials.csv`` (authoritative), ``summary.json`` and SVG
charts to the output directory. Trials are seeded from
``(master seed, stream, trial index)`` so results do not depend on the
worker schedule; ``WBLAB_THREADS`` caps the process pool.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

from .ambiguity import af_cuts, af_metrics, naf
from .bearing import compensate_offset, default_theta_grid, fi_profile, target_carrier, theta_star_deviation
from .channel import SOUND_SPEED, LineSource, analysis_band, filter_waveform
from .export import config_hash, export_af, export_cut, write_csv, write_json
from .gbf import gbf_coefficients
from .metrics import rdcf
from .mtsfm import WaveformParams, random_mtsfm, sweep_center, synthesize
from .spectrum import lfm_spectrum, spectral_centroid, spectrum_closed_form
from .svg import Chart

EXPERIMENTS = ("fig2_correlation", "fig3_qsweep", "fig4_af_filtering", "single")

_DEFAULTS = {
    "fig2_correlation": {"trials": 200, "q_list": (5.0,), "tbp_list": (100.0,)},
    "fig3_qsweep": {"trials": 200, "q_list": (20.0, 10.0, 5.0), "tbp_list": (100.0, 200.0, 400.0)},
    "fig4_af_filtering": {"trials": 1, "q_list": (5.0,), "tbp_list": (100.0,)},
    "single": {"trials": 1, "q_list": (5.0,), "tbp_list": (100.0,)},
}
PAPER_TRIALS = {"fig2_correlation": 1000, "fig3_qsweep": 2000}

# keys that never change results; left out of the config hash
_RUNTIME_KEYS = ("output_dir",)


@dataclass(frozen=True)
class ExperimentConfig:
    """Experiment settings. All fields have defaults; ``from_dict`` fills per-experiment ones."""

    experiment: str = "fig2_correlation"
    trials: int = 200
    q_list: tuple = (5.0,)
    tbp_list: tuple = (100.0,)
    K: int = 32
    seed: int = 0
    output_dir: str = "results"
    T: float = 1.0
    aperture_m: float = 30.0
    c: float = SOUND_SPEED
    theta_max_deg: float = 20.0
    theta_step_deg: float = 0.01
    band_points: int = 256
    band_widen: float = 1.25
    targets_deg: tuple = (3.0, 4.5, 6.0, 7.5)
    fc_search_hz: tuple = (50.0, 20000.0)
    doppler_span_bins: float = 20.0
    doppler_per_bin: int = 8
    surface_stride: int = 8

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if len(self.q_list) != len(self.tbp_list):
            raise ValueError("q_list and tbp_list must have equal length")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if not (self.aperture_m > 0 and self.T > 0 and self.theta_step_deg > 0):
            raise ValueError("aperture_m, T and theta_step_deg must be positive")

    @classmethod
    def from_dict(cls, d: dict, paper_scale: bool = False) -> "ExperimentConfig":
        d = dict(d)
        exp = d.get("experiment", cls.experiment)
        merged = {**_DEFAULTS.get(exp, {}), **d, "experiment": exp}
        known = {f.name for f in fields(cls)}
        unknown = set(merged) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for k in ("q_list", "tbp_list", "targets_deg", "fc_search_hz"):
            if k in merged:
                merged[k] = tuple(float(v) for v in merged[k])
        if paper_scale and exp in PAPER_TRIALS:
            merged["trials"] = PAPER_TRIALS[exp]
        return cls(**merged)

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        return cls.from_dict({**json.loads(Path(path).read_text()), **overrides})

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}

    def hash(self) -> str:
        d = self.to_dict()
        for k in _RUNTIME_KEYS:
            d.pop(k)
        return config_hash(d)

    @property
    def theta_grid(self) -> np.ndarray:
        return default_theta_grid(self.theta_max_deg, self.theta_step_deg)

    @property
    def line_source(self) -> LineSource:
        return LineSource(self.aperture_m, self.c)


@dataclass
class TrialRecord:
    seed: int
    symmetry: str
    q: float
    tbp: float
    delta_f_pct: float
    theta_star_dev_pct: float
    fi_pct_of_max: float
    gamma: float = math.nan
    psl_delay_db: float = math.nan
    psl_doppler_db: float = math.nan
    extra: dict = field(default_factory=dict)

    def row(self, columns: list[str]) -> list:
        d = {**{k: v for k, v in asdict(self).items() if k != "extra"}, **self.extra}
        return [d.get(c, math.nan) for c in columns]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[TrialRecord]
    summary: dict
    files: list[Path]


def trial_seed(master: int, stream: int, index: int) -> int:
    """64-bit seed for one trial, independent of execution order."""
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFFFFFFFFFF, int(stream), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def worker_count() -> int:
    v = os.environ.get("WBLAB_THREADS", "").strip()
    if v:
        n = int(v)
        if n < 1:
            raise ValueError("WBLAB_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def _pmap(fn: Callable, tasks: list, threads: int | None = None) -> list:
    threads = worker_count() if threads is None else threads
    if threads <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * threads))))


# ---- shared analysis -------------------------------------------------------


def design_spectrum(mod, params: WaveformParams, cfg: ExperimentConfig):
    """Closed-form spectrum on the echo-model band around the sweep centre."""
    band = analysis_band(params.fc + sweep_center(mod), params.delta_f, cfg.band_points, cfg.band_widen)
    return spectrum_closed_form(gbf_coefficients(mod), params, band, allow_partial=True)


@lru_cache(maxsize=64)
def _lfm_profile_cached(fc: float, delta_f: float, T: float, key: tuple):
    cfg = ExperimentConfig.from_dict(dict(key))
    params = WaveformParams(fc, delta_f, T, 16 * delta_f)
    band = analysis_band(fc, delta_f, cfg.band_points, cfg.band_widen)
    return fi_profile(lfm_spectrum(params, band), cfg.line_source, cfg.theta_grid)


def _profile_key(cfg: ExperimentConfig) -> tuple:
    keep = ("aperture_m", "c", "theta_max_deg", "theta_step_deg", "band_points", "band_widen")
    return tuple((k, getattr(cfg, k)) for k in keep)


def lfm_reference(params: WaveformParams, cfg: ExperimentConfig):
    """FI profile of the LFM with the same fc, bandwidth and duration."""
    return _lfm_profile_cached(params.fc, params.delta_f, params.T, _profile_key(cfg))


def evaluate_design(mod, params: WaveformParams, ref, cfg: ExperimentConfig) -> dict:
    """Centroid shift, Theta* deviation and FI at the reference Theta* for one design."""
    spec = design_spectrum(mod, params, cfg)
    delta_f = spectral_centroid(spec) - params.fc
    prof = fi_profile(spec, cfg.line_source, cfg.theta_grid)
    return {
        "delta_f": delta_f,
        "delta_f_pct": 100.0 * delta_f / params.fc,
        "theta_star": prof.theta_star,
        "theta_star_dev_pct": theta_star_deviation(prof, ref),
        "fi_pct_of_max": 100.0 * prof.fi_at_angle(ref.theta_star) / prof.fi_max,
    }


def _percentiles(x: np.ndarray) -> dict:
    x = np.asarray(x, float)
    lo, hi = np.percentile(x, [2.5, 97.5])
    return {
        "mean": float(x.mean()),
        "median": float(np.median(x)),
        "p2_5": float(lo),
        "p97_5": float(hi),
        "ci_width": float(hi - lo),
    }


def _write_outputs(cfg: ExperimentConfig, columns: list[str], records: list[TrialRecord], summary: dict,
                   charts: dict[str, Chart]) -> list[Path]:
    out = Path(cfg.output_dir)
    h = cfg.hash()
    files = [write_csv(out / "trials.csv", columns, (r.row(columns) for r in records), h)]
    files.append(write_json(out / "summary.json", {"config": cfg.to_dict(), **summary}, h))
    for name, chart in charts.items():
        chart.comment = f"wblab config={h}"
        files.append(chart.save(out / name))
    return files


# ---- Fig. 2: centroid shift vs Theta* deviation ----------------------------

_FIG2_CLASSES = ("even", "odd")
_FIG2_COLUMNS = ["trial", "seed", "symmetry", "q", "tbp", "delta_f_pct", "theta_star_dev_pct", "fi_pct_of_max", "gamma"]


def fig2_params(cfg: ExperimentConfig) -> WaveformParams:
    return WaveformParams.from_q_tbp(cfg.q_list[0], cfg.tbp_list[0], cfg.T)


def _fig2_trial(task) -> TrialRecord:
    cfg_dict, cls_idx, trial = task
    cfg = ExperimentConfig.from_dict(cfg_dict)
    params = fig2_params(cfg)
    sym = _FIG2_CLASSES[cls_idx]
    seed = trial_seed(cfg.seed, cls_idx, trial)
    mod = random_mtsfm(cfg.K, sym, params.delta_f, params.T, seed)
    ev = evaluate_design(mod, params, lfm_reference(params, cfg), cfg)
    gamma = rdcf(mod, synthesize(mod, params))
    return TrialRecord(seed, sym, params.q, params.tbp, ev["delta_f_pct"], ev["theta_star_dev_pct"],
                       ev["fi_pct_of_max"], gamma, extra={"trial": trial})


def run_fig2(cfg: ExperimentConfig, threads: int | None = None) -> ExperimentResult:
    """Percent centroid shift vs percent Theta* deviation for cosine and sine MTSFMs."""
    params = fig2_params(cfg)
    ref = lfm_reference(params, cfg)
    tasks = [(cfg.to_dict(), c, i) for c in range(len(_FIG2_CLASSES)) for i in range(cfg.trials)]
    records = _pmap(_fig2_trial, tasks, threads)

    res_pct = 100.0 * cfg.theta_step_deg / math.degrees(ref.theta_star)
    summary = {
        "fc_hz": params.fc,
        "delta_f_hz": params.delta_f,
        "T_s": params.T,
        "reference_theta_star_deg": math.degrees(ref.theta_star),
        "grid_resolution_pct": res_pct,
        "coefficient_law": "uniform(-1,1)/k, sweep centred on fc +- delta_f/2",
        "classes": {},
    }
    chart = Chart("Theta* deviation vs mean-frequency deviation", "delta f (% of fc)", "Theta* deviation (%)")
    for sym in _FIG2_CLASSES:
        rs = [r for r in records if r.symmetry == sym]
        x = np.array([r.delta_f_pct for r in rs])
        y = np.array([r.theta_star_dev_pct for r in rs])
        r = float(np.corrcoef(x, y)[0, 1]) if np.ptp(x) > 0 and np.ptp(y) > 0 else math.nan
        summary["classes"][sym] = {
            "n": len(rs),
            "pearson_r": r,
            "max_abs_delta_f_pct": float(np.abs(x).max()),
            "max_abs_theta_dev_pct": float(np.abs(y).max()),
            "median_abs_theta_dev_pct": float(np.median(np.abs(y))),
            "max_abs_gamma": float(max(abs(r_.gamma) for r_ in rs)),
        }
        chart.add("cosine (even m)" if sym == "even" else "sine (odd m)", x, y)
    files = _write_outputs(cfg, _FIG2_COLUMNS, records, summary, {"fig2_scatter.svg": chart})
    return ExperimentResult(cfg, records, summary, files)


# ---- Fig. 3: Q sweep at targeted Theta* ------------------------------------

_FIG3_COLUMNS = ["trial", "seed", "symmetry", "q", "tbp", "target_deg", "fc_hz", "delta_f_pct", "theta_star_dev_pct",
                 "fi_pct_of_max", "comp_delta_f_pct", "comp_theta_star_dev_pct", "comp_fi_pct_of_max"]


def fig3_params(fc: float, q: float, tbp: float) -> WaveformParams:
    """Fixed fc; bandwidth fc/Q and duration chosen to give the requested TBP."""
    delta_f = fc / q
    return WaveformParams(fc, delta_f, tbp / delta_f, 16 * delta_f)


def target_fcs(cfg: ExperimentConfig) -> list[float]:
    """Carrier per target so the first (highest-Q) LFM reference peaks at the target angle."""
    q0, tbp0 = cfg.q_list[0], cfg.tbp_list[0]

    def theta_star(fc):
        return lfm_reference(fig3_params(fc, q0, tbp0), cfg).theta_star

    lo, hi = cfg.fc_search_hz
    return [target_carrier(math.radians(t), theta_star, lo, hi) for t in cfg.targets_deg]


def _fig3_trial(task) -> list[TrialRecord]:
    cfg_dict, qi, trial, fcs = task
    cfg = ExperimentConfig.from_dict(cfg_dict)
    q, tbp = cfg.q_list[qi], cfg.tbp_list[qi]
    seed = trial_seed(cfg.seed, qi, trial)
    # one draw per trial at unit bandwidth and duration; the coefficients scale linearly
    unit = random_mtsfm(cfg.K, "even", 1.0, 1.0, seed)
    out = []
    for target, fc in zip(cfg.targets_deg, fcs):
        params = fig3_params(fc, q, tbp)
        ref = lfm_reference(params, cfg)
        mod = replace(unit.scaled(params.delta_f).with_a0(unit.a0 * params.delta_f), T=params.T)
        ev = evaluate_design(mod, params, ref, cfg)
        comp = evaluate_design(compensate_offset(mod, ev["delta_f"]), params, ref, cfg)
        out.append(TrialRecord(seed, "even", q, tbp, ev["delta_f_pct"], ev["theta_star_dev_pct"], ev["fi_pct_of_max"],
                               extra={"trial": trial, "target_deg": target, "fc_hz": fc,
                                      "comp_delta_f_pct": comp["delta_f_pct"],
                                      "comp_theta_star_dev_pct": comp["theta_star_dev_pct"],
                                      "comp_fi_pct_of_max": comp["fi_pct_of_max"]}))
    return out


def run_fig3(cfg: ExperimentConfig, threads: int | None = None) -> ExperimentResult:
    """Theta* deviation spread and FI retention across Q, plus the a0 = -2 delta f compensation."""
    fcs = target_fcs(cfg)
    tasks = [(cfg.to_dict(), qi, i, tuple(fcs)) for qi in range(len(cfg.q_list)) for i in range(cfg.trials)]
    records = [r for batch in _pmap(_fig3_trial, tasks, threads) for r in batch]

    summary = {"target_fc_hz": dict(zip(map(str, cfg.targets_deg), fcs)), "by_q": {}, "by_q_target": {}}
    top = Chart("Theta* deviation by Q (95% interval, mean)", "targeted Theta* (deg)", "Theta* deviation (%)")
    bottom = Chart("FI at targeted angle", "targeted Theta* (deg)", "% of maximum FI")
    offsets = np.linspace(-0.2, 0.2, len(cfg.q_list))
    for qi, q in enumerate(cfg.q_list):
        rs = [r for r in records if r.q == q]
        dev = np.array([r.theta_star_dev_pct for r in rs])
        comp = np.array([r.extra["comp_theta_star_dev_pct"] for r in rs])
        fi = np.array([r.fi_pct_of_max for r in rs])
        med, med_c = float(np.median(np.abs(dev))), float(np.median(np.abs(comp)))
        summary["by_q"][str(q)] = {
            "tbp": cfg.tbp_list[qi],
            "theta_dev_pct": _percentiles(dev),
            "fi_pct_of_max": _percentiles(fi),
            "comp_theta_dev_pct": _percentiles(comp),
            "median_abs_dev_pct": med,
            "median_abs_comp_dev_pct": med_c,
            "compensation_reduction": med / med_c if med_c > 0 else math.inf,
        }
        mean, lo, hi, fmean = [], [], [], []
        for t in cfg.targets_deg:
            sel = [r for r in rs if r.extra["target_deg"] == t]
            st = _percentiles([r.theta_star_dev_pct for r in sel])
            sf = _percentiles([r.fi_pct_of_max for r in sel])
            summary["by_q_target"][f"{q}/{t}"] = {"theta_dev_pct": st, "fi_pct_of_max": sf}
            mean.append(st["mean"])
            lo.append(st["p2_5"])
            hi.append(st["p97_5"])
            fmean.append(sf["mean"])
        x = np.array(cfg.targets_deg) + offsets[qi]
        top.add(f"Q={q:g}", x, np.array(mean), style="errorbar", lo=np.array(lo), hi=np.array(hi))
        bottom.add(f"Q={q:g} mean", x, np.array(fmean), style="errorbar")
    files = _write_outputs(cfg, _FIG3_COLUMNS, records, summary,
                           {"fig3_deviation.svg": top, "fig3_fi.svg": bottom})
    return ExperimentResult(cfg, records, summary, files)


# ---- Fig. 4: AF degradation under transducer filtering ----------------------

_FIG4_COLUMNS = ["variant", "seed", "symmetry", "q", "tbp", "theta_deg", "width_delay_s", "width_doppler_hz",
                 "psl_delay_db", "psl_doppler_db", "psl_surface_db", "envelope_ratio"]


def run_fig4(cfg: ExperimentConfig, threads: int | None = None) -> ExperimentResult:
    """Clean vs beampattern-filtered AF of one cosine MTSFM filtered at its own Theta*."""
    params = fig2_params(cfg)
    seed = trial_seed(cfg.seed, 0, 0)
    mod = random_mtsfm(cfg.K, "even", params.delta_f, params.T, seed)
    prof = fi_profile(design_spectrum(mod, params, cfg), cfg.line_source, cfg.theta_grid)
    theta = prof.theta_star

    clean = synthesize(mod, params)
    filtered = filter_waveform(clean, cfg.line_source, theta, renormalize=True)
    span = cfg.doppler_span_bins / params.T
    dopplers = np.arange(-cfg.doppler_span_bins * cfg.doppler_per_bin,
                         cfg.doppler_span_bins * cfg.doppler_per_bin + 1) / (cfg.doppler_per_bin * params.T)
    delays = np.arange(-params.n_samples, params.n_samples + 1) / params.fs

    h = cfg.hash()
    out = Path(cfg.output_dir)
    records, metrics, files = [], {}, []
    cuts_delay = Chart("Zero-Doppler cut", "delay (s)", "|chi| (dB)")
    cuts_dopp = Chart("Zero-delay cut", "Doppler (Hz)", "|chi| (dB)")
    for variant, w in (("clean", clean), ("filtered", filtered)):
        af = naf(w, delays, dopplers)
        m = af_metrics(af)
        metrics[variant] = m.to_dict()
        env = _envelope_in_pulse(w, params)
        ratio = float(env.max() / env.min())
        records.append(TrialRecord(seed, "even", params.q, params.tbp, math.nan, math.nan, math.nan,
                                   psl_delay_db=m.psl_delay, psl_doppler_db=m.psl_doppler,
                                   extra={"variant": variant, "theta_deg": math.degrees(theta),
                                          "width_delay_s": m.mainlobe_width_delay,
                                          "width_doppler_hz": m.mainlobe_width_doppler,
                                          "psl_surface_db": m.psl_surface, "envelope_ratio": ratio}))
        zd, zt = af_cuts(af)
        files.append(export_cut(out / f"cut_zero_doppler_{variant}.csv", af.delays, zd, h))
        files.append(export_cut(out / f"cut_zero_delay_{variant}.csv", af.dopplers, zt, h))
        stride = max(1, cfg.surface_stride)
        sub = replace(af, delays=af.delays[::stride], values=af.values[:, ::stride])
        files.append(export_af(out / f"af_{variant}.csv", sub, h))
        cuts_delay.add(variant, af.delays, _db(zd), style="line")
        cuts_dopp.add(variant, af.dopplers, _db(zt), style="line")
        metrics[variant]["origin"] = float(af.values[np.argmin(np.abs(af.dopplers)), np.argmin(np.abs(af.delays))])

    c, f = metrics["clean"], metrics["filtered"]
    summary = {
        "seed": seed,
        "fc_hz": params.fc,
        "theta_star_deg": math.degrees(theta),
        "doppler_span_hz": span,
        "surface_delay_stride": cfg.surface_stride,
        "metrics": metrics,
        "deltas": {
            "width_doppler_rel": f["mainlobe_width_doppler"] / c["mainlobe_width_doppler"] - 1,
            "width_delay_rel": f["mainlobe_width_delay"] / c["mainlobe_width_delay"] - 1,
            "psl_delay_db": f["psl_delay"] - c["psl_delay"],
            "psl_doppler_db": f["psl_doppler"] - c["psl_doppler"],
            "psl_surface_db": f["psl_surface"] - c["psl_surface"],
        },
        "coefficients": mod.to_dict(),
    }
    files = _write_outputs(cfg, _FIG4_COLUMNS, records, summary,
                           {"fig4_zero_doppler.svg": cuts_delay, "fig4_zero_delay.svg": cuts_dopp}) + files
    return ExperimentResult(cfg, records, summary, files)


def _envelope_in_pulse(w, params: WaveformParams) -> np.ndarray:
    return np.abs(w.samples[np.abs(w.times) < 0.49 * params.T])


def _db(x: np.ndarray, floor: float = -60.0) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.maximum(20 * np.log10(np.abs(x)), floor)


RUNNERS = {"fig2_correlation": run_fig2, "fig3_qsweep": run_fig3, "fig4_af_filtering": run_fig4}


def run(cfg: ExperimentConfig, threads: int | None = None) -> ExperimentResult:
    if cfg.experiment not in RUNNERS:
        raise ValueError(f"{cfg.experiment!r} is not a batch experiment")
    return RUNNERS[cfg.experiment](cfg, threads)
