"""CSV/JSON writers. Every file carries the library version and a config hash."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__


def config_hash(config: dict) -> str:
    """Short stable digest of a JSON-compatible config."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_jsonable)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def header_line(chash: str) -> str:
    return f"# wblab {__version__} config={chash}"


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, tuple):
        return list(x)
    if isinstance(x, Path):
        return str(x)
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    x = float(v)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence], chash: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(header_line(chash) + "\n")
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(columns)
        for r in rows:
            wr.writerow([_fmt(v) for v in r])
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Columns and a float array from a file written by :func:`write_csv`."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rd = csv.reader(lines)
    cols = next(rd)
    return cols, np.array([[float(v) for v in r] for r in rd], dtype=float).reshape(-1, len(cols))


def write_json(path, obj: dict, chash: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"wblab_version": __version__, "config_hash": chash, **obj}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable, allow_nan=True) + "\n")
    return path


def export_waveform(path, w, meta: dict, chash: str = "") -> tuple[Path, Path]:
    """``t_s,re,im`` CSV plus a sidecar ``.json`` with the design metadata."""
    path = Path(path)
    csv_path = write_csv(path, ["t_s", "re", "im"], zip(w.times, w.samples.real, w.samples.imag), chash)
    side = write_json(path.with_suffix(".json"), meta, chash)
    return csv_path, side


def export_spectrum(path, spec, chash: str = "") -> Path:
    return write_csv(path, ["f_hz", "re", "im", "psd"], zip(spec.f, spec.S.real, spec.S.imag, spec.psd), chash)


def export_coefficients(path, gbf, chash: str = "") -> Path:
    return write_csv(path, ["m", "re", "im"], zip(gbf.orders, gbf.c.real, gbf.c.imag), chash)


def export_af(path, af, chash: str = "") -> Path:
    def rows():
        for i, nu in enumerate(af.dopplers):
            for j, tau in enumerate(af.delays):
                yield tau, nu, af.values[i, j]

    return write_csv(path, ["tau_s", "doppler_hz", "mag"], rows(), chash)


def export_cut(path, x, mag, chash: str = "") -> Path:
    return write_csv(path, ["x", "mag"], zip(x, mag), chash)


def export_echo_model(path, model, chash: str = "") -> Path:
    m = model
    return write_csv(path, ["f_hz", "S_re", "S_im", "b", "h_re", "h_im"],
                     zip(m.freqs, m.S.real, m.S.imag, m.b, m.h.real, m.h.imag), chash)


def export_profile(path, prof, chash: str = "") -> tuple[Path, Path]:
    path = Path(path)
    csv_path = write_csv(path, ["theta_deg", "fi", "psi"], zip(np.rad2deg(prof.thetas), prof.fi, prof.psi), chash)
    summary = {
        "theta_star_deg": math.degrees(prof.theta_star),
        "fi_max": prof.fi_max,
        "grid_res_deg": math.degrees(prof.grid_res),
    }
    return csv_path, write_json(path.with_suffix(".json"), summary, chash)
