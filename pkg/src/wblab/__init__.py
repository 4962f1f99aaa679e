"""MTSFM sonar waveform laboratory: synthesis, spectra, ambiguity functions and bearing FI."""

__version__ = "0.1.0"

from .mtsfm import (  # noqa: E402
    FourierModulation,
    LinearModulation,
    SampledWaveform,
    WaveformParams,
    random_mtsfm,
    synthesize,
    synthesize_cw,
    synthesize_lfm,
)
from .gbf import GbfCoefficients, gbf_coefficients  # noqa: E402
from .spectrum import Spectrum, spectral_centroid, spectrum_closed_form, spectrum_fft  # noqa: E402
from .channel import LineSource, beampattern, build_echo_model, filter_waveform  # noqa: E402
from .bearing import FIProfile, fi_profile  # noqa: E402
from .ambiguity import AFSurface, af_metrics, baf, naf  # noqa: E402

__all__ = [
    "__version__",
    "FourierModulation",
    "LinearModulation",
    "SampledWaveform",
    "WaveformParams",
    "random_mtsfm",
    "synthesize",
    "synthesize_cw",
    "synthesize_lfm",
    "GbfCoefficients",
    "gbf_coefficients",
    "Spectrum",
    "spectral_centroid",
    "spectrum_closed_form",
    "spectrum_fft",
    "LineSource",
    "beampattern",
    "build_echo_model",
    "filter_waveform",
    "FIProfile",
    "fi_profile",
    "AFSurface",
    "af_metrics",
    "baf",
    "naf",
]
