"""Synthesis of labeled modulated frames across an SNR grid.

Stands in for an over-the-air capture: random symbol streams (digital
classes) or a band-limited synthetic source (analog classes) are modulated
to unit-power baseband, then passed through a channel with phase offset,
carrier frequency offset, sample-rate offset, optional 3-tap multipath,
and SNR-calibrated AWGN.

Fixed conventions (recorded in dataset provenance): root-raised-cosine
shaping with roll-off 0.35, 8 samples per symbol, span 8 symbols; CPFSK
modulation index 0.5; GFSK Gaussian filter BT = 0.3; AM depth 0.5; FM
frequency deviation 0.05 cycles/sample per unit source RMS.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np
from scipy.signal import firwin, hilbert

from .frames import Dataset, as_frame, from_complex, to_complex

__all__ = [
    "CLASS_NAMES",
    "SNR_GRID",
    "SAMPLES_PER_SYMBOL",
    "RRC_ROLLOFF",
    "RRC_SPAN",
    "SHAPING_LEAD_SYMBOLS",
    "ChannelConfig",
    "GenConfig",
    "rrc_taps",
    "constellation",
    "symbol_stream",
    "n_symbols_for",
    "shape_symbols",
    "modulate",
    "sample_channel",
    "impair",
    "generate_dataset",
    "canonical_classes",
]

# Canonical class order: names as published, sorted alphabetically.
CLASS_NAMES = (
    "8PSK", "AM-DSB", "AM-SSB", "BPSK", "CPFSK", "GFSK",
    "PAM4", "QAM16", "QAM64", "QPSK", "WBFM",
)
SNR_GRID = tuple(range(-20, 20, 2))

SAMPLES_PER_SYMBOL = 8
RRC_ROLLOFF = 0.35
RRC_SPAN = 8  # symbols
SHAPING_LEAD_SYMBOLS = RRC_SPAN // 2  # frame sample k*sps is symbol lead+k
CPFSK_INDEX = 0.5
GFSK_BT = 0.3
GFSK_INDEX = 0.5
AM_DEPTH = 0.5
FM_DEVIATION = 0.05  # cycles/sample per unit source RMS

_PAM4_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0]) / np.sqrt(5.0)
_QAM16_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0])
_QAM64_LEVELS = np.array([-7.0, -5.0, -3.0, -1.0, 1.0, 3.0, 5.0, 7.0])


def _qam(levels: np.ndarray) -> np.ndarray:
    grid = levels[:, None] + 1j * levels[None, :]
    pts = grid.ravel()
    return pts / np.sqrt(np.mean(np.abs(pts) ** 2))


_CONSTELLATIONS = {
    "BPSK": np.array([1.0 + 0.0j, -1.0 + 0.0j]),
    "QPSK": np.exp(1j * (np.pi / 4 + np.pi / 2 * np.arange(4))),
    "8PSK": np.exp(2j * np.pi * np.arange(8) / 8),
    "PAM4": _PAM4_LEVELS.astype(complex),
    "QAM16": _qam(_QAM16_LEVELS),
    "QAM64": _qam(_QAM64_LEVELS),
}


def canonical_classes(names) -> tuple[str, ...]:
    """Resolve names case-insensitively and return them in canonical order."""
    lookup = {n.upper(): n for n in CLASS_NAMES}
    chosen = set()
    for name in names:
        key = str(name).upper()
        if key not in lookup:
            raise ValueError(f"unknown modulation class {name!r}")
        chosen.add(lookup[key])
    return tuple(n for n in CLASS_NAMES if n in chosen)


def rrc_taps(sps: int = SAMPLES_PER_SYMBOL, rolloff: float = RRC_ROLLOFF,
             span: int = RRC_SPAN) -> np.ndarray:
    """Unit-energy root-raised-cosine filter, span*sps + 1 taps."""
    n = span * sps + 1
    t = (np.arange(n) - (n - 1) / 2) / sps  # in symbol periods
    taps = np.empty(n)
    for k, ti in enumerate(t):
        if ti == 0.0:
            taps[k] = 1.0 + rolloff * (4.0 / np.pi - 1.0)
        elif abs(abs(ti) - 1.0 / (4.0 * rolloff)) < 1e-9:
            taps[k] = (rolloff / np.sqrt(2.0)) * (
                (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * rolloff))
                + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * rolloff))
            )
        else:
            num = np.sin(np.pi * ti * (1.0 - rolloff)) + 4.0 * rolloff * ti * np.cos(
                np.pi * ti * (1.0 + rolloff)
            )
            den = np.pi * ti * (1.0 - (4.0 * rolloff * ti) ** 2)
            taps[k] = num / den
    return taps / np.sqrt(np.sum(taps**2))


def constellation(name: str) -> np.ndarray:
    try:
        return _CONSTELLATIONS[name].copy()
    except KeyError:
        raise ValueError(f"{name!r} is not a linearly modulated class") from None


def symbol_stream(name: str, n_symbols: int, rng) -> np.ndarray:
    """n_symbols uniform random constellation points for a linear class."""
    points = constellation(name)
    return points[rng.integers(0, len(points), n_symbols)]


def n_symbols_for(seq_len: int, sps: int = SAMPLES_PER_SYMBOL) -> int:
    """Symbols needed so a seq_len slice sits in filter steady state."""
    return -(-seq_len // sps) + RRC_SPAN + 2


def shape_symbols(symbols, seq_len: int, sps: int = SAMPLES_PER_SYMBOL) -> np.ndarray:
    """RRC pulse shaping; returns seq_len complex samples.

    The slice skips SHAPING_LEAD_SYMBOLS of lead-in, so output sample k*sps
    is the matched-filter sampling instant of symbol SHAPING_LEAD_SYMBOLS+k.
    """
    symbols = np.asarray(symbols, dtype=complex)
    upsampled = np.zeros(len(symbols) * sps, dtype=complex)
    upsampled[::sps] = symbols
    taps = rrc_taps(sps)
    shaped = np.convolve(upsampled, taps)
    start = (len(taps) - 1) // 2 + SHAPING_LEAD_SYMBOLS * sps
    if start + seq_len > len(shaped):
        raise ValueError("not enough symbols for the requested frame length")
    return shaped[start : start + seq_len]


def _nrz_bits(n: int, rng) -> np.ndarray:
    return rng.integers(0, 2, n) * 2.0 - 1.0


def _cpfsk(seq_len: int, rng) -> np.ndarray:
    sps = SAMPLES_PER_SYMBOL
    nrz = np.repeat(_nrz_bits(-(-seq_len // sps), rng), sps)[:seq_len]
    phase = np.pi * CPFSK_INDEX * np.cumsum(nrz) / sps
    return np.exp(1j * phase)


def _gfsk(seq_len: int, rng) -> np.ndarray:
    sps = SAMPLES_PER_SYMBOL
    span = 3
    n_bits = -(-seq_len // sps) + 2 * span
    stream = np.repeat(_nrz_bits(n_bits, rng), sps)
    t = (np.arange(span * sps + 1) - span * sps / 2) / sps
    g = np.exp(-2.0 * np.pi**2 * GFSK_BT**2 * t**2 / np.log(2.0))
    g /= g.sum()
    smoothed = np.convolve(stream, g, mode="same")
    start = span * sps
    smoothed = smoothed[start : start + seq_len]
    phase = np.pi * GFSK_INDEX * np.cumsum(smoothed) / sps
    return np.exp(1j * phase)


_SOURCE_LOWPASS = firwin(31, 0.1)  # cutoff 0.05 cycles/sample


def _analog_source(n: int, rng) -> np.ndarray:
    """Band-limited test source: 3 random sinusoids plus low-passed noise."""
    freqs = rng.uniform(0.005, 0.04, 3)
    phases = rng.uniform(0.0, 2.0 * np.pi, 3)
    amps = rng.uniform(0.5, 1.0, 3)
    t = np.arange(n)
    source = np.sum(amps[:, None] * np.cos(2.0 * np.pi * freqs[:, None] * t + phases[:, None]), axis=0)
    noise = np.convolve(rng.standard_normal(n), _SOURCE_LOWPASS, mode="same")
    source = source + 0.25 * noise / max(np.sqrt(np.mean(noise**2)), 1e-12)
    return source / np.sqrt(np.mean(source**2))


def modulate(name: str, seq_len: int, rng) -> np.ndarray:
    """Clean (noiseless) baseband frame of unit average power."""
    if seq_len < 2:
        raise ValueError("seq_len must be at least 2")
    if name in _CONSTELLATIONS:
        z = shape_symbols(symbol_stream(name, n_symbols_for(seq_len), rng), seq_len)
    elif name == "CPFSK":
        z = _cpfsk(seq_len, rng)
    elif name == "GFSK":
        z = _gfsk(seq_len, rng)
    elif name == "AM-DSB":
        z = (1.0 + AM_DEPTH * _analog_source(seq_len, rng)).astype(complex)
    elif name == "AM-SSB":
        z = hilbert(_analog_source(seq_len, rng))
    elif name == "WBFM":
        z = np.exp(2j * np.pi * FM_DEVIATION * np.cumsum(_analog_source(seq_len, rng)))
    else:
        raise ValueError(f"unknown modulation class {name!r}")
    z = z / np.sqrt(np.mean(np.abs(z) ** 2))
    return from_complex(z)


@dataclass(frozen=True)
class ChannelConfig:
    """Concrete impairment values for one frame.

    cfo is the carrier frequency offset in cycles per sample (|cfo| < 0.5);
    sro_ppm the sample-rate offset; multipath_taps an optional short FIR.
    noiseless=True skips the AWGN stage (for calibration references).
    """

    snr_db: int
    phase_offset: float = 0.0
    cfo: float = 0.0
    sro_ppm: float = 0.0
    multipath_taps: tuple | None = None
    noiseless: bool = False

    def __post_init__(self):
        if not abs(self.cfo) < 0.5:
            raise ValueError("cfo must satisfy |cfo| < 0.5 cycles/sample")


def impair(frame, ch: ChannelConfig, rng=None) -> np.ndarray:
    """Channel model: multipath, phase, CFO, SRO, then calibrated AWGN.

    Noise variance per complex sample is 10**(-snr_db/10) times the signal
    power measured after the deterministic stages, split equally between
    the I and Q components.
    """
    z = to_complex(as_frame(frame)).astype(np.complex128)
    n = len(z)
    if ch.multipath_taps is not None:
        z = np.convolve(z, np.asarray(ch.multipath_taps, dtype=complex))[:n]
    if ch.phase_offset != 0.0:
        z = z * np.exp(1j * ch.phase_offset)
    if ch.cfo != 0.0:
        z = z * np.exp(2j * np.pi * ch.cfo * np.arange(n))
    if ch.sro_ppm != 0.0:
        t = np.arange(n) * (1.0 + ch.sro_ppm * 1e-6)
        z = np.interp(t, np.arange(n), z.real) + 1j * np.interp(t, np.arange(n), z.imag)
    if not ch.noiseless:
        if rng is None:
            raise ValueError("impair needs an rng unless noiseless=True")
        noise_var = np.mean(np.abs(z) ** 2) * 10.0 ** (-ch.snr_db / 10.0)
        sigma = np.sqrt(noise_var / 2.0)
        z = z + sigma * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return from_complex(z)


@dataclass(frozen=True)
class GenConfig:
    """Generator settings; total frames = classes x snr grid x per-pair count."""

    classes: tuple[str, ...] = CLASS_NAMES
    snr_grid: tuple[int, ...] = SNR_GRID
    frames_per_class_per_snr: int = 1000
    seq_len: int = 128
    seed: int = 0
    phase_max: float = np.pi  # uniform in +-phase_max
    cfo_max: float = 1e-3
    sro_max_ppm: float = 50.0
    multipath: bool = False

    def total_frames(self) -> int:
        return len(self.classes) * len(self.snr_grid) * self.frames_per_class_per_snr

    def describe(self) -> str:
        items = [f"{f.name}={getattr(self, f.name)}" for f in fields(self)]
        return "gen(" + ",".join(items) + ")"


def sample_channel(cfg: GenConfig, snr_db: int, rng) -> ChannelConfig:
    """Draw one frame's channel impairments from the configured ranges."""
    phase = rng.uniform(-cfg.phase_max, cfg.phase_max) if cfg.phase_max else 0.0
    cfo = rng.uniform(-cfg.cfo_max, cfg.cfo_max) if cfg.cfo_max else 0.0
    sro = rng.uniform(-cfg.sro_max_ppm, cfg.sro_max_ppm) if cfg.sro_max_ppm else 0.0
    taps = None
    if cfg.multipath:
        raw = np.array([
            1.0,
            0.2 * (rng.standard_normal() + 1j * rng.standard_normal()),
            0.1 * (rng.standard_normal() + 1j * rng.standard_normal()),
        ])
        taps = tuple(raw / np.sqrt(np.sum(np.abs(raw) ** 2)))
    return ChannelConfig(snr_db=snr_db, phase_offset=phase, cfo=cfo,
                         sro_ppm=sro, multipath_taps=taps)


def generate_dataset(cfg: GenConfig) -> Dataset:
    """Synthesize the full (class, snr) grid, deterministic given the seed.

    Each frame draws from its own substream keyed on (seed, class, snr,
    frame index), so per-frame work may be scheduled in any order.
    """
    classes = canonical_classes(cfg.classes)
    if not classes:
        raise ValueError("class list is empty")
    if not cfg.snr_grid:
        raise ValueError("snr grid is empty")
    if cfg.frames_per_class_per_snr <= 0:
        raise ValueError("frames_per_class_per_snr must be positive")
    per = cfg.frames_per_class_per_snr
    total = len(classes) * len(cfg.snr_grid) * per
    iq = np.empty((total, cfg.seq_len, 2), dtype=np.float32)
    labels = np.empty(total, dtype=np.uint8)
    snrs = np.empty(total, dtype=np.int8)
    idx = 0
    for label, name in enumerate(classes):
        class_key = CLASS_NAMES.index(name)
        for snr in cfg.snr_grid:
            for k in range(per):
                rng = np.random.default_rng([cfg.seed, class_key, snr + 128, k])
                frame = modulate(name, cfg.seq_len, rng)
                ch = sample_channel(cfg, snr, rng)
                iq[idx] = impair(frame, ch, rng)
                labels[idx] = label
                snrs[idx] = snr
                idx += 1
    return Dataset(iq=iq, labels=labels, snrs=snrs, class_names=classes,
                   provenance=cfg.describe())


