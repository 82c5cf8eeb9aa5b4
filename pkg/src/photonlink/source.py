"""Heralded photon-pair source: joint number statistics, correlations, waveforms.

The write/read pair state is modeled as a two-mode squeezed vacuum, i.e.
perfectly correlated thermal number statistics with mean photon number equal
to the excitation probability per trial. All correlation functions here are
exact Fock-space enumerations with binary (click/no-click) detectors.
"""

from dataclasses import dataclass, field

import numpy as np


class SourceError(ValueError):
    pass


@dataclass
class PairSourceParams:
    """Knobs of the cold-ensemble pair source.

    p_e            excitation probability per trial (mean pairs per mode)
    eta_ret        fiber-coupled retrieval efficiency of the read photon
    eta_write_path write-arm transmission x filter x detector efficiency
    n_max          Fock-space truncation
    """
    p_e: float
    eta_ret: float = 0.30
    eta_write_path: float = 0.35
    n_max: int = 30

    def __post_init__(self):
        if not 0.0 <= self.p_e < 1.0:
            raise SourceError(f"p_e must be in [0, 1), got {self.p_e}")
        for name in ("eta_ret", "eta_write_path"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise SourceError(f"{name} must be in [0, 1], got {v}")
        if self.n_max < 2:
            raise SourceError("n_max must be >= 2")


@dataclass
class TemporalEnvelope:
    """Complex field envelope sampled on a uniform time grid."""
    samples: np.ndarray
    dt: float
    t0: float = 0.0

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.samples))

    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.dt)


@dataclass
class TimeBinQubitSpec:
    """Early/late time-bin qubit: c1|e> + c2*exp(i*phi)|l>."""
    c1: float = 1.0 / np.sqrt(2.0)
    c2: float = 1.0 / np.sqrt(2.0)
    phi: float = 0.0
    separation: float = 500e-9
    bin_fwhm: float = 200e-9

    def __post_init__(self):
        if abs(self.c1 ** 2 + self.c2 ** 2 - 1.0) > 1e-12:
            raise SourceError("time-bin amplitudes must satisfy c1^2 + c2^2 = 1")
        if self.separation < self.bin_fwhm:
            raise SourceError("time bins overlap: separation < bin_fwhm")


def pair_number_distribution(params: PairSourceParams) -> np.ndarray:
    """Joint probability table P(n_w, n_r), diagonal thermal.

    P(n, n) = p_e^n / (1 + p_e)^(n+1); off-diagonal terms vanish for the
    perfectly correlated pair state. Raises if the truncation leaves more
    than 1e-6 probability in the tail.
    """
    p = params.p_e
    n = np.arange(params.n_max + 1)
    diag = p ** n / (1.0 + p) ** (n + 1)
    residual = 1.0 - diag.sum()
    if residual > 1e-6:
        raise SourceError(f"n_max={params.n_max} too small for p_e={p}: truncation residual {residual:.2e}")
    table = np.zeros((params.n_max + 1, params.n_max + 1))
    np.fill_diagonal(table, diag)
    return table


def _diag_probs(params: PairSourceParams) -> np.ndarray:
    return np.diagonal(pair_number_distribution(params)).copy()


def herald_probability(params: PairSourceParams) -> float:
    """Probability per trial of a write-arm click on a binary detector."""
    n = np.arange(params.n_max + 1)
    probs = _diag_probs(params)
    return float(np.sum(probs * (1.0 - (1.0 - params.eta_write_path) ** n)))


def heralded_number_distribution(params: PairSourceParams) -> np.ndarray:
    """P(n | write click): the thermal distribution reweighted by the herald."""
    n = np.arange(params.n_max + 1)
    probs = _diag_probs(params)
    w = probs * (1.0 - (1.0 - params.eta_write_path) ** n)
    z = w.sum()
    if z <= 0.0:
        raise SourceError("herald probability is zero; conditional distribution undefined")
    return w / z


def ideal_cross_correlation(p_e: float) -> float:
    """Normalized write/read cross-correlation of the lossless pair state.

    For correlated thermal statistics <n^2>/<n>^2 = 2 + 1/p_e, and linear
    losses on either arm cancel in the ratio.
    """
    if p_e <= 0.0:
        raise SourceError("cross-correlation undefined at p_e = 0")
    return 2.0 + 1.0 / p_e


def cross_correlation_flux(params: PairSourceParams, eta_w: float = 1.0, eta_r: float = 1.0) -> float:
    """Fock-space oracle for g2_wr from thinned photon-flux moments.

    <N_w N_r>/(<N_w><N_r>) with independent binomial thinning of each arm;
    used to assert loss invariance of ideal_cross_correlation.
    """
    n = np.arange(params.n_max + 1)
    probs = _diag_probs(params)
    mean_w = np.sum(probs * eta_w * n)
    mean_r = np.sum(probs * eta_r * n)
    cross = np.sum(probs * eta_w * eta_r * n * n)
    if mean_w == 0.0 or mean_r == 0.0:
        raise SourceError("cross-correlation undefined for zero flux")
    return float(cross / (mean_w * mean_r))


def unheralded_autocorrelation(params: PairSourceParams) -> float:
    """g2 of one arm alone: <n(n-1)>/<n>^2, equal to 2 for the thermal marginal."""
    n = np.arange(params.n_max + 1)
    probs = _diag_probs(params)
    mean = np.sum(probs * n)
    pairs = np.sum(probs * n * (n - 1))
    if mean == 0.0:
        raise SourceError("autocorrelation undefined at zero flux")
    return float(pairs / mean ** 2)


def heralded_autocorrelation(params: PairSourceParams,
                             read_background: float = 0.0,
                             background_stats: str = "thermal",
                             eta_detect: float = 0.45) -> float:
    """Heralded autocorrelation of the read field on a balanced splitter.

    Exact enumeration: given a write click, the read mode holds n photons
    (thinned by eta_ret * eta_detect), an independent background with the given
    mean (referred to the detection plane) is added, and the total is split
    onto two binary detectors.  Returns p(both|w) / (p(1|w) * p(2|w)).

    Background statistics are 'poisson' or 'thermal' (single mode, bunched);
    the calibrated site-A background is thermal, see the defaults file.
    """
    if read_background < 0.0:
        raise SourceError("read background mean must be >= 0")
    cond = heralded_number_distribution(params)
    n = np.arange(params.n_max + 1)
    eta = params.eta_ret * eta_detect
    # E[s^m] over m ~ Bin(n, eta) at s=1/2, and P(m=0), per n
    half_gen = (1.0 - eta / 2.0) ** n
    zero_gen = (1.0 - eta) ** n
    b = read_background
    if background_stats == "poisson":
        bg_half, bg_zero = np.exp(-b / 2.0), np.exp(-b)
    elif background_stats == "thermal":
        bg_half, bg_zero = 1.0 / (1.0 + b / 2.0), 1.0 / (1.0 + b)
    else:
        raise SourceError(f"unknown background statistics {background_stats!r}")
    e_half = float(np.sum(cond * half_gen)) * bg_half   # E[(1/2)^(m+k) | w]
    e_zero = float(np.sum(cond * zero_gen)) * bg_zero   # P(m+k = 0 | w)
    p_single = 1.0 - e_half
    p_both = 1.0 - 2.0 * e_half + e_zero
    if p_single <= 0.0:
        raise SourceError("no conditional read clicks; autocorrelation undefined")
    return p_both / p_single ** 2


def make_waveform(kind: str, *, fwhm: float = 200e-9,
                  timebin: TimeBinQubitSpec | None = None,
                  samples_per_fwhm: int = 64) -> TemporalEnvelope:
    """Unit-energy read-photon envelope: 'gaussian' or 'timebin'.

    The time-bin envelope carries the relative phase on the late-bin field.
    """
    if kind == "gaussian":
        if fwhm <= 0.0:
            raise SourceError("fwhm must be positive")
        dt = fwhm / samples_per_fwhm
        sigma = fwhm / (2.0 * np.sqrt(2.0 * np.log(2.0)))
        t = np.arange(-4.0 * fwhm, 4.0 * fwhm, dt)
        a = np.exp(-t ** 2 / (4.0 * sigma ** 2)).astype(complex)
        env = TemporalEnvelope(a, dt, t0=t[0])
    elif kind == "timebin":
        spec = timebin or TimeBinQubitSpec()
        dt = spec.bin_fwhm / samples_per_fwhm
        sigma = spec.bin_fwhm / (2.0 * np.sqrt(2.0 * np.log(2.0)))
        t = np.arange(-4.0 * spec.bin_fwhm, spec.separation + 4.0 * spec.bin_fwhm, dt)
        bin_e = np.exp(-t ** 2 / (4.0 * sigma ** 2))
        bin_l = np.exp(-(t - spec.separation) ** 2 / (4.0 * sigma ** 2))
        a = spec.c1 * bin_e.astype(complex) + spec.c2 * np.exp(1j * spec.phi) * bin_l.astype(complex)
        env = TemporalEnvelope(a, dt, t0=t[0])
    else:
        raise SourceError(f"unknown waveform kind {kind!r}")
    norm = np.sqrt(env.energy())
    env.samples = env.samples / norm
    return env


def bin_energies(env: TemporalEnvelope, separation: float) -> tuple[float, float]:
    """Energy in the early/late halves, split at the midpoint between bins."""
    t = env.times
    mid = separation / 2.0
    early = np.sum(np.abs(env.samples[t < mid]) ** 2) * env.dt
    late = np.sum(np.abs(env.samples[t >= mid]) ** 2) * env.dt
    return float(early), float(late)
