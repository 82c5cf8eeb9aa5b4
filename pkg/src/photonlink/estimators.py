"""Counting-statistics estimators and the closed-form models behind the figures.

All error bars are one standard deviation from Poisson counting statistics
propagated with the delta method.
"""

from dataclasses import dataclass

import numpy as np


class EstimatorError(ValueError):
    pass


@dataclass
class CorrelationResult:
    value: float
    sigma: float
    n_coincidences: int

    def __iter__(self):
        return iter((self.value, self.sigma, self.n_coincidences))


def g2_cross(d1: np.ndarray, d2_in_window: np.ndarray,
             offsets=range(1, 11)) -> CorrelationResult:
    """Normalized cross-correlation between herald clicks and read-window clicks.

    d1, d2_in_window: boolean arrays per trial. Same-trial coincidences are
    normalized by coincidences between trials offset by whole trial periods.
    """
    d1 = np.asarray(d1, dtype=bool)
    d2 = np.asarray(d2_in_window, dtype=bool)
    if d1.shape != d2.shape:
        raise EstimatorError("d1/d2 arrays must align per trial")
    n = len(d1)
    n_cc = int(np.sum(d1 & d2))
    acc_counts = []
    acc_trials = 0
    for k in offsets:
        acc_counts.append(int(np.sum(d1[:-k] & d2[k:])))
        acc_trials += n - k
    n_acc = int(np.sum(acc_counts))
    if n_acc == 0:
        raise EstimatorError("zero accidental coincidences; estimate is unnormalizable")
    if n_cc == 0:
        raise EstimatorError("no same-trial coincidences; error bar undefined")
    p_cc = n_cc / n
    p_acc = n_acc / acc_trials
    value = p_cc / p_acc
    sigma = value * np.sqrt(1.0 / n_cc + 1.0 / n_acc)
    return CorrelationResult(value, sigma, n_cc)


def heralded_g2(n_heralds: int, n_1: int, n_2: int, n_12: int) -> CorrelationResult:
    """Heralded autocorrelation from split-detector counts conditioned on heralds."""
    if n_heralds <= 0:
        raise EstimatorError("no heralds")
    if n_1 == 0 or n_2 == 0:
        raise EstimatorError("zero singles on one splitter output")
    p1, p2, p12 = n_1 / n_heralds, n_2 / n_heralds, n_12 / n_heralds
    value = p12 / (p1 * p2)
    if n_12 == 0:
        return CorrelationResult(0.0, 1.0 / (n_heralds * p1 * p2), 0)
    sigma = value * np.sqrt(1.0 / n_12 + 1.0 / n_1 + 1.0 / n_2)
    return CorrelationResult(value, sigma, n_12)


def cauchy_schwarz(g2_ww: CorrelationResult, g2_rr: CorrelationResult,
                   g2_wr: CorrelationResult) -> dict:
    """Classical bound g2_wr <= sqrt(g2_ww * g2_rr); margin in combined sigma."""
    bound = np.sqrt(g2_ww.value * g2_rr.value)
    # delta-method sigma of the bound
    var_bound = 0.25 * (g2_rr.value / g2_ww.value * g2_ww.sigma ** 2
                        + g2_ww.value / g2_rr.value * g2_rr.sigma ** 2)
    sigma = np.sqrt(var_bound + g2_wr.sigma ** 2)
    margin = (g2_wr.value - bound) / sigma if sigma > 0 else np.inf
    return {"violated": bool(g2_wr.value > bound), "bound": float(bound),
            "margin_sigma": float(margin)}


def snr_from_histogram(counts: np.ndarray, bin_centers: np.ndarray,
                       signal_window: tuple[float, float],
                       noise_window: tuple[float, float]) -> dict:
    """(signal - noise) / noise over equal-width windows of a time histogram."""
    s1, s2 = signal_window
    n1, n2 = noise_window
    if not (n2 <= s1 or n1 >= s2):
        raise EstimatorError("noise window must be disjoint from the signal window")
    if abs((s2 - s1) - (n2 - n1)) > 1e-12:
        raise EstimatorError("windows must have equal width")
    sig = int(np.sum(counts[(bin_centers >= s1) & (bin_centers < s2)]))
    noi = int(np.sum(counts[(bin_centers >= n1) & (bin_centers < n2)]))
    if noi == 0:
        return {"snr": float(sig), "sigma": float("inf"), "lower_bound": True,
                "signal_counts": sig, "noise_counts": 0}
    snr = (sig - noi) / noi
    sigma = (1.0 / noi) * np.sqrt(sig + sig ** 2 / noi)
    return {"snr": float(snr), "sigma": float(sigma), "lower_bound": False,
            "signal_counts": sig, "noise_counts": noi}


def visibility_fit(phis: np.ndarray, counts: np.ndarray) -> dict:
    """Weighted least squares of A*(1 + V*cos(phi - phi0)) to fringe counts.

    Poisson weights; V clipped to [0, 1]. Returns V, sigma_V, phi0, amplitude.
    """
    phis = np.asarray(phis, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if len(phis) < 4 or (phis.max() - phis.min()) < 1.5 * np.pi:
        raise EstimatorError("need >= 4 phases spanning at least 3/4 of a turn")
    # linear model counts = a0 + a1 cos(phi) + a2 sin(phi)
    X = np.column_stack([np.ones_like(phis), np.cos(phis), np.sin(phis)])
    w = 1.0 / np.maximum(counts, 1.0)
    XtW = X.T * w
    cov = np.linalg.inv(XtW @ X)
    beta = cov @ (XtW @ counts)
    a0, a1, a2 = beta
    if a0 <= 0 or np.hypot(a1, a2) < 1e-12:
        return {"V": 0.0, "sigma": 1.0, "phi0": 0.0, "amplitude": max(a0, 0.0)}
    amp = np.hypot(a1, a2)
    v = amp / a0
    phi0 = np.arctan2(a2, a1)
    # propagate covariance through V = sqrt(a1^2+a2^2)/a0
    grad = np.array([-amp / a0 ** 2, a1 / (amp * a0), a2 / (amp * a0)])
    sigma_v = float(np.sqrt(grad @ cov @ grad))
    return {"V": float(min(v, 1.0)), "sigma": sigma_v, "phi0": float(phi0),
            "amplitude": float(a0)}


def model_g2_vs_pe(g2_in: float, snr: float) -> float:
    """Cross-correlation diluted by uncorrelated Poissonian background.

    g2_out = 1 + (g2_in - 1) * SNR / (SNR + 1), with SNR the correlated-to-
    background flux ratio in the read window.
    """
    if snr < 0:
        raise EstimatorError("SNR must be >= 0")
    return 1.0 + (g2_in - 1.0) * snr / (snr + 1.0)


def model_visibility_mu(v0: float, beta: float, mu1: float, mu_in: float) -> float:
    """Fringe visibility vs input photon number: V = V0 * mu/(mu + 2*beta*mu1)."""
    if mu1 <= 0 or beta <= 0:
        raise EstimatorError("mu1 and beta must be positive")
    if mu_in == 0:
        return 0.0
    return v0 * mu_in / (mu_in + 2.0 * beta * mu1)


_FWHM = 2.0 * np.sqrt(2.0 * np.log(2.0))


def visibility_from_linewidth(sigma: float, delta_tau: float) -> float:
    """Interference visibility of bins separated by delta_tau under Gaussian
    frequency jitter of standard deviation sigma: exp(-(2 pi sigma dt)^2 / 2)."""
    if sigma < 0:
        raise EstimatorError("sigma must be >= 0")
    return float(np.exp(-0.5 * (2.0 * np.pi * sigma * delta_tau) ** 2))


def linewidth_from_visibility(v0: float, delta_tau: float) -> dict:
    """Invert the jitter-visibility relation; returns sigma and FWHM = 2.355 sigma."""
    if not 0.0 < v0 <= 1.0:
        raise EstimatorError("visibility must be in (0, 1]")
    sigma = np.sqrt(-2.0 * np.log(v0)) / (2.0 * np.pi * delta_tau)
    return {"sigma": float(sigma), "fwhm": float(_FWHM * sigma)}


def fidelity_bounds(snr: float, visibility: float) -> dict:
    """Noise-limited qubit fidelity bounds.

    Polar states are limited by the echo SNR, F_pol = (SNR+1)/(SNR+2);
    equatorial states by the fringe visibility, F_eq = (1+V)/2.
    """
    if snr < 0 or not 0.0 <= visibility <= 1.0:
        raise EstimatorError("need snr >= 0 and visibility in [0, 1]")
    return {"f_pol": (snr + 1.0) / (snr + 2.0), "f_eq": (1.0 + visibility) / 2.0}


def write_report(path, rows):
    """Persist estimator results as CSV rows (name, value, sigma, N)."""
    import csv
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["name", "value", "sigma", "n"])
        for row in rows:
            wr.writerow(row)
