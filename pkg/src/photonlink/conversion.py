"""Frequency-conversion interface: transmission stages and gated background.

The whole chain is a product of scalar transmissions plus one effective
Poissonian background source referred to the detection plane.
"""

from dataclasses import dataclass

import numpy as np


class ChainError(ValueError):
    pass


@dataclass
class StageSpec:
    name: str
    transmission: float

    def __post_init__(self):
        if not 0.0 <= self.transmission <= 1.0:
            raise ChainError(f"stage {self.name!r}: transmission {self.transmission} outside [0, 1]")


@dataclass
class NoiseSpec:
    """Background counts per coincidence window at the detection plane."""
    mean_noise_per_window: float
    gated: bool = True

    def __post_init__(self):
        if self.mean_noise_per_window < 0.0:
            raise ChainError("noise mean must be >= 0")


@dataclass
class GateWindow:
    t_start: float
    t_stop: float

    def __post_init__(self):
        if self.t_stop <= self.t_start:
            raise ChainError("gate window must have t_stop > t_start")

    def contains(self, t_start: float, t_stop: float) -> bool:
        return self.t_start <= t_start and t_stop <= self.t_stop


def chain_transmission(stages: list[StageSpec]) -> float:
    """Product of stage transmissions."""
    if not stages:
        raise ChainError("empty stage list")
    return float(np.prod([s.transmission for s in stages]))


def survive(photon_present, total_transmission: float, rng: np.random.Generator):
    """Bernoulli thinning of per-trial photons; vectorized over trials."""
    if not 0.0 <= total_transmission <= 1.0:
        raise ChainError("transmission must be in [0, 1]")
    present = np.asarray(photon_present, dtype=bool)
    draws = rng.random(present.shape)
    return present & (draws < total_transmission)


def noise_counts(noise: NoiseSpec, window: GateWindow, gate_active: bool,
                 rng: np.random.Generator, size=None):
    """Poisson background counts in a window; zero inside an active pump gate."""
    if gate_active and noise.gated:
        return np.zeros(size or (), dtype=np.int64) if size else 0
    draw = rng.poisson(noise.mean_noise_per_window, size=size)
    return draw if size else int(draw)


def snr_linear_model(mu_in: float, mu1: float) -> float:
    """Echo signal-to-noise for mean input photon number mu_in: SNR = mu_in / mu1."""
    if mu1 <= 0.0:
        raise ChainError("mu1 must be positive")
    return mu_in / mu1


def load_stage_table(path) -> list[StageSpec]:
    """Read a stage table from structured text.

    Accepts either a YAML list of {name, transmission} mappings or plain
    lines of "name transmission" (comma or whitespace separated).
    """
    text = open(path).read()
    stripped = text.lstrip()
    if stripped.startswith("-") or stripped.startswith("["):
        import yaml
        rows = yaml.safe_load(text)
        return [StageSpec(str(r["name"]), float(r["transmission"])) for r in rows]
    stages = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        stages.append(StageSpec(" ".join(parts[:-1]), float(parts[-1])))
    if not stages:
        raise ChainError(f"no stages found in {path}")
    return stages
