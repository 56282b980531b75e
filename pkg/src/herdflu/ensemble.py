"""Monte Carlo ensembles over independent noise paths.

Path i of an ensemble is driven by NoiseStream(master_seed, i), so the
set of trajectories is fixed by the master seed alone. All paths are
advanced step-synchronously; at each recorded time the cross-path slab
is reduced to mean, standard deviation and quantile bands on the spot,
keeping memory at O(paths) working state plus O(grid) output instead of
storing every trajectory. Because the reductions always see the same
assembled slab, serial and threaded execution produce identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .integrate import NoiseStream, SimConfig, iter_path_states
from .model import HerdState, ModelParams, NoiseIntensities

# Ensemble quantile levels: central 95% band plus the median.
QUANTILES = (0.025, 0.5, 0.975)

# A path with fewer than one infected head (E + I_s + I_a) counts as
# extinct for reporting purposes.
EXTINCTION_THRESHOLD = 1.0


@dataclass(frozen=True)
class EnsembleSummary:
    """Per-time cross-path statistics of an ensemble.

    All arrays have one row per recorded time and one column per
    compartment. `std` is the population standard deviation (ddof 0);
    quantiles interpolate linearly between order statistics.
    `extinct_fraction` is the share of paths whose infected load
    E + I_s + I_a is below EXTINCTION_THRESHOLD at the final recorded
    time.
    """

    times: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    q025: np.ndarray
    q50: np.ndarray
    q975: np.ndarray
    n_paths: int
    master_seed: int
    extinct_fraction: float

    def __post_init__(self) -> None:
        shape = (len(self.times), 6)
        for name in ("mean", "std", "q025", "q50", "q975"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} must have shape {shape}")
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if not 0.0 <= self.extinct_fraction <= 1.0:
            raise ValueError("extinct_fraction must lie in [0, 1]")


def _infected_load(slab: np.ndarray) -> np.ndarray:
    # E + I_s + I_a per path; the reservoir is not a host class.
    return slab[:, 1] + slab[:, 2] + slab[:, 3]


def run_ensemble(
    p: ModelParams,
    n: NoiseIntensities,
    init: HerdState,
    cfg: SimConfig,
    n_paths: int,
    master_seed: int,
    threads: int = 1,
) -> EnsembleSummary:
    """Integrate n_paths stochastic paths and reduce them per time.

    A one-path ensemble reproduces the corresponding `integrate_sde`
    trajectory exactly; with all intensities zero every path coincides
    and the standard deviation is identically 0.
    """
    if not isinstance(n_paths, int) or n_paths < 1:
        raise ValueError(f"n_paths must be an integer >= 1, got {n_paths!r}")
    streams = [NoiseStream(master_seed, i) for i in range(n_paths)]
    ks = cfg.recorded_steps()
    n_rec = len(ks)
    times = ks * cfg.dt
    mean = np.empty((n_rec, 6))
    std = np.empty((n_rec, 6))
    q025 = np.empty((n_rec, 6))
    q50 = np.empty((n_rec, 6))
    q975 = np.empty((n_rec, 6))
    extinct = 0.0

    it = iter_path_states(p, init, cfg, noise=n, streams=streams, threads=threads)
    for i, (_, slab) in enumerate(it):
        # Moments of the deviations from path 0, not of the raw values:
        # numpy's sequential outer-axis reduction rounds even when every
        # row is identical, and bit-identical paths must report exactly
        # zero spread (and a one-path mean must equal that path bitwise).
        base = slab[0]
        dev = slab - base
        dm = dev.mean(axis=0)
        mean[i] = base + dm
        var = (dev * dev).mean(axis=0) - dm * dm
        std[i] = np.sqrt(np.maximum(var, 0.0))
        q025[i], q50[i], q975[i] = np.quantile(slab, QUANTILES, axis=0)
        if i == n_rec - 1:
            extinct = float(
                np.mean(_infected_load(slab) < EXTINCTION_THRESHOLD)
            )
    return EnsembleSummary(
        times=times,
        mean=mean,
        std=std,
        q025=q025,
        q50=q50,
        q975=q975,
        n_paths=n_paths,
        master_seed=master_seed,
        extinct_fraction=extinct,
    )


def extinction_fraction(
    p: ModelParams,
    n: NoiseIntensities,
    init: HerdState,
    cfg: SimConfig,
    n_paths: int,
    master_seed: int,
    threshold: float = EXTINCTION_THRESHOLD,
    by_time: float | None = None,
    threads: int = 1,
) -> float:
    """Fraction of paths extinct from `by_time` onwards.

    A path counts as extinct when its infected load E + I_s + I_a stays
    below `threshold` at every recorded time >= by_time (default: the
    final recorded time only). Nondecreasing in `threshold` on a fixed
    ensemble.
    """
    if not isinstance(n_paths, int) or n_paths < 1:
        raise ValueError(f"n_paths must be an integer >= 1, got {n_paths!r}")
    if not (math.isfinite(threshold) and threshold >= 0.0):
        raise ValueError(f"threshold must be finite and >= 0, got {threshold!r}")
    t_last = float(cfg.recorded_steps()[-1] * cfg.dt)
    if by_time is None:
        by_time = t_last
    # Small slack so by_time = t_end matches the last grid point even
    # when t_end is not an exact float multiple of dt.
    cut = by_time - 1e-9 * max(1.0, abs(by_time))
    if cut > t_last:
        raise ValueError(
            f"by_time {by_time!r} lies beyond the last recorded time {t_last!r}"
        )
    streams = [NoiseStream(master_seed, i) for i in range(n_paths)]
    extinct = np.ones(n_paths, dtype=bool)
    it = iter_path_states(p, init, cfg, noise=n, streams=streams, threads=threads)
    for t, slab in it:
        if t >= cut:
            extinct &= _infected_load(slab) < threshold
    return float(extinct.mean())
