"""Monte-Carlo oracle for the two-hop link.

Samples the physical channel chain directly: the RIS cascade ``Z = Σ α_i β_i`` on the RF
hop and the EGG irradiance on the optical hop, then combines the two SNRs per relaying
protocol. Nothing here uses the fitted generalized-K law or any Mellin-Barnes form, so
the estimates are an independent check of :mod:`ris_uwoc_perf.metrics`.

Every batch draws from its own ``Philox`` stream spawned from the master seed, and the
batch partition depends on ``samples`` and ``batch`` only, so estimates do not depend on
the number of workers.
"""
import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from .e2e_stats import RelayConfig
from .metrics import Method, Metric, MetricResult
from .modulation import BPSK, ModulationParams
from .rf_link import RfLinkParams
from .uwoc_link import Detection, EggParams

logger = logging.getLogger(__name__)

RARE_EVENT_COUNT = 10
_MAX_SEED = 2**64


@dataclass(frozen=True)
class McConfig:
    """Sampling plan of one Monte-Carlo estimate.

    Attributes
    ----------
    samples : int
        Total number of channel realizations.
    seed : int
        Master seed, an unsigned 64-bit integer.
    batch : int
        Realizations drawn per batch.
    jobs : int
        joblib workers; ``-1`` uses every core.
    """

    samples: int = 10**6
    seed: int = 0
    batch: int = 2**18
    jobs: int = 1

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 2:
            raise ValueError(f"samples must be an integer >= 2, got {self.samples}")
        if int(self.batch) != self.batch or self.batch < 1:
            raise ValueError(f"batch must be a positive integer, got {self.batch}")
        if int(self.seed) != self.seed or not 0 <= self.seed < _MAX_SEED:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.jobs == 0:
            raise ValueError("jobs must be nonzero")

    @property
    def batches(self) -> List[int]:
        """Batch sizes, all equal to ``batch`` except possibly the last."""
        full, rest = divmod(int(self.samples), int(self.batch))
        return [int(self.batch)] * full + ([rest] if rest else [])


def _batch_seeds(cfg: McConfig) -> List[Tuple[np.random.SeedSequence, np.random.SeedSequence]]:
    """One (RF, optical) pair of seed sequences per batch."""
    children = np.random.SeedSequence(int(cfg.seed)).spawn(len(cfg.batches))
    return [tuple(child.spawn(2)) for child in children]


def _generator(seed: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def draw_gamma1(rf: RfLinkParams, size: int, rng: np.random.Generator) -> np.ndarray:
    """``γ1 = Z² γ̄1`` for ``size`` independent realizations."""
    if not rf.ris:
        # single-antenna Rayleigh link, |β|² ~ Exp(1)
        return rf.mean_snr * rng.exponential(1.0, size)
    shape = (size, int(rf.n_elements))
    alpha = np.sqrt(rng.gamma(rf.m, 1.0 / rf.m, shape))
    beta = np.sqrt(rng.exponential(1.0, shape))
    z = np.sum(alpha * beta, axis=1)
    return rf.mean_snr * z**2


def draw_gamma2(uw: EggParams, size: int, rng: np.random.Generator) -> np.ndarray:
    """``γ2 = μ_r I^r`` with ``I`` drawn from the EGG mixture."""
    exponential = rng.random(size) < uw.omega
    irradiance = np.where(
        exponential,
        rng.exponential(uw.lam, size),
        uw.b * rng.gamma(uw.a, 1.0, size) ** (1.0 / uw.c),
    )
    return uw.mu_r * irradiance**uw.r


def sample_gamma1(rf: RfLinkParams, cfg: McConfig) -> Iterator[np.ndarray]:
    """Stream of RF-hop SNR batches, reproducible from ``cfg.seed``."""
    for size, (seed, _) in zip(cfg.batches, _batch_seeds(cfg)):
        yield draw_gamma1(rf, size, _generator(seed))


def sample_gamma2(uw: EggParams, cfg: McConfig) -> Iterator[np.ndarray]:
    """Stream of optical-hop SNR batches, reproducible from ``cfg.seed``."""
    for size, (_, seed) in zip(cfg.batches, _batch_seeds(cfg)):
        yield draw_gamma2(uw, size, _generator(seed))


def combine(gamma1: np.ndarray, gamma2: np.ndarray, relay: RelayConfig) -> np.ndarray:
    """End-to-end SNR: ``γ1γ2/(γ2+C)`` for fixed-gain AF, ``min(γ1, γ2)`` for DF."""
    if relay.is_af:
        return gamma1 * gamma2 / (gamma2 + relay.gain_const)
    return np.minimum(gamma1, gamma2)


def metric_kernel(metric: Metric, gamma: np.ndarray, **extras) -> np.ndarray:
    """Per-realization value whose mean is the metric."""
    if metric is Metric.OP:
        return (gamma < extras["gamma_th"]).astype(float)
    if metric is Metric.ABER:
        return extras["mod"].conditional_ber(gamma)
    return 0.5 * np.log2(1.0 + extras["tau"] * gamma)


def _batch_moments(
    metric: Metric, rf: RfLinkParams, uw: EggParams, relay: RelayConfig, size, seeds, extras
) -> Tuple[int, float, float]:
    rf_seed, uw_seed = seeds
    gamma = combine(
        draw_gamma1(rf, size, _generator(rf_seed)),
        draw_gamma2(uw, size, _generator(uw_seed)),
        relay,
    )
    values = metric_kernel(metric, gamma, **extras)
    mean = float(np.mean(values))
    return size, mean, float(np.sum((values - mean) ** 2))


def _merge(left, right) -> Tuple[int, float, float]:
    """Pairwise update of (count, mean, sum of squared deviations)."""
    n_a, mean_a, m2_a = left
    n_b, mean_b, m2_b = right
    n = n_a + n_b
    delta = mean_b - mean_a
    return n, mean_a + delta * n_b / n, m2_a + m2_b + delta**2 * n_a * n_b / n


def estimate_metric(
    metric,
    rf: RfLinkParams,
    uw: EggParams,
    relay: RelayConfig,
    cfg: McConfig = McConfig(),
    gamma_th: Optional[float] = None,
    mod: ModulationParams = BPSK,
    detection=None,
) -> MetricResult:
    """Monte-Carlo estimate of OP, ABER or ACC.

    Parameters
    ----------
    metric : Metric or str
        ``op``, ``aber`` or ``acc``.
    rf : RfLinkParams
        Physical RF hop (``ris=False`` for the direct Rayleigh link).
    uw : EggParams
        Optical hop.
    relay : RelayConfig
        Relaying protocol.
    cfg : McConfig
        Sampling plan.
    gamma_th : float, optional
        Outage threshold (linear), required for ``op``.
    mod : ModulationParams
        Modulation of the ``aber`` kernel ``Γ(p, qγ) / (2Γ(p))``.
    detection : Detection or str, optional
        Detection mode whose ``τ`` scales the ``acc`` kernel; the optical hop's own mode
        when omitted.

    Returns
    -------
    MetricResult
        Sample mean with ``mc_std_err`` equal to the sample standard deviation over
        ``√samples``.
    """
    metric = Metric(metric)
    extras = {}
    if metric is Metric.OP:
        if gamma_th is None or not gamma_th > 0:
            raise ValueError(f"outage estimates need a positive gamma_th, got {gamma_th}")
        extras["gamma_th"] = gamma_th
    elif metric is Metric.ABER:
        extras["mod"] = mod
    else:
        extras["tau"] = Detection(detection).tau if detection is not None else uw.detection.tau

    logger.info(
        f"MC {metric.value}: {cfg.samples} samples in {len(cfg.batches)} batches, "
        f"seed {cfg.seed}"
    )
    moments = Parallel(n_jobs=cfg.jobs)(
        delayed(_batch_moments)(metric, rf, uw, relay, size, seeds, extras)
        for size, seeds in zip(cfg.batches, _batch_seeds(cfg))
    )
    n, mean, m2 = reduce(_merge, moments)
    std_err = math.sqrt(m2 / (n - 1)) / math.sqrt(n)

    if metric is not Metric.ACC and mean < RARE_EVENT_COUNT / n:
        logger.warning(
            f"MC {metric.value} estimate {mean:.3e} is below {RARE_EVENT_COUNT}/{n}; "
            "too few events for a reliable value"
        )
    logger.debug(f"MC {metric.value} = {mean:.6e} ± {std_err:.2e}")
    return MetricResult(mean, Method.MONTE_CARLO, mc_std_err=std_err)
