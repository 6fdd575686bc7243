"""Underwater optical hop with Exponential-Generalized-Gamma (EGG) turbulence.

The irradiance ``I`` is Exponential(λ) with probability ω and generalized Gamma
``(a, b, c)`` otherwise; the electrical SNR is ``γ2 = μ_r I^r`` with ``r = 1`` for
heterodyne detection and ``r = 2`` for intensity modulation with direct detection.
"""
import enum
import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import special

from . import specfn
from .exceptions import UnknownConditionError
from .modulation import ModulationParams

logger = logging.getLogger(__name__)


class Detection(enum.Enum):
    HD = "hd"
    IMDD = "imdd"

    @property
    def r(self) -> int:
        return 1 if self is Detection.HD else 2

    @property
    def tau(self) -> float:
        """Capacity scaling of the log-SNR bound, ``e / 2π`` for IM/DD."""
        return 1.0 if self is Detection.HD else math.e / (2 * math.pi)

    @classmethod
    def from_r(cls, r: int) -> "Detection":
        return {1: cls.HD, 2: cls.IMDD}[int(r)]


class Water(enum.Enum):
    FRESH = "fresh"
    SALTY = "salty"
    THERMAL = "thermal"


@dataclass(frozen=True)
class EggParams:
    """EGG mixture parameters of the optical hop with its detection mode and mean SNR.

    Attributes
    ----------
    omega : float
        Mixture weight of the exponential component, in (0, 1).
    lam : float
        Exponential parameter λ.
    a, b, c : float
        Generalized-Gamma parameters.
    r : int
        1 for heterodyne detection, 2 for IM/DD.
    mean_snr : float
        Average SNR ``γ̄2`` in linear scale.
    """

    omega: float
    lam: float
    a: float
    b: float
    c: float
    r: int = 1
    mean_snr: float = 1.0

    def __post_init__(self):
        if not 0 < self.omega < 1:
            raise ValueError(f"mixture weight must lie in (0, 1), got {self.omega}")
        for name in ("lam", "a", "b", "c", "mean_snr"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.r not in (1, 2):
            raise ValueError(f"detection parameter r must be 1 or 2, got {self.r}")

    @property
    def detection(self) -> Detection:
        return Detection.from_r(self.r)

    @property
    def power_factor(self) -> float:
        """``E[I²] = 2ωλ² + b²(1-ω)Γ(a+2/c)/Γ(a)``."""
        gg = math.exp(special.gammaln(self.a + 2 / self.c) - special.gammaln(self.a))
        return 2 * self.omega * self.lam**2 + self.b**2 * (1 - self.omega) * gg

    @property
    def mu_r(self) -> float:
        """Average electrical SNR ``μ_r``."""
        if self.r == 1:
            return self.mean_snr
        return self.mean_snr / self.power_factor

    @property
    def exp_scale(self) -> float:
        """``λ^r μ_r``."""
        return self.lam**self.r * self.mu_r

    @property
    def gg_scale(self) -> float:
        """``b^r μ_r``."""
        return self.b**self.r * self.mu_r

    @property
    def gg_slope(self) -> float:
        """``r / c``, the Mellin slope of the generalized-Gamma terms."""
        return self.r / self.c

    def with_link(self, detection: Detection, mean_snr: float) -> "EggParams":
        return replace(self, r=Detection(detection).r, mean_snr=mean_snr)

    def with_mean_snr(self, mean_snr: float) -> "EggParams":
        return replace(self, mean_snr=mean_snr)

    def with_mu_r(self, mu_r: float) -> "EggParams":
        """Copy whose electrical SNR equals ``mu_r``."""
        factor = 1.0 if self.r == 1 else self.power_factor
        return replace(self, mean_snr=mu_r * factor)


# (water, bubble level L/min, temperature gradient °C/cm) -> (ω, λ, a, b, c)
_TABLES: Dict[Tuple[str, float, Optional[float]], Tuple[float, ...]] = {
    ("thermal", 2.4, 0.05): (0.2130, 0.3291, 1.4299, 1.1817, 17.1984),
    ("thermal", 2.4, 0.20): (0.1665, 0.1207, 0.1559, 1.5216, 22.8754),
    ("thermal", 4.7, 0.05): (0.4580, 0.3449, 1.0421, 1.5768, 35.9424),
    ("salty", 4.7, None): (0.2064, 0.3953, 0.5307, 1.2154, 35.7368),
    ("salty", 7.1, None): (0.4344, 0.4747, 0.3935, 1.4506, 77.0245),
    ("salty", 16.5, None): (0.4951, 0.1368, 0.0161, 3.2033, 82.1030),
    ("fresh", 4.7, None): (0.2190, 0.4603, 1.2526, 1.1501, 41.3258),
    ("fresh", 7.1, None): (0.3489, 0.4771, 0.4319, 1.4531, 74.3650),
    ("fresh", 16.5, None): (0.5117, 0.1602, 0.0075, 2.9963, 216.8356),
}


def _row_key(water, bubble_level, temp_gradient) -> str:
    key = f"{water}:{bubble_level:g}"
    return key if temp_gradient is None else f"{key}:{temp_gradient:g}"


def available_rows() -> List[str]:
    """Row keys ``water:bubble_level[:temp_gradient]`` of the embedded tables."""
    return [_row_key(*key) for key in _TABLES]


def table_lookup(water, bubble_level: float, temp_gradient: Optional[float] = None) -> EggParams:
    """EGG parameters measured for a water condition.

    Parameters
    ----------
    water : Water or str
        ``fresh``, ``salty`` or ``thermal`` (thermally uniform rows need a gradient).
    bubble_level : float
        Air-bubble level in L/min.
    temp_gradient : float, optional
        Temperature gradient in °C/cm, only for ``thermal`` rows.

    Returns
    -------
    EggParams
        Table row with heterodyne detection and unit mean SNR; use
        :meth:`EggParams.with_link` to set the link.

    Raises
    ------
    UnknownConditionError
        If the requested row is not embedded.
    """
    try:
        water = Water(water).value
    except ValueError:
        logger.error(f"unknown water type {water!r}")
        raise UnknownConditionError(
            f"unknown water type {water!r}; available rows: {', '.join(available_rows())}"
        )
    for (w, bl, tg), row in _TABLES.items():
        if w != water or not math.isclose(bl, bubble_level, abs_tol=1e-9):
            continue
        if (tg is None) != (temp_gradient is None):
            continue
        if tg is not None and not math.isclose(tg, temp_gradient, abs_tol=1e-9):
            continue
        omega, lam, a, b, c = row
        return EggParams(omega=omega, lam=lam, a=a, b=b, c=c)

    requested = _row_key(water, bubble_level, temp_gradient)
    logger.error(f"no table row for {requested}")
    raise UnknownConditionError(
        f"no table row for {requested}; available rows: {', '.join(available_rows())}"
    )


def lookup_key(key: str) -> EggParams:
    """Parse ``water:bubble_level[:temp_gradient]`` and look the row up."""
    parts = key.strip().split(":")
    if len(parts) not in (2, 3):
        raise UnknownConditionError(
            f"malformed row key {key!r}; available rows: {', '.join(available_rows())}"
        )
    try:
        numbers = [float(v) for v in parts[1:]]
    except ValueError:
        raise UnknownConditionError(f"malformed row key {key!r}")
    return table_lookup(parts[0], *numbers)


def table_records() -> pd.DataFrame:
    """Embedded parameter rows as a table (sweep-compatible ``param_*`` key columns)."""
    rows = []
    for (water, bl, tg), (omega, lam, a, b, c) in _TABLES.items():
        rows.append(
            {
                "key": _row_key(water, bl, tg),
                "param_water": water,
                "param_bubble_level": bl,
                "param_temp_gradient": np.nan if tg is None else tg,
                "omega": omega,
                "lambda": lam,
                "a": a,
                "b": b,
                "c": c,
            }
        )
    return pd.DataFrame(rows)


def _check_gamma(gamma2: float, strict: bool) -> None:
    if (strict and not gamma2 > 0) or (not strict and not gamma2 >= 0):
        raise ValueError(f"gamma2 must be {'positive' if strict else 'nonnegative'}, got {gamma2}")


def pdf_terms(p: EggParams) -> Tuple[specfn.HCoeffs, specfn.HCoeffs]:
    eps = p.gg_slope
    return (
        specfn.HCoeffs.from_fox(1, 0, [], [(1.0, p.r)]),
        specfn.HCoeffs.from_fox(1, 0, [], [(p.a, eps)]),
    )


def cdf_terms(p: EggParams) -> Tuple[specfn.HCoeffs, specfn.HCoeffs]:
    eps = p.gg_slope
    return (
        specfn.HCoeffs.from_fox(1, 1, [(1.0, p.r)], [(1.0, p.r), (0.0, p.r)]),
        specfn.HCoeffs.from_fox(1, 1, [(1.0, eps)], [(p.a, eps), (0.0, eps)]),
    )


def snr2_pdf(p: EggParams, gamma2: float, method: str = "closed") -> float:
    """Density of ``γ2``.

    ``method="closed"`` evaluates the exponential and generalized-Gamma densities after
    the change of variables, ``method="fox_h"`` the two Fox H terms.
    """
    _check_gamma(gamma2, strict=True)
    if method == "fox_h":
        exp_h, gg_h = pdf_terms(p)
        value = p.omega / gamma2 * specfn.fox_h(exp_h, gamma2 / p.exp_scale)
        value += (1 - p.omega) / (gamma2 * special.gamma(p.a)) * specfn.fox_h(
            gg_h, gamma2 / p.gg_scale
        )
        return max(value, 0.0)
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")

    r, c, a = p.r, p.c, p.a
    log_u = math.log(gamma2 / p.exp_scale) / r
    exp_part = p.omega / (r * gamma2) * float(np.exp(log_u - np.exp(log_u)))
    log_v = math.log(gamma2 / p.gg_scale) * c / r
    log_gg = (
        math.log((1 - p.omega) * c / (r * gamma2)) - special.gammaln(a) + a * log_v - np.exp(log_v)
    )
    return float(exp_part + np.exp(log_gg))


def snr2_cdf(p: EggParams, gamma2: float, method: str = "closed") -> float:
    """Distribution function of ``γ2`` (closed reductions or Fox H terms)."""
    _check_gamma(gamma2, strict=False)
    if gamma2 == 0:
        return 0.0
    if method == "fox_h":
        exp_h, gg_h = cdf_terms(p)
        value = p.omega * p.r * specfn.fox_h(exp_h, gamma2 / p.exp_scale)
        value += (1 - p.omega) * p.r / (special.gamma(p.a) * p.c) * specfn.fox_h(
            gg_h, gamma2 / p.gg_scale
        )
        return specfn.clamp_probability(float(value), "F2")[0]
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")

    exp_part = -np.expm1(-np.power(gamma2 / p.exp_scale, 1 / p.r))
    gg_part = special.gammainc(p.a, np.power(gamma2 / p.gg_scale, p.c / p.r))
    return float(p.omega * exp_part + (1 - p.omega) * gg_part)


def asymptotic_terms(p: EggParams) -> List[Tuple[str, float, float]]:
    """``(name, coefficient, exponent)`` of the small-argument CDF ``Σ coef·γ^exponent``."""
    r = p.r
    return [
        ("exp", p.omega * p.exp_scale ** (-1 / r), 1 / r),
        (
            "gg",
            (1 - p.omega) / special.gamma(p.a + 1) * p.gg_scale ** (-p.a * p.c / r),
            p.a * p.c / r,
        ),
    ]


def snr2_cdf_asymptotic(p: EggParams, gamma2: float) -> float:
    _check_gamma(gamma2, strict=True)
    return float(sum(coef * gamma2**alpha for _, coef, alpha in asymptotic_terms(p)))


def aber_terms(p: EggParams, mod: ModulationParams) -> Tuple[specfn.HCoeffs, specfn.HCoeffs]:
    eps = p.gg_slope
    return (
        specfn.HCoeffs.from_fox(
            1, 2, [(1.0, p.r), (1 - mod.p, 1.0)], [(1.0, p.r), (0.0, p.r)]
        ),
        specfn.HCoeffs.from_fox(1, 2, [(1.0, eps), (1 - mod.p, 1.0)], [(p.a, eps), (0.0, eps)]),
    )


def uwoc_aber(p: EggParams, mod: ModulationParams, full_output: bool = False):
    """Average bit-error rate of the optical hop alone as a two-term Fox H sum.

    Returns
    -------
    float or (float, list of Diagnostics)
    """
    exp_h, gg_h = aber_terms(p, mod)
    pre_exp = p.omega * p.r / (2 * special.gamma(mod.p))
    pre_gg = (1 - p.omega) * p.r / (2 * special.gamma(mod.p) * special.gamma(p.a) * p.c)
    v1, d1 = specfn.fox_h(exp_h, 1 / (p.exp_scale * mod.q), full_output=True)
    v2, d2 = specfn.fox_h(gg_h, 1 / (p.gg_scale * mod.q), full_output=True)
    value, _ = specfn.clamp_probability(float(pre_exp * v1 + pre_gg * v2), "Pe2", upper=0.5)
    diags = [d1.relabel("Pe2[exp]", pre_exp), d2.relabel("Pe2[gg]", pre_gg)]
    return (value, diags) if full_output else value


def uwoc_aber_asymptotic(p: EggParams, mod: ModulationParams) -> float:
    """High-SNR bit-error rate.

    Each CDF term ``coef·γ^α`` averages to ``coef·Γ(p+α)/(2Γ(p)q^α)``.
    """
    total = 0.0
    for _, coef, alpha in asymptotic_terms(p):
        total += coef * special.gamma(mod.p + alpha) / (2 * special.gamma(mod.p) * mod.q**alpha)
    return float(total)


@dataclass(frozen=True)
class MixtureBranch:
    """One component of the γ2 mixture in Mellin form.

    Restricted to the component, ``E[γ2^σ] = weight · Γ(offset + slope·σ) · scale^σ``; the
    component CDF carries the Mellin kernel
    ``Γ(offset + slope·s) Γ(-slope·s) / Γ(1 - slope·s)`` with prefactor ``weight · slope``.
    """

    name: str
    weight: float
    offset: float
    slope: float
    scale: float


def mixture_branches(p: EggParams) -> Tuple[MixtureBranch, MixtureBranch]:
    return (
        MixtureBranch("exp", p.omega, 1.0, float(p.r), p.exp_scale),
        MixtureBranch("gg", (1 - p.omega) / special.gamma(p.a), p.a, p.gg_slope, p.gg_scale),
    )
