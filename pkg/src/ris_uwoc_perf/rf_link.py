"""RIS-assisted RF hop.

The source reaches the relay through ``N`` co-phased reflecting elements, so the relay
SNR is ``γ1 = Z²·γ̄1`` with ``Z = Σ α_i β_i`` (Nakagami-m ``α_i`` with unit power,
Rayleigh ``β_i`` with unit mean square). ``Z²`` is replaced by a squared
generalized-K law whose two shapes match the 2nd, 4th and 6th moments of ``Z``.

The SNR statistics are written over the tuple of shape parameters of the fitted law:
``(k_w, m_w)`` for the RIS cascade and ``(1,)`` for the single-antenna Rayleigh link
used as the no-RIS baseline.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np
from scipy import special, stats

from . import specfn
from .exceptions import FitError
from .modulation import ModulationParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RfLinkParams:
    """Physical inputs of the RF hop.

    Attributes
    ----------
    n_elements : int
        Number of reflecting elements ``N``.
    m : float
        Nakagami fading parameter, at least 1/2.
    mean_snr : float
        ``γ̄1`` in linear scale.
    ris : bool
        ``False`` selects the direct single-antenna Rayleigh link (no RIS).
    """

    n_elements: int
    m: float
    mean_snr: float
    ris: bool = True

    def __post_init__(self):
        if self.ris and (int(self.n_elements) != self.n_elements or self.n_elements < 1):
            raise ValueError(f"n_elements must be a positive integer, got {self.n_elements}")
        if self.ris and self.m < 0.5:
            raise ValueError(f"Nakagami parameter must be >= 0.5, got {self.m}")
        if not self.mean_snr > 0:
            raise ValueError(f"mean_snr must be positive, got {self.mean_snr}")

    @classmethod
    def baseline(cls, mean_snr: float) -> "RfLinkParams":
        return cls(n_elements=1, m=1.0, mean_snr=mean_snr, ris=False)


@dataclass(frozen=True)
class RfLinkFit:
    """Fitted squared generalized-K law of the RF hop at a given ``γ̄1``.

    ``m_w = inf`` marks the exponential (no-RIS) law, whose only shape is ``k_w = 1``.
    """

    k_w: float
    m_w: float
    omega_w: float
    mean_snr: float

    def __post_init__(self):
        for name in ("k_w", "m_w", "omega_w", "mean_snr"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @classmethod
    def rayleigh(cls, mean_snr: float) -> "RfLinkFit":
        return cls(k_w=1.0, m_w=math.inf, omega_w=1.0, mean_snr=mean_snr)

    @property
    def is_baseline(self) -> bool:
        return math.isinf(self.m_w)

    @property
    def shapes(self) -> Tuple[float, ...]:
        return tuple(v for v in (self.k_w, self.m_w) if math.isfinite(v))

    @property
    def xi_tilde(self) -> float:
        return float(np.prod(self.shapes)) / self.omega_w

    @property
    def xi(self) -> float:
        return self.xi_tilde / self.mean_snr

    @property
    def t_min(self) -> float:
        return min(self.shapes)

    @property
    def gamma_norm(self) -> float:
        """``Π Γ(shape)``, the normalizer of the Mellin kernels."""
        return specfn.gamma_product(self.shapes)

    def with_mean_snr(self, mean_snr: float) -> "RfLinkFit":
        return replace(self, mean_snr=mean_snr)


def product_moment(m: float, n: int) -> float:
    """``E[(αβ)^n]`` for Nakagami-m ``α`` (unit power) and Rayleigh ``β`` (E[β²] = 1)."""
    if m < 0.5:
        raise ValueError(f"Nakagami parameter must be >= 0.5, got {m}")
    if n < 0:
        raise ValueError(f"moment order must be nonnegative, got {n}")
    log_alpha = special.gammaln(m + n / 2) - special.gammaln(m) - (n / 2) * math.log(m)
    log_beta = special.gammaln(1 + n / 2)
    return float(math.exp(log_alpha + log_beta))


def sum_moment(params: RfLinkParams, n: int) -> float:
    """n-th raw moment of ``Z = Σ α_i β_i`` over ``N`` i.i.d. elements.

    The moments of partial sums are built one element at a time with the binomial
    expansion, which is the multinomial expansion for identical factors.
    """
    if n < 0:
        raise ValueError(f"moment order must be nonnegative, got {n}")
    if not params.ris:
        return float(special.gamma(1 + n / 2))
    chi = [product_moment(params.m, i) for i in range(n + 1)]
    moments = list(chi)
    for _ in range(int(params.n_elements) - 1):
        moments = [
            sum(special.comb(j, i, exact=True) * moments[i] * chi[j - i] for i in range(j + 1))
            for j in range(n + 1)
        ]
    return float(moments[n])


def fit_kg(params: RfLinkParams) -> RfLinkFit:
    """Fit the squared generalized-K law to ``Z²``.

    With ``u = 1/k_w`` and ``v = 1/m_w`` the normalized moments of the squared law are
    ``E[W²]/E[W]² = (1+u)(1+v)`` and ``E[W³]/E[W]³ = (1+u)(1+v)(1+2u)(1+2v)``. Matching
    them to ``μ_Z(4)/μ_Z(2)²`` and ``μ_Z(6)/μ_Z(2)³`` fixes ``u + v`` and ``u·v``, so the
    shapes are the roots of ``a_w x² + b_w x + c_w = 0`` with ``a_w = u·v``,
    ``b_w = -(u + v)`` and ``c_w = 1``.

    Parameters
    ----------
    params : RfLinkParams
        Physical RF-hop inputs.

    Returns
    -------
    RfLinkFit
        Shapes labelled so that ``k_w >= m_w``. A complex root pair is replaced by its
        common modulus.

    Raises
    ------
    FitError
        If the matched moments do not describe a squared generalized-K law.
    """
    if not params.ris:
        return RfLinkFit.rayleigh(params.mean_snr)

    mu2, mu4, mu6 = (sum_moment(params, n) for n in (2, 4, 6))
    ratio2 = mu4 / mu2**2
    ratio3 = mu6 / mu2**3
    total = (4 * ratio2 - 3 - ratio3 / ratio2) / 2
    product = ratio2 - 1 - total
    if not (total > 0 and product > 0):
        logger.error(f"moment ratios {ratio2:.6g}, {ratio3:.6g} admit no positive shapes")
        raise FitError(
            f"no squared generalized-K shapes for N={params.n_elements}, m={params.m}"
        )

    a_w, b_w, c_w = product, -total, 1.0
    disc = b_w**2 - 4 * a_w * c_w
    if disc >= 0:
        k_w = (-b_w + math.sqrt(disc)) / (2 * a_w)
        m_w = (-b_w - math.sqrt(disc)) / (2 * a_w)
    else:
        k_w = m_w = math.sqrt(c_w / a_w)
        logger.warning(
            f"complex shape pair for N={params.n_elements}, m={params.m}; "
            f"using the modulus {k_w:.6g}"
        )
    logger.debug(f"fit N={params.n_elements}, m={params.m}: k_w={k_w:.6g}, m_w={m_w:.6g}")
    return RfLinkFit(k_w=k_w, m_w=m_w, omega_w=mu2, mean_snr=params.mean_snr)


def _check_snr(value: float, name: str = "gamma1", strict: bool = True) -> None:
    if strict and not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    if not strict and not value >= 0:
        raise ValueError(f"{name} must be nonnegative, got {value}")


def pdf_coeffs(fit: RfLinkFit) -> specfn.HCoeffs:
    """``G^{n,0}_{0,n}[· | shapes - 1]``, the Meijer kernel of the SNR density."""
    return specfn.HCoeffs.from_meijer(len(fit.shapes), 0, [], [s - 1 for s in fit.shapes])


def cdf_coeffs(fit: RfLinkFit) -> specfn.HCoeffs:
    """``G^{n,1}_{1,n+1}[· | 1; shapes, 0]``, the Meijer kernel of the SNR distribution."""
    return specfn.HCoeffs.from_meijer(len(fit.shapes), 1, [1.0], [*fit.shapes, 0.0])


def snr1_pdf(fit: RfLinkFit, gamma1: float, method: str = "bessel") -> float:
    """Density of ``γ1``.

    ``method="bessel"`` uses the modified Bessel form (gamma density for the baseline),
    ``method="meijer"`` the Meijer G form.
    """
    _check_snr(gamma1)
    if method == "meijer":
        value = specfn.meijer_g(pdf_coeffs(fit), fit.xi * gamma1)
        return max(fit.xi * value / fit.gamma_norm, 0.0)
    if method != "bessel":
        raise ValueError(f"unknown method {method!r}")
    if fit.is_baseline:
        return float(stats.gamma.pdf(gamma1, a=fit.k_w, scale=1 / fit.xi))

    k, m, xi = fit.k_w, fit.m_w, fit.xi
    if k == m:
        logger.warning("equal shape parameters: downstream asymptotics need perturbation")
    z = 2 * math.sqrt(xi * gamma1)
    log_value = (
        math.log(2)
        + (k + m) / 2 * math.log(xi)
        + ((k + m) / 2 - 1) * math.log(gamma1)
        - special.gammaln(k)
        - special.gammaln(m)
        + math.log(special.kve(k - m, z))
        - z
    )
    return math.exp(log_value)


def snr1_cdf(fit: RfLinkFit, gamma1: float, full_output: bool = False):
    """Distribution function of ``γ1`` through the Meijer G form."""
    _check_snr(gamma1, strict=False)
    if gamma1 == 0:
        return (0.0, None) if full_output else 0.0
    value, diag = specfn.meijer_g(cdf_coeffs(fit), fit.xi * gamma1, full_output=True)
    value, _ = specfn.clamp_probability(float(value / fit.gamma_norm), "F1")
    diag = diag.relabel("F1", 1 / fit.gamma_norm)
    return (value, diag) if full_output else value


def leading_shapes(fit: RfLinkFit, extra=lambda shapes: ()) -> Tuple[float, ...]:
    """Shapes cleared of coinciding poles for the residue-based asymptotics.

    ``extra(shapes)`` adds further gamma arguments that must stay regular.
    """

    def arguments(shapes):
        gaps = [abs(shapes[0] - shapes[1])] if len(shapes) == 2 else []
        return gaps + list(extra(shapes))

    return specfn.regularize(fit.shapes, arguments, label="rf asymptotic")


def leading_coefficient(shapes) -> Tuple[float, float]:
    """Coefficient and exponent of the leading small-argument term of the RF CDF."""
    t = min(shapes)
    others = list(shapes)
    others.remove(t)
    coefficient = specfn.gamma_product([s - t for s in others], list(shapes)) / t
    return coefficient, t


def snr1_cdf_asymptotic(fit: RfLinkFit, gamma1: float) -> float:
    """High-SNR form ``Γ(|m_w - k_w|) / (Γ(k_w)Γ(m_w)t) · (Ξ̃γ/γ̄1)^t``.

    ``t = min(k_w, m_w)``; coinciding shapes are perturbed first.
    """
    _check_snr(gamma1)
    coefficient, t = leading_coefficient(leading_shapes(fit))
    return coefficient * (fit.xi * gamma1) ** t


def aber_coeffs(fit: RfLinkFit, mod: ModulationParams) -> specfn.HCoeffs:
    return specfn.HCoeffs.from_meijer(len(fit.shapes), 2, [1.0, 1 - mod.p], [*fit.shapes, 0.0])


def snr1_aber(fit: RfLinkFit, mod: ModulationParams, full_output: bool = False):
    """Average bit-error rate of the RF hop alone."""
    scale = 1 / (2 * special.gamma(mod.p) * fit.gamma_norm)
    value, diag = specfn.meijer_g(aber_coeffs(fit, mod), fit.xi / mod.q, full_output=True)
    value, _ = specfn.clamp_probability(float(value * scale), "Pe1", upper=0.5)
    diag = diag.relabel("Pe1", scale)
    return (value, diag) if full_output else value


def snr1_aber_asymptotic(fit: RfLinkFit, mod: ModulationParams) -> float:
    coefficient, t = leading_coefficient(leading_shapes(fit))
    return coefficient * special.gamma(mod.p + t) / (2 * special.gamma(mod.p)) * (
        fit.xi / mod.q
    ) ** t
