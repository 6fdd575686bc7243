"""End-to-end SNR statistics at the destination.

Fixed-gain AF: ``γ = γ1 γ2 / (γ2 + C)``. Its CDF is the RF-hop CDF plus one bivariate Fox H
term per component of the optical mixture, its density one bivariate term per component.

DF: ``γ = min(γ1, γ2)``, combined from the two hop statistics.
"""
import enum
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from . import rf_link, specfn, uwoc_link
from .exceptions import ContourError, ConvergenceError
from .rf_link import RfLinkFit
from .specfn import GammaTerm, HCoeffs, clamp_nonnegative, clamp_probability
from .uwoc_link import EggParams, MixtureBranch

logger = logging.getLogger(__name__)


class Protocol(enum.Enum):
    FIXED_GAIN_AF = "fixed_gain_af"
    DF = "df"

    @classmethod
    def parse(cls, value) -> "Protocol":
        if isinstance(value, cls):
            return value
        aliases = {"af": cls.FIXED_GAIN_AF, "fixed_gain_af": cls.FIXED_GAIN_AF, "df": cls.DF}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown relaying protocol {value!r}")


@dataclass(frozen=True)
class RelayConfig:
    """Relaying protocol and, for fixed-gain AF, the gain constant ``C``."""

    protocol: Protocol
    gain_const: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol.parse(self.protocol))
        if self.protocol is Protocol.FIXED_GAIN_AF:
            if self.gain_const is None or not self.gain_const > 0:
                raise ValueError(
                    f"fixed-gain AF needs a positive gain constant, got {self.gain_const}"
                )
        elif self.gain_const is not None:
            raise ValueError("the gain constant only applies to fixed-gain AF relaying")

    @classmethod
    def af(cls, gain_const: float) -> "RelayConfig":
        return cls(Protocol.FIXED_GAIN_AF, gain_const)

    @classmethod
    def df(cls) -> "RelayConfig":
        return cls(Protocol.DF)

    @property
    def is_af(self) -> bool:
        return self.protocol is Protocol.FIXED_GAIN_AF


@dataclass(frozen=True)
class Evaluation:
    """Value of a composite expression with the record of every Mellin-Barnes term."""

    value: float
    terms: Tuple[specfn.Diagnostics, ...] = ()
    clamped: bool = False


def evaluate_term(label: str, coeffs: HCoeffs, *args: float) -> specfn.Diagnostics:
    """Evaluate one Fox H term, naming it in any numerical failure."""
    try:
        if coeffs.dims == 1:
            _, diag = specfn.fox_h(coeffs, args[0], full_output=True)
        else:
            _, diag = specfn.fox_h_bivariate(coeffs, args[0], args[1], full_output=True)
    except (ContourError, ConvergenceError) as exc:
        logger.error(f"{label}: {exc}")
        raise type(exc)(f"{label}: {exc}") from exc
    return diag


def require_protocol(relay: RelayConfig, af: bool) -> None:
    if relay.is_af != af:
        wanted = "fixed-gain AF" if af else "DF"
        raise ValueError(f"expected a {wanted} relay, got {relay.protocol.value}")


def _check_gamma(gamma: float, strict: bool = True) -> None:
    if (strict and not gamma > 0) or (not strict and not gamma >= 0):
        raise ValueError(f"gamma must be {'positive' if strict else 'nonnegative'}, got {gamma}")


def joint_term() -> GammaTerm:
    """``Γ(t - s - 1)``, the coupling of the hop integrals under fixed-gain AF."""
    return GammaTerm.num(-1.0, -1.0, joint_slope=1.0)


def rf_t_terms(rf: RfLinkFit, shift: float = -1.0):
    """``Γ(t + shape + shift)`` for every RF shape."""
    return [GammaTerm.num(sh + shift, 1.0) for sh in rf.shapes]


def branch_cdf_terms(branch: MixtureBranch):
    """s-kernel of the optical CDF component, ``Γ(o + εs) Γ(-εs) / Γ(1 - εs)``."""
    return [
        GammaTerm.num(branch.offset, branch.slope),
        GammaTerm.num(0.0, -branch.slope),
        GammaTerm.den(1.0, -branch.slope),
    ]


def af_cdf_coeffs(rf: RfLinkFit, branch: MixtureBranch) -> HCoeffs:
    return HCoeffs.bivariate(
        s_terms=branch_cdf_terms(branch) + [GammaTerm.num(1.0, 1.0)],
        t_terms=rf_t_terms(rf) + [GammaTerm.den(0.0, 1.0)],
        joint_terms=[joint_term()],
    )


def af_pdf_coeffs(rf: RfLinkFit, branch: MixtureBranch) -> HCoeffs:
    return HCoeffs.bivariate(
        s_terms=[GammaTerm.num(branch.offset, branch.slope), GammaTerm.num(0.0, 1.0)],
        t_terms=rf_t_terms(rf) + [GammaTerm.den(-1.0, 1.0)],
        joint_terms=[joint_term()],
    )


def af_cdf(
    rf: RfLinkFit, uw: EggParams, relay: RelayConfig, gamma: float, full_output: bool = False
):
    """CDF of the fixed-gain AF end-to-end SNR.

    Parameters
    ----------
    rf : RfLinkFit
        Fitted RF hop.
    uw : EggParams
        Optical hop.
    relay : RelayConfig
        Fixed-gain AF relay.
    gamma : float
        Positive SNR level (linear).
    full_output : bool
        Return an :class:`Evaluation` with one record per term instead of the value.

    Returns
    -------
    float or Evaluation
    """
    require_protocol(relay, af=True)
    _check_gamma(gamma)
    f1, f1_diag = rf_link.snr1_cdf(rf, gamma, full_output=True)
    total, terms = f1, [f1_diag]
    for branch in uwoc_link.mixture_branches(uw):
        pre = branch.weight * branch.slope * rf.xi * gamma / rf.gamma_norm
        diag = evaluate_term(
            f"af_cdf[{branch.name}]",
            af_cdf_coeffs(rf, branch),
            relay.gain_const / branch.scale,
            rf.xi * gamma,
        ).relabel(f"af_cdf[{branch.name}]", pre)
        logger.debug(f"{diag.label} = {diag.value:.6e}")
        total += diag.value
        terms.append(diag)
    value, clamped = clamp_probability(total, "af_cdf")
    return Evaluation(value, tuple(terms), clamped) if full_output else value


def af_pdf(
    rf: RfLinkFit, uw: EggParams, relay: RelayConfig, gamma: float, full_output: bool = False
):
    """Density of the fixed-gain AF end-to-end SNR."""
    require_protocol(relay, af=True)
    _check_gamma(gamma)
    total, terms = 0.0, []
    for branch in uwoc_link.mixture_branches(uw):
        pre = branch.weight * rf.xi / rf.gamma_norm
        diag = evaluate_term(
            f"af_pdf[{branch.name}]",
            af_pdf_coeffs(rf, branch),
            relay.gain_const / branch.scale,
            rf.xi * gamma,
        ).relabel(f"af_pdf[{branch.name}]", pre)
        total += diag.value
        terms.append(diag)
    value, clamped = clamp_nonnegative(total, "af_pdf", sum(abs(d.value) for d in terms))
    return Evaluation(value, tuple(terms), clamped) if full_output else value


def df_cdf(rf: RfLinkFit, uw: EggParams, gamma: float, full_output: bool = False):
    """``F1 + F2 - F1·F2`` for the DF end-to-end SNR."""
    _check_gamma(gamma, strict=False)
    if gamma == 0:
        return Evaluation(0.0) if full_output else 0.0
    f1, diag = rf_link.snr1_cdf(rf, gamma, full_output=True)
    f2 = uwoc_link.snr2_cdf(uw, gamma)
    value, clamped = clamp_probability(f1 + f2 - f1 * f2, "df_cdf")
    return Evaluation(value, (diag,), clamped) if full_output else value


def df_pdf(rf: RfLinkFit, uw: EggParams, gamma: float) -> float:
    """``f1 + f2 - f1·F2 - f2·F1`` for the DF end-to-end SNR."""
    _check_gamma(gamma)
    f1, f2 = rf_link.snr1_pdf(rf, gamma), uwoc_link.snr2_pdf(uw, gamma)
    big_f1, big_f2 = rf_link.snr1_cdf(rf, gamma), uwoc_link.snr2_cdf(uw, gamma)
    return max(f1 * (1 - big_f2) + f2 * (1 - big_f1), 0.0)
