"""Outage probability, average bit-error rate and average capacity of the two-hop link.

Exact values come from the Mellin-Barnes forms of :mod:`ris_uwoc_perf.e2e_stats`,
asymptotic values from the leading residues of the same integrands. The asymptotic OP is
a sum ``Σ coef·γ_th^exponent`` and the asymptotic ABER averages each term against the
modulation kernel, so both share :func:`asymptotic_terms`.
"""
import enum
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from scipy import special

from . import e2e_stats, rf_link, specfn, uwoc_link
from .e2e_stats import RelayConfig, evaluate_term
from .modulation import BPSK, ModulationParams
from .rf_link import RfLinkFit
from .specfn import GammaTerm, HCoeffs
from .uwoc_link import Detection, EggParams

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)


class Metric(enum.Enum):
    OP = "op"
    ABER = "aber"
    ACC = "acc"


class Method(enum.Enum):
    EXACT = "exact"
    ASYMPTOTIC = "asymptotic"
    MONTE_CARLO = "mc"


@dataclass(frozen=True)
class MetricResult:
    """A metric value with its provenance.

    Attributes
    ----------
    value : float
    method : Method
    diagnostics : tuple of Diagnostics
        One record per Mellin-Barnes term (empty for closed forms and MC).
    mc_std_err : float, optional
        Standard error of a Monte-Carlo estimate; set iff ``method`` is MONTE_CARLO.
    clamped : bool
        True when the value was pulled back into its admissible range.
    """

    value: float
    method: Method
    diagnostics: Tuple[specfn.Diagnostics, ...] = ()
    mc_std_err: Optional[float] = None
    clamped: bool = False

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if (self.method is Method.MONTE_CARLO) != (self.mc_std_err is not None):
            raise ValueError("mc_std_err is required for, and only for, Monte-Carlo results")

    @property
    def converged(self) -> bool:
        return all(d.converged for d in self.diagnostics)


@dataclass(frozen=True)
class AsymptoticTerm:
    """``coefficient · γ^exponent``, one term of a high-SNR expansion."""

    name: str
    coefficient: float
    exponent: float

    def at(self, gamma: float) -> float:
        return self.coefficient * gamma**self.exponent

    def averaged(self, mod: ModulationParams) -> float:
        """Term averaged against the conditional bit-error rate."""
        return (
            self.coefficient
            * special.gamma(mod.p + self.exponent)
            / (2 * special.gamma(mod.p) * mod.q**self.exponent)
        )


def _tau(uw: EggParams, detection) -> float:
    return Detection(detection).tau if detection is not None else uw.detection.tau


def _exact(evaluation: e2e_stats.Evaluation) -> MetricResult:
    return MetricResult(
        evaluation.value, Method.EXACT, evaluation.terms, clamped=evaluation.clamped
    )


# -- asymptotic expansions -------------------------------------------------------------


def _rf_terms(shapes, xi: float) -> List[AsymptoticTerm]:
    coef, t = rf_link.leading_coefficient(shapes)
    return [AsymptoticTerm("rf", coef * xi**t, t)]


def _af_uwoc_terms(shapes, rf: RfLinkFit, uw: EggParams, gain: float) -> List[AsymptoticTerm]:
    """Leading residues of the two UWOC-dependent AF terms in ``z = CΞγ / scale``."""
    norm = specfn.gamma_product(shapes)
    terms = []
    for branch in uwoc_link.mixture_branches(uw):
        z_scale = gain * rf.xi / branch.scale
        # pole of Γ(offset + slope·s) at s = -offset/slope
        alpha = branch.offset / branch.slope
        lead = branch.weight * specfn.gamma_product([s - alpha for s in shapes])
        lead /= norm * branch.offset
        terms.append(AsymptoticTerm(f"{branch.name}:optical", lead * z_scale**alpha, alpha))
        for i, s_i in enumerate(shapes):
            rest = [s_j - s_i for j, s_j in enumerate(shapes) if j != i]
            coef = branch.weight * specfn.gamma_product(
                [branch.offset - branch.slope * s_i] + rest
            ) / (s_i * norm)
            terms.append(AsymptoticTerm(f"{branch.name}:rf{i}", coef * z_scale**s_i, s_i))
    return terms


def _singular_arguments(uw: EggParams, af: bool):
    def arguments(shapes):
        args = [abs(shapes[0] - shapes[1])] if len(shapes) == 2 else []
        if af:
            args.extend(
                s_j - s_i
                for i, s_i in enumerate(shapes)
                for j, s_j in enumerate(shapes)
                if i != j
            )
            for branch in uwoc_link.mixture_branches(uw):
                alpha = branch.offset / branch.slope
                args.extend(s - alpha for s in shapes)
                args.extend(branch.offset - branch.slope * s for s in shapes)
        return args

    return arguments


def asymptotic_terms(
    rf: RfLinkFit, uw: EggParams, relay: RelayConfig, include_product: bool = False
) -> List[AsymptoticTerm]:
    """Named terms of the high-SNR outage probability ``Σ coef·γ_th^exponent``.

    AF: the RF-hop term plus, per optical component, the optical-exponent term and one
    term per RF shape. DF: the RF-hop term plus the two optical CDF terms; with
    ``include_product`` the cross terms of ``-F1·F2`` are appended.

    Gamma arguments within 1e-3 of a pole are cleared by perturbing the RF shapes.
    """
    label = "af asymptotic" if relay.is_af else "df asymptotic"
    shapes = specfn.regularize(rf.shapes, _singular_arguments(uw, relay.is_af), label)

    terms = _rf_terms(shapes, rf.xi)
    if relay.is_af:
        terms += _af_uwoc_terms(shapes, rf, uw, relay.gain_const)
        return terms

    optical = [
        AsymptoticTerm(f"{name}:optical", coef, alpha)
        for name, coef, alpha in uwoc_link.asymptotic_terms(uw)
    ]
    terms += optical
    if include_product:
        rf_term = terms[0]
        terms += [
            AsymptoticTerm(
                f"rf*{o.name}", -rf_term.coefficient * o.coefficient, rf_term.exponent + o.exponent
            )
            for o in optical
        ]
    return terms


def diversity_order(rf: RfLinkFit, uw: EggParams, protocol) -> float:
    """High-SNR decay exponent: AF ``min(shapes, 2/r, 2ac/r)``, DF ``min(shapes, 1/r, ac/r)``."""
    protocol = e2e_stats.Protocol.parse(protocol)
    factor = 2.0 if protocol is e2e_stats.Protocol.FIXED_GAIN_AF else 1.0
    return min(*rf.shapes, factor / uw.r, factor * uw.a * uw.c / uw.r)


# -- fixed-gain AF -----------------------------------------------------------------------


def op_af(rf: RfLinkFit, uw: EggParams, relay: RelayConfig, gamma_th: float) -> MetricResult:
    return _exact(e2e_stats.af_cdf(rf, uw, relay, gamma_th, full_output=True))


def _af_fox_terms(rf: RfLinkFit, uw: EggParams, relay: RelayConfig, gamma_th: float):
    """UWOC-dependent AF terms as ``H^{3,1}_{1,4}`` functions of ``CΞγ/scale``."""
    total, diags = 0.0, []
    for branch in uwoc_link.mixture_branches(uw):
        coeffs = HCoeffs(
            terms=e2e_stats.branch_cdf_terms(branch) + e2e_stats.rf_t_terms(rf, shift=0.0)
        )
        pre = branch.weight * branch.slope / rf.gamma_norm
        label = f"op_af_asymptotic[{branch.name}]"
        diag = evaluate_term(
            label, coeffs, relay.gain_const * rf.xi * gamma_th / branch.scale
        ).relabel(label, pre)
        total += diag.value
        diags.append(diag)
    return total, tuple(diags)


def op_af_asymptotic(
    rf: RfLinkFit,
    uw: EggParams,
    relay: RelayConfig,
    gamma_th: float,
    form: str = "elementary",
) -> MetricResult:
    """High-SNR outage probability under fixed-gain AF.

    ``form="elementary"`` sums the power-law terms of :func:`asymptotic_terms`;
    ``form="fox_h"`` keeps the RF-hop power law but evaluates the two UWOC-dependent
    terms as Fox H functions (the large-``γ̄1`` form before ``μ_r`` grows).
    """
    e2e_stats.require_protocol(relay, af=True)
    if form == "fox_h":
        rf_term = _rf_terms(rf_link.leading_shapes(rf), rf.xi)[0]
        value, diags = _af_fox_terms(rf, uw, relay, gamma_th)
        return MetricResult(rf_term.at(gamma_th) + value, Method.ASYMPTOTIC, diags)
    if form != "elementary":
        raise ValueError(f"unknown asymptotic form {form!r}")
    terms = asymptotic_terms(rf, uw, relay)
    for term in terms:
        logger.debug(f"op_af_asymptotic {term.name}: {term.at(gamma_th):.6e}")
    return MetricResult(sum(t.at(gamma_th) for t in terms), Method.ASYMPTOTIC)


def af_aber_coeffs(rf: RfLinkFit, branch, mod: ModulationParams) -> HCoeffs:
    return HCoeffs.bivariate(
        s_terms=e2e_stats.branch_cdf_terms(branch) + [GammaTerm.num(1.0, 1.0)],
        t_terms=e2e_stats.rf_t_terms(rf)
        + [GammaTerm.num(mod.p + 1.0, -1.0), GammaTerm.den(0.0, 1.0)],
        joint_terms=[e2e_stats.joint_term()],
    )


def aber_af(
    rf: RfLinkFit, uw: EggParams, relay: RelayConfig, mod: ModulationParams = BPSK
) -> MetricResult:
    """ABER under fixed-gain AF: RF-hop ABER plus one bivariate term per optical component."""
    e2e_stats.require_protocol(relay, af=True)
    pe1, pe1_diag = rf_link.snr1_aber(rf, mod, full_output=True)
    total, diags = pe1, [pe1_diag]
    for branch in uwoc_link.mixture_branches(uw):
        pre = (
            branch.weight
            * branch.slope
            * rf.xi
            / (2 * special.gamma(mod.p) * rf.gamma_norm * mod.q)
        )
        label = f"aber_af[{branch.name}]"
        diag = evaluate_term(
            label, af_aber_coeffs(rf, branch, mod), relay.gain_const / branch.scale, rf.xi / mod.q
        ).relabel(label, pre)
        total += diag.value
        diags.append(diag)
    value, clamped = e2e_stats.clamp_probability(total, "aber_af", upper=0.5)
    return MetricResult(value, Method.EXACT, tuple(diags), clamped=clamped)


def aber_af_asymptotic(
    rf: RfLinkFit, uw: EggParams, relay: RelayConfig, mod: ModulationParams = BPSK
) -> MetricResult:
    e2e_stats.require_protocol(relay, af=True)
    terms = asymptotic_terms(rf, uw, relay)
    return MetricResult(sum(t.averaged(mod) for t in terms), Method.ASYMPTOTIC)


def af_acc_coeffs(rf: RfLinkFit, branch) -> HCoeffs:
    return HCoeffs.bivariate(
        s_terms=[GammaTerm.num(branch.offset, branch.slope), GammaTerm.num(0.0, 1.0)],
        t_terms=e2e_stats.rf_t_terms(rf)
        + [GammaTerm.num(-1.0, 1.0), GammaTerm.num(2.0, -1.0), GammaTerm.den(0.0, 1.0)],
        joint_terms=[e2e_stats.joint_term()],
    )


def acc_af(
    rf: RfLinkFit, uw: EggParams, relay: RelayConfig, detection=None
) -> MetricResult:
    """Average capacity in bit/s/Hz under fixed-gain AF (a lower bound for IM/DD)."""
    e2e_stats.require_protocol(relay, af=True)
    tau = _tau(uw, detection)
    total, diags = 0.0, []
    for branch in uwoc_link.mixture_branches(uw):
        pre = branch.weight * rf.xi / (2 * LOG2 * tau * rf.gamma_norm)
        label = f"acc_af[{branch.name}]"
        diag = evaluate_term(
            label, af_acc_coeffs(rf, branch), relay.gain_const / branch.scale, rf.xi / tau
        ).relabel(label, pre)
        total += diag.value
        diags.append(diag)
    value, clamped = specfn.clamp_nonnegative(total, "acc_af", sum(abs(d.value) for d in diags))
    return MetricResult(value, Method.EXACT, tuple(diags), clamped=clamped)


# -- DF ----------------------------------------------------------------------------------


def op_df(rf: RfLinkFit, uw: EggParams, gamma_th: float) -> MetricResult:
    return _exact(e2e_stats.df_cdf(rf, uw, gamma_th, full_output=True))


def op_df_asymptotic(
    rf: RfLinkFit, uw: EggParams, gamma_th: float, include_product: bool = False
) -> MetricResult:
    terms = asymptotic_terms(rf, uw, RelayConfig.df(), include_product=include_product)
    return MetricResult(sum(t.at(gamma_th) for t in terms), Method.ASYMPTOTIC)


def aber_df(rf: RfLinkFit, uw: EggParams, mod: ModulationParams = BPSK) -> MetricResult:
    """``Pe1 + Pe2 - 2·Pe1·Pe2`` (an error on exactly one hop flips the bit)."""
    pe1, d1 = rf_link.snr1_aber(rf, mod, full_output=True)
    pe2, d2 = uwoc_link.uwoc_aber(uw, mod, full_output=True)
    value, clamped = e2e_stats.clamp_probability(
        pe1 + pe2 - 2 * pe1 * pe2, "aber_df", upper=0.5
    )
    return MetricResult(value, Method.EXACT, (d1, *d2), clamped=clamped)


def aber_df_asymptotic(rf: RfLinkFit, uw: EggParams, mod: ModulationParams = BPSK) -> MetricResult:
    value = rf_link.snr1_aber_asymptotic(rf, mod) + uwoc_link.uwoc_aber_asymptotic(uw, mod)
    return MetricResult(value, Method.ASYMPTOTIC)


def _log_kernel(shift: float, joint: bool = False):
    """``Γ(2-u)Γ(u-1)²/Γ(u)`` with ``u = t + shift`` (``u = s + t + shift`` when joint)."""
    j = 1.0 if joint else 0.0
    return [
        GammaTerm.num(2.0 - shift, -1.0, -j),
        GammaTerm.num(shift - 1.0, 1.0, j),
        GammaTerm.num(shift - 1.0, 1.0, j),
        GammaTerm.den(shift, 1.0, j),
    ]


def df_acc_coeffs(rf: RfLinkFit, uw: EggParams):
    """Mellin-Barnes instances of the four DF capacity terms, keyed by name."""
    instances = {"I_C1": HCoeffs(terms=e2e_stats.rf_t_terms(rf) + _log_kernel(0.0))}
    for branch in uwoc_link.mixture_branches(uw):
        instances[f"I_C2[{branch.name}]"] = HCoeffs(
            terms=[
                GammaTerm.num(branch.offset, branch.slope),
                GammaTerm.num(0.0, 1.0),
                GammaTerm.num(0.0, 1.0),
                GammaTerm.num(1.0, -1.0),
                GammaTerm.den(1.0, 1.0),
            ]
        )
        instances[f"I_C3[{branch.name}]"] = HCoeffs.bivariate(
            s_terms=e2e_stats.branch_cdf_terms(branch),
            t_terms=e2e_stats.rf_t_terms(rf),
            joint_terms=_log_kernel(0.0, joint=True),
        )
        instances[f"I_C4[{branch.name}]"] = HCoeffs.bivariate(
            s_terms=[GammaTerm.num(branch.offset, branch.slope)],
            t_terms=e2e_stats.rf_t_terms(rf, shift=0.0)
            + [GammaTerm.num(0.0, -1.0), GammaTerm.den(1.0, -1.0)],
            joint_terms=_log_kernel(1.0, joint=True),
        )
    return instances


def acc_df(rf: RfLinkFit, uw: EggParams, detection=None) -> MetricResult:
    """Average capacity in bit/s/Hz under DF, ``I_C1 + I_C2 - I_C3 - I_C4``.

    ``I_C1`` and ``I_C2`` average ``log2(1+τγ)/2`` over each hop, ``I_C3`` and ``I_C4``
    remove the mass where the other hop is the weaker one.
    """
    tau = _tau(uw, detection)
    instances = df_acc_coeffs(rf, uw)
    norm = rf.gamma_norm
    total, diags = 0.0, []

    diag = evaluate_term("I_C1", instances["I_C1"], rf.xi / tau).relabel(
        "I_C1", rf.xi / (2 * LOG2 * tau * norm)
    )
    total += diag.value
    diags.append(diag)
    for branch in uwoc_link.mixture_branches(uw):
        x = 1 / (branch.scale * tau)
        for name, sign, pre, args in (
            ("I_C2", 1.0, branch.weight / (2 * LOG2), (x,)),
            (
                "I_C3",
                -1.0,
                branch.weight * branch.slope * rf.xi / (2 * LOG2 * tau * norm),
                (x, rf.xi / tau),
            ),
            ("I_C4", -1.0, branch.weight / (2 * LOG2 * norm), (x, rf.xi / tau)),
        ):
            label = f"{name}[{branch.name}]"
            diag = evaluate_term(label, instances[label], *args).relabel(label, pre)
            logger.debug(f"{label} = {diag.value:.6e}")
            total += sign * diag.value
            diags.append(diag)
    value, clamped = specfn.clamp_nonnegative(total, "acc_df", sum(abs(d.value) for d in diags))
    return MetricResult(value, Method.EXACT, tuple(diags), clamped=clamped)
