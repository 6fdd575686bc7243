"""Numerical Mellin-Barnes evaluation of Meijer G and Fox H functions.

An instance is a list of gamma factors ``Γ(offset + slope·s)`` placed in the numerator
or the denominator of the integrand

    (1 / 2πi) ∫ Π Γ(numerator) / Π Γ(denominator) · x^(-s) ds

taken along the vertical line ``Re(s) = c``. Numerator factors with a positive slope
carry the left pole family, those with a negative slope the right one, and ``c`` must
keep every numerator argument in the right half plane. The bivariate form adds a second
variable ``t`` with argument ``y`` and joint factors
``Γ(offset + slope·s + joint_slope·t)``.

The integrand is evaluated in log space (``scipy.special.loggamma`` keeps the branch
continuous), the contour is picked on a grid over the feasible region and the line
integral is computed with adaptive Gauss-Kronrod quadrature (``scipy.integrate.quad``)
on a truncated imaginary range that is doubled until the added strips are negligible.
"""
import enum
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize, special

from .exceptions import ContourError, ConvergenceError, GammaPoleError, ProbabilityRangeError

logger = logging.getLogger(__name__)

POLE_TOLERANCE = 1e-14
MIN_MARGIN = 1e-6
PROBABILITY_SLACK = 1e-5
UNIVARIATE_TOLERANCE = 1e-8
BIVARIATE_TOLERANCE = 1e-6

_GRID_POINTS = 41
_WINDOW = 4.0
_FAR = 1e3
_PROBE_HEIGHTS = np.array([0.0, 0.25, 0.5, 1.0, 2.0])
_SCAN = np.concatenate((np.linspace(0.0, 16.0, 321), np.geomspace(16.5, 16384.0, 241)))
_MIN_HEIGHT = 2.0
_ABS_SCALE = 1e-2
_LIMIT_1D = 2000
_LIMIT_2D = 400


class Position(enum.Enum):
    NUMERATOR_LEFT = "numerator-left"
    NUMERATOR_RIGHT = "numerator-right"
    DENOMINATOR = "denominator"


@dataclass(frozen=True)
class GammaTerm:
    """One factor ``Γ(offset + slope·s + joint_slope·t)`` of a Mellin-Barnes integrand.

    For the t-only list of a bivariate instance ``slope`` multiplies ``t``.
    """

    offset: float
    slope: float
    position: Position
    joint_slope: float = 0.0

    def __post_init__(self):
        if self.is_numerator and self.slope == 0.0 and self.joint_slope == 0.0:
            raise ValueError("numerator gamma terms need a nonzero slope")

    @property
    def is_numerator(self) -> bool:
        return self.position is not Position.DENOMINATOR

    @classmethod
    def num(cls, offset: float, slope: float = 1.0, joint_slope: float = 0.0) -> "GammaTerm":
        lead = slope if slope != 0.0 else joint_slope
        position = Position.NUMERATOR_LEFT if lead > 0 else Position.NUMERATOR_RIGHT
        return cls(float(offset), float(slope), position, float(joint_slope))

    @classmethod
    def den(cls, offset: float, slope: float = 1.0, joint_slope: float = 0.0) -> "GammaTerm":
        return cls(float(offset), float(slope), Position.DENOMINATOR, float(joint_slope))


@dataclass(frozen=True)
class HCoeffs:
    """Gamma-term lists of a univariate or bivariate Fox H instance.

    Attributes
    ----------
    terms : tuple of GammaTerm
        Factors in ``s`` (the only list of a univariate instance).
    t_terms : tuple of GammaTerm
        Factors in ``t`` (bivariate only).
    joint_terms : tuple of GammaTerm
        Factors coupling ``s`` and ``t`` (bivariate only).
    contour_abscissa : tuple of float, optional
        Real part of each contour; selected automatically when omitted.
    truncation_height : float, optional
        Starting imaginary cut-off per axis; found from the integrand decay when omitted.
    quad_tolerance : float, optional
        Relative tolerance, 1e-8 (univariate) or 1e-6 (bivariate) when omitted.
    contour_rule : {"saddle", "midpoint"}
        ``saddle`` keeps the feasible grid point with the smallest integrand peak,
        ``midpoint`` the point farthest from every pole hyperplane.
    max_doublings : int
        Number of times the truncation height may be doubled.
    """

    terms: Tuple[GammaTerm, ...] = ()
    t_terms: Tuple[GammaTerm, ...] = ()
    joint_terms: Tuple[GammaTerm, ...] = ()
    contour_abscissa: Optional[Tuple[float, ...]] = None
    truncation_height: Optional[float] = None
    quad_tolerance: Optional[float] = None
    contour_rule: str = "saddle"
    max_doublings: int = 6

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "t_terms", tuple(self.t_terms))
        object.__setattr__(self, "joint_terms", tuple(self.joint_terms))
        if not any(t.is_numerator for t in self.terms + self.t_terms + self.joint_terms):
            raise ValueError("an H instance needs at least one numerator gamma term")
        if self.contour_rule not in ("saddle", "midpoint"):
            raise ValueError(f"unknown contour rule {self.contour_rule!r}")
        if self.truncation_height is not None and self.truncation_height <= 0:
            raise ValueError("truncation_height must be positive")
        if self.quad_tolerance is not None and self.quad_tolerance <= 0:
            raise ValueError("quad_tolerance must be positive")
        if self.contour_abscissa is not None:
            abscissa = tuple(float(c) for c in np.atleast_1d(self.contour_abscissa))
            if len(abscissa) != self.dims:
                raise ValueError(f"expected {self.dims} contour abscissa(s), got {len(abscissa)}")
            object.__setattr__(self, "contour_abscissa", abscissa)

    @property
    def dims(self) -> int:
        return 2 if (self.t_terms or self.joint_terms) else 1

    @property
    def tolerance(self) -> float:
        if self.quad_tolerance is not None:
            return self.quad_tolerance
        return UNIVARIATE_TOLERANCE if self.dims == 1 else BIVARIATE_TOLERANCE

    @property
    def is_meijer(self) -> bool:
        return self.dims == 1 and all(abs(abs(t.slope) - 1.0) < 1e-15 for t in self.terms)

    @classmethod
    def from_fox(
        cls,
        m: int,
        n: int,
        a: Sequence[Tuple[float, float]],
        b: Sequence[Tuple[float, float]],
        **options,
    ) -> "HCoeffs":
        """Build ``H^{m,n}_{p,q}[x | (a_j, A_j); (b_j, B_j)]`` from its parameter pairs."""
        if not 0 <= m <= len(b) or not 0 <= n <= len(a):
            raise ValueError(f"invalid orders m={m}, n={n} for p={len(a)}, q={len(b)}")
        terms = []
        for j, (bj, Bj) in enumerate(b):
            terms.append(GammaTerm.num(bj, Bj) if j < m else GammaTerm.den(1 - bj, -Bj))
        for j, (aj, Aj) in enumerate(a):
            terms.append(GammaTerm.num(1 - aj, -Aj) if j < n else GammaTerm.den(aj, Aj))
        return cls(terms=tuple(terms), **options)

    @classmethod
    def from_meijer(
        cls, m: int, n: int, a: Sequence[float], b: Sequence[float], **options
    ) -> "HCoeffs":
        """Build ``G^{m,n}_{p,q}[x | a; b]``."""
        return cls.from_fox(m, n, [(v, 1.0) for v in a], [(v, 1.0) for v in b], **options)

    @classmethod
    def bivariate(
        cls,
        s_terms: Iterable[GammaTerm],
        t_terms: Iterable[GammaTerm],
        joint_terms: Iterable[GammaTerm] = (),
        **options,
    ) -> "HCoeffs":
        t_terms, joint_terms = tuple(t_terms), tuple(joint_terms)
        if not t_terms and not joint_terms:
            raise ValueError("a bivariate instance needs t or joint terms")
        return cls(terms=tuple(s_terms), t_terms=t_terms, joint_terms=joint_terms, **options)


@dataclass(frozen=True)
class Diagnostics:
    """Convergence record of one Mellin-Barnes evaluation."""

    value: float
    abserr: float
    converged: bool
    abscissa: Tuple[float, ...]
    height: Tuple[float, ...]
    imag_residue: Optional[float] = None
    label: str = ""

    def relabel(self, label: str, scale: float = 1.0) -> "Diagnostics":
        return Diagnostics(
            self.value * scale,
            abs(self.abserr * scale),
            self.converged,
            self.abscissa,
            self.height,
            self.imag_residue,
            label,
        )


def clamp_probability(value: float, label: str, upper: float = 1.0) -> Tuple[float, bool]:
    """Pull ``value`` back into ``[0, upper]`` when it leaves it by quadrature noise only.

    Returns
    -------
    (float, bool)
        The value in range and whether it had to be moved.

    Raises
    ------
    ProbabilityRangeError
        If the excursion exceeds ``PROBABILITY_SLACK``.
    """
    if 0.0 <= value <= upper:
        return value, False
    if -PROBABILITY_SLACK <= value < 0.0 or upper < value <= upper + PROBABILITY_SLACK:
        clamped = min(max(value, 0.0), upper)
        logger.warning(f"{label}: value {value:.3e} clamped to {clamped:g}")
        return clamped, True
    logger.error(f"{label}: value {value:.6e} outside [0, {upper:g}]")
    raise ProbabilityRangeError(f"{label}: value {value:.6e} outside [0, {upper:g}]")


def clamp_nonnegative(value: float, label: str, scale: float = 0.0) -> Tuple[float, bool]:
    """Zero a slightly negative sum of Mellin-Barnes terms.

    The slack is ``PROBABILITY_SLACK`` relative to ``scale`` (the sum of the absolute term
    values) and never smaller than ``PROBABILITY_SLACK`` itself.

    Raises
    ------
    ProbabilityRangeError
        If ``value`` is further below zero than the slack.
    """
    if value >= 0.0:
        return value, False
    slack = PROBABILITY_SLACK * max(abs(scale), 1.0)
    if value >= -slack:
        logger.warning(f"{label}: negative value {value:.3e} clamped to 0")
        return 0.0, True
    logger.error(f"{label}: value {value:.6e} below zero beyond slack {slack:.1e}")
    raise ProbabilityRangeError(f"{label}: value {value:.6e} below zero beyond slack {slack:.1e}")


def _distance_to_pole(z: complex) -> float:
    n = round(z.real)
    if n > 0:
        return math.inf
    return abs(z - n)


def log_gamma_complex(z: complex) -> complex:
    """Principal branch of ``log Γ(z)``.

    Raises
    ------
    GammaPoleError
        If ``z`` lies within 1e-14 of a non-positive integer.
    """
    z = complex(z)
    if _distance_to_pole(z) <= POLE_TOLERANCE:
        logger.error(f"log-gamma requested at pole {z}")
        raise GammaPoleError(f"Γ has a pole at {z}")
    return complex(special.loggamma(z))


def gamma_product(numerator: Iterable[float], denominator: Iterable[float] = ()) -> float:
    """``Π Γ(numerator) / Π Γ(denominator)`` for real arguments, accumulated in log space."""
    log_abs, sign = 0.0, 1.0
    for x in numerator:
        if _distance_to_pole(complex(x)) <= POLE_TOLERANCE:
            raise GammaPoleError(f"Γ has a pole at {x}")
        log_abs += special.gammaln(x)
        sign *= special.gammasgn(x)
    for x in denominator:
        if _distance_to_pole(complex(x)) <= POLE_TOLERANCE:
            return 0.0
        log_abs -= special.gammaln(x)
        sign *= special.gammasgn(x)
    return float(sign * math.exp(log_abs))


def near_pole(x: float, tolerance: float = 1e-3) -> bool:
    """True when ``x`` is within ``tolerance`` of a non-positive integer."""
    return _distance_to_pole(complex(x)) <= tolerance


class _Kernel:
    """Compiled integrand of an instance at fixed arguments."""

    def __init__(self, coeffs: HCoeffs, args: Sequence[float]) -> None:
        d = coeffs.dims
        rows = []
        for term in coeffs.terms:
            rows.append((term, (term.slope, 0.0) if d == 2 else (term.slope,)))
        for term in coeffs.t_terms:
            rows.append((term, (0.0, term.slope)))
        for term in coeffs.joint_terms:
            rows.append((term, (term.slope, term.joint_slope)))
        num = [(t.offset, s) for t, s in rows if t.is_numerator]
        den = [(t.offset, s) for t, s in rows if not t.is_numerator]
        self.dims = d
        self.num_offsets = np.array([o for o, _ in num], dtype=float)
        self.num_slopes = np.array([s for _, s in num], dtype=float).reshape(len(num), d)
        self.den_offsets = np.array([o for o, _ in den], dtype=float)
        self.den_slopes = np.array([s for _, s in den], dtype=float).reshape(len(den), d)
        self.log_args = np.log(np.asarray(args, dtype=float))

    def log_value(self, points: np.ndarray) -> np.ndarray:
        """Log of the integrand at complex points of shape ``(..., dims)``."""
        out = special.loggamma(self.num_offsets + points @ self.num_slopes.T).sum(axis=-1)
        if self.den_offsets.size:
            out = out - special.loggamma(self.den_offsets + points @ self.den_slopes.T).sum(
                axis=-1
            )
        return out - points @ self.log_args

    def margins(self, points: np.ndarray) -> np.ndarray:
        """Smallest distance of real points ``(P, dims)`` to a numerator pole hyperplane."""
        norms = np.linalg.norm(self.num_slopes, axis=1)
        return ((self.num_offsets + points @ self.num_slopes.T) / norms).min(axis=-1)


def _box(kernel: _Kernel) -> list:
    """Bounding box of the feasible abscissas, one ``(lo, hi)`` pair per variable.

    Each side comes from a linear program over the numerator positivity constraints;
    an open side is closed ``_WINDOW`` away from the other one.
    """
    norms = np.linalg.norm(kernel.num_slopes, axis=1)
    a_ub = -kernel.num_slopes
    b_ub = kernel.num_offsets - MIN_MARGIN * norms
    bounds = [(-_FAR, _FAR)] * kernel.dims
    box = []
    for i in range(kernel.dims):
        sides = []
        for sign in (1.0, -1.0):
            cost = np.zeros(kernel.dims)
            cost[i] = sign
            res = optimize.linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
            if res.status == 2:
                raise ContourError("no vertical contour separates the pole families")
            sides.append(sign * res.fun if res.status == 0 else sign * -_FAR)
        lo, hi = sides
        open_lo, open_hi = lo <= -_FAR + 1.0, hi >= _FAR - 1.0
        if open_lo and open_hi:
            lo, hi = -_WINDOW / 2, _WINDOW / 2
        elif open_hi:
            hi = lo + _WINDOW
        elif open_lo:
            lo = hi - _WINDOW
        if hi - lo <= 2 * MIN_MARGIN:
            raise ContourError(f"empty contour strip ({lo:.6g}, {hi:.6g}) for variable {i}")
        box.append((lo, hi))
    return box


def _select_contour(kernel: _Kernel, rule: str) -> np.ndarray:
    axes = [np.linspace(lo, hi, _GRID_POINTS + 2)[1:-1] for lo, hi in _box(kernel)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, kernel.dims)
    margins = kernel.margins(grid)
    best = margins.max()
    if not best > MIN_MARGIN:
        raise ContourError("no vertical contour separates the pole families")
    if rule == "midpoint":
        return grid[np.argmax(margins)]

    candidates = grid[margins >= 0.1 * best]
    directions = np.eye(kernel.dims)
    if kernel.dims == 2:
        directions = np.vstack((directions, np.ones((1, 2))))
    probes = (
        candidates[:, None, None, :]
        + 1j * _PROBE_HEIGHTS[None, :, None, None] * directions[None, None, :, :]
    )
    peak = kernel.log_value(probes).real.reshape(len(candidates), -1)
    peak = np.where(np.isfinite(peak), peak, -np.inf).max(axis=1)
    peak = np.where(np.isfinite(peak), peak, np.inf)
    return candidates[np.argmin(peak)]


def _scan_heights(kernel: _Kernel, c: np.ndarray, tol: float, start: Optional[float]):
    profiles = []
    for i in range(kernel.dims):
        points = c + 1j * np.outer(_SCAN, np.eye(kernel.dims)[i])
        profile = kernel.log_value(points).real
        profiles.append(np.where(np.isfinite(profile), profile, -np.inf))
    ref = float(max(p.max() for p in profiles))
    if start is not None:
        return (float(start),) * kernel.dims, ref

    threshold = ref + math.log(tol * 1e-3)
    heights = []
    for i, profile in enumerate(profiles):
        above = np.nonzero(profile > threshold)[0]
        idx = int(above[-1]) + 1 if above.size else 1
        if idx >= len(_SCAN):
            logger.warning(f"integrand along axis {i} has not decayed at height {_SCAN[-1]:g}")
            idx = len(_SCAN) - 1
        heights.append(max(float(_SCAN[idx]), _MIN_HEIGHT))
    return tuple(heights), ref


def _quad(func, a: float, b: float, epsabs: float, epsrel: float, limit: int):
    out = integrate.quad(func, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)
    return out[0], out[1], len(out) < 4


def _integrate_1d(kernel, c, heights, ref, tol, max_doublings):
    c0 = complex(c[0])
    eps_abs = tol * _ABS_SCALE

    def value(y):
        return np.exp(kernel.log_value(np.array([c0 + 1j * y])) - ref)

    def re(y):
        return float(value(y).real)

    def im(y):
        return float(value(y).imag)

    T = hi = heights[0]
    total, err, ok = _quad(re, -T, T, eps_abs, tol, _LIMIT_1D)
    imag, _, _ = _quad(im, -T, T, eps_abs, tol, _LIMIT_1D)
    for k in range(max_doublings):
        lo, hi = T * 2**k, T * 2 ** (k + 1)
        left, e1, ok1 = _quad(re, -hi, -lo, eps_abs, tol, _LIMIT_1D)
        right, e2, ok2 = _quad(re, lo, hi, eps_abs, tol, _LIMIT_1D)
        tail = left + right
        total, err, ok = total + tail, err + e1 + e2, ok and ok1 and ok2
        if abs(tail) <= tol * abs(total) + eps_abs:
            return total, err, ok, imag, (hi,)
    raise ConvergenceError(
        f"truncated integral did not settle after {max_doublings} doublings (T={hi:g})"
    )


def _integrate_2d(kernel, c, heights, ref, tol, max_doublings):
    cs, ct = float(c[0]), float(c[1])
    eps_abs = tol * _ABS_SCALE
    inner_abs, inner_rel = eps_abs / 4, tol / 4

    def re(ys, yt):
        point = np.array([cs + 1j * ys, ct + 1j * yt])
        return float(np.exp(kernel.log_value(point) - ref).real)

    def region(t_lo, t_hi, s_ranges):
        flags = [True]

        def inner(yt):
            acc = 0.0
            for s_lo, s_hi in s_ranges:
                v, _, ok = _quad(
                    lambda ys: re(ys, yt), s_lo, s_hi, inner_abs, inner_rel, _LIMIT_2D
                )
                acc += v
                flags[0] = flags[0] and ok
            return acc

        v, e, ok = _quad(inner, t_lo, t_hi, eps_abs, tol, _LIMIT_2D)
        return v, e, ok and flags[0]

    Ts, Tt = heights
    total, err, ok = region(0.0, Tt, [(-Ts, Ts)])
    for k in range(max_doublings):
        s0, s1 = Ts * 2**k, Ts * 2 ** (k + 1)
        t0, t1 = Tt * 2**k, Tt * 2 ** (k + 1)
        a, ea, oka = region(0.0, t0, [(-s1, -s0), (s0, s1)])
        b, eb, okb = region(t0, t1, [(-s1, s1)])
        tail = a + b
        total, err, ok = total + tail, err + ea + eb, ok and oka and okb
        if abs(tail) <= tol * abs(total) + eps_abs:
            return total, err, ok, None, (s1, t1)
    raise ConvergenceError(
        f"truncated double integral did not settle after {max_doublings} doublings"
    )


def _evaluate(coeffs: HCoeffs, args: Sequence[float], label: str) -> Diagnostics:
    if any(not (x > 0 and math.isfinite(x)) for x in args):
        raise ValueError(f"arguments must be positive and finite, got {tuple(args)}")
    kernel = _Kernel(coeffs, args)
    if coeffs.contour_abscissa is not None:
        c = np.array(coeffs.contour_abscissa)
        if kernel.margins(c[None, :])[0] <= MIN_MARGIN:
            logger.error(f"{label}: supplied contour {tuple(c)} touches a pole family")
            raise ContourError(f"contour {tuple(c)} does not separate the pole families")
    else:
        c = _select_contour(kernel, coeffs.contour_rule)

    tol = coeffs.tolerance
    heights, ref = _scan_heights(kernel, c, tol, coeffs.truncation_height)
    logger.debug(f"{label}: contour {tuple(np.round(c, 6))}, start heights {heights}")

    integrate_fn = _integrate_1d if kernel.dims == 1 else _integrate_2d
    try:
        raw, err, ok, imag, heights = integrate_fn(
            kernel, c, heights, ref, tol, coeffs.max_doublings
        )
    except ConvergenceError as exc:
        logger.error(f"{label}: {exc}")
        raise

    scale = math.exp(ref) / (2 * math.pi) ** kernel.dims
    if kernel.dims == 2:
        # conjugate symmetry folds the t-range onto its upper half
        scale *= 2.0
    value = raw * scale
    imag_residue = None if imag is None else abs(imag * scale)
    if imag_residue is not None and imag_residue > 1e-6 * max(abs(value), 1e-300):
        logger.debug(f"{label}: imaginary residue {imag_residue:.3e} for value {value:.6e}")
    return Diagnostics(
        value=float(value),
        abserr=float(abs(err * scale)),
        converged=bool(ok),
        abscissa=tuple(float(v) for v in c),
        height=tuple(float(h) for h in heights),
        imag_residue=imag_residue,
        label=label,
    )


def meijer_g(coeffs: HCoeffs, x: float, full_output: bool = False):
    """Meijer G function of the instance ``coeffs`` at ``x > 0``.

    Parameters
    ----------
    coeffs : HCoeffs
        Univariate instance whose slopes are all ±1.
    x : float
        Positive argument.
    full_output : bool
        Also return the :class:`Diagnostics` record.

    Returns
    -------
    float or (float, Diagnostics)

    Raises
    ------
    ContourError
        If no contour separates the pole families.
    ConvergenceError
        If the truncated integral does not settle.
    """
    if not coeffs.is_meijer:
        raise ValueError("a Meijer G instance must be univariate with unit slopes")
    diag = _evaluate(coeffs, (x,), "meijer_g")
    return (diag.value, diag) if full_output else diag.value


def fox_h(coeffs: HCoeffs, x: float, full_output: bool = False):
    """Fox H function of the univariate instance ``coeffs`` at ``x > 0``."""
    if coeffs.dims != 1:
        raise ValueError("fox_h expects a univariate instance")
    diag = _evaluate(coeffs, (x,), "fox_h")
    return (diag.value, diag) if full_output else diag.value


def fox_h_bivariate(coeffs: HCoeffs, x: float, y: float, full_output: bool = False):
    """Bivariate Fox H function, ``x`` pairs with ``s`` and ``y`` with ``t``.

    Joint terms such as ``Γ(t - s - 1)`` restrict the contour pair; the pair is picked
    on a grid over the feasible region of both abscissas.
    """
    if coeffs.dims != 2:
        raise ValueError("fox_h_bivariate expects a bivariate instance")
    diag = _evaluate(coeffs, (x, y), "fox_h_bivariate")
    return (diag.value, diag) if full_output else diag.value


PERTURBATION = 1e-3


def regularize(params: Sequence[float], arguments, label: str = "", step: float = PERTURBATION):
    """Nudge ``params`` until no gamma argument sits next to a pole.

    ``arguments(params)`` returns the gamma arguments of a closed form built from
    ``params``. The last parameter that moves an offending argument is increased by
    ``step``; every nudge is logged as a warning.

    Returns
    -------
    tuple of float
        The (possibly) perturbed parameters.
    """
    params = [float(p) for p in params]
    for _ in range(50):
        values = list(arguments(params))
        bad = [i for i, v in enumerate(values) if near_pole(v)]
        if not bad:
            return tuple(params)
        for j in reversed(range(len(params))):
            bumped = params.copy()
            bumped[j] += step
            moved = list(arguments(bumped))
            if any(moved[i] != values[i] for i in bad):
                logger.warning(
                    f"{label}: gamma argument(s) {[round(values[i], 6) for i in bad]} near a "
                    f"pole, parameter {j} perturbed {params[j]:.6g} -> {bumped[j]:.6g}"
                )
                params = bumped
                break
        else:
            raise GammaPoleError(f"{label}: singular gamma arguments cannot be regularized")
    raise GammaPoleError(f"{label}: perturbation did not clear the singular arguments")
