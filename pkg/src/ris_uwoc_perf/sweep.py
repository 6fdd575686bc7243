"""Parameter sweeps over the mean SNR.

A sweep is one ``[sweep.<name>]`` section of an INI file. Shared keys go in
``[DEFAULT]``; every key has a default mirroring the usual operating point
(``γ_th = 2 dB``, ``m = 2``, ``C = 1.5``, BPSK). A sweep expands into curves
(one per ``n_elements`` × ``water`` row, plus a no-RIS curve per row when
``baseline`` is set), each evaluated at every ``points_db`` value with every
requested method. Results come back in that order whatever the number of workers.

Example
-------
::

    [DEFAULT]
    nakagami_m = 2

    [sweep.op_af]
    metric = op
    protocol = af
    detection = imdd
    n_elements = 2, 4
    water = thermal:2.4:0.05
    points_db = 0, 10, 20, 30, 40
    methods = exact, asymptotic, mc
"""
import configparser
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import progressbar
from joblib import Parallel, delayed

from . import metrics, rf_link, uwoc_link
from .e2e_stats import Protocol, RelayConfig
from .exceptions import RisUwocError, SpecValidationError
from .mc_oracle import McConfig, estimate_metric
from .metrics import Method, Metric, MetricResult
from .modulation import BPSK, ModulationParams
from .rf_link import RfLinkParams
from .uwoc_link import Detection

logger = logging.getLogger(__name__)

SECTION_PREFIX = "sweep."

SPEC_DEFAULTS = {
    "protocol": "af",
    "detection": "imdd",
    "n_elements": "2",
    "nakagami_m": "2",
    "water": "thermal:2.4:0.05",
    "gain_const": "1.5",
    "gamma_th_db": "2",
    "mod_p": "0.5",
    "mod_q": "1",
    "snr_axis": "joint",
    "fixed_snr_db": "",
    "methods": "exact",
    "baseline": "false",
    "mc_samples": "1000000",
    "mc_seed": "0",
    "mc_batch": "262144",
}
SPEC_KEYS = ("metric", "points_db") + tuple(SPEC_DEFAULTS)

SNR_AXES = ("joint", "rf", "uwoc")

COLUMNS = [
    "param_sweep",
    "param_metric",
    "param_protocol",
    "param_detection",
    "param_ris",
    "param_n_elements",
    "param_nakagami_m",
    "param_water",
    "param_gain_const",
    "param_gamma_th_db",
    "param_snr_axis",
    "param_fixed_snr_db",
    "snr_db",
    "method",
    "value",
    "std_err",
    "converged",
    "in_range",
    "error",
]


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def protocol_key(protocol: Protocol) -> str:
    return "af" if protocol is Protocol.FIXED_GAIN_AF else "df"


@dataclass(frozen=True)
class Curve:
    """One line of a figure: RF hop configuration and water row."""

    n_elements: Optional[int]
    water: str

    @property
    def ris(self) -> bool:
        return self.n_elements is not None


@dataclass(frozen=True)
class RunPoint:
    """One evaluation of a sweep."""

    curve: Curve
    snr_db: float
    method: Method


@dataclass(frozen=True)
class SweepSpec:
    """Validated description of a sweep.

    SNR values are held in dB as written in the file and converted when a point is
    evaluated. ``gamma_th_db`` is set iff ``metric`` is OP and ``mod`` iff it is ABER.
    """

    name: str
    metric: Metric
    protocol: Protocol
    detection: Detection
    n_elements: Tuple[int, ...]
    nakagami_m: float
    water: Tuple[str, ...]
    points_db: Tuple[float, ...]
    methods: Tuple[Method, ...]
    gain_const: Optional[float] = 1.5
    gamma_th_db: Optional[float] = None
    mod: Optional[ModulationParams] = None
    snr_axis: str = "joint"
    fixed_snr_db: Optional[float] = None
    baseline: bool = False
    mc: McConfig = field(default_factory=McConfig)

    def __post_init__(self):
        path = f"{SECTION_PREFIX}{self.name}"
        if (self.gamma_th_db is not None) != (self.metric is Metric.OP):
            raise SpecValidationError(f"{path}.gamma_th_db", "required for, and only for, op")
        if (self.mod is not None) != (self.metric is Metric.ABER):
            raise SpecValidationError(f"{path}.mod_p", "required for, and only for, aber")
        if (self.gain_const is not None) != (self.protocol is Protocol.FIXED_GAIN_AF):
            raise SpecValidationError(f"{path}.gain_const", "required for, and only for, af")
        if not self.points_db:
            raise SpecValidationError(f"{path}.points_db", "at least one point is required")
        if not self.methods:
            raise SpecValidationError(f"{path}.methods", "at least one method is required")
        if not self.water:
            raise SpecValidationError(f"{path}.water", "at least one table row is required")
        if self.metric is Metric.ACC and Method.ASYMPTOTIC in self.methods:
            raise SpecValidationError(f"{path}.methods", "acc has no asymptotic form")
        if self.snr_axis not in SNR_AXES:
            raise SpecValidationError(f"{path}.snr_axis", f"must be one of {', '.join(SNR_AXES)}")
        if (self.fixed_snr_db is None) != (self.snr_axis == "joint"):
            raise SpecValidationError(
                f"{path}.fixed_snr_db", "required for, and only for, the rf and uwoc axes"
            )

    @property
    def relay(self) -> RelayConfig:
        return RelayConfig(self.protocol, self.gain_const)

    @property
    def curves(self) -> List[Curve]:
        curves = [Curve(n, w) for n in self.n_elements for w in self.water]
        if self.baseline:
            curves += [Curve(None, w) for w in self.water]
        return curves

    def plan(self) -> List[RunPoint]:
        """Run points in output order: curve, then SNR point, then method."""
        return [
            RunPoint(curve, snr_db, method)
            for curve in self.curves
            for snr_db in self.points_db
            for method in self.methods
        ]

    def mean_snrs(self, snr_db: float) -> Tuple[float, float]:
        """``(γ̄1, γ̄2)`` in linear scale at a sweep point."""
        if self.snr_axis == "joint":
            return db_to_linear(snr_db), db_to_linear(snr_db)
        fixed = db_to_linear(self.fixed_snr_db)
        if self.snr_axis == "rf":
            return db_to_linear(snr_db), fixed
        return fixed, db_to_linear(snr_db)

    def override(self, **changes) -> "SweepSpec":
        """Copy with command-line overrides (``methods``, ``seed``, ``samples``)."""
        mc_changes = {
            key: changes.pop(key) for key in ("seed", "samples") if changes.get(key) is not None
        }
        if changes.get("methods"):
            changes["methods"] = _parse_methods(
                changes["methods"], f"{SECTION_PREFIX}{self.name}.methods"
            )
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, mc=replace(self.mc, **mc_changes), **changes)

    def to_config(self, config: Optional[configparser.ConfigParser] = None):
        """Write the sweep as an INI section that :func:`parse_spec` reads back."""
        config = config or configparser.ConfigParser()
        section = {
            "metric": self.metric.value,
            "protocol": protocol_key(self.protocol),
            "detection": self.detection.value,
            "n_elements": ", ".join(str(n) for n in self.n_elements),
            "nakagami_m": repr(self.nakagami_m),
            "water": ", ".join(self.water),
            "points_db": ", ".join(repr(p) for p in self.points_db),
            "methods": ", ".join(m.value for m in self.methods),
            "snr_axis": self.snr_axis,
            "fixed_snr_db": "" if self.fixed_snr_db is None else repr(self.fixed_snr_db),
            "baseline": str(self.baseline).lower(),
            "mc_samples": str(self.mc.samples),
            "mc_seed": str(self.mc.seed),
            "mc_batch": str(self.mc.batch),
        }
        if self.gain_const is not None:
            section["gain_const"] = repr(self.gain_const)
        if self.gamma_th_db is not None:
            section["gamma_th_db"] = repr(self.gamma_th_db)
        if self.mod is not None:
            section["mod_p"], section["mod_q"] = repr(self.mod.p), repr(self.mod.q)
        config[f"{SECTION_PREFIX}{self.name}"] = section
        return config


# -- ingestion -------------------------------------------------------------------------


def _split(value: str) -> List[str]:
    return [item.strip() for item in value.replace(";", ",").split(",") if item.strip()]


def _parse_number(value: str, path: str, cast=float):
    if cast is int and str(value).strip().isdigit():
        return int(str(value).strip())
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise SpecValidationError(path, f"expected a number, got {value!r}")
    if not math.isfinite(number):
        raise SpecValidationError(path, f"expected a finite number, got {value!r}")
    if cast is int:
        if not number.is_integer():
            raise SpecValidationError(path, f"expected an integer, got {value!r}")
        return int(number)
    return number


def _parse_enum(enum_cls, value: str, path: str):
    try:
        if hasattr(enum_cls, "parse"):
            return enum_cls.parse(value.strip())
        return enum_cls(value.strip().lower())
    except ValueError:
        choices = ", ".join(e.value for e in enum_cls)
        raise SpecValidationError(path, f"unknown value {value!r}, expected one of {choices}")


def _parse_methods(value, path: str) -> Tuple[Method, ...]:
    items = _split(value) if isinstance(value, str) else list(value)
    methods = tuple(_parse_enum(Method, str(item), path) for item in items)
    if len(set(methods)) != len(methods):
        raise SpecValidationError(path, "methods are listed twice")
    return methods


def _parse_water(value: str, path: str) -> Tuple[str, ...]:
    rows = tuple(_split(value))
    for row in rows:
        try:
            uwoc_link.lookup_key(row)
        except (RisUwocError, ValueError) as exc:
            raise SpecValidationError(path, str(exc))
    return rows


def parse_spec(config: configparser.ConfigParser, section: str) -> SweepSpec:
    """Validate one ``[sweep.<name>]`` section.

    Raises
    ------
    SpecValidationError
        Naming the offending key as ``sweep.<name>.<key>``.
    """
    if not section.startswith(SECTION_PREFIX) or section == SECTION_PREFIX:
        raise SpecValidationError(section, f"sweep sections are named {SECTION_PREFIX}<name>")
    name = section[len(SECTION_PREFIX):]
    values = dict(SPEC_DEFAULTS)
    values.update(config[section])
    inherited = config.defaults()

    def path(key):
        return f"{section}.{key}"

    unknown = sorted(set(values) - set(SPEC_KEYS))
    if unknown:
        raise SpecValidationError(path(unknown[0]), "unknown key")
    for key in ("metric", "points_db"):
        if not values.get(key, "").strip():
            raise SpecValidationError(path(key), "missing value")

    metric = _parse_enum(Metric, values["metric"], path("metric"))
    protocol = _parse_enum(Protocol, values["protocol"], path("protocol"))

    def explicit(key):
        return key in config[section] and config[section][key] != inherited.get(key)

    if metric is not Metric.OP and explicit("gamma_th_db"):
        raise SpecValidationError(path("gamma_th_db"), "only applies to op")
    if metric is not Metric.ABER and (explicit("mod_p") or explicit("mod_q")):
        raise SpecValidationError(path("mod_p"), "only applies to aber")
    if protocol is not Protocol.FIXED_GAIN_AF and explicit("gain_const"):
        raise SpecValidationError(path("gain_const"), "only applies to af")

    n_elements = tuple(
        _parse_number(v, path("n_elements"), int) for v in _split(values["n_elements"])
    )
    if not n_elements or any(n < 1 for n in n_elements):
        raise SpecValidationError(path("n_elements"), "expected positive integers")
    nakagami_m = _parse_number(values["nakagami_m"], path("nakagami_m"))
    if nakagami_m < 0.5:
        raise SpecValidationError(path("nakagami_m"), "Nakagami parameter must be >= 0.5")

    gain_const = None
    if protocol is Protocol.FIXED_GAIN_AF:
        gain_const = _parse_number(values["gain_const"], path("gain_const"))
        if not gain_const > 0:
            raise SpecValidationError(path("gain_const"), "must be positive")
    mod = None
    if metric is Metric.ABER:
        p = _parse_number(values["mod_p"], path("mod_p"))
        q = _parse_number(values["mod_q"], path("mod_q"))
        if not (p > 0 and q > 0):
            raise SpecValidationError(path("mod_p"), "modulation parameters must be positive")
        mod = ModulationParams(p, q)

    fixed = values["fixed_snr_db"].strip()
    snr_axis = values["snr_axis"].strip().lower()
    mc_values = {
        key: _parse_number(values[f"mc_{key}"], path(f"mc_{key}"), int)
        for key in ("samples", "seed", "batch")
    }
    try:
        mc = McConfig(**mc_values)
    except ValueError as exc:
        # McConfig messages start with the offending field name
        raise SpecValidationError(path(f"mc_{str(exc).split()[0]}"), str(exc))
    try:
        baseline = config[section].getboolean("baseline", fallback=False)
    except ValueError:
        raise SpecValidationError(
            path("baseline"), f"expected a boolean, got {values['baseline']!r}"
        )

    spec = SweepSpec(
        name=name,
        metric=metric,
        protocol=protocol,
        detection=_parse_enum(Detection, values["detection"], path("detection")),
        n_elements=n_elements,
        nakagami_m=nakagami_m,
        water=_parse_water(values["water"], path("water")),
        points_db=tuple(
            _parse_number(v, path("points_db")) for v in _split(values["points_db"])
        ),
        methods=_parse_methods(values["methods"], path("methods")),
        gain_const=gain_const,
        gamma_th_db=(
            _parse_number(values["gamma_th_db"], path("gamma_th_db"))
            if metric is Metric.OP
            else None
        ),
        mod=mod,
        snr_axis=snr_axis,
        fixed_snr_db=_parse_number(fixed, path("fixed_snr_db")) if fixed else None,
        baseline=baseline,
        mc=mc,
    )
    logger.debug(f"parsed {section}: {len(spec.plan())} run points")
    return spec


def load_specs(path, names: Optional[List[str]] = None) -> List[SweepSpec]:
    """Read every ``[sweep.<name>]`` section of an INI file (or only ``names``)."""
    config = configparser.ConfigParser()
    try:
        read = config.read(path)
    except configparser.Error as exc:
        logger.error(f"cannot parse {path}: {exc}")
        raise SpecValidationError(str(path), f"malformed spec file: {exc}")
    if not read:
        logger.error(f"spec file {path} not found")
        raise SpecValidationError(str(path), "spec file not found")
    sections = [s for s in config.sections() if s.startswith(SECTION_PREFIX)]
    if names:
        missing = [n for n in names if f"{SECTION_PREFIX}{n}" not in sections]
        if missing:
            raise SpecValidationError(f"{SECTION_PREFIX}{missing[0]}", "no such sweep")
        sections = [f"{SECTION_PREFIX}{n}" for n in names]
    if not sections:
        raise SpecValidationError(str(path), f"no [{SECTION_PREFIX}<name>] section")
    return [parse_spec(config, s) for s in sections]


# -- evaluation ------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _fit(n_elements: int, m: float) -> rf_link.RfLinkFit:
    # fit shapes do not depend on the mean SNR
    return rf_link.fit_kg(RfLinkParams(n_elements, m, mean_snr=1.0))


def _exact(spec: SweepSpec, rf, uw, relay) -> MetricResult:
    af = relay.is_af
    if spec.metric is Metric.OP:
        gamma_th = db_to_linear(spec.gamma_th_db)
        return metrics.op_af(rf, uw, relay, gamma_th) if af else metrics.op_df(rf, uw, gamma_th)
    if spec.metric is Metric.ABER:
        return metrics.aber_af(rf, uw, relay, spec.mod) if af else metrics.aber_df(rf, uw, spec.mod)
    return metrics.acc_af(rf, uw, relay) if af else metrics.acc_df(rf, uw)


def _asymptotic(spec: SweepSpec, rf, uw, relay) -> MetricResult:
    af = relay.is_af
    if spec.metric is Metric.OP:
        gamma_th = db_to_linear(spec.gamma_th_db)
        if af:
            return metrics.op_af_asymptotic(rf, uw, relay, gamma_th)
        return metrics.op_df_asymptotic(rf, uw, gamma_th)
    if af:
        return metrics.aber_af_asymptotic(rf, uw, relay, spec.mod)
    return metrics.aber_df_asymptotic(rf, uw, spec.mod)


def metric_in_range(metric: Metric, value: float) -> bool:
    """Whether ``value`` is a possible OP, ABER or ACC; truncated asymptotes may not be."""
    upper = {Metric.OP: 1.0, Metric.ABER: 0.5}.get(metric, math.inf)
    return bool(0.0 <= value <= upper)


def evaluate_point(spec: SweepSpec, point: RunPoint) -> Dict:
    """Evaluate one run point into an output row; numerical failures land in ``error``."""
    curve = point.curve
    mean_snr1, mean_snr2 = spec.mean_snrs(point.snr_db)
    row = {
        "param_sweep": spec.name,
        "param_metric": spec.metric.value,
        "param_protocol": protocol_key(spec.protocol),
        "param_detection": spec.detection.value,
        "param_ris": curve.ris,
        "param_n_elements": curve.n_elements if curve.ris else 0,
        "param_nakagami_m": spec.nakagami_m,
        "param_water": curve.water,
        "param_gain_const": spec.gain_const,
        "param_gamma_th_db": spec.gamma_th_db,
        "param_snr_axis": spec.snr_axis,
        "param_fixed_snr_db": spec.fixed_snr_db,
        "snr_db": point.snr_db,
        "method": point.method.value,
        "value": np.nan,
        "std_err": np.nan,
        "converged": False,
        "in_range": False,
        "error": "",
        "diagnostics": [],
    }
    try:
        if curve.ris:
            rf_params = RfLinkParams(curve.n_elements, spec.nakagami_m, mean_snr1)
            fit = _fit(curve.n_elements, spec.nakagami_m).with_mean_snr(mean_snr1)
        else:
            rf_params = RfLinkParams.baseline(mean_snr1)
            fit = rf_link.fit_kg(rf_params)
        uw = uwoc_link.lookup_key(curve.water).with_link(spec.detection, mean_snr2)
        relay = spec.relay

        if point.method is Method.EXACT:
            result = _exact(spec, fit, uw, relay)
        elif point.method is Method.ASYMPTOTIC:
            result = _asymptotic(spec, fit, uw, relay)
        else:
            result = estimate_metric(
                spec.metric,
                rf_params,
                uw,
                relay,
                spec.mc,
                gamma_th=db_to_linear(spec.gamma_th_db) if spec.gamma_th_db is not None else None,
                mod=spec.mod or BPSK,
            )
    except (RisUwocError, ValueError, ArithmeticError) as exc:
        logger.error(f"{spec.name} {curve} at {point.snr_db:g} dB ({point.method.value}): {exc}")
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row

    row["value"] = result.value
    row["std_err"] = np.nan if result.mc_std_err is None else result.mc_std_err
    row["converged"] = result.converged
    row["in_range"] = metric_in_range(spec.metric, result.value)
    if not row["in_range"]:
        logger.warning(
            f"{spec.name} {curve} at {point.snr_db:g} dB ({point.method.value}): "
            f"{result.value:.3e} outside the range of {spec.metric.value}"
        )
    row["diagnostics"] = [asdict(d) for d in result.diagnostics]
    return row


@dataclass
class SweepResult:
    """Output rows of one or more sweeps in plan order."""

    frame: pd.DataFrame

    @property
    def failures(self) -> int:
        return int((self.frame["error"] != "").sum())

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def write(self, out=None, fmt: str = "csv"):
        """Write CSV (without diagnostics) or JSON (with them) to ``out`` or return the text."""
        if fmt == "csv":
            text = self.frame[COLUMNS].to_csv(index=False)
        elif fmt == "json":
            text = self.frame.to_json(orient="records", indent=2)
        else:
            raise ValueError(f"unknown output format {fmt!r}")
        if out is None:
            return text
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
        logger.info(f"{len(self.frame)} rows written to {out}")


def run_sweep(specs, jobs: int = 1, quiet: bool = False) -> SweepResult:
    """Evaluate every run point of one or more sweeps.

    Parameters
    ----------
    specs : SweepSpec or list of SweepSpec
    jobs : int
        joblib workers over run points; rows keep plan order.
    quiet : bool
        Hide the progress bar.

    Returns
    -------
    SweepResult
    """
    specs = [specs] if isinstance(specs, SweepSpec) else list(specs)
    tasks = [(spec, point) for spec in specs for point in spec.plan()]
    logger.info(f"running {len(tasks)} points from {len(specs)} sweep(s) on {jobs} worker(s)")

    chunk = max(1, abs(jobs)) * 4
    rows = []
    bar = progressbar.NullBar() if quiet else progressbar.ProgressBar(max_value=len(tasks))
    bar.start()
    with Parallel(n_jobs=jobs) as parallel:
        for start in range(0, len(tasks), chunk):
            rows += parallel(
                delayed(evaluate_point)(spec, point)
                for spec, point in tasks[start:start + chunk]
            )
            bar.update(len(rows))
    bar.finish()

    frame = pd.DataFrame(rows, columns=COLUMNS + ["diagnostics"])
    result = SweepResult(frame)
    if not result.ok:
        logger.warning(f"{result.failures} of {len(rows)} points failed")
    return result
