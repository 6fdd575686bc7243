"""MLflow tracking of sweep results.

One parent run per sweep carries the sweep parameters; one nested run per
(method, curve) holds the metric values with the sweep point index as step.
mlflow is imported only here, when ``--track`` is given.
"""
import logging
import math

logger = logging.getLogger(__name__)


def _curve_name(row) -> str:
    rf = f"N={row['param_n_elements']}" if row["param_ris"] else "no-ris"
    return f"{rf}|{row['param_water']}"


def track_sweeps(result, specs, experiment_name: str = "ris-uwoc", tracking_uri=None):
    """Log a :class:`~ris_uwoc_perf.sweep.SweepResult` to MLflow.

    Parameters
    ----------
    result : SweepResult
        Output of :func:`~ris_uwoc_perf.sweep.run_sweep`.
    specs : list of SweepSpec
        The sweeps that produced ``result``.
    experiment_name : str
        MLflow experiment, created when missing.
    tracking_uri : str, optional
        MLflow tracking URI; the mlflow default (``./mlruns``) when omitted.

    Returns
    -------
    str
        Experiment id.
    """
    import mlflow

    if tracking_uri:
        mlflow.set_tracking_uri(tracking_uri)
    experiment_id = mlflow.set_experiment(experiment_name).experiment_id

    frame = result.frame
    for spec in specs:
        rows = frame[frame["param_sweep"] == spec.name]
        if rows.empty:
            continue
        params = dict(spec.to_config()[f"sweep.{spec.name}"])
        with mlflow.start_run(run_name=spec.name, experiment_id=experiment_id):
            mlflow.log_params(params)
            mlflow.log_metric("failures", int((rows["error"] != "").sum()))
            for (method, curve), group in rows.groupby(
                [rows["method"], rows.apply(_curve_name, axis=1)], sort=False
            ):
                with mlflow.start_run(
                    run_name=f"{method}|{curve}", experiment_id=experiment_id, nested=True
                ):
                    mlflow.log_param("method", method)
                    mlflow.log_param("curve", curve)
                    for step, (_, row) in enumerate(group.iterrows()):
                        if math.isfinite(row["value"]):
                            mlflow.log_metric(spec.metric.value, row["value"], step=step)
                        mlflow.log_metric("snr_db", row["snr_db"], step=step)
        logger.info(f"sweep {spec.name} tracked in experiment {experiment_name}")
    return experiment_id
