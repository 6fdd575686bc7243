import configparser
import io
import json
import os
import tempfile
import unittest
from unittest import mock

import numpy as np
import pandas as pd

from ris_uwoc_perf import sweep
from ris_uwoc_perf.e2e_stats import Protocol
from ris_uwoc_perf.exceptions import ConvergenceError, SpecValidationError
from ris_uwoc_perf.metrics import Method, Metric, MetricResult
from ris_uwoc_perf.sweep import Curve
from ris_uwoc_perf.uwoc_link import Detection

SPEC = """
[DEFAULT]
nakagami_m = 2
gamma_th_db = 2

[sweep.op_af]
metric = op
protocol = af
detection = imdd
n_elements = 2, 4
water = thermal:2.4:0.05
points_db = 0, 10, 20
methods = exact, asymptotic
baseline = true

[sweep.aber_df]
metric = aber
protocol = df
detection = hd
water = salty:4.7, fresh:7.1
points_db = 5
mod_p = 1
mod_q = 0.5
"""


def _config(text=SPEC):
    config = configparser.ConfigParser()
    config.read_string(text)
    return config


def _section(body, defaults=""):
    return _config(f"[DEFAULT]\n{defaults}\n[sweep.x]\n{body}")


class TestParseSpec(unittest.TestCase):
    def test_defaults_and_values(self):
        spec = sweep.parse_spec(_config(), "sweep.op_af")
        self.assertEqual(spec.name, "op_af")
        self.assertIs(spec.metric, Metric.OP)
        self.assertIs(spec.protocol, Protocol.FIXED_GAIN_AF)
        self.assertIs(spec.detection, Detection.IMDD)
        self.assertEqual(spec.n_elements, (2, 4))
        self.assertEqual(spec.points_db, (0.0, 10.0, 20.0))
        self.assertEqual(spec.methods, (Method.EXACT, Method.ASYMPTOTIC))
        self.assertEqual((spec.gain_const, spec.gamma_th_db, spec.mod), (1.5, 2.0, None))
        self.assertEqual((spec.mc.samples, spec.mc.seed, spec.mc.batch), (10**6, 0, 2**18))
        self.assertTrue(spec.baseline)

    def test_inherited_keys_that_do_not_apply_are_ignored(self):
        spec = sweep.parse_spec(_config(), "sweep.aber_df")
        self.assertIsNone(spec.gamma_th_db)
        self.assertIsNone(spec.gain_const)
        self.assertEqual((spec.mod.p, spec.mod.q), (1.0, 0.5))

    def test_plan_order(self):
        spec = sweep.parse_spec(_config(), "sweep.op_af")
        self.assertEqual(
            spec.curves,
            [
                Curve(2, "thermal:2.4:0.05"),
                Curve(4, "thermal:2.4:0.05"),
                Curve(None, "thermal:2.4:0.05"),
            ],
        )
        plan = spec.plan()
        self.assertEqual(len(plan), 3 * 3 * 2)
        self.assertEqual(
            [(p.snr_db, p.method) for p in plan[:4]],
            [
                (0.0, Method.EXACT),
                (0.0, Method.ASYMPTOTIC),
                (10.0, Method.EXACT),
                (10.0, Method.ASYMPTOTIC),
            ],
        )
        self.assertFalse(plan[-1].curve.ris)

    def test_to_config_reads_back(self):
        for name in ("op_af", "aber_df"):
            spec = sweep.parse_spec(_config(), f"sweep.{name}")
            again = sweep.parse_spec(spec.to_config(), f"sweep.{name}")
            self.assertEqual(again, spec)

    def test_snr_axes(self):
        spec = sweep.parse_spec(
            _section("metric = acc\npoints_db = 10\nsnr_axis = rf\nfixed_snr_db = 20"), "sweep.x"
        )
        np.testing.assert_allclose(spec.mean_snrs(10.0), (10.0, 100.0))
        spec = sweep.parse_spec(
            _section("metric = acc\npoints_db = 10\nsnr_axis = uwoc\nfixed_snr_db = 0"), "sweep.x"
        )
        np.testing.assert_allclose(spec.mean_snrs(10.0), (1.0, 10.0))

    def test_override(self):
        spec = sweep.parse_spec(_config(), "sweep.op_af")
        changed = spec.override(methods=["mc"], seed=9, samples=1000)
        self.assertEqual(changed.methods, (Method.MONTE_CARLO,))
        self.assertEqual((changed.mc.seed, changed.mc.samples), (9, 1000))
        self.assertEqual(spec.override(methods=None, seed=None, samples=None), spec)

    def test_large_seed_keeps_precision(self):
        spec = sweep.parse_spec(
            _section("metric = acc\npoints_db = 0\nmc_seed = 18446744073709551615"), "sweep.x"
        )
        self.assertEqual(spec.mc.seed, 2**64 - 1)


class TestValidation(unittest.TestCase):
    def assertInvalid(self, body, field, defaults=""):
        with self.assertRaises(SpecValidationError) as ctx:
            sweep.parse_spec(_section(body, defaults), "sweep.x")
        self.assertEqual(ctx.exception.field, field)

    def test_required_keys(self):
        self.assertInvalid("points_db = 0", "sweep.x.metric")
        self.assertInvalid("metric = op\npoints_db =", "sweep.x.points_db")

    def test_unknown_key_and_values(self):
        self.assertInvalid("metric = op\npoints_db = 0\nwavelength = 450", "sweep.x.wavelength")
        self.assertInvalid("metric = snr\npoints_db = 0", "sweep.x.metric")
        self.assertInvalid("metric = op\npoints_db = 0\nprotocol = vg", "sweep.x.protocol")
        self.assertInvalid("metric = op\npoints_db = 0, ten", "sweep.x.points_db")
        self.assertInvalid("metric = op\npoints_db = 0\nwater = salty:3.0", "sweep.x.water")
        self.assertInvalid("metric = op\npoints_db = 0\nn_elements = 2.5", "sweep.x.n_elements")
        self.assertInvalid("metric = op\npoints_db = 0\nnakagami_m = 0.2", "sweep.x.nakagami_m")
        self.assertInvalid("metric = op\npoints_db = 0\nmethods = exact, exact", "sweep.x.methods")
        self.assertInvalid("metric = op\npoints_db = 0\nbaseline = maybe", "sweep.x.baseline")

    def test_keys_that_do_not_apply(self):
        self.assertInvalid("metric = aber\npoints_db = 0\ngamma_th_db = 3", "sweep.x.gamma_th_db")
        self.assertInvalid("metric = op\npoints_db = 0\nmod_p = 1", "sweep.x.mod_p")
        self.assertInvalid(
            "metric = op\nprotocol = df\npoints_db = 0\ngain_const = 2", "sweep.x.gain_const"
        )
        self.assertInvalid("metric = op\npoints_db = 0\ngain_const = 0", "sweep.x.gain_const")

    def test_axis_and_methods(self):
        self.assertInvalid("metric = acc\npoints_db = 0\nmethods = asymptotic", "sweep.x.methods")
        self.assertInvalid("metric = op\npoints_db = 0\nsnr_axis = rf", "sweep.x.fixed_snr_db")
        self.assertInvalid("metric = op\npoints_db = 0\nsnr_axis = relay", "sweep.x.snr_axis")

    def test_monte_carlo_fields(self):
        self.assertInvalid("metric = op\npoints_db = 0\nmc_samples = 1", "sweep.x.mc_samples")
        self.assertInvalid("metric = op\npoints_db = 0\nmc_seed = -4", "sweep.x.mc_seed")
        self.assertInvalid("metric = op\npoints_db = 0\nmc_batch = 0", "sweep.x.mc_batch")

    def test_section_name(self):
        with self.assertRaises(SpecValidationError):
            sweep.parse_spec(_config("[sweep.]\nmetric = op\npoints_db = 0"), "sweep.")


class TestLoadSpecs(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, "spec.ini")
        with open(self.path, "w") as f:
            f.write(SPEC)

    def tearDown(self):
        self.tmp.cleanup()

    def test_all_and_named(self):
        self.assertEqual([s.name for s in sweep.load_specs(self.path)], ["op_af", "aber_df"])
        self.assertEqual([s.name for s in sweep.load_specs(self.path, ["aber_df"])], ["aber_df"])

    def test_errors(self):
        with self.assertRaises(SpecValidationError) as ctx:
            sweep.load_specs(self.path, ["missing"])
        self.assertEqual(ctx.exception.field, "sweep.missing")
        with self.assertRaises(SpecValidationError):
            sweep.load_specs(os.path.join(self.tmp.name, "nothing.ini"))
        empty = os.path.join(self.tmp.name, "empty.ini")
        with open(empty, "w") as f:
            f.write("[other]\nkey = 1\n")
        with self.assertRaises(SpecValidationError):
            sweep.load_specs(empty)


class TestRunSweep(unittest.TestCase):
    def setUp(self):
        self.spec = sweep.parse_spec(
            _section(
                "metric = op\nprotocol = df\ndetection = hd\nwater = salty:4.7\n"
                "points_db = 0, 20\nmethods = exact, asymptotic\nbaseline = true"
            ),
            "sweep.x",
        )

    def test_rows_follow_the_plan(self):
        result = sweep.run_sweep(self.spec, quiet=True)
        frame = result.frame
        self.assertTrue(result.ok)
        self.assertEqual(len(frame), len(self.spec.plan()))
        self.assertEqual(list(frame.columns[: len(sweep.COLUMNS)]), sweep.COLUMNS)
        self.assertEqual(list(frame["method"][:2]), ["exact", "asymptotic"])
        self.assertEqual(list(frame["param_ris"]), [True] * 4 + [False] * 4)
        self.assertTrue(frame[frame["method"] == "exact"]["value"].between(0, 1).all())
        self.assertTrue(frame["std_err"].isna().all())
        exact = frame[frame["method"] == "exact"]["value"].to_numpy()
        # higher SNR, lower outage
        self.assertGreater(exact[0], exact[1])

    def test_failure_is_recorded(self):
        with mock.patch("ris_uwoc_perf.metrics.op_df", side_effect=ConvergenceError("stalled")):
            result = sweep.run_sweep(self.spec, quiet=True)
        self.assertFalse(result.ok)
        self.assertEqual(result.failures, 4)
        failed = result.frame[result.frame["error"] != ""]
        self.assertTrue(failed["error"].str.startswith("ConvergenceError").all())
        self.assertTrue(failed["value"].isna().all())

    def test_range_flag(self):
        frame = sweep.run_sweep(self.spec, quiet=True).frame
        self.assertTrue(frame[frame["method"] == "exact"]["in_range"].all())
        expected = frame["value"].between(0, 1)
        self.assertEqual(list(frame["in_range"]), list(expected))

    def test_negative_asymptote_is_flagged(self):
        below = MetricResult(-0.3, Method.ASYMPTOTIC)
        with mock.patch("ris_uwoc_perf.metrics.op_df_asymptotic", return_value=below):
            with self.assertLogs("ris_uwoc_perf.sweep", level="WARNING"):
                result = sweep.run_sweep(self.spec, quiet=True)
        rows = result.frame[result.frame["method"] == "asymptotic"]
        self.assertTrue(result.ok)
        self.assertFalse(rows["in_range"].any())
        self.assertTrue((rows["error"] == "").all())

    def test_metric_ranges(self):
        self.assertTrue(sweep.metric_in_range(Metric.OP, 1.0))
        self.assertFalse(sweep.metric_in_range(Metric.OP, 1.2))
        self.assertFalse(sweep.metric_in_range(Metric.ABER, 0.6))
        self.assertTrue(sweep.metric_in_range(Metric.ACC, 12.0))
        self.assertFalse(sweep.metric_in_range(Metric.ACC, -0.1))

    def test_write_formats(self):
        result = sweep.run_sweep(self.spec, quiet=True)
        csv = pd.read_csv(io.StringIO(result.write(fmt="csv")))
        self.assertEqual(list(csv.columns), sweep.COLUMNS)
        records = json.loads(result.write(fmt="json"))
        self.assertIn("diagnostics", records[0])
        with self.assertRaises(ValueError):
            result.write(fmt="xlsx")
        with tempfile.TemporaryDirectory() as tmp:
            out = os.path.join(tmp, "nested", "out.csv")
            self.assertIsNone(result.write(out))
            self.assertTrue(os.path.exists(out))


if __name__ == "__main__":
    unittest.main()
