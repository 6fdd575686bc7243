import math
import unittest
from unittest import mock

from numpy.testing import assert_allclose
from scipy import integrate

from ris_uwoc_perf import e2e_stats, rf_link, specfn, uwoc_link
from ris_uwoc_perf.e2e_stats import Protocol, RelayConfig
from ris_uwoc_perf.exceptions import ProbabilityRangeError
from ris_uwoc_perf.rf_link import RfLinkFit, RfLinkParams
from ris_uwoc_perf.uwoc_link import Detection

GAIN = 1.5


def _over_optical_snr(func, uw, lo=-40.0, hi=14.0):
    """E[func(γ2)] under the optical SNR density, integrated in log γ2."""
    value, _ = integrate.quad(
        lambda u: func(math.exp(u)) * uwoc_link.snr2_pdf(uw, math.exp(u)) * math.exp(u),
        lo,
        hi,
        limit=500,
        points=[math.log(uw.gg_scale)],
    )
    return value


def _af_cdf_numerical(rf, uw, gamma):
    # γ1 γ2 / (γ2 + C) < γ  ⇔  γ1 < γ (1 + C / γ2)
    return _over_optical_snr(lambda y: rf_link.snr1_cdf(rf, gamma * (1 + GAIN / y)), uw)


def _af_pdf_numerical(rf, uw, gamma):
    return _over_optical_snr(
        lambda y: (1 + GAIN / y) * rf_link.snr1_pdf(rf, gamma * (1 + GAIN / y)), uw
    )


class TestRelayConfig(unittest.TestCase):
    def test_protocol_aliases(self):
        self.assertIs(Protocol.parse("AF"), Protocol.FIXED_GAIN_AF)
        self.assertIs(Protocol.parse("fixed_gain_af"), Protocol.FIXED_GAIN_AF)
        self.assertIs(Protocol.parse(Protocol.DF), Protocol.DF)
        with self.assertRaises(ValueError):
            Protocol.parse("variable_gain_af")

    def test_gain_constant(self):
        self.assertTrue(RelayConfig.af(GAIN).is_af)
        self.assertFalse(RelayConfig.df().is_af)
        self.assertIs(RelayConfig("af", 2.0).protocol, Protocol.FIXED_GAIN_AF)
        with self.assertRaises(ValueError):
            RelayConfig.af(0.0)
        with self.assertRaises(ValueError):
            RelayConfig(Protocol.FIXED_GAIN_AF)
        with self.assertRaises(ValueError):
            RelayConfig(Protocol.DF, 1.0)

    def test_require_protocol(self):
        e2e_stats.require_protocol(RelayConfig.df(), af=False)
        with self.assertRaises(ValueError):
            e2e_stats.require_protocol(RelayConfig.df(), af=True)


class TestClampProbability(unittest.TestCase):
    def test_inside_range(self):
        self.assertEqual(e2e_stats.clamp_probability(0.3, "p"), (0.3, False))

    def test_quadrature_noise_is_clamped(self):
        with self.assertLogs("ris_uwoc_perf.specfn", level="WARNING"):
            self.assertEqual(e2e_stats.clamp_probability(-1e-7, "p"), (0.0, True))
        with self.assertLogs("ris_uwoc_perf.specfn", level="WARNING"):
            self.assertEqual(e2e_stats.clamp_probability(1 + 1e-7, "p"), (1.0, True))
        with self.assertLogs("ris_uwoc_perf.specfn", level="WARNING"):
            self.assertEqual(e2e_stats.clamp_probability(0.5 + 1e-7, "p", upper=0.5), (0.5, True))

    def test_large_excursion_raises(self):
        with self.assertRaises(ProbabilityRangeError):
            e2e_stats.clamp_probability(1.01, "p")
        with self.assertRaises(ProbabilityRangeError):
            e2e_stats.clamp_probability(-0.2, "p")

    def test_nonnegative_slack_is_relative(self):
        self.assertEqual(e2e_stats.clamp_nonnegative(2.5, "acc"), (2.5, False))
        with self.assertLogs("ris_uwoc_perf.specfn", level="WARNING"):
            self.assertEqual(e2e_stats.clamp_nonnegative(-1e-4, "acc", scale=100.0), (0.0, True))
        with self.assertRaises(ProbabilityRangeError):
            e2e_stats.clamp_nonnegative(-1e-4, "acc", scale=1.0)
        with self.assertRaises(ProbabilityRangeError):
            e2e_stats.clamp_nonnegative(-0.5, "acc", scale=3.0)


class TestFixedGainAf(unittest.TestCase):
    def setUp(self):
        self.rf = rf_link.fit_kg(RfLinkParams(2, 2.0, 10.0))
        row = uwoc_link.table_lookup("thermal", 2.4, 0.05)
        self.links = [row.with_link(d, 10.0) for d in Detection]
        self.relay = RelayConfig.af(GAIN)

    def test_cdf_matches_numerical_integral(self):
        for uw in self.links:
            for gamma in (0.5, 3.0):
                assert_allclose(
                    e2e_stats.af_cdf(self.rf, uw, self.relay, gamma),
                    _af_cdf_numerical(self.rf, uw, gamma),
                    rtol=1e-4,
                    atol=1e-6,
                )

    def test_pdf_matches_numerical_integral(self):
        for uw in self.links:
            gamma = 1.5
            assert_allclose(
                e2e_stats.af_pdf(self.rf, uw, self.relay, gamma),
                _af_pdf_numerical(self.rf, uw, gamma),
                rtol=1e-4,
                atol=1e-6,
            )

    def test_pdf_integrates_to_one(self):
        uw = self.links[0]
        total, _ = integrate.quad(
            lambda u: e2e_stats.af_pdf(self.rf, uw, self.relay, math.exp(u)) * math.exp(u),
            -20.0,
            10.0,
            limit=200,
            points=[0.0, math.log(10.0)],
        )
        assert_allclose(total, 1.0, atol=1e-3)

    def test_negative_pdf_beyond_slack_raises(self):
        diag = specfn.Diagnostics(-1.0, 0.0, True, (0.5, 0.5), (10.0, 10.0))
        with mock.patch("ris_uwoc_perf.e2e_stats.evaluate_term", return_value=diag):
            with self.assertRaises(ProbabilityRangeError):
                e2e_stats.af_pdf(self.rf, self.links[0], self.relay, 1.0)

    def test_cdf_is_monotone_and_bounded(self):
        uw = self.links[0]
        values = [e2e_stats.af_cdf(self.rf, uw, self.relay, g) for g in (0.1, 1.0, 10.0, 100.0)]
        self.assertTrue(all(b >= a for a, b in zip(values, values[1:])))
        self.assertTrue(all(0.0 <= v <= 1.0 for v in values))

    def test_af_cdf_dominates_rf_hop(self):
        uw = self.links[1]
        for gamma in (0.5, 5.0):
            self.assertGreaterEqual(
                e2e_stats.af_cdf(self.rf, uw, self.relay, gamma),
                rf_link.snr1_cdf(self.rf, gamma),
            )

    def test_full_output_records_every_term(self):
        evaluation = e2e_stats.af_cdf(self.rf, self.links[0], self.relay, 1.0, full_output=True)
        labels = [t.label for t in evaluation.terms]
        self.assertEqual(labels[1:], ["af_cdf[exp]", "af_cdf[gg]"])
        assert_allclose(sum(t.value for t in evaluation.terms), evaluation.value, atol=1e-9)
        self.assertFalse(evaluation.clamped)

    def test_baseline_rf_hop(self):
        rayleigh = RfLinkFit.rayleigh(10.0)
        uw = self.links[0]
        assert_allclose(
            e2e_stats.af_cdf(rayleigh, uw, self.relay, 2.0),
            _af_cdf_numerical(rayleigh, uw, 2.0),
            rtol=1e-4,
            atol=1e-6,
        )

    def test_wrong_protocol_and_level(self):
        with self.assertRaises(ValueError):
            e2e_stats.af_cdf(self.rf, self.links[0], RelayConfig.df(), 1.0)
        with self.assertRaises(ValueError):
            e2e_stats.af_cdf(self.rf, self.links[0], self.relay, 0.0)


class TestDecodeAndForward(unittest.TestCase):
    def setUp(self):
        self.rf = rf_link.fit_kg(RfLinkParams(4, 2.0, 10.0))
        self.uw = uwoc_link.table_lookup("salty", 4.7).with_link(Detection.IMDD, 10.0)

    def test_cdf_of_the_minimum(self):
        for gamma in (0.2, 2.0, 20.0):
            f1 = rf_link.snr1_cdf(self.rf, gamma)
            f2 = uwoc_link.snr2_cdf(self.uw, gamma)
            assert_allclose(e2e_stats.df_cdf(self.rf, self.uw, gamma), f1 + f2 - f1 * f2)
        self.assertEqual(e2e_stats.df_cdf(self.rf, self.uw, 0.0), 0.0)

    def test_pdf_integrates_to_cdf(self):
        gamma = 4.0
        value, _ = integrate.quad(
            lambda u: e2e_stats.df_pdf(self.rf, self.uw, math.exp(u)) * math.exp(u),
            -40.0,
            math.log(gamma),
            limit=500,
        )
        assert_allclose(value, e2e_stats.df_cdf(self.rf, self.uw, gamma), rtol=1e-5)

    def test_cdf_exceeds_each_hop(self):
        gamma = 3.0
        value = e2e_stats.df_cdf(self.rf, self.uw, gamma)
        self.assertGreaterEqual(value, rf_link.snr1_cdf(self.rf, gamma))
        self.assertGreaterEqual(value, uwoc_link.snr2_cdf(self.uw, gamma))


if __name__ == "__main__":
    unittest.main()
