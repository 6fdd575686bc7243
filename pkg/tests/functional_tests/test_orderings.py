"""Qualitative orderings of the exact metrics across detection, protocol and water."""
import pytest

from ris_uwoc_perf import metrics, rf_link, uwoc_link
from ris_uwoc_perf.e2e_stats import RelayConfig
from ris_uwoc_perf.rf_link import RfLinkParams
from ris_uwoc_perf.uwoc_link import Detection

GAMMA_TH = 10**0.2
AF = RelayConfig.af(1.5)
THERMAL = ("thermal", 2.4, 0.05)
MEANS = [10.0, 100.0]


def _links(mean_snr, detection, row=THERMAL, n_elements=4):
    rf = rf_link.fit_kg(RfLinkParams(n_elements, 2.0, mean_snr))
    return rf, uwoc_link.table_lookup(*row).with_link(detection, mean_snr)


@pytest.mark.parametrize("mean_snr", MEANS)
def test_heterodyne_beats_intensity_modulation(mean_snr):
    hd = _links(mean_snr, Detection.HD)
    imdd = _links(mean_snr, Detection.IMDD)
    assert metrics.op_af(*hd, AF, GAMMA_TH).value < metrics.op_af(*imdd, AF, GAMMA_TH).value
    assert metrics.op_df(*hd, GAMMA_TH).value < metrics.op_df(*imdd, GAMMA_TH).value


@pytest.mark.parametrize("mean_snr", MEANS)
@pytest.mark.parametrize("detection", list(Detection))
def test_df_outage_is_not_below_af(mean_snr, detection):
    rf, uw = _links(mean_snr, detection)
    assert metrics.op_df(rf, uw, GAMMA_TH).value >= metrics.op_af(rf, uw, AF, GAMMA_TH).value


@pytest.mark.parametrize("mean_snr", MEANS)
@pytest.mark.parametrize("detection", list(Detection))
def test_af_capacity_is_not_below_df(mean_snr, detection):
    rf, uw = _links(mean_snr, detection)
    assert metrics.acc_af(rf, uw, AF).value >= metrics.acc_df(rf, uw).value


@pytest.mark.parametrize("detection", list(Detection))
def test_more_bubbles_raise_the_outage(detection):
    outages = [
        metrics.op_df(*_links(10.0, detection, row=("salty", level)), GAMMA_TH).value
        for level in (4.7, 7.1, 16.5)
    ]
    assert outages[0] < outages[1] < outages[2], outages
