import csv

import numpy as np
import pytest

from palimpsest import (
    Channel,
    ChannelHistogram,
    InvalidWindow,
    NotBimodal,
    RasterImage,
    ThresholdReport,
    auto_threshold,
    channel_histogram,
    smooth_histogram,
    write_histogram_csv,
)

from reference import image_from_rows, ref_auto_threshold, ref_smooth


def _hist(**bins) -> ChannelHistogram:
    arr = np.zeros(256, dtype=np.int64)
    for key, count in bins.items():
        arr[int(key.lstrip("b"))] = count
    return ChannelHistogram(arr)


# --- channel_histogram ---------------------------------------------------------


def test_single_pixel_counts_selected_channel():
    img = image_from_rows([[(160, 20, 200)]])
    bins = channel_histogram(img, Channel.RED).bins
    assert bins[160] == 1
    assert bins.sum() == 1


def test_uniform_2x2_blue():
    img = RasterImage.full(2, 2, (50, 60, 70))
    bins = channel_histogram(img, Channel.BLUE).bins
    assert bins[70] == 4
    assert bins.sum() == 4


def test_conservation_and_permutation_invariance():
    rng = np.random.default_rng(11)
    arr = rng.integers(0, 256, size=(6, 7, 3), dtype=np.uint8)
    img = RasterImage(arr)
    flat = arr.reshape(-1, 3)
    shuffled = RasterImage(flat[rng.permutation(len(flat))].reshape(arr.shape))
    for ch in Channel:
        a = channel_histogram(img, ch)
        b = channel_histogram(shuffled, ch)
        assert a.bins.sum() == 42
        assert (a.bins == b.bins).all()


def test_histogram_bins_validation():
    with pytest.raises(ValueError):
        ChannelHistogram(np.zeros(255, dtype=np.int64))
    with pytest.raises(ValueError):
        ChannelHistogram(np.full(256, -1, dtype=np.int64))


# --- smooth_histogram -----------------------------------------------------------


def test_window_one_is_identity():
    h = _hist(b0=3, b100=5, b255=9)
    assert (smooth_histogram(h, 1) == h.bins).all()


def test_impulse_window_five_spreads_evenly():
    smoothed = smooth_histogram(_hist(b100=5), 5)
    assert smoothed[97] == 0.0
    assert (smoothed[98:103] == 1.0).all()
    assert smoothed[103] == 0.0


def test_uniform_histogram_unchanged():
    h = ChannelHistogram(np.full(256, 4, dtype=np.int64))
    assert (smooth_histogram(h, 7) == 4.0).all()


def test_window_shrinks_at_edges():
    # impulse at 0: windows covering it have sizes 3, 4, 5
    smoothed = smooth_histogram(_hist(b0=60), 5)
    assert smoothed[0] == 20.0
    assert smoothed[1] == 15.0
    assert smoothed[2] == 12.0
    assert smoothed[3] == 0.0


@pytest.mark.parametrize("window", [0, 2, 4, -1, 33, 1.0, "5"])
def test_bad_windows_rejected(window):
    with pytest.raises(InvalidWindow):
        smooth_histogram(_hist(b1=1), window)


def test_smooth_matches_reference():
    rng = np.random.default_rng(5)
    bins = rng.integers(0, 1000, size=256)
    h = ChannelHistogram(bins.astype(np.int64))
    for window in (1, 3, 5, 9, 31):
        got = smooth_histogram(h, window)
        want = ref_smooth([int(v) for v in bins], window)
        assert all(abs(g - float(w)) < 1e-9 for g, w in zip(got, want))


# --- auto_threshold --------------------------------------------------------------


def test_two_equal_impulses_valley_ties_low():
    report = auto_threshold(_hist(b40=1000, b200=1000))
    assert report.mode == "auto"
    assert report.dark_peak == 40
    assert report.bright_peak == 200
    # the span between the peaks is all zeros; ties break to the lowest tone
    assert report.valley == 41
    assert report.threshold == 41


def test_constructed_bimodal_matches_brute_force_argmin():
    bins = np.zeros(256, dtype=np.int64)
    bins[40] = 1000
    bins[200] = 8000
    # small ramp between the peaks, dipping lowest at 120
    for i in range(41, 200):
        bins[i] = 5 + abs(i - 120) // 4
    bins[120] = 0
    report = auto_threshold(ChannelHistogram(bins))
    between = bins[41:200]
    assert report.threshold == 41 + int(np.argmin(between))
    assert 40 < report.threshold < 200
    assert report.threshold == 120


def test_uniform_histogram_not_bimodal():
    with pytest.raises(NotBimodal):
        auto_threshold(ChannelHistogram(np.full(256, 10, dtype=np.int64)))


def test_bright_only_histogram_not_bimodal():
    with pytest.raises(NotBimodal):
        auto_threshold(_hist(b200=5000))


def test_tiny_dark_peak_below_floor_not_bimodal():
    # dark peak must reach 0.1% of all pixels after smoothing
    bins = _hist(b40=1, b200=100000)
    with pytest.raises(NotBimodal):
        auto_threshold(bins)


def test_dark_peak_just_at_floor_accepted():
    # smoothed dark peak = 1000/5 = 200 = 0.1% of ~200k pixels: on the floor
    bins = np.zeros(256, dtype=np.int64)
    bins[40] = 1000
    bins[200] = 199000
    report = auto_threshold(ChannelHistogram(bins))
    assert report.dark_peak == 40


def test_close_peaks_with_thin_gap():
    # peaks straddling the bright-half boundary, five-bin gap between them
    report = auto_threshold(_hist(b124=100, b130=110))
    assert report.dark_peak == 124
    assert report.bright_peak == 130
    assert report.valley == 125  # all-zero span, lowest index wins
    assert report.threshold == 125


def test_matches_reference_on_random_bimodal_histograms():
    rng = np.random.default_rng(17)
    for _ in range(40):
        bins = np.zeros(256, dtype=np.int64)
        dark = int(rng.integers(0, 120))
        bright = int(rng.integers(140, 256))
        bins[dark] = int(rng.integers(500, 2000))
        bins[bright] = int(rng.integers(5000, 9000))
        noise_at = rng.integers(0, 256, size=30)
        for i in noise_at:
            bins[i] += int(rng.integers(0, 5))
        want = ref_auto_threshold([int(v) for v in bins])
        try:
            got = auto_threshold(ChannelHistogram(bins))
        except NotBimodal:
            assert want is None
            continue
        assert want is not None
        assert got.dark_peak == want["dark_peak"]
        assert got.bright_peak == want["bright_peak"]
        assert got.valley == want["valley"]
        assert got.threshold == want["threshold"]
        assert got.dark_peak < got.threshold <= got.bright_peak


def test_identical_histograms_give_identical_reports():
    bins = _hist(b30=900, b210=7000)
    assert auto_threshold(bins) == auto_threshold(bins)


# --- ThresholdReport -------------------------------------------------------------


def test_report_invariants_enforced():
    ThresholdReport(threshold=160, mode="manual")  # peaks optional in manual mode
    with pytest.raises(ValueError):
        ThresholdReport(threshold=160, mode="auto")  # auto requires the analysis
    with pytest.raises(ValueError):
        ThresholdReport(threshold=100, mode="auto", dark_peak=50, bright_peak=200, valley=120)
    with pytest.raises(ValueError):
        ThresholdReport(threshold=40, mode="auto", dark_peak=50, bright_peak=200, valley=40)
    with pytest.raises(ValueError):
        ThresholdReport(threshold=300, mode="manual")
    with pytest.raises(ValueError):
        ThresholdReport(threshold=160, mode="sideways")


# --- CSV export -------------------------------------------------------------------


def test_histogram_csv_layout(tmp_path):
    img = image_from_rows([[(1, 2, 3), (1, 200, 3)]])
    hists = [channel_histogram(img, ch) for ch in Channel]
    path = tmp_path / "hist.csv"
    write_histogram_csv(path, *hists)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["bin", "red", "green", "blue"]
    assert len(rows) == 257
    assert rows[2] == ["1", "2", "0", "0"]  # tone 1: both pixels have red 1
    table = {int(r[0]): (int(r[1]), int(r[2]), int(r[3])) for r in rows[1:]}
    assert table[1] == (2, 0, 0)
    assert table[2] == (0, 1, 0)
    assert table[200] == (0, 1, 0)
    assert table[3] == (0, 0, 2)
    assert sum(v[0] for v in table.values()) == 2
