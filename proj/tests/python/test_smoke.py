import math

import pytest

import pasldpc as pl


def test_constellation_and_pmf():
    c = pl.make_ask(4)
    assert len(c.points) == 16
    pmf = pl.mb_from_entropy(c, 3.45)
    assert abs(pmf.entropy_bits() - 3.45) < 1e-8
    op = pl.operating_pmf(2.7, 13 / 16, 4)
    assert abs(op.entropy_bits() - 3.45) < 1e-8


def test_rates_roundtrip():
    c = pl.make_ask(4)
    pmf = pl.operating_pmf(2.1, 13 / 16, 4)
    snr = pl.bmd_rate_inverse(c, pmf, 2.1)
    src = pl.scale_to_snr(c, pmf, snr)
    assert abs(pl.bmd_rate(src) - 2.1) < 1e-4
    assert pl.bmd_rate(src) <= pl.awgn_capacity(snr) + 1e-9


def test_surrogates_and_threshold():
    c = pl.make_ask(4)
    pmf = pl.operating_pmf(2.1, 13 / 16, 4)
    snr = pl.bmd_rate_inverse(c, pmf, 2.1)
    sset = pl.fit_surrogates(pl.scale_to_snr(c, pmf, snr))
    assert len(sset.sigmas) == 4
    assert sorted(pl.ordering_signature(sset)) == [1, 2, 3, 4]

    a = pl.robust_base_matrix()
    assert a.violations() == []
    analyzer = pl.ThresholdAnalyzer(13 / 16, 4)
    gap = analyzer.gap_db(a, 2.1)
    assert 0.0 < gap < 2.0


def test_lift_and_ccdm():
    a = pl.robust_base_matrix()
    h = pl.lift_circulant(pl.expand_parallel(a, 3), 14, seed=7)
    assert (h.rows, h.cols) == (126, 672)
    # Q = 14 is too small for a 6-girth lift of this protograph; a larger
    # circulant size admits one.
    big = pl.lift_circulant(pl.expand_parallel(a, 3), 169, seed=1)
    assert pl.girth(big, 8) >= 6

    comp = pl.Composition([3, 2, 1, 2])
    k = pl.ccdm_input_bits(comp)
    assert k == 10
    bits = [1, 0, 1, 1, 0, 0, 1, 0, 1, 0]
    amps = pl.ccdm_encode(bits, comp)
    assert sorted(amps) == [0, 0, 0, 1, 1, 2, 3, 3]
    assert pl.ccdm_decode(amps, comp) == bits


def test_fer_smoke():
    a = pl.robust_base_matrix()
    h = pl.lift_circulant(pl.expand_parallel(a, 3), 14, seed=7)
    cfg = pl.SimConfig()
    cfg.max_frames = 20
    cfg.min_errors = 1000  # never stop early
    res = pl.run_fer_point(h, 2.1, 60.0, cfg)
    assert res.frames == 20
    assert res.frame_errors == 0
    lo, hi = pl.clopper_pearson(0, 100)
    assert lo == 0.0 and abs(hi - (1 - 0.025 ** 0.01)) < 1e-6
