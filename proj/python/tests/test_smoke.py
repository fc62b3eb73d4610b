import math

import numpy as np
import pytest

import bpgof


def test_sample_shape_and_determinism():
    x = bpgof.sample_poisson([1.0, 1.0, 0.25], 40, seed=3)
    assert x.shape == (40, 2)
    assert (x >= 0).all()
    assert np.array_equal(x, bpgof.sample_poisson([1.0, 1.0, 0.25], 40, seed=3))
    assert bpgof.sample_poisson([1, 1, 1, 0.25], 10, seed=1).shape == (10, 3)


def test_estimate_matches_means():
    x = bpgof.sample_poisson([2.0, 1.5, 0.5], 400, seed=7)
    est = bpgof.estimate(x)
    assert est["method"] == "mle"
    assert est["converged"]
    # The MLE preserves the marginal sample means.
    assert est["theta"][0] == pytest.approx(x[:, 0].mean(), rel=1e-6)
    assert est["theta"][1] == pytest.approx(x[:, 1].mean(), rel=1e-6)
    mom = bpgof.estimate(x, method="moment")
    assert mom["theta"][2] == pytest.approx(np.cov(x.T, bias=True)[0, 1])


def test_statistics():
    x = bpgof.sample_poisson([1.0, 1.0, 0.25], 50, seed=11)
    for name in ["tn", "tn-quad", "rn", "sn", "wn"]:
        s = bpgof.statistic(x, name)
        assert s["value"] >= 0.0
        assert s["p_asym"] is None
    tq = bpgof.statistic(x, "tn-quad")["value"]
    assert bpgof.statistic(x, "tn")["value"] == pytest.approx(tq, rel=1e-9)
    ib = bpgof.statistic(x, "ib")
    assert ib["df"] == 2 * 50 - 3
    assert 0.0 <= ib["p_asym"] <= 1.0
    assert set(bpgof.statistic_names()) >= {"tn", "t3", "w3", "crockett", "nib"}


def test_bootstrap_report():
    x = bpgof.sample_poisson([1.0, 1.0, 0.25], 30, seed=5)
    r = bpgof.bootstrap_test(x, "wn", B=19, seed=2, keep_replicates=True)
    for key in ["statistic", "value", "p_boot", "theta_hat", "B", "seed", "n", "flags"]:
        assert key in r
    assert r["B"] == 19 and r["n"] == 30
    assert len(r["replicates"]) == 19
    exceed = sum(v >= r["value"] for v in r["replicates"])
    assert r["p_boot"] == pytest.approx((1 + exceed) / 20)
    again = bpgof.bootstrap_test(x, "wn", B=19, seed=2, workers=2)
    assert again["p_boot"] == r["p_boot"]


def test_alternatives():
    m = bpgof.alternative_moments("BB(2;0.61,0.01,0.01)")
    assert m["dispersion"][0] == pytest.approx(0.39)
    d = 1.0 - math.exp(-1.0)
    bls = bpgof.alternative_moments("BLS(3d/7,2d/7,2d/7)")
    assert bls["params"][0] == pytest.approx(3 * d / 7)
    assert bpgof.sample_alternative("BNB(4;0.93,0.01,0.01)", 25, seed=1).shape == (25, 2)


def test_ks_uniformity():
    stat, p = bpgof.ks_uniformity(list(np.linspace(0.005, 0.995, 100)))
    assert stat == pytest.approx(0.005)
    assert p > 0.99


def test_errors():
    with pytest.raises(ValueError):
        bpgof.sample_poisson([1.0, 1.0, 2.0], 10)
    with pytest.raises(bpgof.ParseError):
        bpgof.alternative_moments("XX(1)")
    with pytest.raises(ValueError):
        bpgof.statistic(np.array([[1, -1]]), "wn")
    with pytest.raises(bpgof.DegenerateSampleError):
        bpgof.estimate(np.zeros((10, 2), dtype=int), method="moment")
