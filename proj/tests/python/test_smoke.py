"""End-to-end smoke tests of the python bindings."""

import math
import os

import numpy as np
import pytest

import qdcascade as q


def device1():
    p = q.SourceParams()
    p.fss_uev = 4.8
    p.tau_x_ps = 60.0
    p.tau_xx_ps = 50.0
    p.tau_ss_ps = 15000.0
    p.eta_xx = 0.9
    p.eta = 0.85
    p.xi = 0.07
    p.overlap_m = 0.9
    return p


def test_model_density_matrix_is_a_valid_state():
    rho = q.model_density_matrix(device1())
    assert rho.shape == (4, 4)
    assert np.allclose(rho, rho.conj().T, atol=1e-12)
    assert abs(np.trace(rho) - 1.0) < 1e-12
    assert np.linalg.eigvalsh(rho).min() > -1e-10


def test_fidelity_anchors():
    rho = q.model_density_matrix(device1())
    assert q.fidelity_to_psi_plus(rho) == pytest.approx(0.917, abs=1e-3)
    assert q.fidelity_from_correlations(0.92, 0.81, -0.80) == pytest.approx(0.8825, abs=1e-12)
    assert q.pair_collection_probability(0.9, 0.85, 0.001, 0.007) == pytest.approx(0.648, abs=1e-3)
    assert q.collection_efficiency_from_rate(3.4, 79, 0.07, 1.25, 0.9) == pytest.approx(0.854, abs=5e-3)
    assert q.purcell_factor(210, 60) == pytest.approx(3.5)


def test_correlations_and_curve():
    rho = q.model_density_matrix(device1())
    c_lin = q.predicted_correlation(rho, q.Basis.linear)
    c_diag = q.predicted_correlation(rho, q.Basis.diagonal)
    c_circ = q.predicted_correlation(rho, q.Basis.circular)
    assert c_lin == pytest.approx(q.scattering_survival(60.0, 15000.0), abs=1e-12)
    assert c_diag == pytest.approx(-c_circ, abs=1e-12)

    curve = q.fidelity_vs_fss_curve(device1(), [0.0, 4.8, 10.0])
    assert curve[1][1] == pytest.approx(0.917, abs=1e-3)
    assert curve[2][1] > 0.75

    c = q.coherence_factor(4.8, 60.0)
    x = 4.8 * 60.0 / q.hbar_uev_ps()
    assert c == pytest.approx(1.0 / (1.0 - 1j * x))


def test_validation_errors_are_python_exceptions():
    with pytest.raises(ValueError):
        q.purcell_factor(-1.0, 60.0)
    with pytest.raises(ValueError):
        q.fidelity_from_correlations(2.0, 0.0, 0.0)


def test_simulate_analyze_round_trip(tmp_path):
    params = device1()
    params.g2_x = 0.05

    config = q.ExperimentConfig()
    config.kind = q.ExperimentKind.hbt_x
    config.n_pulses = 300000
    config.seed = 11
    config.irf_sigma_ps = 50.0

    stream = q.simulate(params, config)
    assert len(stream) > 1000
    ts = stream.timestamps_ps()
    assert (np.diff(ts) >= 0).all()
    assert set(np.unique(stream.channels())) <= {0, 1}

    path = tmp_path / "run.cstg"
    q.write_tagfile(stream, path, "binary")
    back = q.read_tagfile(path)
    assert len(back) == len(stream)
    assert (back.timestamps_ps() == ts).all()
    assert back.params.g2_x == pytest.approx(0.05)

    estimates = q.analyze_streams([back])
    g2, sigma = estimates["g2_x"]
    assert g2 == pytest.approx(0.05, abs=3.5 * sigma)
    eta, eta_sigma = estimates["eta"]
    assert eta == pytest.approx(0.85, abs=3.5 * eta_sigma + 0.005)


def test_fss_fit():
    angles = [10.0 * i for i in range(19)]
    energies = [1200.0 + 2.4 * math.sin(2.0 * math.radians(t) + 0.3) for t in angles]
    s, sigma = q.fit_fss(angles, energies)
    assert s == pytest.approx(4.8, abs=1e-6)
    assert sigma >= 0.0


def test_histogram_and_estimator_surface():
    params = device1()
    params.g2_x = 0.05
    config = q.ExperimentConfig()
    config.kind = q.ExperimentKind.hbt_x
    config.n_pulses = 400000
    config.seed = 21
    stream = q.simulate(params, config)

    period = params.rep_period_ps()
    ts = stream.timestamps_ps()
    ch = stream.channels()
    a = ts[ch == 0].astype("int64")
    b = ts[ch == 1].astype("int64")
    reach = 50.0 * math.ceil(5.5 * period / 50.0)
    hist = q.build_histogram(a, b, 50.0, -reach, reach, rep_period_ps=period)
    assert hist.total() > 0
    assert len(hist.counts()) == len(hist.bin_centers())

    peaks = q.integrate_peaks(hist, period, period / 2.0)
    g2, sigma = q.g2_zero(peaks)
    assert g2 == pytest.approx(0.05, abs=3.5 * sigma)

    same = q.stream_peak_areas(stream)
    assert q.g2_zero(same) == (g2, sigma)


def test_lifetime_fit_surface():
    params = device1()
    config = q.ExperimentConfig()
    config.kind = q.ExperimentKind.lifetime_x
    config.n_pulses = 500000
    config.seed = 22
    config.irf_sigma_ps = 50.0
    stream = q.simulate(params, config)

    ts = stream.timestamps_ps()
    ch = stream.channels()
    hist = q.build_histogram(ts[ch == 0].astype("int64"), ts[ch == 1].astype("int64"),
                             5.0, -2000.0, 10000.0)
    fit = q.fit_lifetime(hist, 50.0)
    tau, sigma = fit["tau_ps"]
    assert tau == pytest.approx(60.0, rel=0.02)
    assert sigma > 0
