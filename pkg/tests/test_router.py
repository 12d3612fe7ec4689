import json
import math

import numpy as np
import pytest

from optomech_router.dynamics import drift_case1
from optomech_router.errors import InvalidParameter, UnstableSystem
from optomech_router.model import DriveParams
from optomech_router.router import (
    Decision,
    _decide,
    reproduce,
    route_decision,
    snr,
    write_dataset,
)
from optomech_router.spectra import (
    SpectrumDecomposition,
    output_spectra,
    read_spectrum_csv,
    scatter,
)


def test_case1_snr_tiny(preset1):
    p, _ = preset1
    wm = p.omega_m
    probs = scatter(drift_case1(p, 0.1 * wm), wm)
    d = output_spectra(probs, wm, 1.0, wm)
    assert snr(d, "c") < 1e-3 and snr(d, "d") < 1e-3
    assert d.signal_c < 1e-6
    assert 1e-3 < d.noise < 1e-1


def test_case2_snr_above_one(preset2):
    p, drive = preset2
    v = route_decision(p, drive)
    assert v.snr_d > 1
    assert v.Gamma == pytest.approx(0.01 * p.kappa)


def test_snr_falls_with_bath_occupation(preset2):
    p, drive = preset2
    values = [route_decision(p, drive, n_th=n).snr_d for n in (0.0, 1.0, 10.0, 1e3, 1e6)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-3


def test_snr_zero_floor_is_infinite():
    zero = 0.0
    d = SpectrumDecomposition(0.0, 1.0, 1.0, 0.5, 0.5, zero, zero, zero, zero, 0.5, 0.5)
    assert snr(d, "c") == math.inf
    with pytest.raises(InvalidParameter):
        snr(d, "x")


def test_snr_on_grid(preset1):
    p, _ = preset1
    nu = np.linspace(0, 2 * p.omega_m, 11)
    d = output_spectra(scatter(drift_case1(p, 0.1 * p.omega_m), nu), p.omega_m, 1.0, nu)
    assert snr(d, "d").shape == (11,)


def test_case2_verdicts(preset2):
    p, drive = preset2
    assert route_decision(p, drive).decision is Decision.Transmit
    reflect = DriveParams(drive.G, drive.epsilon_d, p.omega_m)
    v = route_decision(p, reflect)
    assert v.decision is Decision.Reflect
    assert v.contrast > 0.9 and v.operating_nu == 0.0


@pytest.mark.parametrize("ratio", [1e-4, 0.1, 0.2])
def test_case1_indeterminate(preset1, ratio):
    p, _ = preset1
    v = route_decision(p, DriveParams(G=ratio * p.omega_m), Gamma=p.omega_m, n_th=1.0)
    assert v.decision is Decision.Indeterminate
    assert v.operating_nu == p.omega_m


def test_case1_negative_result_is_robust(preset1):
    p, _ = preset1
    wm = p.omega_m
    Gammas = wm * np.logspace(-3, 2, 20)
    for G in wm * np.logspace(-4, math.log10(0.2), 20):
        drive = DriveParams(G=G)
        best = max(
            (route_decision(p, drive, Gamma=g, n_th=1.0) for g in Gammas),
            key=lambda v: max(v.snr_c, v.snr_d),
        )
        assert best.decision is Decision.Indeterminate


def test_verdict_symmetry():
    for contrast, sc, sd in [(0.95, 2.0, 0.1), (-0.97, 0.0, 5.0), (0.5, 3.0, 3.0), (0.99, 0.1, 0.2)]:
        a = _decide(contrast, sc, sd)
        b = _decide(-contrast, sd, sc)
        swap = {Decision.Transmit: Decision.Reflect, Decision.Reflect: Decision.Transmit}
        assert b is swap.get(a, a)


def test_unstable_raises(preset1):
    p, _ = preset1
    with pytest.raises(UnstableSystem):
        route_decision(p, DriveParams(G=0.6 * p.omega_m))


def test_verdict_as_dict(preset2):
    p, drive = preset2
    d = route_decision(p, drive).as_dict()
    assert json.loads(json.dumps(d))["decision"] == "Transmit"


def test_fig2_dataset():
    data = reproduce("fig2")
    assert [c.label for c in data.curves] == ["G/omega_m = 0.0001", "G/omega_m = 0.1", "G/omega_m = 0.2"]
    assert data.grid == {"min": 0.0, "max": pytest.approx(2 * 2 * math.pi * 134e3), "count": 4001}
    weak = data.curves[0].table
    peak = weak["nu_over_omega_m"][np.argmax(weak["F1d"])]
    assert abs(peak - 1.0) <= 1.001 * 2.0 / 4000
    for c in data.curves:
        for panel in ("F1c", "F1d", "F3", "F4", "F5", "F6"):
            assert c.table[panel].shape == (4001,)


def test_fig3_valleys():
    data = reproduce("fig3")
    t = data.curve("omega_d/omega_m = 0.8").table
    L1c, nu = t["F1c"], t["nu_over_omega_m"]
    inner = L1c[1:-1]
    valleys = nu[1:-1][(inner < L1c[:-2]) & (inner < L1c[2:])]
    for target in (0.0, 0.4):
        assert np.min(np.abs(valleys - target)) <= 1.001 * 2.0 / 4000


def test_fig4_monotone_crossover():
    data = reproduce("fig4")
    assert len(data.curves) == 4
    zero = 2000
    S_d = [c.table["S_d_out"][zero] for c in data.curves]
    S_c = [c.table["S_c_out"][zero] for c in data.curves]
    assert S_d[0] > S_d[1] > S_d[2] > S_d[3]
    assert S_c[0] < S_c[1] < S_c[2] < S_c[3]
    for c in data.curves:
        assert c.params["n_th"] == 1.0
        assert c.params["Gamma_photon"] == pytest.approx(0.01 * c.params["kappa"])


def test_reproduce_rejects_unknown():
    with pytest.raises(InvalidParameter):
        reproduce("fig5")
    with pytest.raises(InvalidParameter):
        reproduce("fig2", nu_count=1)


def test_write_dataset(tmp_path):
    data = reproduce("fig3", nu_count=101)
    manifest_path = write_dataset(data, tmp_path)
    manifest = json.loads(open(manifest_path).read())
    assert manifest["figure"] == "fig3"
    assert manifest["grid"]["count"] == 101
    assert len(manifest["curves"]) == 2
    for entry, curve in zip(manifest["curves"], data.curves):
        assert set(entry) == {"label", "params", "csv_path"}
        table = read_spectrum_csv(str(tmp_path / entry["csv_path"]))
        assert np.array_equal(table["S_d_out"], curve.table["S_d_out"])
