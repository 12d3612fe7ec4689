"""
Unmodulated cavity: strong coupling reflects, weak coupling transmits
=====================================================================

A photon arriving one mechanical frequency above the pumped cavity mode
is converted and transmitted when the optomechanical coupling is weak,
and is reflected once the normal modes split.  The routing fails anyway,
because the photon's spectral weight that far from its centre is tiny
compared with the thermal and vacuum floor.
"""

import numpy as np

from optomech_router import (
    assess_stability,
    derive_constants,
    drift_case1,
    output_spectra,
    paper_preset,
    route_decision,
    scatter,
    DriveParams,
)

raw, drive = paper_preset(1)
p = derive_constants(raw)
wm = p.omega_m
print(f"omega_c = {p.omega_c:.4e} rad/s, g0 = {p.g0:.3f} rad/s")

# Stability first: the linearisation only means something if it holds.
report = assess_stability(drift_case1(p, drive.G))
print("stable at G = 0.2 omega_m:", report.stable, "| Routh-Hurwitz agrees:", report.consistent)

# Scattering probabilities at nu = omega_m for the three couplings.
print(f"\n{'G/wm':>8} {'F1c':>10} {'F1d':>10} {'F3':>10} {'F4':>10} {'F6':>10}")
for ratio in (1e-4, 0.1, 0.2):
    s = scatter(drift_case1(p, ratio * wm), wm)
    print(f"{ratio:8g} {s.F1_c:10.3e} {s.F1_d:10.3e} {s.F3:10.3e} {s.F4:10.3e} {s.F6:10.3e}")

# The doublet: where does F1d turn over for G = 0.2 omega_m?
nu = np.linspace(0, 2 * wm, 4001)
F1d = scatter(drift_case1(p, 0.2 * wm), nu).F1_d
inner = F1d[1:-1]
turns = nu[1:-1][((inner > F1d[:-2]) & (inner > F1d[2:])) | ((inner < F1d[:-2]) & (inner < F1d[2:]))]
print("\nF1d turning points (units of omega_m):", np.round(turns / wm, 4))
print("sqrt(1 -+ 2G/wm):", np.round(np.sqrt([1 - 0.4, 1 + 0.4]), 4))

# Signal against noise with the most favourable photon linewidth.
for ratio in (1e-4, 0.1, 0.2):
    v = route_decision(p, DriveParams(G=ratio * wm), Gamma=wm, n_th=1.0)
    print(f"G = {ratio:g} wm: contrast {v.contrast:+.3f}, snr {max(v.snr_c, v.snr_d):.2e} -> {v.decision.value}")

probs = scatter(drift_case1(p, 0.1 * wm), wm)
d = output_spectra(probs, wm, 1.0, wm)
print(f"\nat G = 0.1 wm: signal {d.signal_c:.2e} s vs noise {d.noise:.2e} s")
