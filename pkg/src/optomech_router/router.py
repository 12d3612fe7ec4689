"""Routing verdicts and the canned parameter sets of the three figures.

A verdict is taken at a single operating detuning: ``nu = omega_m`` for the
unmodulated drive (where the photon would have to sit to be converted) and
``nu = 0`` for the modulated drive.  "Routing works" means a port contrast
beyond 0.9 in magnitude together with a signal that is not buried in the
thermal and vacuum floor (snr >= 1).
"""

from dataclasses import dataclass
import enum
import json
import math
import os

import numpy as np

from .dynamics import assess_stability, drift_case1, drift_case2, drift_matrix
from .errors import InvalidParameter, UnstableSystem
from .model import DriveParams, derive_constants, paper_preset
from .spectra import output_spectra, scatter, spectrum_table, write_spectrum_csv

__all__ = [
    "Decision",
    "RoutingVerdict",
    "Curve",
    "Dataset",
    "CONTRAST_THRESHOLD",
    "SNR_THRESHOLD",
    "DEFAULT_NU_COUNT",
    "snr",
    "operating_nu",
    "route_decision",
    "reproduce",
    "write_dataset",
]

CONTRAST_THRESHOLD = 0.9
SNR_THRESHOLD = 1.0
DEFAULT_NU_COUNT = 4001


class Decision(enum.Enum):
    Transmit = "Transmit"
    Reflect = "Reflect"
    Indeterminate = "Indeterminate"


@dataclass(frozen=True)
class RoutingVerdict:
    """Outcome of :func:`route_decision`.

    ``contrast = (F1c - F1d) / (F1c + F1d)``: +1 is full reflection, -1 full
    transmission.  ``Gamma`` and ``n_th`` are the photon linewidth and bath
    occupation the SNRs were evaluated with.
    """

    decision: Decision
    contrast: float
    snr_c: float
    snr_d: float
    operating_nu: float
    Gamma: float = math.nan
    n_th: float = math.nan

    def as_dict(self):
        return {
            "decision": self.decision.value,
            "contrast": self.contrast,
            "snr_c": self.snr_c,
            "snr_d": self.snr_d,
            "operating_nu": self.operating_nu,
            "Gamma": self.Gamma,
            "n_th": self.n_th,
        }


def _decide(contrast, snr_c, snr_d):
    loud = max(snr_c, snr_d) >= SNR_THRESHOLD
    if loud and contrast < -CONTRAST_THRESHOLD:
        return Decision.Transmit
    if loud and contrast > CONTRAST_THRESHOLD:
        return Decision.Reflect
    return Decision.Indeterminate


def snr(decomp, port):
    """Signal over everything else (thermal plus vacuum) at each ``nu``.

    ``port`` is ``"c"`` (reflected) or ``"d"`` (transmitted).  An exactly
    zero noise floor gives ``inf``.
    """
    if port not in ("c", "d"):
        raise InvalidParameter(f"port must be 'c' or 'd', got {port!r}")
    signal = np.asarray(decomp.signal_c if port == "c" else decomp.signal_d, dtype=float)
    noise = np.asarray(decomp.noise, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(noise == 0.0, np.inf, signal / np.where(noise == 0.0, 1.0, noise))
    return float(out) if out.ndim == 0 else out


def operating_nu(params, drive):
    """``omega_m`` for case I, ``0`` for case II."""
    return 0.0 if drive.case == 2 else float(params.omega_m)


def route_decision(params, drive, Gamma=None, n_th=None):
    """Verdict at the operating detuning.

    ``Gamma`` and ``n_th`` default to the values carried by ``params``.

    Raises
    ------
    UnstableSystem
        The linearised dynamics have an eigenvalue with non-negative real part.
    """
    Gamma = params.Gamma_photon if Gamma is None else Gamma
    n_th = params.n_th if n_th is None else n_th
    M = drift_matrix(params, drive)
    report = assess_stability(M)
    if not report.stable:
        raise UnstableSystem(
            f"linearised dynamics unstable: max Re(lambda) = {report.max_real_part:.6g}"
        )
    nu = operating_nu(params, drive)
    probs = scatter(M, nu)
    decomp = output_spectra(probs, Gamma, n_th, nu)
    total = probs.F1_c + probs.F1_d
    contrast = float((probs.F1_c - probs.F1_d) / total) if total > 0 else 0.0
    snr_c, snr_d = snr(decomp, "c"), snr(decomp, "d")
    return RoutingVerdict(
        _decide(contrast, snr_c, snr_d), contrast, snr_c, snr_d, nu, float(Gamma), float(n_th)
    )


# --- figure presets ---------------------------------------------------------


@dataclass(frozen=True)
class Curve:
    """One parameter set evaluated on the figure grid."""

    label: str
    slug: str
    params: dict
    table: dict


@dataclass(frozen=True)
class Dataset:
    figure: str
    curves: list
    grid: dict

    def curve(self, label):
        for c in self.curves:
            if c.label == label:
                return c
        raise KeyError(label)


def _evaluate(params, drive, Gamma, n_th, nu):
    if drive.case == 1:
        M = drift_case1(params, drive.G)
    else:
        M = drift_case2(params, drive.G, drive.epsilon_d, drive.omega_d)
    probs = scatter(M, nu)
    decomp = output_spectra(probs, Gamma, n_th, nu)
    return spectrum_table(probs, decomp, params.omega_m)


def _curve_params(params, drive, Gamma, n_th):
    out = params.to_raw().as_dict()
    out.update(
        Gamma_photon=float(Gamma),
        n_th=float(n_th),
        G=float(drive.G),
        epsilon_d=float(drive.epsilon_d),
        omega_d=float(drive.omega_d),
    )
    return out


def _ratio_tag(x):
    return f"{x:g}".replace(".", "p").replace("-", "m")


def reproduce(figure_id, *, nu_count=DEFAULT_NU_COUNT, gamma_convention="linewidth"):
    """Evaluate the curves of ``fig2``, ``fig3`` or ``fig4``.

    fig2
        Unmodulated drive, ``G / omega_m`` in ``{1e-4, 0.1, 0.2}``, ``nu`` in
        ``[0, 2 omega_m]``, ``Gamma = omega_m``.
    fig3
        Modulated drive, ``G = 0.2 omega_m``, ``epsilon_d = 2.37e-4 kappa``,
        ``omega_d / omega_m`` in ``{0.8, 1}``, ``nu`` in ``[-omega_m, omega_m]``.
    fig4
        As fig3 with ``omega_d / omega_m`` in ``{0.8, 0.85, 0.9, 1}``,
        ``n_th = 1`` and ``Gamma = 0.01 kappa``.

    Each curve carries the full spectrum table, so all six probability
    panels and both output spectra come from the same dataset.
    """
    key = str(figure_id).lower()
    if key not in ("fig2", "fig3", "fig4"):
        raise InvalidParameter(f"figure_id must be fig2, fig3 or fig4, got {figure_id!r}")
    if nu_count < 2:
        raise InvalidParameter(f"nu_count must be >= 2, got {nu_count!r}")
    raw1, _ = paper_preset(1, gamma_convention)
    raw2, drive2 = paper_preset(2, gamma_convention)
    wm = raw1.omega_m
    curves = []
    if key == "fig2":
        params = derive_constants(raw1)
        lo, hi = 0.0, 2.0 * wm
        nu = np.linspace(lo, hi, nu_count)
        Gamma, n_th = params.omega_m, 1.0
        for ratio in (1e-4, 0.1, 0.2):
            drive = DriveParams(G=ratio * wm)
            curves.append(
                Curve(
                    f"G/omega_m = {ratio:g}",
                    f"fig2_G_{_ratio_tag(ratio)}",
                    _curve_params(params, drive, Gamma, n_th),
                    _evaluate(params, drive, Gamma, n_th, nu),
                )
            )
    else:
        params = derive_constants(raw2)
        lo, hi = -wm, wm
        nu = np.linspace(lo, hi, nu_count)
        Gamma, n_th = 0.01 * params.kappa, 1.0
        ratios = (0.8, 1.0) if key == "fig3" else (0.8, 0.85, 0.9, 1.0)
        for ratio in ratios:
            drive = DriveParams(G=drive2.G, epsilon_d=drive2.epsilon_d, omega_d=ratio * wm)
            curves.append(
                Curve(
                    f"omega_d/omega_m = {ratio:g}",
                    f"{key}_wd_{_ratio_tag(ratio)}",
                    _curve_params(params, drive, Gamma, n_th),
                    _evaluate(params, drive, Gamma, n_th, nu),
                )
            )
    return Dataset(key, curves, {"min": float(lo), "max": float(hi), "count": int(nu_count)})


def write_dataset(dataset, out_dir):
    """One CSV per curve plus ``manifest.json``; returns the manifest path.

    ``csv_path`` entries are relative to ``out_dir``.
    """
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for c in dataset.curves:
        name = c.slug + ".csv"
        write_spectrum_csv(os.path.join(out_dir, name), c.table)
        entries.append({"label": c.label, "params": c.params, "csv_path": name})
    manifest = {"figure": dataset.figure, "curves": entries, "grid": dataset.grid}
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
