"""Transfer coefficients, port scattering probabilities and output spectra.

The spectral variable ``nu`` is the Fourier frequency in the frame that
defines the drift matrix (pump frame for case I, pump + ``omega_d`` for
case II).  The incoming photon's Lorentzian is centred at ``nu = 0``.

Every function accepts a scalar ``nu`` or a 1-D grid; grids are solved as a
single batched LU solve.
"""

from dataclasses import dataclass, fields
import csv
import io
import math

import numpy as np

from .errors import NotConverged, SingularMatrix

__all__ = [
    "TransferRow",
    "ScatterProbabilities",
    "SpectrumDecomposition",
    "transfer_row",
    "port_coefficients",
    "probabilities",
    "scatter",
    "input_spectrum",
    "output_spectra",
    "classical_probe_oracle",
    "CSV_COLUMNS",
    "spectrum_table",
    "write_spectrum_csv",
    "read_spectrum_csv",
]

RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class TransferRow:
    """Cavity-field response to ``(c_in, d_in, b_in, c_in^dag, d_in^dag, b_in^dag)``.

    ``f`` and ``f_primed`` have shape ``(6,)`` for a scalar ``nu`` and
    ``(6, N)`` for a grid.
    """

    nu: object
    f: np.ndarray
    f_primed: np.ndarray
    residual: float


def transfer_row(M, nu):
    """Solve ``(M + i nu I) Y = -diag(injection)`` and keep the cavity row.

    Column ``j`` of ``Y`` is the full state response to a unit input in slot
    ``j``; both optical ports share slots 1 and 3 with weight ``sqrt(2 kappa)``.
    The relative residual of the solve is checked for every ``nu``.

    Raises
    ------
    SingularMatrix
        ``M + i nu I`` is singular or the solve residual exceeds ``1e-12``.
    """
    nus = np.atleast_1d(np.asarray(nu, dtype=float))
    A = M.entries[None, :, :] + 1j * nus[:, None, None] * np.eye(4)[None]
    B = -np.diag(M.injection).astype(complex)
    try:
        Y = np.linalg.solve(A, np.broadcast_to(B, A.shape))
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"M + i nu I is singular: {exc}") from None
    if not np.all(np.isfinite(Y)):
        raise SingularMatrix("non-finite solution of M + i nu I")
    res = np.linalg.norm(A @ Y - B, axis=(1, 2)) / (
        np.linalg.norm(A, axis=(1, 2)) * np.linalg.norm(Y, axis=(1, 2))
        + np.linalg.norm(B)
    )
    worst = float(np.max(res))
    if worst > RESIDUAL_TOL:
        raise SingularMatrix(f"linear-solve residual {worst:.3e} exceeds {RESIDUAL_TOL:g}")
    row = Y[:, 0, :]  # cavity slot; columns are the four injection slots
    f = np.stack([row[:, 0], row[:, 0], row[:, 1], row[:, 2], row[:, 2], row[:, 3]])
    f_primed = M.noise_couplings[0] * f
    if np.ndim(nu) == 0:
        f, f_primed, nu_out = f[:, 0], f_primed[:, 0], float(nu)
    else:
        nu_out = nus
    return TransferRow(nu_out, f, f_primed, worst)


def port_coefficients(row):
    """Output-field coefficients of the reflected (c) and transmitted (d) ports."""
    f_c = np.array(row.f_primed, dtype=complex, copy=True)
    f_d = np.array(row.f_primed, dtype=complex, copy=True)
    f_c[0] -= 1.0
    f_d[1] -= 1.0
    return f_c, f_d


@dataclass(frozen=True)
class ScatterProbabilities:
    """Weights of signal, thermal and vacuum inputs in the output spectra.

    Fields are floats for a single ``nu`` or arrays on a grid.
    """

    F1_c: object
    F1_d: object
    F3: object
    F4: object
    F5: object
    F6: object

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def probabilities(f_c, f_d):
    p = np.abs(np.asarray(f_c)) ** 2
    return ScatterProbabilities(
        F1_c=p[0],
        F1_d=np.abs(np.asarray(f_d)[0]) ** 2,
        F3=p[2] + p[5],
        F4=p[3],
        F5=p[4],
        F6=p[5],
    )


def scatter(M, nu):
    """Shortcut: ``probabilities(*port_coefficients(transfer_row(M, nu)))``."""
    return probabilities(*port_coefficients(transfer_row(M, nu)))


def input_spectrum(Gamma, nu):
    """Unit-area Lorentzian of half-width ``Gamma`` centred at ``nu = 0`` (s)."""
    if Gamma <= 0:
        raise ValueError(f"Gamma must be > 0, got {Gamma!r}")
    nu = np.asarray(nu, dtype=float)
    out = (Gamma / math.pi) / (nu * nu + Gamma * Gamma)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SpectrumDecomposition:
    nu: object
    S_in_at_nu: object
    S_in_at_minus_nu: object
    signal_c: object
    signal_d: object
    thermal: object
    vacuum_c_back: object
    vacuum_d: object
    mech_vacuum: object
    S_c_out: object
    S_d_out: object

    @property
    def vacuum_total(self):
        return self.vacuum_c_back + self.vacuum_d + self.mech_vacuum

    @property
    def noise(self):
        """Everything that is not the routed photon."""
        return self.thermal + self.vacuum_total


def output_spectra(probs, Gamma, n_th, nu):
    """Reflected and transmitted spectra with every contribution kept apart.

    ``S_out = F1 S_in(nu) + F3 n_th + F4 (S_in(-nu) + 1) + F5 + F6``, with
    ``F1`` the port-specific signal weight.
    """
    if n_th < 0:
        raise ValueError(f"n_th must be >= 0, got {n_th!r}")
    s_plus = input_spectrum(Gamma, nu)
    s_minus = input_spectrum(Gamma, -np.asarray(nu, dtype=float))
    signal_c = probs.F1_c * s_plus
    signal_d = probs.F1_d * s_plus
    thermal = probs.F3 * n_th
    vac_c = probs.F4 * (s_minus + 1.0)
    floor = thermal + vac_c + probs.F5 + probs.F6
    return SpectrumDecomposition(
        nu=nu,
        S_in_at_nu=s_plus,
        S_in_at_minus_nu=s_minus,
        signal_c=signal_c,
        signal_d=signal_d,
        thermal=thermal,
        vacuum_c_back=vac_c,
        vacuum_d=probs.F5,
        mech_vacuum=probs.F6,
        S_c_out=signal_c + floor,
        S_d_out=signal_d + floor,
    )


def _rk4_affine(A, b, h):
    """One RK4 step of ``w' = A w + b`` written as ``w -> P w + q``."""
    n = A.shape[0]
    hA = h * A
    eye = np.eye(n)
    hA2 = hA @ hA
    hA3 = hA2 @ hA
    P = eye + hA + hA2 / 2 + hA3 / 6 + hA3 @ hA / 24
    q = h * (eye + hA / 2 + hA2 / 6 + hA3 / 24) @ b
    return P, q


def classical_probe_oracle(M, nu, port="optical", *, rtol=1e-7, max_damping_times=30):
    """Cavity response to a classical tone, by time integration.

    A unit tone ``exp(-i nu t)`` on the optical input (entering the cavity
    slot with weight ``sqrt(2 kappa)``) or the mechanical input (resonator
    slot, ``sqrt(2 gamma)``) drives the linear equations, which are stepped
    with classical RK4 in the frame co-rotating with the tone.  Steps are
    chained by repeated squaring of the one-step affine map, so long
    ring-downs cost only logarithmically many matrix products.  The
    returned ratio of cavity amplitude to input amplitude equals ``f_1``
    (optical) or ``f_3`` (mechanical) of :func:`transfer_row`.

    Raises
    ------
    NotConverged
        If the estimated remaining transient still exceeds ``rtol`` after
        ``max_damping_times`` decay times of the slowest mode.
    """
    slot = {"optical": 0, "mechanical": 1}[port]
    A = M.entries + 1j * nu * np.eye(4)
    b = np.zeros(4, dtype=complex)
    b[slot] = M.injection[slot]
    decay = -float(np.max(np.linalg.eigvals(M.entries).real))
    if decay <= 0:
        raise NotConverged("drift matrix is not stable; no steady oscillation")
    tau = 1.0 / decay
    h = 0.05 / float(np.max(np.sum(np.abs(A), axis=1)))
    P, q = _rk4_affine(A, b, h)
    # chunk of 2**k steps spanning about an eighth of a decay time
    k = max(0, int(math.ceil(math.log2(0.125 * tau / h))))
    for _ in range(k):
        P, q = P @ P, P @ q + q
    chunk = h * 2**k
    window = max(2, int(math.ceil(tau / chunk)))
    # the transient beats against the tone, so a single small step-to-step
    # change proves nothing; demand that the largest excursion over the last
    # decay time, scaled by the decay still to come, is below tolerance
    tail = 1.0 / (math.e - 1.0)
    history = []
    w = np.zeros(4, dtype=complex)
    t = 0.0
    while t <= max_damping_times * tau:
        w = P @ w + q
        t += chunk
        history.append(w[0])
        if len(history) > window:
            history.pop(0)
            spread = max(abs(w[0] - x) for x in history)
            if tail * spread <= rtol * abs(w[0]):
                return complex(w[0])
    raise NotConverged(
        f"cavity response still changing after {max_damping_times} damping times"
    )


# --- CSV --------------------------------------------------------------------

CSV_COLUMNS = (
    "nu_over_omega_m",
    "F1c",
    "F1d",
    "F3",
    "F4",
    "F5",
    "F6",
    "S_in",
    "S_c_out",
    "S_d_out",
    "signal_c",
    "signal_d",
    "thermal",
    "vacuum_total",
)


def spectrum_table(probs, decomp, omega_m):
    """Columns of :data:`CSV_COLUMNS` as a dict of 1-D arrays."""
    nu = np.atleast_1d(np.asarray(decomp.nu, dtype=float))
    cols = {
        "nu_over_omega_m": nu / omega_m,
        "F1c": probs.F1_c,
        "F1d": probs.F1_d,
        "F3": probs.F3,
        "F4": probs.F4,
        "F5": probs.F5,
        "F6": probs.F6,
        "S_in": decomp.S_in_at_nu,
        "S_c_out": decomp.S_c_out,
        "S_d_out": decomp.S_d_out,
        "signal_c": decomp.signal_c,
        "signal_d": decomp.signal_d,
        "thermal": decomp.thermal,
        "vacuum_total": decomp.vacuum_total,
    }
    return {k: np.broadcast_to(np.asarray(v, dtype=float), nu.shape) for k, v in cols.items()}


def write_spectrum_csv(path_or_file, table):
    """Write a spectrum table; floats use ``repr`` (shortest round-trip)."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        columns = [table[name] for name in CSV_COLUMNS]
        for values in zip(*columns):
            writer.writerow([repr(float(v)) for v in values])
    finally:
        if own:
            fh.close()


def read_spectrum_csv(path_or_text):
    """Inverse of :func:`write_spectrum_csv`; returns a dict of arrays."""
    if isinstance(path_or_text, str) and "\n" in path_or_text:
        fh = io.StringIO(path_or_text)
    else:
        fh = open(path_or_text, newline="", encoding="utf-8")
    with fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected header {header!r}")
        rows = [[float(x) for x in row] for row in reader]
    data = np.array(rows, dtype=float).reshape(-1, len(CSV_COLUMNS))
    return {name: data[:, i] for i, name in enumerate(CSV_COLUMNS)}
