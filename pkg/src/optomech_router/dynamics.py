"""Linearized fluctuation dynamics and their stability.

The fluctuation vector is ordered ``(a, b, a^dag, b^dag)``.  Case I is the
plain red-detuned drive including the counter-rotating ``a^dag b^dag``
coupling; case II is the rotating-wave Hamiltonian in the frame rotating at
``omega_d`` with the two-phonon modulation ``epsilon_d``.
"""

from dataclasses import dataclass, field
import enum
import math
import warnings

import numpy as np

from .errors import ComplexCharPoly

__all__ = [
    "CaseTag",
    "DriftMatrix",
    "StabilityReport",
    "RWAValidityWarning",
    "StabilityDisagreementWarning",
    "drift_case1",
    "drift_case2",
    "drift_matrix",
    "characteristic_polynomial",
    "routh_hurwitz",
    "assess_stability",
]

CHARPOLY_REAL_TOL = 1e-8


class RWAValidityWarning(UserWarning):
    """Modulation frequency is not well separated from G and the cavity width."""


class StabilityDisagreementWarning(RuntimeWarning):
    """Eigenvalue and Routh-Hurwitz verdicts differ (eigenvalues win)."""


class CaseTag(enum.Enum):
    CaseI = "I"
    CaseII = "II"


@dataclass(frozen=True)
class DriftMatrix:
    entries: np.ndarray
    case_tag: CaseTag
    kappa: float
    gamma: float
    delta_small: float = math.nan
    Delta_m: float = math.nan
    noise_couplings: tuple = field(init=False)

    def __post_init__(self):
        rate_c = math.sqrt(2.0 * self.kappa)
        object.__setattr__(
            self, "noise_couplings", (rate_c, rate_c, math.sqrt(2.0 * self.gamma))
        )

    @property
    def injection(self):
        """Diagonal weights with which each input enters the four slots."""
        rate_c, _, rate_b = self.noise_couplings
        return np.array([rate_c, rate_b, rate_c, rate_b])


def drift_case1(params, G, *, counter_rotating=True):
    """Drift matrix of the unmodulated system (real ``G``, ``Delta' ~ Delta``).

    ``counter_rotating=False`` drops the ``a b`` / ``a^dag b^dag`` entries and
    leaves the beam-splitter part only; it exists for comparison with case II.
    """
    if G < 0:
        raise ValueError(f"G must be >= 0, got {G!r}")
    k2, g = 2.0 * params.kappa, params.gamma_m
    D, wm = params.Delta, params.omega_m
    cr = -1j * G if counter_rotating else 0.0
    M = np.array(
        [
            [-k2 - 1j * D, -1j * G, 0.0, cr],
            [-1j * G, -g - 1j * wm, cr, 0.0],
            [0.0, -cr, 1j * D - k2, 1j * G],
            [-cr, 0.0, 1j * G, 1j * wm - g],
        ],
        dtype=complex,
    )
    return DriftMatrix(M, CaseTag.CaseI, params.kappa, params.gamma_m)


def drift_case2(params, G, epsilon_d, omega_d):
    """Drift matrix in the frame rotating at ``omega_d`` (rotating-wave form).

    Warns with :class:`RWAValidityWarning` when ``2 omega_d`` is below ten
    times ``max(G, 2 kappa)``; the matrix is returned regardless.
    """
    if G < 0 or epsilon_d < 0 or omega_d < 0:
        raise ValueError("G, epsilon_d and omega_d must be >= 0")
    k2, g = 2.0 * params.kappa, params.gamma_m
    delta = params.Delta - omega_d
    Dm = params.omega_m - omega_d
    if omega_d > 0 and 2.0 * omega_d < 10.0 * max(G, k2):
        warnings.warn(
            f"2*omega_d = {2 * omega_d:.4g} rad/s is not >> max(G, 2 kappa) = "
            f"{max(G, k2):.4g} rad/s; rotating-wave terms may matter",
            RWAValidityWarning,
            stacklevel=2,
        )
    e2 = 2.0 * epsilon_d
    M = np.array(
        [
            [-k2 - 1j * delta, -1j * G, 0.0, 0.0],
            [-1j * G, -g - 1j * Dm, 0.0, e2],
            [0.0, 0.0, 1j * delta - k2, 1j * G],
            [0.0, e2, 1j * G, 1j * Dm - g],
        ],
        dtype=complex,
    )
    return DriftMatrix(
        M, CaseTag.CaseII, params.kappa, params.gamma_m, delta_small=delta, Delta_m=Dm
    )


def drift_matrix(params, drive):
    """Case I or II drift matrix depending on ``drive.epsilon_d``."""
    if drive.case == 1:
        return drift_case1(params, drive.G)
    return drift_case2(params, drive.G, drive.epsilon_d, drive.omega_d)


def characteristic_polynomial(entries):
    """Coefficients of ``det(lambda I - A)``, highest power first.

    Faddeev-LeVerrier recursion, so no eigen-decomposition is involved.
    """
    A = np.asarray(entries, dtype=complex)
    n = A.shape[0]
    coeffs = [1.0 + 0j]
    Mk = np.zeros_like(A)
    eye = np.eye(n)
    for k in range(1, n + 1):
        Mk = A @ Mk + coeffs[-1] * eye
        coeffs.append(-np.trace(A @ Mk) / k)
    return np.array(coeffs)


def _first_column(coeffs, eps):
    """First column of the Routh array; zero pivots replaced by ``eps``."""
    n = len(coeffs) - 1
    width = n // 2 + 1
    rows = [
        np.zeros(width),
        np.zeros(width),
    ]
    rows[0][: len(coeffs[0::2])] = coeffs[0::2]
    rows[1][: len(coeffs[1::2])] = coeffs[1::2]
    perturbed = False
    for i in range(2, n + 1):
        above, top = rows[-1], rows[-2]
        if not np.any(above):
            # whole row vanished: use the derivative of the auxiliary polynomial
            order = n - (i - 2)
            powers = order - 2 * np.arange(width)
            above = np.where(powers > 0, top * powers, 0.0)
            rows[-1] = above
            perturbed = True
        if above[0] == 0.0:
            above = above.copy()
            above[0] = eps
            rows[-1] = above
            perturbed = True
        new = np.zeros(width)
        new[:-1] = (above[0] * top[1:] - top[0] * above[1:]) / above[0]
        rows.append(new)
    return np.array([r[0] for r in rows]), perturbed


def routh_hurwitz(coeffs):
    """Routh-Hurwitz test on a real polynomial (highest power first).

    Returns
    -------
    stable : bool
        True when every root has a strictly negative real part.
    sign_changes : int
        Sign changes in the first column, i.e. the number of roots in the
        open right half-plane (zero pivots are perturbed to ``+eps``).
    """
    c = np.asarray(coeffs, dtype=float)
    if c[0] < 0:
        c = -c
    eps = 1e-30 * max(np.max(np.abs(c)), 1.0)
    column, perturbed = _first_column(c, eps)
    signs = np.sign(column)
    sign_changes = int(np.sum(signs[1:] != signs[:-1]))
    stable = (not perturbed) and bool(np.all(column > 0))
    return stable, sign_changes


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: np.ndarray
    max_real_part: float
    routh_hurwitz_pass: bool
    consistent: bool

    @property
    def stable(self):
        return self.max_real_part < 0

    def as_dict(self):
        return {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "max_real_part": float(self.max_real_part),
            "routh_hurwitz_pass": bool(self.routh_hurwitz_pass),
            "consistent": bool(self.consistent),
            "stable": bool(self.stable),
        }


def assess_stability(M):
    """Stability of ``dv/dt = M v`` by eigenvalues and by Routh-Hurwitz.

    The characteristic polynomial is built on ``M / s`` with ``s`` the largest
    entry magnitude; positive rescaling leaves the sign of every real part
    unchanged.  Its coefficients must be real (a structural property of the
    conjugate-paired basis), otherwise :class:`ComplexCharPoly` is raised.
    """
    A = M.entries if isinstance(M, DriftMatrix) else np.asarray(M, dtype=complex)
    scale = float(np.max(np.abs(A)))
    coeffs = characteristic_polynomial(A / scale)
    imag = float(np.max(np.abs(coeffs.imag)))
    if imag > CHARPOLY_REAL_TOL * float(np.max(np.abs(coeffs))):
        raise ComplexCharPoly(
            f"characteristic polynomial has imaginary residue {imag:.3e}; "
            "drift matrix breaks the conjugate pairing"
        )
    rh_pass, _ = routh_hurwitz(coeffs.real)
    eig = np.linalg.eigvals(A)
    max_re = float(np.max(eig.real))
    consistent = (max_re < 0) == rh_pass
    if not consistent:
        warnings.warn(
            f"Routh-Hurwitz says {'stable' if rh_pass else 'unstable'} but the "
            f"largest eigenvalue real part is {max_re:.6g}",
            StabilityDisagreementWarning,
            stacklevel=2,
        )
    return StabilityReport(eig, max_re, rh_pass, consistent)
