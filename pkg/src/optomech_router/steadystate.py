"""Classical steady state of the pumped cavity and displaced resonator.

The mean fields obey

    alpha = eps_p / (2 kappa + i Delta + i g0 (beta + beta*))
    beta  = -i g0 |alpha|^2 / (gamma + i omega_m)

Eliminating ``beta`` leaves a cubic in ``x = |alpha|^2``; that closed form is
used to enumerate every fixed point and to invert the pump amplitude for a
requested effective coupling ``G = g0 |alpha|``.  The time-domain integrator
at the bottom is kept independent of both and serves as the check on them.
"""

from dataclasses import dataclass
import cmath
import math

import numpy as np
from scipy.optimize import brentq

from .errors import (
    InvalidParameter,
    Multistability,
    NonConvergence,
    NotAttainable,
    StepSizeTooLarge,
)

__all__ = [
    "SteadyState",
    "MeanFieldTrajectory",
    "solve_steady",
    "all_fixed_points",
    "pump_for_coupling",
    "integrate_mean_field",
    "steady_residual",
]

RELAXATION = 0.5
MAX_ITER = 100_000
DISTINCT_TOL = 1e-6


@dataclass(frozen=True)
class SteadyState:
    alpha: complex
    beta: complex
    G_eff: float
    Delta_prime: float
    residual: float


def _beta_of(params, alpha):
    return -1j * params.g0 * abs(alpha) ** 2 / (params.gamma_m + 1j * params.omega_m)


def _alpha_of(params, epsilon_p, beta):
    shift = params.g0 * 2.0 * beta.real
    return epsilon_p / (2.0 * params.kappa + 1j * (params.Delta + shift))


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def steady_residual(params, epsilon_p, alpha, beta):
    """Largest relative mismatch when (alpha, beta) is substituted back."""
    return max(
        _rel(alpha, _alpha_of(params, epsilon_p, beta)),
        _rel(beta, _beta_of(params, alpha)),
    )


def _make_state(params, epsilon_p, alpha):
    beta = _beta_of(params, alpha)
    return SteadyState(
        alpha=complex(alpha),
        beta=complex(beta),
        G_eff=params.g0 * abs(alpha),
        Delta_prime=params.Delta + params.g0 * 2.0 * beta.real,
        residual=steady_residual(params, epsilon_p, alpha, beta),
    )


def _iterate(params, epsilon_p, alpha, tol, max_iter):
    residual = math.inf
    for _ in range(max_iter):
        beta = _beta_of(params, alpha)
        target = _alpha_of(params, epsilon_p, beta)
        alpha = (1.0 - RELAXATION) * alpha + RELAXATION * target
        residual = steady_residual(params, epsilon_p, alpha, _beta_of(params, alpha))
        # well below the tolerance, so re-substitution downstream is clean
        if residual <= 1e-3 * tol:
            return alpha, residual
    if residual <= tol:
        return alpha, residual
    raise NonConvergence(
        f"fixed-point iteration hit {max_iter} iterations, residual {residual:.3e}",
        residual=residual,
    )


def solve_steady(params, epsilon_p, *, tol=1e-10, max_iter=MAX_ITER):
    """Damped fixed-point solution of the mean-field equations.

    Three seeds are tried (zero, the linear response ``eps_p/(2 kappa + i
    Delta)``, and twice that).  If they settle on fixed points more than
    ``1e-6`` (relative) apart, :class:`Multistability` is raised with all of
    them attached.

    Parameters
    ----------
    params : ModelParams
    epsilon_p : float
        Pump amplitude in rad/s, ``>= 0``.
    tol : float
        Required relative substitution residual.

    Returns
    -------
    SteadyState
    """
    if not math.isfinite(epsilon_p) or epsilon_p < 0:
        raise InvalidParameter(f"epsilon_p must be finite and >= 0, got {epsilon_p!r}")
    if epsilon_p == 0:
        return SteadyState(0j, 0j, 0.0, params.Delta, 0.0)

    linear = epsilon_p / (2.0 * params.kappa + 1j * params.Delta)
    found = []
    for seed in (0j, linear, 2.0 * linear):
        alpha, _ = _iterate(params, epsilon_p, seed, tol, max_iter)
        if not any(_rel(alpha, other) <= DISTINCT_TOL for other in found):
            found.append(alpha)
    states = [_make_state(params, epsilon_p, a) for a in found]
    if len(states) > 1:
        raise Multistability(
            f"{len(states)} distinct fixed points reached from different seeds",
            fixed_points=states,
        )
    return states[0]


def _shift_per_photon(params):
    # Delta' = Delta - c |alpha|^2
    return 2.0 * params.g0**2 * params.omega_m / (params.gamma_m**2 + params.omega_m**2)


def all_fixed_points(params, epsilon_p):
    """Every fixed point, from the real positive roots of the cubic in |alpha|^2.

    ``eps_p^2 = x [ (2 kappa)^2 + (Delta - c x)^2 ]`` with
    ``c = 2 g0^2 omega_m / (gamma^2 + omega_m^2)``.  Sorted by ``|alpha|``.
    """
    if epsilon_p == 0:
        return [SteadyState(0j, 0j, 0.0, params.Delta, 0.0)]
    c = _shift_per_photon(params)
    k2 = 2.0 * params.kappa
    coeffs = [c * c, -2.0 * params.Delta * c, k2 * k2 + params.Delta**2, -epsilon_p**2]
    roots = np.roots(coeffs)
    xs = sorted(
        r.real for r in roots if r.real > 0 and abs(r.imag) <= 1e-9 * max(abs(r), 1.0)
    )
    states = []
    for x in xs:
        alpha = epsilon_p / (k2 + 1j * (params.Delta - c * x))
        # one pass through the exact map polishes root rounding
        alpha = _alpha_of(params, epsilon_p, _beta_of(params, alpha))
        states.append(_make_state(params, epsilon_p, alpha))
    return states


def pump_for_coupling(params, G_target, *, rtol=1e-8):
    """Pump amplitude whose lower-branch steady state has ``G_eff = G_target``.

    The closed-form estimate from the cubic is refined with Brent's method
    on ``eps_p -> solve_steady(eps_p).G_eff``.

    Raises
    ------
    NotAttainable
        If ``G_target`` lies beyond the fold of the lower branch, where the
        pump-to-coupling map stops being monotone.
    """
    if not math.isfinite(G_target) or G_target < 0:
        raise InvalidParameter(f"G_target must be finite and >= 0, got {G_target!r}")
    if G_target == 0:
        return 0.0
    c = _shift_per_photon(params)
    k2 = 2.0 * params.kappa
    x = (G_target / params.g0) ** 2

    # d(eps_p^2)/dx must stay positive on [0, x]
    def slope(u):
        return 3.0 * c * c * u * u - 4.0 * params.Delta * c * u + k2 * k2 + params.Delta**2

    u_min = 2.0 * params.Delta / (3.0 * c)
    worst = min(slope(0.0), slope(x), slope(u_min) if 0.0 < u_min < x else math.inf)
    if worst <= 0:
        raise NotAttainable(
            f"G = {G_target:.6g} rad/s lies past the fold of the lower branch"
        )

    estimate = math.sqrt(x) * abs(k2 + 1j * (params.Delta - c * x))

    def mismatch(eps):
        return solve_steady(params, eps).G_eff - G_target

    if abs(mismatch(estimate)) <= 1e-2 * rtol * G_target:
        return estimate
    width = 1e-6
    while width < 0.5:
        lo, hi = estimate * (1 - width), estimate * (1 + width)
        f_lo, f_hi = mismatch(lo), mismatch(hi)
        if f_lo <= 0 <= f_hi:
            return brentq(mismatch, lo, hi, xtol=1e-3 * rtol * estimate, rtol=1e-15)
        width *= 10
    raise NotAttainable(f"could not bracket G = {G_target:.6g} rad/s")


# --- time-domain oracle ---------------------------------------------------


@dataclass(frozen=True)
class MeanFieldTrajectory:
    t: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    @property
    def endpoint(self):
        return complex(self.alpha[-1]), complex(self.beta[-1])


def _smooth_ramp(t, ramp_time):
    """C-infinity step from 0 at t=0 to 1 at t=ramp_time."""
    if ramp_time <= 0 or t >= ramp_time:
        return 1.0
    if t <= 0:
        return 0.0
    u = t / ramp_time
    a = math.exp(-1.0 / u)
    b = math.exp(-1.0 / (1.0 - u)) if u < 1.0 else 0.0
    return a / (a + b)


def _etd_coefficients(z, h, n_contour=32):
    """ETDRK4 weights for a scalar linear rate, contour-averaged for stability."""
    r = np.exp(2j * np.pi * (np.arange(1, n_contour + 1) - 0.5) / n_contour)
    lr = z + r
    E = cmath.exp(z)
    E2 = cmath.exp(z / 2)
    Q = h * np.mean((np.exp(lr / 2) - 1) / lr)
    f1 = h * np.mean((-4 - lr + np.exp(lr) * (4 - 3 * lr + lr**2)) / lr**3)
    f2 = h * np.mean((2 + lr + np.exp(lr) * (-2 + lr)) / lr**3)
    f3 = h * np.mean((-4 - 3 * lr - lr**2 + np.exp(lr) * (4 - lr)) / lr**3)
    return E, E2, complex(Q), complex(f1), complex(f2), complex(f3)


class _ETDStepper:
    def __init__(self, params, epsilon_p, ramp_time, h):
        self.lin = (
            -(2.0 * params.kappa + 1j * params.Delta),
            -(params.gamma_m + 1j * params.omega_m),
        )
        self.g0 = params.g0
        self.epsilon_p = epsilon_p
        self.ramp_time = ramp_time
        self.h = h
        self.coef = [_etd_coefficients(L * h, h) for L in self.lin]

    def nonlinear(self, a, b, t):
        drive = self.epsilon_p * _smooth_ramp(t, self.ramp_time)
        na = -1j * self.g0 * a * (2.0 * b.real) + drive
        nb = -1j * self.g0 * (a.real * a.real + a.imag * a.imag)
        return na, nb

    def step(self, a, b, t):
        (Ea, E2a, Qa, f1a, f2a, f3a), (Eb, E2b, Qb, f1b, f2b, f3b) = self.coef
        h = self.h
        Nua, Nub = self.nonlinear(a, b, t)
        aa = E2a * a + Qa * Nua
        ab = E2b * b + Qb * Nub
        Naa, Nab = self.nonlinear(aa, ab, t + h / 2)
        ba = E2a * a + Qa * Naa
        bb = E2b * b + Qb * Nab
        Nba, Nbb = self.nonlinear(ba, bb, t + h / 2)
        ca = E2a * aa + Qa * (2 * Nba - Nua)
        cb = E2b * ab + Qb * (2 * Nbb - Nub)
        Nca, Ncb = self.nonlinear(ca, cb, t + h)
        a_new = Ea * a + Nua * f1a + 2 * (Naa + Nba) * f2a + Nca * f3a
        b_new = Eb * b + Nub * f1b + 2 * (Nab + Nbb) * f2b + Ncb * f3b
        return a_new, b_new


def integrate_mean_field(
    params,
    epsilon_p,
    t_end,
    dt,
    *,
    initial=(0j, 0j),
    ramp_time=0.0,
    rtol=1e-8,
    check_every=1000,
    max_samples=20_001,
):
    """Integrate the noise-free nonlinear mean-field equations.

    Uses a fourth-order exponential time-differencing scheme: the damped
    free rotations of cavity and resonator are propagated exactly and only
    the radiation-pressure terms are stepped, so ``dt`` has to resolve the
    coupling dynamics rather than the carrier rotation.  Equilibria of the
    ODE are exact fixed points of the scheme.

    Parameters
    ----------
    params : ModelParams
    epsilon_p : float
        Final pump amplitude (rad/s).
    t_end, dt : float
        Duration and fixed step (s).
    initial : (complex, complex)
        Starting (alpha, beta).
    ramp_time : float
        If positive the pump is switched on smoothly over this time, which
        keeps the resonator from ringing and follows the branch connected
        to the unpumped state.
    rtol : float
        Local error bound, checked by step doubling every ``check_every``
        steps.

    Raises
    ------
    StepSizeTooLarge
        When the step-doubling error estimate exceeds ``rtol``.
    """
    if dt <= 0 or t_end <= 0:
        raise InvalidParameter("t_end and dt must be positive")
    n_steps = int(math.ceil(t_end / dt - 1e-9))
    h = t_end / n_steps
    full = _ETDStepper(params, epsilon_p, ramp_time, h)
    half = _ETDStepper(params, epsilon_p, ramp_time, h / 2)
    stride = max(1, n_steps // (max_samples - 1))
    # short runs still get a couple of dozen error checks
    check_every = max(1, min(check_every, n_steps // 25))

    a, b = complex(initial[0]), complex(initial[1])
    # error is measured against the linear-response size or the largest
    # magnitude seen so far, whichever is bigger
    scale_a = max(epsilon_p / abs(2.0 * params.kappa + 1j * params.Delta), abs(a))
    scale_b = params.g0 * scale_a**2 / abs(params.gamma_m + 1j * params.omega_m)
    peak_a, peak_b = max(abs(a), scale_a), max(abs(b), scale_b)
    ts, alphas, betas = [0.0], [a], [b]
    for k in range(n_steps):
        t = k * h
        a_next, b_next = full.step(a, b, t)
        if k % check_every == 0:
            a_mid, b_mid = half.step(a, b, t)
            a_fine, b_fine = half.step(a_mid, b_mid, t + h / 2)
            peak_a = max(peak_a, abs(a_fine))
            peak_b = max(peak_b, abs(b_fine))
            err = max(
                abs(a_fine - a_next) / peak_a if peak_a else 0.0,
                abs(b_fine - b_next) / peak_b if peak_b else 0.0,
            )
            if err > rtol:
                raise StepSizeTooLarge(
                    f"local error estimate {err:.3e} exceeds {rtol:.1e} at t = {t:.6g} s"
                )
        a, b = a_next, b_next
        if (k + 1) % stride == 0 or k + 1 == n_steps:
            ts.append((k + 1) * h)
            alphas.append(a)
            betas.append(b)
    return MeanFieldTrajectory(np.array(ts), np.array(alphas), np.array(betas))
