"""Physical parameters of the two-mirror optomechanical cavity.

All frequencies and rates are angular (rad/s).  ``gamma_m`` is the
*amplitude* damping rate that multiplies the mechanical operator in the
Langevin equation (so the mechanical susceptibility has FWHM ``2*gamma_m``);
``kappa`` follows the same convention with the cavity amplitude decaying at
``2*kappa``.
"""

from dataclasses import asdict, dataclass, fields
import math
import numbers

from scipy import constants

from .errors import InvalidParameter

__all__ = [
    "RawParams",
    "ModelParams",
    "DriveParams",
    "derive_constants",
    "paper_preset",
    "GAMMA_CONVENTIONS",
]


@dataclass(frozen=True)
class RawParams:
    wavelength_lambda: float
    cavity_length_L: float
    mirror_mass_m: float
    omega_m: float
    gamma_m: float
    kappa: float
    Delta: float
    n_th: float
    Gamma_photon: float

    def __post_init__(self):
        for f in fields(RawParams):
            value = getattr(self, f.name)
            if not isinstance(value, numbers.Real) or not math.isfinite(value):
                raise InvalidParameter(f"{f.name} must be a finite number, got {value!r}")
            if f.name == "n_th":
                if value < 0:
                    raise InvalidParameter(f"n_th must be >= 0, got {value!r}")
            elif value <= 0:
                raise InvalidParameter(f"{f.name} must be > 0, got {value!r}")
        if self.kappa >= self.omega_m:
            raise InvalidParameter(
                f"kappa ({self.kappa!r}) must be below omega_m ({self.omega_m!r}): "
                "resolved-sideband regime"
            )

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(RawParams)}


@dataclass(frozen=True)
class ModelParams(RawParams):
    """RawParams plus the derived cavity frequency and couplings."""

    omega_c: float
    x_zpf: float
    g0: float

    def __post_init__(self):
        super().__post_init__()

    def to_raw(self):
        return RawParams(**RawParams.as_dict(self))

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class DriveParams:
    """Effective coupling plus the optional parametric modulation.

    ``epsilon_d == 0`` selects case I (unmodulated).  Any positive
    ``epsilon_d`` needs a positive modulation frequency ``omega_d``.
    """

    G: float
    epsilon_d: float = 0.0
    omega_d: float = 0.0

    def __post_init__(self):
        for name in ("G", "epsilon_d", "omega_d"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise InvalidParameter(f"{name} must be finite and >= 0, got {value!r}")
        if self.epsilon_d > 0 and self.omega_d <= 0:
            raise InvalidParameter("epsilon_d > 0 requires omega_d > 0")

    @property
    def case(self):
        return 2 if self.epsilon_d > 0 else 1


def derive_constants(raw):
    """Fill in ``omega_c = 2 pi c / lambda``, ``x_zpf`` and ``g0``.

    ``g0 = (omega_c / L) * sqrt(hbar / (2 m omega_m))``, the usual
    moving-mirror coupling.
    """
    if not isinstance(raw, RawParams):
        raise InvalidParameter(f"expected RawParams, got {type(raw).__name__}")
    omega_c = 2.0 * math.pi * constants.c / raw.wavelength_lambda
    x_zpf = math.sqrt(constants.hbar / (2.0 * raw.mirror_mass_m * raw.omega_m))
    g0 = omega_c / raw.cavity_length_L * x_zpf
    return ModelParams(**RawParams.as_dict(raw), omega_c=omega_c, x_zpf=x_zpf, g0=g0)


# Readings of the quoted mechanical damping "0.76 Hz" as an amplitude rate.
GAMMA_CONVENTIONS = {
    # FWHM linewidth in Hz: 2*gamma = 2 pi * 0.76
    "linewidth": math.pi,
    # angular rate: gamma = 2 pi * 0.76
    "angular": 2.0 * math.pi,
    # the bare number used as rad/s
    "raw": 1.0,
}

PAPER_GAMMA_HZ = 0.76
PAPER_EPSILON_D_OVER_KAPPA = 2.37e-4


def paper_preset(case=1, gamma_convention="linewidth"):
    """Preset: 1054 nm light, 6.7 cm cavity, 40 ng resonator at 134 kHz.

    Parameters
    ----------
    case : {1, 2}
        1 returns the unmodulated drive ``G = 0.2 omega_m`` with the photon
        linewidth ``Gamma = omega_m``; 2 returns the modulated drive
        (``G = 0.2 omega_m``, ``epsilon_d = 2.37e-4 kappa``,
        ``omega_d = 0.8 omega_m``) with ``Gamma = 0.01 kappa``.
    gamma_convention : str
        Key of :data:`GAMMA_CONVENTIONS`.

    Returns
    -------
    (RawParams, DriveParams)
    """
    if case not in (1, 2):
        raise InvalidParameter(f"case must be 1 or 2, got {case!r}")
    try:
        gamma_factor = GAMMA_CONVENTIONS[gamma_convention]
    except KeyError:
        raise InvalidParameter(
            f"unknown gamma_convention {gamma_convention!r}; "
            f"choose from {sorted(GAMMA_CONVENTIONS)}"
        ) from None
    omega_m = 2.0 * math.pi * 134e3
    kappa = 0.1 * omega_m
    gamma = gamma_factor * PAPER_GAMMA_HZ
    if case == 1:
        Gamma = omega_m
        drive = DriveParams(G=0.2 * omega_m)
    else:
        Gamma = 0.01 * kappa
        drive = DriveParams(
            G=0.2 * omega_m,
            epsilon_d=PAPER_EPSILON_D_OVER_KAPPA * kappa,
            omega_d=0.8 * omega_m,
        )
    raw = RawParams(
        wavelength_lambda=1054e-9,
        cavity_length_L=6.7e-2,
        mirror_mass_m=40e-12,
        omega_m=omega_m,
        gamma_m=gamma,
        kappa=kappa,
        Delta=omega_m,
        n_th=1.0,
        Gamma_photon=Gamma,
    )
    return raw, drive
