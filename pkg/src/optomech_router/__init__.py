"""Single-photon routing in a two-port optomechanical cavity.

Modules
-------
model        physical parameters and derived couplings
steadystate  classical mean fields, pump inversion, time-domain check
dynamics     drift matrices and stability (eigenvalues, Routh-Hurwitz)
spectra      transfer coefficients, scattering probabilities, output spectra
router       routing verdicts and figure presets
cli          ``optomech-router`` command line
"""

from .dynamics import (
    CaseTag,
    DriftMatrix,
    RWAValidityWarning,
    StabilityReport,
    assess_stability,
    drift_case1,
    drift_case2,
    drift_matrix,
)
from .errors import (
    NumericalError,
    RouterError,
    UnstableSystem,
    ValidationError,
)
from .model import DriveParams, ModelParams, RawParams, derive_constants, paper_preset
from .router import Decision, RoutingVerdict, reproduce, route_decision, snr, write_dataset
from .spectra import (
    ScatterProbabilities,
    SpectrumDecomposition,
    TransferRow,
    classical_probe_oracle,
    input_spectrum,
    output_spectra,
    scatter,
    transfer_row,
)
from .steadystate import (
    SteadyState,
    all_fixed_points,
    integrate_mean_field,
    pump_for_coupling,
    solve_steady,
)

__version__ = "0.1.0"
