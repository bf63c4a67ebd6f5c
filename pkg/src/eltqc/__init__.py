"""Classical simulation of non-Markovian open-system dynamics as an ensemble of
Lindbladian trajectories, each run through Sz.-Nagy dilated two-qubit circuits."""

from .channels import ChannelSpec, KrausMap, amplitude_damping_kraus, apply_channel, lindblad_propagate
from .circuit import Circuit, Gate, ShotResult, circuit_unitary, sample, simulate
from .dilation import DilatedUnitary, dilate, dilate_channel
from .elt import (
    Backend,
    Mode,
    PopulationSeries,
    TrajectoryFamily,
    TrajectorySpec,
    WeightSchedule,
    elt_evolve,
    populations_from_dilation,
    trajectory_gamma_t,
)
from .estimator import ELTRegressor, TrajectoryPopulations
from .jcref import JCParams, exact_populations, spectral_density
from .linalg import hermitian_eig, psd_sqrt, unitarity_defect
from .stateprep import VectorEnsemble, decompose_density, pad, markovian_ensemble
from .synthesis import SynthesisReport, prep_and_apply, synthesize_2q
from .weights import fit_report, fit_weights

__version__ = "0.1.0"
