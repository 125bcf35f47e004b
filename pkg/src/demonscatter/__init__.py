"""1D multichannel quantum scattering and Maxwell-demon analysis.

Computes flux-normalized S-matrices for local matrix potentials and
nonlocal complex kernels, quantifies distance-to-demon behavior through
the parameter D, classifies kernel symmetries, and numerically designs
quantum-optical asymmetric devices.
"""

from .channels import (
    ChannelAmplitudes,
    ChannelKinematics,
    ChannelSet,
    SMatrix,
    channel_row_column_sums,
    extract_channel,
    haar_unitary,
    kinematics,
    unitarity_defect,
)
from .demon import (
    DemonReport,
    DZeroBounds,
    check_bounds,
    classify_boundary,
    construct_boundary_smatrix,
    demon_parameter,
    device_code,
    dzero_bounds,
    sweep_demon,
)
from .kernels import (
    BranchedWavenumber,
    OpticalParameters,
    build_kernel,
    compute_mu,
    compute_q,
    feshbach_reference,
    regenerate_kernel,
)
from .local_solver import (
    LocalPotentialModel,
    ScatterSolution,
    build_two_level_model,
    convergence_sweep,
    solve_local,
)
from .nonlocal_solver import NonlocalKernel, solve_nonlocal, symmetrize_checks
from .optimize import (
    DeviceTarget,
    OptimizationResult,
    PAPER_POINT,
    cost,
    optimize,
    refine_paper_point,
)
from .symmetry import (
    SymmetryClass,
    SymmetryReport,
    classify,
    predicted_relations,
    residual,
    verify_predictions,
)
from .units import (
    Grid,
    RabiProfile,
    UnitSystem,
    default_grid,
    make_grid,
    rabi_eval,
    velocity_to_energy,
)

__version__ = "0.1.0"
