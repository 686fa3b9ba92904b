"""Coinless discrete-time quantum walks on periodic hypercubic lattices.

The walk operator is the product of two block-diagonal unitaries built from
the staggered Dirac Hamiltonian on the odd and even hypercube tilings.
"""

from .dirac_blocks import (BlockHamiltonian, BlockUnitary, MixingParams, build_block_hamiltonian,
                           exponentiate_block, verify_block_algebra)
from .evolve import (UNBIASED_C, AbsorbingWalkState, WalkEngine, apply_half_step, init_delta,
                     init_symmetric, init_symmetric_1d, init_uniform, run, step, step_absorbing_1d)
from .lattice import (AmplitudeField, BlockList, LatticeGeometry, coords_of, linear_index, norm_sq,
                      partition_blocks, translate)
from .observables import (distribution, marked_probability, moments_1d, peak_positions,
                          support_interval_1d)
from .search import (SearchConfig, SearchTrace, ScalingFit, detect_first_peak, periodicity_check,
                     reflect_marked, scaling_experiment, scan_parameters, search_run)
from .spectral import (dispersion, eigenvectors, smooth_density, smooth_moments, spectral_propagate,
                       transfer_matrix)

__version__ = "0.1.0"
